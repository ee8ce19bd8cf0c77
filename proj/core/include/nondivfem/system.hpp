#pragma once

#include "nondivfem/hessian.hpp"
#include "nondivfem/problem.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <vector>

namespace nondivfem {

/// Weights of the stabilization J_h: eta1 for normal-gradient jumps, eta2 for
/// Hessian jumps over interior facets.
struct Penalties {
  double eta1{0.0};
  double eta2{0.0};
};

/// (B_ij)_{kl} = int gamma A_ij psi_l psi_k. B_12 and B_21 are the same matrix.
MatrixPair assemble_B(const FunctionSpace& space_W, const ProblemData& problem, int quad_degree);

/// Stabilization matrix of J_h on the full continuous space (boundary dofs included):
/// eta1 sum_F h_F^{-1} int_F [grad u . n_F][grad v . n_F] + eta2 sum_F h_F int_F [D^2 u] . [D^2 v].
SparseMatrix assemble_stabilization(const FunctionSpace& space_V, double eta1, double eta2);

/// (f_W)_k = int gamma f psi_k.
Vector assemble_load(const FunctionSpace& space_W, const ProblemData& problem, int quad_degree);

/// Sparse direct solver for an explicitly assembled interior-dof matrix.
class DirectSolver {
 public:
  explicit DirectSolver(SparseMatrix matrix);
  Vector solve(const Vector& rhs) const;
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  SparseMatrix matrix_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

/// Matrix-free realization of
///   (K^T M_W^{-1} sum_ij B_ij M_W^{-1} C_ij + S) u = K^T M_W^{-1} f_W,  K = C_11 + C_22,
/// on the interior dofs of V_h. Dirichlet dofs are eliminated; the "full"
/// entry points act on complete coefficient vectors with identity rows on the
/// boundary.
class SystemOperator {
 public:
  SystemOperator(std::shared_ptr<const HessianOperator> hessian, const ProblemData& problem, Penalties penalties,
                 int quad_degree);

  const HessianOperator& hessian() const { return *hessian_; }
  const std::shared_ptr<const HessianOperator>& hessian_ptr() const { return hessian_; }
  const MatrixPair& B() const { return B_; }
  /// Stabilization matrix on the full space.
  const SparseMatrix& S() const { return S_full_; }
  const Penalties& penalties() const { return penalties_; }

  Index num_dofs() const { return hessian_->space_V()->num_scalar_dofs(); }
  Index num_interior() const { return static_cast<Index>(interior_.size()); }
  const std::vector<Index>& interior_dofs() const { return interior_; }
  /// Selection matrix R with R u = u restricted to interior dofs.
  const SparseMatrix& restriction() const { return restriction_; }
  Vector restrict_to_interior(const Vector& full) const;
  Vector extend_from_interior(const Vector& interior) const;

  /// System action on interior vectors: d^2 + 1 mass solves per call.
  Vector apply(const Vector& u_interior) const;
  /// Right-hand side K^T M_W^{-1} f_W on interior dofs.
  Vector rhs(const Vector& f_W) const;

  /// K^T diag(M_W)^{-1} sum_ij diag(B_ij) diag(M_W)^{-1} C_ij + S on interior dofs.
  SparseMatrix preconditioner_matrix() const;

 private:
  std::shared_ptr<const HessianOperator> hessian_;
  Penalties penalties_;
  MatrixPair B_;
  SparseMatrix S_full_;
  std::vector<Index> interior_;
  SparseMatrix restriction_;
  MatrixPair C_int_;
  SparseMatrix K_int_;
  SparseMatrix S_int_;
};

/// Full-vector action: interior rows as SystemOperator::apply, boundary rows identity.
Vector apply_system(const SystemOperator& op, const Vector& u);
/// Full-length right-hand side with zero boundary entries.
Vector assemble_rhs(const SystemOperator& op, const Vector& f_W);
/// Factored preconditioner on interior dofs.
DirectSolver build_preconditioner(const SystemOperator& op);

/// Piecewise-Hessian scheme:
/// int gamma A : D_h^2 u Lap_h v + eta1 sum_F h_F^{-1} int_F [grad u . n][grad v . n] = int gamma f Lap_h v.
/// Matrix and right-hand side are on the full space; restrict to interior dofs to solve.
struct NszSystem {
  SparseMatrix matrix;
  Vector rhs;
};

NszSystem assemble_nsz(const FunctionSpace& space_V, const ProblemData& problem, double eta1, int quad_degree);

}  // namespace nondivfem
