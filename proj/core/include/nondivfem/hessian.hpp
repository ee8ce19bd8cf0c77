#pragma once

#include "nondivfem/space.hpp"

#include <Eigen/SparseCholesky>

#include <array>
#include <memory>

namespace nondivfem {

using MatrixPair = std::array<std::array<SparseMatrix, 2>, 2>;
using HessianFunctions = std::array<std::array<FEFunction, 2>, 2>;

/// Mass matrix (M)_{kl} = int psi_l psi_k of a scalar space.
SparseMatrix assemble_mass_W(const FunctionSpace& space_W);

/// Mixed matrices of the continuous Hessian recovery:
/// (C_ij)_{kl} = -int d_i phi_l d_j psi_k + int_Gamma d_i phi_l psi_k n_j.
MatrixPair assemble_C_cg(const FunctionSpace& space_V, const FunctionSpace& space_W);

/// Mixed matrices of the discontinuous Hessian recovery: broken volume term
/// plus int_F {d_i phi_l} [psi_k]_j over all facets.
MatrixPair assemble_C_dg(const FunctionSpace& space_V, const FunctionSpace& space_W);

/// Finite element Hessian H_h: V_h -> W_h^{2x2} with a factored mass matrix.
///
/// The recovered Hessian solves M_W h_ij = C_ij u for each component; the
/// finite element Laplacian is M_W w = (C_11 + C_22) v.
class HessianOperator {
 public:
  HessianOperator(SpacePtr space_V, Continuity mode);

  Continuity mode() const { return mode_; }
  const SpacePtr& space_V() const { return space_V_; }
  const SpacePtr& space_W() const { return space_W_; }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& C(int i, int j) const { return C_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
  const MatrixPair& C() const { return C_; }
  /// C_11 + C_22.
  const SparseMatrix& laplace_matrix() const { return laplace_; }

  /// M_W^{-1} rhs by forward/backward substitution.
  Vector solve_mass(const Vector& rhs) const;

 private:
  Continuity mode_;
  SpacePtr space_V_;
  SpacePtr space_W_;
  SparseMatrix mass_;
  MatrixPair C_;
  SparseMatrix laplace_;
  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> mass_factor_;
};

HessianFunctions recover_hessian(const HessianOperator& op, const FEFunction& u);
FEFunction fe_laplacian(const HessianOperator& op, const FEFunction& v);

}  // namespace nondivfem
