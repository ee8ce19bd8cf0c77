#include "nondivfem/solve.hpp"

#include <cmath>

namespace nondivfem {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::RecoveryCG:
      return "recovery-cg";
    case Scheme::RecoveryDG:
      return "recovery-dg";
    case Scheme::NSZ:
      return "nsz";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "recovery-cg") return Scheme::RecoveryCG;
  if (name == "recovery-dg") return Scheme::RecoveryDG;
  if (name == "nsz") return Scheme::NSZ;
  throw ConfigError("unknown scheme '" + name + "' (expected recovery-cg, recovery-dg or nsz)");
}

Penalties default_penalties(Scheme scheme, double epsilon) {
  if (scheme == Scheme::NSZ || epsilon < 0.5) return {1.0, 0.0};
  return {0.0, 0.0};
}

int coefficient_quadrature_degree(const ProblemData& problem, int degree) {
  return problem.discontinuous_coefficient ? kHighOrderQuadratureDegree : default_quadrature_degree(degree);
}

Solution solve_problem(const ProblemData& problem, std::shared_ptr<const Mesh> mesh, const SolveOptions& options) {
  if (options.degree < 1) throw ConfigError("solve_problem: degree must be >= 1");
  if (options.scheme == Scheme::NSZ && options.degree < 2) {
    throw ConfigError("solve_problem: the nsz scheme needs degree >= 2");
  }
  Solution sol;
  sol.quad_degree = options.quad_degree.value_or(coefficient_quadrature_degree(problem, options.degree));
  const std::vector<Point2> samples = quadrature_points(*mesh, sol.quad_degree);
  sol.cordes = cordes_analyze(problem, samples);

  Penalties pen = default_penalties(options.scheme, sol.cordes.epsilon);
  if (options.eta1) pen.eta1 = *options.eta1;
  if (options.eta2) pen.eta2 = *options.eta2;
  if (pen.eta1 < 0.0 || pen.eta2 < 0.0) throw ConfigError("solve_problem: penalties must be >= 0");
  if (options.scheme == Scheme::NSZ && !(pen.eta1 > 0.0)) {
    throw ConfigError("solve_problem: the nsz scheme needs eta1 > 0");
  }
  sol.penalties = pen;
  if (options.degree == 1 && options.scheme != Scheme::NSZ) {
    sol.warnings.emplace_back("degree 1: the recovered Hessian is not consistent; convergence in H2_h is not expected");
  }

  const SpacePtr V = build_space(mesh, options.degree, Continuity::CG, ValueShape::Scalar);
  std::shared_ptr<const HessianOperator> hess;

  if (options.scheme == Scheme::NSZ) {
    const NszSystem sys = assemble_nsz(*V, problem, pen.eta1, sol.quad_degree);
    const std::vector<Index> boundary = boundary_dofs(*V);
    std::vector<char> on_boundary(static_cast<std::size_t>(V->num_scalar_dofs()), 0);
    for (Index b : boundary) on_boundary[static_cast<std::size_t>(b)] = 1;
    std::vector<Triplet> r;
    Index row = 0;
    for (Index k = 0; k < V->num_scalar_dofs(); ++k) {
      if (!on_boundary[static_cast<std::size_t>(k)]) r.emplace_back(row++, k, 1.0);
    }
    SparseMatrix R(row, V->num_scalar_dofs());
    R.setFromTriplets(r.begin(), r.end());
    const SparseMatrix a = R * sys.matrix * SparseMatrix(R.transpose());
    const Vector b = R * sys.rhs;
    const DirectSolver solver(a);
    const Vector x = solver.solve(b);
    sol.report.iterations = 0;
    sol.report.final_true_residual = (b - a * x).norm();
    sol.report.residual_history = {b.norm(), sol.report.final_true_residual};
    sol.report.converged = std::isfinite(sol.report.final_true_residual) &&
                           sol.report.final_true_residual <= std::max(options.gmres.tol_abs, options.gmres.tol_rel * b.norm());
    sol.u_h = FEFunction(V, R.transpose() * x);
    if (options.want_hessian) hess = std::make_shared<const HessianOperator>(V, Continuity::CG);
  } else {
    const Continuity mode = options.scheme == Scheme::RecoveryCG ? Continuity::CG : Continuity::DG;
    hess = std::make_shared<const HessianOperator>(V, mode);
    const SystemOperator op(hess, problem, pen, sol.quad_degree);
    const Vector f_W = assemble_load(*hess->space_W(), problem, sol.quad_degree);
    const Vector b = op.rhs(f_W);
    const LinearAction apply = [&op](const Vector& v) { return op.apply(v); };
    LinearAction precond;
    std::optional<DirectSolver> p;
    if (options.use_preconditioner) {
      p.emplace(build_preconditioner(op));
      precond = [&p](const Vector& v) { return p->solve(v); };
    }
    auto [x, report] = gmres(apply, b, precond, options.gmres);
    sol.report = std::move(report);
    sol.u_h = FEFunction(V, op.extend_from_interior(x));
  }
  if (options.want_hessian) sol.hessian = recover_hessian(*hess, sol.u_h);
  return sol;
}

}  // namespace nondivfem
