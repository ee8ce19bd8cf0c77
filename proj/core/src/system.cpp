#include "nondivfem/system.hpp"

namespace nondivfem {
namespace {

void add_block(std::vector<Triplet>& out, std::span<const Index> rows, std::span<const Index> cols,
               const DenseMatrix& block) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v != 0.0) out.emplace_back(rows[r], cols[c], v);
    }
  }
}

SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

Eigen::Map<const Vector> as_vector(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

MatrixPair assemble_B(const FunctionSpace& W, const ProblemData& problem, int quad_degree) {
  const Mesh& mesh = W.mesh();
  const QuadratureRule quad = quadrature(quad_degree);
  const Tabulation tab = W.element().tabulate(quad.points);
  std::array<std::vector<Triplet>, 3> trip;  // 11, 12, 22
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cw = cell_values(tab, affine_map(mesh, c), quad);
    Vector w11(static_cast<Eigen::Index>(quad.size())), w12(w11.size()), w22(w11.size());
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const SymMatrix2 a = problem.coefficient(cw.points[q]);
      const double g = normalization(a) * cw.jxw[q];
      const auto qi = static_cast<Eigen::Index>(q);
      w11[qi] = g * a.xx;
      w12[qi] = g * a.xy;
      w22[qi] = g * a.yy;
    }
    add_block(trip[0], W.cell_dofs(c), W.cell_dofs(c), cw.value.transpose() * w11.asDiagonal() * cw.value);
    add_block(trip[1], W.cell_dofs(c), W.cell_dofs(c), cw.value.transpose() * w12.asDiagonal() * cw.value);
    add_block(trip[2], W.cell_dofs(c), W.cell_dofs(c), cw.value.transpose() * w22.asDiagonal() * cw.value);
  }
  const Index n = W.num_scalar_dofs();
  MatrixPair b;
  b[0][0] = from_triplets(n, n, trip[0]);
  b[0][1] = from_triplets(n, n, trip[1]);
  b[1][0] = b[0][1];
  b[1][1] = from_triplets(n, n, trip[2]);
  return b;
}

SparseMatrix assemble_stabilization(const FunctionSpace& V, double eta1, double eta2) {
  if (eta1 < 0.0 || eta2 < 0.0) throw ConfigError("assemble_stabilization: penalties must be >= 0");
  const Index n = V.num_scalar_dofs();
  if (eta1 == 0.0 && eta2 == 0.0) return SparseMatrix(n, n);
  const Mesh& mesh = V.mesh();
  const LineRule line = line_quadrature(2 * V.degree());
  std::vector<Triplet> trip;
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.is_boundary_facet(f)) continue;
    const FacetGeometry g = facet_geometry(mesh, f);
    const Index minus = *g.minus_cell;
    const Index plus = g.plus_cell;
    const FacetQuadrature fq = facet_quadrature(mesh, f, line);
    const CellValues vm = values_at_physical(V.element(), mesh, minus, fq.points);
    const CellValues vp = values_at_physical(V.element(), mesh, plus, fq.points);
    const auto nb = static_cast<Eigen::Index>(V.dofs_per_cell());
    std::vector<Index> dofs(V.cell_dofs(minus).begin(), V.cell_dofs(minus).end());
    dofs.insert(dofs.end(), V.cell_dofs(plus).begin(), V.cell_dofs(plus).end());
    const Point2 n_f = g.normal;
    const auto nq = static_cast<Eigen::Index>(fq.points.size());

    // Rows: quadrature points, columns: local basis (minus block, then plus block).
    DenseMatrix jump_grad(nq, 2 * nb);
    jump_grad << -(n_f.x * vm.gx + n_f.y * vm.gy), n_f.x * vp.gx + n_f.y * vp.gy;
    // [D^2 u] = D^2 u^- n_F - D^2 u^+ n_F.
    DenseMatrix jump_hx(nq, 2 * nb), jump_hy(nq, 2 * nb);
    jump_hx << n_f.x * vm.hxx + n_f.y * vm.hxy, -(n_f.x * vp.hxx + n_f.y * vp.hxy);
    jump_hy << n_f.x * vm.hxy + n_f.y * vm.hyy, -(n_f.x * vp.hxy + n_f.y * vp.hyy);

    const auto w = as_vector(fq.weights);
    DenseMatrix block = DenseMatrix::Zero(2 * nb, 2 * nb);
    if (eta1 > 0.0) block += (eta1 / g.length) * (jump_grad.transpose() * w.asDiagonal() * jump_grad);
    if (eta2 > 0.0) {
      block += (eta2 * g.length) * (jump_hx.transpose() * w.asDiagonal() * jump_hx +
                                    jump_hy.transpose() * w.asDiagonal() * jump_hy);
    }
    add_block(trip, dofs, dofs, block);
  }
  return from_triplets(n, n, trip);
}

Vector assemble_load(const FunctionSpace& W, const ProblemData& problem, int quad_degree) {
  const Mesh& mesh = W.mesh();
  const QuadratureRule quad = quadrature(quad_degree);
  const Tabulation tab = W.element().tabulate(quad.points);
  Vector load = Vector::Zero(W.num_scalar_dofs());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cw = cell_values(tab, affine_map(mesh, c), quad);
    Vector wq(static_cast<Eigen::Index>(quad.size()));
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Point2 x = cw.points[q];
      wq[static_cast<Eigen::Index>(q)] = normalization(problem.coefficient(x)) * problem.forcing(x) * cw.jxw[q];
    }
    const Vector local = cw.value.transpose() * wq;
    const auto dofs = W.cell_dofs(c);
    for (std::size_t i = 0; i < dofs.size(); ++i) load[dofs[i]] += local[static_cast<Eigen::Index>(i)];
  }
  return load;
}

DirectSolver::DirectSolver(SparseMatrix matrix)
    : matrix_(std::move(matrix)), lu_(std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>()) {
  matrix_.makeCompressed();
  lu_->analyzePattern(matrix_);
  lu_->factorize(matrix_);
  if (lu_->info() != Eigen::Success) {
    throw NumericalError("DirectSolver: sparse LU factorization failed: " + lu_->lastErrorMessage());
  }
}

Vector DirectSolver::solve(const Vector& rhs) const { return lu_->solve(rhs); }

SystemOperator::SystemOperator(std::shared_ptr<const HessianOperator> hessian, const ProblemData& problem,
                               Penalties penalties, int quad_degree)
    : hessian_(std::move(hessian)), penalties_(penalties) {
  const FunctionSpace& V = *hessian_->space_V();
  const FunctionSpace& W = *hessian_->space_W();
  B_ = assemble_B(W, problem, quad_degree);
  S_full_ = assemble_stabilization(V, penalties.eta1, penalties.eta2);

  const std::vector<Index> boundary = boundary_dofs(V);
  std::vector<char> on_boundary(static_cast<std::size_t>(V.num_scalar_dofs()), 0);
  for (Index b : boundary) on_boundary[static_cast<std::size_t>(b)] = 1;
  for (Index k = 0; k < V.num_scalar_dofs(); ++k) {
    if (!on_boundary[static_cast<std::size_t>(k)]) interior_.push_back(k);
  }
  std::vector<Triplet> r;
  r.reserve(interior_.size());
  for (std::size_t i = 0; i < interior_.size(); ++i) r.emplace_back(static_cast<Index>(i), interior_[i], 1.0);
  restriction_ = from_triplets(num_interior(), V.num_scalar_dofs(), r);

  const SparseMatrix rt = restriction_.transpose();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      C_int_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = hessian_->C(i, j) * rt;
    }
  }
  K_int_ = hessian_->laplace_matrix() * rt;
  S_int_ = restriction_ * S_full_ * rt;
}

Vector SystemOperator::restrict_to_interior(const Vector& full) const { return restriction_ * full; }

Vector SystemOperator::extend_from_interior(const Vector& interior) const {
  return restriction_.transpose() * interior;
}

Vector SystemOperator::apply(const Vector& u) const {
  const HessianOperator& h = *hessian_;
  Vector weighted = Vector::Zero(h.space_W()->num_scalar_dofs());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      const Vector hij = h.solve_mass(C_int_[si][sj] * u);
      weighted += B_[si][sj] * hij;
    }
  }
  Vector y = K_int_.transpose() * h.solve_mass(weighted);
  if (S_int_.nonZeros() > 0) y += S_int_ * u;
  return y;
}

Vector SystemOperator::rhs(const Vector& f_W) const { return K_int_.transpose() * hessian_->solve_mass(f_W); }

SparseMatrix SystemOperator::preconditioner_matrix() const {
  const SparseMatrix& M = hessian_->mass();
  const Vector inv_m = M.diagonal().cwiseInverse();
  SparseMatrix weighted(K_int_.rows(), K_int_.cols());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      const Vector d = inv_m.cwiseProduct(B_[si][sj].diagonal()).cwiseProduct(inv_m);
      weighted += d.asDiagonal() * C_int_[si][sj];
    }
  }
  SparseMatrix p = SparseMatrix(K_int_.transpose()) * weighted;
  if (S_int_.nonZeros() > 0) p += S_int_;
  p.prune(0.0);
  p.makeCompressed();
  return p;
}

Vector apply_system(const SystemOperator& op, const Vector& u) {
  if (u.size() != op.num_dofs()) throw ConfigError("apply_system: vector length mismatch");
  const Vector y_int = op.apply(op.restrict_to_interior(u));
  Vector y = u;  // boundary rows: identity
  for (std::size_t i = 0; i < op.interior_dofs().size(); ++i) {
    y[op.interior_dofs()[i]] = y_int[static_cast<Eigen::Index>(i)];
  }
  return y;
}

Vector assemble_rhs(const SystemOperator& op, const Vector& f_W) {
  return op.extend_from_interior(op.rhs(f_W));
}

DirectSolver build_preconditioner(const SystemOperator& op) { return DirectSolver(op.preconditioner_matrix()); }

NszSystem assemble_nsz(const FunctionSpace& V, const ProblemData& problem, double eta1, int quad_degree) {
  if (!(eta1 > 0.0)) throw ConfigError("assemble_nsz: eta1 must be positive");
  if (V.degree() < 2) throw ConfigError("assemble_nsz: polynomial degree must be >= 2");
  const Mesh& mesh = V.mesh();
  const QuadratureRule quad = quadrature(quad_degree);
  const Tabulation tab = V.element().tabulate(quad.points);
  std::vector<Triplet> trip;
  NszSystem sys;
  sys.rhs = Vector::Zero(V.num_scalar_dofs());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cv = cell_values(tab, affine_map(mesh, c), quad);
    const auto nq = static_cast<Eigen::Index>(quad.size());
    const auto nb = cv.value.cols();
    DenseMatrix a_hess(nq, nb);  // gamma A : D^2 phi_l at each point, weighted
    Vector fq(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Point2 x = cv.points[static_cast<std::size_t>(q)];
      const SymMatrix2 a = problem.coefficient(x);
      const double g = normalization(a);
      const double w = cv.jxw[static_cast<std::size_t>(q)];
      a_hess.row(q) = w * g * (a.xx * cv.hxx.row(q) + 2.0 * a.xy * cv.hxy.row(q) + a.yy * cv.hyy.row(q));
      fq[q] = w * g * problem.forcing(x);
    }
    const DenseMatrix lap = cv.hxx + cv.hyy;
    add_block(trip, V.cell_dofs(c), V.cell_dofs(c), lap.transpose() * a_hess);
    const Vector local = lap.transpose() * fq;
    const auto dofs = V.cell_dofs(c);
    for (std::size_t i = 0; i < dofs.size(); ++i) sys.rhs[dofs[i]] += local[static_cast<Eigen::Index>(i)];
  }
  sys.matrix = from_triplets(V.num_scalar_dofs(), V.num_scalar_dofs(), trip) + assemble_stabilization(V, eta1, 0.0);
  sys.matrix.makeCompressed();
  return sys;
}

}  // namespace nondivfem
