#include "nondivfem/hessian.hpp"

namespace nondivfem {
namespace {

const DenseMatrix& grad_component(const CellValues& v, int i) { return i == 0 ? v.gx : v.gy; }

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

// Broken volume term -int_T d_i phi_l d_j psi_k shared by both variants.
std::array<std::array<std::vector<Triplet>, 2>, 2> volume_terms(const FunctionSpace& V, const FunctionSpace& W) {
  const Mesh& mesh = V.mesh();
  const QuadratureRule quad = quadrature(std::max(1, V.degree() + W.degree() - 2));
  const Tabulation tabV = V.element().tabulate(quad.points);
  const Tabulation tabW = W.element().tabulate(quad.points);
  std::array<std::array<std::vector<Triplet>, 2>, 2> trip;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const AffineMap map = affine_map(mesh, c);
    const CellValues cv = cell_values(tabV, map, quad);
    const CellValues cw = cell_values(tabW, map, quad);
    const Eigen::Map<const Vector> jxw(cv.jxw.data(), static_cast<Eigen::Index>(cv.jxw.size()));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const DenseMatrix block = -(grad_component(cw, j).transpose() * jxw.asDiagonal() * grad_component(cv, i));
        add_block(trip[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], W.cell_dofs(c), V.cell_dofs(c),
                  block);
      }
    }
  }
  return trip;
}

void check_pair(const FunctionSpace& V, const FunctionSpace& W) {
  if (V.mesh_ptr() != W.mesh_ptr()) throw ConfigError("Hessian recovery: V and W must share a mesh");
  if (V.continuity() != Continuity::CG || V.value_shape() != ValueShape::Scalar) {
    throw ConfigError("Hessian recovery: V must be a continuous scalar space");
  }
  if (W.value_shape() != ValueShape::Scalar) throw ConfigError("Hessian recovery: pass the scalar W space");
}

}  // namespace

SparseMatrix assemble_mass_W(const FunctionSpace& W) {
  if (W.value_shape() != ValueShape::Scalar) throw ConfigError("assemble_mass_W: scalar space required");
  const Mesh& mesh = W.mesh();
  const QuadratureRule quad = quadrature(2 * W.degree());
  const Tabulation tab = W.element().tabulate(quad.points);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_cells() * W.dofs_per_cell() * W.dofs_per_cell()));
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cw = cell_values(tab, affine_map(mesh, c), quad);
    const Eigen::Map<const Vector> jxw(cw.jxw.data(), static_cast<Eigen::Index>(cw.jxw.size()));
    const DenseMatrix block = cw.value.transpose() * jxw.asDiagonal() * cw.value;
    add_block(trip, W.cell_dofs(c), W.cell_dofs(c), block);
  }
  return from_triplets(W.num_scalar_dofs(), W.num_scalar_dofs(), trip);
}

MatrixPair assemble_C_cg(const FunctionSpace& V, const FunctionSpace& W) {
  check_pair(V, W);
  if (W.continuity() != Continuity::CG) throw ConfigError("assemble_C_cg: W must be continuous");
  auto trip = volume_terms(V, W);
  const Mesh& mesh = V.mesh();
  const LineRule line = line_quadrature(V.degree() + W.degree());
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.is_boundary_facet(f)) continue;
    const Index c = mesh.facet(f).cells[0];
    const Point2 n = facet_geometry(mesh, f).normal;
    const FacetQuadrature fq = facet_quadrature(mesh, f, line);
    const CellValues cv = values_at_physical(V.element(), mesh, c, fq.points);
    const CellValues cw = values_at_physical(W.element(), mesh, c, fq.points);
    const Eigen::Map<const Vector> w(fq.weights.data(), static_cast<Eigen::Index>(fq.weights.size()));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const DenseMatrix block = n[j] * (cw.value.transpose() * w.asDiagonal() * grad_component(cv, i));
        add_block(trip[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], W.cell_dofs(c), V.cell_dofs(c),
                  block);
      }
    }
  }
  MatrixPair out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          from_triplets(W.num_scalar_dofs(), V.num_scalar_dofs(), trip[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

MatrixPair assemble_C_dg(const FunctionSpace& V, const FunctionSpace& W) {
  check_pair(V, W);
  if (W.continuity() != Continuity::DG) throw ConfigError("assemble_C_dg: W must be discontinuous");
  auto trip = volume_terms(V, W);
  const Mesh& mesh = V.mesh();
  const LineRule line = line_quadrature(V.degree() + W.degree());
  // Cell-by-cell form of sum_F int_F {grad u} . [w]: each side T of F
  // contributes int_F {d_i u} psi_T n_{T,j} with n_T the outward normal of T.
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    for (int e = 0; e < 3; ++e) {
      const Index f = mesh.cell_facets(c)[static_cast<std::size_t>(e)];
      const Facet& fc = mesh.facet(f);
      FacetGeometry g = facet_geometry(mesh, f);
      const Point2 n = fc.cells[0] == c ? g.normal : -1.0 * g.normal;
      const FacetQuadrature fq = facet_quadrature(mesh, f, line);
      const Eigen::Map<const Vector> w(fq.weights.data(), static_cast<Eigen::Index>(fq.weights.size()));
      const CellValues cw = values_at_physical(W.element(), mesh, c, fq.points);
      const Index other = mesh.neighbor(c, e);
      const double avg = other == kNoCell ? 1.0 : 0.5;
      const CellValues cv_self = values_at_physical(V.element(), mesh, c, fq.points);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          auto& t = trip[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          add_block(t, W.cell_dofs(c), V.cell_dofs(c),
                    avg * n[j] * (cw.value.transpose() * w.asDiagonal() * grad_component(cv_self, i)));
        }
      }
      if (other != kNoCell) {
        const CellValues cv_other = values_at_physical(V.element(), mesh, other, fq.points);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            auto& t = trip[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            add_block(t, W.cell_dofs(c), V.cell_dofs(other),
                      avg * n[j] * (cw.value.transpose() * w.asDiagonal() * grad_component(cv_other, i)));
          }
        }
      }
    }
  }
  MatrixPair out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          from_triplets(W.num_scalar_dofs(), V.num_scalar_dofs(), trip[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

HessianOperator::HessianOperator(SpacePtr space_V, Continuity mode) : mode_(mode), space_V_(std::move(space_V)) {
  space_W_ = build_space(space_V_->mesh_ptr(), space_V_->degree(), mode, ValueShape::Scalar);
  mass_ = assemble_mass_W(*space_W_);
  C_ = mode == Continuity::CG ? assemble_C_cg(*space_V_, *space_W_) : assemble_C_dg(*space_V_, *space_W_);
  laplace_ = C_[0][0] + C_[1][1];
  mass_factor_ = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(mass_);
  if (mass_factor_->info() != Eigen::Success) {
    throw NumericalError("HessianOperator: mass matrix factorization failed (matrix not SPD)");
  }
}

Vector HessianOperator::solve_mass(const Vector& rhs) const { return mass_factor_->solve(rhs); }

HessianFunctions recover_hessian(const HessianOperator& op, const FEFunction& u) {
  if (u.space != op.space_V()) throw ConfigError("recover_hessian: function does not live in the operator's V space");
  HessianFunctions h;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          FEFunction(op.space_W(), op.solve_mass(op.C(i, j) * u.coefficients));
    }
  }
  return h;
}

FEFunction fe_laplacian(const HessianOperator& op, const FEFunction& v) {
  if (v.space != op.space_V()) throw ConfigError("fe_laplacian: function does not live in the operator's V space");
  return FEFunction(op.space_W(), op.solve_mass(op.laplace_matrix() * v.coefficients));
}

}  // namespace nondivfem
