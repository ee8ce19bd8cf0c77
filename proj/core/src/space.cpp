#include "nondivfem/space.hpp"

#include <algorithm>
#include <cmath>

namespace nondivfem {
namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

}  // namespace

ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
  if (degree < 1) throw ConfigError("ReferenceElement: degree must be >= 1");
  const int p = degree;
  for (int j = 0; j <= p; ++j) {
    for (int i = 0; i <= p - j; ++i) {
      nodes_.push_back({static_cast<double>(i) / p, static_cast<double>(j) / p});
      NodeInfo info{NodeKind::Interior, -1, 0};
      if (i == 0 && j == 0) {
        info = {NodeKind::Vertex, 0, 0};
      } else if (i == p) {
        info = {NodeKind::Vertex, 1, 0};
      } else if (j == p) {
        info = {NodeKind::Vertex, 2, 0};
      } else if (i + j == p) {
        info = {NodeKind::Edge, 0, j};
      } else if (i == 0) {
        info = {NodeKind::Edge, 1, p - j};
      } else if (j == 0) {
        info = {NodeKind::Edge, 2, i};
      }
      info_.push_back(info);
    }
  }
  for (int total = 0; total <= p; ++total) {
    for (int b = 0; b <= total; ++b) exponents_.push_back({total - b, b});
  }
  const int n = num_basis();
  DenseMatrix vandermonde(n, n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      vandermonde(i, m) = ipow(nodes_[static_cast<std::size_t>(i)].x, exponents_[static_cast<std::size_t>(m)][0]) *
                          ipow(nodes_[static_cast<std::size_t>(i)].y, exponents_[static_cast<std::size_t>(m)][1]);
    }
  }
  coefficients_ = vandermonde.partialPivLu().inverse();
}

Tabulation ReferenceElement::tabulate(std::span<const Point2> points) const {
  const auto nq = static_cast<Eigen::Index>(points.size());
  const int n = num_basis();
  DenseMatrix mono(nq, n), mx(nq, n), my(nq, n), mxx(nq, n), mxy(nq, n), myy(nq, n);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double x = points[static_cast<std::size_t>(q)].x;
    const double y = points[static_cast<std::size_t>(q)].y;
    for (int m = 0; m < n; ++m) {
      const int a = exponents_[static_cast<std::size_t>(m)][0];
      const int b = exponents_[static_cast<std::size_t>(m)][1];
      const double xa = ipow(x, a), yb = ipow(y, b);
      const double xa1 = a >= 1 ? a * ipow(x, a - 1) : 0.0;
      const double yb1 = b >= 1 ? b * ipow(y, b - 1) : 0.0;
      const double xa2 = a >= 2 ? a * (a - 1) * ipow(x, a - 2) : 0.0;
      const double yb2 = b >= 2 ? b * (b - 1) * ipow(y, b - 2) : 0.0;
      mono(q, m) = xa * yb;
      mx(q, m) = xa1 * yb;
      my(q, m) = xa * yb1;
      mxx(q, m) = xa2 * yb;
      mxy(q, m) = xa1 * yb1;
      myy(q, m) = xa * yb2;
    }
  }
  Tabulation t;
  t.value = mono * coefficients_;
  t.dx = mx * coefficients_;
  t.dy = my * coefficients_;
  t.dxx = mxx * coefficients_;
  t.dxy = mxy * coefficients_;
  t.dyy = myy * coefficients_;
  return t;
}

Point2 AffineMap::to_physical(Point2 xi) const {
  return {origin.x + jacobian(0, 0) * xi.x + jacobian(0, 1) * xi.y,
          origin.y + jacobian(1, 0) * xi.x + jacobian(1, 1) * xi.y};
}

Point2 AffineMap::to_reference(Point2 x) const {
  const Point2 d = x - origin;
  return {inverse(0, 0) * d.x + inverse(0, 1) * d.y, inverse(1, 0) * d.x + inverse(1, 1) * d.y};
}

AffineMap affine_map(const Mesh& mesh, Index cell) {
  const auto [a, b, c] = mesh.cell_coordinates(cell);
  AffineMap m;
  m.origin = a;
  m.jacobian << b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y;
  m.det = m.jacobian.determinant();
  m.inverse = m.jacobian.inverse();
  return m;
}

namespace {

CellValues push_forward(const Tabulation& tab, const AffineMap& map) {
  // grad = J^{-T} grad_ref, hess = J^{-T} H_ref J^{-1}.
  const Eigen::Matrix2d& k = map.inverse;  // k(r, i) = d xi_r / d x_i
  CellValues v;
  v.value = tab.value;
  v.gx = k(0, 0) * tab.dx + k(1, 0) * tab.dy;
  v.gy = k(0, 1) * tab.dx + k(1, 1) * tab.dy;
  auto hess = [&](int i, int j) {
    return DenseMatrix(k(0, i) * k(0, j) * tab.dxx + (k(0, i) * k(1, j) + k(1, i) * k(0, j)) * tab.dxy +
                       k(1, i) * k(1, j) * tab.dyy);
  };
  v.hxx = hess(0, 0);
  v.hxy = hess(0, 1);
  v.hyy = hess(1, 1);
  return v;
}

}  // namespace

CellValues cell_values(const Tabulation& tab, const AffineMap& map, const QuadratureRule& quad) {
  CellValues v = push_forward(tab, map);
  v.jxw.resize(quad.size());
  v.points.resize(quad.size());
  const double det = std::abs(map.det);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    v.jxw[q] = quad.weights[q] * det;
    v.points[q] = map.to_physical(quad.points[q]);
  }
  return v;
}

CellValues point_values(const ReferenceElement& element, const AffineMap& map, std::span<const Point2> ref_points) {
  CellValues v = push_forward(element.tabulate(ref_points), map);
  v.points.reserve(ref_points.size());
  for (const Point2& xi : ref_points) v.points.push_back(map.to_physical(xi));
  return v;
}

FacetQuadrature facet_quadrature(const Mesh& mesh, Index facet, const LineRule& rule) {
  const Facet& f = mesh.facet(facet);
  const Point2 a = mesh.vertex(f.vertices[0]);
  const Point2 b = mesh.vertex(f.vertices[1]);
  const double len = norm(b - a);
  FacetQuadrature fq;
  fq.points.reserve(rule.points.size());
  fq.weights.reserve(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    fq.points.push_back(a + rule.points[q] * (b - a));
    fq.weights.push_back(rule.weights[q] * len);
  }
  return fq;
}

CellValues values_at_physical(const ReferenceElement& element, const Mesh& mesh, Index cell,
                              std::span<const Point2> physical_points) {
  const AffineMap map = affine_map(mesh, cell);
  std::vector<Point2> ref;
  ref.reserve(physical_points.size());
  for (const Point2& x : physical_points) ref.push_back(map.to_reference(x));
  return point_values(element, map, ref);
}

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree, Continuity continuity, ValueShape shape)
    : mesh_(std::move(mesh)), element_(degree), continuity_(continuity), shape_(shape) {
  if (!mesh_) throw ConfigError("FunctionSpace: null mesh");
  const Mesh& m = *mesh_;
  const int p = degree;
  const int nb = element_.num_basis();
  const int n_interior = (p - 1) * (p - 2) / 2;
  dof_map_.resize(static_cast<std::size_t>(m.num_cells()) * static_cast<std::size_t>(nb));

  if (continuity_ == Continuity::DG) {
    num_scalar_dofs_ = m.num_cells() * nb;
    for (std::size_t k = 0; k < dof_map_.size(); ++k) dof_map_[k] = static_cast<Index>(k);
  } else {
    const Index nv = m.num_vertices();
    const Index edge_offset = nv;
    const Index interior_offset = nv + m.num_facets() * (p - 1);
    num_scalar_dofs_ = interior_offset + m.num_cells() * n_interior;
    for (Index c = 0; c < m.num_cells(); ++c) {
      const auto& t = m.cell(c);
      int interior_counter = 0;
      for (int i = 0; i < nb; ++i) {
        const auto& info = element_.node_info(i);
        Index dof = -1;
        switch (info.kind) {
          case ReferenceElement::NodeKind::Vertex:
            dof = t[static_cast<std::size_t>(info.entity)];
            break;
          case ReferenceElement::NodeKind::Edge: {
            const Index f = m.cell_facets(c)[static_cast<std::size_t>(info.entity)];
            const Index first = t[static_cast<std::size_t>(local_edge_vertices(info.entity)[0])];
            const int pos = first == m.facet(f).vertices[0] ? info.lattice_step : p - info.lattice_step;
            dof = edge_offset + f * (p - 1) + (pos - 1);
            break;
          }
          case ReferenceElement::NodeKind::Interior:
            dof = interior_offset + c * n_interior + interior_counter++;
            break;
        }
        dof_map_[static_cast<std::size_t>(c) * static_cast<std::size_t>(nb) + static_cast<std::size_t>(i)] = dof;
      }
    }
  }

  dof_coordinates_.resize(static_cast<std::size_t>(num_scalar_dofs_));
  for (Index c = 0; c < m.num_cells(); ++c) {
    const AffineMap map = affine_map(m, c);
    const auto dofs = cell_dofs(c);
    for (int i = 0; i < nb; ++i) {
      dof_coordinates_[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])] =
          map.to_physical(element_.nodes()[static_cast<std::size_t>(i)]);
    }
  }
}

SpacePtr build_space(std::shared_ptr<const Mesh> mesh, int degree, Continuity continuity, ValueShape shape) {
  return std::make_shared<const FunctionSpace>(std::move(mesh), degree, continuity, shape);
}

std::vector<Index> boundary_dofs(const FunctionSpace& space) {
  if (space.continuity() != Continuity::CG || space.value_shape() != ValueShape::Scalar) {
    throw ConfigError("boundary_dofs: requires a continuous scalar space");
  }
  const Mesh& m = space.mesh();
  const auto& el = space.element();
  std::vector<char> flag(static_cast<std::size_t>(space.num_scalar_dofs()), 0);
  for (Index f = 0; f < m.num_facets(); ++f) {
    const Facet& fc = m.facet(f);
    if (!fc.on_boundary()) continue;
    const Index c = fc.cells[0];
    const int e = fc.local[0];
    const auto [a, b] = local_edge_vertices(e);
    const auto dofs = space.cell_dofs(c);
    for (int i = 0; i < el.num_basis(); ++i) {
      const auto& info = el.node_info(i);
      const bool on_edge = (info.kind == ReferenceElement::NodeKind::Edge && info.entity == e) ||
                           (info.kind == ReferenceElement::NodeKind::Vertex && (info.entity == a || info.entity == b));
      if (on_edge) flag[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])] = 1;
    }
  }
  std::vector<Index> out;
  for (Index k = 0; k < space.num_scalar_dofs(); ++k) {
    if (flag[static_cast<std::size_t>(k)]) out.push_back(k);
  }
  return out;
}

FEFunction::FEFunction(SpacePtr s, Vector c) : space(std::move(s)), coefficients(std::move(c)) {
  if (coefficients.size() != space->num_dofs()) throw ConfigError("FEFunction: coefficient length mismatch");
}

FEFunction interpolate(SpacePtr space, const ScalarField& f) {
  if (space->value_shape() != ValueShape::Scalar) throw ConfigError("interpolate: scalar spaces only");
  FEFunction fn(space);
  const auto nodes = space->dof_coordinates();
  for (Index k = 0; k < space->num_scalar_dofs(); ++k) fn.coefficients[k] = f(nodes[static_cast<std::size_t>(k)]);
  return fn;
}

namespace {

PointwiseValues gather(const FEFunction& fn, Index cell, const CellValues& v, int component) {
  const auto dofs = fn.space->cell_dofs(cell);
  const Index offset = static_cast<Index>(component) * fn.space->num_scalar_dofs();
  Vector local(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) local[static_cast<Eigen::Index>(i)] = fn.coefficients[offset + dofs[i]];
  const Vector val = v.value * local, gx = v.gx * local, gy = v.gy * local;
  const Vector hxx = v.hxx * local, hxy = v.hxy * local, hyy = v.hyy * local;
  PointwiseValues out;
  out.points = v.points;
  const auto nq = static_cast<std::size_t>(val.size());
  out.values.resize(nq);
  out.gradients.resize(nq);
  out.hessians.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    out.values[q] = val[qi];
    out.gradients[q] = {gx[qi], gy[qi]};
    out.hessians[q] = {hxx[qi], hxy[qi], hyy[qi]};
  }
  return out;
}

}  // namespace

PointwiseValues evaluate(const FEFunction& fn, Index cell, const QuadratureRule& quad, int component) {
  const Tabulation tab = fn.space->element().tabulate(quad.points);
  return gather(fn, cell, cell_values(tab, affine_map(fn.space->mesh(), cell), quad), component);
}

PointwiseValues evaluate_at(const FEFunction& fn, Index cell, std::span<const Point2> physical_points,
                            int component) {
  const AffineMap map = affine_map(fn.space->mesh(), cell);
  std::vector<Point2> ref;
  ref.reserve(physical_points.size());
  for (const Point2& x : physical_points) ref.push_back(map.to_reference(x));
  return gather(fn, cell, point_values(fn.space->element(), map, ref), component);
}

}  // namespace nondivfem
