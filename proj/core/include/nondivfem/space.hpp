#pragma once

#include "nondivfem/mesh.hpp"
#include "nondivfem/quadrature.hpp"
#include "nondivfem/types.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nondivfem {

/// Basis values and reference derivatives at a set of points; every matrix is
/// (num points) x (num basis functions).
struct Tabulation {
  DenseMatrix value;
  DenseMatrix dx, dy;
  DenseMatrix dxx, dxy, dyy;
};

/// Equispaced Lagrange element of degree p on the reference triangle.
class ReferenceElement {
 public:
  enum class NodeKind { Vertex, Edge, Interior };
  struct NodeInfo {
    NodeKind kind;
    int entity;  // local vertex or local edge index, unused for interior nodes
    int lattice_step;  // for edge nodes: steps from the first edge vertex, 1..p-1
  };

  explicit ReferenceElement(int degree);

  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(nodes_.size()); }
  std::span<const Point2> nodes() const { return nodes_; }
  const NodeInfo& node_info(int i) const { return info_[static_cast<std::size_t>(i)]; }

  Tabulation tabulate(std::span<const Point2> points) const;

 private:
  int degree_;
  std::vector<Point2> nodes_;
  std::vector<NodeInfo> info_;
  std::vector<std::array<int, 2>> exponents_;
  DenseMatrix coefficients_;  // basis_i = sum_m coefficients_(m, i) * monomial_m
};

/// Affine map x = origin + J * xi of a cell.
struct AffineMap {
  Point2 origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse;
  double det{0.0};

  Point2 to_physical(Point2 xi) const;
  Point2 to_reference(Point2 x) const;
};

AffineMap affine_map(const Mesh& mesh, Index cell);

/// Physical basis data on one cell at quadrature points.
struct CellValues {
  DenseMatrix value, gx, gy, hxx, hxy, hyy;
  std::vector<double> jxw;
  std::vector<Point2> points;
};

CellValues cell_values(const Tabulation& tab, const AffineMap& map, const QuadratureRule& quad);

/// Physical basis data at arbitrary reference points (no weights).
CellValues point_values(const ReferenceElement& element, const AffineMap& map, std::span<const Point2> ref_points);

enum class Continuity { CG, DG };
enum class ValueShape { Scalar, Matrix };

/// Lagrange space on a mesh. Matrix-valued spaces repeat the scalar dof
/// numbering once per component (11, 12, 21, 22) with offset k * num_scalar_dofs.
class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree, Continuity continuity, ValueShape shape);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return element_.degree(); }
  Continuity continuity() const { return continuity_; }
  ValueShape value_shape() const { return shape_; }
  int num_components() const { return shape_ == ValueShape::Scalar ? 1 : 4; }
  Index num_scalar_dofs() const { return num_scalar_dofs_; }
  Index num_dofs() const { return num_scalar_dofs_ * num_components(); }
  int dofs_per_cell() const { return element_.num_basis(); }
  const ReferenceElement& element() const { return element_; }

  std::span<const Index> cell_dofs(Index cell) const {
    return {dof_map_.data() + static_cast<std::size_t>(cell) * static_cast<std::size_t>(dofs_per_cell()),
            static_cast<std::size_t>(dofs_per_cell())};
  }
  /// Lagrange node of every scalar dof.
  std::span<const Point2> dof_coordinates() const { return dof_coordinates_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  ReferenceElement element_;
  Continuity continuity_;
  ValueShape shape_;
  Index num_scalar_dofs_{0};
  std::vector<Index> dof_map_;
  std::vector<Point2> dof_coordinates_;
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

SpacePtr build_space(std::shared_ptr<const Mesh> mesh, int degree, Continuity continuity,
                     ValueShape shape = ValueShape::Scalar);

/// Sorted dofs whose Lagrange nodes lie on the boundary (CG scalar spaces).
std::vector<Index> boundary_dofs(const FunctionSpace& space);

struct FEFunction {
  SpacePtr space;
  Vector coefficients;

  FEFunction() = default;
  explicit FEFunction(SpacePtr s) : space(std::move(s)), coefficients(Vector::Zero(space->num_dofs())) {}
  FEFunction(SpacePtr s, Vector c);
};

using ScalarField = std::function<double(Point2)>;

FEFunction interpolate(SpacePtr space, const ScalarField& f);

struct PointwiseValues {
  std::vector<Point2> points;
  std::vector<double> values;
  std::vector<Point2> gradients;
  std::vector<SymMatrix2> hessians;
};

/// Values and physical derivatives of one component of `fn` at the
/// quadrature points of `cell`.
PointwiseValues evaluate(const FEFunction& fn, Index cell, const QuadratureRule& quad, int component = 0);

/// Same at arbitrary physical points inside (or on the boundary of) `cell`.
PointwiseValues evaluate_at(const FEFunction& fn, Index cell, std::span<const Point2> physical_points,
                            int component = 0);

/// Gauss points on a facet in physical coordinates; weights include the
/// facet length.
struct FacetQuadrature {
  std::vector<Point2> points;
  std::vector<double> weights;
};

FacetQuadrature facet_quadrature(const Mesh& mesh, Index facet, const LineRule& rule);

/// Physical basis data of `cell` at physical points (typically facet points).
CellValues values_at_physical(const ReferenceElement& element, const Mesh& mesh, Index cell,
                              std::span<const Point2> physical_points);

/// Default quadrature degree for smooth integrands in a degree-p space.
inline int default_quadrature_degree(int p) { return 2 * p + 2; }

/// Quadrature degree used when coefficients are discontinuous inside cells.
inline constexpr int kHighOrderQuadratureDegree = 20;

}  // namespace nondivfem
