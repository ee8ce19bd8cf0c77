#pragma once

#include "nondivfem/types.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace nondivfem {

inline constexpr Index kNoCell = -1;

/// Edge of the triangulation. `cells[0]` always exists; `cells[1]` is kNoCell
/// on the boundary. `local[k]` is the local edge index of this facet in
/// `cells[k]` (local edge e is opposite local vertex e).
struct Facet {
  std::array<Index, 2> vertices{};
  std::array<Index, 2> cells{kNoCell, kNoCell};
  std::array<int, 2> local{-1, -1};

  bool on_boundary() const { return cells[1] == kNoCell; }
};

/// Normal, length and side labels of a facet.
///
/// n_F is the outward normal of `cells[0]`. On interior facets `cells[0]` is
/// the minus side and `cells[1]` the plus side, so n_F points towards the plus
/// cell. On boundary facets the only cell is reported as plus and n_F is the
/// outward normal of the domain.
struct FacetGeometry {
  Point2 normal;
  double length{0.0};
  Index plus_cell{kNoCell};
  std::optional<Index> minus_cell;

  /// Same facet with the side labels exchanged (interior facets only).
  FacetGeometry flipped() const;
};

struct MeshQuality {
  double h_max{0.0};
  double h_min{0.0};
  double max_aspect_ratio{0.0};
  double neighbor_size_variation{0.0};
};

/// Conforming, positively oriented triangulation of a 2D domain.
///
/// Cells are stored so that the newest-vertex refinement edge is the edge
/// opposite local vertex 0, i.e. (v1, v2). Instances are immutable.
class Mesh {
 public:
  Mesh(std::vector<Point2> vertices, std::vector<std::array<Index, 3>> cells);

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }
  Index num_facets() const { return static_cast<Index>(facets_.size()); }
  Index num_boundary_facets() const { return num_boundary_facets_; }
  Index num_interior_facets() const { return num_facets() - num_boundary_facets_; }

  std::span<const Point2> vertices() const { return vertices_; }
  std::span<const std::array<Index, 3>> cells() const { return cells_; }
  std::span<const Facet> facets() const { return facets_; }

  const Point2& vertex(Index v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::array<Index, 3>& cell(Index c) const { return cells_[static_cast<std::size_t>(c)]; }
  const Facet& facet(Index f) const { return facets_[static_cast<std::size_t>(f)]; }
  /// Facet ids of the three local edges of a cell.
  const std::array<Index, 3>& cell_facets(Index c) const { return cell_facets_[static_cast<std::size_t>(c)]; }
  bool is_boundary_facet(Index f) const { return facet(f).on_boundary(); }
  bool is_boundary_vertex(Index v) const { return boundary_vertex_[static_cast<std::size_t>(v)]; }

  /// Local edge index of the refinement edge; always 0 by storage convention.
  int refinement_edge(Index /*c*/) const { return 0; }

  std::array<Point2, 3> cell_coordinates(Index c) const;
  double cell_area(Index c) const;
  double cell_diameter(Index c) const;
  double cell_inscribed_diameter(Index c) const;
  Point2 cell_centroid(Index c) const;
  double total_area() const;

  /// Neighbouring cell across local edge e, or kNoCell.
  Index neighbor(Index c, int e) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<std::array<Index, 3>> cells_;
  std::vector<Facet> facets_;
  std::vector<std::array<Index, 3>> cell_facets_;
  std::vector<bool> boundary_vertex_;
  Index num_boundary_facets_{0};
};

/// Local vertex pair (a, b) of local edge e; edge e is opposite vertex e.
constexpr std::array<int, 2> local_edge_vertices(int e) {
  constexpr std::array<std::array<int, 2>, 3> table{{{1, 2}, {2, 0}, {0, 1}}};
  return table[static_cast<std::size_t>(e)];
}

/// Structured triangulation of [x0,x1]x[y0,y1]; every grid square is split along
/// its bottom-left to top-right diagonal.
Mesh build_rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny);

FacetGeometry facet_geometry(const Mesh& mesh, Index facet_id);

/// Newest-vertex bisection with conforming closure. Every marked cell is
/// bisected at least once.
Mesh bisect(const Mesh& mesh, std::span<const Index> marked);

/// Bisects every cell `rounds` times.
Mesh bisect_uniform(const Mesh& mesh, int rounds);

MeshQuality mesh_quality(const Mesh& mesh);

/// True if no vertex lies in the relative interior of any edge and facet
/// adjacency is consistent.
bool is_conforming(const Mesh& mesh);

/// Plain-text dump: `vertices N cells M`, N lines `x y`, M lines `i j k`.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

}  // namespace nondivfem
