#include "nondivfem/mesh.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>

namespace nondivfem {
namespace {

std::uint64_t edge_key(Index a, Index b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32U) | lo;
}

double signed_area(Point2 a, Point2 b, Point2 c) { return 0.5 * cross(b - a, c - a); }

// Rotates the vertex triple so that its longest edge is opposite vertex 0.
// Rotation keeps the orientation. Ties go to the lowest local edge index.
std::array<Index, 3> rotate_longest_edge_first(const std::vector<Point2>& v, std::array<Index, 3> t) {
  int best = 0;
  double best_len = -1.0;
  for (int e = 0; e < 3; ++e) {
    const auto [a, b] = local_edge_vertices(e);
    const double len = norm(v[static_cast<std::size_t>(t[a])] - v[static_cast<std::size_t>(t[b])]);
    if (len > best_len * (1.0 + 1e-12)) {
      best = e;
      best_len = len;
    }
  }
  return {t[static_cast<std::size_t>(best)], t[static_cast<std::size_t>((best + 1) % 3)],
          t[static_cast<std::size_t>((best + 2) % 3)]};
}

}  // namespace

FacetGeometry FacetGeometry::flipped() const {
  if (!minus_cell) throw ConfigError("FacetGeometry::flipped: boundary facet has a single side");
  FacetGeometry g = *this;
  g.normal = -1.0 * normal;
  g.plus_cell = *minus_cell;
  g.minus_cell = plus_cell;
  return g;
}

Mesh::Mesh(std::vector<Point2> vertices, std::vector<std::array<Index, 3>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const auto nv = static_cast<Index>(vertices_.size());
  cell_facets_.resize(cells_.size());
  std::unordered_map<std::uint64_t, Index> lookup;
  lookup.reserve(cells_.size() * 2);

  for (Index c = 0; c < num_cells(); ++c) {
    const auto& t = cells_[static_cast<std::size_t>(c)];
    for (Index v : t) {
      if (v < 0 || v >= nv) throw ConfigError("Mesh: cell references vertex out of range");
    }
    const auto [p0, p1, p2] = cell_coordinates(c);
    if (!(signed_area(p0, p1, p2) > 0.0)) {
      throw ConfigError("Mesh: cell " + std::to_string(c) + " is degenerate or negatively oriented");
    }
    for (int e = 0; e < 3; ++e) {
      const auto [a, b] = local_edge_vertices(e);
      const Index va = t[static_cast<std::size_t>(a)];
      const Index vb = t[static_cast<std::size_t>(b)];
      const auto key = edge_key(va, vb);
      auto [it, inserted] = lookup.try_emplace(key, static_cast<Index>(facets_.size()));
      if (inserted) {
        Facet f;
        f.vertices = {va, vb};
        f.cells[0] = c;
        f.local[0] = e;
        facets_.push_back(f);
      } else {
        Facet& f = facets_[static_cast<std::size_t>(it->second)];
        if (f.cells[1] != kNoCell) throw ConfigError("Mesh: edge shared by more than two cells");
        f.cells[1] = c;
        f.local[1] = e;
      }
      cell_facets_[static_cast<std::size_t>(c)][static_cast<std::size_t>(e)] = it->second;
    }
  }

  boundary_vertex_.assign(vertices_.size(), false);
  for (const Facet& f : facets_) {
    if (f.on_boundary()) {
      ++num_boundary_facets_;
      boundary_vertex_[static_cast<std::size_t>(f.vertices[0])] = true;
      boundary_vertex_[static_cast<std::size_t>(f.vertices[1])] = true;
    }
  }
}

std::array<Point2, 3> Mesh::cell_coordinates(Index c) const {
  const auto& t = cell(c);
  return {vertex(t[0]), vertex(t[1]), vertex(t[2])};
}

double Mesh::cell_area(Index c) const {
  const auto [a, b, p] = cell_coordinates(c);
  return signed_area(a, b, p);
}

double Mesh::cell_diameter(Index c) const {
  const auto [a, b, p] = cell_coordinates(c);
  return std::max({norm(b - a), norm(p - b), norm(a - p)});
}

double Mesh::cell_inscribed_diameter(Index c) const {
  const auto [a, b, p] = cell_coordinates(c);
  const double s = 0.5 * (norm(b - a) + norm(p - b) + norm(a - p));
  return 2.0 * cell_area(c) / s;
}

Point2 Mesh::cell_centroid(Index c) const {
  const auto [a, b, p] = cell_coordinates(c);
  return (1.0 / 3.0) * (a + b + p);
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (Index c = 0; c < num_cells(); ++c) sum += cell_area(c);
  return sum;
}

Index Mesh::neighbor(Index c, int e) const {
  const Facet& f = facet(cell_facets(c)[static_cast<std::size_t>(e)]);
  return f.cells[0] == c ? f.cells[1] : f.cells[0];
}

Mesh build_rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("build_rect_mesh: empty rectangle");
  if (nx < 1 || ny < 1) throw ConfigError("build_rect_mesh: subdivision counts must be >= 1");

  std::vector<Point2> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    // Endpoints are set exactly so that boundary nodes lie on the boundary.
    const double y = j == ny ? y1 : y0 + (y1 - y0) * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? x1 : x0 + (x1 - x0) * i / nx;
      vertices.push_back({x, y});
    }
  }
  auto id = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };

  std::vector<std::array<Index, 3>> cells;
  cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Index bl = id(i, j), br = id(i + 1, j), tl = id(i, j + 1), tr = id(i + 1, j + 1);
      cells.push_back(rotate_longest_edge_first(vertices, {bl, br, tr}));
      cells.push_back(rotate_longest_edge_first(vertices, {bl, tr, tl}));
    }
  }
  return Mesh(std::move(vertices), std::move(cells));
}

FacetGeometry facet_geometry(const Mesh& mesh, Index facet_id) {
  if (facet_id < 0 || facet_id >= mesh.num_facets()) throw ConfigError("facet_geometry: facet id out of range");
  const Facet& f = mesh.facet(facet_id);
  const Point2 a = mesh.vertex(f.vertices[0]);
  const Point2 b = mesh.vertex(f.vertices[1]);
  const Point2 t = b - a;
  FacetGeometry g;
  g.length = norm(t);
  Point2 n{t.y / g.length, -t.x / g.length};
  // Orient outward from cells[0]: compare with the opposite vertex.
  const Point2 opposite = mesh.vertex(mesh.cell(f.cells[0])[static_cast<std::size_t>(f.local[0])]);
  if (dot(n, opposite - a) > 0.0) n = -1.0 * n;
  g.normal = n;
  if (f.on_boundary()) {
    g.plus_cell = f.cells[0];
  } else {
    g.minus_cell = f.cells[0];
    g.plus_cell = f.cells[1];
  }
  return g;
}

Mesh bisect(const Mesh& mesh, std::span<const Index> marked) {
  const Index nc = mesh.num_cells();
  // Marking is done on edges: a cell is split while one of its edges is marked,
  // and closure requires the refinement edge of every such cell to be marked too.
  std::vector<char> edge_marked(static_cast<std::size_t>(mesh.num_facets()), 0);
  std::vector<Index> stack;
  auto mark_refinement_edge = [&](Index c) {
    const Index f = mesh.cell_facets(c)[0];
    if (!edge_marked[static_cast<std::size_t>(f)]) {
      edge_marked[static_cast<std::size_t>(f)] = 1;
      stack.push_back(f);
    }
  };
  for (Index c : marked) {
    if (c < 0 || c >= nc) throw ConfigError("bisect: marked cell id out of range");
    mark_refinement_edge(c);
  }
  while (!stack.empty()) {
    const Index f = stack.back();
    stack.pop_back();
    for (Index c : mesh.facet(f).cells) {
      if (c != kNoCell) mark_refinement_edge(c);
    }
  }

  std::vector<Point2> vertices(mesh.vertices().begin(), mesh.vertices().end());
  std::vector<Index> midpoint(static_cast<std::size_t>(mesh.num_facets()), -1);
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (!edge_marked[static_cast<std::size_t>(f)]) continue;
    const Facet& fc = mesh.facet(f);
    midpoint[static_cast<std::size_t>(f)] = static_cast<Index>(vertices.size());
    vertices.push_back(0.5 * (mesh.vertex(fc.vertices[0]) + mesh.vertex(fc.vertices[1])));
  }

  std::map<std::uint64_t, Index> mid_by_vertices;
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (midpoint[static_cast<std::size_t>(f)] >= 0) {
      const Facet& fc = mesh.facet(f);
      mid_by_vertices.emplace(edge_key(fc.vertices[0], fc.vertices[1]), midpoint[static_cast<std::size_t>(f)]);
    }
  }
  auto find_mid = [&](Index a, Index b) -> Index {
    auto it = mid_by_vertices.find(edge_key(a, b));
    return it == mid_by_vertices.end() ? -1 : it->second;
  };

  std::vector<std::array<Index, 3>> cells;
  cells.reserve(static_cast<std::size_t>(nc) * 2);
  // Splitting (v0, v1, v2) at m = mid(v1, v2) yields (m, v0, v1) and (m, v2, v0);
  // the children's refinement edges are the parent's two other edges.
  auto split = [&](auto&& self, const std::array<Index, 3>& t) -> void {
    const Index m = find_mid(t[1], t[2]);
    if (m < 0) {
      cells.push_back(t);
      return;
    }
    self(self, std::array<Index, 3>{m, t[0], t[1]});
    self(self, std::array<Index, 3>{m, t[2], t[0]});
  };
  for (Index c = 0; c < nc; ++c) split(split, mesh.cell(c));
  return Mesh(std::move(vertices), std::move(cells));
}

Mesh bisect_uniform(const Mesh& mesh, int rounds) {
  Mesh out = mesh;
  for (int r = 0; r < rounds; ++r) {
    std::vector<Index> all(static_cast<std::size_t>(out.num_cells()));
    for (Index c = 0; c < out.num_cells(); ++c) all[static_cast<std::size_t>(c)] = c;
    out = bisect(out, all);
  }
  return out;
}

MeshQuality mesh_quality(const Mesh& mesh) {
  MeshQuality q;
  q.h_min = std::numeric_limits<double>::infinity();
  std::vector<double> h(static_cast<std::size_t>(mesh.num_cells()));
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const double hc = mesh.cell_diameter(c);
    h[static_cast<std::size_t>(c)] = hc;
    q.h_max = std::max(q.h_max, hc);
    q.h_min = std::min(q.h_min, hc);
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, hc / mesh.cell_inscribed_diameter(c));
  }
  // Cells touching at a vertex.
  std::vector<double> hmin_at(static_cast<std::size_t>(mesh.num_vertices()), std::numeric_limits<double>::infinity());
  std::vector<double> hmax_at(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    for (Index v : mesh.cell(c)) {
      hmin_at[static_cast<std::size_t>(v)] = std::min(hmin_at[static_cast<std::size_t>(v)], h[static_cast<std::size_t>(c)]);
      hmax_at[static_cast<std::size_t>(v)] = std::max(hmax_at[static_cast<std::size_t>(v)], h[static_cast<std::size_t>(c)]);
    }
  }
  q.neighbor_size_variation = 1.0;
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    if (hmax_at[static_cast<std::size_t>(v)] > 0.0) {
      q.neighbor_size_variation =
          std::max(q.neighbor_size_variation, hmax_at[static_cast<std::size_t>(v)] / hmin_at[static_cast<std::size_t>(v)]);
    }
  }
  return q;
}

bool is_conforming(const Mesh& mesh) {
  if (mesh.num_vertices() == 0) return true;
  double xmin = mesh.vertex(0).x, xmax = xmin, ymin = mesh.vertex(0).y, ymax = ymin;
  for (const Point2& p : mesh.vertices()) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double tol = 1e-12 * std::max(xmax - xmin, ymax - ymin);
  auto on_box = [&](Point2 p) {
    return std::abs(p.x - xmin) <= tol || std::abs(p.x - xmax) <= tol || std::abs(p.y - ymin) <= tol ||
           std::abs(p.y - ymax) <= tol;
  };
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    const Facet& fc = mesh.facet(f);
    for (int k = 0; k < 2; ++k) {
      const Index c = fc.cells[static_cast<std::size_t>(k)];
      if (c == kNoCell) continue;
      if (mesh.cell_facets(c)[static_cast<std::size_t>(fc.local[static_cast<std::size_t>(k)])] != f) return false;
    }
    if (fc.on_boundary()) {
      // A single-sided facet inside the box signals a hanging vertex.
      const Point2 a = mesh.vertex(fc.vertices[0]);
      const Point2 b = mesh.vertex(fc.vertices[1]);
      const Point2 m = 0.5 * (a + b);
      if (!on_box(a) || !on_box(b) || !on_box(m)) return false;
    }
  }
  return 3 * mesh.num_cells() == 2 * mesh.num_interior_facets() + mesh.num_boundary_facets();
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "vertices " << mesh.num_vertices() << " cells " << mesh.num_cells() << '\n';
  out.precision(17);
  for (const Point2& p : mesh.vertices()) out << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.cells()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh read_mesh(std::istream& in) {
  std::string w1, w2;
  long nv = 0, nc = 0;
  if (!(in >> w1 >> nv >> w2 >> nc) || w1 != "vertices" || w2 != "cells" || nv < 0 || nc < 0) {
    throw ConfigError("read_mesh: malformed header");
  }
  std::vector<Point2> vertices(static_cast<std::size_t>(nv));
  for (auto& p : vertices) {
    if (!(in >> p.x >> p.y)) throw ConfigError("read_mesh: truncated vertex list");
  }
  std::vector<std::array<Index, 3>> cells(static_cast<std::size_t>(nc));
  for (auto& t : cells) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw ConfigError("read_mesh: truncated cell list");
  }
  return Mesh(std::move(vertices), std::move(cells));
}

}  // namespace nondivfem
