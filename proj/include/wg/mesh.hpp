#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "wg/geometry.hpp"

namespace wg {

enum class CellKind { triangle, quad };

struct Edge {
  int v0 = -1;  // canonical: v0 < v1
  int v1 = -1;
  int cell_a = -1;
  int cell_b = -1;
  bool boundary = false;
};

/// Polytopal mesh. Immutable after construction; cells are counterclockwise
/// simple polygons, edges are inferred and canonically oriented from the
/// lower vertex index to the higher.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> cell_edges;  // aligned with cell segments (v_i -> v_{i+1})
  std::vector<double> cell_area;
  std::vector<double> cell_diameter;  // h_T
  std::vector<Vec2> cell_centroid;
  double h = 0.0;

  static constexpr double kShapeRegularityGuard = 20.0;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }

  std::vector<Vec2> cell_polygon(int c) const {
    std::vector<Vec2> p;
    p.reserve(cells[c].size());
    for (int v : cells[c]) p.push_back(vertices[v]);
    return p;
  }

  double total_area() const {
    double s = 0.0;
    for (double a : cell_area) s += a;
    return s;
  }

  void build(double shape_regularity_guard = kShapeRegularityGuard) {
    int nc = n_cells();
    cell_area.assign(nc, 0.0);
    cell_diameter.assign(nc, 0.0);
    cell_centroid.assign(nc, Vec2{});
    cell_edges.assign(nc, {});
    edges.clear();

    std::map<std::pair<int, int>, int> edge_of;
    for (int c = 0; c < nc; ++c) {
      const auto& cell = cells[c];
      require(cell.size() >= 3, "mesh: cell with fewer than 3 vertices");
      for (std::size_t i = 0; i < cell.size(); ++i) {
        require(cell[i] >= 0 && cell[i] < n_vertices(), "mesh: vertex index out of range");
        for (std::size_t j = i + 1; j < cell.size(); ++j)
          require(cell[i] != cell[j], "mesh: degenerate cell (repeated vertex)");
      }
      auto poly = cell_polygon(c);
      double area = polygon_area(poly);
      double diam = polygon_diameter(poly);
      require(std::abs(area) > 1e-14 * diam * diam, "mesh: zero-area cell");
      require(area > 0.0, "mesh: cell not counterclockwise");
      cell_area[c] = area;
      cell_diameter[c] = diam;
      cell_centroid[c] = polygon_centroid(poly);
      require(cell_diameter[c] * cell_diameter[c] / area <= shape_regularity_guard,
              "mesh: shape-regularity guard violated");

      cell_edges[c].resize(cell.size());
      for (std::size_t i = 0; i < cell.size(); ++i) {
        int a = cell[i];
        int b = cell[(i + 1) % cell.size()];
        auto key = std::minmax(a, b);
        auto it = edge_of.find(key);
        int e;
        if (it == edge_of.end()) {
          e = static_cast<int>(edges.size());
          edge_of.emplace(key, e);
          edges.push_back(Edge{key.first, key.second, c, -1, true});
        } else {
          e = it->second;
          require(edges[e].cell_b == -1, "mesh: non-manifold edge (shared by 3+ cells)");
          edges[e].cell_b = c;
          edges[e].boundary = false;
        }
        cell_edges[c][i] = e;
      }
    }
    h = 0.0;
    for (double d : cell_diameter) h = std::max(h, d);
  }
};

inline Mesh generate_square_mesh(int n, CellKind kind) {
  require(n >= 1, "generate_square_mesh: n must be >= 1");
  Mesh m;
  auto vid = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (kind == CellKind::quad) {
        m.cells.push_back({a, b, c, d});
      } else {
        m.cells.push_back({a, b, c});
        m.cells.push_back({a, c, d});
      }
    }
  m.build();
  require(std::abs(m.total_area() - 1.0) <= 1e-12, "generate_square_mesh: area mismatch");
  return m;
}

/// L-shaped domain (-1,1)^2 minus the quadrant [0,1]x[-1,0]; the re-entrant
/// corner sits at the origin. n is the cell count per unit block side.
inline Mesh generate_lshape_mesh(int n, CellKind kind) {
  require(n >= 1, "generate_lshape_mesh: n must be >= 1");
  Mesh m;
  int nn = 2 * n;  // grid cells per side of the bounding box
  std::map<int, int> vid_of;
  auto grid_id = [&](int i, int j) { return j * (nn + 1) + i; };
  auto vid = [&](int i, int j) {
    int g = grid_id(i, j);
    auto it = vid_of.find(g);
    if (it != vid_of.end()) return it->second;
    int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back({-1.0 + 2.0 * i / nn, -1.0 + 2.0 * j / nn});
    vid_of.emplace(g, id);
    return id;
  };
  for (int j = 0; j < nn; ++j)
    for (int i = 0; i < nn; ++i) {
      double cx = -1.0 + (2.0 * i + 1.0) / nn;
      double cy = -1.0 + (2.0 * j + 1.0) / nn;
      if (cx > 0.0 && cy < 0.0) continue;  // the removed quadrant
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (kind == CellKind::quad) {
        m.cells.push_back({a, b, c, d});
      } else {
        m.cells.push_back({a, b, c});
        m.cells.push_back({a, c, d});
      }
    }
  m.build();
  require(std::abs(m.total_area() - 3.0) <= 1e-12, "generate_lshape_mesh: area mismatch");
  return m;
}

/// Triangles split into 4 by edge midpoints, quads into 4 by midpoints and
/// the vertex average. Parent vertices keep their indices.
inline Mesh uniform_refine(const Mesh& parent) {
  Mesh m;
  m.vertices = parent.vertices;
  std::map<std::pair<int, int>, int> midpoint_of;
  auto midpoint = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint_of.find(key);
    if (it != midpoint_of.end()) return it->second;
    int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back(0.5 * (parent.vertices[a] + parent.vertices[b]));
    midpoint_of.emplace(key, id);
    return id;
  };
  for (const auto& cell : parent.cells) {
    if (cell.size() == 3) {
      int a = cell[0], b = cell[1], c = cell[2];
      int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      m.cells.push_back({a, ab, ca});
      m.cells.push_back({ab, b, bc});
      m.cells.push_back({ca, bc, c});
      m.cells.push_back({ab, bc, ca});
    } else if (cell.size() == 4) {
      int a = cell[0], b = cell[1], c = cell[2], d = cell[3];
      int ab = midpoint(a, b), bc = midpoint(b, c), cd = midpoint(c, d), da = midpoint(d, a);
      int ctr = static_cast<int>(m.vertices.size());
      m.vertices.push_back(0.25 * (parent.vertices[a] + parent.vertices[b] +
                                   parent.vertices[c] + parent.vertices[d]));
      m.cells.push_back({a, ab, ctr, da});
      m.cells.push_back({ab, b, bc, ctr});
      m.cells.push_back({ctr, bc, c, cd});
      m.cells.push_back({da, ctr, cd, d});
    } else {
      throw std::runtime_error("uniform_refine: unsupported cell kind (polygon with " +
                               std::to_string(cell.size()) + " vertices)");
    }
  }
  m.build();
  return m;
}

inline void save_mesh(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "save_mesh: cannot open " + path);
  out << "wgmesh 1\n";
  out << m.n_vertices() << " " << m.n_cells() << "\n";
  out.precision(17);
  for (const auto& v : m.vertices) out << v.x << " " << v.y << "\n";
  for (const auto& c : m.cells) {
    out << c.size();
    for (int v : c) out << " " << v;
    out << "\n";
  }
  require(out.good(), "save_mesh: write failed for " + path);
}

inline Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_mesh: cannot open " + path);
  auto malformed = [&](int line, const std::string& what) {
    throw std::runtime_error("load_mesh: " + path + ":" + std::to_string(line) + ": " + what);
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "wgmesh" || version != 1)
    malformed(1, "expected header 'wgmesh 1'");
  int nv = 0, nc = 0;
  if (!(in >> nv >> nc) || nv < 3 || nc < 1) malformed(2, "expected '<nv> <nc>' with nv>=3, nc>=1");
  Mesh m;
  m.vertices.resize(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> m.vertices[i].x >> m.vertices[i].y))
      malformed(3 + i, "expected vertex line 'x y'");
  m.cells.resize(nc);
  for (int c = 0; c < nc; ++c) {
    int k = 0;
    if (!(in >> k) || k < 3) malformed(3 + nv + c, "expected cell line '<m> i1 ... im' with m>=3");
    m.cells[c].resize(k);
    for (int i = 0; i < k; ++i) {
      if (!(in >> m.cells[c][i])) malformed(3 + nv + c, "truncated cell line");
      if (m.cells[c][i] < 0 || m.cells[c][i] >= nv)
        malformed(3 + nv + c, "vertex index out of range");
    }
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (m.cells[c][i] == m.cells[c][j]) malformed(3 + nv + c, "degenerate cell");
  }
  m.build();
  return m;
}

}  // namespace wg
