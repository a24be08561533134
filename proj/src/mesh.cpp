#include "steklov/mesh.hpp"

#include "steklov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace steklov {

double norm(Point2 a) { return std::hypot(a.x, a.y); }

// ---------------------------------------------------------------------------
// DomainSpec
// ---------------------------------------------------------------------------

DomainSpec DomainSpec::unit_square() {
  return {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}, "square"};
}

DomainSpec DomainSpec::l_shape() {
  return {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {0.0, 1.0}},
          "lshape"};
}

double DomainSpec::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i)
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  return 0.5 * twice;
}

double DomainSpec::perimeter() const {
  double length = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i)
    length += norm(polygon[(i + 1) % polygon.size()] - polygon[i]);
  return length;
}

bool DomainSpec::contains(Point2 p) const {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// TriangleMesh
// ---------------------------------------------------------------------------

namespace {

double signed_area(Point2 a, Point2 b, Point2 c) { return 0.5 * cross(b - a, c - a); }

} // namespace

TriangleMesh::TriangleMesh(std::vector<Point2> vertices, std::vector<Triangle> triangles,
                           std::vector<int> generation,
                           std::vector<std::array<int, 2>> vertex_parents)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      generation_(std::move(generation)),
      vertex_parents_(std::move(vertex_parents)) {
  if (generation_.empty()) generation_.assign(triangles_.size(), 0);
  if (vertex_parents_.empty()) vertex_parents_.assign(vertices_.size(), {-1, -1});
  if (generation_.size() != triangles_.size() || vertex_parents_.size() != vertices_.size())
    throw StructuralError("mesh metadata does not match vertex/triangle counts");

  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || v >= nv)
        throw StructuralError("triangle " + std::to_string(t) + " references unknown vertex");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw GeometryError("triangle " + std::to_string(t) + " repeats a vertex");
    if (!(signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]) > 0.0))
      throw GeometryError("triangle " + std::to_string(t) + " has non-positive area");
  }
  build_edges();
  check_conforming();
}

void TriangleMesh::build_edges() {
  const std::size_t nv = vertices_.size();
  const std::size_t nt = triangles_.size();

  // Bucket half-edges by their smaller endpoint, then match within buckets.
  std::vector<int> bucket_start(nv + 1, 0);
  for (const auto& tri : triangles_)
    for (int i = 0; i < 3; ++i)
      ++bucket_start[std::min(tri[(i + 1) % 3], tri[(i + 2) % 3]) + 1];
  std::partial_sum(bucket_start.begin(), bucket_start.end(), bucket_start.begin());
  std::vector<int> bucket_fill(bucket_start.begin(), bucket_start.end() - 1);
  std::vector<std::pair<int, int>> bucket(3 * nt); // (other endpoint, edge id)

  edges_.clear();
  edges_.reserve(3 * nt / 2 + nv);
  triangle_edges_.assign(nt, {-1, -1, -1});
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      const int lo = std::min(a, b);
      const int hi = std::max(a, b);
      int found = -1;
      for (int s = bucket_start[lo]; s < bucket_fill[lo]; ++s) {
        if (bucket[s].first == hi) {
          found = bucket[s].second;
          break;
        }
      }
      if (found < 0) {
        found = static_cast<int>(edges_.size());
        edges_.push_back({{lo, hi}, {static_cast<int>(t), -1}});
        bucket[bucket_fill[lo]++] = {hi, found};
      } else {
        Edge& e = edges_[found];
        if (e.triangles[1] >= 0)
          throw StructuralError("edge (" + std::to_string(lo) + "," + std::to_string(hi) +
                                ") is shared by more than two triangles");
        // A consistently oriented neighbor traverses the edge the other way.
        const auto& other = triangles_[e.triangles[0]];
        const int j = triangle_edges_[e.triangles[0]][0] == found   ? 0
                      : triangle_edges_[e.triangles[0]][1] == found ? 1
                                                                    : 2;
        if (other[(j + 1) % 3] != b || other[(j + 2) % 3] != a)
          throw StructuralError("triangles " + std::to_string(e.triangles[0]) + " and " +
                                std::to_string(t) + " overlap across a shared edge");
        e.triangles[1] = static_cast<int>(t);
      }
      triangle_edges_[t][i] = found;
    }
  }
}

void TriangleMesh::check_conforming() const {
  // A hanging vertex shows up as a boundary vertex lying strictly inside
  // another boundary edge. Hash boundary vertices on a grid to find them.
  std::vector<int> bverts = boundary_vertices();
  if (bverts.empty()) return;
  double xmin = std::numeric_limits<double>::max(), ymin = xmin;
  double xmax = std::numeric_limits<double>::lowest(), ymax = xmax;
  double total_length = 0.0;
  std::size_t nb = 0;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (!edges_[e].boundary()) continue;
    total_length += edge_length(static_cast<int>(e));
    ++nb;
  }
  for (int v : bverts) {
    xmin = std::min(xmin, vertices_[v].x);
    xmax = std::max(xmax, vertices_[v].x);
    ymin = std::min(ymin, vertices_[v].y);
    ymax = std::max(ymax, vertices_[v].y);
  }
  const double cell = std::max(total_length / static_cast<double>(nb), 1e-300);
  const auto nx = static_cast<long long>((xmax - xmin) / cell) + 1;
  const auto ny = static_cast<long long>((ymax - ymin) / cell) + 1;
  auto cell_of = [&](double x, double y) {
    long long i = std::clamp(static_cast<long long>((x - xmin) / cell), 0LL, nx - 1);
    long long j = std::clamp(static_cast<long long>((y - ymin) / cell), 0LL, ny - 1);
    return std::pair{i, j};
  };
  std::unordered_map<long long, std::vector<int>> grid;
  grid.reserve(bverts.size());
  for (int v : bverts) {
    auto [i, j] = cell_of(vertices_[v].x, vertices_[v].y);
    grid[i * ny + j].push_back(v);
  }
  for (const Edge& e : edges_) {
    if (!e.boundary()) continue;
    const Point2 a = vertices_[e.vertices[0]];
    const Point2 b = vertices_[e.vertices[1]];
    const Point2 d = b - a;
    const double len2 = dot(d, d);
    auto [i0, j0] = cell_of(std::min(a.x, b.x), std::min(a.y, b.y));
    auto [i1, j1] = cell_of(std::max(a.x, b.x), std::max(a.y, b.y));
    for (long long i = i0; i <= i1; ++i) {
      for (long long j = j0; j <= j1; ++j) {
        auto it = grid.find(i * ny + j);
        if (it == grid.end()) continue;
        for (int v : it->second) {
          if (v == e.vertices[0] || v == e.vertices[1]) continue;
          const Point2 p = vertices_[v] - a;
          const double s = dot(p, d) / len2;
          if (s <= 0.0 || s >= 1.0) continue;
          if (std::abs(cross(d, p)) <= 1e-12 * len2)
            throw StructuralError("hanging vertex " + std::to_string(v) + " on boundary edge (" +
                                  std::to_string(e.vertices[0]) + "," +
                                  std::to_string(e.vertices[1]) + ")");
        }
      }
    }
  }
}

std::array<Point2, 3> TriangleMesh::corners(int t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double TriangleMesh::area(int t) const {
  const auto p = corners(t);
  return signed_area(p[0], p[1], p[2]);
}

double TriangleMesh::diameter(int t) const {
  const auto p = corners(t);
  return std::max({norm(p[1] - p[0]), norm(p[2] - p[1]), norm(p[0] - p[2])});
}

double TriangleMesh::edge_length(int e) const {
  const auto& ev = edges_[e].vertices;
  return norm(vertices_[ev[1]] - vertices_[ev[0]]);
}

double TriangleMesh::min_angle() const {
  double smallest = std::numbers::pi;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto p = corners(static_cast<int>(t));
    for (int i = 0; i < 3; ++i) {
      const Point2 u = p[(i + 1) % 3] - p[i];
      const Point2 v = p[(i + 2) % 3] - p[i];
      smallest = std::min(smallest, std::atan2(std::abs(cross(u, v)), dot(u, v)));
    }
  }
  return smallest;
}

double TriangleMesh::max_diameter() const {
  double h = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t)
    h = std::max(h, diameter(static_cast<int>(t)));
  return h;
}

std::vector<int> TriangleMesh::boundary_vertices() const {
  std::vector<char> on_boundary(vertices_.size(), 0);
  for (const Edge& e : edges_)
    if (e.boundary()) on_boundary[e.vertices[0]] = on_boundary[e.vertices[1]] = 1;
  std::vector<int> ids;
  for (std::size_t v = 0; v < on_boundary.size(); ++v)
    if (on_boundary[v]) ids.push_back(static_cast<int>(v));
  return ids;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

std::vector<double> subdivide(std::vector<double> breaks, double step) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> nodes{breaks.front()};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    const int parts = std::max(1, static_cast<int>(std::ceil(len / step - 1e-9)));
    for (int p = 1; p < parts; ++p) nodes.push_back(breaks[i] + len * p / parts);
    nodes.push_back(breaks[i + 1]);
  }
  return nodes;
}

} // namespace

TriangleMesh generate_uniform(const DomainSpec& domain, double target_diameter) {
  if (!(target_diameter > 0.0)) throw std::invalid_argument("target diameter must be positive");
  const auto& poly = domain.polygon;
  if (poly.size() < 4) throw UnsupportedDomainError("polygon needs at least four vertices");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    if (a.x != b.x && a.y != b.y)
      throw UnsupportedDomainError("domain '" + domain.name +
                                   "' is not rectilinear; supply a mesh file instead");
    xs.push_back(a.x);
    ys.push_back(a.y);
  }
  if (!(domain.area() > 0.0))
    throw UnsupportedDomainError("polygon must be counterclockwise with positive area");

  const double step = target_diameter / std::numbers::sqrt2;
  const std::vector<double> gx = subdivide(xs, step);
  const std::vector<double> gy = subdivide(ys, step);
  const std::size_t nx = gx.size() - 1;
  const std::size_t ny = gy.size() - 1;

  std::vector<char> cell_in(nx * ny, 0);
  std::vector<char> node_used((nx + 1) * (ny + 1), 0);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const Point2 c{0.5 * (gx[i] + gx[i + 1]), 0.5 * (gy[j] + gy[j + 1])};
      if (!domain.contains(c)) continue;
      cell_in[j * nx + i] = 1;
      node_used[j * (nx + 1) + i] = node_used[j * (nx + 1) + i + 1] = 1;
      node_used[(j + 1) * (nx + 1) + i] = node_used[(j + 1) * (nx + 1) + i + 1] = 1;
    }
  }
  std::vector<int> node_id(node_used.size(), -1);
  std::vector<Point2> vertices;
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      if (node_used[j * (nx + 1) + i]) {
        node_id[j * (nx + 1) + i] = static_cast<int>(vertices.size());
        vertices.push_back({gx[i], gy[j]});
      }
  std::vector<Triangle> triangles;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (!cell_in[j * nx + i]) continue;
      const int sw = node_id[j * (nx + 1) + i];
      const int se = node_id[j * (nx + 1) + i + 1];
      const int nw = node_id[(j + 1) * (nx + 1) + i];
      const int ne = node_id[(j + 1) * (nx + 1) + i + 1];
      // Right-angle corner first: the SW-NE diagonal is the refinement edge.
      triangles.push_back({se, ne, sw});
      triangles.push_back({nw, sw, ne});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

// ---------------------------------------------------------------------------
// Newest-vertex bisection
// ---------------------------------------------------------------------------

BisectResult bisect(const TriangleMesh& mesh, std::span<const int> marked) {
  if (marked.empty()) return {mesh, false};

  const auto& tris = mesh.triangles();
  const auto& t2e = mesh.triangle_edges();
  const auto& edges = mesh.edges();
  const int nt = static_cast<int>(tris.size());

  std::vector<char> edge_marked(edges.size(), 0);
  std::vector<int> queue;
  auto mark_edge = [&](int e) {
    if (!edge_marked[e]) {
      edge_marked[e] = 1;
      queue.push_back(e);
    }
  };
  for (int t : marked) {
    if (t < 0 || t >= nt) throw StructuralError("marked triangle id " + std::to_string(t) +
                                                " out of range");
    mark_edge(t2e[t][0]);
  }
  // Closure: any triangle with a marked edge must have its refinement edge marked.
  while (!queue.empty()) {
    const int e = queue.back();
    queue.pop_back();
    for (int t : edges[e].triangles)
      if (t >= 0) mark_edge(t2e[t][0]);
  }

  std::vector<Point2> vertices = mesh.vertices();
  std::vector<std::array<int, 2>> parents = mesh.vertex_parents();
  std::vector<int> midpoint(edges.size(), -1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!edge_marked[e]) continue;
    const auto [a, b] = edges[e].vertices;
    midpoint[e] = static_cast<int>(vertices.size());
    vertices.push_back(0.5 * (mesh.vertices()[a] + mesh.vertices()[b]));
    parents.push_back({a, b});
  }

  std::vector<Triangle> out;
  std::vector<int> gen;
  out.reserve(tris.size() * 2);
  gen.reserve(tris.size() * 2);
  // (a, b, c) with refinement edge bc and midpoint m -> (m, a, b), (m, c, a).
  for (int t = 0; t < nt; ++t) {
    const auto [p1, p2, p3] = tris[t];
    const int g = mesh.generation()[t];
    const int p4 = midpoint[t2e[t][0]];
    if (p4 < 0) {
      out.push_back(tris[t]);
      gen.push_back(g);
      continue;
    }
    const int q = midpoint[t2e[t][2]]; // on p1p2, the base of (p4, p1, p2)
    const int r = midpoint[t2e[t][1]]; // on p3p1, the base of (p4, p3, p1)
    if (q < 0) {
      out.push_back({p4, p1, p2});
      gen.push_back(g + 1);
    } else {
      out.push_back({q, p4, p1});
      out.push_back({q, p2, p4});
      gen.insert(gen.end(), 2, g + 2);
    }
    if (r < 0) {
      out.push_back({p4, p3, p1});
      gen.push_back(g + 1);
    } else {
      out.push_back({r, p4, p3});
      out.push_back({r, p1, p4});
      gen.insert(gen.end(), 2, g + 2);
    }
  }
  return {TriangleMesh(std::move(vertices), std::move(out), std::move(gen), std::move(parents)),
          true};
}

TriangleMesh refine_all(const TriangleMesh& mesh) {
  std::vector<int> all(mesh.num_triangles());
  std::iota(all.begin(), all.end(), 0);
  return bisect(mesh, all).mesh;
}

// ---------------------------------------------------------------------------
// Edge orientation
// ---------------------------------------------------------------------------

std::vector<EdgeOrientation> edge_tables(const TriangleMesh& mesh) {
  const auto& edges = mesh.edges();
  const auto& verts = mesh.vertices();
  std::vector<EdgeOrientation> table(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    const Point2 a = verts[edge.vertices[0]];
    const Point2 b = verts[edge.vertices[1]];
    const double len = norm(b - a);
    if (!(len > 0.0)) throw GeometryError("zero-length edge " + std::to_string(e));
    Point2 n{(b.y - a.y) / len, -(b.x - a.x) / len};

    EdgeOrientation& o = table[e];
    o.edge = static_cast<int>(e);
    if (edge.boundary()) {
      o.in_triangle = edge.triangles[0];
    } else {
      o.in_triangle = std::min(edge.triangles[0], edge.triangles[1]);
      o.out_triangle = std::max(edge.triangles[0], edge.triangles[1]);
    }
    const auto c = mesh.corners(o.in_triangle);
    const Point2 centroid = (1.0 / 3.0) * (c[0] + c[1] + c[2]);
    if (dot(n, 0.5 * (a + b) - centroid) < 0.0) n = -1.0 * n;
    o.normal = n;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Text I/O
// ---------------------------------------------------------------------------

TriangleMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path.string());
  std::size_t nv = 0, nt = 0;
  if (!(in >> nv >> nt)) throw StructuralError("mesh file " + path.string() + ": bad header");
  std::vector<Point2> vertices(nv);
  for (auto& p : vertices)
    if (!(in >> p.x >> p.y))
      throw StructuralError("mesh file " + path.string() + ": truncated vertex list");
  std::vector<Triangle> triangles(nt);
  for (auto& t : triangles) {
    if (!(in >> t[0] >> t[1] >> t[2]))
      throw StructuralError("mesh file " + path.string() + ": truncated triangle list");
    if (std::min({t[0], t[1], t[2]}) >= 0 && std::max({t[0], t[1], t[2]}) < static_cast<int>(nv) &&
        signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0)
      std::swap(t[1], t[2]);
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file " + path.string());
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  out << std::setprecision(17);
  for (const Point2& p : mesh.vertices()) out << p.x << ' ' << p.y << '\n';
  for (const Triangle& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) throw std::runtime_error("failed writing mesh file " + path.string());
}

} // namespace steklov
