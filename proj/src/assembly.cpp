#include "steklov/assembly.hpp"

#include "steklov/errors.hpp"

#include <algorithm>
#include <cmath>

namespace steklov {

DofMap DofMap::from_mesh(const TriangleMesh& mesh) {
  return {static_cast<int>(mesh.num_vertices()), mesh.boundary_vertices()};
}

double FormPair::energy_norm(const Vector& u) const { return std::sqrt(K.quadratic(u)); }

double FormPair::boundary_norm(const Vector& u) const {
  return std::sqrt(std::max(0.0, M.quadratic(u)));
}

namespace {

double checked_area(const std::array<Point2, 3>& p) {
  const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
  if (!(std::abs(area) > 0.0)) throw GeometryError("degenerate triangle (zero area)");
  return area;
}

} // namespace

Eigen::Matrix3d element_gradient_matrix(const std::array<Point2, 3>& p) {
  const double area = checked_area(p);
  // grad phi_i = rot90(p_{i+2} - p_{i+1}) / (2 area)
  std::array<Point2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point2 opposite = p[(i + 2) % 3] - p[(i + 1) % 3];
    g[i] = {-opposite.y / (2.0 * area), opposite.x / (2.0 * area)};
  }
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = std::abs(area) * dot(g[i], g[j]);
  return m;
}

Eigen::Matrix3d element_mass_matrix(const std::array<Point2, 3>& p) {
  const double area = std::abs(checked_area(p));
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return (area / 12.0) * m;
}

Eigen::Matrix3d element_stiffness(const std::array<Point2, 3>& p) {
  return element_gradient_matrix(p) + element_mass_matrix(p);
}

Eigen::Matrix2d edge_boundary_mass(Point2 a, Point2 b) {
  const double len = norm(b - a);
  if (!(len > 0.0)) throw GeometryError("degenerate edge (zero length)");
  Eigen::Matrix2d m;
  m << 2, 1, 1, 2;
  return (len / 6.0) * m;
}

namespace {

/// CSR skeleton with the diagonal plus every vertex pair joined by a selected edge.
SparseSymMatrix pattern_from_edges(const TriangleMesh& mesh, bool boundary_only) {
  const int n = static_cast<int>(mesh.num_vertices());
  std::vector<char> has_diag(n, boundary_only ? 0 : 1);
  std::vector<int> count(n, 0);
  for (const Edge& e : mesh.edges()) {
    if (boundary_only && !e.boundary()) continue;
    ++count[e.vertices[0]];
    ++count[e.vertices[1]];
    has_diag[e.vertices[0]] = has_diag[e.vertices[1]] = 1;
  }
  std::vector<int> row_ptr(n + 1, 0);
  for (int i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + count[i] + has_diag[i];
  std::vector<int> cols(row_ptr[n]);
  std::vector<int> fill(row_ptr.begin(), row_ptr.end() - 1);
  for (int i = 0; i < n; ++i)
    if (has_diag[i]) cols[fill[i]++] = i;
  for (const Edge& e : mesh.edges()) {
    if (boundary_only && !e.boundary()) continue;
    cols[fill[e.vertices[0]]++] = e.vertices[1];
    cols[fill[e.vertices[1]]++] = e.vertices[0];
  }
  for (int i = 0; i < n; ++i) std::sort(cols.begin() + row_ptr[i], cols.begin() + row_ptr[i + 1]);
  std::vector<double> vals(cols.size(), 0.0);
  return SparseSymMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

} // namespace

FormPair assemble(const TriangleMesh& mesh, const DofMap& dofs) {
  if (dofs.total_dofs != static_cast<int>(mesh.num_vertices()))
    throw DimensionError("DOF map does not match the mesh");
  FormPair forms{pattern_from_edges(mesh, false), pattern_from_edges(mesh, true)};

  auto& kv = forms.K.values();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Eigen::Matrix3d ke = element_stiffness(mesh.corners(static_cast<int>(t)));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) kv[forms.K.find(tri[i], tri[j])] += ke(i, j);
  }

  auto& mv = forms.M.values();
  const auto& verts = mesh.vertices();
  for (const Edge& e : mesh.edges()) {
    if (!e.boundary()) continue;
    const Eigen::Matrix2d me = edge_boundary_mass(verts[e.vertices[0]], verts[e.vertices[1]]);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) mv[forms.M.find(e.vertices[i], e.vertices[j])] += me(i, j);
  }
  return forms;
}

} // namespace steklov
