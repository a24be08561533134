#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace steklov {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);

/// Polygonal domain, counterclockwise, closing edge implied.
struct DomainSpec {
  std::vector<Point2> polygon;
  std::string name;

  static DomainSpec unit_square();
  /// ([0,1]x[0,1/2]) U ([0,1/2]x[1/2,1]).
  static DomainSpec l_shape();

  double area() const;
  double perimeter() const;
  bool contains(Point2 p) const;
};

using Triangle = std::array<int, 3>;

/// An edge with its one or two adjacent triangles. `triangles[1] == -1` on the boundary.
struct Edge {
  std::array<int, 2> vertices;
  std::array<int, 2> triangles;

  bool boundary() const { return triangles[1] < 0; }
};

/// Conforming triangulation with newest-vertex-bisection labels.
///
/// Triangles are stored counterclockwise with the newest vertex first, so the
/// refinement edge of every triangle is the edge opposite local vertex 0.
/// Local edge i of a triangle is the edge opposite local vertex i.
///
/// Vertices created by bisection record the two endpoints of the edge they
/// split; initial vertices carry {-1, -1}. Vertex ids are stable under
/// refinement, which is what makes prolongation between nested meshes a
/// simple append.
class TriangleMesh {
public:
  TriangleMesh() = default;
  /// Validates orientation and conformity and builds the edge table.
  TriangleMesh(std::vector<Point2> vertices, std::vector<Triangle> triangles,
               std::vector<int> generation = {},
               std::vector<std::array<int, 2>> vertex_parents = {});

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
  const std::vector<int>& generation() const { return generation_; }
  const std::vector<std::array<int, 2>>& vertex_parents() const { return vertex_parents_; }

  /// Edge id of the refinement edge of triangle t.
  int refinement_edge(int t) const { return triangle_edges_[t][0]; }
  std::array<Point2, 3> corners(int t) const;
  double area(int t) const;
  /// Longest edge length of t.
  double diameter(int t) const;
  double edge_length(int e) const;
  /// Smallest interior angle over all triangles, in radians.
  double min_angle() const;
  double max_diameter() const;
  /// Sorted ids of vertices incident to a boundary edge.
  std::vector<int> boundary_vertices() const;

private:
  void build_edges();
  void check_conforming() const;

  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> generation_;
  std::vector<std::array<int, 2>> vertex_parents_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
};

/// Unit normal of an edge; points out of `in_triangle`.
struct EdgeOrientation {
  int edge = -1;
  Point2 normal;
  int in_triangle = -1;
  /// -1 for boundary edges, where `normal` is the outward domain normal.
  int out_triangle = -1;
};

/// Uniform right-triangle mesh of an axis-aligned rectilinear polygon with
/// every element diameter <= target_diameter.
TriangleMesh generate_uniform(const DomainSpec& domain, double target_diameter);

struct BisectResult {
  TriangleMesh mesh;
  /// False when nothing was marked and `mesh` is a copy of the input.
  bool refined = false;
};

/// Newest-vertex bisection of the marked triangles plus conforming closure.
BisectResult bisect(const TriangleMesh& mesh, std::span<const int> marked);

/// Bisects every triangle once (with closure).
TriangleMesh refine_all(const TriangleMesh& mesh);

/// One entry per edge, indexed by edge id. Interior normals point from the
/// lower-indexed triangle to the higher-indexed one.
std::vector<EdgeOrientation> edge_tables(const TriangleMesh& mesh);

/// Plain-text mesh format: "V T", V lines "x y", T lines "i j k" (0-based).
/// The first vertex of each triangle is taken as its newest vertex.
TriangleMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

} // namespace steklov
