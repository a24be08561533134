#include "steklov/estimator.hpp"

#include "steklov/assembly.hpp"
#include "steklov/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

namespace steklov {

double JumpResidual::squared_l2(double edge_length) const {
  // Gauss points at 1/2 -+ 1/(2 sqrt 3) along the edge, equal weights 1/2.
  const double s = 0.5 / std::sqrt(3.0);
  const double g1 = (0.5 + s) * at_first + (0.5 - s) * at_second;
  const double g2 = (0.5 - s) * at_first + (0.5 + s) * at_second;
  return 0.5 * edge_length * (g1 * g1 + g2 * g2);
}

Point2 element_gradient(const TriangleMesh& mesh, const Vector& u, int t) {
  const auto p = mesh.corners(t);
  const auto& tri = mesh.triangles()[t];
  const double twice_area = cross(p[1] - p[0], p[2] - p[0]);
  Point2 g{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    const Point2 opposite = p[(i + 2) % 3] - p[(i + 1) % 3];
    const double ui = u[tri[i]];
    g.x += -opposite.y * ui;
    g.y += opposite.x * ui;
  }
  return (1.0 / twice_area) * g;
}

namespace {

void check_inputs(const TriangleMesh& mesh, const Vector& u) {
  if (static_cast<std::size_t>(u.size()) != mesh.num_vertices())
    throw DimensionError("indicator: coefficient vector does not match the mesh");
}

JumpResidual jump_from_gradients(const TriangleMesh& mesh, const EdgeOrientation& o,
                                 const Vector& u, double lambda, Point2 grad_in, Point2 grad_out) {
  JumpResidual j;
  if (o.out_triangle < 0) {
    const auto& ev = mesh.edges()[o.edge].vertices;
    const double dn = dot(grad_in, o.normal);
    j.boundary = true;
    j.at_first = lambda * u[ev[0]] - dn;
    j.at_second = lambda * u[ev[1]] - dn;
  } else {
    j.at_first = j.at_second = 0.5 * dot(grad_out - grad_in, o.normal);
  }
  return j;
}

double volume_term(const TriangleMesh& mesh, const Vector& u, int t) {
  const auto& tri = mesh.triangles()[t];
  const Eigen::Vector3d ut(u[tri[0]], u[tri[1]], u[tri[2]]);
  const double h = mesh.diameter(t);
  return h * h * ut.dot(element_mass_matrix(mesh.corners(t)) * ut);
}

} // namespace

JumpResidual jump_residual(const TriangleMesh& mesh, std::span<const EdgeOrientation> orientation,
                           const Vector& u, double lambda, int edge) {
  check_inputs(mesh, u);
  if (edge < 0 || static_cast<std::size_t>(edge) >= orientation.size())
    throw StructuralError("unknown edge id " + std::to_string(edge));
  const EdgeOrientation& o = orientation[edge];
  const Point2 grad_in = element_gradient(mesh, u, o.in_triangle);
  const Point2 grad_out =
      o.out_triangle >= 0 ? element_gradient(mesh, u, o.out_triangle) : Point2{0.0, 0.0};
  return jump_from_gradients(mesh, o, u, lambda, grad_in, grad_out);
}

double local_indicator(const TriangleMesh& mesh, std::span<const EdgeOrientation> orientation,
                       const Vector& u, double lambda, int triangle) {
  check_inputs(mesh, u);
  if (triangle < 0 || static_cast<std::size_t>(triangle) >= mesh.num_triangles())
    throw StructuralError("unknown triangle id " + std::to_string(triangle));
  double sum = volume_term(mesh, u, triangle);
  for (int e : mesh.triangle_edges()[triangle]) {
    const double len = mesh.edge_length(e);
    sum += len * jump_residual(mesh, orientation, u, lambda, e).squared_l2(len);
  }
  return std::sqrt(sum);
}

IndicatorField global_indicator(std::vector<double> local) {
  IndicatorField field;
  double sum = 0.0;
  for (double v : local) sum += v * v;
  field.eta = std::move(local);
  field.eta_global = std::sqrt(sum);
  return field;
}

IndicatorField compute_indicators(const TriangleMesh& mesh, const Vector& u, double lambda) {
  check_inputs(mesh, u);
  const auto orientation = edge_tables(mesh);
  const std::size_t nt = mesh.num_triangles();

  std::vector<Point2> grads(nt);
  std::vector<double> squared(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    grads[t] = element_gradient(mesh, u, static_cast<int>(t));
    squared[t] = volume_term(mesh, u, static_cast<int>(t));
  }
  for (const EdgeOrientation& o : orientation) {
    const Point2 grad_out = o.out_triangle >= 0 ? grads[o.out_triangle] : Point2{0.0, 0.0};
    const JumpResidual j = jump_from_gradients(mesh, o, u, lambda, grads[o.in_triangle], grad_out);
    const double len = mesh.edge_length(o.edge);
    const double contribution = len * j.squared_l2(len);
    squared[o.in_triangle] += contribution;
    if (o.out_triangle >= 0) squared[o.out_triangle] += contribution;
  }
  for (double& s : squared) s = std::sqrt(s);
  return global_indicator(std::move(squared));
}

void write_indicators(const IndicatorField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "triangle_id,eta\n" << std::setprecision(17);
  for (std::size_t t = 0; t < field.eta.size(); ++t) out << t << ',' << field.eta[t] << '\n';
}

} // namespace steklov
