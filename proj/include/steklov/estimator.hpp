#pragma once

#include "steklov/mesh.hpp"
#include "steklov/sparse.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace steklov {

/// Per-triangle indicators eta_T plus eta_global = sqrt(sum eta_T^2).
struct IndicatorField {
  std::vector<double> eta;
  double eta_global = 0.0;
};

/// Jump residual on one edge. Interior edges carry the constant
/// 1/2 (grad u|out - grad u|in) . n; boundary edges carry the linear function
/// lambda u - grad u . n, stored by its values at the two edge endpoints
/// (Edge::vertices order).
struct JumpResidual {
  bool boundary = false;
  double at_first = 0.0;
  double at_second = 0.0;

  /// ||J||^2 over the edge (2-point Gauss, exact for the quadratic integrand).
  double squared_l2(double edge_length) const;
};

/// Constant gradient of the P1 function u on triangle t.
Point2 element_gradient(const TriangleMesh& mesh, const Vector& u, int t);

JumpResidual jump_residual(const TriangleMesh& mesh, std::span<const EdgeOrientation> orientation,
                           const Vector& u, double lambda, int edge);

/// eta_T = (h_T^2 ||u||_{0,T}^2 + sum_{l in E_T} |l| ||J_l||_{0,l}^2)^{1/2}.
double local_indicator(const TriangleMesh& mesh, std::span<const EdgeOrientation> orientation,
                       const Vector& u, double lambda, int triangle);

/// Root-sum-square of the local values.
IndicatorField global_indicator(std::vector<double> local);

/// All indicators at once; same result as calling local_indicator per triangle.
IndicatorField compute_indicators(const TriangleMesh& mesh, const Vector& u, double lambda);

/// CSV "triangle_id,eta".
void write_indicators(const IndicatorField& field, const std::filesystem::path& path);

} // namespace steklov
