#pragma once

#include "steklov/estimator.hpp"

#include <vector>

namespace steklov {

/// Bulk parameter omega in (0, 1).
struct MarkParams {
  double omega = 0.25;

  explicit MarkParams(double omega_ = 0.25);
};

struct MarkResult {
  /// Marked triangle ids in descending-eta order.
  std::vector<int> marked;
  /// eta_global == 0: nothing left to refine.
  bool converged = false;
};

/// Smallest set whose squared indicators reach omega * eta_global^2: the
/// shortest prefix of the triangles sorted by descending eta (ties by id).
MarkResult mark(const IndicatorField& field, const MarkParams& params);

} // namespace steklov
