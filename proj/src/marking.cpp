#include "steklov/marking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace steklov {

MarkParams::MarkParams(double omega_) : omega(omega_) {
  if (!(omega > 0.0 && omega < 1.0))
    throw std::invalid_argument("omega must lie in (0, 1), got " + std::to_string(omega));
}

MarkResult mark(const IndicatorField& field, const MarkParams& params) {
  if (field.eta.empty()) throw std::invalid_argument("mark: empty indicator field");
  MarkResult result;
  if (field.eta_global == 0.0) {
    result.converged = true;
    return result;
  }
  std::vector<int> order(field.eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return field.eta[a] != field.eta[b] ? field.eta[a] > field.eta[b] : a < b;
  });
  // Use the same summation as the threshold so the prefix test is consistent.
  double total = 0.0;
  for (double e : field.eta) total += e * e;
  const double threshold = params.omega * total;
  double running = 0.0;
  for (int t : order) {
    result.marked.push_back(t);
    running += field.eta[t] * field.eta[t];
    if (running >= threshold) break;
  }
  return result;
}

} // namespace steklov
