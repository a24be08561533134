#pragma once

#include "steklov/drivers.hpp"

#include <filesystem>
#include <string>

namespace steklov {

/// Fixed-point rendering with `digits` decimals, rounding the shortest
/// round-trip decimal form of `value` half-to-even.
std::string format_fixed_half_even(double value, int digits);

inline constexpr const char* kHistoryHeader =
    "algorithm,k,iter,dofs,lambda,eta_global,abs_error,marked_count,wall_time_s";

/// CSV text of a history: header plus one row per iteration.
std::string history_csv(const ConvergenceHistory& history);

void write_history(const ConvergenceHistory& history, const std::filesystem::path& path);

} // namespace steklov
