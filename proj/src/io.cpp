#include "steklov/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace steklov {

namespace {

std::string scientific(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

} // namespace

std::string format_fixed_half_even(double value, int digits) {
  if (!std::isfinite(value)) return std::to_string(value);
  if (digits < 0) throw std::invalid_argument("digits must be nonnegative");

  // Shortest decimal that round-trips, in fixed notation.
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (res.ec != std::errc()) throw std::runtime_error("format_fixed_half_even: to_chars failed");
  std::string text(buf, res.ptr);

  const bool negative = !text.empty() && text.front() == '-';
  if (negative) text.erase(0, 1);
  std::string int_part = text, frac_part;
  if (const auto dot = text.find('.'); dot != std::string::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }

  std::string kept = int_part + frac_part.substr(0, std::min<std::size_t>(digits, frac_part.size()));
  kept.append(static_cast<std::size_t>(digits) - (kept.size() - int_part.size()), '0');
  const std::string rest =
      frac_part.size() > static_cast<std::size_t>(digits) ? frac_part.substr(digits) : "";

  bool round_up = false;
  if (!rest.empty()) {
    if (rest[0] > '5') {
      round_up = true;
    } else if (rest[0] == '5') {
      const bool exact_half = rest.find_first_not_of('0', 1) == std::string::npos;
      round_up = !exact_half || ((kept.back() - '0') % 2 == 1);
    }
  }
  if (round_up) {
    int i = static_cast<int>(kept.size()) - 1;
    while (i >= 0 && kept[i] == '9') kept[i--] = '0';
    if (i >= 0) {
      ++kept[i];
    } else {
      kept.insert(kept.begin(), '1');
    }
  }
  const std::size_t int_len = kept.size() - static_cast<std::size_t>(digits);
  std::string out = kept.substr(0, int_len);
  if (digits > 0) out += "." + kept.substr(int_len);
  const bool all_zero = out.find_first_not_of("0.") == std::string::npos;
  return (negative && !all_zero ? "-" : "") + out;
}

std::string history_csv(const ConvergenceHistory& history) {
  std::ostringstream out;
  out << kHistoryHeader << '\n';
  for (const IterationRecord& r : history.records) {
    char wall[64];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_time_s);
    out << to_string(history.algorithm) << ',' << history.k << ',' << r.level << ',' << r.dofs
        << ',' << format_fixed_half_even(r.lambda, 8) << ',' << scientific(r.eta_global) << ','
        << (r.abs_error ? scientific(*r.abs_error) : std::string()) << ',' << r.marked_count
        << ',' << wall << '\n';
  }
  return out.str();
}

void write_history(const ConvergenceHistory& history, const std::filesystem::path& path) {
  if (history.records.empty()) throw std::invalid_argument("write_history: empty history");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history file " + path.string());
  out << history_csv(history);
  if (!out) throw std::runtime_error("failed writing history file " + path.string());
}

} // namespace steklov
