#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace k3pt {

/// Truncation region of a series: class degree at most `degree_max`, q-exponent
/// in [q_min, q_max].
///
/// A series is complete on its window: every coefficient inside it is known
/// exactly. `q_min` is a hard support bound (the series has no terms below it
/// in any degree <= degree_max); terms above `q_max` or above `degree_max` are
/// unknown.
struct Window {
  std::int64_t degree_max = 0;
  std::int64_t q_min = 0;
  std::int64_t q_max = 0;

  Window() = default;
  Window(std::int64_t d, std::int64_t lo, std::int64_t hi) : degree_max(d), q_min(lo), q_max(hi) {
    validate();
  }

  void validate() const {
    if (degree_max < 0)
      throw WindowViolation("window degree bound must be >= 0, got " + std::to_string(degree_max));
    if (q_max < q_min)
      throw WindowViolation("empty q-window [" + std::to_string(q_min) + ", " +
                            std::to_string(q_max) + "]");
  }

  [[nodiscard]] bool contains(std::int64_t degree, std::int64_t q) const noexcept {
    return degree >= 0 && degree <= degree_max && q >= q_min && q <= q_max;
  }

  [[nodiscard]] bool covers(const Window &inner) const noexcept {
    return inner.degree_max <= degree_max && inner.q_min >= q_min && inner.q_max <= q_max;
  }

  [[nodiscard]] std::string str() const {
    return "{D=" + std::to_string(degree_max) + ", q in [" + std::to_string(q_min) + ", " +
           std::to_string(q_max) + "]}";
  }

  friend bool operator==(const Window &, const Window &) = default;
};

inline Window intersect(const Window &a, const Window &b) {
  return Window(std::min(a.degree_max, b.degree_max), std::max(a.q_min, b.q_min),
                std::min(a.q_max, b.q_max));
}

} // namespace k3pt
