#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace k3pt {

/// Finitely generated lattice of curve classes with a positive degree
/// functional. Effective classes are the nonnegative combinations of the
/// generators.
class ClassMonoid {
public:
  ClassMonoid(std::vector<std::string> names, std::vector<std::int64_t> weights)
      : names_(std::move(names)), weights_(std::move(weights)) {
    if (names_.empty()) throw MonoidError("class monoid needs at least one generator");
    if (names_.size() != weights_.size())
      throw MonoidError("generator names and degree weights differ in length");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw MonoidError("empty generator name");
      if (!seen.insert(names_[i]).second)
        throw MonoidError("duplicate generator name '" + names_[i] + "'");
      if (weights_[i] < 1)
        throw MonoidError("degree weight of '" + names_[i] + "' must be >= 1");
    }
  }

  /// Rank-1 monoid with a single weight-1 generator.
  static std::shared_ptr<const ClassMonoid> single(std::string name = "t") {
    return std::make_shared<const ClassMonoid>(std::vector<std::string>{std::move(name)},
                                               std::vector<std::int64_t>{1});
  }

  [[nodiscard]] std::size_t rank() const noexcept { return names_.size(); }
  [[nodiscard]] const std::vector<std::string> &names() const noexcept { return names_; }
  [[nodiscard]] const std::vector<std::int64_t> &weights() const noexcept { return weights_; }

  [[nodiscard]] std::int64_t degree(const std::vector<std::int64_t> &coords) const {
    check_rank(coords);
    return std::inner_product(coords.begin(), coords.end(), weights_.begin(), std::int64_t{0});
  }

  [[nodiscard]] bool is_effective(const std::vector<std::int64_t> &coords) const {
    check_rank(coords);
    for (auto c : coords)
      if (c < 0) return false;
    return true;
  }

  [[nodiscard]] std::size_t index_of(const std::string &name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    throw MonoidError("unknown generator '" + name + "'");
  }

  void check_rank(const std::vector<std::int64_t> &coords) const {
    if (coords.size() != rank())
      throw MonoidError("class has " + std::to_string(coords.size()) +
                        " coordinates, monoid rank is " + std::to_string(rank()));
  }

  /// Every effective class of degree <= max_degree, in lexicographic order.
  [[nodiscard]] std::vector<std::vector<std::int64_t>>
  effective_classes(std::int64_t max_degree) const {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> cur(rank(), 0);
    enumerate(0, max_degree, cur, out);
    return out;
  }

  friend bool operator==(const ClassMonoid &, const ClassMonoid &) = default;

private:
  void enumerate(std::size_t i, std::int64_t budget, std::vector<std::int64_t> &cur,
                 std::vector<std::vector<std::int64_t>> &out) const {
    if (i == rank()) {
      out.push_back(cur);
      return;
    }
    for (std::int64_t c = 0; c * weights_[i] <= budget; ++c) {
      cur[i] = c;
      enumerate(i + 1, budget - c * weights_[i], cur, out);
    }
    cur[i] = 0;
  }

  std::vector<std::string> names_;
  std::vector<std::int64_t> weights_;
};

using MonoidPtr = std::shared_ptr<const ClassMonoid>;

/// Coordinates of a class in a ClassMonoid.
using CurveClass = std::vector<std::int64_t>;

inline bool same_monoid(const MonoidPtr &a, const MonoidPtr &b) {
  return a == b || (a && b && *a == *b);
}

/// Parses "b0", "2*e1", "b0+e1+2*e2" against the monoid's generator names.
/// "b0+2*e1" -> coordinates; "0" is the zero class.
inline CurveClass parse_class(const ClassMonoid &m, const std::string &text) {
  CurveClass c(m.rank(), 0);
  std::size_t pos = 0;
  if (text.empty()) throw MonoidError("empty class expression");
  if (text == "0") return c;
  while (pos <= text.size()) {
    auto plus = text.find('+', pos);
    std::string tok = text.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
    std::int64_t mult = 1;
    if (auto star = tok.find('*'); star != std::string::npos) {
      try {
        mult = std::stoll(tok.substr(0, star));
      } catch (const std::exception &) {
        throw MonoidError("bad multiplier in class expression '" + text + "'");
      }
      tok = tok.substr(star + 1);
    }
    c[m.index_of(tok)] += mult;
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  return c;
}

} // namespace k3pt
