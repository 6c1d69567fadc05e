#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "monoid.hpp"
#include "rational.hpp"
#include "window.hpp"

namespace k3pt {

/// Monomial q^q t^cls.
struct TermKey {
  CurveClass cls;
  std::int64_t q = 0;

  friend auto operator<=>(const TermKey &, const TermKey &) = default;
  friend bool operator==(const TermKey &, const TermKey &) = default;
};

struct Term {
  CurveClass cls;
  std::int64_t q = 0;
  Coefficient value;
};

inline std::string key_string(const CurveClass &cls, std::int64_t q) {
  std::string s = "([";
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(cls[i]);
  }
  return s + "], q^" + std::to_string(q) + ")";
}

/// Sparse truncated Laurent series in q with curve-class variables t^beta and
/// exact rational coefficients. Values are immutable once built; every
/// operation returns a new series.
class Series {
public:
  using TermMap = std::map<TermKey, Coefficient>;

  Series(MonoidPtr monoid, Window window) : monoid_(std::move(monoid)), window_(window) {
    if (!monoid_) throw MonoidError("series needs a class monoid");
    window_.validate();
  }

  /// Validating constructor: duplicates are summed, zeros dropped.
  static Series make(MonoidPtr monoid, Window window, const std::vector<Term> &terms) {
    Series s(std::move(monoid), window);
    for (const auto &t : terms) {
      s.check_key(t.cls, t.q);
      s.accumulate(TermKey{t.cls, t.q}, t.value);
    }
    s.purge();
    return s;
  }

  /// The constant series 1.
  static Series one(MonoidPtr monoid, Window window) {
    Series s(std::move(monoid), window);
    if (!window.contains(0, 0))
      throw WindowViolation("window " + window.str() + " does not contain the constant term");
    s.terms_.emplace(TermKey{CurveClass(s.monoid_->rank(), 0), 0}, Coefficient(1));
    return s;
  }

  [[nodiscard]] const MonoidPtr &monoid() const noexcept { return monoid_; }
  [[nodiscard]] const Window &window() const noexcept { return window_; }
  [[nodiscard]] const TermMap &terms() const noexcept { return terms_; }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }

  [[nodiscard]] std::int64_t degree(const CurveClass &cls) const { return monoid_->degree(cls); }

  /// Coefficient of q^n t^cls. Outside the window the value is unknown, which
  /// is an error rather than zero.
  [[nodiscard]] Coefficient coefficient(const CurveClass &cls, std::int64_t n) const {
    monoid_->check_rank(cls);
    if (!monoid_->is_effective(cls))
      throw EffectivityError("class " + key_string(cls, n) + " is not effective");
    if (!window_.contains(degree(cls), n))
      throw WindowViolation("coefficient " + key_string(cls, n) + " lies outside window " +
                            window_.str());
    auto it = terms_.find(TermKey{cls, n});
    return it == terms_.end() ? Coefficient(0) : it->second;
  }

  /// Smallest stored q-exponent among classes of degree <= max_degree, or
  /// q_max + 1 when none is stored. Because the window is complete and q_min
  /// is a hard bound, this is a true lower bound on the support.
  [[nodiscard]] std::int64_t support_floor(std::int64_t max_degree) const {
    std::int64_t lo = window_.q_max + 1;
    for (const auto &[k, v] : terms_)
      if (degree(k.cls) <= max_degree) lo = std::min(lo, k.q);
    return lo;
  }

  friend bool operator==(const Series &a, const Series &b) {
    return same_monoid(a.monoid_, b.monoid_) && a.window_ == b.window_ && a.terms_ == b.terms_;
  }

  // Unchecked mutation for the kernels in this library.
  void accumulate(const TermKey &key, const Coefficient &value) {
    if (value == 0) return;
    auto [it, inserted] = terms_.try_emplace(key, value);
    if (!inserted) it->second += value;
  }
  void accumulate(TermKey &&key, const Coefficient &value) {
    if (value == 0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(key), value);
    if (!inserted) it->second += value;
  }
  void purge() { std::erase_if(terms_, [](const auto &kv) { return kv.second == 0; }); }
  TermMap &mutable_terms() noexcept { return terms_; }

  void check_key(const CurveClass &cls, std::int64_t q) const {
    monoid_->check_rank(cls);
    if (!monoid_->is_effective(cls))
      throw EffectivityError("class " + key_string(cls, q) + " is not effective");
    if (!window_.contains(degree(cls), q))
      throw WindowViolation("term " + key_string(cls, q) + " lies outside window " +
                            window_.str());
  }

private:
  MonoidPtr monoid_;
  Window window_;
  TermMap terms_;
};

namespace detail {

inline void require_same_monoid(const Series &a, const Series &b) {
  if (!same_monoid(a.monoid(), b.monoid()))
    throw MonoidError("operands live over different class monoids");
}

struct FlatTerm {
  const CurveClass *cls;
  std::int64_t degree;
  std::int64_t q;
  const Coefficient *value;
};

inline std::vector<FlatTerm> flatten(const Series::TermMap &terms, const ClassMonoid &m,
                                     std::int64_t max_degree) {
  std::vector<FlatTerm> out;
  out.reserve(terms.size());
  for (const auto &[k, v] : terms) {
    auto d = m.degree(k.cls);
    if (d <= max_degree) out.push_back({&k.cls, d, k.q, &v});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FlatTerm &x, const FlatTerm &y) { return x.degree < y.degree; });
  return out;
}

/// Raw convolution of two term maps keeping products of degree <= max_degree
/// and q in [q_lo, q_hi + (max_degree - degree) * slack]. `slack` lets
/// iterative kernels keep intermediates that later factors of negative
/// q-exponent can still pull back into the window.
inline Series::TermMap convolve(const Series::TermMap &a, const Series::TermMap &b,
                                const ClassMonoid &m, std::int64_t max_degree,
                                std::int64_t q_lo, std::int64_t q_hi, std::int64_t slack = 0) {
  auto fa = flatten(a, m, max_degree);
  auto fb = flatten(b, m, max_degree);
  Series::TermMap out;
  TermKey key{CurveClass(m.rank(), 0), 0};
  Coefficient prod;
  for (const auto &x : fa) {
    for (const auto &y : fb) {
      const auto d = x.degree + y.degree;
      if (d > max_degree) break;
      const auto q = x.q + y.q;
      if (q < q_lo || q > q_hi + (max_degree - d) * slack) continue;
      for (std::size_t i = 0; i < key.cls.size(); ++i) key.cls[i] = (*x.cls)[i] + (*y.cls)[i];
      key.q = q;
      mpq_mul(prod.get_mpq_t(), x.value->get_mpq_t(), y.value->get_mpq_t());
      auto [it, inserted] = out.try_emplace(key, prod);
      if (!inserted) it->second += prod;
    }
  }
  std::erase_if(out, [](const auto &kv) { return kv.second == 0; });
  return out;
}

inline bool is_zero_class(const CurveClass &c) {
  return std::all_of(c.begin(), c.end(), [](auto x) { return x == 0; });
}

/// Splits a unit 1 + r, validating the constant term and that r is
/// topologically nilpotent on the window. Returns r and the most negative
/// q-exponent (clamped at 0) among positive-degree terms.
inline std::pair<Series::TermMap, std::int64_t> split_unit(const Series &a) {
  const auto &m = *a.monoid();
  Series::TermMap r;
  bool have_one = false;
  std::int64_t neg = 0;
  for (const auto &[k, v] : a.terms()) {
    const auto d = m.degree(k.cls);
    if (d == 0 && k.q == 0) {
      if (v != 1) throw NotAUnit("constant term is " + to_string(v) + ", expected 1");
      have_one = true;
      continue;
    }
    if (d == 0 && k.q < 1)
      throw NonNilpotentTail("degree-0 term " + key_string(k.cls, k.q) +
                             " has q-exponent < 1; geometric series does not terminate");
    if (d >= 1) neg = std::min(neg, k.q);
    r.emplace(k, v);
  }
  if (!have_one) throw NotAUnit("constant term is 0, expected 1");
  return {std::move(r), neg};
}

/// Window of inverse/log results: unknown input terms above q_max can be
/// pulled down by at most `degree_max` positive-degree factors of q-exponent
/// >= neg.
inline Window unit_result_window(const Series &a, std::int64_t neg) {
  const auto &w = a.window();
  return Window(w.degree_max, w.degree_max * neg, w.q_max + w.degree_max * neg);
}

} // namespace detail

/// Re-frames a series on a smaller window. Raising q_min is only allowed over
/// a range that holds no stored terms, since q_min is a support bound.
inline Series restrict_to(const Series &a, const Window &target) {
  target.validate();
  const auto &w = a.window();
  if (target.degree_max > w.degree_max || target.q_max > w.q_max)
    throw WindowViolation("cannot restrict " + w.str() + " to larger window " + target.str());
  Series out(a.monoid(), target);
  for (const auto &[k, v] : a.terms()) {
    const auto d = a.degree(k.cls);
    if (d > target.degree_max || k.q > target.q_max) continue;
    if (k.q < target.q_min)
      throw WindowViolation("restriction to " + target.str() + " would drop term " +
                            key_string(k.cls, k.q) + " below the support bound");
    out.mutable_terms().emplace(k, v);
  }
  return out;
}

inline Series scale(const Series &a, const Coefficient &c) {
  Series out(a.monoid(), a.window());
  if (c == 0) return out;
  for (const auto &[k, v] : a.terms()) out.mutable_terms().emplace(k, v * c);
  return out;
}

inline Series neg(const Series &a) { return scale(a, Coefficient(-1)); }

/// Coefficientwise sum on the intersection of the operand windows.
inline Series add(const Series &a, const Series &b) {
  detail::require_same_monoid(a, b);
  const Window w = intersect(a.window(), b.window());
  Series out(a.monoid(), w);
  for (const auto *s : {&a, &b}) {
    for (const auto &[k, v] : s->terms()) {
      const auto d = s->degree(k.cls);
      if (d > w.degree_max || k.q > w.q_max) continue;
      if (k.q < w.q_min)
        throw WindowViolation("term " + key_string(k.cls, k.q) +
                              " lies below the intersected support bound q_min=" +
                              std::to_string(w.q_min));
      out.accumulate(k, v);
    }
  }
  out.purge();
  return out;
}

inline Series sub(const Series &a, const Series &b) { return add(a, neg(b)); }

/// Exact product. The result keeps min(D_a, D_b) and the largest q_max for
/// which no unknown (above-window) term of either factor can contribute:
///   q_max = min(q_max_a + floor_b, q_max_b + floor_a)
/// with floor_x the support floor of x over the output degree range.
inline Series mul(const Series &a, const Series &b) {
  detail::require_same_monoid(a, b);
  const auto d = std::min(a.window().degree_max, b.window().degree_max);
  const auto lo_a = a.support_floor(d);
  const auto lo_b = b.support_floor(d);
  const Window w(d, a.window().q_min + b.window().q_min,
                 std::min(a.window().q_max + lo_b, b.window().q_max + lo_a));
  Series out(a.monoid(), w);
  out.mutable_terms() = detail::convolve(a.terms(), b.terms(), *a.monoid(), d, w.q_min, w.q_max);
  return out;
}

/// Inverse of a unit 1 + r via the terminating geometric series.
inline Series inverse(const Series &a) {
  auto [r, neg_q] = detail::split_unit(a);
  const Window w = detail::unit_result_window(a, neg_q);
  const auto &m = *a.monoid();
  for (auto &[k, v] : r) v = -v;

  Series out = Series::one(a.monoid(), w);
  Series::TermMap power = out.terms();
  const std::int64_t slack = -neg_q;
  for (std::size_t iter = 0; !power.empty(); ++iter) {
    if (iter > 1'000'000) throw NonNilpotentTail("geometric series failed to terminate");
    power = detail::convolve(power, r, m, w.degree_max, w.q_min, w.q_max, slack);
    for (const auto &[k, v] : power)
      if (k.q <= w.q_max) out.accumulate(k, v);
  }
  out.purge();
  return out;
}

/// exp(a) = sum a^k / k!. Terms of a must have positive degree, or degree 0
/// and q >= 1; the sum then terminates by degree or by q_max.
inline Series exp(const Series &a) {
  const auto &m = *a.monoid();
  const auto &wa = a.window();
  std::int64_t neg_q = 0;
  bool flat = false;
  for (const auto &[k, v] : a.terms()) {
    if (m.degree(k.cls) < 1) {
      if (k.q < 1)
        throw NonNilpotentTail("exp argument has degree-0 term " + key_string(k.cls, k.q) +
                               " with q-exponent < 1");
      flat = true;
      continue;
    }
    neg_q = std::min(neg_q, k.q);
  }
  // Unknown terms above q_max have degree >= 1 unless the argument has a
  // degree-0 part, in which case they pair with one more known factor.
  const auto d = wa.degree_max;
  const auto hi = wa.q_max + (flat ? d : std::max<std::int64_t>(d - 1, 0)) * neg_q;
  if (hi < 0)
    throw WindowViolation("exp result window loses the constant term (q_max would be " +
                          std::to_string(hi) + ")");
  const Window w(d, d * neg_q, hi);
  Series out = Series::one(a.monoid(), w);
  Series::TermMap power = out.terms();
  for (std::int64_t k = 1; !power.empty(); ++k) {
    if (k > 1'000'000) throw NonNilpotentTail("exponential series failed to terminate");
    power = detail::convolve(power, a.terms(), m, d, w.q_min, w.q_max, -neg_q);
    for (auto &[key, v] : power) v /= k;
    for (const auto &[key, v] : power)
      if (key.q <= w.q_max) out.accumulate(key, v);
  }
  out.purge();
  return out;
}

/// log(1 + r) = sum (-1)^(k-1) r^k / k for a unit argument.
inline Series log(const Series &a) {
  auto [r, neg_q] = detail::split_unit(a);
  const Window w = detail::unit_result_window(a, neg_q);
  const auto &m = *a.monoid();
  Series out(a.monoid(), w);
  Series::TermMap power;
  power.emplace(TermKey{CurveClass(m.rank(), 0), 0}, Coefficient(1));
  const std::int64_t slack = -neg_q;
  for (std::int64_t k = 1; !power.empty(); ++k) {
    if (k > 1'000'000) throw NonNilpotentTail("logarithm series failed to terminate");
    power = detail::convolve(power, r, m, w.degree_max, w.q_min, w.q_max, slack);
    const Coefficient c(k % 2 == 1 ? 1 : -1, k);
    for (const auto &[key, v] : power)
      if (key.q <= w.q_max) out.accumulate(key, v * c);
  }
  out.purge();
  return out;
}

/// a^m by binary exponentiation; negative m goes through inverse.
inline Series pow_int(const Series &a, std::int64_t m) {
  if (m == 0) return Series::one(a.monoid(), a.window());
  if (m < 0) return pow_int(inverse(a), -m);
  Series base = a;
  Series acc = Series::one(a.monoid(), a.window());
  bool first = true;
  while (m > 0) {
    if (m & 1) {
      acc = first ? base : mul(acc, base);
      first = false;
    }
    m >>= 1;
    if (m) base = mul(base, base);
  }
  return acc;
}

} // namespace k3pt
