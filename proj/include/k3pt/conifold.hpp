#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "product.hpp"
#include "pushforward.hpp"
#include "series_json.hpp"

namespace k3pt {

/// Exceptional-curve series prod_{i, n>=1} (1 - (-q)^n t^{e_i})^n on `window`.
/// Factor (i, n) has lowest term q^n t^{e_i}, so it is identically 1 once
/// deg(e_i) > D or n > q_max.
inline Series pt_h_series(const MonoidPtr &monoid, const std::vector<CurveClass> &exceptional,
                          const Window &window, unsigned threads = 1) {
  std::set<CurveClass> seen;
  std::int64_t min_degree = 0;
  for (const auto &e : exceptional) {
    monoid->check_rank(e);
    if (!monoid->is_effective(e) || detail::is_zero_class(e))
      throw EffectivityError("exceptional class " + key_string(e, 0) + " must be effective and nonzero");
    if (!seen.insert(e).second) throw EffectivityError("duplicate exceptional class " + key_string(e, 0));
    const auto d = monoid->degree(e);
    min_degree = min_degree == 0 ? d : std::min(min_degree, d);
  }
  if (exceptional.empty()) return Series::one(monoid, window);

  const auto k_count = exceptional.size();
  FactorSource src;
  src.exhausted = [=](std::size_t k, const Window &req) {
    const auto n = static_cast<std::int64_t>(k / k_count) + 1;
    return n > req.q_max || min_degree > req.degree_max;
  };
  src.factor = [=](std::size_t k, const Window &req) {
    const auto &e = exceptional[k % k_count];
    const auto n = static_cast<std::int64_t>(k / k_count) + 1;
    const auto d = monoid->degree(e);
    // (1 - (-q)^n t^e)^n = sum_j C(n,j) (-1)^j (-1)^(nj) q^(nj) t^(je)
    std::vector<Term> terms;
    mpz_class binom = 1;
    for (std::int64_t j = 0; j <= n; ++j) {
      if (j > 0) binom = binom * (n - j + 1) / j;
      if (j * d > req.degree_max || n * j > req.q_max) break;
      CurveClass cls(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) cls[i] = j * e[i];
      const bool negative = (j + n * j) % 2 != 0;
      terms.push_back({std::move(cls), n * j, Coefficient(negative ? mpz_class(-binom) : binom)});
    }
    return Series::make(monoid, req, terms);
  };
  return truncated_product(monoid, src, window, threads);
}

struct ConifoldReport {
  Series lhs;
  Series rhs;
  std::vector<TermKey> certified_keys;
  struct Mismatch {
    TermKey key;
    Coefficient lhs, rhs;
  };
  std::vector<Mismatch> mismatches;
  std::vector<TermKey> uncertified;

  [[nodiscard]] bool holds() const noexcept { return mismatches.empty(); }
};

namespace detail {

inline void check_conifold_kernel(const PushforwardMap &map, const std::vector<CurveClass> &exceptional) {
  const CurveClass zero(map.target->rank(), 0);
  for (const auto &e : exceptional)
    if (map.apply(e) != zero)
      throw IllFormedPushforward("exceptional class " + key_string(e, 0) + " is not contracted by the map");
  for (auto g : map.contracted()) {
    CurveClass unit(map.source->rank(), 0);
    unit[g] = 1;
    if (std::find(exceptional.begin(), exceptional.end(), unit) == exceptional.end())
      throw IllFormedPushforward("contracted generator '" + map.source->names()[g] +
                                 "' is not among the exceptional classes");
  }
}

} // namespace detail

/// Checks  pushforward(PT(X~) / PT^h(X~)) = PT(X)^2  coefficientwise. The
/// division happens on the source monoid before the variable change; only
/// keys certified on both sides are compared.
inline ConifoldReport conifold_check(const Series &pt_resolved, const std::vector<CurveClass> &exceptional,
                                     const PushforwardMap &map, const Series &pt_base,
                                     unsigned threads = 1) {
  map.validate();
  if (!same_monoid(pt_resolved.monoid(), map.source))
    throw MonoidError("resolved series does not live over the pushforward source monoid");
  if (!same_monoid(pt_base.monoid(), map.target))
    throw MonoidError("base series does not live over the pushforward target monoid");
  detail::check_conifold_kernel(map, exceptional);

  const auto &rw = pt_resolved.window();
  const auto floor = std::min<std::int64_t>(0, pt_resolved.support_floor(rw.degree_max));
  const Window hw(rw.degree_max, 0, std::max<std::int64_t>(rw.q_max - floor, 0));
  const Series quotient = mul(pt_resolved, inverse(pt_h_series(map.source, exceptional, hw, threads)));

  const auto &bw = pt_base.window();
  const auto &qw = quotient.window();
  const Window tw(bw.degree_max, std::min(bw.q_min, qw.q_max), std::min(bw.q_max, qw.q_max));
  auto pushed = pushforward(quotient, map, tw);

  ConifoldReport report{std::move(pushed.series), pow_int(pt_base, 2), {}, {}, {}};
  const auto &rhs_w = report.rhs.window();
  std::set<TermKey> lhs_unknown(pushed.uncertified.begin(), pushed.uncertified.end());
  for (const auto &gamma : map.target->effective_classes(tw.degree_max)) {
    const auto d = map.target->degree(gamma);
    for (auto n = tw.q_min; n <= tw.q_max; ++n) {
      TermKey key{gamma, n};
      if (lhs_unknown.contains(key) || d > rhs_w.degree_max || n > rhs_w.q_max) {
        report.uncertified.push_back(std::move(key));
        continue;
      }
      const Coefficient l = report.lhs.coefficient(gamma, n);
      const Coefficient r = n < rhs_w.q_min ? Coefficient(0) : report.rhs.coefficient(gamma, n);
      if (l != r) report.mismatches.push_back({key, l, r});
      report.certified_keys.push_back(std::move(key));
    }
  }
  return report;
}

inline json to_json(const ConifoldReport &r) {
  auto key_json = [](const TermKey &k) { return json::array({k.cls, k.q}); };
  json matches = json::array(), mismatches = json::array(), uncertified = json::array();
  std::set<TermKey> bad;
  for (const auto &m : r.mismatches) {
    bad.insert(m.key);
    mismatches.push_back(json::array({m.key.cls, m.key.q, to_string(m.lhs), to_string(m.rhs)}));
  }
  for (const auto &k : r.certified_keys) {
    if (bad.contains(k)) continue;
    auto it = r.lhs.terms().find(k);
    matches.push_back(json::array({k.cls, k.q, to_string(it == r.lhs.terms().end() ? Coefficient(0) : it->second)}));
  }
  for (const auto &k : r.uncertified) uncertified.push_back(key_json(k));
  return json{{"format", "k3pt.conifold-report/1"},
              {"holds", r.holds()},
              {"lhs_window", to_json(r.lhs.window())},
              {"rhs_window", to_json(r.rhs.window())},
              {"matches", matches},
              {"mismatches", mismatches},
              {"uncertified", uncertified}};
}

} // namespace k3pt
