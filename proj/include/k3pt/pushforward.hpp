#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "series.hpp"

namespace k3pt {

/// Linear map of curve classes t^beta -> t^(M beta).
///
/// `matrix` has one row per target generator and one column per source
/// generator. Entries must be nonnegative so that effective classes map to
/// effective classes. Source generators whose column is zero are contracted;
/// they span the effective part of the kernel and each has positive degree
/// because every monoid weight is >= 1.
struct PushforwardMap {
  MonoidPtr source;
  MonoidPtr target;
  std::vector<std::vector<std::int64_t>> matrix;

  void validate() const {
    if (!source || !target) throw IllFormedPushforward("pushforward needs source and target monoids");
    if (matrix.size() != target->rank())
      throw IllFormedPushforward("matrix has " + std::to_string(matrix.size()) +
                                 " rows, target rank is " + std::to_string(target->rank()));
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      if (matrix[r].size() != source->rank())
        throw IllFormedPushforward("matrix row " + std::to_string(r) + " has " +
                                   std::to_string(matrix[r].size()) + " columns, source rank is " +
                                   std::to_string(source->rank()));
      for (std::size_t c = 0; c < matrix[r].size(); ++c)
        if (matrix[r][c] < 0)
          throw IllFormedPushforward("image of generator '" + source->names()[c] +
                                     "' is not effective");
    }
  }

  [[nodiscard]] CurveClass apply(const CurveClass &beta) const {
    source->check_rank(beta);
    CurveClass out(target->rank(), 0);
    for (std::size_t r = 0; r < matrix.size(); ++r)
      for (std::size_t c = 0; c < beta.size(); ++c) out[r] += matrix[r][c] * beta[c];
    return out;
  }

  [[nodiscard]] std::vector<std::size_t> contracted() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < source->rank(); ++c) {
      bool zero = true;
      for (const auto &row : matrix) zero = zero && row[c] == 0;
      if (zero) out.push_back(c);
    }
    return out;
  }

  /// Effective preimages of `gamma` with no contracted component. Finite
  /// because every remaining column is a nonzero nonnegative vector.
  [[nodiscard]] std::vector<CurveClass> base_preimages(const CurveClass &gamma) const {
    target->check_rank(gamma);
    std::vector<std::size_t> live;
    auto dead = contracted();
    for (std::size_t c = 0; c < source->rank(); ++c)
      if (std::find(dead.begin(), dead.end(), c) == dead.end()) live.push_back(c);
    std::vector<CurveClass> out;
    CurveClass beta(source->rank(), 0);
    CurveClass remaining = gamma;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == live.size()) {
        if (std::all_of(remaining.begin(), remaining.end(), [](auto x) { return x == 0; }))
          out.push_back(beta);
        return;
      }
      const auto c = live[i];
      for (std::int64_t k = 0;; ++k) {
        bool fits = true;
        for (std::size_t r = 0; r < matrix.size(); ++r)
          fits = fits && remaining[r] - k * matrix[r][c] >= 0;
        if (!fits) break;
        for (std::size_t r = 0; r < matrix.size(); ++r) remaining[r] -= k * matrix[r][c];
        beta[c] = k;
        rec(i + 1);
        for (std::size_t r = 0; r < matrix.size(); ++r) remaining[r] += k * matrix[r][c];
      }
      beta[c] = 0;
    };
    rec(0);
    return out;
  }
};

struct PushforwardResult {
  Series series;
  /// Keys inside the target window whose value could not be certified.
  std::vector<TermKey> uncertified;
};

/// Variable change t^beta -> t^(M beta), summing coefficients with equal image.
///
/// A target coefficient (gamma, n) is certified when
///   - gamma has finitely many effective preimages and all lie in the source
///     window, or
///   - gamma has infinitely many (some generator is contracted), every base
///     preimage lies in the source window, and the series vanishes at q^n on
///     the outermost in-window layer: preimages beta for which beta + g leaves
///     the window for some contracted generator g.
/// Other keys are left out of the series and listed in `uncertified`.
inline PushforwardResult pushforward(const Series &a, const PushforwardMap &map,
                                     const Window &target_window) {
  map.validate();
  target_window.validate();
  if (!same_monoid(a.monoid(), map.source))
    throw MonoidError("series does not live over the pushforward source monoid");
  const auto &sw = a.window();
  if (target_window.q_max > sw.q_max)
    throw WindowViolation("target q_max " + std::to_string(target_window.q_max) +
                          " exceeds source q_max " + std::to_string(sw.q_max));

  const auto &src = *map.source;
  const auto dead = map.contracted();

  std::map<CurveClass, std::vector<CurveClass>> in_window;
  for (auto &beta : src.effective_classes(sw.degree_max)) in_window[map.apply(beta)].push_back(beta);

  PushforwardResult out{Series(map.target, target_window), {}};
  for (const auto &gamma : map.target->effective_classes(target_window.degree_max)) {
    const auto base = map.base_preimages(gamma);
    const auto it = in_window.find(gamma);
    static const std::vector<CurveClass> none;
    const auto &pre = it == in_window.end() ? none : it->second;

    bool base_inside = std::all_of(base.begin(), base.end(), [&](const CurveClass &b) {
      return src.degree(b) <= sw.degree_max;
    });
    const bool infinite = !dead.empty() && !base.empty();

    std::vector<CurveClass> frontier;
    if (infinite) {
      for (const auto &beta : pre) {
        const auto d = src.degree(beta);
        for (auto g : dead)
          if (d + src.weights()[g] > sw.degree_max) {
            frontier.push_back(beta);
            break;
          }
      }
    }

    for (auto n = target_window.q_min; n <= target_window.q_max; ++n) {
      bool certified = base_inside;
      if (certified && infinite && n >= sw.q_min) {
        for (const auto &beta : frontier)
          if (a.terms().contains(TermKey{beta, n})) {
            certified = false;
            break;
          }
      }
      if (!certified) {
        out.uncertified.push_back(TermKey{gamma, n});
        continue;
      }
      if (n < sw.q_min) continue;
      Coefficient sum = 0;
      for (const auto &beta : pre)
        if (auto t = a.terms().find(TermKey{beta, n}); t != a.terms().end()) sum += t->second;
      if (sum != 0) out.series.mutable_terms().emplace(TermKey{gamma, n}, sum);
    }
  }
  return out;
}

/// Pushforward that refuses to leave any key uncertified.
inline Series pushforward_complete(const Series &a, const PushforwardMap &map,
                                   const Window &target_window) {
  auto r = pushforward(a, map, target_window);
  if (!r.uncertified.empty())
    throw IncompletePushforward(std::to_string(r.uncertified.size()) +
                                " target coefficients have contributions beyond the source "
                                "window, first at " +
                                key_string(r.uncertified.front().cls, r.uncertified.front().q));
  return std::move(r.series);
}

} // namespace k3pt
