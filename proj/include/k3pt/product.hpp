#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "series.hpp"

namespace k3pt {

/// Lazily indexed factors of an infinite product.
///
/// `factor(k, request)` builds factor k complete on (at least) the requested
/// window; it may return a lower q_min or larger q_max than requested.
/// `exhausted(k, request)` must return true once factor k and every later
/// factor are identically 1 on the request. Both are called concurrently when
/// more than one thread is used, so they must be pure.
struct FactorSource {
  std::function<Series(std::size_t, const Window &)> factor;
  std::function<bool(std::size_t, const Window &)> exhausted;
};

namespace detail {

inline std::vector<Series> build_factors(const FactorSource &src, const Window &request,
                                         std::size_t max_factors, unsigned threads) {
  std::size_t count = 0;
  while (!src.exhausted(count, request)) {
    if (++count > max_factors)
      throw NonTerminatingProduct("factor sequence not exhausted after " +
                                  std::to_string(max_factors) + " factors on window " +
                                  request.str());
  }
  std::vector<std::optional<Series>> slots(count);
  if (threads <= 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k) slots[k].emplace(src.factor(k, request));
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) {
        pool.emplace_back([&] {
          for (auto k = next++; k < count && !failed; k = next++) {
            try {
              slots[k].emplace(src.factor(k, request));
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<Series> out;
  out.reserve(count);
  for (auto &s : slots) out.push_back(std::move(*s));
  return out;
}

} // namespace detail

/// Exact product of a terminating factor sequence on `target`.
///
/// Factors with negative q-exponents shrink the certified q_max of a product;
/// when that happens the factors are rebuilt on a taller request window until
/// the product covers `target`. Multiplication order is fixed, and exact
/// arithmetic makes the result independent of `threads`.
inline Series truncated_product(const MonoidPtr &monoid, const FactorSource &src,
                                const Window &target, unsigned threads = 1,
                                std::size_t max_factors = 1u << 20) {
  target.validate();
  if (!src.factor || !src.exhausted)
    throw NonTerminatingProduct("factor sequence has no termination bound");
  Window request = target;
  for (int round = 0; round < 16; ++round) {
    auto factors = detail::build_factors(src, request, max_factors, threads);
    Series acc = Series::one(monoid, request);
    for (const auto &f : factors) {
      if (!same_monoid(f.monoid(), monoid))
        throw MonoidError("product factor lives over a different class monoid");
      acc = mul(acc, f);
    }
    const auto &w = acc.window();
    if (w.degree_max < target.degree_max)
      throw InsufficientWindow("product factors only reach degree " +
                               std::to_string(w.degree_max) + ", target " + target.str());
    if (w.q_max >= target.q_max) return restrict_to(acc, target);
    request.q_max += target.q_max - w.q_max;
  }
  throw InsufficientWindow("could not certify product on " + target.str());
}

} // namespace k3pt
