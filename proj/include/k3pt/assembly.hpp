#pragma once

#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "kawai_yoshioka.hpp"
#include "tables.hpp"

namespace k3pt {

enum class AssemblyMode { ky, perverse, generic };

inline std::string to_string(AssemblyMode m) {
  switch (m) {
  case AssemblyMode::ky: return "ky";
  case AssemblyMode::perverse: return "perverse";
  default: return "generic";
  }
}

/// Stable pair series of a K3 fibration, one column per NL class, with
/// coefficients P_{n,gamma} (or P^per_{n,gamma} in perverse mode).
struct AssembledPT {
  Series series;
  AssemblyMode mode;
  std::map<std::string, std::string> provenance;
};

namespace detail {

/// P_{n,gamma} = sum_h fiber(n, h) * NL_{h,gamma} for every class inside the
/// window and every n in its q-range. Each class column is independent.
inline Series contract(const std::function<bool(std::int64_t, std::int64_t)> &covers,
                       const std::function<Coefficient(std::int64_t, std::int64_t)> &fiber,
                       const NLTable &nl, const Window &window, unsigned threads) {
  window.validate();
  struct Column {
    CurveClass cls;
    std::vector<std::pair<std::int64_t, Coefficient>> nl;
  };
  std::vector<Column> columns;
  for (const auto &[id, cls] : nl.classes) {
    if (nl.monoid->degree(cls) > window.degree_max) continue;
    Column col{cls, {}};
    for (const auto &[key, v] : nl.entries)
      if (key.second == id && v != 0) col.nl.emplace_back(key.first, v);
    columns.push_back(std::move(col));
  }

  for (const auto &col : columns)
    for (const auto &[h, v] : col.nl)
      for (auto n = window.q_min; n <= window.q_max; ++n)
        if (!covers(n, h))
          throw InsufficientFiberTable("fiber table does not cover (n,h)=(" + std::to_string(n) +
                                       "," + std::to_string(h) + ") needed by class " +
                                       key_string(col.cls, n));

  std::vector<Series::TermMap> parts(columns.size());
  auto work = [&](std::size_t i) {
    const auto &col = columns[i];
    for (auto n = window.q_min; n <= window.q_max; ++n) {
      Coefficient sum = 0;
      for (const auto &[h, v] : col.nl) sum += fiber(n, h) * v;
      if (sum != 0) parts[i].emplace(TermKey{col.cls, n}, sum);
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < columns.size(); ++i) work(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < columns.size(); i += threads) work(i);
      });
  }

  Series out(nl.monoid, window);
  for (const auto &p : parts)
    for (const auto &[k, v] : p) out.accumulate(k, v);
  out.purge();
  return out;
}

inline std::map<std::string, std::string> base_provenance(const NLTable &nl, AssemblyMode mode) {
  std::map<std::string, std::string> p{{"mode", to_string(mode)}};
  if (nl.convention) p["nl_convention"] = *nl.convention;
  return p;
}

} // namespace detail

/// PT series of a smooth K3 fibration from the signed KY coefficients:
/// P_{n,gamma} = sum_h c(n,h) NL_{h,gamma}.
inline AssembledPT assemble(const KYTable &ky, const NLTable &nl, const Window &window,
                            unsigned threads = 1) {
  AssembledPT out{detail::contract([&](auto n, auto h) { return ky.covers(n, h); },
                                   [&](auto n, auto h) { return ky.c(n, h); }, nl, window, threads),
                  AssemblyMode::ky, detail::base_provenance(nl, AssemblyMode::ky)};
  out.provenance["fiber"] =
      "ky(h_max=" + std::to_string(ky.h_max()) + ", n_max=" + std::to_string(ky.n_max()) + ")";
  return out;
}

/// Same contraction, labelled as perverse stable pair invariants P^per.
inline AssembledPT assemble_perverse(const KYTable &ky, const NLTable &nl, const Window &window,
                                     unsigned threads = 1) {
  auto out = assemble(ky, nl, window, threads);
  out.mode = AssemblyMode::perverse;
  out.provenance["mode"] = to_string(AssemblyMode::perverse);
  return out;
}

/// P_{n,gamma} = sum_h NL_{h,gamma} * integral_{[P_n(S,h)]^red} c_{n+2h-1}(V),
/// with the integrals supplied. The formula holds only when the fibration has
/// no type I components, or under the minimal-m vanishing hypothesis; the
/// artifact cannot check either, so the caller's assertion is recorded.
inline AssembledPT assemble_generic(const FiberIntegralTable &fiber, const NLTable &nl,
                                    const Window &window, const std::string &special_case,
                                    unsigned threads = 1) {
  AssembledPT out{detail::contract([&](auto n, auto h) { return fiber.covers(n, h); },
                                   [&](auto n, auto h) { return fiber.value(n, h); }, nl, window,
                                   threads),
                  AssemblyMode::generic, detail::base_provenance(nl, AssemblyMode::generic)};
  out.provenance["fiber"] = "supplied integral table";
  out.provenance["special_case"] = special_case;
  return out;
}

} // namespace k3pt
