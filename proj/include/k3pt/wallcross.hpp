#pragma once

#include <map>
#include <string>
#include <vector>

#include "product.hpp"
#include "tables.hpp"

namespace k3pt {

/// behrend: invariants weighted by the Behrend function, sign (-1)^(n-1) in
/// the product. euler: naive Euler characteristics, no sign.
enum class SignMode { behrend, euler };

inline std::string to_string(SignMode m) { return m == SignMode::behrend ? "behrend" : "euler"; }

inline SignMode parse_sign_mode(const std::string &s) {
  if (s == "behrend") return SignMode::behrend;
  if (s == "euler") return SignMode::euler;
  throw DomainError("unknown sign mode '" + s + "' (expected behrend or euler)");
}

inline int wall_sign(std::int64_t n, SignMode mode) {
  if (mode == SignMode::euler) return 1;
  return (n - 1) % 2 == 0 ? 1 : -1;
}

/// Provenance note: the Behrend-weighted product depends on an unproved
/// hypothesis about the local structure of the moduli stacks, the Euler
/// version does not.
inline std::string wallcross_status(SignMode mode) {
  return mode == SignMode::behrend ? "conditional on the critical-locus conjecture" : "unconditional";
}

namespace detail {

struct WallTerm {
  CurveClass beta;
  std::int64_t q;
  Coefficient value; // already multiplied by sign and by n + 2r
};

/// Exponents of the wall-crossing product: entry J(r, beta, r+n) with n >= 0
/// contributes s (n+2r) J q^n t^beta, and additionally s (n+2r) J q^-n t^beta
/// when r > 0 and n > 0. Entries with r+n < r never appear.
inline std::vector<WallTerm> wall_terms(const JTable &j, SignMode mode) {
  std::vector<WallTerm> out;
  for (const auto &[key, v] : j.entries) {
    const auto &[r, beta, m] = key;
    const auto n = m - r;
    if (n < 0 || v == 0) continue;
    const auto weight = n + 2 * r;
    if (weight == 0) continue;
    const Coefficient x = v * weight * wall_sign(n, mode);
    out.push_back({beta, n, x});
    if (r > 0 && n > 0) out.push_back({beta, -n, x});
  }
  return out;
}

} // namespace detail

/// PT series from generalized DT invariants:
///   prod_{r>=0, beta>0, n>=0} exp(s J(r,beta,r+n) q^n t^beta)^(n+2r)
///   * prod_{r>0, beta>0, n>0} exp(s J(r,beta,r+n) q^-n t^beta)^(n+2r)
/// Each power of an exponential is taken as exp((n+2r) x). The result keeps
/// the requested degree bound and q_max; q_min is lowered when needed so that
/// no term of the product is dropped.
inline Series pt_from_j(const JTable &j, SignMode mode, const Window &window, unsigned threads = 1) {
  window.validate();
  const auto &m = *j.monoid;
  const auto terms = detail::wall_terms(j, mode);

  std::int64_t floor = std::min<std::int64_t>(window.q_min, 0);
  for (const auto &t : terms) {
    const auto d = m.degree(t.beta);
    if (d <= window.degree_max && t.q < 0) floor += t.q * (window.degree_max / d);
  }
  const Window wide(window.degree_max, floor, window.q_max);

  FactorSource src;
  src.exhausted = [count = terms.size()](std::size_t k, const Window &) { return k >= count; };
  src.factor = [&terms, monoid = j.monoid](std::size_t k, const Window &req) {
    const auto &t = terms[k];
    const auto d = monoid->degree(t.beta);
    const auto top = std::max<std::int64_t>(req.q_max, 0);
    if (d > req.degree_max) return Series::one(monoid, Window(req.degree_max, 0, top));
    // The exponent is a single known monomial, so its window can be made tall
    // enough that exp() certifies the factor up to `top`.
    const auto neg = std::min<std::int64_t>(t.q, 0);
    const Window arg(req.degree_max, neg, top - (req.degree_max - 1) * neg);
    if (t.q > arg.q_max) return Series::one(monoid, Window(req.degree_max, 0, top));
    return exp(Series::make(monoid, arg, {{t.beta, t.q, t.value}}));
  };
  Series product = truncated_product(j.monoid, src, wide, threads);

  std::int64_t lowest = window.q_min;
  for (const auto &[k, v] : product.terms()) lowest = std::min(lowest, k.q);
  return restrict_to(product, Window(window.degree_max, lowest, window.q_max));
}

inline void require_degree_one(const ClassMonoid &m, const CurveClass &beta) {
  m.check_rank(beta);
  if (!m.is_effective(beta) || m.degree(beta) != 1)
    throw NotIrreducible("class " + key_string(beta, 0) +
                         " is not a degree-1 generator of the declared monoid");
}

/// Linear form for an irreducible class:
///   P_{n,beta}  = sum_{r>=0} s (n+2r) J(r, beta, r+n),   n >= 0
///   P_{-n,beta} = sum_{r>0}  s (n+2r) J(r, beta, r+n),   n > 0
inline Coefficient pt_irreducible_from_j(const JTable &j, const CurveClass &beta, std::int64_t n,
                                         SignMode mode) {
  require_degree_one(*j.monoid, beta);
  const auto k = n >= 0 ? n : -n;
  const std::int64_t r_first = n >= 0 ? 0 : 1;
  Coefficient sum = 0;
  for (const auto &[key, v] : j.entries) {
    const auto &[r, b, m] = key;
    if (b != beta || r < r_first || m != r + k) continue;
    sum += v * (k + 2 * r);
  }
  return sum * wall_sign(k, mode);
}

/// J(0, beta, n) = s^-1 (P_{n,beta} - P_{-n,beta}) / n, from the difference of
/// the two lines of the irreducible-class formula.
inline Coefficient extract_j0(const Series &pt, const CurveClass &beta, std::int64_t n, SignMode mode) {
  if (n <= 0) throw DomainError("extract_j0 needs n > 0, got " + std::to_string(n));
  require_degree_one(*pt.monoid(), beta);
  Coefficient plus, minus;
  try {
    plus = pt.coefficient(beta, n);
    minus = pt.coefficient(beta, -n);
  } catch (const WindowViolation &e) {
    throw InsufficientWindow(std::string("extract_j0: ") + e.what());
  }
  return (plus - minus) / (n * wall_sign(n, mode));
}

/// Linear system relating P_{+-n,beta} (0 <= n <= n_max) to the unknowns
/// J(r, beta, r+n), 0 <= r <= r_max, for an irreducible beta.
///
/// Only the r = 0 slice is forced by the data; with r_max >= 2 the system is
/// underdetermined and `particular` is just one solution (free unknowns set to
/// zero). Treat it as a utility, not as canonical invariants.
struct JInversion {
  JTable particular;
  std::size_t unknowns = 0;
  std::size_t rank = 0;
  bool unique = false;
  bool consistent = true;
};

inline JInversion invert_irreducible(const Series &pt, const CurveClass &beta, std::int64_t r_max,
                                     std::int64_t n_max, SignMode mode) {
  require_degree_one(*pt.monoid(), beta);
  if (r_max < 0 || n_max < 0) throw DomainError("r_max and n_max must be >= 0");

  std::vector<std::pair<std::int64_t, std::int64_t>> cols; // (r, n)
  for (std::int64_t r = 0; r <= r_max; ++r)
    for (std::int64_t n = 0; n <= n_max; ++n)
      if (n + 2 * r != 0) cols.emplace_back(r, n);

  std::vector<std::vector<Coefficient>> rows;
  auto coeff = [&](std::int64_t q) {
    try {
      return pt.coefficient(beta, q);
    } catch (const WindowViolation &e) {
      throw InsufficientWindow(std::string("invert_irreducible: ") + e.what());
    }
  };
  for (std::int64_t n = 0; n <= n_max; ++n) {
    for (int side = 0; side < (n > 0 ? 2 : 1); ++side) {
      std::vector<Coefficient> row(cols.size() + 1, 0);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto [r, k] = cols[c];
        if (k == n && (side == 0 || r > 0)) row[c] = wall_sign(n, mode) * (n + 2 * r);
      }
      row.back() = coeff(side == 0 ? n : -n);
      rows.push_back(std::move(row));
    }
  }

  // Reduced row echelon form over Q.
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols.size() && rank < rows.size(); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    const Coefficient lead = rows[rank][c];
    for (auto &x : rows[rank]) x /= lead;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank || rows[i][c] == 0) continue;
      const Coefficient f = rows[i][c];
      for (std::size_t k = 0; k < rows[i].size(); ++k) rows[i][k] -= f * rows[rank][k];
    }
    pivot_col.push_back(c);
    ++rank;
  }

  JInversion out{JTable{pt.monoid(), {}}, cols.size(), rank, rank == cols.size(), true};
  for (std::size_t i = rank; i < rows.size(); ++i)
    if (rows[i].back() != 0) out.consistent = false;
  for (std::size_t i = 0; i < rank; ++i) {
    const auto [r, n] = cols[pivot_col[i]];
    if (rows[i].back() != 0) out.particular.add(r, beta, r + n, rows[i].back());
  }
  return out;
}

} // namespace k3pt
