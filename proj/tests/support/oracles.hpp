#pragma once

// Independent reference computations and random generators shared by the
// unit tests and the acceptance binary. Nothing here calls the series kernel
// except to wrap inputs and read results.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include <k3pt/k3pt.hpp>

namespace oracle {

using k3pt::Coefficient;
using k3pt::CurveClass;
using k3pt::MonoidPtr;
using k3pt::Series;
using k3pt::TermKey;
using k3pt::Window;

using Dense = std::vector<mpz_class>;

// Partition numbers p(0..n) by the coin recurrence.
inline Dense partitions(int n) {
  Dense p(n + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int k = part; k <= n; ++k) p[k] += p[k - part];
  return p;
}

inline Dense dense_mul(const Dense &a, const Dense &b, int n) {
  Dense out(n + 1, 0);
  for (int i = 0; i <= n && i < static_cast<int>(a.size()); ++i)
    for (int j = 0; i + j <= n && j < static_cast<int>(b.size()); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Coefficients of prod (1 - q^n)^-24 up to q^n: the partition series to the
// 24th power.
inline Dense eta_inverse_24(int n) {
  const auto p = partitions(n);
  Dense acc(n + 1, 0);
  acc[0] = 1;
  for (int i = 0; i < 24; ++i) acc = dense_mul(acc, p, n);
  return acc;
}

// y / (1+y)^2 by long division: returns coefficients of y^0..y^n.
inline std::vector<mpz_class> prefactor_long_division(int n) {
  const std::vector<mpz_class> den{1, 2, 1};
  std::vector<mpz_class> num(n + 1, 0), quo(n + 1, 0);
  if (n >= 1) num[1] = 1;
  for (int k = 0; k <= n; ++k) {
    quo[k] = num[k];
    for (int j = 0; j < 3 && k + j <= n; ++j) num[k + j] -= quo[k] * den[j];
  }
  return quo;
}

// Dense expansion of the signed KY generating function: returns c(n,h) for
// 0 <= h <= H and 1-h <= n <= N, keyed (h, n). The y-exponent is stored with
// offset H so that y^-H lives at index 0.
inline std::map<std::pair<int, int>, mpz_class> ky_dense(int H, int N) {
  const int off = H, width = N + 2 * H + 2;
  using Grid = std::vector<std::vector<mpz_class>>; // [h][y + off]
  Grid acc(H + 1, std::vector<mpz_class>(width, 0));
  acc[0][off] = 1;
  auto times = [&](const Grid &f) {
    Grid out(H + 1, std::vector<mpz_class>(width, 0));
    for (int h1 = 0; h1 <= H; ++h1)
      for (int y1 = 0; y1 < width; ++y1) {
        if (acc[h1][y1] == 0) continue;
        for (int h2 = 0; h1 + h2 <= H; ++h2)
          for (int y2 = 0; y2 < width; ++y2) {
            if (f[h2][y2] == 0) continue;
            const int y = y1 + y2 - off;
            if (y < 0 || y >= width) continue;
            out[h1 + h2][y] += acc[h1][y1] * f[h2][y2];
          }
      }
    acc = std::move(out);
  };
  for (int n = 1; n <= H; ++n) {
    Grid a(H + 1, std::vector<mpz_class>(width, 0)), b = a, c = a;
    // (1 - q^n)^-20 = sum C(19+k, k) q^{nk}
    for (int k = 0; n * k <= H; ++k) {
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), 19 + k, k);
      a[n * k][off] = binom;
    }
    // (1 + y^{+-1} q^n)^-2 = sum (-1)^k (k+1) y^{+-k} q^{nk}
    for (int k = 0; n * k <= H; ++k) {
      const mpz_class v = (k % 2 ? -1 : 1) * (k + 1);
      if (off + k < width) b[n * k][off + k] = v;
      c[n * k][off - k] = v;
    }
    times(a);
    times(b);
    times(c);
  }
  Grid pre(H + 1, std::vector<mpz_class>(width, 0));
  for (int m = 1; off + m < width; ++m) pre[0][off + m] = (m % 2 ? 1 : -1) * m;
  times(pre);
  std::map<std::pair<int, int>, mpz_class> out;
  for (int h = 0; h <= H; ++h)
    for (int n = 1 - h; n <= N; ++n) out[{h, n}] = acc[h][n + off];
  return out;
}

// Brute-force product: every pair of stored terms, kept when it lands in `w`.
inline std::map<TermKey, Coefficient> brute_mul(const Series &a, const Series &b, const Window &w) {
  std::map<TermKey, Coefficient> out;
  const auto &m = *a.monoid();
  for (const auto &[ka, va] : a.terms())
    for (const auto &[kb, vb] : b.terms()) {
      CurveClass c(ka.cls.size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = ka.cls[i] + kb.cls[i];
      const auto q = ka.q + kb.q;
      if (m.degree(c) > w.degree_max || q < w.q_min || q > w.q_max) continue;
      out[TermKey{c, q}] += va * vb;
    }
  std::erase_if(out, [](const auto &kv) { return kv.second == 0; });
  return out;
}

// Stored terms of `s` inside `w`.
inline std::map<TermKey, Coefficient> terms_in(const Series &s, const Window &w) {
  std::map<TermKey, Coefficient> out;
  for (const auto &[k, v] : s.terms())
    if (s.degree(k.cls) <= w.degree_max && k.q >= w.q_min && k.q <= w.q_max) out.emplace(k, v);
  return out;
}

// Agreement of two series on the intersection of their windows.
inline bool agree(const Series &a, const Series &b) {
  const auto &x = a.window(), &y = b.window();
  // An empty comparison is treated as a failure.
  if (std::min(x.q_max, y.q_max) < std::max(x.q_min, y.q_min)) return false;
  const auto w = k3pt::intersect(x, y);
  return terms_in(a, w) == terms_in(b, w);
}

// ---------------------------------------------------------------------------
// Random inputs

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  Coefficient rational(int range = 5, int den_max = 4) {
    std::int64_t n = 0;
    while (n == 0) n = uniform(-range, range);
    Coefficient c(static_cast<long>(n), static_cast<unsigned long>(uniform(1, den_max)));
    c.canonicalize();
    return c;
  }

  MonoidPtr monoid(int rank_max = 2, int weight_max = 2) {
    const auto rank = uniform(1, rank_max);
    std::vector<std::string> names;
    std::vector<std::int64_t> weights;
    for (std::int64_t i = 0; i < rank; ++i) {
      names.push_back("g" + std::to_string(i));
      weights.push_back(i == 0 ? 1 : uniform(1, weight_max));
    }
    return std::make_shared<const k3pt::ClassMonoid>(names, weights);
  }

  CurveClass cls(const k3pt::ClassMonoid &m, std::int64_t dmin, std::int64_t dmax) {
    const auto all = m.effective_classes(dmax);
    std::vector<CurveClass> ok;
    for (const auto &c : all)
      if (m.degree(c) >= dmin) ok.push_back(c);
    return ok[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(ok.size()) - 1))];
  }

  // Up to `count` random terms inside `w`; degree-0 terms only when allowed.
  Series series(const MonoidPtr &m, const Window &w, int count, std::int64_t dmin = 0) {
    std::vector<k3pt::Term> terms;
    const auto n = uniform(0, count);
    for (std::int64_t i = 0; i < n; ++i)
      terms.push_back({cls(*m, dmin, w.degree_max), uniform(w.q_min, w.q_max), rational()});
    return Series::make(m, w, terms);
  }

  // 1 + r with r terminating: degree-0 terms of r have q >= 1.
  Series unit(const MonoidPtr &m, const Window &w, int count) {
    std::vector<k3pt::Term> terms{{CurveClass(m->rank(), 0), 0, Coefficient(1)}};
    const auto n = uniform(0, count);
    for (std::int64_t i = 0; i < n; ++i) {
      auto c = cls(*m, 0, w.degree_max);
      const bool zero = m->degree(c) == 0;
      const auto lo = zero ? std::max<std::int64_t>(1, w.q_min) : w.q_min;
      if (lo > w.q_max) continue;
      terms.push_back({std::move(c), uniform(lo, w.q_max), rational()});
    }
    return Series::make(m, w, terms);
  }

  // Random finite J table over `m` with r <= r_max, 0 <= n <= n_max and
  // classes of degree <= d_max.
  k3pt::JTable jtable(const MonoidPtr &m, std::int64_t r_max, std::int64_t n_max, std::int64_t d_max,
                      int count) {
    k3pt::JTable j{m, {}};
    std::set<std::tuple<std::int64_t, CurveClass, std::int64_t>> used;
    const auto n = uniform(1, count);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto r = uniform(0, r_max);
      const auto k = uniform(0, n_max);
      auto beta = cls(*m, 1, d_max);
      if (!used.insert({r, beta, r + k}).second) continue;
      j.add(r, beta, r + k, rational(4, 3));
    }
    return j;
  }
};

// ---------------------------------------------------------------------------
// Dense two-variable arithmetic for the single-exceptional conifold oracle:
// power series in x = t^e and q, indices [k][q].

using Grid2 = std::vector<std::vector<mpq_class>>;

inline Grid2 grid(int K, int Q) { return Grid2(K + 1, std::vector<mpq_class>(Q + 1, 0)); }

inline Grid2 grid_mul(const Grid2 &a, const Grid2 &b) {
  const int K = static_cast<int>(a.size()) - 1, Q = static_cast<int>(a[0].size()) - 1;
  auto out = grid(K, Q);
  for (int k1 = 0; k1 <= K; ++k1)
    for (int q1 = 0; q1 <= Q; ++q1) {
      if (a[k1][q1] == 0) continue;
      for (int k2 = 0; k1 + k2 <= K; ++k2)
        for (int q2 = 0; q1 + q2 <= Q; ++q2) out[k1 + k2][q1 + q2] += a[k1][q1] * b[k2][q2];
    }
  return out;
}

// prod_{n>=1} (1 - (-q)^n x)^n up to x^K q^Q.
inline Grid2 pth_dense(int K, int Q) {
  auto acc = grid(K, Q);
  acc[0][0] = 1;
  for (int n = 1; n <= Q; ++n) {
    // (1 - (-1)^n q^n x)^n
    auto f = grid(K, Q);
    mpz_class binom = 1;
    for (int j = 0; j <= n && j <= K && n * j <= Q; ++j) {
      if (j > 0) binom = binom * (n - j + 1) / j;
      const bool negative = ((j + n * j) % 2) != 0;
      f[j][n * j] = negative ? mpq_class(-binom) : mpq_class(binom);
    }
    acc = grid_mul(acc, f);
  }
  return acc;
}

// Inverse of a dense unit (constant term 1) by recursive solve.
inline Grid2 grid_inverse(const Grid2 &a) {
  const int K = static_cast<int>(a.size()) - 1, Q = static_cast<int>(a[0].size()) - 1;
  auto out = grid(K, Q);
  for (int k = 0; k <= K; ++k)
    for (int q = 0; q <= Q; ++q) {
      mpq_class s = (k == 0 && q == 0) ? 1 : 0;
      for (int k2 = 0; k2 <= k; ++k2)
        for (int q2 = 0; q2 <= q; ++q2) {
          if (k2 == 0 && q2 == 0) continue;
          s -= a[k2][q2] * out[k - k2][q - q2];
        }
      out[k][q] = s;
    }
  return out;
}

} // namespace oracle
