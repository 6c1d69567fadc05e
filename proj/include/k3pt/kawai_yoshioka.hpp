#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "manifest.hpp"
#include "product.hpp"
#include "series_json.hpp"

namespace k3pt {

/// Signed Euler characteristics c(n,h) = (-1)^(n+2h-1) chi(P_n(S,h)) of stable
/// pair moduli on a K3 surface, the coefficients of y^n q^h in the
/// Kawai-Yoshioka product.
///
/// Covers 0 <= h <= h_max and n <= n_max. Rows start at n = 1-h; anything
/// below is zero by construction.
class KYTable {
public:
  KYTable(std::int64_t h_max, std::int64_t n_max) : h_max_(h_max), n_max_(n_max) {
    if (h_max < 0 || n_max < 1)
      throw DomainError("KY table needs h_max >= 0 and n_max >= 1, got h_max=" +
                        std::to_string(h_max) + " n_max=" + std::to_string(n_max));
  }

  [[nodiscard]] std::int64_t h_max() const noexcept { return h_max_; }
  [[nodiscard]] std::int64_t n_max() const noexcept { return n_max_; }

  /// Rows with h < 0 are known to vanish (the moduli spaces are empty).
  [[nodiscard]] bool covers(std::int64_t n, std::int64_t h) const noexcept {
    return h < 0 || (h <= h_max_ && n <= n_max_);
  }

  /// Signed coefficient c(n,h).
  [[nodiscard]] Coefficient c(std::int64_t n, std::int64_t h) const {
    if (!covers(n, h))
      throw InsufficientFiberTable("KY table (h_max=" + std::to_string(h_max_) + ", n_max=" +
                                   std::to_string(n_max_) + ") does not cover (n,h)=(" +
                                   std::to_string(n) + "," + std::to_string(h) + ")");
    if (h < 0 || n < 1 - h) return 0;
    auto it = entries_.find({h, n});
    return it == entries_.end() ? Coefficient(0) : it->second;
  }

  /// Unsigned Euler characteristic chi(P_n(S,h)) = (-1)^(n-1) c(n,h).
  [[nodiscard]] Coefficient chi(std::int64_t n, std::int64_t h) const {
    return (n - 1) % 2 == 0 ? c(n, h) : Coefficient(-c(n, h));
  }

  /// Entries keyed by (h, n), the on-disk sort order.
  [[nodiscard]] const std::map<std::pair<std::int64_t, std::int64_t>, Coefficient> &
  entries() const noexcept {
    return entries_;
  }

  void set(std::int64_t n, std::int64_t h, Coefficient value) {
    if (h < 0 || !covers(n, h) || n < 1 - h)
      throw DomainError("KY entry (n,h)=(" + std::to_string(n) + "," + std::to_string(h) +
                        ") outside the table range");
    if (!is_integer(value))
      throw DomainError("KY entry (n,h)=(" + std::to_string(n) + "," + std::to_string(h) +
                        ") is not an integer: " + to_string(value));
    entries_[{h, n}] = std::move(value);
  }

  friend bool operator==(const KYTable &, const KYTable &) = default;

private:
  std::int64_t h_max_;
  std::int64_t n_max_;
  std::map<std::pair<std::int64_t, std::int64_t>, Coefficient> entries_;
};

namespace detail {

// y^j q^h is stored as u^(j+h) q^h. The substitution is a ring map, and every
// monomial of the KY expansion has j >= -h, so all exponents of u are >= 0.
inline Series binomial_factor(const MonoidPtr &m, const Window &w, std::int64_t coeff,
                              std::int64_t u_exp, std::int64_t q_exp) {
  std::vector<Term> terms{{CurveClass{0}, 0, Coefficient(1)}};
  if (u_exp <= w.degree_max && q_exp <= w.q_max) terms.push_back({CurveClass{u_exp}, q_exp, coeff});
  return Series::make(m, w, terms);
}

} // namespace detail

/// Expands y/(1+y)^2 * prod_{n>=1} [(1-q^n)^20 (1+y q^n)^2 (1+y^-1 q^n)^2]^-1.
/// The prefactor is the rational form of -(sqrt(-y) - 1/sqrt(-y))^-2.
inline KYTable ky_expand(std::int64_t h_max, std::int64_t n_max, unsigned threads = 1) {
  KYTable table(h_max, n_max);
  auto u = ClassMonoid::single("u");
  const Window w(n_max + h_max, 0, h_max);

  FactorSource src;
  src.exhausted = [](std::size_t k, const Window &req) {
    return static_cast<std::int64_t>(k / 3) + 1 > req.q_max;
  };
  src.factor = [u](std::size_t k, const Window &req) {
    const auto n = static_cast<std::int64_t>(k / 3) + 1;
    switch (k % 3) {
    case 0: return pow_int(detail::binomial_factor(u, req, -1, n, n), -20);
    case 1: return pow_int(detail::binomial_factor(u, req, 1, n + 1, n), -2);
    default: return pow_int(detail::binomial_factor(u, req, 1, n - 1, n), -2);
    }
  };
  const Series product = truncated_product(u, src, w, threads);

  const Series y = Series::make(u, w, {{CurveClass{1}, 0, Coefficient(1)}});
  const Series prefactor = mul(y, pow_int(detail::binomial_factor(u, w, 1, 1, 0), -2));
  const Series full = mul(prefactor, product);
  if (!full.window().covers(w))
    throw InsufficientWindow("KY expansion certified only on " + full.window().str());

  for (std::int64_t h = 0; h <= h_max; ++h)
    for (std::int64_t n = 1 - h; n <= n_max; ++n) table.set(n, h, full.coefficient({n + h}, h));
  return table;
}

/// q^h coefficients, h <= table.h_max(), of (1+y)^2 y^-1 times the KY series
/// evaluated at y = -1. At fixed h the y-support of that product is [-h, h],
/// so the table must reach n = h_max + 1.
inline std::vector<Coefficient> goettsche_from_table(const KYTable &t) {
  if (t.n_max() < t.h_max() + 1)
    throw DomainError("Goettsche check needs n_max >= h_max + 1");
  std::vector<Coefficient> out;
  for (std::int64_t h = 0; h <= t.h_max(); ++h) {
    Coefficient sum = 0;
    for (std::int64_t j = -h; j <= h; ++j) {
      Coefficient v = t.c(j + 1, h) + 2 * t.c(j, h) + t.c(j - 1, h);
      sum += (j % 2 == 0) ? v : Coefficient(-v);
    }
    out.push_back(sum);
  }
  return out;
}

inline std::vector<Coefficient> ky_goettsche_check(std::int64_t h_max) {
  if (h_max < 0) throw DomainError("h_max must be >= 0");
  return goettsche_from_table(ky_expand(h_max, h_max + 1));
}

inline json to_json(const KYTable &t) {
  json entries = json::array();
  for (const auto &[hn, c] : t.entries()) entries.push_back(json::array({hn.second, hn.first, to_string(c)}));
  return json{{"format", "k3pt.ky/1"}, {"hmax", t.h_max()}, {"nmax", t.n_max()}, {"entries", entries}};
}

inline KYTable ky_from_json(const json &j) {
  if (io::get<std::string>(io::at(j, "format", "$"), "format") != "k3pt.ky/1")
    throw ParseError("unsupported KY table format " + io::at(j, "format", "$").dump());
  KYTable t(io::get<std::int64_t>(io::at(j, "hmax", "$"), "hmax"),
            io::get<std::int64_t>(io::at(j, "nmax", "$"), "nmax"));
  const auto &rows = io::array_at(j, "entries", "$");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto path = "entries[" + std::to_string(i) + "]";
    const auto &row = rows[i];
    if (!row.is_array() || row.size() != 3) throw ParseError("expected [n, h, c] at " + path);
    const auto n = io::get<std::int64_t>(row[0], path + "[0]");
    const auto h = io::get<std::int64_t>(row[1], path + "[1]");
    if (t.entries().contains({h, n}))
      throw DuplicateKey("duplicate KY entry (n,h)=(" + std::to_string(n) + "," + std::to_string(h) + ")");
    try {
      t.set(n, h, io::coefficient(row[2], path + "[2]"));
    } catch (const DomainError &e) {
      throw ParseError(std::string(e.what()) + " at " + path);
    }
  }
  return t;
}

/// On-disk cache of expanded tables, keyed by (h_max, n_max). Each file
/// carries the SHA-256 of its table body; a file that fails the check is
/// recomputed and overwritten.
class KYCache {
public:
  explicit KYCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  [[nodiscard]] std::filesystem::path file_for(std::int64_t h_max, std::int64_t n_max) const {
    return dir_ / ("ky-h" + std::to_string(h_max) + "-n" + std::to_string(n_max) + ".json");
  }

  /// Returns the table and whether it came from disk.
  std::pair<KYTable, bool> get(std::int64_t h_max, std::int64_t n_max, unsigned threads = 1) const {
    const auto path = file_for(h_max, n_max);
    if (std::filesystem::exists(path)) {
      try {
        const auto doc = io::parse_text(io::read_file(path.string()), path.string());
        const auto &body = io::at(doc, "table", "$");
        if (io::get<std::string>(io::at(doc, "content_hash", "$"), "content_hash") ==
            sha256_hex(io::dump(body))) {
          auto t = ky_from_json(body);
          if (t.h_max() == h_max && t.n_max() == n_max) return {std::move(t), true};
        }
      } catch (const Error &) {
        // fall through and rebuild
      }
    }
    auto t = ky_expand(h_max, n_max, threads);
    std::filesystem::create_directories(dir_);
    const json body = to_json(t);
    io::write_file(path.string(), io::dump(json{{"content_hash", sha256_hex(io::dump(body))}, {"table", body}}));
    return {std::move(t), false};
  }

private:
  std::filesystem::path dir_;
};

} // namespace k3pt
