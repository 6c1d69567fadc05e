#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

#include "series_json.hpp"

namespace k3pt {

/// Noether-Lefschetz numbers NL_{h,gamma}, indexed by h and a named class.
struct NLTable {
  MonoidPtr monoid;
  std::int64_t h_min = 0;
  std::int64_t h_max = 0;
  std::map<std::string, CurveClass> classes;
  std::map<std::pair<std::int64_t, std::string>, Coefficient> entries;
  /// Free-text note on how the supplier counted non-transverse intersections.
  std::optional<std::string> convention;

  void add_class(const std::string &id, CurveClass cls) {
    monoid->check_rank(cls);
    if (!monoid->is_effective(cls)) throw EffectivityError("NL class '" + id + "' is not effective");
    if (!classes.emplace(id, std::move(cls)).second)
      throw DuplicateKey("duplicate NL class id '" + id + "'");
  }

  void add(std::int64_t h, const std::string &id, Coefficient value) {
    if (h < h_min || h > h_max)
      throw DomainError("NL entry h=" + std::to_string(h) + " outside h_range [" +
                        std::to_string(h_min) + ", " + std::to_string(h_max) + "]");
    if (!classes.contains(id)) throw DomainError("NL entry refers to unknown class '" + id + "'");
    if (!entries.emplace(std::make_pair(h, id), std::move(value)).second)
      throw DuplicateKey("duplicate NL entry (h, class)=(" + std::to_string(h) + ", " + id + ")");
  }

  friend bool operator==(const NLTable &a, const NLTable &b) {
    return same_monoid(a.monoid, b.monoid) && a.h_min == b.h_min && a.h_max == b.h_max &&
           a.classes == b.classes && a.entries == b.entries && a.convention == b.convention;
  }
};

/// Generalized DT invariants J(r, beta, n) of fiber-supported sheaves.
struct JTable {
  MonoidPtr monoid;
  std::map<std::tuple<std::int64_t, CurveClass, std::int64_t>, Coefficient> entries;

  void add(std::int64_t r, CurveClass beta, std::int64_t n, Coefficient value) {
    if (r < 0) throw DomainError("J entry has r=" + std::to_string(r) + " < 0");
    monoid->check_rank(beta);
    if (!monoid->is_effective(beta))
      throw EffectivityError("J entry class " + key_string(beta, n) + " is not effective");
    if (detail::is_zero_class(beta))
      throw EffectivityError("J entry (r=" + std::to_string(r) + ", n=" + std::to_string(n) +
                             ") has beta = 0; only beta > 0 enters the product");
    auto key = std::make_tuple(r, beta, n);
    if (!entries.emplace(std::move(key), std::move(value)).second)
      throw DuplicateKey("duplicate J entry (r=" + std::to_string(r) + ", " + key_string(beta, n) + ")");
  }

  [[nodiscard]] Coefficient get(std::int64_t r, const CurveClass &beta, std::int64_t n) const {
    auto it = entries.find(std::make_tuple(r, beta, n));
    return it == entries.end() ? Coefficient(0) : it->second;
  }

  friend bool operator==(const JTable &a, const JTable &b) {
    return same_monoid(a.monoid, b.monoid) && a.entries == b.entries;
  }
};

/// Supplied per-(n,h) fiber quantities: reduced-class Chern integrals or
/// perverse Euler characteristics. Missing entries inside `coverage` are zero;
/// outside it they are unknown.
struct FiberIntegralTable {
  struct Coverage {
    std::int64_t h_min, h_max, n_min, n_max;
    friend bool operator==(const Coverage &, const Coverage &) = default;
  };

  std::map<std::pair<std::int64_t, std::int64_t>, Coefficient> entries; // keyed (h, n)
  std::optional<Coverage> declared;

  void add(std::int64_t n, std::int64_t h, Coefficient value) {
    if (!entries.emplace(std::make_pair(h, n), std::move(value)).second)
      throw DuplicateKey("duplicate fiber entry (n,h)=(" + std::to_string(n) + "," + std::to_string(h) + ")");
  }

  /// Declared coverage, or the bounding box of the entries.
  [[nodiscard]] std::optional<Coverage> coverage() const {
    if (declared) return declared;
    if (entries.empty()) return std::nullopt;
    Coverage c{entries.begin()->first.first, entries.begin()->first.first,
               entries.begin()->first.second, entries.begin()->first.second};
    for (const auto &[hn, v] : entries) {
      c.h_min = std::min(c.h_min, hn.first);
      c.h_max = std::max(c.h_max, hn.first);
      c.n_min = std::min(c.n_min, hn.second);
      c.n_max = std::max(c.n_max, hn.second);
    }
    return c;
  }

  [[nodiscard]] bool covers(std::int64_t n, std::int64_t h) const {
    auto c = coverage();
    return c && h >= c->h_min && h <= c->h_max && n >= c->n_min && n <= c->n_max;
  }

  [[nodiscard]] Coefficient value(std::int64_t n, std::int64_t h) const {
    if (!covers(n, h))
      throw InsufficientFiberTable("fiber table does not cover (n,h)=(" + std::to_string(n) + "," +
                                   std::to_string(h) + ")");
    auto it = entries.find({h, n});
    return it == entries.end() ? Coefficient(0) : it->second;
  }

  friend bool operator==(const FiberIntegralTable &, const FiberIntegralTable &) = default;
};

namespace detail {

inline void expect_format(const json &j, const std::string &want) {
  const auto got = io::get<std::string>(io::at(j, "format", "$"), "format");
  if (got != want) throw ParseError("unsupported format '" + got + "', expected '" + want + "'");
}

inline json::array_t row(const json &rows, std::size_t i, std::size_t width, const std::string &what) {
  const auto &r = rows[i];
  if (!r.is_array() || r.size() != width)
    throw ParseError("expected " + what + " at entries[" + std::to_string(i) + "]");
  return r.get<json::array_t>();
}

// Library errors raised while filling a table keep their type; anything
// structural is reported as ParseError with the row.
template <class F> void with_row_context(std::size_t i, F &&f) {
  try {
    f();
  } catch (const DomainError &e) {
    throw ParseError(std::string(e.what()) + " at entries[" + std::to_string(i) + "]");
  } catch (const MonoidError &e) {
    throw ParseError(std::string(e.what()) + " at entries[" + std::to_string(i) + "]");
  }
}

} // namespace detail

inline json to_json(const NLTable &t) {
  json classes = json::array();
  for (const auto &[id, c] : t.classes) classes.push_back(json::array({id, c}));
  json entries = json::array();
  for (const auto &[k, v] : t.entries) entries.push_back(json::array({k.first, k.second, to_string(v)}));
  json out{{"format", "k3pt.nl/1"},
           {"monoid", to_json(*t.monoid)},
           {"h_range", json::array({t.h_min, t.h_max})},
           {"classes", classes},
           {"entries", entries}};
  if (t.convention) out["convention"] = *t.convention;
  return out;
}

inline NLTable nl_from_json(const json &j) {
  detail::expect_format(j, "k3pt.nl/1");
  NLTable t;
  t.monoid = monoid_from_json(io::at(j, "monoid", "$"));
  const auto range = io::get<std::vector<std::int64_t>>(io::at(j, "h_range", "$"), "h_range");
  if (range.size() != 2 || range[0] > range[1]) throw ParseError("h_range must be [h_min, h_max]");
  t.h_min = range[0];
  t.h_max = range[1];
  if (auto it = j.find("convention"); it != j.end())
    t.convention = io::get<std::string>(*it, "convention");
  const auto &classes = io::array_at(j, "classes", "$");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto path = "classes[" + std::to_string(i) + "]";
    const auto &c = classes[i];
    if (!c.is_array() || c.size() != 2) throw ParseError("expected [id, coords] at " + path);
    t.add_class(io::get<std::string>(c[0], path + "[0]"),
                io::curve_class(c[1], t.monoid->rank(), path + "[1]"));
  }
  const auto &rows = io::array_at(j, "entries", "$");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = detail::row(rows, i, 3, "[h, class_id, value]");
    const auto path = "entries[" + std::to_string(i) + "]";
    detail::with_row_context(i, [&] {
      t.add(io::get<std::int64_t>(r[0], path + "[0]"), io::get<std::string>(r[1], path + "[1]"),
            io::coefficient(r[2], path + "[2]"));
    });
  }
  return t;
}

inline json to_json(const JTable &t) {
  json entries = json::array();
  for (const auto &[k, v] : t.entries)
    entries.push_back(json::array({std::get<0>(k), std::get<1>(k), std::get<2>(k), to_string(v)}));
  return json{{"format", "k3pt.j/1"}, {"monoid", to_json(*t.monoid)}, {"entries", entries}};
}

inline JTable j_from_json(const json &j) {
  detail::expect_format(j, "k3pt.j/1");
  JTable t;
  t.monoid = monoid_from_json(io::at(j, "monoid", "$"));
  const auto &rows = io::array_at(j, "entries", "$");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = detail::row(rows, i, 4, "[r, coords, n, value]");
    const auto path = "entries[" + std::to_string(i) + "]";
    detail::with_row_context(i, [&] {
      t.add(io::get<std::int64_t>(r[0], path + "[0]"),
            io::curve_class(r[1], t.monoid->rank(), path + "[1]"),
            io::get<std::int64_t>(r[2], path + "[2]"), io::coefficient(r[3], path + "[3]"));
    });
  }
  return t;
}

inline json to_json(const FiberIntegralTable &t) {
  json entries = json::array();
  for (const auto &[hn, v] : t.entries) entries.push_back(json::array({hn.second, hn.first, to_string(v)}));
  json out{{"format", "k3pt.fiber/1"}, {"entries", entries}};
  if (t.declared)
    out["coverage"] = json{{"h", json::array({t.declared->h_min, t.declared->h_max})},
                           {"n", json::array({t.declared->n_min, t.declared->n_max})}};
  return out;
}

inline FiberIntegralTable fiber_from_json(const json &j) {
  detail::expect_format(j, "k3pt.fiber/1");
  FiberIntegralTable t;
  if (auto it = j.find("coverage"); it != j.end()) {
    const auto h = io::get<std::vector<std::int64_t>>(io::at(*it, "h", "coverage"), "coverage.h");
    const auto n = io::get<std::vector<std::int64_t>>(io::at(*it, "n", "coverage"), "coverage.n");
    if (h.size() != 2 || n.size() != 2 || h[0] > h[1] || n[0] > n[1])
      throw ParseError("coverage must be {h: [min, max], n: [min, max]}");
    t.declared = FiberIntegralTable::Coverage{h[0], h[1], n[0], n[1]};
  }
  const auto &rows = io::array_at(j, "entries", "$");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = detail::row(rows, i, 3, "[n, h, value]");
    const auto path = "entries[" + std::to_string(i) + "]";
    t.add(io::get<std::int64_t>(r[0], path + "[0]"), io::get<std::int64_t>(r[1], path + "[1]"),
          io::coefficient(r[2], path + "[2]"));
  }
  if (t.declared)
    for (const auto &[hn, v] : t.entries)
      if (!t.covers(hn.second, hn.first))
        throw ParseError("fiber entry (n,h)=(" + std::to_string(hn.second) + "," +
                         std::to_string(hn.first) + ") lies outside the declared coverage");
  return t;
}

inline NLTable load_nl(const std::string &path) { return nl_from_json(io::parse_text(io::read_file(path), path)); }
inline JTable load_j(const std::string &path) { return j_from_json(io::parse_text(io::read_file(path), path)); }
inline FiberIntegralTable load_fiber(const std::string &path) {
  return fiber_from_json(io::parse_text(io::read_file(path), path));
}

inline void save_nl(const NLTable &t, const std::string &path) { io::write_file(path, io::dump(to_json(t))); }
inline void save_j(const JTable &t, const std::string &path) { io::write_file(path, io::dump(to_json(t))); }
inline void save_fiber(const FiberIntegralTable &t, const std::string &path) {
  io::write_file(path, io::dump(to_json(t)));
}

} // namespace k3pt
