#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "series.hpp"

namespace k3pt {

using json = nlohmann::json;

namespace io {

/// Typed accessor that turns nlohmann type errors into ParseError naming the
/// offending key path.
template <class T> T get(const json &j, const std::string &path) {
  try {
    return j.get<T>();
  } catch (const json::exception &) {
    throw ParseError("bad value at " + path + ": " + j.dump());
  }
}

inline const json &at(const json &j, const std::string &key, const std::string &path) {
  if (!j.is_object()) throw ParseError("expected object at " + path);
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing key " + path + "." + key);
  return *it;
}

inline const json &array_at(const json &j, const std::string &key, const std::string &path) {
  const auto &v = at(j, key, path);
  if (!v.is_array()) throw ParseError("expected array at " + path + "." + key);
  return v;
}

inline json parse_text(const std::string &text, const std::string &origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

/// Canonical text form: two-space indent, sorted keys, trailing newline.
inline std::string dump(const json &j) { return j.dump(2) + "\n"; }

inline Coefficient coefficient(const json &j, const std::string &path) {
  if (j.is_number_integer()) return Coefficient(mpz_class(j.dump(), 10));
  if (!j.is_string()) throw ParseError("expected \"num/den\" string at " + path);
  try {
    return parse_coefficient(j.get<std::string>());
  } catch (const ParseError &e) {
    throw ParseError(std::string(e.what()) + " at " + path);
  }
}

inline CurveClass curve_class(const json &j, std::size_t rank, const std::string &path) {
  if (!j.is_array() || j.size() != rank)
    throw ParseError("expected class of " + std::to_string(rank) + " coordinates at " + path);
  CurveClass c;
  for (std::size_t i = 0; i < j.size(); ++i)
    c.push_back(get<std::int64_t>(j[i], path + "[" + std::to_string(i) + "]"));
  return c;
}

} // namespace io

inline json to_json(const ClassMonoid &m) {
  return json{{"generators", m.names()}, {"weights", m.weights()}};
}

inline MonoidPtr monoid_from_json(const json &j, const std::string &path = "monoid") {
  auto names = io::get<std::vector<std::string>>(io::at(j, "generators", path), path + ".generators");
  auto weights = io::get<std::vector<std::int64_t>>(io::at(j, "weights", path), path + ".weights");
  try {
    return std::make_shared<const ClassMonoid>(std::move(names), std::move(weights));
  } catch (const MonoidError &e) {
    throw ParseError(std::string(e.what()) + " at " + path);
  }
}

inline json to_json(const Window &w) {
  return json{{"D", w.degree_max}, {"q_min", w.q_min}, {"q_max", w.q_max}};
}

inline Window window_from_json(const json &j, const std::string &path = "window") {
  Window w;
  w.degree_max = io::get<std::int64_t>(io::at(j, "D", path), path + ".D");
  w.q_min = io::get<std::int64_t>(io::at(j, "q_min", path), path + ".q_min");
  w.q_max = io::get<std::int64_t>(io::at(j, "q_max", path), path + ".q_max");
  try {
    w.validate();
  } catch (const WindowViolation &e) {
    throw ParseError(std::string(e.what()) + " at " + path);
  }
  return w;
}

/// {monoid, window, terms: [[coords...], q, "num/den"]...}; the term map is
/// already ordered by (coords, q).
inline json to_json(const Series &s) {
  json terms = json::array();
  for (const auto &[k, v] : s.terms()) terms.push_back(json::array({k.cls, k.q, to_string(v)}));
  return json{{"monoid", to_json(*s.monoid())}, {"window", to_json(s.window())}, {"terms", terms}};
}

inline Series series_from_json(const json &j) {
  auto monoid = monoid_from_json(io::at(j, "monoid", "$"), "monoid");
  auto window = window_from_json(io::at(j, "window", "$"), "window");
  const auto &rows = io::array_at(j, "terms", "$");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto path = "terms[" + std::to_string(i) + "]";
    const auto &row = rows[i];
    if (!row.is_array() || row.size() != 3) throw ParseError("expected [coords, q, value] at " + path);
    terms.push_back({io::curve_class(row[0], monoid->rank(), path + "[0]"),
                     io::get<std::int64_t>(row[1], path + "[1]"), io::coefficient(row[2], path + "[2]")});
  }
  return Series::make(std::move(monoid), window, terms);
}

inline Series load_series(const std::string &path) {
  return series_from_json(io::parse_text(io::read_file(path), path));
}

} // namespace k3pt
