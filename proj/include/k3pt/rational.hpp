#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "errors.hpp"

namespace k3pt {

/// Exact rational coefficient. GMP keeps every mpq_class in canonical form
/// (coprime, positive denominator) after each arithmetic operation.
using Coefficient = mpq_class;

/// Renders as "num/den"; the denominator is always written, even when it is 1.
inline std::string to_string(const Coefficient &c) {
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// Accepts "num/den" or a bare integer "num".
inline Coefficient parse_coefficient(std::string_view text) {
  auto bad = [&] { return ParseError("malformed rational \"" + std::string(text) + "\""); };
  if (text.empty()) throw bad();
  auto valid_int = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+') throw bad();
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num, 10), d(den, 10);
  if (d == 0) throw bad();
  Coefficient c(n, d);
  c.canonicalize();
  return c;
}

inline bool is_integer(const Coefficient &c) { return c.get_den() == 1; }

} // namespace k3pt
