#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace pamdp {

// Exact rational arithmetic everywhere in the symbolic layer. Probability
// values are used as hash/map keys during lumping, so equality must be exact.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) {
  return r.get_str();
}

// Parses "a/b" or "a". Returns nullopt on malformed input or zero denominator.
inline std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t slash = text.find('/');
  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  std::string num = text.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!is_int(num) || !is_int(den)) return std::nullopt;
  Rational r;
  if (r.set_str(num + "/" + den, 10) != 0) return std::nullopt;
  if (r.get_den() == 0) return std::nullopt;
  r.canonicalize();
  return r;
}

}  // namespace pamdp
