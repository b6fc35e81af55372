#include "puma/fraction.hpp"

#include <charconv>
#include <numeric>
#include <system_error>

#include "puma/error.hpp"

namespace puma {

Fraction Fraction::parse(std::string_view text) {
  const std::string original(text);
  if (text.empty()) throw ParseError("empty decimal");
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) throw ParseError("malformed decimal '" + original + "'");
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw ParseError("malformed decimal '" + original + "'");
    seen_digit = true;
    if (num > (INT64_MAX - 9) / 10 || (seen_point && den > INT64_MAX / 10)) {
      throw ParseError("decimal has too many digits: '" + original + "'");
    }
    num = num * 10 + (c - '0');
    if (seen_point) den *= 10;
  }
  if (!seen_digit) throw ParseError("malformed decimal '" + original + "'");
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

Fraction Fraction::from_double(double value) {
  if (!(value >= 0.0)) throw ParseError("cut-off must be a non-negative number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (res.ec != std::errc{}) throw ParseError("cannot represent cut-off value");
  return parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

std::string Fraction::str() const {
  std::string out = std::to_string(num / den);
  std::int64_t rem = num % den;
  if (rem == 0) return out;
  out.push_back('.');
  // den divides some power of ten whenever the value came from parse()
  for (int guard = 0; rem != 0 && guard < 18; ++guard) {
    rem *= 10;
    out.push_back(static_cast<char>('0' + rem / den));
    rem %= den;
  }
  return out;
}

}  // namespace puma
