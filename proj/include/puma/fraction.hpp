#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace puma {

__extension__ typedef __int128 wide_int;

/// Exact non-negative decimal ratio used for the cut-off parameters.
///
/// Cut-offs are compared by cross multiplication so that boundary cases such
/// as `7 >= 0.7 * 10` are decided exactly instead of through binary floating
/// point.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Parses a plain decimal such as "0.7", "1", "0.005" or ".25".
  static Fraction parse(std::string_view text);
  /// Shortest decimal representation of `value`, then parse().
  static Fraction from_double(double value);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// True iff lhs >= (num/den) * reference.
  bool admits(std::int64_t lhs, std::int64_t reference) const {
    return static_cast<wide_int>(lhs) * den >= static_cast<wide_int>(num) * reference;
  }

  /// Decimal text without trailing zeros ("0.7", "0.05", "1").
  std::string str() const;

  friend bool operator==(const Fraction& a, const Fraction& b) {
    return static_cast<wide_int>(a.num) * b.den == static_cast<wide_int>(b.num) * a.den;
  }
};

}  // namespace puma
