#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace puma {

using UnitId = std::uint32_t;

/// Ordered adjacent pair (left, right) of unit ids.
struct UnitPair {
  UnitId left = 0;
  UnitId right = 0;

  std::uint64_t key() const { return (static_cast<std::uint64_t>(left) << 32) | right; }
  static UnitPair from_key(std::uint64_t k) {
    return {static_cast<UnitId>(k >> 32), static_cast<UnitId>(k & 0xffffffffu)};
  }
  friend bool operator==(const UnitPair&, const UnitPair&) = default;
};

struct UnitPairHash {
  std::size_t operator()(const UnitPair& p) const noexcept { return std::hash<std::uint64_t>{}(p.key()); }
};

}  // namespace puma
