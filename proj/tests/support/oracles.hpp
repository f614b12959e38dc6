// Independent reference computations for tests. Nothing here calls into
// the library's arithmetic helpers.

#ifndef ARMSIM_TESTS_ORACLES_HPP
#define ARMSIM_TESTS_ORACLES_HPP

#include <cstdint>

namespace oracle {

inline bool carry3(std::uint32_t a, std::uint32_t b, bool c) {
  const std::uint64_t sum = std::uint64_t{a} + b + (c ? 1 : 0);
  return (sum >> 32) != 0;
}

inline bool overflow3(std::uint32_t a, std::uint32_t b, bool c) {
  const std::int64_t sum = std::int64_t{static_cast<std::int32_t>(a)} +
                           static_cast<std::int32_t>(b) + (c ? 1 : 0);
  return sum < INT32_MIN || sum > INT32_MAX;
}

/// a - b - (1 - c) as ARM computes borrow: carry set when no borrow occurred.
inline bool sub_carry(std::uint32_t a, std::uint32_t b, bool c) {
  const std::int64_t diff = std::int64_t{a} - std::int64_t{b} - (c ? 0 : 1);
  return diff >= 0;
}

inline bool sub_overflow(std::uint32_t a, std::uint32_t b, bool c) {
  const std::int64_t diff = std::int64_t{static_cast<std::int32_t>(a)} -
                            static_cast<std::int32_t>(b) - (c ? 0 : 1);
  return diff < INT32_MIN || diff > INT32_MAX;
}

/// One row per condition code 0..14, written out from the flag table.
inline bool condition(unsigned cond, bool n, bool z, bool c, bool v) {
  switch (cond) {
    case 0x0: return z;
    case 0x1: return !z;
    case 0x2: return c;
    case 0x3: return !c;
    case 0x4: return n;
    case 0x5: return !n;
    case 0x6: return v;
    case 0x7: return !v;
    case 0x8: return c && !z;
    case 0x9: return !c || z;
    case 0xA: return n == v;
    case 0xB: return n != v;
    case 0xC: return !z && n == v;
    case 0xD: return z || n != v;
    case 0xE: return true;
  }
  return false;
}

struct Shifted {
  std::uint32_t value;
  bool carry;
};

/// Shift of a 32-bit value by `amount` (any size) computed in a 64-bit
/// (or 128-bit for LSL) window. type: 0 LSL, 1 LSR, 2 ASR, 3 ROR.
/// amount 0 leaves value and carry alone. ROR by a multiple of 32 keeps
/// the value and takes bit 31 as carry.
inline Shifted widened_shift(unsigned type, std::uint32_t rm, unsigned amount, bool c) {
  if (amount == 0) return {rm, c};
  switch (type) {
    case 0: {
      if (amount > 64) return {0, false};
      const unsigned __int128 wide = static_cast<unsigned __int128>(rm) << amount;
      return {static_cast<std::uint32_t>(wide), ((wide >> 32) & 1) != 0};
    }
    case 1: {
      if (amount > 33) return {0, false};
      // append a guard bit below the value
      const std::uint64_t wide = std::uint64_t{rm} << 1;
      const std::uint64_t shifted = wide >> amount;
      return {static_cast<std::uint32_t>(shifted >> 1), (shifted & 1) != 0};
    }
    case 2: {
      const unsigned k = amount > 40 ? 40 : amount;
      const std::int64_t wide = std::int64_t{static_cast<std::int32_t>(rm)} * 2;
      const std::int64_t shifted = wide >> k;
      return {static_cast<std::uint32_t>(shifted >> 1), (shifted & 1) != 0};
    }
    default: {
      const unsigned k = amount % 32;
      const std::uint64_t doubled = (std::uint64_t{rm} << 32) | rm;
      const std::uint32_t value = static_cast<std::uint32_t>(doubled >> k);
      return {value, ((value >> 31) & 1) != 0};
    }
  }
}

}  // namespace oracle

#endif  // ARMSIM_TESTS_ORACLES_HPP
