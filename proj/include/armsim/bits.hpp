// Bit-level primitives on 32-bit words.
//
// All arithmetic is modulo 2^32. Bit 0 is the least significant bit.

#ifndef ARMSIM_BITS_HPP
#define ARMSIM_BITS_HPP

#include <cassert>
#include <cstdint>

namespace armsim {

using Word32 = std::uint32_t;

constexpr bool get_bit(Word32 w, unsigned i) {
  assert(i <= 31 && "bit index out of range");
  return ((w >> i) & 1u) != 0;
}

/// Mask with bits hi..lo set.
constexpr Word32 bit_mask(unsigned hi, unsigned lo) {
  assert(lo <= hi && hi <= 31);
  const unsigned width = hi - lo + 1;
  const Word32 ones = width == 32 ? 0xFFFFFFFFu : ((Word32{1} << width) - 1);
  return ones << lo;
}

/// Bits hi..lo of w, shifted down to bit 0.
constexpr Word32 get_bit_range(Word32 w, unsigned hi, unsigned lo) {
  return (w & bit_mask(hi, lo)) >> lo;
}

/// Replaces bits hi..lo of w with the low (hi-lo+1) bits of v.
constexpr Word32 set_bit_range(Word32 w, unsigned hi, unsigned lo, Word32 v) {
  const Word32 mask = bit_mask(hi, lo);
  return (w & ~mask) | ((v << lo) & mask);
}

// Flag arithmetic for a + b + c where c is a carry-in bit. Computed with
// 32-bit wrap-around tests only; the 64-bit formulation lives in the tests.

constexpr bool carry_from_add3(Word32 a, Word32 b, bool c) {
  const Word32 partial = a + b;
  const Word32 sum = partial + (c ? 1u : 0u);
  return partial < a || sum < partial;
}

constexpr bool overflow_from_add3(Word32 a, Word32 b, bool c) {
  const Word32 sum = a + b + (c ? 1u : 0u);
  return (((a ^ sum) & (b ^ sum)) >> 31) != 0;
}

constexpr Word32 rotate_right(Word32 v, unsigned amount) {
  amount &= 31;
  return amount == 0 ? v : (v >> amount) | (v << (32 - amount));
}

/// Sign-extends the low `bits` bits of v (1 <= bits <= 32).
constexpr Word32 sign_extend(Word32 v, unsigned bits) {
  assert(bits >= 1 && bits <= 32);
  if (bits == 32) return v;
  const Word32 sign = Word32{1} << (bits - 1);
  const Word32 low = v & ((Word32{1} << bits) - 1);
  return (low ^ sign) - sign;
}

}  // namespace armsim

#endif  // ARMSIM_BITS_HPP
