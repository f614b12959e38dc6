#include <sstream>

#include "armsim/catalog.hpp"

namespace armsim {

using namespace shifter;

std::string_view shift_name(ShiftType t) {
  switch (t) {
    case ShiftType::LSL: return "LSL";
    case ShiftType::LSR: return "LSR";
    case ShiftType::ASR: return "ASR";
    case ShiftType::ROR: return "ROR";
  }
  return "?";
}

std::string describe_shifter(const ShifterDescriptor& d) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Immediate>) {
          os << "#0x" << std::hex << rotate_right(s.immed_8, 2 * s.rotate_imm);
        } else if constexpr (std::is_same_v<T, Register>) {
          os << "r" << s.m;
        } else if constexpr (std::is_same_v<T, ShiftImm>) {
          unsigned amount = s.amount;
          if (amount == 0) amount = 32;
          os << "r" << s.m << ", " << shift_name(s.shift) << " #" << amount;
        } else if constexpr (std::is_same_v<T, ShiftReg>) {
          os << "r" << s.m << ", " << shift_name(s.shift) << " r" << s.s;
        } else {
          os << "r" << s.m << ", RRX";
        }
      },
      d);
  return os.str();
}

namespace {

Word32 asr(Word32 v, unsigned k) {
  return static_cast<Word32>(static_cast<std::int32_t>(v) >> k);
}

ShifterResult by_register(ShiftType t, Word32 rm, unsigned s, bool c) {
  if (s == 0) return {rm, c};
  switch (t) {
    case ShiftType::LSL:
      if (s < 32) return {rm << s, get_bit(rm, 32 - s)};
      if (s == 32) return {0, get_bit(rm, 0)};
      return {0, false};
    case ShiftType::LSR:
      if (s < 32) return {rm >> s, get_bit(rm, s - 1)};
      if (s == 32) return {0, get_bit(rm, 31)};
      return {0, false};
    case ShiftType::ASR:
      if (s < 32) return {asr(rm, s), get_bit(rm, s - 1)};
      return get_bit(rm, 31) ? ShifterResult{0xFFFFFFFFu, true} : ShifterResult{0, false};
    case ShiftType::ROR: {
      const unsigned k = s & 31;
      if (k == 0) return {rm, get_bit(rm, 31)};
      return {rotate_right(rm, k), get_bit(rm, k - 1)};
    }
  }
  return {rm, c};
}

}  // namespace

ShifterResult shifter_rules(const ShifterDescriptor& d, Word32 rm, Word32 rs, bool c) {
  return std::visit(
      [&](const auto& s) -> ShifterResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Immediate>) {
          const Word32 v = rotate_right(s.immed_8, 2 * s.rotate_imm);
          return {v, s.rotate_imm == 0 ? c : get_bit(v, 31)};
        } else if constexpr (std::is_same_v<T, Register>) {
          return {rm, c};
        } else if constexpr (std::is_same_v<T, ShiftImm>) {
          if (s.amount == 0) {
            if (s.shift == ShiftType::LSL) return {rm, c};
            if (s.shift == ShiftType::ROR) return shifter_rules(Rrx{s.m}, rm, rs, c);
            return by_register(s.shift, rm, 32, c);
          }
          return by_register(s.shift, rm, s.amount, c);
        } else if constexpr (std::is_same_v<T, ShiftReg>) {
          return by_register(s.shift, rm, rs & 0xFF, c);
        } else {
          return {(static_cast<Word32>(c) << 31) | (rm >> 1), get_bit(rm, 0)};
        }
      },
      d);
}

ShifterResult compute_shifter_operand(const ShifterDescriptor& d, const RefState& st) {
  return std::visit(
      [&](const auto& s) -> ShifterResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Immediate>) {
          return shifter_rules(d, 0, 0, st.cpsr.c);
        } else if constexpr (std::is_same_v<T, ShiftReg>) {
          return shifter_rules(d, reg_content(st, s.m), reg_content(st, s.s), st.cpsr.c);
        } else {
          return shifter_rules(d, reg_content(st, s.m), 0, st.cpsr.c);
        }
      },
      d);
}

}  // namespace armsim
