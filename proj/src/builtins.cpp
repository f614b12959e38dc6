#include "armsim/builtins.hpp"

#include <array>
#include <string>

namespace armsim {

namespace {

constexpr std::array<BuiltinInfo, 7> kBuiltins = {{
    {"ConditionPassed", Builtin::condition_passed, 1},
    {"CurrentModeHasSPSR", Builtin::current_mode_has_spsr, 0},
    {"CarryFrom_add3", Builtin::carry_from_add3, 3},
    {"OverflowFrom_add3", Builtin::overflow_from_add3, 3},
    {"get_bit", Builtin::get_bit, 2},
    {"NOT", Builtin::bitwise_not, 1},
    {"SignExtend", Builtin::sign_extend, 2},
}};

constexpr std::array<ProcedureInfo, 1> kProcedures = {{
    {"Unimplemented", Procedure::unimplemented, 0},
}};

}  // namespace

std::span<const BuiltinInfo> builtin_table() { return kBuiltins; }

std::optional<BuiltinInfo> find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

Outcome<Word32> call_builtin(Builtin id, std::span<const Word32> args, const Cpsr& cpsr) {
  switch (id) {
    case Builtin::condition_passed: {
      const Word32 cond = args[0];
      if (cond >= 15) {
        return unpredictable("ConditionPassed: condition field 0b1111 is not a condition");
      }
      return condition_passed(cpsr, static_cast<Condition>(cond)) ? 1u : 0u;
    }
    case Builtin::current_mode_has_spsr:
      return mode_has_spsr(cpsr.mode) ? 1u : 0u;
    case Builtin::carry_from_add3:
      return carry_from_add3(args[0], args[1], args[2] != 0) ? 1u : 0u;
    case Builtin::overflow_from_add3:
      return overflow_from_add3(args[0], args[1], args[2] != 0) ? 1u : 0u;
    case Builtin::get_bit:
      if (args[1] > 31) return unpredictable("get_bit: bit index " + std::to_string(args[1]));
      return get_bit(args[0], args[1]) ? 1u : 0u;
    case Builtin::bitwise_not:
      return ~args[0];
    case Builtin::sign_extend:
      if (args[1] < 1 || args[1] > 32) {
        return unpredictable("SignExtend: width " + std::to_string(args[1]));
      }
      return sign_extend(args[0], args[1]);
  }
  return not_implemented("unknown builtin");
}

Outcome<Word32> builtin(std::string_view name, std::span<const Word32> args, const Cpsr& cpsr) {
  auto info = find_builtin(name);
  assert(info && info->arity == args.size());
  return call_builtin(info->id, args, cpsr);
}

std::optional<ProcedureInfo> find_procedure(std::string_view name) {
  for (const auto& p : kProcedures) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

}  // namespace armsim
