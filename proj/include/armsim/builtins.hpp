// Primitive function library callable from pseudocode.

#ifndef ARMSIM_BUILTINS_HPP
#define ARMSIM_BUILTINS_HPP

#include <optional>
#include <span>
#include <string_view>

#include "armsim/state.hpp"

namespace armsim {

enum class Builtin : std::uint8_t {
  condition_passed,        // ConditionPassed(cond)
  current_mode_has_spsr,   // CurrentModeHasSPSR()
  carry_from_add3,         // CarryFrom_add3(a, b, c)
  overflow_from_add3,      // OverflowFrom_add3(a, b, c)
  get_bit,                 // get_bit(w, i)
  bitwise_not,             // NOT(w)
  sign_extend,             // SignExtend(w, bits)
};

struct BuiltinInfo {
  std::string_view name;
  Builtin id;
  unsigned arity;
};

std::span<const BuiltinInfo> builtin_table();
std::optional<BuiltinInfo> find_builtin(std::string_view name);

/// Evaluates a builtin against the status register it may inspect.
/// Out-of-domain arguments (cond = NV, bit index > 31, extension width
/// outside 1..32) yield Unpredictable.
Outcome<Word32> call_builtin(Builtin id, std::span<const Word32> args, const Cpsr& cpsr);

/// Name-based dispatch; unknown names and arity mismatches are parse-time
/// errors and trip an assertion here.
Outcome<Word32> builtin(std::string_view name, std::span<const Word32> args, const Cpsr& cpsr);

/// Statement-level procedures. `Unimplemented()` marks a catalog gap and
/// ends the operation with NotImplemented.
enum class Procedure : std::uint8_t { unimplemented };

struct ProcedureInfo {
  std::string_view name;
  Procedure id;
  unsigned arity;
};

std::optional<ProcedureInfo> find_procedure(std::string_view name);

}  // namespace armsim

#endif  // ARMSIM_BUILTINS_HPP
