// Reference engine: a direct interpreter of operation ASTs over RefState.

#ifndef ARMSIM_REFERENCE_HPP
#define ARMSIM_REFERENCE_HPP

#include <map>
#include <string>

#include "armsim/ast.hpp"
#include "armsim/decoder.hpp"
#include "armsim/state.hpp"
#include "armsim/step.hpp"

namespace armsim {

using Args = std::map<std::string, Word32, std::less<>>;

/// OldParam and OldFlag read `entry`; everything else reads `cur`.
/// Parameters and locals live in cur.loc.
Outcome<Word32> eval_exp(const ast::Exp& e, const RefState& entry, const SemState& cur);

SemResult exec_stm(const ast::Stm& s, const RefState& entry, const SemState& cur);

/// Binds `args` (which must cover every parameter), snapshots `st` as the
/// entry state and runs the body. Faults carry the operation's identifier.
SemResult run_operation(const ast::OperationAst& op, const Args& args, const RefState& st);

/// Parameter bindings for a decoded instruction, including the shifter
/// operand computed against `st`.
Args instruction_args(const OperationSpec& spec, const DecodedInstr& instr, const RefState& st);

struct RefStep {
  StepOutcome outcome;
  RefState state;  // unchanged unless the outcome is ok
};

/// Fetch, decode and execute one instruction, then advance the PC by 4
/// unless the operation wrote it.
RefStep ref_step(const RefState& st, const Decoder& dec = default_decoder(),
                 const FetchWindow* window = nullptr);

/// Executes an already decoded instruction at the current PC.
RefStep ref_execute(const RefState& st, const DecodedInstr& instr, const Catalog& cat = catalog());

}  // namespace armsim

#endif  // ARMSIM_REFERENCE_HPP
