// Differential checks between the reference and fast engines: random
// projective-related states, per-instruction verdicts, shrinking and
// seedless reproducers.

#ifndef ARMSIM_HARNESS_HPP
#define ARMSIM_HARNESS_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "armsim/fast.hpp"
#include "armsim/reference.hpp"

namespace armsim {

/// Operand values the generator favours.
inline constexpr std::array<Word32, 5> kCornerValues = {0, 1, 0x7FFFFFFFu, 0x80000000u, 0xFFFFFFFFu};

struct HarnessConfig {
  std::shared_ptr<const LoweredCatalog> lowered = default_lowered_catalog();
};

/// Random generator for one seed; identical seeds give identical streams.
class CaseRng {
 public:
  explicit CaseRng(std::uint64_t seed);
  Word32 word() { return static_cast<Word32>(rng_()); }
  unsigned below(unsigned n) { return static_cast<unsigned>(rng_() % n); }
  bool chance(unsigned percent) { return below(100) < percent; }
  /// A corner value 30% of the time, otherwise uniform.
  Word32 operand();

 private:
  std::mt19937_64 rng_;
};

/// A pair related by projection: the fast processor is built first and the
/// reference state is its projection.
std::pair<RefState, FastProcessor> random_state(std::uint64_t seed, const HarnessConfig& cfg = {});

/// A random word that decodes to operation `opcode`.
Word32 random_word_for(std::size_t opcode, CaseRng& rng, const Catalog& cat = catalog());

/// Initial state plus the instruction placed at its PC.
struct Case {
  RefState state;
  Word32 word = 0;
};

Case random_case(Word32 word, std::uint64_t seed, const HarnessConfig& cfg = {});

/// Names of the state components that differ, e.g. "r3", "r13_svc",
/// "C_flag", "mode", "spsr_irq", "pc", "mem[0x100]".
std::vector<std::string> diff_states(const RefState& a, const RefState& b);

std::string physical_register_name(ProcessorMode mode, unsigned n);

struct Verdict {
  enum class Kind { pass, mismatch, outcome_disagree };

  Kind kind = Kind::pass;
  Word32 word = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> components;
  StepOutcome ref_outcome;
  StepOutcome fast_outcome;
  Case input;

  bool pass() const { return kind == Kind::pass; }
  std::string describe() const;
};

std::string_view verdict_kind_name(Verdict::Kind k);

/// Runs both engines on one case and compares.
Verdict check_case(const Case& c, const HarnessConfig& cfg = {});

Verdict check_commutes(Word32 word, std::uint64_t seed, const HarnessConfig& cfg = {});
Verdict check_commutes(const DecodedInstr& instr, std::uint64_t seed, const HarnessConfig& cfg = {});

/// Components an instruction may write in `mode`, derived from its
/// pseudocode with the encoding fields substituted. "pc" is always present;
/// "*reg" and "*mem" stand for any register or byte.
std::set<std::string> footprint(const DecodedInstr& instr, const RefState& st, const Catalog& cat = catalog());

/// Fast-engine frame check: nothing outside the footprint changes.
Verdict check_frame(Word32 word, std::uint64_t seed, const HarnessConfig& cfg = {});
Verdict check_frame(const DecodedInstr& instr, std::uint64_t seed, const HarnessConfig& cfg = {});

/// Condition evaluation in the fast engine changes nothing and agrees with
/// the reference engine. `cond` is 0..14.
Verdict check_condition_purity_and_agreement(unsigned cond, std::uint64_t seed, const HarnessConfig& cfg = {});

/// Same for a random read-only pseudocode expression.
Verdict check_expression_purity(std::uint64_t seed, const HarnessConfig& cfg = {});

/// A random side-effect-free expression over registers, flags, status
/// registers, memory and the builtins.
ast::Exp random_expression(CaseRng& rng, int depth);

/// Greedily simplifies a failing case while it keeps failing. Passing cases
/// come back unchanged.
Case shrink(const Case& failing, const HarnessConfig& cfg = {});

std::string write_reproducer(const Case& c, const Catalog& cat = catalog());
/// Throws std::runtime_error on malformed input.
Case read_reproducer(std::string_view text);

struct SuiteOptions {
  std::size_t cases_per_op = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  std::vector<std::size_t> opcodes;  // empty: every operation
  std::size_t keep_failures = 16;
  enum class Check { commutes, frame } check = Check::commutes;
};

struct SuiteReport {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::vector<std::size_t> failures_by_op;
  std::vector<std::size_t> unpredictable_by_op;  // agreed non-ok outcomes
  std::vector<Verdict> examples;                 // first failures, by case index
  std::chrono::nanoseconds wall{0};
};

/// Seed for case `index` of operation `opcode`.
std::uint64_t case_seed(std::uint64_t base, std::size_t opcode, std::size_t index);

SuiteReport run_suite(const SuiteOptions& opts, const HarnessConfig& cfg = {});

}  // namespace armsim

#endif  // ARMSIM_HARNESS_HPP
