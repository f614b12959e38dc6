// Per-instruction outcome shared by both engines.

#ifndef ARMSIM_STEP_HPP
#define ARMSIM_STEP_HPP

#include <string>
#include <string_view>

#include "armsim/state.hpp"

namespace armsim {

enum class StepKind : std::uint8_t { ok, unpredictable, not_implemented, undefined };

std::string_view step_kind_name(StepKind k);

struct StepOutcome {
  StepKind kind = StepKind::ok;
  std::string message;
  Word32 pc = 0;    // address of the instruction
  Word32 word = 0;  // the fetched word, when the fetch succeeded

  bool ok() const { return kind == StepKind::ok; }
};

inline StepKind step_kind(FaultKind k) {
  return k == FaultKind::unpredictable ? StepKind::unpredictable : StepKind::not_implemented;
}

/// Addresses [begin, end) that may be fetched from. Fetching elsewhere is
/// an undefined instruction.
struct FetchWindow {
  Word32 begin = 0;
  Word32 end = 0;
  bool contains(Word32 addr) const { return addr >= begin && addr < end && end - addr >= 4; }
};

}  // namespace armsim

#endif  // ARMSIM_STEP_HPP
