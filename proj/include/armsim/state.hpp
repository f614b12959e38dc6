// Processor state of the reference model and the result types shared by
// both engines.

#ifndef ARMSIM_STATE_HPP
#define ARMSIM_STATE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "armsim/bits.hpp"

namespace armsim {

enum class ProcessorMode : std::uint8_t { usr, fiq, irq, svc, abt, und, sys };

inline constexpr std::array<ProcessorMode, 7> kAllModes = {
    ProcessorMode::usr, ProcessorMode::fiq, ProcessorMode::irq, ProcessorMode::svc,
    ProcessorMode::abt, ProcessorMode::und, ProcessorMode::sys};

/// CPSR[4:0] encoding of a mode.
constexpr Word32 mode_bits(ProcessorMode m) {
  switch (m) {
    case ProcessorMode::usr: return 0b10000;
    case ProcessorMode::fiq: return 0b10001;
    case ProcessorMode::irq: return 0b10010;
    case ProcessorMode::svc: return 0b10011;
    case ProcessorMode::abt: return 0b10111;
    case ProcessorMode::und: return 0b11011;
    case ProcessorMode::sys: return 0b11111;
  }
  return 0;
}

std::optional<ProcessorMode> mode_from_bits(Word32 bits);
std::string_view mode_name(ProcessorMode m);
std::optional<ProcessorMode> mode_from_name(std::string_view name);

/// True for the five exception modes, which own an SPSR.
constexpr bool mode_has_spsr(ProcessorMode m) {
  return m != ProcessorMode::usr && m != ProcessorMode::sys;
}

/// Index 0..4 into per-exception-mode storage (fiq, irq, svc, abt, und).
constexpr unsigned spsr_index(ProcessorMode m) {
  assert(mode_has_spsr(m));
  return static_cast<unsigned>(m) - 1;
}

enum class Condition : std::uint8_t {
  EQ, NE, CS, CC, MI, PL, VS, VC, HI, LS, GE, LT, GT, LE, AL, NV
};

std::string_view condition_name(Condition c);

enum class FlagId : std::uint8_t { N, Z, C, V };

struct Cpsr {
  static constexpr Word32 kModeledMask = 0xF000001Fu;

  bool n = false;
  bool z = false;
  bool c = false;
  bool v = false;
  ProcessorMode mode = ProcessorMode::usr;
  Word32 other = 0;  // every bit outside 31..28 and 4..0

  Word32 pack() const;
  static std::optional<Cpsr> unpack(Word32 w);

  bool flag(FlagId f) const;
  void set_flag(FlagId f, bool value);

  friend bool operator==(const Cpsr&, const Cpsr&) = default;
};

/// ConditionPassed over N, Z, C, V. `cond` must not be NV (0b1111); the
/// caller turns that case into Unpredictable.
bool condition_passed(const Cpsr& cpsr, Condition cond);

/// Physical register storage: the user bank plus the fiq bank (r8-r14) and
/// r13/r14 of irq, svc, abt and und. Slot 15 of `user` holds the address of
/// the current instruction.
struct BankedRegisters {
  std::array<Word32, 16> user{};
  std::array<Word32, 7> fiq{};
  std::array<std::array<Word32, 2>, 4> exception{};  // irq, svc, abt, und

  Word32 physical(ProcessorMode mode, unsigned n) const;
  Word32& physical(ProcessorMode mode, unsigned n);

  friend bool operator==(const BankedRegisters&, const BankedRegisters&) = default;
};

/// True when register n names the same physical register in both modes.
bool registers_shared(ProcessorMode a, ProcessorMode b, unsigned n);

/// Sparse byte-addressed memory; absent bytes read as zero. Only non-zero
/// bytes are stored, so equal contents compare equal. Copying is cheap:
/// the map is shared until written.
class SparseMemory {
 public:
  using Map = std::map<Word32, std::uint8_t>;

  SparseMemory() = default;
  /// Zero entries in `bytes` are dropped.
  explicit SparseMemory(Map bytes);

  std::uint8_t read_byte(Word32 addr) const;
  void write_byte(Word32 addr, std::uint8_t value);
  const Map& bytes() const;
  bool empty() const { return !map_ || map_->empty(); }

  friend bool operator==(const SparseMemory& a, const SparseMemory& b);

 private:
  std::shared_ptr<const Map> map_;
};

struct RefState {
  Cpsr cpsr;
  std::array<Cpsr, 5> spsr{};  // indexed by spsr_index
  BankedRegisters regs;
  SparseMemory mem;

  friend bool operator==(const RefState&, const RefState&) = default;
};

/// Address of the instruction being executed (the raw PC slot).
inline Word32 pc_of(const RefState& st) { return st.regs.user[15]; }

enum class FaultKind : std::uint8_t { unpredictable, not_implemented };

struct Fault {
  FaultKind kind;
  std::string message;
};

std::string_view fault_kind_name(FaultKind k);

/// A value or the fault that prevented computing it.
template <class T>
class Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}
  Outcome(Fault fault) : v_(std::move(fault)) {}

  bool ok() const { return v_.index() == 0; }
  const T& value() const { return std::get<0>(v_); }
  T& value() { return std::get<0>(v_); }
  const Fault& fault() const { return std::get<1>(v_); }

 private:
  std::variant<T, Fault> v_;
};

inline Fault unpredictable(std::string message) {
  return Fault{FaultKind::unpredictable, std::move(message)};
}
inline Fault not_implemented(std::string message) {
  return Fault{FaultKind::not_implemented, std::move(message)};
}

/// Operation-level interpreter state: locals, the PC-increment flag and the
/// processor state.
struct SemState {
  std::map<std::string, Word32, std::less<>> loc;
  bool bo = true;
  RefState st;

  friend bool operator==(const SemState&, const SemState&) = default;
};

/// Ok(SemState) | Unpredictable(message) | NotImplemented(message).
using SemResult = Outcome<SemState>;

enum class MemSize : std::uint8_t { byte = 1, half = 2, word = 4 };

Word32 reg_content(const RefState& st, unsigned n);
RefState set_reg(RefState st, unsigned n, Word32 v);
bool current_mode_has_spsr(const RefState& st);

Outcome<Word32> mem_read(const RefState& st, Word32 addr, MemSize size);
Outcome<RefState> mem_write(RefState st, Word32 addr, MemSize size, Word32 v);

}  // namespace armsim

#endif  // ARMSIM_STATE_HPP
