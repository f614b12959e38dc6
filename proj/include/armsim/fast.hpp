// Optimized imperative engine: mutable processor with split flag bytes and a
// PC that aliases register 15, operations lowered from the catalog ASTs, and
// a fetch/decode/execute loop over cached basic blocks.

#ifndef ARMSIM_FAST_HPP
#define ARMSIM_FAST_HPP

#include <array>
#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "armsim/ast.hpp"
#include "armsim/decoder.hpp"
#include "armsim/reference.hpp"
#include "armsim/state.hpp"
#include "armsim/step.hpp"

namespace armsim {

/// Test hooks applied while lowering. Off in normal use.
struct LoweringHooks {
  bool invert_adc_carry = false;  // ADC stores NOT(carry) into the C flag
};

class LoweringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Byte memory in 4 KiB pages allocated on first write; absent pages read 0.
class PagedMemory {
 public:
  static constexpr unsigned kPageBits = 12;
  static constexpr Word32 kPageSize = Word32{1} << kPageBits;

  PagedMemory();
  PagedMemory(const PagedMemory& other);
  PagedMemory& operator=(const PagedMemory& other);
  PagedMemory(PagedMemory&&) noexcept = default;
  PagedMemory& operator=(PagedMemory&&) noexcept = default;
  ~PagedMemory();

  std::uint8_t read8(Word32 addr) const {
    const std::uint8_t* p = page(addr);
    return p ? p[addr & (kPageSize - 1)] : 0;
  }
  /// `addr` must be 4-aligned.
  Word32 read32(Word32 addr) const {
    const std::uint8_t* p = page(addr);
    if (!p) return 0;
    p += addr & (kPageSize - 1);
    return Word32{p[0]} | Word32{p[1]} << 8 | Word32{p[2]} << 16 | Word32{p[3]} << 24;
  }
  /// `addr` must be aligned to `size`.
  Word32 read(Word32 addr, MemSize size) const;
  /// Returns true if the written page holds cached code.
  bool write(Word32 addr, MemSize size, Word32 v);
  bool write8(Word32 addr, std::uint8_t v);

  void mark_code(Word32 addr);
  void clear_code_marks();

  std::size_t page_count() const { return pages_; }
  SparseMemory to_sparse() const;
  void assign(const SparseMemory& mem);

 private:
  struct Page;
  struct Directory;

  const std::uint8_t* page(Word32 addr) const;
  Page& touch(Word32 addr);

  std::array<std::unique_ptr<Directory>, 1024> dirs_;
  std::size_t pages_ = 0;
};

struct Program;

/// A catalog operation lowered to the engine's executable form.
class ExecutableOp {
 public:
  ExecutableOp() = default;

  std::size_t opcode() const;
  const std::string& ident() const;
  /// False when the operation can neither write the PC nor memory, so the
  /// next instruction is always at +4.
  bool may_branch() const;
  /// Parameter names in slot order.
  const std::vector<std::string>& params() const;
  std::size_t node_count() const;

  const Program& program() const { return *prog_; }

 private:
  friend ExecutableOp lower_operation(const ast::OperationAst&, std::size_t, const LoweringHooks&,
                                      const Args*);
  std::shared_ptr<const Program> prog_;
};

/// Lowers `op`. Parameters present in `known` are treated as constants and
/// folded; the rest are read from the argument slots at run time.
ExecutableOp lower_operation(const ast::OperationAst& op, std::size_t opcode = 0,
                             const LoweringHooks& hooks = {}, const Args* known = nullptr);

class FastProcessor;

/// A standalone lowered expression, evaluated against a fast processor.
class FastExpression {
 public:
  FastExpression(const ast::Exp& e, const std::vector<ast::Param>& params);
  Outcome<Word32> evaluate(FastProcessor& proc, const Args& args) const;

 private:
  ExecutableOp op_;
};

/// All catalog operations lowered once, plus the decoder used for fetches.
class LoweredCatalog {
 public:
  explicit LoweredCatalog(const Decoder& dec = default_decoder(), LoweringHooks hooks = {});

  const Decoder& decoder() const { return *dec_; }
  const Catalog& catalog() const { return dec_->catalog(); }
  const LoweringHooks& hooks() const { return hooks_; }
  const ExecutableOp& generic(std::size_t opcode) const { return generic_.at(opcode); }
  /// The operation with every encoding field folded in.
  ExecutableOp specialize(const DecodedInstr& instr) const;

 private:
  const Decoder* dec_;
  LoweringHooks hooks_;
  std::vector<ExecutableOp> generic_;
};

std::shared_ptr<const LoweredCatalog> default_lowered_catalog();

struct RunOptions {
  std::uint64_t max_steps = 0;
  bool basic_blocks = true;
  bool halt_on_self_branch = false;  // stop when `B .` runs twice in a row
};

struct RunReport {
  std::uint64_t steps = 0;
  StepOutcome outcome;  // ok when max_steps ran out or the program halted
  bool halted = false;  // the self-branch sentinel fired
  std::chrono::nanoseconds wall{0};

  double mips() const;
};

class FastProcessor {
 public:
  explicit FastProcessor(std::shared_ptr<const LoweredCatalog> lowered = default_lowered_catalog());
  FastProcessor(const FastProcessor& other);
  FastProcessor& operator=(const FastProcessor& other);
  FastProcessor(FastProcessor&&) noexcept;
  FastProcessor& operator=(FastProcessor&&) noexcept;
  ~FastProcessor();

  static FastProcessor from_state(const RefState& st,
                                  std::shared_ptr<const LoweredCatalog> lowered = default_lowered_catalog());

  // -- registers, with r15 reading as the instruction address + 8
  Word32 reg(unsigned n) const { return regs_[n]; }
  /// The PC alias: always equal to reg(15).
  const Word32& pc() const { return regs_[15]; }
  Word32 fetch_address() const { return regs_[15] - 8; }
  void set_fetch_address(Word32 addr) { regs_[15] = addr + 8; }
  /// Writes register d of the current mode; d = 15 is a taken branch.
  void set_reg_or_pc(unsigned d, Word32 v) {
    if (d == 15) {
      regs_[15] = v + 8;
      branched_ = true;
    } else {
      regs_[d] = v;
    }
  }
  bool branch_taken() const { return branched_; }

  /// Register n as seen from `mode`.
  Word32 banked_reg(ProcessorMode mode, unsigned n) const;
  void set_banked_reg(ProcessorMode mode, unsigned n, Word32 v);

  // -- status
  std::uint8_t flag(FlagId f) const { return flags_[static_cast<unsigned>(f)]; }
  void set_flag(FlagId f, bool v) { flags_[static_cast<unsigned>(f)] = v ? 1 : 0; }
  ProcessorMode mode() const { return mode_; }
  Cpsr cpsr() const;
  /// Switches register banks when the mode changes.
  void set_cpsr(const Cpsr& c);
  const Cpsr& spsr(ProcessorMode m) const { return spsr_[spsr_index(m)]; }
  void set_spsr(ProcessorMode m, const Cpsr& c) { spsr_[spsr_index(m)] = c; }

  // -- memory
  const PagedMemory& memory() const { return mem_; }
  void write_memory(Word32 addr, MemSize size, Word32 v);
  void load_bytes(Word32 base, const std::vector<std::uint8_t>& bytes);

  void set_fetch_window(std::optional<FetchWindow> w);
  const std::optional<FetchWindow>& fetch_window() const { return window_; }

  const LoweredCatalog& lowered() const { return *lowered_; }

  StepOutcome step();
  RunReport run(const RunOptions& opts);

  /// Runs one operation on explicit arguments, as the reference engine's
  /// run_operation does, then advances the PC unless it branched.
  StepOutcome execute(const ExecutableOp& op, const Args& args);
  /// Executes a decoded instruction without fetching it.
  StepOutcome execute(const DecodedInstr& instr);

  bool condition_passed(Condition cond) const;

  /// Drops every cached block and specialized operation.
  void flush_code_cache();
  std::size_t cached_blocks() const;

  friend class Machine;
  friend struct BlockRunner;

 private:
  struct Cache;

  void switch_mode(ProcessorMode m);
  void write_mem_checked(Word32 addr, MemSize size, Word32 v);

  std::array<Word32, 16> regs_{};
  std::array<std::uint8_t, 4> flags_{};
  ProcessorMode mode_ = ProcessorMode::usr;
  Word32 cpsr_other_ = 0;
  BankedRegisters banks_;  // entries visible in regs_ are stale
  std::array<Cpsr, 5> spsr_{};
  PagedMemory mem_;
  bool branched_ = false;
  std::optional<FetchWindow> window_;
  std::shared_ptr<const LoweredCatalog> lowered_;
  std::unique_ptr<Cache> cache_;
};

RefState project(const FastProcessor& proc);

}  // namespace armsim

#endif  // ARMSIM_FAST_HPP
