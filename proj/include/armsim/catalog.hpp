// Instruction database: encoding patterns, pseudocode, and the
// addressing-mode-1 shifter used by the reference engine.

#ifndef ARMSIM_CATALOG_HPP
#define ARMSIM_CATALOG_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "armsim/ast.hpp"
#include "armsim/state.hpp"

namespace armsim {

enum class ShiftType : std::uint8_t { LSL, LSR, ASR, ROR };

std::string_view shift_name(ShiftType t);

namespace shifter {
/// immed_8 rotated right by 2 * rotate_imm.
struct Immediate {
  unsigned rotate_imm;
  unsigned immed_8;
  friend bool operator==(const Immediate&, const Immediate&) = default;
};
/// Plain Rm (encoded as LSL #0).
struct Register {
  unsigned m;
  friend bool operator==(const Register&, const Register&) = default;
};
/// Rm shifted by the raw 5-bit shift_imm field. For LSR and ASR a field of
/// 0 means 32; LSL #0 is Register and ROR #0 is Rrx, so neither is valid here.
struct ShiftImm {
  unsigned m;
  ShiftType shift;
  unsigned amount;
  friend bool operator==(const ShiftImm&, const ShiftImm&) = default;
};
/// Rm shifted by the low byte of Rs.
struct ShiftReg {
  unsigned m;
  ShiftType shift;
  unsigned s;
  friend bool operator==(const ShiftReg&, const ShiftReg&) = default;
};
struct Rrx {
  unsigned m;
  friend bool operator==(const Rrx&, const Rrx&) = default;
};
}  // namespace shifter

using ShifterDescriptor =
    std::variant<shifter::Immediate, shifter::Register, shifter::ShiftImm, shifter::ShiftReg,
                 shifter::Rrx>;

std::string describe_shifter(const ShifterDescriptor& d);

struct ShifterResult {
  Word32 value;
  bool carry_out;
  friend bool operator==(const ShifterResult&, const ShifterResult&) = default;
};

/// Addressing mode 1 over the reference state. Register operands read
/// through reg_content, so r15 reads as the instruction address + 8.
ShifterResult compute_shifter_operand(const ShifterDescriptor& d, const RefState& st);

/// The same rules on plain values: `rm` is the operand register, `rs` the
/// shift register (ignored unless ShiftReg) and `c` the incoming carry.
ShifterResult shifter_rules(const ShifterDescriptor& d, Word32 rm, Word32 rs, bool c);

/// Which part of the operand space an encoding covers.
enum class OperandForm : std::uint8_t {
  none,        // no shifter operand
  immediate,   // I=1: rotate_imm, immed_8
  imm_shift,   // I=0, bit 4 = 0: shift_imm, shift, Rm
  reg_shift,   // I=0, bit 7 = 0, bit 4 = 1: Rs, shift, Rm
};

struct FieldSpec {
  std::string name;
  unsigned hi;
  unsigned lo;
  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

struct EncodingPattern {
  Word32 mask = 0;
  Word32 value = 0;
  std::vector<FieldSpec> fields;  // operation parameters; shifter bits are implicit
  OperandForm form = OperandForm::none;

  bool matches(Word32 w) const { return (w & mask) == value; }
};

/// Names of the parameters computed from the shifter rather than decoded.
inline constexpr std::string_view kShifterOperand = "shifter_operand";
inline constexpr std::string_view kShifterCarryOut = "shifter_carry_out";

struct OperationSpec {
  unsigned id = 0;
  std::string mnemonic;
  std::string section;
  /// One entry per operand form; addressing mode 1 expands to three.
  std::vector<EncodingPattern> encodings;
  bool uses_shifter = false;
  std::string flags_affected;  // e.g. "N Z C V"
  std::string encoding_text;
  std::string pseudocode;
  /// Parsed body, already passed through resolve_old_params.
  ast::OperationAst ast;
};

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<OperationSpec> ops);

  const std::vector<OperationSpec>& operations() const { return ops_; }
  const OperationSpec& at(unsigned id) const { return ops_.at(id); }
  const OperationSpec* find(std::string_view mnemonic) const;
  std::size_t size() const { return ops_.size(); }

 private:
  std::vector<OperationSpec> ops_;
};

struct CatalogSource {
  std::string name;           // file stem, for diagnostics
  std::string encoding_text;  // NAME.enc
  std::string pseudocode;     // NAME.pc
};

/// Parses and validates; ids follow the order of `sources`.
Catalog build_catalog(const std::vector<CatalogSource>& sources);

/// Reads every NAME.enc / NAME.pc pair in `dir`, sorted by name.
Catalog load_catalog(const std::filesystem::path& dir);

/// The catalog compiled into the library.
const Catalog& catalog();
const std::vector<CatalogSource>& bundled_catalog_sources();

}  // namespace armsim

#endif  // ARMSIM_CATALOG_HPP
