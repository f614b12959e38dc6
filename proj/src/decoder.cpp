#include "armsim/decoder.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace armsim {

using namespace shifter;

std::optional<Word32> DecodedInstr::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return f.value;
  }
  return std::nullopt;
}

Decoder::Decoder(const Catalog& cat) : cat_(&cat) {
  for (const auto& op : cat.operations()) {
    for (unsigned i = 0; i < op.encodings.size(); ++i) {
      table_.push_back({op.encodings[i].mask, op.encodings[i].value, op.id, i});
    }
  }
  std::stable_sort(table_.begin(), table_.end(), [](const Entry& a, const Entry& b) {
    return std::popcount(a.mask) > std::popcount(b.mask);
  });
}

namespace {

ShiftType shift_of(Word32 w) { return static_cast<ShiftType>((w >> 5) & 3); }

ShifterDescriptor decode_shifter(OperandForm form, Word32 w) {
  const unsigned m = w & 0xF;
  switch (form) {
    case OperandForm::immediate:
      return Immediate{(w >> 8) & 0xF, w & 0xFF};
    case OperandForm::reg_shift:
      return ShiftReg{m, shift_of(w), (w >> 8) & 0xF};
    default: {
      const unsigned amount = (w >> 7) & 0x1F;
      const ShiftType t = shift_of(w);
      if (amount == 0 && t == ShiftType::LSL) return Register{m};
      if (amount == 0 && t == ShiftType::ROR) return Rrx{m};
      return ShiftImm{m, t, amount};
    }
  }
}

OperandForm form_of(const ShifterDescriptor& d) {
  if (std::holds_alternative<Immediate>(d)) return OperandForm::immediate;
  if (std::holds_alternative<ShiftReg>(d)) return OperandForm::reg_shift;
  return OperandForm::imm_shift;
}

void check_range(const char* name, unsigned v, unsigned max) {
  if (v > max) {
    throw EncodeError(name, std::string("shifter field ") + name + " = " + std::to_string(v) +
                                " exceeds " + std::to_string(max));
  }
}

Word32 encode_shifter(const ShifterDescriptor& d) {
  return std::visit(
      [](const auto& s) -> Word32 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Immediate>) {
          check_range("rotate_imm", s.rotate_imm, 15);
          check_range("immed_8", s.immed_8, 255);
          return (s.rotate_imm << 8) | s.immed_8;
        } else if constexpr (std::is_same_v<T, Register>) {
          check_range("Rm", s.m, 15);
          return s.m;
        } else if constexpr (std::is_same_v<T, ShiftImm>) {
          check_range("Rm", s.m, 15);
          check_range("shift_imm", s.amount, 31);
          if (s.amount == 0 && (s.shift == ShiftType::LSL || s.shift == ShiftType::ROR)) {
            throw EncodeError("shift_imm", std::string(shift_name(s.shift)) +
                                               " #0 is written as a plain register or RRX");
          }
          return (s.amount << 7) | (static_cast<Word32>(s.shift) << 5) | s.m;
        } else if constexpr (std::is_same_v<T, ShiftReg>) {
          check_range("Rm", s.m, 15);
          check_range("Rs", s.s, 15);
          return (s.s << 8) | (static_cast<Word32>(s.shift) << 5) | (1u << 4) | s.m;
        } else {
          check_range("Rm", s.m, 15);
          return (static_cast<Word32>(ShiftType::ROR) << 5) | s.m;
        }
      },
      d);
}

}  // namespace

std::optional<DecodedInstr> Decoder::decode(Word32 w) const {
  for (const auto& e : table_) {
    if ((w & e.mask) != e.value) continue;
    const EncodingPattern& pat = cat_->at(e.op).encodings[e.encoding];
    DecodedInstr out;
    out.op = e.op;
    out.fields.reserve(pat.fields.size());
    for (const auto& f : pat.fields) out.fields.push_back({f.name, get_bit_range(w, f.hi, f.lo)});
    if (pat.form != OperandForm::none) out.shifter = decode_shifter(pat.form, w);
    return out;
  }
  return std::nullopt;
}

Word32 Decoder::encode(const DecodedInstr& instr) const {
  if (instr.op >= cat_->size()) throw EncodeError("op", "unknown operation id " + std::to_string(instr.op));
  const OperationSpec& spec = cat_->at(instr.op);
  if (spec.uses_shifter != instr.shifter.has_value()) {
    throw EncodeError("shifter_operand", spec.mnemonic + (spec.uses_shifter ? " needs" : " takes no") +
                                             " shifter operand");
  }
  const OperandForm form = instr.shifter ? form_of(*instr.shifter) : OperandForm::none;
  const EncodingPattern* pat = nullptr;
  for (const auto& p : spec.encodings) {
    if (p.form == form) pat = &p;
  }
  if (!pat) throw EncodeError("shifter_operand", "no encoding for this operand form");
  if (instr.fields.size() != pat->fields.size()) {
    throw EncodeError("fields", spec.mnemonic + " expects " + std::to_string(pat->fields.size()) + " fields");
  }
  Word32 w = pat->value;
  for (std::size_t i = 0; i < pat->fields.size(); ++i) {
    const FieldSpec& fs = pat->fields[i];
    const DecodedField& f = instr.fields[i];
    if (f.name != fs.name) throw EncodeError(f.name, "expected field " + fs.name + ", got " + f.name);
    const unsigned width = fs.hi - fs.lo + 1;
    if (width < 32 && (f.value >> width) != 0) {
      throw EncodeError(f.name, "field " + f.name + " = " + std::to_string(f.value) + " does not fit in " +
                                    std::to_string(width) + " bits");
    }
    w = set_bit_range(w, fs.hi, fs.lo, f.value);
  }
  if (instr.shifter) w |= encode_shifter(*instr.shifter);
  return w;
}

const Decoder& default_decoder() {
  static const Decoder d(catalog());
  return d;
}

std::optional<DecodedInstr> decode(Word32 w) { return default_decoder().decode(w); }
Word32 encode(const DecodedInstr& instr) { return default_decoder().encode(instr); }

std::optional<std::string> unmodeled_class(Word32 w) {
  const Word32 cond = w >> 28;
  if (cond == 0xF) return "unconditional instruction space";
  const Word32 op3 = (w >> 25) & 7;
  switch (op3) {
    case 0:
      if ((w & 0x90) == 0x90) return "multiply or extra load/store";
      if ((w & 0x01900000) == 0x01000000) return "miscellaneous (status register, BX, CLZ, BKPT)";
      return std::nullopt;
    case 1:
      if ((w & 0x01B00000) == 0x01200000) return "move immediate to status register";
      return std::nullopt;
    case 2:
      return "load/store word or byte";
    case 3:
      if ((w & 0x01F000F0) == 0x01F000F0) return std::nullopt;  // architecturally undefined
      if (w & 0x10) return "media instruction";
      return "load/store word or byte";
    case 4:
      return "load/store multiple";
    case 5:
      return std::nullopt;  // every B/BL word is in the catalog
    case 6:
      return "coprocessor load/store";
    default:
      if ((w & 0x01000000) != 0) return "software interrupt";
      return "coprocessor data processing or register transfer";
  }
}

namespace {

const char* const kConditionSuffix[16] = {"EQ", "NE", "CS", "CC", "MI", "PL", "VS", "VC",
                                          "HI", "LS", "GE", "LT", "GT", "LE", "",   "NV"};

}  // namespace

std::string disassemble(const DecodedInstr& instr, const Catalog& cat, Word32 pc) {
  const OperationSpec& spec = cat.at(instr.op);
  std::ostringstream os;
  os << spec.mnemonic;
  if (auto c = instr.field("cond")) os << kConditionSuffix[*c & 15];
  if (auto s = instr.field("S"); s && *s) os << "S";
  std::vector<std::string> operands;
  for (const char* r : {"d", "n"}) {
    if (auto v = instr.field(r)) operands.push_back("r" + std::to_string(*v));
  }
  if (instr.shifter) operands.push_back(describe_shifter(*instr.shifter));
  if (auto imm = instr.field("signed_immed_24")) {
    std::ostringstream t;
    t << "0x" << std::hex << (pc + 8 + (sign_extend(*imm, 24) << 2));
    operands.push_back(t.str());
  }
  for (std::size_t i = 0; i < operands.size(); ++i) os << (i ? ", " : " ") << operands[i];
  return os.str();
}

}  // namespace armsim
