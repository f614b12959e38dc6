#include "armsim/state.hpp"

#include <sstream>

namespace armsim {

std::optional<ProcessorMode> mode_from_bits(Word32 bits) {
  for (ProcessorMode m : kAllModes) {
    if (mode_bits(m) == (bits & 0x1Fu)) return m;
  }
  return std::nullopt;
}

std::string_view mode_name(ProcessorMode m) {
  switch (m) {
    case ProcessorMode::usr: return "usr";
    case ProcessorMode::fiq: return "fiq";
    case ProcessorMode::irq: return "irq";
    case ProcessorMode::svc: return "svc";
    case ProcessorMode::abt: return "abt";
    case ProcessorMode::und: return "und";
    case ProcessorMode::sys: return "sys";
  }
  return "?";
}

std::optional<ProcessorMode> mode_from_name(std::string_view name) {
  for (ProcessorMode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view condition_name(Condition c) {
  static constexpr std::array<std::string_view, 16> names = {
      "EQ", "NE", "CS", "CC", "MI", "PL", "VS", "VC",
      "HI", "LS", "GE", "LT", "GT", "LE", "AL", "NV"};
  return names[static_cast<unsigned>(c) & 15];
}

std::string_view fault_kind_name(FaultKind k) {
  return k == FaultKind::unpredictable ? "unpredictable" : "not_implemented";
}

Word32 Cpsr::pack() const {
  return (n ? 1u << 31 : 0) | (z ? 1u << 30 : 0) | (c ? 1u << 29 : 0) |
         (v ? 1u << 28 : 0) | (other & ~kModeledMask) | mode_bits(mode);
}

std::optional<Cpsr> Cpsr::unpack(Word32 w) {
  auto mode = mode_from_bits(w);
  if (!mode) return std::nullopt;
  Cpsr r;
  r.n = get_bit(w, 31);
  r.z = get_bit(w, 30);
  r.c = get_bit(w, 29);
  r.v = get_bit(w, 28);
  r.mode = *mode;
  r.other = w & ~kModeledMask;
  return r;
}

bool Cpsr::flag(FlagId f) const {
  switch (f) {
    case FlagId::N: return n;
    case FlagId::Z: return z;
    case FlagId::C: return c;
    case FlagId::V: return v;
  }
  return false;
}

void Cpsr::set_flag(FlagId f, bool value) {
  switch (f) {
    case FlagId::N: n = value; break;
    case FlagId::Z: z = value; break;
    case FlagId::C: c = value; break;
    case FlagId::V: v = value; break;
  }
}

bool condition_passed(const Cpsr& cpsr, Condition cond) {
  switch (cond) {
    case Condition::EQ: return cpsr.z;
    case Condition::NE: return !cpsr.z;
    case Condition::CS: return cpsr.c;
    case Condition::CC: return !cpsr.c;
    case Condition::MI: return cpsr.n;
    case Condition::PL: return !cpsr.n;
    case Condition::VS: return cpsr.v;
    case Condition::VC: return !cpsr.v;
    case Condition::HI: return cpsr.c && !cpsr.z;
    case Condition::LS: return !cpsr.c || cpsr.z;
    case Condition::GE: return cpsr.n == cpsr.v;
    case Condition::LT: return cpsr.n != cpsr.v;
    case Condition::GT: return !cpsr.z && cpsr.n == cpsr.v;
    case Condition::LE: return cpsr.z || cpsr.n != cpsr.v;
    case Condition::AL: return true;
    case Condition::NV: break;
  }
  assert(false && "NV has no condition semantics");
  return false;
}

Word32 BankedRegisters::physical(ProcessorMode mode, unsigned n) const {
  return const_cast<BankedRegisters*>(this)->physical(mode, n);
}

Word32& BankedRegisters::physical(ProcessorMode mode, unsigned n) {
  assert(n <= 15);
  if (mode == ProcessorMode::fiq && n >= 8 && n <= 14) return fiq[n - 8];
  if (mode_has_spsr(mode) && mode != ProcessorMode::fiq && (n == 13 || n == 14)) {
    return exception[spsr_index(mode) - 1][n - 13];
  }
  return user[n];
}

bool registers_shared(ProcessorMode a, ProcessorMode b, unsigned n) {
  BankedRegisters probe;
  return &probe.physical(a, n) == &probe.physical(b, n);
}

SparseMemory::SparseMemory(Map bytes) {
  std::erase_if(bytes, [](const auto& kv) { return kv.second == 0; });
  if (!bytes.empty()) map_ = std::make_shared<const Map>(std::move(bytes));
}

std::uint8_t SparseMemory::read_byte(Word32 addr) const {
  if (!map_) return 0;
  auto it = map_->find(addr);
  return it == map_->end() ? 0 : it->second;
}

void SparseMemory::write_byte(Word32 addr, std::uint8_t value) {
  if (!map_) {
    if (value == 0) return;
    map_ = std::make_shared<const Map>();
  }
  auto copy = std::make_shared<Map>(*map_);
  if (value == 0) {
    copy->erase(addr);
  } else {
    (*copy)[addr] = value;
  }
  map_ = std::move(copy);
}

const SparseMemory::Map& SparseMemory::bytes() const {
  static const Map empty_map;
  return map_ ? *map_ : empty_map;
}

bool operator==(const SparseMemory& a, const SparseMemory& b) {
  return a.map_ == b.map_ || a.bytes() == b.bytes();
}

Word32 reg_content(const RefState& st, unsigned n) {
  assert(n <= 15);
  if (n == 15) return st.regs.user[15] + 8;
  return st.regs.physical(st.cpsr.mode, n);
}

RefState set_reg(RefState st, unsigned n, Word32 v) {
  assert(n <= 15);
  st.regs.physical(st.cpsr.mode, n) = v;
  return st;
}

bool current_mode_has_spsr(const RefState& st) { return mode_has_spsr(st.cpsr.mode); }

namespace {

std::string misaligned_message(std::string_view what, Word32 addr, MemSize size) {
  std::ostringstream os;
  os << what << ": misaligned " << static_cast<unsigned>(size) << "-byte access at 0x"
     << std::hex << addr;
  return os.str();
}

bool aligned(Word32 addr, MemSize size) {
  return (addr & (static_cast<Word32>(size) - 1)) == 0;
}

}  // namespace

Outcome<Word32> mem_read(const RefState& st, Word32 addr, MemSize size) {
  if (!aligned(addr, size)) return unpredictable(misaligned_message("mem_read", addr, size));
  Word32 v = 0;
  for (unsigned i = static_cast<unsigned>(size); i-- > 0;) {
    v = (v << 8) | st.mem.read_byte(addr + i);
  }
  return v;
}

Outcome<RefState> mem_write(RefState st, Word32 addr, MemSize size, Word32 v) {
  if (!aligned(addr, size)) return unpredictable(misaligned_message("mem_write", addr, size));
  for (unsigned i = 0; i < static_cast<unsigned>(size); ++i) {
    st.mem.write_byte(addr + i, static_cast<std::uint8_t>(v >> (8 * i)));
  }
  return st;
}

}  // namespace armsim
