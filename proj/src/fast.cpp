#include "armsim/fast.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_map>

#include "armsim/builtins.hpp"

namespace armsim {

using namespace ast;

// ---------------------------------------------------------------------------
// Memory

struct PagedMemory::Page {
  std::array<std::uint8_t, kPageSize> bytes{};
  bool code = false;
};

struct PagedMemory::Directory {
  std::array<std::unique_ptr<Page>, 1024> pages;
};

PagedMemory::PagedMemory() = default;
PagedMemory::~PagedMemory() = default;

PagedMemory::PagedMemory(const PagedMemory& other) { *this = other; }

PagedMemory& PagedMemory::operator=(const PagedMemory& other) {
  if (this == &other) return *this;
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    dirs_[i].reset();
    if (!other.dirs_[i]) continue;
    dirs_[i] = std::make_unique<Directory>();
    for (std::size_t j = 0; j < 1024; ++j) {
      if (other.dirs_[i]->pages[j]) dirs_[i]->pages[j] = std::make_unique<Page>(*other.dirs_[i]->pages[j]);
    }
  }
  pages_ = other.pages_;
  return *this;
}

const std::uint8_t* PagedMemory::page(Word32 addr) const {
  const Directory* d = dirs_[addr >> 22].get();
  if (!d) return nullptr;
  const Page* p = d->pages[(addr >> kPageBits) & 1023].get();
  return p ? p->bytes.data() : nullptr;
}

PagedMemory::Page& PagedMemory::touch(Word32 addr) {
  auto& d = dirs_[addr >> 22];
  if (!d) d = std::make_unique<Directory>();
  auto& p = d->pages[(addr >> kPageBits) & 1023];
  if (!p) {
    p = std::make_unique<Page>();
    ++pages_;
  }
  return *p;
}

Word32 PagedMemory::read(Word32 addr, MemSize size) const {
  switch (size) {
    case MemSize::byte: return read8(addr);
    case MemSize::half: return Word32{read8(addr)} | Word32{read8(addr + 1)} << 8;
    case MemSize::word: return read32(addr);
  }
  return 0;
}

bool PagedMemory::write(Word32 addr, MemSize size, Word32 v) {
  Page& p = touch(addr);
  const Word32 off = addr & (kPageSize - 1);
  for (unsigned i = 0; i < static_cast<unsigned>(size); ++i) {
    p.bytes[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  return p.code;
}

bool PagedMemory::write8(Word32 addr, std::uint8_t v) {
  Page& p = touch(addr);
  p.bytes[addr & (kPageSize - 1)] = v;
  return p.code;
}

void PagedMemory::mark_code(Word32 addr) { touch(addr).code = true; }

void PagedMemory::clear_code_marks() {
  for (auto& d : dirs_) {
    if (!d) continue;
    for (auto& p : d->pages)
      if (p) p->code = false;
  }
}

SparseMemory PagedMemory::to_sparse() const {
  SparseMemory::Map bytes;
  for (Word32 i = 0; i < dirs_.size(); ++i) {
    if (!dirs_[i]) continue;
    for (Word32 j = 0; j < 1024; ++j) {
      const Page* p = dirs_[i]->pages[j].get();
      if (!p) continue;
      const Word32 base = (i << 22) | (j << kPageBits);
      for (Word32 k = 0; k < kPageSize; ++k) {
        if (p->bytes[k]) bytes.emplace_hint(bytes.end(), base + k, p->bytes[k]);
      }
    }
  }
  return SparseMemory(std::move(bytes));
}

void PagedMemory::assign(const SparseMemory& mem) {
  for (auto& d : dirs_) d.reset();
  pages_ = 0;
  for (const auto& [addr, b] : mem.bytes()) write8(addr, b);
}

// ---------------------------------------------------------------------------
// Lowered form

namespace {

enum class Op : std::uint8_t {
  // expressions
  k, param, local, reg, reg_k, reg_banked, cpsr, spsr, mem, flag, old_flag, old_param,
  bin, land, lor, ifx, cond, cond_k, has_spsr, carry3, overflow3, get_bit, bnot, sext, bits,
  // assignment targets
  t_reg, t_reg_k, t_pc, t_banked, t_flag, t_local, t_cpsr, t_spsr, t_mem, t_bits,
  // statements
  nop, assign, block, if_, for_, case_, unpred, unimpl,
};

constexpr std::uint32_t kNone = 0xFFFFFFFFu;
constexpr std::uint8_t kCurrentMode = 0xFF;
constexpr unsigned kMaxSlots = 64;

struct Node {
  Op op;
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint32_t x = kNone, y = kNone, z = kNone;
  Word32 value = 0;
};

struct Capture {
  bool from_slot;     // index taken from a parameter slot, else constant
  std::uint8_t index; // slot or register number (> 15 is an out-of-range constant)
};

}  // namespace

struct Program {
  std::string ident;
  std::size_t opcode = 0;
  std::vector<Node> nodes;
  std::vector<std::uint32_t> lists;
  std::uint32_t root = kNone;
  std::vector<std::string> params;      // slots 0..params.size()-1
  std::vector<std::string> slot_names;  // params, then locals
  std::vector<Capture> captures;
  bool old_flags = false;
  bool may_branch = true;
};

std::size_t ExecutableOp::opcode() const { return prog_->opcode; }
const std::string& ExecutableOp::ident() const { return prog_->ident; }
bool ExecutableOp::may_branch() const { return prog_->may_branch; }
const std::vector<std::string>& ExecutableOp::params() const { return prog_->params; }
std::size_t ExecutableOp::node_count() const { return prog_->nodes.size(); }

namespace {

Word32 apply_binary(BinaryOp op, Word32 a, Word32 b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::bit_and: return a & b;
    case BinaryOp::bit_or: return a | b;
    case BinaryOp::bit_eor: return a ^ b;
    case BinaryOp::shl: return b > 31 ? 0 : a << b;
    case BinaryOp::shr: return b > 31 ? 0 : a >> b;
    case BinaryOp::eq: return a == b;
    case BinaryOp::ne: return a != b;
    case BinaryOp::lt: return a < b;
    case BinaryOp::le: return a <= b;
    case BinaryOp::gt: return a > b;
    case BinaryOp::ge: return a >= b;
    case BinaryOp::log_and: return a && b;
    case BinaryOp::log_or: return a || b;
  }
  return 0;
}

bool carry3(Word32 a, Word32 b, Word32 c) {
  return ((std::uint64_t{a} + b + (c != 0)) >> 32) != 0;
}

bool overflow3(Word32 a, Word32 b, Word32 c) {
  const std::int64_t s = std::int64_t{static_cast<std::int32_t>(a)} + static_cast<std::int32_t>(b) + (c != 0);
  return s != static_cast<std::int32_t>(s);
}

Word32 sext(Word32 v, Word32 bits) {
  const unsigned shift = 32 - bits;
  return static_cast<Word32>(static_cast<std::int32_t>(v << shift) >> shift);
}

// Bit (n<<3 | z<<2 | c<<1 | v) of entry `cond` is set when cond passes.
constexpr std::array<std::uint16_t, 16> make_condition_table() {
  std::array<std::uint16_t, 16> t{};
  for (unsigned f = 0; f < 16; ++f) {
    const bool n = f & 8, z = f & 4, c = f & 2, v = f & 1;
    const bool pass[16] = {z,  !z, c,           !c,          n, !n, v, !v, c && !z, !c || z,
                           n == v, n != v, !z && n == v, z || n != v, true, false};
    for (unsigned k = 0; k < 16; ++k)
      if (pass[k]) t[k] |= static_cast<std::uint16_t>(1u << f);
  }
  return t;
}

constexpr auto kConditionTable = make_condition_table();

class Lowerer {
 public:
  Lowerer(Program& p, const OperationAst& op, const LoweringHooks& hooks, const Args* known)
      : p_(p), hooks_(hooks), known_(known), invert_c_(hooks.invert_adc_carry && op.name == "ADC") {
    for (const auto& param : op.params) {
      slot_of_[param.name] = static_cast<unsigned>(p_.slot_names.size());
      p_.slot_names.push_back(param.name);
      p_.params.push_back(param.name);
    }
  }

  std::uint32_t stm(const Stm& s) {
    if (auto a = s.as<AssignStm>()) {
      const std::uint32_t value = exp(*a->value);
      const std::uint32_t target = lvalue(*a->target);
      return add({Op::assign, 0, 0, target, value});
    }
    if (auto b = s.as<BlockStm>()) {
      std::vector<std::uint32_t> body;
      for (const auto& x : b->body) {
        const std::uint32_t n = stm(*x);
        if (p_.nodes[n].op == Op::nop) continue;
        if (p_.nodes[n].op == Op::block) {
          for (std::uint32_t i = 0; i < p_.nodes[n].y; ++i) body.push_back(p_.lists[p_.nodes[n].x + i]);
        } else {
          body.push_back(n);
        }
      }
      if (body.empty()) return nop();
      if (body.size() == 1) return body.front();
      const auto start = static_cast<std::uint32_t>(p_.lists.size());
      p_.lists.insert(p_.lists.end(), body.begin(), body.end());
      return add({Op::block, 0, 0, start, static_cast<std::uint32_t>(body.size())});
    }
    if (auto i = s.as<IfStm>()) {
      const std::uint32_t c = exp(*i->cond);
      if (Word32 v; constant(c, v)) {
        if (v) return stm(*i->then_branch);
        return i->else_branch ? stm(**i->else_branch) : nop();
      }
      const std::uint32_t t = stm(*i->then_branch);
      const std::uint32_t e = i->else_branch ? stm(**i->else_branch) : kNone;
      return add({Op::if_, 0, 0, c, t, e});
    }
    if (auto f = s.as<ForStm>()) {
      if (slot_of_.count(f->counter) && is_param(f->counter)) {
        throw LoweringError("for loop counter '" + f->counter + "' is a parameter");
      }
      const std::uint32_t lo = exp(*f->first);
      const std::uint32_t hi = exp(*f->last);
      const unsigned slot = local_slot(f->counter);
      const std::uint32_t body = stm(*f->body);
      return add({Op::for_, static_cast<std::uint8_t>(slot), 0, lo, hi, body});
    }
    if (auto c = s.as<CaseStm>()) {
      const std::uint32_t sel = exp(*c->selector);
      if (Word32 v; constant(sel, v)) {
        for (const auto& arm : c->arms)
          if (arm.pattern == v) return stm(*arm.body);
        return stm(*c->otherwise);
      }
      std::vector<std::uint32_t> arms;
      for (const auto& arm : c->arms) {
        arms.push_back(arm.pattern);
        arms.push_back(stm(*arm.body));
      }
      const std::uint32_t other = stm(*c->otherwise);
      const auto start = static_cast<std::uint32_t>(p_.lists.size());
      p_.lists.insert(p_.lists.end(), arms.begin(), arms.end());
      Node n{Op::case_, 0, 0, sel, start, static_cast<std::uint32_t>(c->arms.size())};
      n.value = other;
      return add(n);
    }
    if (s.as<UnpredictableStm>()) return add({Op::unpred});
    if (auto pr = s.as<ProcStm>()) {
      if (pr->name == "Unimplemented" && pr->args.empty()) return add({Op::unimpl});
      throw LoweringError("unsupported procedure '" + pr->name + "'");
    }
    throw LoweringError("unsupported statement");
  }

  std::uint32_t exp(const Exp& e) {
    if (auto c = e.as<ConstExp>()) return konst(c->value);
    if (auto v = e.as<VarExp>()) {
      if (is_param(v->name)) {
        if (known_) {
          if (auto it = known_->find(v->name); it != known_->end()) return konst(it->second);
        }
        return add({Op::param, static_cast<std::uint8_t>(slot_of_.at(v->name))});
      }
      return add({Op::local, static_cast<std::uint8_t>(local_slot(v->name))});
    }
    if (auto r = e.as<RegExp>()) {
      const std::uint32_t idx = exp(*r->index);
      if (r->mode) return add({Op::reg_banked, static_cast<std::uint8_t>(*r->mode), 0, idx});
      if (Word32 n; constant(idx, n) && n <= 15) return add({Op::reg_k, static_cast<std::uint8_t>(n)});
      return add({Op::reg, 0, 0, idx});
    }
    if (e.as<CpsrExp>()) return add({Op::cpsr});
    if (auto s = e.as<SpsrExp>()) return add({Op::spsr, mode_code(s->mode)});
    if (auto m = e.as<MemoryExp>()) {
      return add({Op::mem, static_cast<std::uint8_t>(m->size), 0, exp(*m->address)});
    }
    if (auto f = e.as<FlagExp>()) return add({Op::flag, static_cast<std::uint8_t>(f->flag)});
    if (auto f = e.as<OldFlagExp>()) {
      p_.old_flags = true;
      return add({Op::old_flag, static_cast<std::uint8_t>(f->flag)});
    }
    if (auto o = e.as<OldParamExp>()) return add({Op::old_param, capture(o->name)});
    if (auto b = e.as<BinExp>()) {
      const std::uint32_t l = exp(*b->lhs);
      const std::uint32_t r = exp(*b->rhs);
      Word32 lv = 0, rv = 0;
      const bool lc = constant(l, lv), rc = constant(r, rv);
      if (b->op == BinaryOp::log_and || b->op == BinaryOp::log_or) {
        const bool is_and = b->op == BinaryOp::log_and;
        if (lc) {
          if ((lv != 0) != is_and) return konst(is_and ? 0 : 1);
          if (rc) return konst(rv != 0);
          return add({Op::bin, static_cast<std::uint8_t>(BinaryOp::ne), 0, r, konst(0)});
        }
        return add({is_and ? Op::land : Op::lor, 0, 0, l, r});
      }
      if (lc && rc) return konst(apply_binary(b->op, lv, rv));
      return add({Op::bin, static_cast<std::uint8_t>(b->op), 0, l, r});
    }
    if (auto i = e.as<IfExp>()) {
      const std::uint32_t c = exp(*i->cond);
      if (Word32 v; constant(c, v)) return exp(v ? *i->then_value : *i->else_value);
      return add({Op::ifx, 0, 0, c, exp(*i->then_value), exp(*i->else_value)});
    }
    if (auto f = e.as<FunExp>()) return call(*f);
    if (auto br = e.as<BitRangeExp>()) {
      if (br->hi > 31 || br->lo > br->hi) throw LoweringError("malformed bit range");
      const std::uint32_t v = exp(*br->value);
      if (Word32 c; constant(v, c)) return konst(get_bit_range(c, br->hi, br->lo));
      return add({Op::bits, static_cast<std::uint8_t>(br->hi), static_cast<std::uint8_t>(br->lo), v});
    }
    throw LoweringError("unsupported expression");
  }

  std::uint32_t lvalue(const Exp& e) {
    if (auto r = e.as<RegExp>()) {
      const std::uint32_t idx = exp(*r->index);
      if (r->mode) return add({Op::t_banked, static_cast<std::uint8_t>(*r->mode), 0, idx});
      if (Word32 n; constant(idx, n) && n <= 15) {
        return n == 15 ? add({Op::t_pc}) : add({Op::t_reg_k, static_cast<std::uint8_t>(n)});
      }
      return add({Op::t_reg, 0, 0, idx});
    }
    if (auto f = e.as<FlagExp>()) {
      const bool invert = invert_c_ && f->flag == FlagId::C;
      return add({Op::t_flag, static_cast<std::uint8_t>(f->flag), static_cast<std::uint8_t>(invert)});
    }
    if (auto v = e.as<VarExp>()) {
      if (is_param(v->name)) throw LoweringError("assignment to parameter '" + v->name + "'");
      return add({Op::t_local, static_cast<std::uint8_t>(local_slot(v->name))});
    }
    if (e.as<CpsrExp>()) return add({Op::t_cpsr});
    if (auto s = e.as<SpsrExp>()) return add({Op::t_spsr, mode_code(s->mode)});
    if (auto m = e.as<MemoryExp>()) {
      return add({Op::t_mem, static_cast<std::uint8_t>(m->size), 0, exp(*m->address)});
    }
    if (auto br = e.as<BitRangeExp>()) {
      if (br->hi > 31 || br->lo > br->hi) throw LoweringError("malformed bit range");
      const std::uint32_t read = exp(*br->value);
      const std::uint32_t target = lvalue(*br->value);
      return add({Op::t_bits, static_cast<std::uint8_t>(br->hi), static_cast<std::uint8_t>(br->lo), read, target});
    }
    throw LoweringError("unsupported assignment target");
  }

 private:
  std::uint32_t add(Node n) {
    p_.nodes.push_back(n);
    return static_cast<std::uint32_t>(p_.nodes.size() - 1);
  }
  std::uint32_t konst(Word32 v) {
    Node n{Op::k};
    n.value = v;
    return add(n);
  }
  std::uint32_t nop() { return add({Op::nop}); }

  bool constant(std::uint32_t i, Word32& v) const {
    if (p_.nodes[i].op != Op::k) return false;
    v = p_.nodes[i].value;
    return true;
  }

  bool is_param(const std::string& name) const {
    return std::find(p_.params.begin(), p_.params.end(), name) != p_.params.end();
  }

  unsigned local_slot(const std::string& name) {
    auto it = slot_of_.find(name);
    if (it != slot_of_.end()) return it->second;
    if (p_.slot_names.size() >= kMaxSlots) throw LoweringError("too many variables");
    const auto s = static_cast<unsigned>(p_.slot_names.size());
    slot_of_[name] = s;
    p_.slot_names.push_back(name);
    return s;
  }

  static std::uint8_t mode_code(std::optional<ProcessorMode> m) {
    return m ? static_cast<std::uint8_t>(*m) : kCurrentMode;
  }

  std::uint8_t capture(const std::string& name) {
    if (!is_param(name)) throw LoweringError("old value of '" + name + "', which is not a parameter");
    Capture c{true, static_cast<std::uint8_t>(slot_of_.at(name))};
    if (known_) {
      if (auto it = known_->find(name); it != known_->end()) {
        c = Capture{false, static_cast<std::uint8_t>(std::min<Word32>(it->second, 255))};
      }
    }
    for (std::size_t i = 0; i < p_.captures.size(); ++i) {
      if (p_.captures[i].from_slot == c.from_slot && p_.captures[i].index == c.index) {
        return static_cast<std::uint8_t>(i);
      }
    }
    if (p_.captures.size() >= 8) throw LoweringError("too many old values");
    p_.captures.push_back(c);
    return static_cast<std::uint8_t>(p_.captures.size() - 1);
  }

  std::uint32_t call(const FunExp& f) {
    auto info = find_builtin(f.name);
    if (!info) throw LoweringError("unsupported function '" + f.name + "'");
    if (f.args.size() != info->arity) throw LoweringError("wrong number of arguments to '" + f.name + "'");
    std::uint32_t a[3] = {kNone, kNone, kNone};
    Word32 v[3] = {};
    bool all_const = true;
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      a[i] = exp(*f.args[i]);
      all_const = constant(a[i], v[i]) && all_const;
    }
    switch (info->id) {
      case Builtin::condition_passed:
        if (all_const && v[0] == 14) return konst(1);
        if (all_const && v[0] < 14) return add({Op::cond_k, static_cast<std::uint8_t>(v[0])});
        return add({Op::cond, 0, 0, a[0]});
      case Builtin::current_mode_has_spsr: return add({Op::has_spsr});
      case Builtin::carry_from_add3:
        if (all_const) return konst(carry3(v[0], v[1], v[2]));
        return add({Op::carry3, 0, 0, a[0], a[1], a[2]});
      case Builtin::overflow_from_add3:
        if (all_const) return konst(overflow3(v[0], v[1], v[2]));
        return add({Op::overflow3, 0, 0, a[0], a[1], a[2]});
      case Builtin::get_bit:
        if (all_const && v[1] <= 31) return konst((v[0] >> v[1]) & 1);
        return add({Op::get_bit, 0, 0, a[0], a[1]});
      case Builtin::bitwise_not:
        if (all_const) return konst(~v[0]);
        return add({Op::bnot, 0, 0, a[0]});
      case Builtin::sign_extend:
        if (all_const && v[1] >= 1 && v[1] <= 32) return konst(sext(v[0], v[1]));
        return add({Op::sext, 0, 0, a[0], a[1]});
    }
    throw LoweringError("unsupported function '" + f.name + "'");
  }

  Program& p_;
  const LoweringHooks& hooks_;
  const Args* known_;
  bool invert_c_;
  std::map<std::string, unsigned> slot_of_;
};

// True if executing node i can write the PC or memory.
bool can_branch(const Program& p, std::uint32_t i) {
  if (i == kNone) return false;
  const Node& n = p.nodes[i];
  switch (n.op) {
    case Op::t_reg:
    case Op::t_pc:
    case Op::t_banked:
    case Op::t_mem: return true;
    case Op::t_bits: return can_branch(p, n.y);
    case Op::assign: return can_branch(p, n.x);
    case Op::block:
      for (std::uint32_t k = 0; k < n.y; ++k)
        if (can_branch(p, p.lists[n.x + k])) return true;
      return false;
    case Op::if_: return can_branch(p, n.y) || can_branch(p, n.z);
    case Op::for_: return can_branch(p, n.z);
    case Op::case_:
      for (std::uint32_t k = 0; k < n.z; ++k)
        if (can_branch(p, p.lists[n.y + 2 * k + 1])) return true;
      return can_branch(p, n.value);
    default: return false;
  }
}

struct Trap {
  StepKind kind;
  std::string message;
};

[[noreturn]] void trap_unpredictable(std::string msg) { throw Trap{StepKind::unpredictable, std::move(msg)}; }

}  // namespace

ExecutableOp lower_operation(const OperationAst& op, std::size_t opcode, const LoweringHooks& hooks,
                             const Args* known) {
  auto p = std::make_shared<Program>();
  p->ident = op.ident();
  p->opcode = opcode;
  Lowerer l(*p, op, hooks, known);
  p->root = l.stm(op.body);
  p->may_branch = can_branch(*p, p->root);
  ExecutableOp out;
  out.prog_ = std::move(p);
  return out;
}

// ---------------------------------------------------------------------------
// Execution

class Machine {
 public:
  Machine(FastProcessor& proc, const Program& p, const Word32* args) : proc_(proc), p_(p) {
    const std::size_t n = p.params.size();
    std::copy(args, args + n, slots_);
    defined_ = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    for (std::size_t i = 0; i < p.captures.size(); ++i) {
      const Capture& c = p.captures[i];
      const Word32 idx = c.from_slot ? slots_[c.index] : c.index;
      captured_[i] = idx <= 15 ? proc.regs_[idx] : 0;
      bad_captures_ |= static_cast<std::uint8_t>((idx > 15) << i);
    }
    if (p.old_flags) old_flags_ = proc.flags_;
  }

  void run() { exec(p_.root); }

  Word32 slot(std::size_t i) const { return slots_[i]; }
  bool defined(std::size_t i) const { return (defined_ >> i) & 1; }

 private:
  static unsigned register_index(Word32 v) {
    if (v > 15) trap_unpredictable("register index " + std::to_string(v) + " out of range");
    return v;
  }

  ProcessorMode mode_of(std::uint8_t code) const {
    return code == kCurrentMode ? proc_.mode_ : static_cast<ProcessorMode>(code);
  }

  static void check_aligned(const char* what, Word32 addr, MemSize size) {
    if (addr & (static_cast<Word32>(size) - 1)) {
      trap_unpredictable(std::string(what) + ": misaligned address " + std::to_string(addr));
    }
  }

  Word32 eval(std::uint32_t i) {
    const Node& n = p_.nodes[i];
    switch (n.op) {
      case Op::k: return n.value;
      case Op::param: return slots_[n.a];
      case Op::local:
        if (!((defined_ >> n.a) & 1)) {
          throw Trap{StepKind::not_implemented, "variable " + p_.slot_names[n.a] + " read before assignment"};
        }
        return slots_[n.a];
      case Op::reg: return proc_.regs_[register_index(eval(n.x))];
      case Op::reg_k: return proc_.regs_[n.a];
      case Op::reg_banked: {
        const unsigned r = register_index(eval(n.x));
        return proc_.banked_reg(static_cast<ProcessorMode>(n.a), r);
      }
      case Op::cpsr: return proc_.cpsr().pack();
      case Op::spsr: {
        const ProcessorMode m = mode_of(n.a);
        if (!mode_has_spsr(m)) trap_unpredictable("SPSR accessed in " + std::string(mode_name(m)) + " mode");
        return proc_.spsr_[spsr_index(m)].pack();
      }
      case Op::mem: {
        const Word32 addr = eval(n.x);
        const auto size = static_cast<MemSize>(n.a);
        check_aligned("memory read", addr, size);
        return proc_.mem_.read(addr, size);
      }
      case Op::flag: return proc_.flags_[n.a];
      case Op::old_flag: return old_flags_[n.a];
      case Op::old_param:
        if ((bad_captures_ >> n.a) & 1) {
          const Capture& c = p_.captures[n.a];
          register_index(c.from_slot ? slots_[c.index] : c.index);
        }
        return captured_[n.a];
      case Op::bin: return apply_binary(static_cast<BinaryOp>(n.a), eval(n.x), eval(n.y));
      case Op::land: return eval(n.x) != 0 && eval(n.y) != 0;
      case Op::lor: return eval(n.x) != 0 || eval(n.y) != 0;
      case Op::ifx: return eval(n.x) ? eval(n.y) : eval(n.z);
      case Op::cond: {
        const Word32 c = eval(n.x);
        if (c >= 15) trap_unpredictable("ConditionPassed: condition field 0b1111 is not a condition");
        return passes(c);
      }
      case Op::cond_k: return passes(n.a);
      case Op::has_spsr: return mode_has_spsr(proc_.mode_);
      case Op::carry3: {
        const Word32 a = eval(n.x), b = eval(n.y);
        return carry3(a, b, eval(n.z));
      }
      case Op::overflow3: {
        const Word32 a = eval(n.x), b = eval(n.y);
        return overflow3(a, b, eval(n.z));
      }
      case Op::get_bit: {
        const Word32 w = eval(n.x), k = eval(n.y);
        if (k > 31) trap_unpredictable("get_bit: bit index " + std::to_string(k));
        return (w >> k) & 1;
      }
      case Op::bnot: return ~eval(n.x);
      case Op::sext: {
        const Word32 w = eval(n.x), bits = eval(n.y);
        if (bits < 1 || bits > 32) trap_unpredictable("SignExtend: width " + std::to_string(bits));
        return sext(w, bits);
      }
      case Op::bits: return (eval(n.x) >> n.b) & (n.a - n.b == 31 ? ~Word32{0} : (Word32{2} << (n.a - n.b)) - 1);
      default: break;
    }
    throw Trap{StepKind::not_implemented, "malformed lowered expression"};
  }

  Word32 passes(Word32 cond) const {
    const unsigned f = proc_.flags_[0] << 3 | proc_.flags_[1] << 2 | proc_.flags_[2] << 1 | proc_.flags_[3];
    return (kConditionTable[cond] >> f) & 1;
  }

  void store(std::uint32_t i, Word32 v) {
    const Node& n = p_.nodes[i];
    switch (n.op) {
      case Op::t_reg_k: proc_.regs_[n.a] = v; return;
      case Op::t_pc: proc_.set_reg_or_pc(15, v); return;
      case Op::t_reg: proc_.set_reg_or_pc(register_index(eval(n.x)), v); return;
      case Op::t_banked: {
        const unsigned r = register_index(eval(n.x));
        proc_.set_banked_reg(static_cast<ProcessorMode>(n.a), r, v);
        return;
      }
      case Op::t_flag: proc_.flags_[n.a] = static_cast<std::uint8_t>((v & 1) ^ n.b); return;
      case Op::t_local:
        slots_[n.a] = v;
        defined_ |= std::uint64_t{1} << n.a;
        return;
      case Op::t_cpsr: {
        auto c = Cpsr::unpack(v);
        if (!c) trap_unpredictable("CPSR write with invalid mode bits");
        proc_.set_cpsr(*c);
        return;
      }
      case Op::t_spsr: {
        const ProcessorMode m = mode_of(n.a);
        if (!mode_has_spsr(m)) trap_unpredictable("SPSR written in " + std::string(mode_name(m)) + " mode");
        auto c = Cpsr::unpack(v);
        if (!c) trap_unpredictable("SPSR write with invalid mode bits");
        proc_.spsr_[spsr_index(m)] = *c;
        return;
      }
      case Op::t_mem: {
        const Word32 addr = eval(n.x);
        const auto size = static_cast<MemSize>(n.a);
        check_aligned("memory write", addr, size);
        proc_.write_mem_checked(addr, size, v);
        return;
      }
      case Op::t_bits: store(n.y, set_bit_range(eval(n.x), n.a, n.b, v)); return;
      default: break;
    }
    throw Trap{StepKind::not_implemented, "malformed lowered target"};
  }

  void exec(std::uint32_t i) {
    const Node& n = p_.nodes[i];
    switch (n.op) {
      case Op::nop: return;
      case Op::assign: store(n.x, eval(n.y)); return;
      case Op::block:
        for (std::uint32_t k = 0; k < n.y; ++k) exec(p_.lists[n.x + k]);
        return;
      case Op::if_:
        if (eval(n.x)) {
          exec(n.y);
        } else if (n.z != kNone) {
          exec(n.z);
        }
        return;
      case Op::for_: {
        const Word32 lo = eval(n.x), hi = eval(n.y);
        for (std::uint64_t k = lo; k <= hi; ++k) {
          slots_[n.a] = static_cast<Word32>(k);
          defined_ |= std::uint64_t{1} << n.a;
          exec(n.z);
        }
        return;
      }
      case Op::case_: {
        const Word32 sel = eval(n.x);
        for (std::uint32_t k = 0; k < n.z; ++k) {
          if (p_.lists[n.y + 2 * k] == sel) {
            exec(p_.lists[n.y + 2 * k + 1]);
            return;
          }
        }
        exec(n.value);
        return;
      }
      case Op::unpred: trap_unpredictable("UNPREDICTABLE");
      case Op::unimpl: throw Trap{StepKind::not_implemented, "Unimplemented()"};
      default: break;
    }
    throw Trap{StepKind::not_implemented, "malformed lowered statement"};
  }

  FastProcessor& proc_;
  const Program& p_;
  Word32 slots_[kMaxSlots];
  std::uint64_t defined_ = 0;
  Word32 captured_[8] = {};
  std::uint8_t bad_captures_ = 0;
  std::array<std::uint8_t, 4> old_flags_{};
};

FastExpression::FastExpression(const Exp& e, const std::vector<Param>& params) {
  OperationAst op;
  op.name = "expression";
  op.params = params;
  op.body = assign(var("$result"), e);
  op_ = lower_operation(op);
}

Outcome<Word32> FastExpression::evaluate(FastProcessor& proc, const Args& args) const {
  const Program& p = op_.program();
  Word32 slots[kMaxSlots] = {};
  for (std::size_t i = 0; i < p.params.size(); ++i) {
    auto it = args.find(p.params[i]);
    if (it == args.end()) return not_implemented("parameter " + p.params[i] + " not bound");
    slots[i] = it->second;
  }
  try {
    Machine m(proc, p, slots);
    m.run();
    const auto r = std::find(p.slot_names.begin(), p.slot_names.end(), "$result") - p.slot_names.begin();
    return m.slot(static_cast<std::size_t>(r));
  } catch (const Trap& t) {
    return Fault{t.kind == StepKind::unpredictable ? FaultKind::unpredictable : FaultKind::not_implemented,
                 t.message};
  }
}

// ---------------------------------------------------------------------------
// Catalog of lowered operations

LoweredCatalog::LoweredCatalog(const Decoder& dec, LoweringHooks hooks) : dec_(&dec), hooks_(hooks) {
  for (const auto& op : dec.catalog().operations()) generic_.push_back(lower_operation(op.ast, op.id, hooks_));
}

ExecutableOp LoweredCatalog::specialize(const DecodedInstr& instr) const {
  Args known;
  for (const auto& f : instr.fields) known[f.name] = f.value;
  return lower_operation(catalog().at(instr.op).ast, instr.op, hooks_, &known);
}

std::shared_ptr<const LoweredCatalog> default_lowered_catalog() {
  static const auto lowered = std::make_shared<const LoweredCatalog>();
  return lowered;
}

// ---------------------------------------------------------------------------
// Processor

namespace {

enum class ShiftKind : std::uint8_t { none, imm, reg, lsl_i, lsr_i, asr_i, ror_i, rrx, lsl_r, lsr_r, asr_r, ror_r };

struct ShiftPlan {
  ShiftKind kind = ShiftKind::none;
  std::uint8_t m = 0;
  std::uint8_t s = 0;
  std::uint8_t amount = 0;
  bool imm_keeps_carry = false;
  Word32 imm = 0;
};

ShiftPlan plan_shifter(const ShifterDescriptor& d) {
  using namespace shifter;
  ShiftPlan p;
  if (auto i = std::get_if<Immediate>(&d)) {
    p.kind = ShiftKind::imm;
    p.imm = std::rotr(static_cast<Word32>(i->immed_8), static_cast<int>(2 * i->rotate_imm));
    p.imm_keeps_carry = i->rotate_imm == 0;
  } else if (auto r = std::get_if<Register>(&d)) {
    p.kind = ShiftKind::reg;
    p.m = static_cast<std::uint8_t>(r->m);
  } else if (auto si = std::get_if<ShiftImm>(&d)) {
    p.m = static_cast<std::uint8_t>(si->m);
    p.amount = static_cast<std::uint8_t>(si->amount);
    switch (si->shift) {
      case ShiftType::LSL: p.kind = si->amount == 0 ? ShiftKind::reg : ShiftKind::lsl_i; break;
      case ShiftType::LSR: p.kind = ShiftKind::lsr_i; if (p.amount == 0) p.amount = 32; break;
      case ShiftType::ASR: p.kind = ShiftKind::asr_i; if (p.amount == 0) p.amount = 32; break;
      case ShiftType::ROR: p.kind = si->amount == 0 ? ShiftKind::rrx : ShiftKind::ror_i; break;
    }
  } else if (auto sr = std::get_if<ShiftReg>(&d)) {
    p.m = static_cast<std::uint8_t>(sr->m);
    p.s = static_cast<std::uint8_t>(sr->s);
    const ShiftKind kinds[] = {ShiftKind::lsl_r, ShiftKind::lsr_r, ShiftKind::asr_r, ShiftKind::ror_r};
    p.kind = kinds[static_cast<unsigned>(sr->shift)];
  } else if (auto x = std::get_if<Rrx>(&d)) {
    p.kind = ShiftKind::rrx;
    p.m = static_cast<std::uint8_t>(x->m);
  }
  return p;
}

struct Shifted {
  Word32 value;
  Word32 carry;
};

// k in 0..255; the shift is computed on a widened value carrying a guard bit.
Shifted lsl(Word32 rm, unsigned k, Word32 c) {
  if (k == 0) return {rm, c};
  if (k > 32) return {0, 0};
  const std::uint64_t w = std::uint64_t{rm} << k;
  return {static_cast<Word32>(w), static_cast<Word32>(w >> 32) & 1};
}
Shifted lsr(Word32 rm, unsigned k, Word32 c) {
  if (k == 0) return {rm, c};
  const std::uint64_t w = (std::uint64_t{rm} << 1) >> std::min(k, 33u);
  return {static_cast<Word32>(w >> 1), static_cast<Word32>(w) & 1};
}
Shifted asr(Word32 rm, unsigned k, Word32 c) {
  if (k == 0) return {rm, c};
  const std::int64_t w = (std::int64_t{static_cast<std::int32_t>(rm)} * 2) >> std::min(k, 33u);
  return {static_cast<Word32>(w >> 1), static_cast<Word32>(w) & 1};
}
Shifted ror(Word32 rm, unsigned k, Word32 c) {
  if (k == 0) return {rm, c};
  const Word32 v = std::rotr(rm, static_cast<int>(k & 31));
  return {v, v >> 31};
}

Shifted run_shifter(const ShiftPlan& p, const std::array<Word32, 16>& regs, Word32 c) {
  const Word32 rm = regs[p.m];
  switch (p.kind) {
    case ShiftKind::none: return {0, c};
    case ShiftKind::imm: return {p.imm, p.imm_keeps_carry ? c : p.imm >> 31};
    case ShiftKind::reg: return {rm, c};
    case ShiftKind::lsl_i: return lsl(rm, p.amount, c);
    case ShiftKind::lsr_i: return lsr(rm, p.amount, c);
    case ShiftKind::asr_i: return asr(rm, p.amount, c);
    case ShiftKind::ror_i: return ror(rm, p.amount, c);
    case ShiftKind::rrx: return {(c << 31) | (rm >> 1), rm & 1};
    case ShiftKind::lsl_r: return lsl(rm, regs[p.s] & 0xFF, c);
    case ShiftKind::lsr_r: return lsr(rm, regs[p.s] & 0xFF, c);
    case ShiftKind::asr_r: return asr(rm, regs[p.s] & 0xFF, c);
    case ShiftKind::ror_r: return ror(rm, regs[p.s] & 0xFF, c);
  }
  return {0, c};
}

constexpr unsigned kMaxParams = 8;

struct CachedInstr {
  Word32 addr = 0;
  Word32 word = 0;
  StepKind fault = StepKind::ok;  // fixed outcome of an unusable word
  std::string message;
  const Program* prog = nullptr;
  bool may_branch = true;
  std::array<Word32, kMaxParams> args{};
  ShiftPlan shifter;
  std::int8_t value_slot = -1;
  std::int8_t carry_slot = -1;
};

struct BasicBlock {
  std::vector<CachedInstr> instrs;
};

constexpr unsigned kMaxBlockLength = 64;
constexpr unsigned kQuickSlots = 256;

}  // namespace

struct FastProcessor::Cache {
  std::unordered_map<Word32, std::shared_ptr<const ExecutableOp>> ops;  // by instruction word
  std::unordered_map<Word32, std::unique_ptr<BasicBlock>> blocks;
  std::array<std::pair<Word32, BasicBlock*>, kQuickSlots> quick{};
  bool dirty = false;

  void clear_blocks() {
    blocks.clear();
    quick.fill({0, nullptr});
    dirty = false;
  }
};

namespace {

StepOutcome fault_outcome(const Trap& t, const Program& p, Word32 pc, Word32 word) {
  return StepOutcome{t.kind, p.ident + ": " + t.message, pc, word};
}

}  // namespace

FastProcessor::FastProcessor(std::shared_ptr<const LoweredCatalog> lowered)
    : lowered_(std::move(lowered)), cache_(std::make_unique<Cache>()) {
  regs_[15] = 8;
}

FastProcessor::FastProcessor(const FastProcessor& other)
    : regs_(other.regs_),
      flags_(other.flags_),
      mode_(other.mode_),
      cpsr_other_(other.cpsr_other_),
      banks_(other.banks_),
      spsr_(other.spsr_),
      mem_(other.mem_),
      branched_(other.branched_),
      window_(other.window_),
      lowered_(other.lowered_),
      cache_(std::make_unique<Cache>()) {
  mem_.clear_code_marks();
}

FastProcessor& FastProcessor::operator=(const FastProcessor& other) {
  if (this != &other) {
    FastProcessor copy(other);
    *this = std::move(copy);
  }
  return *this;
}

FastProcessor::FastProcessor(FastProcessor&&) noexcept = default;
FastProcessor& FastProcessor::operator=(FastProcessor&&) noexcept = default;
FastProcessor::~FastProcessor() = default;

FastProcessor FastProcessor::from_state(const RefState& st, std::shared_ptr<const LoweredCatalog> lowered) {
  FastProcessor p(std::move(lowered));
  p.banks_ = st.regs;
  p.mode_ = st.cpsr.mode;
  for (unsigned n = 0; n < 15; ++n) p.regs_[n] = st.regs.physical(st.cpsr.mode, n);
  p.regs_[15] = st.regs.user[15] + 8;
  p.flags_ = {st.cpsr.n, st.cpsr.z, st.cpsr.c, st.cpsr.v};
  p.cpsr_other_ = st.cpsr.other;
  p.spsr_ = st.spsr;
  p.mem_.assign(st.mem);
  return p;
}

Word32 FastProcessor::banked_reg(ProcessorMode mode, unsigned n) const {
  if (n == 15 || registers_shared(mode, mode_, n)) return regs_[n];
  return banks_.physical(mode, n);
}

void FastProcessor::set_banked_reg(ProcessorMode mode, unsigned n, Word32 v) {
  if (n == 15 || registers_shared(mode, mode_, n)) {
    set_reg_or_pc(n, v);
  } else {
    banks_.physical(mode, n) = v;
  }
}

Cpsr FastProcessor::cpsr() const {
  Cpsr c;
  c.n = flags_[0];
  c.z = flags_[1];
  c.c = flags_[2];
  c.v = flags_[3];
  c.mode = mode_;
  c.other = cpsr_other_;
  return c;
}

void FastProcessor::set_cpsr(const Cpsr& c) {
  flags_ = {c.n, c.z, c.c, c.v};
  cpsr_other_ = c.other;
  switch_mode(c.mode);
}

void FastProcessor::switch_mode(ProcessorMode m) {
  if (m == mode_) return;
  for (unsigned n = 8; n < 15; ++n) banks_.physical(mode_, n) = regs_[n];
  mode_ = m;
  for (unsigned n = 8; n < 15; ++n) regs_[n] = banks_.physical(m, n);
}

void FastProcessor::write_mem_checked(Word32 addr, MemSize size, Word32 v) {
  if (mem_.write(addr, size, v)) cache_->dirty = true;
}

void FastProcessor::write_memory(Word32 addr, MemSize size, Word32 v) {
  if (mem_.write(addr, size, v)) flush_code_cache();
}

void FastProcessor::load_bytes(Word32 base, const std::vector<std::uint8_t>& bytes) {
  for (std::size_t i = 0; i < bytes.size(); ++i) mem_.write8(base + static_cast<Word32>(i), bytes[i]);
  flush_code_cache();
}

void FastProcessor::set_fetch_window(std::optional<FetchWindow> w) {
  window_ = w;
  flush_code_cache();
}

void FastProcessor::flush_code_cache() {
  cache_->clear_blocks();
  mem_.clear_code_marks();
}

std::size_t FastProcessor::cached_blocks() const { return cache_->blocks.size(); }

bool FastProcessor::condition_passed(Condition cond) const {
  const unsigned f = flags_[0] << 3 | flags_[1] << 2 | flags_[2] << 1 | flags_[3];
  return (kConditionTable[static_cast<unsigned>(cond)] >> f) & 1;
}

struct BlockRunner {
  static CachedInstr build_instr(FastProcessor& proc, Word32 addr);
  static BasicBlock& block_at(FastProcessor& p, Word32 addr);
  static bool exec(FastProcessor& p, const CachedInstr& ci, bool check_branch, StepOutcome& out);
};

CachedInstr BlockRunner::build_instr(FastProcessor& proc, Word32 addr) {
  FastProcessor::Cache& cache = *proc.cache_;
  PagedMemory& mem = proc.mem_;
  CachedInstr ci;
  ci.addr = addr;
  if (proc.fetch_window() && !proc.fetch_window()->contains(addr)) {
    ci.fault = StepKind::undefined;
    ci.message = "fetch outside the loaded image";
    return ci;
  }
  mem.mark_code(addr);
  const Word32 w = mem.read32(addr);
  ci.word = w;
  const LoweredCatalog& lc = proc.lowered();
  auto instr = lc.decoder().decode(w);
  if (!instr) {
    if (auto cls = unmodeled_class(w)) {
      ci.fault = StepKind::not_implemented;
      ci.message = *cls + " is not modeled";
    } else {
      ci.fault = StepKind::undefined;
      ci.message = "undefined instruction";
    }
    return ci;
  }
  auto& op = cache.ops[w];
  if (!op) op = std::make_shared<const ExecutableOp>(lc.specialize(*instr));
  const Program& p = op->program();
  ci.prog = &p;
  ci.may_branch = p.may_branch;
  if (p.params.size() > kMaxParams) throw LoweringError(p.ident + ": too many parameters");
  for (std::size_t i = 0; i < p.params.size(); ++i) {
    const std::string& name = p.params[i];
    if (name == kShifterOperand) {
      ci.value_slot = static_cast<std::int8_t>(i);
    } else if (name == kShifterCarryOut) {
      ci.carry_slot = static_cast<std::int8_t>(i);
    } else {
      ci.args[i] = instr->field(name).value_or(0);
    }
  }
  if (instr->shifter) ci.shifter = plan_shifter(*instr->shifter);
  return ci;
}

BasicBlock& BlockRunner::block_at(FastProcessor& p, Word32 addr) {
  FastProcessor::Cache& c = *p.cache_;
  auto& q = c.quick[(addr >> 2) % kQuickSlots];
  if (q.second && q.first == addr) return *q.second;
  auto& slot = c.blocks[addr];
  if (!slot) {
    slot = std::make_unique<BasicBlock>();
    Word32 a = addr;
    for (unsigned i = 0; i < kMaxBlockLength; ++i, a += 4) {
      slot->instrs.push_back(build_instr(p, a));
      const CachedInstr& ci = slot->instrs.back();
      if (ci.fault != StepKind::ok || ci.may_branch || a == 0xFFFFFFFCu) break;
    }
  }
  q = {addr, slot.get()};
  return *slot;
}

bool BlockRunner::exec(FastProcessor& p, const CachedInstr& ci, bool check_branch, StepOutcome& out) {
  if (ci.fault != StepKind::ok) {
    out = StepOutcome{ci.fault, ci.message, ci.addr, ci.word};
    return false;
  }
  Word32 args[kMaxParams];
  std::copy(ci.args.begin(), ci.args.end(), args);
  if (ci.value_slot >= 0) {
    const Shifted s = run_shifter(ci.shifter, p.regs_, p.flags_[2]);
    args[ci.value_slot] = s.value;
    if (ci.carry_slot >= 0) args[ci.carry_slot] = s.carry;
  }
  if (!check_branch && !ci.may_branch) {
    try {
      Machine(p, *ci.prog, args).run();
    } catch (const Trap& t) {
      out = fault_outcome(t, *ci.prog, ci.addr, ci.word);
      return false;
    }
    p.regs_[15] += 4;
    return true;
  }
  p.branched_ = false;
  try {
    Machine(p, *ci.prog, args).run();
  } catch (const Trap& t) {
    out = fault_outcome(t, *ci.prog, ci.addr, ci.word);
    return false;
  }
  if (!p.branched_) p.regs_[15] += 4;
  return true;
}

StepOutcome FastProcessor::step() {
  if (cache_->dirty) flush_code_cache();
  const Word32 addr = fetch_address();
  if (addr & 3) return StepOutcome{StepKind::unpredictable, "fetch from a misaligned address", addr, 0};
  const BasicBlock& b = BlockRunner::block_at(*this, addr);
  StepOutcome out{StepKind::ok, "", addr, b.instrs.front().word};
  BlockRunner::exec(*this, b.instrs.front(), true, out);
  return out;
}

RunReport FastProcessor::run(const RunOptions& opts) {
  RunReport r;
  const auto start = std::chrono::steady_clock::now();
  unsigned self_branches = 0;
  Word32 last_self = 0;
  while (r.steps < opts.max_steps) {
    if (cache_->dirty) flush_code_cache();
    const Word32 addr = fetch_address();
    if (addr & 3) {
      r.outcome = StepOutcome{StepKind::unpredictable, "fetch from a misaligned address", addr, 0};
      break;
    }
    const BasicBlock& b = BlockRunner::block_at(*this, addr);
    const std::size_t n = opts.basic_blocks ? b.instrs.size() : 1;
    bool stop = false;
    for (std::size_t i = 0; i < n && r.steps < opts.max_steps; ++i) {
      const CachedInstr& ci = b.instrs[i];
      if (!BlockRunner::exec(*this, ci, !opts.basic_blocks, r.outcome)) {
        stop = true;
        break;
      }
      ++r.steps;
      if (opts.halt_on_self_branch) {
        if (fetch_address() == ci.addr) {
          self_branches = last_self == ci.addr ? self_branches + 1 : 1;
          last_self = ci.addr;
          if (self_branches >= 2) {
            r.halted = true;
            stop = true;
            break;
          }
        } else {
          self_branches = 0;
        }
      }
    }
    if (stop) break;
  }
  r.wall = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
  return r;
}

double RunReport::mips() const {
  const double s = std::chrono::duration<double>(wall).count();
  return s > 0 ? static_cast<double>(steps) / s / 1e6 : 0.0;
}

StepOutcome FastProcessor::execute(const ExecutableOp& op, const Args& args) {
  const Program& p = op.program();
  const Word32 pc = fetch_address();
  Word32 slots[kMaxSlots] = {};
  for (std::size_t i = 0; i < p.params.size(); ++i) {
    auto it = args.find(p.params[i]);
    if (it == args.end()) {
      return StepOutcome{StepKind::not_implemented, p.ident + ": parameter " + p.params[i] + " not bound", pc, 0};
    }
    slots[i] = it->second;
  }
  branched_ = false;
  try {
    Machine(*this, p, slots).run();
  } catch (const Trap& t) {
    return fault_outcome(t, p, pc, 0);
  }
  if (!branched_) regs_[15] += 4;
  if (cache_->dirty) flush_code_cache();
  return StepOutcome{StepKind::ok, "", pc, 0};
}

StepOutcome FastProcessor::execute(const DecodedInstr& instr) {
  const ExecutableOp op = lowered_->specialize(instr);
  Args args;
  for (const auto& f : instr.fields) args[f.name] = f.value;
  if (instr.shifter) {
    const Shifted s = run_shifter(plan_shifter(*instr.shifter), regs_, flags_[2]);
    args[std::string(kShifterOperand)] = s.value;
    args[std::string(kShifterCarryOut)] = s.carry;
  }
  return execute(op, args);
}

RefState project(const FastProcessor& proc) {
  RefState st;
  st.cpsr = proc.cpsr();
  for (ProcessorMode m : kAllModes) {
    if (mode_has_spsr(m)) st.spsr[spsr_index(m)] = proc.spsr(m);
  }
  for (ProcessorMode m : kAllModes) {
    for (unsigned n = 8; n < 15; ++n) st.regs.physical(m, n) = proc.banked_reg(m, n);
  }
  for (unsigned n = 0; n < 8; ++n) st.regs.user[n] = proc.reg(n);
  st.regs.user[15] = proc.fetch_address();
  st.mem = proc.memory().to_sparse();
  return st;
}

}  // namespace armsim
