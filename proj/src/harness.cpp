#include "armsim/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace armsim {

using namespace ast;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string hex(Word32 v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

const char* const kFlagNames[4] = {"N_flag", "Z_flag", "C_flag", "V_flag"};

}  // namespace

CaseRng::CaseRng(std::uint64_t seed) : rng_(splitmix(seed)) {}

Word32 CaseRng::operand() {
  const unsigned k = below(100);
  if (k < 30) return kCornerValues[below(kCornerValues.size())];
  if (k < 45) return below(41);
  return word();
}

std::uint64_t case_seed(std::uint64_t base, std::size_t opcode, std::size_t index) {
  return splitmix(base ^ splitmix((static_cast<std::uint64_t>(opcode) << 40) ^ index));
}

namespace {

Cpsr random_cpsr(CaseRng& rng) {
  Cpsr c;
  c.n = rng.below(2);
  c.z = rng.below(2);
  c.c = rng.below(2);
  c.v = rng.below(2);
  c.mode = kAllModes[rng.below(kAllModes.size())];
  c.other = rng.chance(10) ? rng.word() & ~Cpsr::kModeledMask : 0;
  return c;
}

}  // namespace

std::pair<RefState, FastProcessor> random_state(std::uint64_t seed, const HarnessConfig& cfg) {
  CaseRng rng(seed);
  FastProcessor f(cfg.lowered);
  f.set_cpsr(random_cpsr(rng));
  for (ProcessorMode m : kAllModes) {
    if (mode_has_spsr(m)) f.set_spsr(m, random_cpsr(rng));
  }
  for (unsigned n = 0; n < 15; ++n) f.set_reg_or_pc(n, rng.operand());
  for (ProcessorMode m : kAllModes) {
    for (unsigned n = 8; n < 15; ++n) {
      if (!registers_shared(m, f.mode(), n)) f.set_banked_reg(m, n, rng.operand());
    }
  }
  const Word32 base = rng.word() & 0xFFF0u;
  const unsigned words = rng.below(17);
  for (unsigned i = 0; i < words; ++i) f.write_memory(base + 4 * i, MemSize::word, rng.operand());
  f.set_fetch_address(rng.word() & 0xFFFCu);
  RefState ref = project(f);
  return {std::move(ref), std::move(f)};
}

Word32 random_word_for(std::size_t opcode, CaseRng& rng, const Catalog& cat) {
  const auto& encs = cat.at(opcode).encodings;
  const EncodingPattern& e = encs[rng.below(static_cast<unsigned>(encs.size()))];
  return (rng.word() & ~e.mask) | e.value;
}

namespace {

void place_word(RefState& st, Word32 word) {
  auto placed = mem_write(st, pc_of(st), MemSize::word, word);
  if (placed.ok()) st = std::move(placed.value());
}

}  // namespace

Case random_case(Word32 word, std::uint64_t seed, const HarnessConfig& cfg) {
  Case c{random_state(seed, cfg).first, word};
  place_word(c.state, word);
  return c;
}

std::string physical_register_name(ProcessorMode mode, unsigned n) {
  if (n == 15) return "pc";
  if (registers_shared(mode, ProcessorMode::usr, n)) return "r" + std::to_string(n);
  return "r" + std::to_string(n) + "_" + std::string(mode_name(mode));
}

std::vector<std::string> diff_states(const RefState& a, const RefState& b) {
  std::vector<std::string> out;
  for (unsigned n = 0; n < 15; ++n)
    if (a.regs.user[n] != b.regs.user[n]) out.push_back("r" + std::to_string(n));
  for (unsigned i = 0; i < 7; ++i)
    if (a.regs.fiq[i] != b.regs.fiq[i]) out.push_back(physical_register_name(ProcessorMode::fiq, 8 + i));
  const ProcessorMode exc[4] = {ProcessorMode::irq, ProcessorMode::svc, ProcessorMode::abt, ProcessorMode::und};
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = 0; j < 2; ++j)
      if (a.regs.exception[i][j] != b.regs.exception[i][j]) out.push_back(physical_register_name(exc[i], 13 + j));
  if (a.regs.user[15] != b.regs.user[15]) out.push_back("pc");
  for (unsigned f = 0; f < 4; ++f) {
    const auto id = static_cast<FlagId>(f);
    if (a.cpsr.flag(id) != b.cpsr.flag(id)) out.push_back(kFlagNames[f]);
  }
  if (a.cpsr.mode != b.cpsr.mode) out.push_back("mode");
  if (a.cpsr.other != b.cpsr.other) out.push_back("cpsr_other");
  for (ProcessorMode m : kAllModes) {
    if (mode_has_spsr(m) && a.spsr[spsr_index(m)] != b.spsr[spsr_index(m)]) {
      out.push_back("spsr_" + std::string(mode_name(m)));
    }
  }
  const auto& ma = a.mem.bytes();
  const auto& mb = b.mem.bytes();
  auto ia = ma.begin(), ib = mb.begin();
  auto mem = [&](Word32 addr) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "mem[0x%X]", addr);
    out.push_back(buf);
  };
  while (ia != ma.end() || ib != mb.end()) {
    if (ib == mb.end() || (ia != ma.end() && ia->first < ib->first)) {
      if (ia->second) mem(ia->first);
      ++ia;
    } else if (ia == ma.end() || ib->first < ia->first) {
      if (ib->second) mem(ib->first);
      ++ib;
    } else {
      if (ia->second != ib->second) mem(ia->first);
      ++ia;
      ++ib;
    }
  }
  return out;
}

std::string_view verdict_kind_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::pass: return "pass";
    case Verdict::Kind::mismatch: return "mismatch";
    case Verdict::Kind::outcome_disagree: return "outcome-disagree";
  }
  return "?";
}

std::string Verdict::describe() const {
  std::ostringstream os;
  os << verdict_kind_name(kind) << " on " << hex(word);
  if (auto d = decode(word)) os << " (" << disassemble(*d, catalog(), pc_of(input.state)) << ")";
  os << " seed " << seed;
  if (kind == Kind::outcome_disagree) {
    os << ": reference " << step_kind_name(ref_outcome.kind) << ", fast " << step_kind_name(fast_outcome.kind);
    if (!ref_outcome.message.empty()) os << " [ref: " << ref_outcome.message << "]";
    if (!fast_outcome.message.empty()) os << " [fast: " << fast_outcome.message << "]";
  } else if (kind == Kind::mismatch) {
    os << ":";
    for (const auto& c : components) os << " " << c;
  }
  return os.str();
}

namespace {

Verdict compare_step(const RefState& ref, FastProcessor& fast, const HarnessConfig& cfg, Verdict v) {
  const RefStep r = ref_step(ref, cfg.lowered->decoder());
  v.ref_outcome = r.outcome;
  v.fast_outcome = fast.step();
  if (v.ref_outcome.kind != v.fast_outcome.kind) {
    v.kind = Verdict::Kind::outcome_disagree;
  } else if (v.ref_outcome.ok()) {
    v.components = diff_states(r.state, project(fast));
    if (!v.components.empty()) v.kind = Verdict::Kind::mismatch;
  }
  return v;
}

}  // namespace

Verdict check_case(const Case& c, const HarnessConfig& cfg) {
  Verdict v;
  v.word = c.word;
  v.input = c;
  place_word(v.input.state, c.word);
  const RefState ref = v.input.state;
  FastProcessor fast = FastProcessor::from_state(ref, cfg.lowered);
  return compare_step(ref, fast, cfg, std::move(v));
}

Verdict check_commutes(Word32 word, std::uint64_t seed, const HarnessConfig& cfg) {
  auto [ref, fast] = random_state(seed, cfg);
  fast.write_memory(fast.fetch_address(), MemSize::word, word);
  place_word(ref, word);
  Verdict v;
  v.word = word;
  v.seed = seed;
  v.input = Case{ref, word};
  return compare_step(ref, fast, cfg, std::move(v));
}

Verdict check_commutes(const DecodedInstr& instr, std::uint64_t seed, const HarnessConfig& cfg) {
  return check_commutes(cfg.lowered->decoder().encode(instr), seed, cfg);
}

namespace {

std::optional<Word32> known_value(const Exp& e, const Args& args) {
  if (auto c = e.as<ConstExp>()) return c->value;
  if (auto v = e.as<VarExp>()) {
    if (auto it = args.find(v->name); it != args.end()) return it->second;
  }
  return std::nullopt;
}

class FootprintWalker {
 public:
  FootprintWalker(const Args& args, ProcessorMode mode, std::set<std::string>& out)
      : args_(args), mode_(mode), out_(out) {}

  void stm(const Stm& s) {
    if (auto a = s.as<AssignStm>()) {
      target(*a->target);
    } else if (auto b = s.as<BlockStm>()) {
      for (const auto& x : b->body) stm(*x);
    } else if (auto i = s.as<IfStm>()) {
      stm(*i->then_branch);
      if (i->else_branch) stm(**i->else_branch);
    } else if (auto f = s.as<ForStm>()) {
      stm(*f->body);
    } else if (auto c = s.as<CaseStm>()) {
      for (const auto& arm : c->arms) stm(*arm.body);
      stm(*c->otherwise);
    }
  }

 private:
  void target(const Exp& e) {
    if (auto r = e.as<RegExp>()) {
      auto n = known_value(*r->index, args_);
      if (!n || *n > 15) {
        out_.insert("*reg");
      } else {
        out_.insert(physical_register_name(r->mode.value_or(mode_), *n));
      }
    } else if (auto f = e.as<FlagExp>()) {
      out_.insert(kFlagNames[static_cast<unsigned>(f->flag)]);
    } else if (e.as<CpsrExp>()) {
      for (const char* f : kFlagNames) out_.insert(f);
      out_.insert("mode");
      out_.insert("cpsr_other");
    } else if (auto s = e.as<SpsrExp>()) {
      const ProcessorMode m = s->mode.value_or(mode_);
      if (mode_has_spsr(m)) out_.insert("spsr_" + std::string(mode_name(m)));
    } else if (e.as<MemoryExp>()) {
      out_.insert("*mem");
    } else if (auto br = e.as<BitRangeExp>()) {
      target(*br->value);
    }
  }

  const Args& args_;
  ProcessorMode mode_;
  std::set<std::string>& out_;
};

bool covered(const std::string& component, const std::set<std::string>& fp) {
  if (fp.count(component)) return true;
  if (fp.count("*reg") && (component == "pc" || (component[0] == 'r' && component != "r"))) return true;
  return fp.count("*mem") && component.rfind("mem[", 0) == 0;
}

}  // namespace

std::set<std::string> footprint(const DecodedInstr& instr, const RefState& st, const Catalog& cat) {
  std::set<std::string> out = {"pc"};
  if (auto cond = instr.field("cond"); cond && *cond < 15 &&
                                       !condition_passed(st.cpsr, static_cast<Condition>(*cond))) {
    return out;
  }
  Args args;
  for (const auto& f : instr.fields) args[f.name] = f.value;
  FootprintWalker(args, st.cpsr.mode, out).stm(cat.at(instr.op).ast.body);
  return out;
}

Verdict check_frame(Word32 word, std::uint64_t seed, const HarnessConfig& cfg) {
  auto [ref, fast] = random_state(seed, cfg);
  fast.write_memory(fast.fetch_address(), MemSize::word, word);
  const RefState before = project(fast);
  Verdict v;
  v.word = word;
  v.seed = seed;
  v.input = Case{before, word};
  std::set<std::string> fp = {"pc"};
  if (auto instr = cfg.lowered->decoder().decode(word)) fp = footprint(*instr, before, cfg.lowered->catalog());
  v.fast_outcome = fast.step();
  v.ref_outcome = v.fast_outcome;
  for (const auto& c : diff_states(before, project(fast))) {
    if (!covered(c, fp)) v.components.push_back(c);
  }
  if (!v.components.empty()) v.kind = Verdict::Kind::mismatch;
  return v;
}

Verdict check_frame(const DecodedInstr& instr, std::uint64_t seed, const HarnessConfig& cfg) {
  return check_frame(cfg.lowered->decoder().encode(instr), seed, cfg);
}

namespace {

// Compares a fast-engine evaluation against the reference one and checks
// that the fast processor was left untouched.
Verdict compare_evaluation(const Exp& e, const RefState& ref, FastProcessor& fast, std::uint64_t seed,
                           std::optional<bool> direct) {
  Verdict v;
  v.seed = seed;
  v.input = Case{ref, 0};
  const FastProcessor before = fast;
  const RefState projected = project(before);
  const Outcome<Word32> f = FastExpression(e, {}).evaluate(fast, {});
  SemState cur;
  cur.st = ref;
  const Outcome<Word32> r = eval_exp(e, ref, cur);

  v.components = diff_states(projected, project(fast));
  if (fast.reg(15) != fast.pc() || fast.branch_taken() != before.branch_taken()) v.components.push_back("pc");
  if (!v.components.empty()) {
    v.kind = Verdict::Kind::mismatch;
    return v;
  }
  v.ref_outcome.kind = r.ok() ? StepKind::ok : step_kind(r.fault().kind);
  v.fast_outcome.kind = f.ok() ? StepKind::ok : step_kind(f.fault().kind);
  if (v.ref_outcome.kind != v.fast_outcome.kind) {
    v.kind = Verdict::Kind::outcome_disagree;
  } else if ((r.ok() && r.value() != f.value()) || (direct && r.ok() && (r.value() != 0) != *direct)) {
    v.kind = Verdict::Kind::mismatch;
    v.components.push_back("value");
  }
  return v;
}

}  // namespace

Verdict check_condition_purity_and_agreement(unsigned cond, std::uint64_t seed, const HarnessConfig& cfg) {
  auto [ref, fast] = random_state(seed, cfg);
  const RefState before = project(fast);
  const bool direct = fast.condition_passed(static_cast<Condition>(cond));
  Verdict v;
  v.seed = seed;
  v.input = Case{ref, 0};
  v.components = diff_states(before, project(fast));
  if (!v.components.empty()) {
    v.kind = Verdict::Kind::mismatch;
    return v;
  }
  if (direct != condition_passed(ref.cpsr, static_cast<Condition>(cond))) {
    v.kind = Verdict::Kind::mismatch;
    v.components.push_back("value");
    return v;
  }
  return compare_evaluation(fun("ConditionPassed", {constant(cond)}), ref, fast, seed, direct);
}

Exp random_expression(CaseRng& rng, int depth) {
  const unsigned k = depth <= 0 ? rng.below(7) : rng.below(20);
  switch (k) {
    case 0: return constant(rng.operand());
    case 1: return reg(constant(rng.below(16)));
    case 2: return reg(constant(8 + rng.below(8)), kAllModes[rng.below(7)]);
    case 3: return flag(static_cast<FlagId>(rng.below(4)));
    case 4: return Exp{CpsrExp{}};
    case 5: return Exp{SpsrExp{}};
    case 6: return fun("CurrentModeHasSPSR", {});
    case 7:
    case 8:
    case 9: return binop(random_expression(rng, depth - 1), static_cast<BinaryOp>(rng.below(15)),
                         random_expression(rng, depth - 1));
    case 10: return Exp{IfExp{random_expression(rng, depth - 1), random_expression(rng, depth - 1),
                              random_expression(rng, depth - 1)}};
    case 11: return fun("NOT", {random_expression(rng, depth - 1)});
    case 12: return fun(rng.below(2) ? "CarryFrom_add3" : "OverflowFrom_add3",
                        {random_expression(rng, depth - 1), random_expression(rng, depth - 1),
                         random_expression(rng, depth - 1)});
    case 13: return fun("SignExtend", {random_expression(rng, depth - 1), constant(rng.below(34))});
    case 14: return fun("get_bit", {random_expression(rng, depth - 1), constant(rng.below(34))});
    case 15: {
      const unsigned hi = rng.below(32);
      return bit_range(random_expression(rng, depth - 1), hi, rng.below(hi + 1));
    }
    case 16: {
      const MemSize sizes[] = {MemSize::byte, MemSize::half, MemSize::word};
      return Exp{MemoryExp{random_expression(rng, depth - 1), sizes[rng.below(3)]}};
    }
    case 17: return fun("ConditionPassed", {constant(rng.below(16))});
    case 18: return reg(binop(random_expression(rng, depth - 1), BinaryOp::bit_and, constant(rng.below(2) ? 15 : 31)));
    default: return fun("ConditionPassed", {random_expression(rng, depth - 1)});
  }
}

Verdict check_expression_purity(std::uint64_t seed, const HarnessConfig& cfg) {
  auto [ref, fast] = random_state(seed, cfg);
  CaseRng rng(seed ^ 0x5EEDull);
  return compare_evaluation(random_expression(rng, 3), ref, fast, seed, std::nullopt);
}

namespace {

std::vector<ShifterDescriptor> simpler_shifters(const ShifterDescriptor& d) {
  using namespace shifter;
  std::vector<ShifterDescriptor> out;
  if (auto i = std::get_if<Immediate>(&d)) {
    if (i->rotate_imm) out.push_back(Immediate{0, i->immed_8});
    if (i->immed_8) out.push_back(Immediate{0, 0});
  } else if (auto si = std::get_if<ShiftImm>(&d)) {
    out.push_back(Register{si->m});
  } else if (auto sr = std::get_if<ShiftReg>(&d)) {
    out.push_back(ShiftImm{sr->m, sr->shift, 1});
    out.push_back(Register{sr->m});
  } else if (auto x = std::get_if<Rrx>(&d)) {
    out.push_back(Register{x->m});
  }
  return out;
}

bool same_case(const Case& a, const Case& b) { return a.word == b.word && a.state == b.state; }

}  // namespace

Case shrink(const Case& failing, const HarnessConfig& cfg) {
  auto fails = [&](const Case& c) { return !check_case(c, cfg).pass(); };
  if (!fails(failing)) return failing;
  Case best = failing;
  auto attempt = [&](auto&& mutate) {
    Case t = best;
    mutate(t);
    if (!same_case(t, best) && fails(t)) {
      best = std::move(t);
      return true;
    }
    return false;
  };
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    changed |= attempt([](Case& c) { c.state.mem = SparseMemory(); });
    changed |= attempt([](Case& c) { c.state.regs.user[15] = 0; });
    for (unsigned n = 0; n < 15; ++n) changed |= attempt([n](Case& c) { c.state.regs.user[n] = 0; });
    for (auto& r : best.state.regs.fiq) {
      const auto i = static_cast<std::size_t>(&r - best.state.regs.fiq.data());
      changed |= attempt([i](Case& c) { c.state.regs.fiq[i] = 0; });
    }
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 2; ++j) changed |= attempt([i, j](Case& c) { c.state.regs.exception[i][j] = 0; });
    for (unsigned f = 0; f < 4; ++f)
      changed |= attempt([f](Case& c) { c.state.cpsr.set_flag(static_cast<FlagId>(f), false); });
    changed |= attempt([](Case& c) { c.state.cpsr.other = 0; });
    changed |= attempt([](Case& c) { c.state.cpsr.mode = ProcessorMode::usr; });
    for (std::size_t i = 0; i < 5; ++i) changed |= attempt([i](Case& c) { c.state.spsr[i] = Cpsr{}; });
    if (auto d = cfg.lowered->decoder().decode(best.word)) {
      if (d->shifter) {
        for (const auto& s : simpler_shifters(*d->shifter)) {
          DecodedInstr t = *d;
          t.shifter = s;
          const Word32 w = cfg.lowered->decoder().encode(t);
          changed |= attempt([w](Case& c) { c.word = w; });
        }
      }
    }
    if (!changed) break;
  }
  return best;
}

std::string write_reproducer(const Case& c, const Catalog& cat) {
  std::ostringstream os;
  os << "# armsim reproducer\n";
  os << "word " << hex(c.word) << "\n";
  if (auto d = Decoder(cat).decode(c.word)) os << "# " << disassemble(*d, cat, pc_of(c.state)) << "\n";
  os << "cpsr " << hex(c.state.cpsr.pack()) << "\n";
  for (ProcessorMode m : kAllModes) {
    if (mode_has_spsr(m)) os << "spsr_" << mode_name(m) << " " << hex(c.state.spsr[spsr_index(m)].pack()) << "\n";
  }
  for (unsigned n = 0; n < 15; ++n) os << "r" << n << " " << hex(c.state.regs.user[n]) << "\n";
  for (unsigned n = 8; n < 15; ++n) {
    os << physical_register_name(ProcessorMode::fiq, n) << " " << hex(c.state.regs.fiq[n - 8]) << "\n";
  }
  for (ProcessorMode m : {ProcessorMode::irq, ProcessorMode::svc, ProcessorMode::abt, ProcessorMode::und}) {
    for (unsigned n = 13; n < 15; ++n) {
      os << physical_register_name(m, n) << " " << hex(c.state.regs.physical(m, n)) << "\n";
    }
  }
  os << "pc " << hex(c.state.regs.user[15]) << "\n";
  for (const auto& [addr, b] : c.state.mem.bytes()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "mem 0x%08X 0x%02X\n", addr, b);
    os << buf;
  }
  return os.str();
}

namespace {

Word32 parse_number(const std::string& s, unsigned line) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(s, &used, 0);
    if (used != s.size() || v > 0xFFFFFFFFul) throw std::invalid_argument(s);
    return static_cast<Word32>(v);
  } catch (const std::logic_error&) {
    throw std::runtime_error("reproducer line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

Cpsr parse_status(const std::string& s, unsigned line) {
  auto c = Cpsr::unpack(parse_number(s, line));
  if (!c) throw std::runtime_error("reproducer line " + std::to_string(line) + ": invalid mode bits");
  return *c;
}

}  // namespace

Case read_reproducer(std::string_view text) {
  Case c;
  bool have_word = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  unsigned line = 0;
  SparseMemory::Map bytes;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key, a, b;
    if (!(ls >> key)) continue;
    ls >> a >> b;
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error("reproducer line " + std::to_string(line) + ": " + msg);
    };
    if (a.empty()) fail("missing value for '" + key + "'");
    if (key == "word") {
      c.word = parse_number(a, line);
      have_word = true;
    } else if (key == "cpsr") {
      c.state.cpsr = parse_status(a, line);
    } else if (key.rfind("spsr_", 0) == 0) {
      auto m = mode_from_name(key.substr(5));
      if (!m || !mode_has_spsr(*m)) fail("no SPSR in '" + key + "'");
      c.state.spsr[spsr_index(*m)] = parse_status(a, line);
    } else if (key == "pc") {
      c.state.regs.user[15] = parse_number(a, line);
    } else if (key == "mem") {
      if (b.empty()) fail("mem needs an address and a byte");
      const Word32 v = parse_number(b, line);
      if (v > 0xFF) fail("byte out of range");
      bytes[parse_number(a, line)] = static_cast<std::uint8_t>(v);
    } else if (key.size() > 1 && key[0] == 'r') {
      const auto us = key.find('_');
      const std::string num = key.substr(1, us == std::string::npos ? std::string::npos : us - 1);
      const unsigned n = parse_number(num, line);
      if (n > 14) fail("bad register '" + key + "'");
      ProcessorMode m = ProcessorMode::usr;
      if (us != std::string::npos) {
        auto mm = mode_from_name(key.substr(us + 1));
        if (!mm) fail("bad register '" + key + "'");
        m = *mm;
      }
      if (physical_register_name(m, n) != key) fail("bad register '" + key + "'");
      c.state.regs.physical(m, n) = parse_number(a, line);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_word) throw std::runtime_error("reproducer has no instruction word");
  c.state.mem = SparseMemory(std::move(bytes));
  return c;
}

SuiteReport run_suite(const SuiteOptions& opts, const HarnessConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> ops = opts.opcodes;
  const std::size_t op_count = cfg.lowered->catalog().size();
  if (ops.empty()) {
    for (std::size_t i = 0; i < op_count; ++i) ops.push_back(i);
  }
  const std::size_t total = ops.size() * opts.cases_per_op;
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));

  struct Partial {
    std::size_t failures = 0;
    std::vector<std::size_t> failures_by_op, unpredictable_by_op;
    std::vector<std::pair<std::size_t, Verdict>> examples;
  };
  std::vector<Partial> parts(threads);
  auto work = [&](unsigned t) {
    Partial& p = parts[t];
    p.failures_by_op.assign(op_count, 0);
    p.unpredictable_by_op.assign(op_count, 0);
    for (std::size_t g = t; g < total; g += threads) {
      const std::size_t op = ops[g / opts.cases_per_op];
      const std::uint64_t seed = case_seed(opts.seed, op, g % opts.cases_per_op);
      CaseRng rng(seed ^ 0xC0DEull);
      const Word32 word = random_word_for(op, rng, cfg.lowered->catalog());
      Verdict v = opts.check == SuiteOptions::Check::commutes ? check_commutes(word, seed, cfg)
                                                              : check_frame(word, seed, cfg);
      if (!v.ref_outcome.ok() && v.ref_outcome.kind == v.fast_outcome.kind) ++p.unpredictable_by_op[op];
      if (v.pass()) continue;
      ++p.failures;
      ++p.failures_by_op[op];
      if (p.examples.size() < opts.keep_failures) p.examples.emplace_back(g, std::move(v));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  SuiteReport r;
  r.cases = total;
  r.failures_by_op.assign(op_count, 0);
  r.unpredictable_by_op.assign(op_count, 0);
  std::vector<std::pair<std::size_t, Verdict>> examples;
  for (auto& p : parts) {
    r.failures += p.failures;
    for (std::size_t i = 0; i < op_count; ++i) {
      r.failures_by_op[i] += p.failures_by_op[i];
      r.unpredictable_by_op[i] += p.unpredictable_by_op[i];
    }
    for (auto& e : p.examples) examples.push_back(std::move(e));
  }
  std::sort(examples.begin(), examples.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& e : examples) {
    if (r.examples.size() == opts.keep_failures) break;
    r.examples.push_back(std::move(e.second));
  }
  r.wall = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
  return r;
}

}  // namespace armsim
