#include "armsim/reference.hpp"

#include "armsim/builtins.hpp"

namespace armsim {

using namespace ast;

std::string_view step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::ok: return "ok";
    case StepKind::unpredictable: return "unpredictable";
    case StepKind::not_implemented: return "not-implemented";
    case StepKind::undefined: return "undefined";
  }
  return "?";
}

namespace {

Outcome<unsigned> register_index(Word32 v) {
  if (v > 15) return unpredictable("register index " + std::to_string(v) + " out of range");
  return static_cast<unsigned>(v);
}

Word32 read_banked(const RefState& st, ProcessorMode mode, unsigned n) {
  const Word32 v = st.regs.physical(mode, n);
  return n == 15 ? v + 8 : v;
}

Outcome<Word32> binary(BinaryOp op, Word32 a, Word32 b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::bit_and: return a & b;
    case BinaryOp::bit_or: return a | b;
    case BinaryOp::bit_eor: return a ^ b;
    case BinaryOp::shl: return b >= 32 ? 0u : a << b;
    case BinaryOp::shr: return b >= 32 ? 0u : a >> b;
    case BinaryOp::eq: return Word32{a == b};
    case BinaryOp::ne: return Word32{a != b};
    case BinaryOp::lt: return Word32{a < b};
    case BinaryOp::le: return Word32{a <= b};
    case BinaryOp::gt: return Word32{a > b};
    case BinaryOp::ge: return Word32{a >= b};
    case BinaryOp::log_and: return Word32{a != 0 && b != 0};
    case BinaryOp::log_or: return Word32{a != 0 || b != 0};
  }
  return not_implemented("unknown operator");
}

Outcome<Word32> read_spsr(const RefState& st, ProcessorMode mode) {
  if (!mode_has_spsr(mode)) {
    return unpredictable("SPSR accessed in " + std::string(mode_name(mode)) + " mode");
  }
  return st.spsr[spsr_index(mode)].pack();
}

class Interp {
 public:
  explicit Interp(const RefState& entry) : entry_(entry) {}

  Outcome<Word32> eval(const Exp& e, const SemState& cur) const {
    const RefState& st = cur.st;
    if (auto c = e.as<ConstExp>()) return c->value;
    if (auto v = e.as<VarExp>()) {
      auto it = cur.loc.find(v->name);
      if (it == cur.loc.end()) return not_implemented("variable " + v->name + " read before assignment");
      return it->second;
    }
    if (auto r = e.as<RegExp>()) {
      auto idx = eval(*r->index, cur);
      if (!idx.ok()) return idx;
      auto n = register_index(idx.value());
      if (!n.ok()) return n.fault();
      return r->mode ? read_banked(st, *r->mode, n.value()) : reg_content(st, n.value());
    }
    if (e.as<CpsrExp>()) return st.cpsr.pack();
    if (auto s = e.as<SpsrExp>()) return read_spsr(st, s->mode.value_or(st.cpsr.mode));
    if (auto m = e.as<MemoryExp>()) {
      auto a = eval(*m->address, cur);
      if (!a.ok()) return a;
      return mem_read(st, a.value(), m->size);
    }
    if (auto f = e.as<FlagExp>()) return Word32{st.cpsr.flag(f->flag)};
    if (auto b = e.as<BinExp>()) {
      auto l = eval(*b->lhs, cur);
      if (!l.ok()) return l;
      if (b->op == BinaryOp::log_and && l.value() == 0) return 0u;
      if (b->op == BinaryOp::log_or && l.value() != 0) return 1u;
      auto r = eval(*b->rhs, cur);
      if (!r.ok()) return r;
      return binary(b->op, l.value(), r.value());
    }
    if (auto i = e.as<IfExp>()) {
      auto c = eval(*i->cond, cur);
      if (!c.ok()) return c;
      return eval(c.value() ? *i->then_value : *i->else_value, cur);
    }
    if (auto f = e.as<FunExp>()) {
      auto info = find_builtin(f->name);
      if (!info) return not_implemented("unknown function " + f->name);
      Word32 args[4] = {};
      if (f->args.size() > 4 || f->args.size() != info->arity) {
        return not_implemented("bad call of " + f->name);
      }
      for (std::size_t k = 0; k < f->args.size(); ++k) {
        auto a = eval(*f->args[k], cur);
        if (!a.ok()) return a;
        args[k] = a.value();
      }
      return call_builtin(info->id, std::span<const Word32>(args, f->args.size()), st.cpsr);
    }
    if (auto br = e.as<BitRangeExp>()) {
      auto v = eval(*br->value, cur);
      if (!v.ok()) return v;
      return get_bit_range(v.value(), br->hi, br->lo);
    }
    if (auto o = e.as<OldParamExp>()) {
      auto it = cur.loc.find(o->name);
      if (it == cur.loc.end()) return not_implemented("parameter " + o->name + " is not bound");
      auto n = register_index(it->second);
      if (!n.ok()) return n.fault();
      return reg_content(entry_, n.value());
    }
    if (auto o = e.as<OldFlagExp>()) return Word32{entry_.cpsr.flag(o->flag)};
    return not_implemented("unsupported expression");
  }

  SemResult assign(const Exp& target, Word32 v, SemState cur) const {
    if (auto r = target.as<RegExp>()) {
      auto idx = eval(*r->index, cur);
      if (!idx.ok()) return idx.fault();
      auto n = register_index(idx.value());
      if (!n.ok()) return n.fault();
      if (r->mode) {
        cur.st.regs.physical(*r->mode, n.value()) = v;
      } else {
        cur.st = set_reg(std::move(cur.st), n.value(), v);
      }
      if (n.value() == 15) cur.bo = false;
      return cur;
    }
    if (auto f = target.as<FlagExp>()) {
      cur.st.cpsr.set_flag(f->flag, (v & 1) != 0);
      return cur;
    }
    if (auto var = target.as<VarExp>()) {
      cur.loc[var->name] = v;
      return cur;
    }
    if (target.as<CpsrExp>()) {
      auto c = Cpsr::unpack(v);
      if (!c) return unpredictable("CPSR write with invalid mode bits");
      cur.st.cpsr = *c;
      return cur;
    }
    if (auto s = target.as<SpsrExp>()) {
      const ProcessorMode mode = s->mode.value_or(cur.st.cpsr.mode);
      if (!mode_has_spsr(mode)) {
        return unpredictable("SPSR written in " + std::string(mode_name(mode)) + " mode");
      }
      auto c = Cpsr::unpack(v);
      if (!c) return unpredictable("SPSR write with invalid mode bits");
      cur.st.spsr[spsr_index(mode)] = *c;
      return cur;
    }
    if (auto m = target.as<MemoryExp>()) {
      auto a = eval(*m->address, cur);
      if (!a.ok()) return a.fault();
      auto st = mem_write(std::move(cur.st), a.value(), m->size, v);
      if (!st.ok()) return st.fault();
      cur.st = std::move(st.value());
      return cur;
    }
    if (auto br = target.as<BitRangeExp>()) {
      auto old = eval(*br->value, cur);
      if (!old.ok()) return old.fault();
      return assign(*br->value, set_bit_range(old.value(), br->hi, br->lo, v), std::move(cur));
    }
    return not_implemented("unsupported assignment target");
  }

  SemResult exec(const Stm& s, SemState cur) const {
    if (auto a = s.as<AssignStm>()) {
      auto v = eval(*a->value, cur);
      if (!v.ok()) return v.fault();
      return assign(*a->target, v.value(), std::move(cur));
    }
    if (auto b = s.as<BlockStm>()) {
      for (const auto& x : b->body) {
        auto r = exec(*x, std::move(cur));
        if (!r.ok()) return r;
        cur = std::move(r.value());
      }
      return cur;
    }
    if (auto i = s.as<IfStm>()) {
      auto c = eval(*i->cond, cur);
      if (!c.ok()) return c.fault();
      if (c.value()) return exec(*i->then_branch, std::move(cur));
      if (i->else_branch) return exec(**i->else_branch, std::move(cur));
      return cur;
    }
    if (s.as<UnpredictableStm>()) return unpredictable("UNPREDICTABLE");
    if (auto f = s.as<ForStm>()) {
      auto lo = eval(*f->first, cur);
      if (!lo.ok()) return lo.fault();
      auto hi = eval(*f->last, cur);
      if (!hi.ok()) return hi.fault();
      for (std::uint64_t k = lo.value(); k <= hi.value(); ++k) {
        cur.loc[f->counter] = static_cast<Word32>(k);
        auto r = exec(*f->body, std::move(cur));
        if (!r.ok()) return r;
        cur = std::move(r.value());
      }
      return cur;
    }
    if (auto c = s.as<CaseStm>()) {
      auto sel = eval(*c->selector, cur);
      if (!sel.ok()) return sel.fault();
      for (const auto& arm : c->arms) {
        if (arm.pattern == sel.value()) return exec(*arm.body, std::move(cur));
      }
      return exec(*c->otherwise, std::move(cur));
    }
    if (auto p = s.as<ProcStm>()) {
      if (p->name == "Unimplemented") return not_implemented("Unimplemented()");
      return not_implemented("unknown procedure " + p->name);
    }
    return not_implemented("unsupported statement");
  }

 private:
  const RefState& entry_;
};

}  // namespace

Outcome<Word32> eval_exp(const Exp& e, const RefState& entry, const SemState& cur) {
  return Interp(entry).eval(e, cur);
}

SemResult exec_stm(const Stm& s, const RefState& entry, const SemState& cur) {
  return Interp(entry).exec(s, cur);
}

SemResult run_operation(const OperationAst& op, const Args& args, const RefState& st) {
  SemState cur;
  cur.st = st;
  for (const auto& p : op.params) {
    auto it = args.find(p.name);
    if (it == args.end()) return not_implemented(op.ident() + ": parameter " + p.name + " not bound");
    cur.loc[p.name] = it->second;
  }
  SemResult r = exec_stm(op.body, st, cur);
  if (!r.ok()) return Fault{r.fault().kind, op.ident() + ": " + r.fault().message};
  return r;
}

Args instruction_args(const OperationSpec& spec, const DecodedInstr& instr, const RefState& st) {
  Args args;
  for (const auto& f : instr.fields) args[f.name] = f.value;
  if (instr.shifter) {
    const ShifterResult s = compute_shifter_operand(*instr.shifter, st);
    args[std::string(kShifterOperand)] = s.value;
    if (spec.ast.find_param(kShifterCarryOut)) args[std::string(kShifterCarryOut)] = s.carry_out;
  }
  return args;
}

RefStep ref_execute(const RefState& st, const DecodedInstr& instr, const Catalog& cat) {
  const OperationSpec& spec = cat.at(instr.op);
  RefStep out{StepOutcome{StepKind::ok, "", pc_of(st), 0}, st};
  SemResult r = run_operation(spec.ast, instruction_args(spec, instr, st), st);
  if (!r.ok()) {
    out.outcome.kind = step_kind(r.fault().kind);
    out.outcome.message = r.fault().message;
    return out;
  }
  out.state = std::move(r.value().st);
  if (r.value().bo) out.state.regs.user[15] += 4;
  return out;
}

RefStep ref_step(const RefState& st, const Decoder& dec, const FetchWindow* window) {
  const Word32 pc = pc_of(st);
  if (window && !window->contains(pc)) {
    return {StepOutcome{StepKind::undefined, "fetch outside the loaded image", pc, 0}, st};
  }
  auto word = mem_read(st, pc, MemSize::word);
  if (!word.ok()) return {StepOutcome{StepKind::unpredictable, "fetch: " + word.fault().message, pc, 0}, st};
  const Word32 w = word.value();
  auto instr = dec.decode(w);
  if (!instr) {
    if (auto cls = unmodeled_class(w)) {
      return {StepOutcome{StepKind::not_implemented, *cls + " is not modeled", pc, w}, st};
    }
    return {StepOutcome{StepKind::undefined, "undefined instruction", pc, w}, st};
  }
  RefStep r = ref_execute(st, *instr, dec.catalog());
  r.outcome.word = w;
  return r;
}

}  // namespace armsim
