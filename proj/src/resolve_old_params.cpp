#include <set>

#include "armsim/pseudocode.hpp"

namespace armsim {

using namespace ast;

namespace {

struct Written {
  bool any_register = false;
  std::set<std::string> params;
  std::set<FlagId> flags;

  void merge(const Written& o) {
    any_register = any_register || o.any_register;
    params.insert(o.params.begin(), o.params.end());
    flags.insert(o.flags.begin(), o.flags.end());
  }
};

class Resolver {
 public:
  explicit Resolver(const OperationAst& op) : op_(op) {}

  Stm stm(const Stm& s, Written& w) {
    if (auto a = s.as<AssignStm>()) {
      Exp value = exp(*a->value, w);
      Exp target = lvalue(*a->target, w);
      record_write(target, w);
      return Stm{AssignStm{std::move(target), std::move(value)}};
    }
    if (auto i = s.as<IfStm>()) {
      Exp cond = exp(*i->cond, w);
      Written then_w = w;
      Stm then_s = stm(*i->then_branch, then_w);
      std::optional<StmRef> else_s;
      if (i->else_branch) {
        Written else_w = w;
        else_s = stm(**i->else_branch, else_w);
        w.merge(else_w);
      }
      w.merge(then_w);
      return Stm{IfStm{std::move(cond), std::move(then_s), std::move(else_s)}};
    }
    if (auto f = s.as<ForStm>()) {
      Exp first = exp(*f->first, w);
      Exp last = exp(*f->last, w);
      // The second pass sees writes from earlier iterations.
      Written probe = w;
      stm(*f->body, probe);
      w.merge(probe);
      Stm body = stm(*f->body, w);
      return Stm{ForStm{f->counter, std::move(first), std::move(last), std::move(body)}};
    }
    if (auto c = s.as<CaseStm>()) {
      Exp sel = exp(*c->selector, w);
      Written out = w;
      std::vector<CaseArm> arms;
      for (const auto& arm : c->arms) {
        Written aw = w;
        arms.push_back(CaseArm{arm.pattern, stm(*arm.body, aw)});
        out.merge(aw);
      }
      Written ow = w;
      Stm other = stm(*c->otherwise, ow);
      out.merge(ow);
      w = std::move(out);
      return Stm{CaseStm{std::move(sel), std::move(arms), std::move(other)}};
    }
    if (auto b = s.as<BlockStm>()) {
      std::vector<StmRef> body;
      for (const auto& x : b->body) body.push_back(stm(*x, w));
      return Stm{BlockStm{std::move(body)}};
    }
    if (auto p = s.as<ProcStm>()) {
      std::vector<ExpRef> args;
      for (const auto& a : p->args) args.push_back(exp(*a, w));
      return Stm{ProcStm{p->name, std::move(args)}};
    }
    return s;
  }

 private:
  bool is_register_param(const std::string& name) const {
    const Param* p = op_.find_param(name);
    return p && p->kind == ParamKind::register_index;
  }

  // Rewrites the reads inside an assignment target but not the target itself.
  Exp lvalue(const Exp& e, const Written& w) {
    if (auto r = e.as<RegExp>()) return Exp{RegExp{exp(*r->index, w), r->mode}};
    if (auto m = e.as<MemoryExp>()) return Exp{MemoryExp{exp(*m->address, w), m->size}};
    return e;
  }

  void record_write(const Exp& target, Written& w) {
    if (auto r = target.as<RegExp>()) {
      w.any_register = true;
      if (auto v = r->index->as<VarExp>(); v && !r->mode) w.params.insert(v->name);
    } else if (auto f = target.as<FlagExp>()) {
      w.flags.insert(f->flag);
    } else if (target.as<CpsrExp>()) {
      w.any_register = true;
      w.flags.insert({FlagId::N, FlagId::Z, FlagId::C, FlagId::V});
    }
  }

  Exp exp(const Exp& e, const Written& w) {
    return std::visit(
        [&](const auto& n) -> Exp {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, RegExp>) {
            if (auto v = n.index->template as<VarExp>()) {
              if (!n.mode && is_register_param(v->name) && w.any_register &&
                  !w.params.count(v->name)) {
                return Exp{OldParamExp{v->name}};
              }
              return e;
            }
            return Exp{RegExp{exp(*n.index, w), n.mode}};
          } else if constexpr (std::is_same_v<T, FlagExp>) {
            if (w.flags.count(n.flag)) return Exp{OldFlagExp{n.flag}};
            return e;
          } else if constexpr (std::is_same_v<T, MemoryExp>) {
            return Exp{MemoryExp{exp(*n.address, w), n.size}};
          } else if constexpr (std::is_same_v<T, BinExp>) {
            return Exp{BinExp{exp(*n.lhs, w), n.op, exp(*n.rhs, w)}};
          } else if constexpr (std::is_same_v<T, IfExp>) {
            return Exp{IfExp{exp(*n.cond, w), exp(*n.then_value, w), exp(*n.else_value, w)}};
          } else if constexpr (std::is_same_v<T, FunExp>) {
            std::vector<ExpRef> args;
            for (const auto& a : n.args) args.push_back(exp(*a, w));
            return Exp{FunExp{n.name, std::move(args)}};
          } else if constexpr (std::is_same_v<T, BitRangeExp>) {
            return Exp{BitRangeExp{exp(*n.value, w), n.hi, n.lo}};
          } else {
            return e;
          }
        },
        e.node);
  }

  const OperationAst& op_;
};

}  // namespace

OperationAst resolve_old_params(const OperationAst& op) {
  Resolver r(op);
  Written w;
  OperationAst out = op;
  out.body = r.stm(op.body, w);
  return out;
}

}  // namespace armsim
