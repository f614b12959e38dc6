#include <sstream>

#include "armsim/pseudocode.hpp"

namespace armsim {

using namespace ast;

namespace {

constexpr int kIfLevel = -1;
constexpr int kUnaryLevel = 9;
constexpr int kPostfixLevel = 10;
constexpr int kPrimaryLevel = 11;

int op_level(BinaryOp op) {
  switch (op) {
    case BinaryOp::log_or: return 0;
    case BinaryOp::log_and: return 1;
    case BinaryOp::bit_or: return 2;
    case BinaryOp::bit_eor: return 3;
    case BinaryOp::bit_and: return 4;
    case BinaryOp::eq:
    case BinaryOp::ne: return 5;
    case BinaryOp::lt:
    case BinaryOp::le:
    case BinaryOp::gt:
    case BinaryOp::ge: return 6;
    case BinaryOp::shl:
    case BinaryOp::shr: return 7;
    case BinaryOp::add:
    case BinaryOp::sub: return 8;
  }
  return 0;
}

int level_of(const Exp& e) {
  if (auto b = e.as<BinExp>()) return op_level(b->op);
  if (e.as<IfExp>()) return kIfLevel;
  if (auto f = e.as<FunExp>(); f && f->name == "NOT") return kUnaryLevel;
  if (e.as<BitRangeExp>()) return kPostfixLevel;
  return kPrimaryLevel;
}

std::string constant_text(Word32 v) {
  if (v < 256) return std::to_string(v);
  std::ostringstream os;
  os << "0x" << std::uppercase << std::hex << v;
  return os.str();
}

std::string mode_suffix(const std::optional<ProcessorMode>& m) {
  return m ? "_" + std::string(mode_name(*m)) : "";
}

std::string print_at(const Exp& e, int min_level);

std::string register_text(const RegExp& r) {
  if (auto v = r.index->as<VarExp>()) return "R" + v->name + mode_suffix(r.mode);
  if (auto c = r.index->as<ConstExp>(); c && c->value <= 15) {
    if (!r.mode && c->value == 15) return "PC";
    if (!r.mode && c->value == 14) return "LR";
    return "R" + std::to_string(c->value) + mode_suffix(r.mode);
  }
  return "R[" + print_at(*r.index, kIfLevel) + "]";
}

std::string print_node(const Exp& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExp>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, ConstExp>) {
          return constant_text(n.value);
        } else if constexpr (std::is_same_v<T, RegExp>) {
          return register_text(n);
        } else if constexpr (std::is_same_v<T, CpsrExp>) {
          return "CPSR";
        } else if constexpr (std::is_same_v<T, SpsrExp>) {
          return "SPSR" + mode_suffix(n.mode);
        } else if constexpr (std::is_same_v<T, MemoryExp>) {
          return "Memory[" + print_at(*n.address, kIfLevel) + ", " +
                 std::to_string(static_cast<unsigned>(n.size)) + "]";
        } else if constexpr (std::is_same_v<T, FlagExp>) {
          return std::string(1, flag_letter(n.flag)) + " Flag";
        } else if constexpr (std::is_same_v<T, BinExp>) {
          const int lvl = op_level(n.op);
          return print_at(*n.lhs, lvl) + " " + std::string(binary_op_symbol(n.op)) + " " +
                 print_at(*n.rhs, lvl + 1);
        } else if constexpr (std::is_same_v<T, IfExp>) {
          return "if " + print_at(*n.cond, kIfLevel) + " then " + print_at(*n.then_value, kIfLevel) +
                 " else " + print_at(*n.else_value, kIfLevel);
        } else if constexpr (std::is_same_v<T, FunExp>) {
          if (n.name == "NOT") return "NOT(" + print_at(*n.args[0], kIfLevel) + ")";
          if (n.name == "CarryFrom_add3" || n.name == "OverflowFrom_add3") {
            std::string out = n.name == "CarryFrom_add3" ? "CarryFrom(" : "OverflowFrom(";
            out += print_at(*n.args[0], kUnaryLevel) + " + " + print_at(*n.args[1], kUnaryLevel);
            const auto* c = n.args[2]->template as<ConstExp>();
            if (!c || c->value != 0) out += " + " + print_at(*n.args[2], kUnaryLevel);
            return out + ")";
          }
          std::string out = n.name + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            out += print_at(*n.args[i], kIfLevel);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, BitRangeExp>) {
          std::string out = print_at(*n.value, kPostfixLevel) + "[" + std::to_string(n.hi);
          if (n.lo != n.hi) out += ":" + std::to_string(n.lo);
          return out + "]";
        } else if constexpr (std::is_same_v<T, OldParamExp>) {
          return "old(R" + n.name + ")";
        } else {
          static_assert(std::is_same_v<T, OldFlagExp>);
          return std::string("old(") + flag_letter(n.flag) + " Flag)";
        }
      },
      e.node);
}

std::string print_at(const Exp& e, int min_level) {
  std::string s = print_node(e);
  return level_of(e) < min_level ? "(" + s + ")" : s;
}

// What follows a statement in the printed text; decides whether an
// explicit `endif`/`endfor` is needed to close it.
enum class Follow { nothing, statement, else_keyword, endif_keyword, endfor_keyword };

class StmPrinter {
 public:
  std::string result() const { return out_.str(); }

  void stmts(const std::vector<StmRef>& list, int indent, Follow follow) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      line_start(indent);
      stm(*list[i], indent, i + 1 < list.size() ? Follow::statement : follow);
    }
  }

  // Prints s starting at the current position of the current line.
  void stm(const Stm& s, int indent, Follow follow) {
    if (auto a = s.as<AssignStm>()) {
      out_ << print_at(*a->target, kIfLevel) << " = " << print_at(*a->value, kIfLevel);
    } else if (s.as<UnpredictableStm>()) {
      out_ << "UNPREDICTABLE";
    } else if (auto p = s.as<ProcStm>()) {
      out_ << p->name << "(";
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        if (i) out_ << ", ";
        out_ << print_at(*p->args[i], kIfLevel);
      }
      out_ << ")";
    } else if (auto b = s.as<BlockStm>()) {
      // A bare block only appears as a branch; flatten it here.
      for (std::size_t i = 0; i < b->body.size(); ++i) {
        if (i) line_start(indent);
        stm(*b->body[i], indent, i + 1 < b->body.size() ? Follow::statement : follow);
      }
    } else if (auto i = s.as<IfStm>()) {
      if_stm(*i, indent, follow);
    } else if (auto f = s.as<ForStm>()) {
      const bool closed =
          follow == Follow::endfor_keyword || (follow == Follow::statement && f->body->as<BlockStm>());
      out_ << "for " << f->counter << " = " << print_at(*f->first, kIfLevel) << " to "
           << print_at(*f->last, kIfLevel) << " do";
      branch(*f->body, indent, closed ? Follow::endfor_keyword : follow);
      if (closed) {
        line_start(indent);
        out_ << "endfor";
      }
    } else if (auto c = s.as<CaseStm>()) {
      out_ << "case " << print_at(*c->selector, kIfLevel) << " of";
      for (const auto& arm : c->arms) {
        line_start(indent + 1);
        out_ << constant_text(arm.pattern) << " =>";
        branch(*arm.body, indent + 1, Follow::nothing);
      }
      const auto* other = c->otherwise->as<BlockStm>();
      if (!other || !other->body.empty()) {
        line_start(indent + 1);
        out_ << "otherwise =>";
        branch(*c->otherwise, indent + 1, Follow::nothing);
      }
      line_start(indent);
      out_ << "endcase";
    }
  }

 private:
  void line_start(int indent) {
    if (started_) out_ << "\n";
    started_ = true;
    out_ << std::string(static_cast<std::size_t>(indent) * 4, ' ');
  }

  void branch(const Stm& s, int indent, Follow follow) {
    if (auto b = s.as<BlockStm>()) {
      stmts(b->body, indent + 1, follow);
    } else {
      out_ << " ";
      stm(s, indent, follow);
    }
  }

  void if_stm(const IfStm& i, int indent, Follow follow) {
    const Stm& last = i.else_branch ? **i.else_branch : *i.then_branch;
    const bool closed = (!i.else_branch && follow == Follow::else_keyword) ||
                        follow == Follow::endif_keyword ||
                        (follow == Follow::statement && last.as<BlockStm>());
    const Follow inner = closed ? Follow::endif_keyword : follow;
    out_ << "if " << print_at(*i.cond, kIfLevel) << " then";
    branch(*i.then_branch, indent, i.else_branch ? Follow::else_keyword : inner);
    if (i.else_branch) {
      line_start(indent);
      out_ << "else";
      branch(**i.else_branch, indent, inner);
    }
    if (closed) {
      line_start(indent);
      out_ << "endif";
    }
  }

  std::ostringstream out_;
  bool started_ = false;
};

}  // namespace

std::string print_exp(const Exp& e) { return print_at(e, kIfLevel); }

std::string print_stm(const Stm& s) {
  StmPrinter p;
  if (auto b = s.as<BlockStm>()) {
    p.stmts(b->body, 0, Follow::nothing);
  } else {
    p.stmts({StmRef(s)}, 0, Follow::nothing);
  }
  return p.result();
}

std::string print_operation(const OperationAst& op) {
  std::ostringstream os;
  os << op.ident() << "\n";
  for (const auto& p : op.params) {
    os << "param " << p.name << " : " << param_kind_name(p.kind) << "\n";
  }
  os << print_stm(op.body) << "\n";
  return os.str();
}

}  // namespace armsim
