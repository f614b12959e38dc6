#include "armsim/ast.hpp"

namespace armsim::ast {

const Param* OperationAst::find_param(std::string_view n) const {
  for (const auto& p : params) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

Exp var(std::string name) { return Exp{VarExp{std::move(name)}}; }
Exp constant(Word32 v) { return Exp{ConstExp{v}}; }
Exp reg(Exp index, std::optional<ProcessorMode> mode) {
  return Exp{RegExp{std::move(index), mode}};
}
Exp flag(FlagId f) { return Exp{FlagExp{f}}; }
Exp binop(Exp lhs, BinaryOp op, Exp rhs) { return Exp{BinExp{std::move(lhs), op, std::move(rhs)}}; }

Exp fun(std::string name, std::vector<Exp> args) {
  std::vector<ExpRef> refs(args.begin(), args.end());
  return Exp{FunExp{std::move(name), std::move(refs)}};
}

Exp bit_range(Exp value, unsigned hi, unsigned lo) {
  return Exp{BitRangeExp{std::move(value), hi, lo}};
}

Stm assign(Exp target, Exp value) { return Stm{AssignStm{std::move(target), std::move(value)}}; }

Stm block(std::vector<Stm> body) {
  std::vector<StmRef> refs(body.begin(), body.end());
  return Stm{BlockStm{std::move(refs)}};
}

std::string_view binary_op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::bit_and: return "AND";
    case BinaryOp::bit_or: return "OR";
    case BinaryOp::bit_eor: return "EOR";
    case BinaryOp::shl: return "<<";
    case BinaryOp::shr: return ">>";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::log_and: return "and";
    case BinaryOp::log_or: return "or";
  }
  return "?";
}

std::string_view param_kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::bit: return "bit";
    case ParamKind::condition: return "condition";
    case ParamKind::register_index: return "register";
    case ParamKind::word: return "word";
  }
  return "?";
}

char flag_letter(FlagId f) {
  switch (f) {
    case FlagId::N: return 'N';
    case FlagId::Z: return 'Z';
    case FlagId::C: return 'C';
    case FlagId::V: return 'V';
  }
  return '?';
}

}  // namespace armsim::ast
