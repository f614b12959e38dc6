// Abstract syntax of instruction pseudocode, shared by the reference
// interpreter and the lowering to the fast engine.

#ifndef ARMSIM_AST_HPP
#define ARMSIM_AST_HPP

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "armsim/state.hpp"

namespace armsim::ast {

/// Immutable shared node with structural equality.
template <class T>
class Box {
 public:
  Box(T value) : p_(std::make_shared<const T>(std::move(value))) {}

  const T& operator*() const { return *p_; }
  const T* operator->() const { return p_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return a.p_ == b.p_ || *a.p_ == *b.p_; }

 private:
  std::shared_ptr<const T> p_;
};

enum class BinaryOp : std::uint8_t {
  add, sub, bit_and, bit_or, bit_eor, shl, shr,
  eq, ne, lt, le, gt, ge, log_and, log_or
};

struct Exp;
struct Stm;
using ExpRef = Box<Exp>;
using StmRef = Box<Stm>;

struct VarExp { std::string name; friend bool operator==(const VarExp&, const VarExp&) = default; };
struct ConstExp { Word32 value; friend bool operator==(const ConstExp&, const ConstExp&) = default; };
struct RegExp {
  ExpRef index;
  std::optional<ProcessorMode> mode;
  friend bool operator==(const RegExp&, const RegExp&) = default;
};
struct CpsrExp { friend bool operator==(const CpsrExp&, const CpsrExp&) = default; };
struct SpsrExp {
  std::optional<ProcessorMode> mode;
  friend bool operator==(const SpsrExp&, const SpsrExp&) = default;
};
struct MemoryExp {
  ExpRef address;
  MemSize size;
  friend bool operator==(const MemoryExp&, const MemoryExp&) = default;
};
struct FlagExp { FlagId flag; friend bool operator==(const FlagExp&, const FlagExp&) = default; };
struct BinExp {
  ExpRef lhs;
  BinaryOp op;
  ExpRef rhs;
  friend bool operator==(const BinExp&, const BinExp&) = default;
};
struct IfExp {
  ExpRef cond;
  ExpRef then_value;
  ExpRef else_value;
  friend bool operator==(const IfExp&, const IfExp&) = default;
};
struct FunExp {
  std::string name;
  std::vector<ExpRef> args;
  friend bool operator==(const FunExp&, const FunExp&) = default;
};
struct BitRangeExp {
  ExpRef value;
  unsigned hi;
  unsigned lo;
  friend bool operator==(const BitRangeExp&, const BitRangeExp&) = default;
};
/// Value of a register-index parameter's register at operation entry.
struct OldParamExp {
  std::string name;
  friend bool operator==(const OldParamExp&, const OldParamExp&) = default;
};
/// Value of a flag at operation entry.
struct OldFlagExp { FlagId flag; friend bool operator==(const OldFlagExp&, const OldFlagExp&) = default; };

struct Exp {
  std::variant<VarExp, ConstExp, RegExp, CpsrExp, SpsrExp, MemoryExp, FlagExp, BinExp, IfExp,
               FunExp, BitRangeExp, OldParamExp, OldFlagExp>
      node;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }

  friend bool operator==(const Exp&, const Exp&) = default;
};

struct AssignStm {
  ExpRef target;
  ExpRef value;
  friend bool operator==(const AssignStm&, const AssignStm&) = default;
};
struct IfStm {
  ExpRef cond;
  StmRef then_branch;
  std::optional<StmRef> else_branch;
  friend bool operator==(const IfStm&, const IfStm&) = default;
};
/// Inclusive counting loop; bounds are evaluated once.
struct ForStm {
  std::string counter;
  ExpRef first;
  ExpRef last;
  StmRef body;
  friend bool operator==(const ForStm&, const ForStm&) = default;
};
struct CaseArm {
  Word32 pattern;
  StmRef body;
  friend bool operator==(const CaseArm&, const CaseArm&) = default;
};
struct CaseStm {
  ExpRef selector;
  std::vector<CaseArm> arms;
  StmRef otherwise;
  friend bool operator==(const CaseStm&, const CaseStm&) = default;
};
struct BlockStm {
  std::vector<StmRef> body;
  friend bool operator==(const BlockStm&, const BlockStm&) = default;
};
struct UnpredictableStm { friend bool operator==(const UnpredictableStm&, const UnpredictableStm&) = default; };
struct ProcStm {
  std::string name;
  std::vector<ExpRef> args;
  friend bool operator==(const ProcStm&, const ProcStm&) = default;
};

struct Stm {
  std::variant<AssignStm, IfStm, ForStm, CaseStm, BlockStm, UnpredictableStm, ProcStm> node;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }

  friend bool operator==(const Stm&, const Stm&) = default;
};

enum class ParamKind : std::uint8_t { bit, condition, register_index, word };

struct Param {
  std::string name;
  ParamKind kind;
  friend bool operator==(const Param&, const Param&) = default;
};

struct OperationAst {
  std::string section;  // manual section tag, e.g. "A4.1.2"; may be empty
  std::string name;     // e.g. "ADC"
  std::vector<Param> params;
  Stm body{BlockStm{}};

  std::string ident() const { return section.empty() ? name : section + " " + name; }
  const Param* find_param(std::string_view n) const;

  friend bool operator==(const OperationAst&, const OperationAst&) = default;
};

// Construction helpers, mostly for tests.
Exp var(std::string name);
Exp constant(Word32 v);
Exp reg(Exp index, std::optional<ProcessorMode> mode = std::nullopt);
Exp flag(FlagId f);
Exp binop(Exp lhs, BinaryOp op, Exp rhs);
Exp fun(std::string name, std::vector<Exp> args);
Exp bit_range(Exp value, unsigned hi, unsigned lo);
Stm assign(Exp target, Exp value);
Stm block(std::vector<Stm> body);

std::string_view binary_op_symbol(BinaryOp op);
std::string_view param_kind_name(ParamKind k);
char flag_letter(FlagId f);

}  // namespace armsim::ast

#endif  // ARMSIM_AST_HPP
