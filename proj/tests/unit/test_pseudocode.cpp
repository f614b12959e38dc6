#include <random>
#include <regex>

#include "armsim/catalog.hpp"
#include "armsim/pseudocode.hpp"
#include "armsim/reference.hpp"
#include "doctest.h"

using namespace armsim;
using namespace armsim::ast;

namespace {

const char* const kAdcListing = R"(A4.1.2 ADC
param cond : condition
param S : bit
param d : register
param n : register
param shifter_operand : word
    if ConditionPassed(cond) then
        Rd = Rn + shifter_operand + C Flag;
        if S == 1 and d == 15 then
            if CurrentModeHasSPSR() then
                CPSR = SPSR;
            else UNPREDICTABLE
        else if S == 1 then
            N Flag = Rd[31];
            Z Flag = if Rd == 0 then 1 else 0;
            C Flag = CarryFrom(Rn + shifter_operand + C Flag);
            V Flag = OverflowFrom(Rn + shifter_operand + C Flag);
)";

// Text with comments, whitespace and statement separators removed.
std::string squash(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
    for (char ch : line) {
      if (!std::isspace(static_cast<unsigned char>(ch)) && ch != ';') out += ch;
    }
  }
  return out;
}

bool contains_exp(const Stm& s, const Exp& needle);

bool contains_exp(const Exp& e, const Exp& needle) {
  if (e == needle) return true;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RegExp>) return contains_exp(*n.index, needle);
        else if constexpr (std::is_same_v<T, MemoryExp>) return contains_exp(*n.address, needle);
        else if constexpr (std::is_same_v<T, BinExp>)
          return contains_exp(*n.lhs, needle) || contains_exp(*n.rhs, needle);
        else if constexpr (std::is_same_v<T, IfExp>)
          return contains_exp(*n.cond, needle) || contains_exp(*n.then_value, needle) ||
                 contains_exp(*n.else_value, needle);
        else if constexpr (std::is_same_v<T, FunExp>) {
          for (const auto& a : n.args)
            if (contains_exp(*a, needle)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, BitRangeExp>) return contains_exp(*n.value, needle);
        else return false;
      },
      e.node);
}

bool contains_exp(const Stm& s, const Exp& needle) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AssignStm>)
          return contains_exp(*n.target, needle) || contains_exp(*n.value, needle);
        else if constexpr (std::is_same_v<T, IfStm>)
          return contains_exp(*n.cond, needle) || contains_exp(*n.then_branch, needle) ||
                 (n.else_branch && contains_exp(**n.else_branch, needle));
        else if constexpr (std::is_same_v<T, BlockStm>) {
          for (const auto& x : n.body)
            if (contains_exp(*x, needle)) return true;
          return false;
        } else return false;
      },
      s.node);
}

// Random ASTs for the printer/parser property.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  unsigned pick(unsigned n) { return rng_() % n; }

  Exp exp(int depth) {
    const unsigned k = depth <= 0 ? pick(6) : pick(17);
    switch (k) {
      case 0: return constant(pick(2) ? pick(300) : static_cast<Word32>(rng_()));
      case 1: return var(std::array{"x", "y", "alu_out", "d", "n"}[pick(5)]);
      case 2: return reg(var(std::array{"d", "n", "m", "s"}[pick(4)]));
      case 3: return reg(constant(pick(16)), pick(3) ? std::nullopt : std::optional(kAllModes[pick(7)]));
      case 4: return flag(static_cast<FlagId>(pick(4)));
      case 5: return pick(2) ? Exp{CpsrExp{}} : Exp{SpsrExp{pick(2) ? std::nullopt : std::optional(ProcessorMode::svc)}};
      case 6:
      case 7:
      case 8: return binop(exp(depth - 1), static_cast<BinaryOp>(pick(15)), exp(depth - 1));
      case 9: return Exp{IfExp{exp(depth - 1), exp(depth - 1), exp(depth - 1)}};
      case 10: return fun("NOT", {exp(depth - 1)});
      case 11: return fun(pick(2) ? "CarryFrom_add3" : "OverflowFrom_add3",
                          {exp(depth - 1), exp(depth - 1), pick(2) ? constant(0) : exp(depth - 1)});
      case 12: return fun("SignExtend", {exp(depth - 1), constant(24)});
      case 13: return fun("CurrentModeHasSPSR", {});
      case 14: {
        const unsigned hi = pick(32);
        return bit_range(exp(depth - 1), hi, pick(hi + 1));
      }
      case 15: return Exp{MemoryExp{exp(depth - 1), std::array{MemSize::byte, MemSize::half, MemSize::word}[pick(3)]}};
      default: return reg(binop(exp(depth - 1), BinaryOp::add, var("x")));
    }
  }

  Exp lvalue(int depth) {
    switch (pick(6)) {
      case 0: return reg(var(std::array{"d", "n"}[pick(2)]));
      case 1: return flag(static_cast<FlagId>(pick(4)));
      case 2: return var(std::array{"x", "y"}[pick(2)]);
      case 3: return Exp{CpsrExp{}};
      case 4: return Exp{MemoryExp{exp(depth), MemSize::word}};
      default: return bit_range(reg(constant(pick(15))), 7, 0);
    }
  }

  Stm branch(int depth) {
    if (pick(2)) return stm(depth);
    return block_of(depth, 1 + pick(3));
  }

  Stm block_of(int depth, unsigned n) {
    std::vector<Stm> body;
    // a block directly inside a block has no text of its own
    for (unsigned i = 0; i < n; ++i) {
      Stm s = stm(depth);
      if (const auto* inner = s.as<BlockStm>()) {
        for (const auto& x : inner->body) body.push_back(*x);
      } else {
        body.push_back(std::move(s));
      }
    }
    return block(std::move(body));
  }

  Stm stm(int depth) {
    const unsigned k = depth <= 0 ? pick(3) : pick(8);
    switch (k) {
      case 0:
      case 1: return assign(lvalue(1), exp(2));
      case 2: return pick(2) ? Stm{UnpredictableStm{}} : Stm{ProcStm{"Unimplemented", {}}};
      case 3:
      case 4: {
        std::optional<StmRef> e;
        if (pick(2)) e = StmRef(branch(depth - 1));
        return Stm{IfStm{exp(1), branch(depth - 1), e}};
      }
      case 5: return Stm{ForStm{"i", exp(1), exp(1), branch(depth - 1)}};
      case 6: {
        std::vector<CaseArm> arms;
        const unsigned n = 1 + pick(3);
        for (unsigned i = 0; i < n; ++i) arms.push_back({i * 3 + pick(3), branch(depth - 1)});
        return Stm{CaseStm{exp(1), std::move(arms), pick(2) ? block({}) : branch(depth - 1)}};
      }
      default: return block_of(depth - 1, 2 + pick(2));
    }
  }

 private:
  std::mt19937 rng_;
};

}  // namespace

TEST_CASE("the ADC listing parses to the expected shape") {
  const OperationAst op = parse_operation(kAdcListing);
  CHECK(op.ident() == "A4.1.2 ADC");
  REQUIRE(op.params.size() == 5);
  CHECK(op.params[2] == Param{"d", ParamKind::register_index});
  auto top = op.body.as<IfStm>();
  REQUIRE(top);
  CHECK(*top->cond == fun("ConditionPassed", {var("cond")}));
  auto body = top->then_branch->as<BlockStm>();
  REQUIRE(body);
  REQUIRE(body->body.size() == 2);
  CHECK(*body->body[0] ==
        assign(reg(var("d")), binop(binop(reg(var("n")), BinaryOp::add, var("shifter_operand")),
                                    BinaryOp::add, flag(FlagId::C))));
  // the dangling `else if` belongs to the S == 1 and d == 15 test
  auto inner = body->body[1]->as<IfStm>();
  REQUIRE(inner);
  REQUIRE(inner->else_branch);
  CHECK((*inner->else_branch)->as<IfStm>());
  auto restore = inner->then_branch->as<BlockStm>();
  REQUIRE(restore);
  auto has_spsr = restore->body[0]->as<IfStm>();
  REQUIRE(has_spsr);
  CHECK(*has_spsr->else_branch == Stm{UnpredictableStm{}});
}

TEST_CASE("small statements and expressions") {
  const std::vector<Param> params = {{"d", ParamKind::register_index}, {"n", ParamKind::register_index}};
  ParseOptions opts{&params};
  CHECK(parse_stm("Rd = Rn", opts) == assign(reg(var("d")), reg(var("n"))));
  CHECK(parse_stm("Z Flag = if Rd == 0 then 1 else 0", opts) ==
        assign(flag(FlagId::Z),
               Exp{IfExp{binop(reg(var("d")), BinaryOp::eq, constant(0)), constant(1), constant(0)}}));
  CHECK(parse_exp("Rd[31]", opts) == bit_range(reg(var("d")), 31, 31));
  CHECK(parse_stm("CPSR = SPSR") == assign(Exp{CpsrExp{}}, Exp{SpsrExp{}}));
  CHECK(parse_stm("UNPREDICTABLE") == Stm{UnpredictableStm{}});
  CHECK(parse_exp("1 + 2 << 3") == binop(binop(constant(1), BinaryOp::add, constant(2)), BinaryOp::shl, constant(3)));
  CHECK(parse_exp("a AND b OR c") ==
        binop(binop(var("a"), BinaryOp::bit_and, var("b")), BinaryOp::bit_or, var("c")));
  CHECK(parse_exp("a - b - c") == binop(binop(var("a"), BinaryOp::sub, var("b")), BinaryOp::sub, var("c")));
  CHECK(parse_exp("CarryFrom(a + b)") == fun("CarryFrom_add3", {var("a"), var("b"), constant(0)}));
  CHECK(parse_exp("PC") == reg(constant(15)));
  CHECK(parse_exp("R14_svc") == reg(constant(14), ProcessorMode::svc));
  CHECK(parse_exp("Memory[0x10, 2]") == Exp{MemoryExp{constant(0x10), MemSize::half}});
}

TEST_CASE("diagnostics carry a position") {
  const std::vector<Param> params = {{"d", ParamKind::register_index}};
  ParseOptions opts{&params};
  auto error_of = [](auto&& f) -> std::optional<ParseError> {
    try {
      f();
    } catch (const ParseError& e) {
      return e;
    }
    return std::nullopt;
  };
  auto e1 = error_of([&] { parse_stm("x = 1\n  Rd = Frob(1)", opts); });
  REQUIRE(e1);
  CHECK(e1->line() == 2);
  CHECK(e1->column() == 8);
  CHECK(e1->detail().find("unknown function") != std::string::npos);
  auto e2 = error_of([&] { parse_stm("Rd = q", opts); });
  REQUIRE(e2);
  CHECK(e2->detail().find("unbound variable") != std::string::npos);
  auto e3 = error_of([&] { parse_stm("if x then"); });
  REQUIRE(e3);
  auto e4 = error_of([&] { parse_stm("1 = 2"); });
  REQUIRE(e4);
  CHECK(e4->detail().find("expected a statement") != std::string::npos);
  CHECK(error_of([&] { parse_exp("x[3:5]"); }));
  CHECK(error_of([&] { parse_operation("A1 X\nparam a : nonsense\nx = 1"); }));
}

TEST_CASE("printing the bundled corpus reproduces the source") {
  for (const auto& src : bundled_catalog_sources()) {
    CAPTURE(src.name);
    const OperationAst op = parse_operation(src.pseudocode);
    const std::string printed = print_operation(op);
    CHECK(squash(printed) == squash(src.pseudocode));
    CHECK(parse_operation(printed) == op);
  }
}

TEST_CASE("print then parse is the identity on random trees") {
  Gen g(11);
  for (int i = 0; i < 3000; ++i) {
    const Exp e = g.exp(4);
    const std::string text = print_exp(e);
    CAPTURE(text);
    REQUIRE(parse_exp(text) == e);
  }
  for (int i = 0; i < 3000; ++i) {
    const Stm s = g.block_of(3, 2 + g.pick(3));
    const std::string text = print_stm(s);
    CAPTURE(text);
    const Stm back = parse_stm(text);
    INFO("reparsed:\n" << print_stm(back));
    REQUIRE(back == s);
  }
}

TEST_CASE("the parser never fails other than with a diagnostic") {
  std::mt19937 rng(99);
  const std::vector<std::string> vocab = {
      "if", "then", "else", "endif", "for", "to", "do", "case", "of", "endcase", "otherwise",
      "=>", "=", "==", "+", "-", "<<", "(", ")", "[", "]", ":", ",", ";", "\n", "Rd", "PC",
      "C", "Flag", "CPSR", "SPSR", "NOT", "AND", "x", "1", "0xFF", "Memory", "CarryFrom",
      "UNPREDICTABLE", "R[", "param", "===", "A4.1.2", "SPSR_svc", "Unimplemented"};
  int diagnostics = 0;
  for (int i = 0; i < 20000; ++i) {
    std::string text;
    if (i % 2) {
      const int len = rng() % 60;
      for (int k = 0; k < len; ++k) text += static_cast<char>(rng() % 256);
    } else {
      const int len = rng() % 25;
      for (int k = 0; k < len; ++k) text += vocab[rng() % vocab.size()] + " ";
    }
    try {
      (void)parse_stm(text);
      (void)parse_operations(text);
    } catch (const ParseError&) {
      ++diagnostics;
    }
  }
  CHECK(diagnostics > 0);
}

TEST_CASE("resolve_old_params") {
  const OperationAst adc = resolve_old_params(parse_operation(kAdcListing));
  const Exp old_n = Exp{OldParamExp{"n"}};
  CHECK(contains_exp(adc.body, old_n));
  CHECK(contains_exp(adc.body, fun("CarryFrom_add3", {old_n, var("shifter_operand"), flag(FlagId::C)})));
  CHECK(contains_exp(adc.body, fun("OverflowFrom_add3",
                                   {old_n, var("shifter_operand"), Exp{OldFlagExp{FlagId::C}}})));
  // the first read precedes every write
  auto first = adc.body.as<IfStm>()->then_branch->as<BlockStm>()->body[0]->as<AssignStm>();
  CHECK(contains_exp(*first->value, reg(var("n"))));
  // destination reads see the new value
  CHECK(contains_exp(adc.body, bit_range(reg(var("d")), 31, 31)));

  CHECK(resolve_old_params(adc) == adc);

  const OperationAst plain = parse_operation("X1 T\nparam d : register\nparam n : register\nx = Rn\nRd = x");
  CHECK(resolve_old_params(plain) == plain);
}

TEST_CASE("old operand reads give the entry value when d == n") {
  const OperationAst op = parse_operation("X1 T\nparam d : register\nparam n : register\nRd = Rn + 1\nRd = Rn + 5");
  const OperationAst resolved = resolve_old_params(op);
  RefState st;
  st = set_reg(st, 2, 10);
  const Args args = {{"d", 2}, {"n", 2}};
  auto raw = run_operation(op, args, st);
  auto fixed = run_operation(resolved, args, st);
  REQUIRE(raw.ok());
  REQUIRE(fixed.ok());
  CHECK(reg_content(raw.value().st, 2) == 16);
  CHECK(reg_content(fixed.value().st, 2) == 15);  // 10 + 5
}
