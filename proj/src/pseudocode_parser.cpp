#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "armsim/builtins.hpp"
#include "armsim/pseudocode.hpp"

namespace armsim {

using namespace ast;

ParseError::ParseError(unsigned line, unsigned column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

enum class Tok : std::uint8_t { ident, number, newline, semicolon, symbol, end };

struct Token {
  Tok kind;
  std::string text;
  Word32 value = 0;
  unsigned line = 1;
  unsigned col = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::newline: return "end of line";
    case Tok::semicolon: return "';'";
    case Tok::end: return "end of input";
    default: return "'" + t.text + "'";
  }
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src, unsigned first_line) {
  std::vector<Token> out;
  unsigned line = first_line;
  std::size_t line_start = 0;
  std::size_t i = 0;
  auto col = [&](std::size_t at) { return static_cast<unsigned>(at - line_start + 1); };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '\n') {
      out.push_back({Tok::newline, "\n", 0, line, col(i)});
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == ';') {
      out.push_back({Tok::semicolon, ";", 0, line, col(i)});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = i;
      unsigned base = 10;
      if (c == '0' && i + 1 < src.size() && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
        base = 16;
        i += 2;
      } else if (c == '0' && i + 1 < src.size() && (src[i + 1] == 'b' || src[i + 1] == 'B')) {
        base = 2;
        i += 2;
      }
      std::uint64_t v = 0;
      std::size_t digits = 0;
      while (i < src.size() && is_ident_char(src[i])) {
        const char d = static_cast<char>(std::tolower(static_cast<unsigned char>(src[i])));
        unsigned dv = 0;
        if (d >= '0' && d <= '9') {
          dv = static_cast<unsigned>(d - '0');
        } else if (d >= 'a' && d <= 'f') {
          dv = static_cast<unsigned>(d - 'a' + 10);
        } else {
          dv = base;
        }
        if (dv >= base) throw ParseError(line, col(i), "invalid digit in number literal");
        v = v * base + dv;
        if (v > 0xFFFFFFFFull) throw ParseError(line, col(start), "number literal exceeds 32 bits");
        ++digits;
        ++i;
      }
      if (digits == 0) throw ParseError(line, col(start), "number literal has no digits");
      out.push_back({Tok::number, std::string(src.substr(start, i - start)), static_cast<Word32>(v),
                     line, col(start)});
      continue;
    }
    if (is_ident_start(c)) {
      const std::size_t start = i;
      while (i < src.size() && is_ident_char(src[i])) ++i;
      out.push_back({Tok::ident, std::string(src.substr(start, i - start)), 0, line, col(start)});
      continue;
    }
    static constexpr std::string_view two_char[] = {"==", "!=", "<=", ">=", "<<",
                                                    ">>", "=>", "&&", "||"};
    bool matched = false;
    for (std::string_view op : two_char) {
      if (src.substr(i, 2) == op) {
        out.push_back({Tok::symbol, std::string(op), 0, line, col(i)});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("=+-&|^<>()[],:").find(c) != std::string_view::npos) {
      out.push_back({Tok::symbol, std::string(1, c), 0, line, col(i)});
      ++i;
      continue;
    }
    std::ostringstream msg;
    msg << "unexpected character ";
    if (std::isprint(static_cast<unsigned char>(c))) {
      msg << "'" << c << "'";
    } else {
      msg << "0x" << std::hex << (static_cast<unsigned>(c) & 0xFFu);
    }
    throw ParseError(line, col(i), msg.str());
  }
  out.push_back({Tok::end, "", 0, line, col(i)});
  return out;
}

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k = {
      "if",  "then", "else",          "endif", "for",  "to",   "do",     "endfor",
      "case", "of",  "endcase",       "otherwise", "and", "or", "AND",  "OR",
      "EOR", "NOT",  "UNPREDICTABLE", "CPSR",  "SPSR", "Memory", "param", "Flag"};
  return k;
}

struct VarUse {
  std::string name;
  unsigned line;
  unsigned col;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::vector<Param>* params)
      : toks_(std::move(tokens)), params_(params) {}

  Stm parse_body() {
    auto stms = parse_stmts();
    expect_end();
    check_bindings();
    return wrap(std::move(stms));
  }

  Exp parse_lone_exp() {
    skip_seps();
    Exp e = parse_exp();
    skip_seps();
    expect_end();
    check_bindings();
    return e;
  }

 private:
  // -- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_ident(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::ident && peek(k).text == s;
  }
  bool at_symbol(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::symbol && peek(k).text == s;
  }
  bool at_sep() const { return peek().kind == Tok::newline || peek().kind == Tok::semicolon; }
  void skip_seps() {
    while (at_sep()) next();
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(at.line, at.col, msg);
  }
  [[noreturn]] void expected(const std::string& what) const {
    fail(peek(), "expected " + what + ", found " + describe(peek()));
  }

  void expect_ident(std::string_view s) {
    if (!at_ident(s)) expected("'" + std::string(s) + "'");
    next();
  }
  void expect_symbol(std::string_view s) {
    if (!at_symbol(s)) expected("'" + std::string(s) + "'");
    next();
  }
  void expect_end() {
    if (peek().kind != Tok::end) expected("a statement or end of input");
  }
  Word32 expect_number() {
    if (peek().kind != Tok::number) expected("a number");
    return next().value;
  }

  // -- statements ----------------------------------------------------------

  bool at_terminator() const {
    const Token& t = peek();
    if (t.kind == Tok::end) return true;
    if (t.kind == Tok::ident &&
        (t.text == "else" || t.text == "endif" || t.text == "endfor" || t.text == "endcase" ||
         t.text == "otherwise")) {
      return true;
    }
    return t.kind == Tok::number && at_symbol("=>", 1);
  }

  static Stm wrap(std::vector<Stm> stms) {
    if (stms.size() == 1) return std::move(stms.front());
    return block(std::move(stms));
  }

  std::vector<Stm> parse_stmts() {
    std::vector<Stm> out;
    skip_seps();
    while (!at_terminator()) {
      out.push_back(parse_stmt());
      if (at_terminator()) break;
      if (!at_sep()) expected("end of statement");
      skip_seps();
    }
    return out;
  }

  Stm parse_branch() {
    if (at_sep()) return block(parse_stmts());
    if (at_terminator()) expected("a statement");
    return parse_stmt();
  }

  // Consumes `word` after optional separators, or leaves the position alone.
  bool accept_after_seps(std::string_view word) {
    const std::size_t save = pos_;
    skip_seps();
    if (at_ident(word)) {
      next();
      return true;
    }
    pos_ = save;
    return false;
  }

  Stm parse_stmt() {
    const Token& t = peek();
    if (t.kind != Tok::ident && !at_symbol("(")) expected("a statement");
    if (at_ident("if")) return parse_if();
    if (at_ident("for")) return parse_for();
    if (at_ident("case")) return parse_case();
    if (at_ident("UNPREDICTABLE")) {
      next();
      return Stm{UnpredictableStm{}};
    }
    if (t.kind == Tok::ident && at_symbol("(", 1)) {
      if (auto proc = find_procedure(t.text)) {
        const Token name = next();
        auto args = parse_args();
        if (args.size() != proc->arity) {
          fail(name, "procedure '" + name.text + "' takes " + std::to_string(proc->arity) +
                         " argument(s)");
        }
        return Stm{ProcStm{name.text, {args.begin(), args.end()}}};
      }
      if (find_builtin(t.text) || t.text == "CarryFrom" || t.text == "OverflowFrom") {
        fail(t, "function '" + t.text + "' used as a statement");
      }
    }
    const Token start = peek();
    Exp target = parse_exp();
    check_lvalue(target, start);
    expect_symbol("=");
    Exp value = parse_exp();
    if (auto v = target.as<VarExp>()) locals_.insert(v->name);
    return assign(std::move(target), std::move(value));
  }

  void check_lvalue(const Exp& e, const Token& at) const {
    if (e.as<RegExp>() || e.as<CpsrExp>() || e.as<SpsrExp>() || e.as<MemoryExp>() ||
        e.as<FlagExp>() || e.as<VarExp>()) {
      return;
    }
    if (auto br = e.as<BitRangeExp>(); br && br->value->as<RegExp>()) return;
    fail(at, "invalid assignment target");
  }

  Stm parse_if() {
    expect_ident("if");
    Exp cond = parse_exp();
    expect_ident("then");
    Stm then_branch = parse_branch();
    std::optional<StmRef> else_branch;
    if (accept_after_seps("else")) else_branch = StmRef(parse_branch());
    accept_after_seps("endif");
    return Stm{IfStm{std::move(cond), std::move(then_branch), std::move(else_branch)}};
  }

  Stm parse_for() {
    expect_ident("for");
    if (peek().kind != Tok::ident || keywords().count(peek().text)) expected("a loop counter");
    std::string counter = next().text;
    locals_.insert(counter);
    expect_symbol("=");
    Exp first = parse_exp();
    expect_ident("to");
    Exp last = parse_exp();
    expect_ident("do");
    Stm body = parse_branch();
    accept_after_seps("endfor");
    return Stm{ForStm{std::move(counter), std::move(first), std::move(last), std::move(body)}};
  }

  Stm parse_case() {
    expect_ident("case");
    Exp selector = parse_exp();
    expect_ident("of");
    skip_seps();
    std::vector<CaseArm> arms;
    while (peek().kind == Tok::number) {
      const Token label = peek();
      const Word32 pattern = next().value;
      for (const auto& a : arms) {
        if (a.pattern == pattern) fail(label, "duplicate case label");
      }
      expect_symbol("=>");
      arms.push_back(CaseArm{pattern, parse_branch()});
      skip_seps();
    }
    Stm otherwise = block({});
    if (at_ident("otherwise")) {
      next();
      expect_symbol("=>");
      otherwise = parse_branch();
      skip_seps();
    }
    expect_ident("endcase");
    return Stm{CaseStm{std::move(selector), std::move(arms), std::move(otherwise)}};
  }

  // -- expressions ---------------------------------------------------------

  Exp parse_exp() {
    if (at_ident("if")) {
      next();
      Exp c = parse_exp();
      expect_ident("then");
      Exp a = parse_exp();
      expect_ident("else");
      Exp b = parse_exp();
      return Exp{IfExp{std::move(c), std::move(a), std::move(b)}};
    }
    return parse_binary(0);
  }

  struct OpInfo {
    BinaryOp op;
    int level;
  };

  std::optional<OpInfo> peek_binary() const {
    const Token& t = peek();
    if (t.kind == Tok::ident) {
      if (t.text == "or") return OpInfo{BinaryOp::log_or, 0};
      if (t.text == "and") return OpInfo{BinaryOp::log_and, 1};
      if (t.text == "OR") return OpInfo{BinaryOp::bit_or, 2};
      if (t.text == "EOR") return OpInfo{BinaryOp::bit_eor, 3};
      if (t.text == "AND") return OpInfo{BinaryOp::bit_and, 4};
      return std::nullopt;
    }
    if (t.kind != Tok::symbol) return std::nullopt;
    const std::string& s = t.text;
    if (s == "||") return OpInfo{BinaryOp::log_or, 0};
    if (s == "&&") return OpInfo{BinaryOp::log_and, 1};
    if (s == "|") return OpInfo{BinaryOp::bit_or, 2};
    if (s == "^") return OpInfo{BinaryOp::bit_eor, 3};
    if (s == "&") return OpInfo{BinaryOp::bit_and, 4};
    if (s == "==") return OpInfo{BinaryOp::eq, 5};
    if (s == "!=") return OpInfo{BinaryOp::ne, 5};
    if (s == "<") return OpInfo{BinaryOp::lt, 6};
    if (s == "<=") return OpInfo{BinaryOp::le, 6};
    if (s == ">") return OpInfo{BinaryOp::gt, 6};
    if (s == ">=") return OpInfo{BinaryOp::ge, 6};
    if (s == "<<") return OpInfo{BinaryOp::shl, 7};
    if (s == ">>") return OpInfo{BinaryOp::shr, 7};
    if (s == "+") return OpInfo{BinaryOp::add, 8};
    if (s == "-") return OpInfo{BinaryOp::sub, 8};
    return std::nullopt;
  }

  // Precedence climbing; all binary operators are left-associative.
  Exp parse_binary(int min_level) {
    Exp lhs = parse_unary();
    while (true) {
      auto op = peek_binary();
      if (!op || op->level < min_level) break;
      next();
      Exp rhs = parse_binary(op->level + 1);
      lhs = binop(std::move(lhs), op->op, std::move(rhs));
    }
    return lhs;
  }

  Exp parse_unary() {
    if (at_ident("NOT")) {
      next();
      return fun("NOT", {parse_unary()});
    }
    return parse_postfix();
  }

  Exp parse_postfix() {
    Exp e = parse_primary();
    while (at_symbol("[")) {
      const Token open = next();
      const Word32 hi = expect_number();
      Word32 lo = hi;
      if (at_symbol(":")) {
        next();
        lo = expect_number();
      }
      expect_symbol("]");
      if (hi > 31 || lo > hi) fail(open, "bit range must satisfy 0 <= lo <= hi <= 31");
      e = bit_range(std::move(e), hi, lo);
    }
    return e;
  }

  std::vector<Exp> parse_args() {
    expect_symbol("(");
    std::vector<Exp> args;
    if (!at_symbol(")")) {
      args.push_back(parse_exp());
      while (at_symbol(",")) {
        next();
        args.push_back(parse_exp());
      }
    }
    expect_symbol(")");
    return args;
  }

  // CarryFrom(a + b [+ c]) and OverflowFrom(a + b [+ c]).
  Exp parse_sum_call(const Token& name, std::string builtin) {
    expect_symbol("(");
    std::vector<Exp> terms;
    terms.push_back(parse_unary());
    while (at_symbol("+")) {
      next();
      terms.push_back(parse_unary());
    }
    expect_symbol(")");
    if (terms.size() < 2 || terms.size() > 3) {
      fail(name, name.text + " expects a sum of two or three terms");
    }
    if (terms.size() == 2) terms.push_back(constant(0));
    return fun(std::move(builtin), std::move(terms));
  }

  bool is_register_param(std::string_view base) const {
    if (!params_) return base == "d" || base == "n" || base == "m" || base == "s";
    for (const auto& p : *params_) {
      if (p.name == base) return p.kind == ParamKind::register_index;
    }
    return false;
  }

  // R<digits>[_mode] or R<param>[_mode].
  std::optional<Exp> register_name(const std::string& text) const {
    if (text.size() < 2 || text[0] != 'R') return std::nullopt;
    std::string base = text.substr(1);
    std::optional<ProcessorMode> mode;
    if (auto us = base.rfind('_'); us != std::string::npos) {
      if (auto m = mode_from_name(base.substr(us + 1))) {
        mode = m;
        base = base.substr(0, us);
      }
    }
    if (base.empty()) return std::nullopt;
    if (std::all_of(base.begin(), base.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const unsigned long n = std::stoul(base);
      if (n > 15) return std::nullopt;
      return reg(constant(static_cast<Word32>(n)), mode);
    }
    if (is_register_param(base)) return reg(var(base), mode);
    return std::nullopt;
  }

  Exp parse_primary() {
    const Token t = peek();
    if (t.kind == Tok::number) {
      next();
      return constant(t.value);
    }
    if (at_symbol("(")) {
      next();
      Exp e = parse_exp();
      expect_symbol(")");
      return e;
    }
    if (t.kind != Tok::ident) expected("an expression");
    const std::string& s = t.text;

    if (s.size() == 1 && std::string_view("NZCV").find(s[0]) != std::string_view::npos &&
        at_ident("Flag", 1)) {
      next();
      next();
      static constexpr FlagId ids[] = {FlagId::N, FlagId::Z, FlagId::C, FlagId::V};
      return flag(ids[std::string_view("NZCV").find(s[0])]);
    }
    if (s == "CPSR") {
      next();
      return Exp{CpsrExp{}};
    }
    if (s == "SPSR") {
      next();
      return Exp{SpsrExp{}};
    }
    if (s.rfind("SPSR_", 0) == 0) {
      auto m = mode_from_name(s.substr(5));
      if (!m) fail(t, "unknown processor mode in '" + s + "'");
      next();
      return Exp{SpsrExp{m}};
    }
    if (s == "Memory") {
      next();
      expect_symbol("[");
      Exp addr = parse_exp();
      expect_symbol(",");
      const Token size_tok = peek();
      const Word32 size = expect_number();
      if (size != 1 && size != 2 && size != 4) fail(size_tok, "memory access size must be 1, 2 or 4");
      expect_symbol("]");
      return Exp{MemoryExp{std::move(addr), static_cast<MemSize>(size)}};
    }
    if (s == "R" && at_symbol("[", 1)) {
      next();
      next();
      Exp index = parse_exp();
      expect_symbol("]");
      return reg(std::move(index));
    }
    if (s == "PC") {
      next();
      return reg(constant(15));
    }
    if (s == "LR") {
      next();
      return reg(constant(14));
    }
    if (s == "SP") {
      next();
      return reg(constant(13));
    }
    if (at_symbol("(", 1)) {
      next();
      if (s == "CarryFrom") return parse_sum_call(t, "CarryFrom_add3");
      if (s == "OverflowFrom") return parse_sum_call(t, "OverflowFrom_add3");
      auto info = find_builtin(s);
      if (!info) {
        if (find_procedure(s)) fail(t, "procedure '" + s + "' used as an expression");
        fail(t, "unknown function '" + s + "'");
      }
      auto args = parse_args();
      if (args.size() != info->arity) {
        fail(t, "function '" + s + "' takes " + std::to_string(info->arity) + " argument(s), got " +
                    std::to_string(args.size()));
      }
      return fun(s, std::move(args));
    }
    if (auto r = register_name(s)) {
      next();
      return *r;
    }
    if (keywords().count(s)) expected("an expression");
    next();
    uses_.push_back({s, t.line, t.col});
    return var(s);
  }

  void check_bindings() const {
    if (!params_) return;
    for (const auto& u : uses_) {
      const bool is_param = std::any_of(params_->begin(), params_->end(),
                                        [&](const Param& p) { return p.name == u.name; });
      if (!is_param && !locals_.count(u.name)) {
        throw ParseError(u.line, u.col, "unbound variable '" + u.name + "'");
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::vector<Param>* params_;
  std::vector<VarUse> uses_;
  std::set<std::string, std::less<>> locals_;
};

struct Line {
  std::string_view text;
  unsigned number;
};

std::vector<Line> split_lines(std::string_view text, unsigned first_line) {
  std::vector<Line> lines;
  std::size_t start = 0;
  unsigned n = first_line;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::size_t stop = end == std::string_view::npos ? text.size() : end;
    lines.push_back({text.substr(start, stop - start), n++});
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool blank_or_comment(std::string_view line) {
  line = trim(line);
  return line.empty() || line.rfind("//", 0) == 0;
}

std::optional<ParamKind> kind_from_name(std::string_view s) {
  if (s == "bit") return ParamKind::bit;
  if (s == "condition") return ParamKind::condition;
  if (s == "register") return ParamKind::register_index;
  if (s == "word") return ParamKind::word;
  return std::nullopt;
}

OperationAst parse_operation_at(std::string_view text, unsigned first_line) {
  auto lines = split_lines(text, first_line);
  std::size_t i = 0;
  while (i < lines.size() && blank_or_comment(lines[i].text)) ++i;
  if (i == lines.size()) throw ParseError(first_line, 1, "expected an operation header");

  OperationAst op;
  {
    // The section tag ("A4.1.2") is taken verbatim from the raw line.
    std::string_view raw = trim(lines[i].text);
    const std::size_t space = raw.find_first_of(" \t");
    std::string_view first = raw.substr(0, space);
    std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(raw.substr(space));
    std::string_view name = rest.empty() ? first : rest;
    if (!rest.empty()) op.section = std::string(first);
    if (name.empty() || !is_ident_start(name.front()) ||
        !std::all_of(name.begin(), name.end(), is_ident_char)) {
      throw ParseError(lines[i].number, 1, "operation header must be '[section] NAME'");
    }
    op.name = std::string(name);
  }
  ++i;

  for (; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i].text)) continue;
    std::string_view t = trim(lines[i].text);
    if (t.rfind("param", 0) != 0 || (t.size() > 5 && is_ident_char(t[5]))) break;
    auto toks = lex(lines[i].text, lines[i].number);
    if (toks.size() < 5 || toks[1].kind != Tok::ident || toks[2].text != ":" ||
        toks[3].kind != Tok::ident || toks[4].kind != Tok::end) {
      throw ParseError(lines[i].number, toks[0].col, "expected 'param <name> : <kind>'");
    }
    auto kind = kind_from_name(toks[3].text);
    if (!kind) {
      throw ParseError(toks[3].line, toks[3].col,
                       "unknown parameter kind '" + toks[3].text +
                           "' (expected bit, condition, register or word)");
    }
    if (keywords().count(toks[1].text)) {
      throw ParseError(toks[1].line, toks[1].col, "parameter name is a keyword");
    }
    if (op.find_param(toks[1].text)) {
      throw ParseError(toks[1].line, toks[1].col, "duplicate parameter '" + toks[1].text + "'");
    }
    op.params.push_back(Param{toks[1].text, *kind});
  }

  std::size_t body_offset = 0;
  unsigned body_line = first_line;
  if (i < lines.size()) {
    body_offset = static_cast<std::size_t>(lines[i].text.data() - text.data());
    body_line = lines[i].number;
  } else {
    body_offset = text.size();
  }
  Parser parser(lex(text.substr(body_offset), body_line), &op.params);
  op.body = parser.parse_body();
  return op;
}

}  // namespace

OperationAst parse_operation(std::string_view text) { return parse_operation_at(text, 1); }

std::vector<OperationAst> parse_operations(std::string_view text) {
  std::vector<OperationAst> out;
  auto lines = split_lines(text, 1);
  std::size_t chunk_start = 0;
  unsigned chunk_line = 1;
  auto flush = [&](std::size_t end) {
    std::string_view chunk = text.substr(chunk_start, end - chunk_start);
    bool any = false;
    for (const auto& l : split_lines(chunk, 1)) any = any || !blank_or_comment(l.text);
    if (any) out.push_back(parse_operation_at(chunk, chunk_line));
  };
  for (const auto& l : lines) {
    if (trim(l.text) == "===") {
      const auto at = static_cast<std::size_t>(l.text.data() - text.data());
      flush(at);
      chunk_start = std::min(text.size(), at + l.text.size() + 1);
      chunk_line = l.number + 1;
    }
  }
  flush(text.size());
  return out;
}

Exp parse_exp(std::string_view text, const ParseOptions& options) {
  Parser p(lex(text, 1), options.params);
  return p.parse_lone_exp();
}

Stm parse_stm(std::string_view text, const ParseOptions& options) {
  Parser p(lex(text, 1), options.params);
  return p.parse_body();
}

}  // namespace armsim
