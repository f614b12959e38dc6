// Pseudocode front end: parser, printer and the entry-snapshot rewrite.
//
// The accepted grammar is documented in docs/pseudocode-grammar.md.

#ifndef ARMSIM_PSEUDOCODE_HPP
#define ARMSIM_PSEUDOCODE_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "armsim/ast.hpp"

namespace armsim {

class ParseError : public std::runtime_error {
 public:
  ParseError(unsigned line, unsigned column, const std::string& message);

  unsigned line() const { return line_; }
  unsigned column() const { return column_; }
  /// Message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  unsigned line_;
  unsigned column_;
  std::string detail_;
};

struct ParseOptions {
  /// Parameters in scope. When null, variables are not checked and the
  /// register names Rd, Rn, Rm and Rs refer to variables d, n, m and s.
  const std::vector<ast::Param>* params = nullptr;
};

ast::OperationAst parse_operation(std::string_view text);

/// Splits on lines consisting of `===` and parses each operation.
std::vector<ast::OperationAst> parse_operations(std::string_view text);

ast::Exp parse_exp(std::string_view text, const ParseOptions& options = {});
ast::Stm parse_stm(std::string_view text, const ParseOptions& options = {});

std::string print_exp(const ast::Exp& e);
std::string print_stm(const ast::Stm& s);
std::string print_operation(const ast::OperationAst& op);

/// Rewrites operand reads that may observe a value already overwritten by
/// the body so they read the operation-entry snapshot instead:
///  - `Reg(Var p)` for a register parameter p becomes `OldParam(p)` when an
///    earlier statement may have written another register (which could alias
///    p) and p itself was not written;
///  - a flag read after a write of the same flag becomes `OldFlag(f)`.
/// Idempotent.
ast::OperationAst resolve_old_params(const ast::OperationAst& op);

}  // namespace armsim

#endif  // ARMSIM_PSEUDOCODE_HPP
