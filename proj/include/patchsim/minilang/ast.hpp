#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace patchsim::minilang {

struct SourcePos {
  int line = 1;
  int column = 1;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { int_lit, bool_lit, str_lit, null_lit, var, array, index, call, unary, binary };

  Kind kind = Kind::null_lit;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::string text;  // string literal, variable or callee name, operator spelling
  std::vector<ExprPtr> children;
  SourcePos pos;
};

struct Stmt {
  enum class Kind {
    var_decl,      // var name = exprs[0];
    assign,        // name = exprs[0];
    index_assign,  // name[exprs[0]] = exprs[1];
    if_,           // if (exprs[0]) body else alt
    while_,        // while (exprs[0]) body
    return_,       // return exprs[0]?;
    throw_,        // throw name(exprs[0]?);
    try_,          // try body catch (name catch_var) alt
    assert_,       // assert exprs[0];
    break_,
    continue_,
    expr,          // exprs[0];
  };

  Kind kind = Kind::expr;
  std::string name;
  std::string catch_var;
  std::vector<ExprPtr> exprs;
  std::vector<Stmt> body;
  std::vector<Stmt> alt;
  bool has_else = false;
  std::uint32_t id = 0;  // dense, source order
  SourcePos pos;
};

struct Function {
  std::string name;
  std::vector<std::string> params;
  std::vector<Stmt> body;
  SourcePos pos;
  std::string tokens;  // space-joined token spelling of the whole definition
};

/// Where each statement lives; indexed by statement id.
struct StatementInfo {
  std::string function;
  SourcePos pos;
  Stmt::Kind kind = Stmt::Kind::expr;
  int index_on_line = 0;  // statements starting earlier on the same line
};

struct Program {
  std::vector<Function> functions;
  std::vector<StatementInfo> statements;

  const Function* find(std::string_view name) const {
    for (const auto& f : functions)
      if (f.name == name) return &f;
    return nullptr;
  }

  std::size_t statement_count() const noexcept { return statements.size(); }
};

inline std::string_view kind_name(Stmt::Kind k) {
  switch (k) {
    case Stmt::Kind::var_decl: return "var";
    case Stmt::Kind::assign: return "assign";
    case Stmt::Kind::index_assign: return "index-assign";
    case Stmt::Kind::if_: return "if";
    case Stmt::Kind::while_: return "while";
    case Stmt::Kind::return_: return "return";
    case Stmt::Kind::throw_: return "throw";
    case Stmt::Kind::try_: return "try";
    case Stmt::Kind::assert_: return "assert";
    case Stmt::Kind::break_: return "break";
    case Stmt::Kind::continue_: return "continue";
    case Stmt::Kind::expr: return "expr";
  }
  return "expr";
}

// Structural equality, ignoring positions, ids and token text.

inline bool same_expr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.int_value != b.int_value || a.bool_value != b.bool_value ||
      a.text != b.text || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_expr(*a.children[i], *b.children[i])) return false;
  return true;
}

inline bool same_block(const std::vector<Stmt>& a, const std::vector<Stmt>& b);

inline bool same_stmt(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name || a.catch_var != b.catch_var ||
      a.has_else != b.has_else || a.exprs.size() != b.exprs.size())
    return false;
  for (std::size_t i = 0; i < a.exprs.size(); ++i)
    if (!same_expr(*a.exprs[i], *b.exprs[i])) return false;
  return same_block(a.body, b.body) && same_block(a.alt, b.alt);
}

inline bool same_block(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_stmt(a[i], b[i])) return false;
  return true;
}

inline bool same_program(const Program& a, const Program& b) {
  if (a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || fa.params != fb.params || !same_block(fa.body, fb.body)) return false;
  }
  return true;
}

}  // namespace patchsim::minilang
