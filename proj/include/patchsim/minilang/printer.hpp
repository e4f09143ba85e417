#pragma once

#include <string>
#include <string_view>

#include "patchsim/minilang/ast.hpp"
#include "patchsim/minilang/value.hpp"

namespace patchsim::minilang {

namespace detail {

inline int binary_precedence(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "!=") return 3;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
  if (op == "+" || op == "-") return 5;
  return 6;
}

inline void print_expr(std::string& out, const Expr& e);

inline void print_operand(std::string& out, const Expr& e, int parent_prec, bool right) {
  bool parens = false;
  if (e.kind == Expr::Kind::binary) {
    const int p = binary_precedence(e.text);
    parens = p < parent_prec || (right && p == parent_prec);
  }
  if (parens) out += '(';
  print_expr(out, e);
  if (parens) out += ')';
}

inline void print_list(std::string& out, const std::vector<ExprPtr>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    print_expr(out, *xs[i]);
  }
}

inline void print_expr(std::string& out, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::int_lit: out += std::to_string(e.int_value); break;
    case Expr::Kind::bool_lit: out += e.bool_value ? "true" : "false"; break;
    case Expr::Kind::str_lit: out += quote(e.text); break;
    case Expr::Kind::null_lit: out += "null"; break;
    case Expr::Kind::var: out += e.text; break;
    case Expr::Kind::array:
      out += '[';
      print_list(out, e.children);
      out += ']';
      break;
    case Expr::Kind::index:
      if (e.children[0]->kind == Expr::Kind::unary) {
        out += '(';
        print_expr(out, *e.children[0]);
        out += ')';
      } else {
        print_operand(out, *e.children[0], 7, false);
      }
      out += '[';
      print_expr(out, *e.children[1]);
      out += ']';
      break;
    case Expr::Kind::call:
      out += e.text;
      out += '(';
      print_list(out, e.children);
      out += ')';
      break;
    case Expr::Kind::unary:
      out += e.text;
      print_operand(out, *e.children[0], 7, false);
      break;
    case Expr::Kind::binary: {
      const int p = binary_precedence(e.text);
      print_operand(out, *e.children[0], p, false);
      out += ' ';
      out += e.text;
      out += ' ';
      print_operand(out, *e.children[1], p, true);
      break;
    }
  }
}

inline void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

inline void print_block(std::string& out, const std::vector<Stmt>& body, int depth);

inline void print_stmt(std::string& out, const Stmt& s, int depth, bool continued = false) {
  if (!continued) indent(out, depth);
  switch (s.kind) {
    case Stmt::Kind::var_decl:
      out += "var " + s.name + " = ";
      print_expr(out, *s.exprs[0]);
      out += ";\n";
      break;
    case Stmt::Kind::assign:
      out += s.name + " = ";
      print_expr(out, *s.exprs[0]);
      out += ";\n";
      break;
    case Stmt::Kind::index_assign:
      out += s.name + "[";
      print_expr(out, *s.exprs[0]);
      out += "] = ";
      print_expr(out, *s.exprs[1]);
      out += ";\n";
      break;
    case Stmt::Kind::if_:
      out += "if (";
      print_expr(out, *s.exprs[0]);
      out += ") ";
      print_block(out, s.body, depth);
      if (s.has_else) {
        if (s.alt.size() == 1 && s.alt[0].kind == Stmt::Kind::if_) {
          out += " else ";
          print_stmt(out, s.alt[0], depth, true);
          return;
        }
        out += " else ";
        print_block(out, s.alt, depth);
      }
      out += '\n';
      break;
    case Stmt::Kind::while_:
      out += "while (";
      print_expr(out, *s.exprs[0]);
      out += ") ";
      print_block(out, s.body, depth);
      out += '\n';
      break;
    case Stmt::Kind::return_:
      out += "return";
      if (!s.exprs.empty()) {
        out += ' ';
        print_expr(out, *s.exprs[0]);
      }
      out += ";\n";
      break;
    case Stmt::Kind::throw_:
      out += "throw " + s.name;
      if (!s.exprs.empty()) {
        out += '(';
        print_expr(out, *s.exprs[0]);
        out += ')';
      }
      out += ";\n";
      break;
    case Stmt::Kind::try_:
      out += "try ";
      print_block(out, s.body, depth);
      out += " catch (" + s.name + (s.catch_var.empty() ? "" : " " + s.catch_var) + ") ";
      print_block(out, s.alt, depth);
      out += '\n';
      break;
    case Stmt::Kind::assert_:
      out += "assert ";
      print_expr(out, *s.exprs[0]);
      out += ";\n";
      break;
    case Stmt::Kind::break_: out += "break;\n"; break;
    case Stmt::Kind::continue_: out += "continue;\n"; break;
    case Stmt::Kind::expr:
      print_expr(out, *s.exprs[0]);
      out += ";\n";
      break;
  }
}

inline void print_block(std::string& out, const std::vector<Stmt>& body, int depth) {
  out += "{\n";
  for (const auto& s : body) print_stmt(out, s, depth + 1);
  indent(out, depth);
  out += '}';
}

}  // namespace detail

inline std::string print(const Expr& e) {
  std::string out;
  detail::print_expr(out, e);
  return out;
}

/// Canonical source text; parse(print(p)) is structurally equal to p.
inline std::string print(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.functions.size(); ++i) {
    const auto& f = p.functions[i];
    if (i) out += '\n';
    out += "fn " + f.name + "(";
    for (std::size_t k = 0; k < f.params.size(); ++k) {
      if (k) out += ", ";
      out += f.params[k];
    }
    out += ") ";
    detail::print_block(out, f.body, 0);
    out += '\n';
  }
  return out;
}

}  // namespace patchsim::minilang
