#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "patchsim/errors.hpp"
#include "patchsim/minilang/ast.hpp"
#include "patchsim/minilang/lexer.hpp"

namespace patchsim::minilang {

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  Program program() {
    Program p;
    prog_ = &p;
    while (!at_eof()) p.functions.push_back(function());
    for (std::size_t i = 0; i < p.functions.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (p.functions[i].name == p.functions[j].name)
          throw ParseError(p.functions[i].pos.line, p.functions[i].pos.column,
                           "duplicate function '" + p.functions[i].name + "'");
    return p;
  }

  ExprPtr lone_expression() {
    auto e = expression();
    if (!at_eof()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  Program* prog_ = nullptr;
  std::string fn_name_;
  int last_stmt_line_ = 0;
  int stmts_on_line_ = 0;

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(at_ + k, toks_.size() - 1)];
  }
  bool at_eof() const { return peek().kind == Tok::eof; }

  [[noreturn]] void fail(const std::string& what) const {
    const auto& t = peek();
    throw ParseError(t.pos.line, t.pos.column,
                     what + (t.kind == Tok::eof ? " at end of input" : " near '" + spell(t) + "'"));
  }

  bool check(std::string_view p) const {
    const auto& t = peek();
    return (t.kind == Tok::punct || t.kind == Tok::keyword) && t.text == p;
  }
  bool accept(std::string_view p) {
    if (!check(p)) return false;
    ++at_;
    return true;
  }
  const Token& expect(std::string_view p) {
    if (!check(p)) fail("expected '" + std::string(p) + "'");
    return toks_[at_++];
  }
  std::string ident() {
    if (peek().kind != Tok::ident) fail("expected identifier");
    return toks_[at_++].text;
  }

  Function function() {
    const std::size_t first = at_;
    Function f;
    f.pos = peek().pos;
    expect("fn");
    f.name = ident();
    fn_name_ = f.name;
    expect("(");
    if (!check(")")) {
      do f.params.push_back(ident());
      while (accept(","));
    }
    expect(")");
    f.body = block();
    for (std::size_t i = first; i < at_; ++i) {
      if (i > first) f.tokens += ' ';
      f.tokens += spell(toks_[i]);
    }
    return f;
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> out;
    while (!check("}")) {
      if (at_eof()) fail("expected '}'");
      out.push_back(statement());
    }
    expect("}");
    return out;
  }

  Stmt begin(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    s.pos = peek().pos;
    s.id = static_cast<std::uint32_t>(prog_->statements.size());
    if (s.pos.line != last_stmt_line_) {
      last_stmt_line_ = s.pos.line;
      stmts_on_line_ = 0;
    }
    prog_->statements.push_back({fn_name_, s.pos, kind, stmts_on_line_++});
    return s;
  }

  Stmt statement() {
    const auto& t = peek();
    if (t.kind == Tok::keyword) {
      if (t.text == "var") {
        Stmt s = begin(Stmt::Kind::var_decl);
        ++at_;
        s.name = ident();
        expect("=");
        s.exprs.push_back(expression());
        expect(";");
        return s;
      }
      if (t.text == "if") return if_statement();
      if (t.text == "while") {
        Stmt s = begin(Stmt::Kind::while_);
        ++at_;
        expect("(");
        s.exprs.push_back(expression());
        expect(")");
        s.body = block();
        return s;
      }
      if (t.text == "return") {
        Stmt s = begin(Stmt::Kind::return_);
        ++at_;
        if (!check(";")) s.exprs.push_back(expression());
        expect(";");
        return s;
      }
      if (t.text == "throw") {
        Stmt s = begin(Stmt::Kind::throw_);
        ++at_;
        s.name = ident();
        if (accept("(")) {
          if (!check(")")) s.exprs.push_back(expression());
          expect(")");
        }
        expect(";");
        return s;
      }
      if (t.text == "try") {
        Stmt s = begin(Stmt::Kind::try_);
        ++at_;
        s.body = block();
        expect("catch");
        expect("(");
        s.name = ident();
        if (peek().kind == Tok::ident) s.catch_var = ident();
        expect(")");
        s.alt = block();
        return s;
      }
      if (t.text == "assert") {
        Stmt s = begin(Stmt::Kind::assert_);
        ++at_;
        s.exprs.push_back(expression());
        expect(";");
        return s;
      }
      if (t.text == "break" || t.text == "continue") {
        Stmt s = begin(t.text == "break" ? Stmt::Kind::break_ : Stmt::Kind::continue_);
        ++at_;
        expect(";");
        return s;
      }
    }

    if (t.kind == Tok::ident && peek(1).kind == Tok::punct && peek(1).text == "=") {
      Stmt s = begin(Stmt::Kind::assign);
      s.name = ident();
      expect("=");
      s.exprs.push_back(expression());
      expect(";");
      return s;
    }

    Stmt s = begin(Stmt::Kind::expr);
    auto e = expression();
    if (accept("=")) {
      if (e->kind != Expr::Kind::index || e->children[0]->kind != Expr::Kind::var)
        fail("left side of '=' must be a variable or 'name[index]'");
      s.kind = Stmt::Kind::index_assign;
      prog_->statements[s.id].kind = s.kind;
      s.name = e->children[0]->text;
      s.exprs.push_back(std::move(e->children[1]));
      s.exprs.push_back(expression());
    } else {
      s.exprs.push_back(std::move(e));
    }
    expect(";");
    return s;
  }

  Stmt if_statement() {
    Stmt s = begin(Stmt::Kind::if_);
    expect("if");
    expect("(");
    s.exprs.push_back(expression());
    expect(")");
    s.body = block();
    if (accept("else")) {
      s.has_else = true;
      if (check("if")) {
        s.alt.push_back(if_statement());
      } else {
        s.alt = block();
      }
    }
    return s;
  }

  // Precedence climbing, lowest first.
  static int precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return 0;
  }

  ExprPtr expression(int min_prec = 1) {
    auto lhs = unary();
    while (peek().kind == Tok::punct) {
      const int prec = precedence(peek().text);
      if (prec == 0 || prec < min_prec) break;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::binary;
      e->pos = peek().pos;
      e->text = toks_[at_++].text;
      e->children.push_back(std::move(lhs));
      e->children.push_back(expression(prec + 1));
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (check("-") || check("!")) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::unary;
      e->pos = peek().pos;
      e->text = toks_[at_++].text;
      e->children.push_back(unary());
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() {
    auto e = primary();
    while (check("[")) {
      auto ix = std::make_unique<Expr>();
      ix->kind = Expr::Kind::index;
      ix->pos = peek().pos;
      ++at_;
      ix->children.push_back(std::move(e));
      ix->children.push_back(expression());
      expect("]");
      e = std::move(ix);
    }
    return e;
  }

  ExprPtr primary() {
    const Token& t = peek();
    auto e = std::make_unique<Expr>();
    e->pos = t.pos;
    switch (t.kind) {
      case Tok::integer:
        e->kind = Expr::Kind::int_lit;
        e->int_value = t.int_value;
        ++at_;
        return e;
      case Tok::string:
        e->kind = Expr::Kind::str_lit;
        e->text = t.text;
        ++at_;
        return e;
      case Tok::ident:
        e->text = t.text;
        ++at_;
        if (accept("(")) {
          e->kind = Expr::Kind::call;
          if (!check(")")) {
            do e->children.push_back(expression());
            while (accept(","));
          }
          expect(")");
        } else {
          e->kind = Expr::Kind::var;
        }
        return e;
      case Tok::keyword:
        if (t.text == "true" || t.text == "false") {
          e->kind = Expr::Kind::bool_lit;
          e->bool_value = t.text == "true";
          ++at_;
          return e;
        }
        if (t.text == "null") {
          e->kind = Expr::Kind::null_lit;
          ++at_;
          return e;
        }
        break;
      case Tok::punct:
        if (t.text == "(") {
          ++at_;
          auto inner = expression();
          expect(")");
          return inner;
        }
        if (t.text == "[") {
          ++at_;
          e->kind = Expr::Kind::array;
          if (!check("]")) {
            do e->children.push_back(expression());
            while (accept(","));
          }
          expect("]");
          return e;
        }
        break;
      case Tok::eof:
        break;
    }
    fail("expected expression");
  }
};

}  // namespace detail

/// Parses a whole source file. Statement ids are dense and follow the order in
/// which statements start in the text.
inline Program parse(std::string_view source) { return detail::Parser(source).program(); }

/// Parses a single expression, e.g. a test invocation `f(1, [2, 3])`.
inline ExprPtr parse_expression(std::string_view text) {
  return detail::Parser(text).lone_expression();
}

}  // namespace patchsim::minilang
