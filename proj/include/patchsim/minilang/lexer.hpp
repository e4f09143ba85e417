#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "patchsim/errors.hpp"
#include "patchsim/minilang/ast.hpp"

namespace patchsim::minilang {

enum class Tok { ident, keyword, integer, string, punct, eof };

struct Token {
  Tok kind = Tok::eof;
  std::string text;  // identifier/keyword/punct spelling, decoded string contents
  std::int64_t int_value = 0;
  SourcePos pos;
  std::size_t offset = 0;  // byte offset of the first character
};

inline bool is_keyword(std::string_view s) {
  static constexpr std::string_view kw[] = {"fn",     "var",   "if",     "else",  "while",
                                            "return", "throw", "try",    "catch", "assert",
                                            "break",  "continue", "true", "false", "null"};
  for (auto k : kw)
    if (k == s) return true;
  return false;
}

/// Spelling of a token as it would appear in canonical source.
inline std::string spell(const Token& t) {
  if (t.kind == Tok::integer) return std::to_string(t.int_value);
  if (t.kind != Tok::string) return t.text;
  std::string out = "\"";
  for (char c : t.text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + '"';
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }

    Token t;
    t.pos = {line, col};
    t.offset = i;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.text = std::string(src.substr(i, j - i));
      t.kind = is_keyword(t.text) ? Tok::keyword : Tok::ident;
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::uint64_t v = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        const std::uint64_t d = static_cast<std::uint64_t>(src[j] - '0');
        if (v > (static_cast<std::uint64_t>(INT64_MAX) - d) / 10)
          throw ParseError(line, col, "integer literal out of range");
        v = v * 10 + d;
        ++j;
      }
      t.kind = Tok::integer;
      t.int_value = static_cast<std::int64_t>(v);
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      advance();
      t.kind = Tok::string;
      while (true) {
        if (i >= src.size() || src[i] == '\n') throw ParseError(t.pos.line, t.pos.column, "unterminated string");
        char ch = src[i];
        if (ch == '"') {
          advance();
          break;
        }
        if (ch == '\\') {
          if (i + 1 >= src.size()) throw ParseError(line, col, "unterminated escape");
          const char e = src[i + 1];
          switch (e) {
            case 'n': t.text += '\n'; break;
            case 't': t.text += '\t'; break;
            case '"': t.text += '"'; break;
            case '\\': t.text += '\\'; break;
            default: throw ParseError(line, col, std::string("unknown escape \\") + e);
          }
          advance(2);
          continue;
        }
        t.text += ch;
        advance();
      }
    } else {
      static constexpr std::string_view two[] = {"==", "!=", "<=", ">=", "&&", "||"};
      std::string_view rest = src.substr(i);
      bool matched = false;
      for (auto p : two) {
        if (rest.starts_with(p)) {
          t.kind = Tok::punct;
          t.text = std::string(p);
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        static constexpr std::string_view one = "(){}[],;=<>+-*/%!";
        if (one.find(c) == std::string_view::npos)
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        t.kind = Tok::punct;
        t.text = std::string(1, c);
        advance();
      }
    }
    out.push_back(std::move(t));
  }

  Token eof;
  eof.kind = Tok::eof;
  eof.pos = {line, col};
  eof.offset = src.size();
  out.push_back(eof);
  return out;
}

}  // namespace patchsim::minilang
