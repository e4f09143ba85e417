#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patchsim/errors.hpp"
#include "patchsim/minilang/ast.hpp"

namespace patchsim::minilang {

struct Value;
using Array = std::vector<Value>;
using ArrayRef = std::shared_ptr<Array>;

/// Runtime value. Arrays have reference semantics.
struct Value {
  std::variant<std::monostate, std::int64_t, bool, std::string, ArrayRef> data;

  Value() = default;
  Value(std::int64_t v) : data(v) {}
  Value(bool v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(Array v) : data(std::make_shared<Array>(std::move(v))) {}

  bool is_null() const { return std::holds_alternative<std::monostate>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<ArrayRef>(data); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  bool as_bool() const { return std::get<bool>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  const ArrayRef& as_array() const { return std::get<ArrayRef>(data); }

  std::string_view type_name() const {
    switch (data.index()) {
      case 0: return "null";
      case 1: return "int";
      case 2: return "bool";
      case 3: return "string";
      default: return "array";
    }
  }
};

/// Copy that shares no array storage with the original.
inline Value deep_copy(const Value& v) {
  if (!v.is_array()) return v;
  Array out;
  for (const auto& e : *v.as_array()) out.push_back(deep_copy(e));
  return Value(std::move(out));
}

/// Deep structural equality.
inline bool equal(const Value& a, const Value& b) {
  if (a.data.index() != b.data.index()) return false;
  if (a.is_array()) {
    const auto& x = *a.as_array();
    const auto& y = *b.as_array();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!equal(x[i], y[i])) return false;
    return true;
  }
  return a.data == b.data;
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
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

/// Literal syntax that parses back to an equal value.
inline std::string to_literal(const Value& v) {
  switch (v.data.index()) {
    case 0: return "null";
    case 1: return std::to_string(v.as_int());
    case 2: return v.as_bool() ? "true" : "false";
    case 3: return quote(v.as_string());
    default: {
      std::string out = "[";
      const auto& arr = *v.as_array();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (i) out += ", ";
        out += to_literal(arr[i]);
      }
      return out + "]";
    }
  }
}

/// Evaluates a literal-only expression (no variables or calls).
inline Value literal_value(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::int_lit: return Value(e.int_value);
    case Expr::Kind::bool_lit: return Value(e.bool_value);
    case Expr::Kind::str_lit: return Value(e.text);
    case Expr::Kind::null_lit: return Value();
    case Expr::Kind::array: {
      Array arr;
      for (const auto& c : e.children) arr.push_back(literal_value(*c));
      return Value(std::move(arr));
    }
    case Expr::Kind::unary:
      if (e.text == "-" && e.children[0]->kind == Expr::Kind::int_lit)
        return Value(static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(e.children[0]->int_value)));
      break;
    default: break;
  }
  throw ParseError(e.pos.line, e.pos.column, "expected a literal value");
}

}  // namespace patchsim::minilang
