#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patchsim/errors.hpp"
#include "patchsim/minilang/ast.hpp"
#include "patchsim/minilang/parser.hpp"
#include "patchsim/minilang/value.hpp"
#include "patchsim/trace.hpp"

namespace patchsim::minilang {

/// Assertion attached to an original test. Generated tests never carry one.
struct Oracle {
  enum class Kind { returns, nothrow, throws };

  Kind kind = Kind::nothrow;
  Value value;      // for returns
  std::string tag;  // for throws
};

struct TestInvocation {
  std::string entry;
  std::vector<Value> args;
  std::optional<Oracle> expected;

  /// `entry(arg, ...)` in literal syntax.
  std::string serialize() const {
    std::string out = entry + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      out += to_literal(args[i]);
    }
    return out + ")";
  }

  static TestInvocation parse(std::string_view text) {
    auto e = parse_expression(text);
    if (e->kind != Expr::Kind::call)
      throw ParseError(e->pos.line, e->pos.column, "test invocation must be a call 'f(args...)'");
    TestInvocation t;
    t.entry = e->text;
    for (const auto& a : e->children) t.args.push_back(literal_value(*a));
    return t;
  }
};

enum class Outcome { passed, failed, crashed };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::passed: return "passed";
    case Outcome::failed: return "failed";
    case Outcome::crashed: return "crashed";
  }
  return "crashed";
}

struct RunConfig {
  std::uint64_t fuel = 1'000'000;  // statement executions
  std::size_t max_call_depth = 200;
};

struct Thrown {
  std::string tag;
  Value payload;
};

struct RunResult {
  std::vector<TraceEvent> events;
  Outcome outcome = Outcome::passed;
  bool fuel_exhausted = false;
  std::optional<Value> returned;
  std::optional<Thrown> uncaught;
  std::uint64_t steps = 0;

  bool crashed_at_top() const { return uncaught.has_value() || fuel_exhausted; }
};

namespace detail {

struct MiniException {
  Thrown thrown;
};

struct FuelOut {};

enum class Flow { normal, ret, brk, cont };

class Interpreter {
 public:
  Interpreter(const Program& p, const RunConfig& cfg, std::span<const StatementId> ids,
              std::vector<TraceEvent>& events)
      : prog_(p), cfg_(cfg), ids_(ids), events_(events) {}

  Value call(const std::string& name, std::vector<Value> args) {
    const Function* f = prog_.find(name);
    if (f == nullptr) return builtin(name, args);
    if (args.size() != f->params.size()) {
      raise("TypeError", name + " expects " + std::to_string(f->params.size()) + " argument(s), got " +
                             std::to_string(args.size()));
    }
    if (depth_ >= cfg_.max_call_depth) raise("StackOverflow", "call depth limit reached in " + name);

    Frame frame;
    for (std::size_t i = 0; i < args.size(); ++i) frame.vars[f->params[i]] = std::move(args[i]);

    events_.push_back(TraceEvent::enter(f->name));
    ++depth_;
    frames_.push_back(&frame);
    try {
      exec_block(f->body);
    } catch (...) {
      frames_.pop_back();
      --depth_;
      events_.push_back(TraceEvent::unwind(f->name));
      throw;
    }
    frames_.pop_back();
    --depth_;
    events_.push_back(TraceEvent::exit(f->name));
    return frame.result;
  }

  std::uint64_t steps() const { return steps_; }

 private:
  struct Frame {
    std::unordered_map<std::string, Value> vars;
    Value result;
  };

  const Program& prog_;
  const RunConfig& cfg_;
  std::span<const StatementId> ids_;
  std::vector<TraceEvent>& events_;
  std::vector<Frame*> frames_;
  std::size_t depth_ = 0;
  std::uint64_t steps_ = 0;

  [[noreturn]] static void raise(std::string tag, std::string message) {
    throw MiniException{{std::move(tag), Value(std::move(message))}};
  }

  Frame& frame() { return *frames_.back(); }

  void step(const Stmt& s) {
    if (steps_ >= cfg_.fuel) throw FuelOut{};
    ++steps_;
    const std::uint32_t id = s.id < ids_.size() ? ids_[s.id].value : s.id;
    events_.push_back(TraceEvent::stmt(id));
  }

  Flow exec_block(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      const Flow f = exec(s);
      if (f != Flow::normal) return f;
    }
    return Flow::normal;
  }

  bool condition(const Expr& e) {
    Value v = eval(e);
    if (!v.is_bool()) raise("TypeError", "condition must be bool, got " + std::string(v.type_name()));
    return v.as_bool();
  }

  Flow exec(const Stmt& s) {
    step(s);
    switch (s.kind) {
      case Stmt::Kind::var_decl:
      case Stmt::Kind::assign:
        if (s.kind == Stmt::Kind::assign && !frame().vars.contains(s.name))
          raise("NameError", "assignment to undeclared variable '" + s.name + "'");
        frame().vars[s.name] = eval(*s.exprs[0]);
        return Flow::normal;
      case Stmt::Kind::index_assign: {
        Value target = lookup(s.name);
        Value ix = eval(*s.exprs[0]);
        Value v = eval(*s.exprs[1]);
        if (target.is_null()) raise("NullError", "index assignment into null '" + s.name + "'");
        if (!target.is_array()) raise("TypeError", "index assignment into " + std::string(target.type_name()));
        if (!ix.is_int()) raise("TypeError", "array index must be int");
        auto& arr = *target.as_array();
        if (ix.as_int() < 0 || static_cast<std::size_t>(ix.as_int()) >= arr.size())
          raise("IndexError", "index " + std::to_string(ix.as_int()) + " out of bounds");
        arr[static_cast<std::size_t>(ix.as_int())] = std::move(v);
        return Flow::normal;
      }
      case Stmt::Kind::if_:
        if (condition(*s.exprs[0])) return exec_block(s.body);
        return exec_block(s.alt);
      case Stmt::Kind::while_: {
        bool first = true;
        while (true) {
          if (!first) step(s);  // header is traced on every condition check
          first = false;
          if (!condition(*s.exprs[0])) return Flow::normal;
          const Flow f = exec_block(s.body);
          if (f == Flow::brk) return Flow::normal;
          if (f == Flow::ret) return f;
        }
      }
      case Stmt::Kind::return_:
        frame().result = s.exprs.empty() ? Value() : eval(*s.exprs[0]);
        return Flow::ret;
      case Stmt::Kind::throw_:
        throw MiniException{{s.name, s.exprs.empty() ? Value() : eval(*s.exprs[0])}};
      case Stmt::Kind::try_: {
        try {
          return exec_block(s.body);
        } catch (MiniException& ex) {
          if (s.name != "Any" && s.name != ex.thrown.tag) throw;
          if (!s.catch_var.empty()) frame().vars[s.catch_var] = std::move(ex.thrown.payload);
        }
        return exec_block(s.alt);
      }
      case Stmt::Kind::assert_: {
        Value v = eval(*s.exprs[0]);
        if (!v.is_bool() || !v.as_bool()) raise("AssertionError", "assertion failed");
        return Flow::normal;
      }
      case Stmt::Kind::break_: return Flow::brk;
      case Stmt::Kind::continue_: return Flow::cont;
      case Stmt::Kind::expr:
        eval(*s.exprs[0]);
        return Flow::normal;
    }
    return Flow::normal;
  }

  Value lookup(const std::string& name) {
    auto it = frame().vars.find(name);
    if (it == frame().vars.end()) raise("NameError", "undefined variable '" + name + "'");
    return it->second;
  }

  static std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::int_lit: return Value(e.int_value);
      case Expr::Kind::bool_lit: return Value(e.bool_value);
      case Expr::Kind::str_lit: return Value(e.text);
      case Expr::Kind::null_lit: return Value();
      case Expr::Kind::var: return lookup(e.text);
      case Expr::Kind::array: {
        Array arr;
        arr.reserve(e.children.size());
        for (const auto& c : e.children) arr.push_back(eval(*c));
        return Value(std::move(arr));
      }
      case Expr::Kind::index: {
        Value base = eval(*e.children[0]);
        Value ix = eval(*e.children[1]);
        if (base.is_null()) raise("NullError", "indexing null");
        if (!ix.is_int()) raise("TypeError", "index must be int");
        const auto i = ix.as_int();
        if (base.is_array()) {
          const auto& arr = *base.as_array();
          if (i < 0 || static_cast<std::size_t>(i) >= arr.size())
            raise("IndexError", "index " + std::to_string(i) + " out of bounds");
          return arr[static_cast<std::size_t>(i)];
        }
        if (base.is_string()) {
          const auto& s = base.as_string();
          if (i < 0 || static_cast<std::size_t>(i) >= s.size())
            raise("IndexError", "index " + std::to_string(i) + " out of bounds");
          return Value(std::string(1, s[static_cast<std::size_t>(i)]));
        }
        raise("TypeError", "cannot index " + std::string(base.type_name()));
      }
      case Expr::Kind::call: {
        std::vector<Value> args;
        args.reserve(e.children.size());
        for (const auto& c : e.children) args.push_back(eval(*c));
        return call(e.text, std::move(args));
      }
      case Expr::Kind::unary: {
        Value v = eval(*e.children[0]);
        if (e.text == "-") {
          if (!v.is_int()) raise("TypeError", "unary '-' on " + std::string(v.type_name()));
          return Value(wrap(0ULL - static_cast<std::uint64_t>(v.as_int())));
        }
        if (!v.is_bool()) raise("TypeError", "'!' on " + std::string(v.type_name()));
        return Value(!v.as_bool());
      }
      case Expr::Kind::binary: return binary(e);
    }
    return Value();
  }

  Value binary(const Expr& e) {
    const std::string& op = e.text;
    if (op == "&&" || op == "||") {
      Value l = eval(*e.children[0]);
      if (!l.is_bool()) raise("TypeError", "'" + op + "' on " + std::string(l.type_name()));
      if (op == "&&" && !l.as_bool()) return Value(false);
      if (op == "||" && l.as_bool()) return Value(true);
      Value r = eval(*e.children[1]);
      if (!r.is_bool()) raise("TypeError", "'" + op + "' on " + std::string(r.type_name()));
      return r;
    }

    Value l = eval(*e.children[0]);
    Value r = eval(*e.children[1]);
    if (op == "==") return Value(equal(l, r));
    if (op == "!=") return Value(!equal(l, r));

    if (op == "+" && l.is_string() && r.is_string()) return Value(l.as_string() + r.as_string());
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      int c = 0;
      if (l.is_int() && r.is_int()) c = l.as_int() < r.as_int() ? -1 : (l.as_int() > r.as_int() ? 1 : 0);
      else if (l.is_string() && r.is_string()) c = l.as_string().compare(r.as_string());
      else raise("TypeError", "cannot compare " + std::string(l.type_name()) + " and " + std::string(r.type_name()));
      if (op == "<") return Value(c < 0);
      if (op == "<=") return Value(c <= 0);
      if (op == ">") return Value(c > 0);
      return Value(c >= 0);
    }

    if (l.is_null() || r.is_null()) raise("NullError", "'" + op + "' on null");
    if (!l.is_int() || !r.is_int())
      raise("TypeError", "'" + op + "' on " + std::string(l.type_name()) + " and " + std::string(r.type_name()));
    const auto a = static_cast<std::uint64_t>(l.as_int());
    const auto b = static_cast<std::uint64_t>(r.as_int());
    if (op == "+") return Value(wrap(a + b));
    if (op == "-") return Value(wrap(a - b));
    if (op == "*") return Value(wrap(a * b));
    if (r.as_int() == 0) raise("ArithmeticError", "division by zero");
    if (l.as_int() == INT64_MIN && r.as_int() == -1) return Value(op == "/" ? l.as_int() : std::int64_t{0});
    if (op == "/") return Value(l.as_int() / r.as_int());
    return Value(l.as_int() % r.as_int());
  }

  Value builtin(const std::string& name, std::vector<Value>& args) {
    auto arity = [&](std::size_t n) {
      if (args.size() != n)
        raise("TypeError", name + " expects " + std::to_string(n) + " argument(s)");
    };
    if (name == "len") {
      arity(1);
      if (args[0].is_null()) raise("NullError", "len(null)");
      if (args[0].is_string()) return Value(static_cast<std::int64_t>(args[0].as_string().size()));
      if (args[0].is_array()) return Value(static_cast<std::int64_t>(args[0].as_array()->size()));
      raise("TypeError", "len of " + std::string(args[0].type_name()));
    }
    if (name == "push") {
      arity(2);
      if (args[0].is_null()) raise("NullError", "push into null");
      if (!args[0].is_array()) raise("TypeError", "push into " + std::string(args[0].type_name()));
      args[0].as_array()->push_back(args[1]);
      return Value();
    }
    if (name == "str") {
      arity(1);
      if (args[0].is_string()) return args[0];
      return Value(to_literal(args[0]));
    }
    if (name == "abs") {
      arity(1);
      if (!args[0].is_int()) raise("TypeError", "abs of " + std::string(args[0].type_name()));
      const auto v = args[0].as_int();
      return Value(v < 0 ? wrap(0ULL - static_cast<std::uint64_t>(v)) : v);
    }
    if (name == "min" || name == "max") {
      arity(2);
      if (!args[0].is_int() || !args[1].is_int()) raise("TypeError", name + " expects ints");
      const auto a = args[0].as_int(), b = args[1].as_int();
      return Value(name == "min" ? std::min(a, b) : std::max(a, b));
    }
    raise("NameError", "undefined function '" + name + "'");
  }
};

}  // namespace detail

/// Executes one test invocation and records its trace.
///
/// `ids` optionally remaps local statement ids to trace ids (used for the
/// patched version so that unchanged statements share the buggy ids). The
/// returned trace always closes every call and ends with an END record.
inline RunResult run_traced(const Program& p, const TestInvocation& t, const RunConfig& cfg = {},
                            std::span<const StatementId> ids = {}) {
  if (p.find(t.entry) == nullptr) throw Error("entry function '" + t.entry + "' not found");

  RunResult out;
  detail::Interpreter interp(p, cfg, ids, out.events);
  try {
    // The callee may mutate its arrays; the invocation must stay reusable.
    std::vector<Value> args;
    for (const auto& a : t.args) args.push_back(deep_copy(a));
    out.returned = interp.call(t.entry, std::move(args));
  } catch (detail::MiniException& ex) {
    out.uncaught = std::move(ex.thrown);
  } catch (detail::FuelOut&) {
    out.fuel_exhausted = true;
  }
  out.steps = interp.steps();
  out.events.push_back(TraceEvent::end(out.crashed_at_top()));

  if (out.fuel_exhausted) {
    out.outcome = Outcome::crashed;
  } else if (out.uncaught) {
    const bool expected_throw = t.expected && t.expected->kind == Oracle::Kind::throws &&
                                t.expected->tag == out.uncaught->tag;
    out.outcome = expected_throw ? Outcome::passed : Outcome::crashed;
  } else if (t.expected) {
    switch (t.expected->kind) {
      case Oracle::Kind::returns:
        out.outcome = equal(*out.returned, t.expected->value) ? Outcome::passed : Outcome::failed;
        break;
      case Oracle::Kind::nothrow: out.outcome = Outcome::passed; break;
      case Oracle::Kind::throws: out.outcome = Outcome::failed; break;
    }
  }
  return out;
}

}  // namespace patchsim::minilang
