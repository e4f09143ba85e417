#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "patchsim/distance.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/minilang/ast.hpp"
#include "patchsim/minilang/value.hpp"
#include "patchsim/patch_classifier.hpp"
#include "patchsim/trace.hpp"

namespace patchsim {

/// Labelled ordered tree used by the syntactic baseline.
struct LabelTree {
  std::string label;
  std::vector<LabelTree> children;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
  }
};

namespace detail {

// Node inventory: every expression node is one tree node (an identifier or a
// literal is a leaf; operators, calls and indexing are inner nodes). Each
// statement is one node; blocks of if/while/try and else/catch arms are
// grouping nodes.

inline LabelTree expr_tree(const minilang::Expr& e) {
  using K = minilang::Expr::Kind;
  LabelTree t;
  switch (e.kind) {
    case K::int_lit: t.label = "int:" + std::to_string(e.int_value); break;
    case K::bool_lit: t.label = e.bool_value ? "true" : "false"; break;
    case K::str_lit: t.label = "str:" + minilang::quote(e.text); break;
    case K::null_lit: t.label = "null"; break;
    case K::var: t.label = "id:" + e.text; break;
    case K::array: t.label = "array"; break;
    case K::index: t.label = "index"; break;
    case K::call: t.label = "call:" + e.text; break;
    case K::unary: t.label = "unary:" + e.text; break;
    case K::binary: t.label = "op:" + e.text; break;
  }
  for (const auto& c : e.children) t.children.push_back(expr_tree(*c));
  return t;
}

inline LabelTree block_tree(std::string label, const std::vector<minilang::Stmt>& body);

inline LabelTree stmt_tree(const minilang::Stmt& s) {
  using K = minilang::Stmt::Kind;
  LabelTree t;
  t.label = std::string(minilang::kind_name(s.kind));
  if (!s.name.empty()) t.label += ":" + s.name;
  for (const auto& e : s.exprs) t.children.push_back(expr_tree(*e));
  switch (s.kind) {
    case K::if_:
      t.children.push_back(block_tree("then", s.body));
      if (s.has_else) t.children.push_back(block_tree("else", s.alt));
      break;
    case K::while_: t.children.push_back(block_tree("body", s.body)); break;
    case K::try_:
      t.children.push_back(block_tree("try", s.body));
      t.children.push_back(block_tree("catch:" + s.catch_var, s.alt));
      break;
    default: break;
  }
  return t;
}

inline LabelTree block_tree(std::string label, const std::vector<minilang::Stmt>& body) {
  LabelTree t{std::move(label), {}};
  for (const auto& s : body) t.children.push_back(stmt_tree(s));
  return t;
}

struct Postorder {
  std::vector<const std::string*> label;
  std::vector<std::size_t> leftmost;  // leftmost leaf descendant
  std::vector<std::size_t> keyroots;

  explicit Postorder(const LabelTree& root) {
    walk(root);
    std::vector<bool> seen(label.size(), false);
    for (std::size_t i = label.size(); i-- > 0;) {
      if (!seen[leftmost[i]]) {
        seen[leftmost[i]] = true;
        keyroots.push_back(i);
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }

  std::size_t walk(const LabelTree& t) {
    std::size_t first = SIZE_MAX;
    for (const auto& c : t.children) {
      const std::size_t lm = walk(c);
      if (first == SIZE_MAX) first = lm;
    }
    const std::size_t self = label.size();
    label.push_back(&t.label);
    leftmost.push_back(first == SIZE_MAX ? self : first);
    return leftmost.back();
  }
};

}  // namespace detail

inline LabelTree program_tree(const minilang::Program& p) {
  LabelTree root{"program", {}};
  for (const auto& f : p.functions) {
    LabelTree fn{"fn:" + f.name, {}};
    for (const auto& prm : f.params) fn.children.push_back({"param:" + prm, {}});
    fn.children.push_back(detail::block_tree("body", f.body));
    root.children.push_back(std::move(fn));
  }
  return root;
}

/// Minimum number of node deletions plus insertions turning one ordered tree
/// into the other (Zhang-Shasha with relabelling priced as delete + insert).
inline std::size_t tree_edit_distance(const LabelTree& a, const LabelTree& b) {
  const detail::Postorder x(a), y(b);
  const std::size_t n = x.label.size(), m = y.label.size();
  std::vector<std::size_t> tree((n + 1) * (m + 1), 0);
  auto td = [&](std::size_t i, std::size_t j) -> std::size_t& { return tree[i * (m + 1) + j]; };
  std::vector<std::size_t> forest;

  for (std::size_t ki : x.keyroots) {
    for (std::size_t kj : y.keyroots) {
      const std::size_t li = x.leftmost[ki], lj = y.leftmost[kj];
      const std::size_t rows = ki - li + 2, cols = kj - lj + 2;
      forest.assign(rows * cols, 0);
      auto fd = [&](std::size_t i, std::size_t j) -> std::size_t& { return forest[i * cols + j]; };
      for (std::size_t i = 1; i < rows; ++i) fd(i, 0) = fd(i - 1, 0) + 1;
      for (std::size_t j = 1; j < cols; ++j) fd(0, j) = fd(0, j - 1) + 1;
      for (std::size_t i = 1; i < rows; ++i) {
        const std::size_t ni = li + i - 1;
        for (std::size_t j = 1; j < cols; ++j) {
          const std::size_t nj = lj + j - 1;
          const std::size_t del = fd(i - 1, j) + 1;
          const std::size_t ins = fd(i, j - 1) + 1;
          if (x.leftmost[ni] == li && y.leftmost[nj] == lj) {
            const std::size_t rel = *x.label[ni] == *y.label[nj] ? 0 : 2;
            fd(i, j) = std::min({del, ins, fd(i - 1, j - 1) + rel});
            td(ni, nj) = fd(i, j);
          } else {
            const std::size_t pi = x.leftmost[ni] - li, pj = y.leftmost[nj] - lj;
            fd(i, j) = std::min({del, ins, fd(pi, pj) + td(ni, nj)});
          }
        }
      }
    }
  }
  return td(n - 1, m - 1);
}

/// AST-based syntactic distance between two program versions.
inline std::size_t syntactic_distance(const minilang::Program& buggy, const minilang::Program& patched) {
  return tree_edit_distance(program_tree(buggy), program_tree(patched));
}

/// One original test for the semantic baseline.
struct CoveredRun {
  TestExecutionPair run;
  bool covers = false;  // entered a modified method on either version
};

/// Mean before/after full-spectrum distance over the original tests that
/// cover a modified method.
inline double semantic_distance_led(std::span<const CoveredRun> originals,
                                    const TracePreprocessing& prep = TracePreprocessing::exact()) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : originals) {
    if (!o.covers) continue;
    if (o.run.buggy == nullptr || o.run.patched == nullptr)
      throw MissingTrace("test '" + o.run.test->id + "' lacks a trace");
    sum += distance(*o.run.buggy, *o.run.patched, prep).value;
    ++n;
  }
  if (n == 0) throw EmptyCoveringSet("no original test covers a modified method");
  return sum / static_cast<double>(n);
}

enum class CrashSignal { no_signal, incorrect };

/// Flags a patch that makes some test crash that did not crash before.
inline CrashSignal crash_oracle(std::span<const TestExecutionPair> runs) {
  CrashSignal out = CrashSignal::no_signal;
  for (const auto& r : runs) {
    if (r.buggy == nullptr || r.patched == nullptr)
      throw MissingTrace("test '" + r.test->id + "' lacks a trace");
    if (r.patched->crashed && !r.buggy->crashed) out = CrashSignal::incorrect;
  }
  return out;
}

}  // namespace patchsim
