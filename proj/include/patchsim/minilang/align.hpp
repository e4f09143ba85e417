#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchsim/minilang/ast.hpp"
#include "patchsim/minilang/parser.hpp"
#include "patchsim/trace.hpp"

namespace patchsim::minilang {

/// Line text with whitespace and `//` comments removed.
inline std::string normalize_line(std::string_view line) {
  std::string out;
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < line.size()) out += line[++i];
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
    } else if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') {
      break;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      out += c;
    }
  }
  return out;
}

inline std::vector<std::string> normalized_lines(std::string_view src) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= src.size()) {
    auto nl = src.find('\n', start);
    if (nl == std::string_view::npos) nl = src.size();
    out.push_back(normalize_line(src.substr(start, nl - start)));
    start = nl + 1;
  }
  return out;
}

/// Longest-common-subsequence line matching. Returns pairs of 0-based line
/// indices (buggy, patched) in increasing order.
inline std::vector<std::pair<std::size_t, std::size_t>> match_lines(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t pre = 0;
  while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) {
    out.emplace_back(pre, pre);
    ++pre;
  }
  std::size_t suf = 0;
  while (suf < a.size() - pre && suf < b.size() - pre &&
         a[a.size() - 1 - suf] == b[b.size() - 1 - suf])
    ++suf;

  const std::size_t n = a.size() - pre - suf;
  const std::size_t m = b.size() - pre - suf;
  // table[i][j] = LCS of a[pre+i..] and b[pre+j..] within the middle region
  std::vector<std::uint32_t> table((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return table[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = a[pre + i] == b[pre + j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
    }
  }
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[pre + i] == b[pre + j]) {
      out.emplace_back(pre + i, pre + j);
      ++i;
      ++j;
    } else if (at(i + 1, j) >= at(i, j + 1)) {
      ++i;
    } else {
      ++j;
    }
  }
  for (std::size_t k = 0; k < suf; ++k) out.emplace_back(a.size() - suf + k, b.size() - suf + k);
  return out;
}

struct VersionAlignment {
  IdAlignment ids;
  std::set<std::string> modified_methods;
};

/// Maps unchanged statements of the patched version onto buggy ids.
///
/// A statement is unchanged when its line survives the line diff (modulo
/// whitespace and comments) and the statement at the same position on the
/// matched buggy line has the same kind. Modified methods are the functions
/// whose token sequence differs, plus functions present in only one version.
inline VersionAlignment align_versions(const Program& buggy, std::string_view buggy_src,
                                       const Program& patched, std::string_view patched_src) {
  VersionAlignment out;
  out.ids.buggy_count = buggy.statement_count();
  out.ids.patched_to_buggy.assign(patched.statement_count(), std::nullopt);

  const auto la = normalized_lines(buggy_src);
  const auto lb = normalized_lines(patched_src);
  std::map<int, int> line_map;  // patched line -> buggy line, 1-based
  for (auto [x, y] : match_lines(la, lb))
    line_map[static_cast<int>(y) + 1] = static_cast<int>(x) + 1;

  std::map<std::pair<int, int>, std::uint32_t> buggy_at;  // (line, index on line) -> id
  for (std::uint32_t id = 0; id < buggy.statements.size(); ++id) {
    const auto& s = buggy.statements[id];
    buggy_at[{s.pos.line, s.index_on_line}] = id;
  }
  for (std::uint32_t id = 0; id < patched.statements.size(); ++id) {
    const auto& s = patched.statements[id];
    auto lm = line_map.find(s.pos.line);
    if (lm == line_map.end()) continue;
    auto it = buggy_at.find({lm->second, s.index_on_line});
    if (it == buggy_at.end()) continue;
    if (buggy.statements[it->second].kind != s.kind) continue;
    out.ids.patched_to_buggy[id] = StatementId{it->second};
  }

  for (const auto& f : patched.functions) {
    const Function* g = buggy.find(f.name);
    if (g == nullptr || g->tokens != f.tokens) out.modified_methods.insert(f.name);
  }
  for (const auto& g : buggy.functions)
    if (patched.find(g.name) == nullptr) out.modified_methods.insert(g.name);
  return out;
}

/// Parses both versions and derives the alignment and modified methods.
inline PatchSpec make_patch_spec(std::string buggy_src, std::string patched_src) {
  const Program buggy = parse(buggy_src);
  const Program patched = parse(patched_src);
  auto a = align_versions(buggy, buggy_src, patched, patched_src);
  PatchSpec spec;
  spec.buggy_source = std::move(buggy_src);
  spec.patched_source = std::move(patched_src);
  spec.modified_methods = std::move(a.modified_methods);
  spec.alignment = std::move(a.ids);
  return spec;
}

}  // namespace patchsim::minilang
