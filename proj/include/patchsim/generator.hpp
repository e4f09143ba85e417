#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "patchsim/minilang/interpreter.hpp"
#include "patchsim/minilang/value.hpp"
#include "patchsim/trace.hpp"

namespace patchsim {

/// Feedback-random test generation settings. The attempt budget stands in
/// for a wall-clock generation budget so that output depends only on the
/// seed, the program and this config.
struct GenConfig {
  std::uint64_t seed = 20170;
  std::size_t attempts = 400;
  std::size_t max_selected = 20;
  double reuse_probability = 0.25;  // draw a harvested argument verbatim
  std::size_t max_array_length = 6;
  std::vector<std::int64_t> int_pool = {-1, 0, 1, 2, 3, 5, 10, 42, 100};
  std::vector<std::string> string_pool = {"", "a", "ab", "abc", "xyz", "hello"};
  minilang::RunConfig run;
};

namespace detail {

// Shapes observed at one argument position (and, recursively, inside arrays).
struct Shape {
  bool null = false, integer = false, boolean = false, string = false;
  std::vector<minilang::Value> harvested;
  std::size_t max_length = 0;
  Shape* element = nullptr;  // owned by ShapeArena
  bool array = false;
};

class ShapeArena {
 public:
  Shape* make() { return &store_.emplace_back(); }

 private:
  std::deque<Shape> store_;
};

inline void observe(Shape& s, const minilang::Value& v, ShapeArena& arena, int depth = 0) {
  s.harvested.push_back(v);
  if (v.is_null()) s.null = true;
  else if (v.is_int()) s.integer = true;
  else if (v.is_bool()) s.boolean = true;
  else if (v.is_string()) s.string = true;
  else {
    s.array = true;
    const auto& arr = *v.as_array();
    s.max_length = std::max(s.max_length, arr.size());
    if (depth < 4) {
      if (s.element == nullptr) s.element = arena.make();
      for (const auto& e : arr) observe(*s.element, e, arena, depth + 1);
    }
  }
}

inline void collect_atoms(const minilang::Value& v, std::set<std::int64_t>& ints,
                          std::set<std::string>& strs) {
  if (v.is_int()) ints.insert(v.as_int());
  else if (v.is_string()) strs.insert(v.as_string());
  else if (v.is_array())
    for (const auto& e : *v.as_array()) collect_atoms(e, ints, strs);
}

class Synthesizer {
 public:
  Synthesizer(const GenConfig& cfg, std::vector<std::int64_t> ints, std::vector<std::string> strs)
      : cfg_(cfg), rng_(cfg.seed), ints_(std::move(ints)), strs_(std::move(strs)) {}

  std::size_t pick(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }

  minilang::Value value(const Shape& s, int depth = 0) {
    if (!s.harvested.empty() && chance(cfg_.reuse_probability))
      return minilang::deep_copy(s.harvested[pick(s.harvested.size())]);

    std::vector<int> kinds;
    if (s.null) kinds.push_back(0);
    if (s.integer) kinds.push_back(1);
    if (s.boolean) kinds.push_back(2);
    if (s.string) kinds.push_back(3);
    if (s.array) kinds.push_back(4);
    if (kinds.empty()) return minilang::Value();

    switch (kinds[pick(kinds.size())]) {
      case 1: {
        auto v = ints_[pick(ints_.size())];
        if (chance(0.2)) v += chance(0.5) ? 1 : -1;
        return minilang::Value(v);
      }
      case 2: return minilang::Value(chance(0.5));
      case 3: return minilang::Value(strs_[pick(strs_.size())]);
      case 4: {
        minilang::Array arr;
        const std::size_t limit = std::min(cfg_.max_array_length, s.max_length + 2);
        const std::size_t len = pick(limit + 1);
        for (std::size_t i = 0; i < len; ++i) {
          if (s.element == nullptr || depth >= 4) break;
          arr.push_back(value(*s.element, depth + 1));
        }
        return minilang::Value(std::move(arr));
      }
      default: return minilang::Value();
    }
  }

  template <typename T>
  void sample(std::vector<T>& items, std::size_t k) {
    // Partial Fisher-Yates, then restore discovery order among the chosen.
    std::vector<std::size_t> idx(items.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t take = std::min(k, idx.size());
    for (std::size_t i = 0; i < take; ++i) std::swap(idx[i], idx[i + pick(idx.size() - i)]);
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    std::vector<T> out;
    out.reserve(take);
    for (auto i : idx) out.push_back(std::move(items[i]));
    items = std::move(out);
  }

 private:
  const GenConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<std::int64_t> ints_;
  std::vector<std::string> strs_;
};

}  // namespace detail

/// Generates test inputs on the buggy version that enter at least one
/// modified method.
///
/// Candidates call the same entry functions as the original tests. Each
/// argument is either a harvested original argument or a fresh value of a
/// shape observed at that position, drawn from the literal pools extended
/// with every atom found in the original inputs. At most max_selected
/// covering candidates are kept, sampled uniformly.
inline std::vector<TestCase> generate_tests(const minilang::Program& buggy,
                                            const std::set<std::string>& modified_methods,
                                            std::span<const minilang::TestInvocation> originals,
                                            const GenConfig& cfg = {}) {
  if (modified_methods.empty()) throw Error("generate_tests: no modified methods");
  std::vector<TestCase> out;
  if (cfg.max_selected == 0 || originals.empty()) return out;

  detail::ShapeArena arena;
  std::vector<std::string> entries;
  std::map<std::string, std::vector<detail::Shape*>> shapes;
  std::set<std::int64_t> ints(cfg.int_pool.begin(), cfg.int_pool.end());
  std::set<std::string> strs(cfg.string_pool.begin(), cfg.string_pool.end());
  std::set<std::string> seen;

  for (const auto& t : originals) {
    if (buggy.find(t.entry) == nullptr) continue;
    auto [it, fresh] = shapes.try_emplace(t.entry);
    if (fresh) entries.push_back(t.entry);
    auto& sh = it->second;
    while (sh.size() < t.args.size()) sh.push_back(arena.make());
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      detail::observe(*sh[i], t.args[i], arena);
      detail::collect_atoms(t.args[i], ints, strs);
    }
    seen.insert(t.serialize());
  }
  if (entries.empty()) return out;

  detail::Synthesizer synth(cfg, {ints.begin(), ints.end()}, {strs.begin(), strs.end()});
  for (std::size_t attempt = 0; attempt < cfg.attempts; ++attempt) {
    const std::string& entry = entries[synth.pick(entries.size())];
    minilang::TestInvocation inv;
    inv.entry = entry;
    for (const auto* s : shapes[entry]) inv.args.push_back(synth.value(*s));

    std::string input = inv.serialize();
    if (!seen.insert(input).second) continue;

    const auto run = minilang::run_traced(buggy, inv, cfg.run);
    if (extract_context_spectrum(run.events, modified_methods).empty()) continue;

    TestCase tc;
    tc.origin = TestOrigin::generated;
    tc.result = TestResult::unknown;
    tc.input = std::move(input);
    out.push_back(std::move(tc));
  }

  synth.sample(out, cfg.max_selected);
  for (std::size_t i = 0; i < out.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "gen%03zu", i);
    out[i].id = buf;
  }
  return out;
}

}  // namespace patchsim
