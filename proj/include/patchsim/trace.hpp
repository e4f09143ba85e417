#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchsim/errors.hpp"

namespace patchsim {

/// Identifies one statement of a program. Unchanged statements keep their id
/// across the buggy and patched versions; statements introduced by a patch get
/// ids above the buggy version's maximum.
struct StatementId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const StatementId&) const = default;
};

enum class EventKind { statement, enter, exit, unwind, end };

struct TraceEvent {
  EventKind kind = EventKind::statement;
  StatementId statement{};
  std::string method;
  bool crashed = false;  // only meaningful for EventKind::end

  static TraceEvent stmt(std::uint32_t id) { return {EventKind::statement, {id}, {}, false}; }
  static TraceEvent enter(std::string m) { return {EventKind::enter, {}, std::move(m), false}; }
  static TraceEvent exit(std::string m) { return {EventKind::exit, {}, std::move(m), false}; }
  static TraceEvent unwind(std::string m) { return {EventKind::unwind, {}, std::move(m), false}; }
  static TraceEvent end(bool crashed) { return {EventKind::end, {}, {}, crashed}; }

  bool operator==(const TraceEvent&) const = default;
};

enum class ProgramVersion { buggy, patched };

/// Complete-path spectrum: the ordered statement ids of one execution.
struct Spectrum {
  std::vector<StatementId> events;
  ProgramVersion version = ProgramVersion::buggy;
  std::string test_id;
  bool crashed = false;

  bool empty() const noexcept { return events.empty(); }
  std::size_t size() const noexcept { return events.size(); }
};

enum class TestOrigin { original, generated };
enum class TestResult { passing, failing, discarded, unknown };

inline std::string_view to_string(TestResult r) {
  switch (r) {
    case TestResult::passing: return "passing";
    case TestResult::failing: return "failing";
    case TestResult::discarded: return "discarded";
    case TestResult::unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<TestResult> parse_test_result(std::string_view s) {
  if (s == "passing") return TestResult::passing;
  if (s == "failing") return TestResult::failing;
  if (s == "discarded") return TestResult::discarded;
  if (s == "unknown") return TestResult::unknown;
  return std::nullopt;
}

struct TestCase {
  std::string id;
  TestOrigin origin = TestOrigin::original;
  TestResult result = TestResult::unknown;
  std::string input;  // serialized invocation, e.g. `f(1, "a", [true])`

  bool operator==(const TestCase&) const = default;
};

/// Maps statements of the patched version onto the buggy version's ids.
/// patched_to_buggy[i] holds the buggy id of patched-local statement i, or
/// nullopt when the statement was introduced by the patch.
struct IdAlignment {
  std::vector<std::optional<StatementId>> patched_to_buggy;
  std::size_t buggy_count = 0;

  std::size_t aligned_count() const {
    std::size_t n = 0;
    for (const auto& a : patched_to_buggy) n += a.has_value();
    return n;
  }

  /// Trace ids for every patched-local statement: the aligned buggy id, or a
  /// fresh id above buggy_count assigned in source order.
  std::vector<StatementId> patched_ids() const {
    std::vector<StatementId> out;
    out.reserve(patched_to_buggy.size());
    auto fresh = static_cast<std::uint32_t>(buggy_count);
    for (const auto& a : patched_to_buggy) out.push_back(a ? *a : StatementId{fresh++});
    return out;
  }
};

struct PatchSpec {
  std::string buggy_source;
  std::string patched_source;
  std::set<std::string> modified_methods;
  IdAlignment alignment;
};

namespace detail {

// Walks a raw trace, validating nesting, and invokes on_stmt(id, patched_depth)
// for every statement event. Returns whether an unwind reached top level or
// the end record flagged a crash.
template <typename OnStatement>
bool walk_trace(std::span<const TraceEvent> raw, const std::set<std::string>* patched,
                OnStatement&& on_stmt) {
  std::vector<const std::string*> stack;
  std::size_t patched_depth = 0;
  bool crashed = false;
  bool ended = false;

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& ev = raw[i];
    if (ended) throw MalformedTrace("event " + std::to_string(i) + " after end of test");
    switch (ev.kind) {
      case EventKind::statement:
        on_stmt(ev.statement, patched_depth);
        break;
      case EventKind::enter:
        stack.push_back(&ev.method);
        if (patched && patched->contains(ev.method)) ++patched_depth;
        break;
      case EventKind::exit:
      case EventKind::unwind: {
        if (stack.empty() || *stack.back() != ev.method) {
          throw MalformedTrace("event " + std::to_string(i) + ": exit of '" + ev.method +
                               "' does not match the innermost open call");
        }
        stack.pop_back();
        if (patched && patched->contains(ev.method)) --patched_depth;
        if (ev.kind == EventKind::unwind && stack.empty()) crashed = true;
        break;
      }
      case EventKind::end:
        if (!stack.empty()) {
          throw MalformedTrace("end of test with " + std::to_string(stack.size()) +
                               " open call(s)");
        }
        crashed = crashed || ev.crashed;
        ended = true;
        break;
    }
  }
  if (!stack.empty()) {
    throw MalformedTrace("trace ends with " + std::to_string(stack.size()) +
                         " open call(s) and no unwind events");
  }
  return crashed;
}

}  // namespace detail

/// Keeps the statements executed while at least one call of a patched method
/// is active. Disjoint intervals are concatenated in trace order. An empty
/// result means the execution never entered a patched method.
inline Spectrum extract_context_spectrum(std::span<const TraceEvent> raw,
                                         const std::set<std::string>& patched) {
  if (patched.empty()) throw Error("extract_context_spectrum: empty patched-method set");
  Spectrum out;
  out.crashed = detail::walk_trace(raw, &patched, [&](StatementId id, std::size_t depth) {
    if (depth > 0) out.events.push_back(id);
  });
  return out;
}

inline Spectrum extract_full_spectrum(std::span<const TraceEvent> raw) {
  Spectrum out;
  out.crashed = detail::walk_trace(raw, nullptr, [&](StatementId id, std::size_t) {
    out.events.push_back(id);
  });
  return out;
}

/// True if `sub` can be obtained from `seq` by deleting elements.
template <typename T>
bool is_subsequence(std::span<const T> sub, std::span<const T> seq) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i) {
    if (seq[i] == sub[j]) ++j;
  }
  return j == sub.size();
}

}  // namespace patchsim

template <>
struct std::hash<patchsim::StatementId> {
  std::size_t operator()(const patchsim::StatementId& s) const noexcept {
    return std::hash<std::uint32_t>{}(s.value);
  }
};
