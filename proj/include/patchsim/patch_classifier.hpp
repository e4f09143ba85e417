#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchsim/distance.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/trace.hpp"

namespace patchsim {

struct PatchSimConfig {
  double k_p = 0.25;
};

struct PatchDistanceEntry {
  std::string test_id;
  TestResult result = TestResult::passing;
  TestOrigin origin = TestOrigin::original;
  Distance distance;
};

/// Per-test distance between the full spectra on the buggy and the patched
/// version.
struct PatchDistanceVector {
  std::vector<PatchDistanceEntry> entries;

  std::vector<double> distances(TestResult r) const {
    std::vector<double> out;
    for (const auto& e : entries)
      if (e.result == r) out.push_back(e.distance.value);
    return out;
  }
};

/// One test's executions on both versions.
struct TestExecutionPair {
  const TestCase* test = nullptr;
  const Spectrum* buggy = nullptr;
  const Spectrum* patched = nullptr;
};

/// Tests labelled discarded or unknown are skipped. Spectra must already use
/// aligned statement ids on the patched side.
inline PatchDistanceVector measure_patch_distances(
    std::span<const TestExecutionPair> runs,
    const TracePreprocessing& prep = TracePreprocessing::exact()) {
  PatchDistanceVector v;
  for (const auto& r : runs) {
    if (r.test->result != TestResult::passing && r.test->result != TestResult::failing) continue;
    if (r.buggy == nullptr || r.patched == nullptr) {
      throw MissingTrace("test '" + r.test->id + "' lacks a trace on " +
                         (r.buggy == nullptr ? "the buggy" : "the patched") + " version");
    }
    v.entries.push_back({r.test->id, r.test->result, r.test->origin,
                         distance(*r.buggy, *r.patched, prep)});
  }
  return v;
}

enum class PatchLabel { correct, incorrect };

enum class VerdictRule {
  ok,
  threshold_exceeded,
  failing_not_larger,
  no_passing_default,
  error_passthrough,
};

inline std::string_view to_string(PatchLabel l) {
  return l == PatchLabel::correct ? "correct" : "incorrect";
}

inline std::string_view to_string(VerdictRule r) {
  switch (r) {
    case VerdictRule::ok: return "ok";
    case VerdictRule::threshold_exceeded: return "threshold-exceeded";
    case VerdictRule::failing_not_larger: return "failing-not-larger";
    case VerdictRule::no_passing_default: return "no-passing-default";
    case VerdictRule::error_passthrough: return "error-passthrough";
  }
  return "ok";
}

struct Verdict {
  PatchLabel label = PatchLabel::correct;
  VerdictRule rule = VerdictRule::ok;
  double a_p = 0.0;  // max passing distance; 0 when there are no passing entries
  double a_f = 0.0;  // mean failing distance
  std::string detail;  // error text for error_passthrough

  bool operator==(const Verdict&) const = default;
};

/// Incorrect when the largest passing-test change reaches k_p, or when the
/// mean failing-test change is no larger than it; correct otherwise. Without
/// any passing test the patch is accepted.
inline Verdict classify_patch(const PatchDistanceVector& v, const PatchSimConfig& cfg = {}) {
  const auto failing = v.distances(TestResult::failing);
  const auto passing = v.distances(TestResult::passing);
  if (failing.empty()) throw NoFailingTests("classify_patch: no failing test in the vector");

  Verdict out;
  double sum = 0.0;
  for (double d : failing) sum += d;
  out.a_f = sum / static_cast<double>(failing.size());

  if (passing.empty()) {
    out.label = PatchLabel::correct;
    out.rule = VerdictRule::no_passing_default;
    return out;
  }
  out.a_p = *std::max_element(passing.begin(), passing.end());
  if (out.a_p >= cfg.k_p) {
    out.label = PatchLabel::incorrect;
    out.rule = VerdictRule::threshold_exceeded;
  } else if (out.a_p >= out.a_f) {
    out.label = PatchLabel::incorrect;
    out.rule = VerdictRule::failing_not_larger;
  } else {
    out.label = PatchLabel::correct;
    out.rule = VerdictRule::ok;
  }
  return out;
}

}  // namespace patchsim
