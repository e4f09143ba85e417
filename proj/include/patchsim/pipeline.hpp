#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "patchsim/corpus.hpp"
#include "patchsim/distance.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/generator.hpp"
#include "patchsim/minilang/interpreter.hpp"
#include "patchsim/minilang/parser.hpp"
#include "patchsim/patch_classifier.hpp"
#include "patchsim/test_classifier.hpp"
#include "patchsim/trace.hpp"
#include "patchsim/trace_io.hpp"

namespace patchsim {

struct PipelineConfig {
  GenConfig gen;
  bool generate = true;
  TestSimConfig test;
  PatchSimConfig patch;
  minilang::RunConfig run;
  TracePreprocessing prep = TracePreprocessing::pipeline_default();
};

/// Everything measured for one test of one patch.
struct TestEvidence {
  TestCase test;
  Spectrum buggy_full;
  Spectrum patched_full;
  Spectrum buggy_context;
  Spectrum patched_context;
  Distance patch_distance;
  std::optional<TestDistanceVector> similarity;  // generated tests only
};

/// Threshold-independent measurements for one patch. decide() turns them into
/// a verdict for any (k_t, k_p) without re-running anything.
struct PatchEvidence {
  std::string patch_id;
  std::set<std::string> modified_methods;
  std::vector<TestEvidence> originals;
  std::vector<TestEvidence> generated;
  std::optional<std::string> error;
};

struct GeneratedLabel {
  std::string test_id;
  TestVerdict verdict;
};

struct PipelineResult {
  std::string patch_id;
  Verdict verdict;
  PatchDistanceVector distances;
  std::vector<GeneratedLabel> generated;
};

/// Raw events of one test on both versions.
struct RawRuns {
  std::vector<TraceEvent> buggy;
  std::vector<TraceEvent> patched;
};

using RunSource = std::function<RawRuns(const TestCase&)>;

namespace detail {

inline TestEvidence measure_test(const TestCase& test, const RawRuns& raw,
                                 const std::set<std::string>& modified, const TracePreprocessing& prep) {
  TestEvidence ev;
  ev.test = test;
  ev.buggy_full = extract_full_spectrum(raw.buggy);
  ev.buggy_full.version = ProgramVersion::buggy;
  ev.buggy_full.test_id = test.id;
  ev.patched_full = extract_full_spectrum(raw.patched);
  ev.patched_full.version = ProgramVersion::patched;
  ev.patched_full.test_id = test.id;
  ev.buggy_context = extract_context_spectrum(raw.buggy, modified);
  ev.buggy_context.test_id = test.id;
  ev.patched_context = extract_context_spectrum(raw.patched, modified);
  ev.patched_context.version = ProgramVersion::patched;
  ev.patched_context.test_id = test.id;
  ev.patch_distance = distance(ev.buggy_full, ev.patched_full, prep);
  return ev;
}

}  // namespace detail

/// Measures originals and generated tests from an arbitrary run source
/// (live interpreter runs or trace files).
inline PatchEvidence collect_evidence(const PatchCase& patch, const std::vector<TestCase>& generated,
                                      const RunSource& runs, const TracePreprocessing& prep) {
  PatchEvidence ev;
  ev.patch_id = patch.id;
  ev.modified_methods = patch.spec.modified_methods;
  if (ev.modified_methods.empty()) throw Error("patch '" + patch.id + "' modifies no method");
  if (std::none_of(patch.originals.begin(), patch.originals.end(),
                   [](const OriginalTest& t) { return t.test.result == TestResult::failing; }))
    throw NoFailingTests("patch '" + patch.id + "' has no failing original test");

  for (const auto& o : patch.originals)
    ev.originals.push_back(detail::measure_test(o.test, runs(o.test), ev.modified_methods, prep));

  std::vector<OriginalExecution> refs;
  for (const auto& o : ev.originals) refs.push_back({&o.test, &o.buggy_context});
  for (const auto& g : generated) {
    auto te = detail::measure_test(g, runs(g), ev.modified_methods, prep);
    te.similarity = measure_test_distances(te.buggy_context, refs, prep);
    ev.generated.push_back(std::move(te));
  }
  return ev;
}

/// Interpreter-backed run source for a patch.
class LiveRunner {
 public:
  LiveRunner(const PatchCase& patch, const minilang::RunConfig& run)
      : buggy_(minilang::parse(patch.spec.buggy_source)),
        patched_(minilang::parse(patch.spec.patched_source)),
        ids_(patch.spec.alignment.patched_ids()),
        run_(run) {
    for (const auto& o : patch.originals) invocations_.emplace_back(o.test.input, o.invocation);
  }

  RawRuns operator()(const TestCase& t) const {
    const minilang::TestInvocation inv = invocation(t);
    RawRuns out;
    out.buggy = minilang::run_traced(buggy_, inv, run_).events;
    out.patched = minilang::run_traced(patched_, inv, run_, ids_).events;
    return out;
  }

  const minilang::Program& buggy() const { return buggy_; }
  const minilang::Program& patched() const { return patched_; }
  std::span<const StatementId> patched_ids() const { return ids_; }

  minilang::TestInvocation invocation(const TestCase& t) const {
    for (const auto& [input, inv] : invocations_)
      if (input == t.input) return inv;
    return minilang::TestInvocation::parse(t.input);
  }

 private:
  minilang::Program buggy_;
  minilang::Program patched_;
  std::vector<StatementId> ids_;
  minilang::RunConfig run_;
  std::vector<std::pair<std::string, minilang::TestInvocation>> invocations_;
};

/// Generated tests for a patch: the pre-generated list when present,
/// otherwise fresh generation on the buggy version.
inline std::vector<TestCase> tests_to_generate(const PatchCase& patch, const LiveRunner& runner,
                                               const PipelineConfig& cfg) {
  if (!cfg.generate) return {};
  if (patch.generated) {
    std::vector<TestCase> out = *patch.generated;
    for (auto& t : out) {
      t.origin = TestOrigin::generated;
      t.result = TestResult::unknown;
    }
    return out;
  }
  std::vector<minilang::TestInvocation> invs;
  for (const auto& o : patch.originals) invs.push_back(o.invocation);
  auto gen = cfg.gen;
  gen.run = cfg.run;
  return generate_tests(runner.buggy(), patch.spec.modified_methods, invs, gen);
}

/// Runs generation and every test on both versions. Errors are recorded in
/// the evidence rather than thrown.
inline PatchEvidence collect_live_evidence(const PatchCase& patch, const PipelineConfig& cfg) {
  try {
    LiveRunner runner(patch, cfg.run);
    const auto generated = tests_to_generate(patch, runner, cfg);
    return collect_evidence(patch, generated, std::cref(runner), cfg.prep);
  } catch (const std::exception& e) {
    PatchEvidence ev;
    ev.patch_id = patch.id;
    ev.modified_methods = patch.spec.modified_methods;
    ev.error = e.what();
    return ev;
  }
}

/// Reads `<dir>/buggy/<test>.trace` and `<dir>/patched/<test>.trace`.
inline RunSource trace_dir_source(const std::filesystem::path& dir) {
  return [dir](const TestCase& t) {
    RawRuns r;
    r.buggy = read_trace_file(dir / "buggy" / (t.id + ".trace")).events;
    r.patched = read_trace_file(dir / "patched" / (t.id + ".trace")).events;
    return r;
  };
}

/// Applies TEST-SIM and PATCH-SIM to collected evidence. Any error yields a
/// correct verdict with rule error-passthrough.
inline PipelineResult decide(const PatchEvidence& ev, const TestSimConfig& tcfg, const PatchSimConfig& pcfg) {
  PipelineResult out;
  out.patch_id = ev.patch_id;
  auto fail_open = [&](std::string why) {
    out.verdict = Verdict{PatchLabel::correct, VerdictRule::error_passthrough, 0.0, 0.0, std::move(why)};
    return out;
  };
  if (ev.error) return fail_open(*ev.error);

  try {
    for (const auto& o : ev.originals)
      out.distances.entries.push_back({o.test.id, o.test.result, o.test.origin, o.patch_distance});
    for (const auto& g : ev.generated) {
      const TestVerdict tv = classify_test(*g.similarity, tcfg);
      out.generated.push_back({g.test.id, tv});
      if (tv.label == TestResult::discarded) continue;
      out.distances.entries.push_back({g.test.id, tv.label, TestOrigin::generated, g.patch_distance});
    }
    out.verdict = classify_patch(out.distances, pcfg);
  } catch (const std::exception& e) {
    return fail_open(e.what());
  }
  return out;
}

/// generate -> trace buggy -> test distances -> classify tests -> trace both
/// versions -> patch distances -> classify patch.
inline PipelineResult run_pipeline(const PatchCase& patch, const PipelineConfig& cfg = {}) {
  return decide(collect_live_evidence(patch, cfg), cfg.test, cfg.patch);
}

}  // namespace patchsim
