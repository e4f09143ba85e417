#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "patchsim/evaluation.hpp"
#include "patchsim/trace_io.hpp"

using namespace patchsim;
namespace fs = std::filesystem;

namespace {

// Percentages relative to the first element; a zero first element crashes.
const char* kBuggy = R"(fn ratios(xs) {
  if (len(xs) == 0) {
    return [];
  }
  var base = xs[0];
  var out = [];
  var i = 0;
  while (i < len(xs)) {
    push(out, scaled(xs[i], base));
    i = i + 1;
  }
  return out;
}

fn scaled(x, base) {
  var v = x * 100;
  return v / base;
}
)";

std::string edit(std::string src, const std::string& from, const std::string& to) {
  const auto at = src.find(from);
  if (at == std::string::npos) throw std::logic_error("edit anchor missing: " + from);
  return src.replace(at, from.size(), to);
}

const std::string kLoop = "  while (i < len(xs)) {\n    push(out, scaled(xs[i], base));\n    i = i + 1;\n  }\n";
const std::string kSkipZero = edit(kBuggy, "  var out = [];\n", "  if (base == 0) {\n    base = 1;\n  }\n  var out = [];\n");
const std::string kDropLoop = edit(kBuggy, kLoop, "");
const std::string kGuardShort = edit(kBuggy, "  var base = xs[0];\n", "  if (len(xs) < 4) {\n    return [];\n  }\n  var base = xs[0];\n");
const std::string kShortGuard =
    edit(kBuggy, "  var base = xs[0];\n", "  if (len(xs) < 3) {\n    return [];\n  }\n  var base = xs[0];\n");

// Nothrow oracles; results come from running the buggy version.
PatchCase make_case(const std::string& id, const std::string& patched) {
  PatchCase p;
  p.id = id;
  p.problem = "ratios";
  p.spec = minilang::make_patch_spec(kBuggy, patched);
  const auto prog = minilang::parse(kBuggy);
  for (const auto& [tid, call] : std::vector<std::pair<std::string, std::string>>{
           {"t1", "ratios([1, 2, 5])"}, {"t2", "ratios([])"}, {"t3", "ratios([0])"}, {"t4", "ratios([0, 4])"}}) {
    OriginalTest o;
    o.test.id = tid;
    o.test.input = call;
    o.invocation = minilang::TestInvocation::parse(call);
    o.invocation.expected = minilang::Oracle{};
    o.test.result = minilang::run_traced(prog, o.invocation).outcome == minilang::Outcome::passed
                        ? TestResult::passing
                        : TestResult::failing;
    p.originals.push_back(std::move(o));
  }
  return p;
}

CorpusEntry entry(const std::string& id, const std::string& patched, PatchLabel truth) {
  return {make_case(id, patched), "planted", "planted", truth};
}

std::vector<CorpusEntry> planted() {
  return {entry("skip-zero", kSkipZero, PatchLabel::correct),
          entry("drop-loop", kDropLoop, PatchLabel::incorrect),
          entry("guard-short", kGuardShort, PatchLabel::incorrect),
          entry("short-guard", kShortGuard, PatchLabel::incorrect)};
}

}  // namespace

TEST(Pipeline, OriginalResultsComeFromTheBuggyRun) {
  const auto p = make_case("x", kSkipZero);
  EXPECT_EQ(p.originals[0].test.result, TestResult::passing);
  EXPECT_EQ(p.originals[1].test.result, TestResult::passing);
  EXPECT_EQ(p.originals[2].test.result, TestResult::failing);
  EXPECT_EQ(p.originals[3].test.result, TestResult::failing);
  EXPECT_EQ(p.spec.modified_methods, (std::set<std::string>{"ratios"}));
}

TEST(Pipeline, CorrectGuardAccepted) {
  const auto r = run_pipeline(make_case("skip-zero", kSkipZero));
  EXPECT_EQ(r.verdict.label, PatchLabel::correct);
  EXPECT_EQ(r.verdict.rule, VerdictRule::ok);
  EXPECT_LT(r.verdict.a_p, 0.25);
}

TEST(Pipeline, DeletionCaughtByOriginalTests) {
  PipelineConfig cfg;
  cfg.generate = false;
  const auto r = run_pipeline(make_case("drop-loop", kDropLoop), cfg);
  EXPECT_EQ(r.verdict.label, PatchLabel::incorrect);
  EXPECT_EQ(r.verdict.rule, VerdictRule::threshold_exceeded);
  // t1 loses the whole loop: 5 of 21 statements survive in the patched context.
  const auto& t1 = r.distances.entries.front();
  ASSERT_EQ(t1.test_id, "t1");
  EXPECT_NEAR(t1.distance.value, 1.0 - 5.0 / 21.0, 1e-12);
}

TEST(Pipeline, GeneratedTestsExposeOverfittedGuard) {
  // Passing originals have lengths 3 and 0. The guard returns early for
  // lengths 1 and 2, which only failing originals and generated inputs have.
  PipelineConfig off;
  off.generate = false;
  EXPECT_EQ(run_pipeline(make_case("short-guard", kShortGuard), off).verdict.label, PatchLabel::correct);

  const auto r = run_pipeline(make_case("short-guard", kShortGuard));
  EXPECT_EQ(r.verdict.label, PatchLabel::incorrect);
  EXPECT_FALSE(r.generated.empty());
}

TEST(Pipeline, GeneratedLabelsCoverEveryGeneratedTest) {
  const auto ev = collect_live_evidence(make_case("skip-zero", kSkipZero), {});
  ASSERT_FALSE(ev.error) << *ev.error;
  const auto r = decide(ev, {}, {});
  ASSERT_EQ(r.generated.size(), ev.generated.size());
  std::size_t kept = 0;
  for (const auto& g : r.generated) kept += g.verdict.label != TestResult::discarded;
  EXPECT_EQ(r.distances.entries.size(), ev.originals.size() + kept);
}

TEST(Pipeline, Deterministic) {
  const auto a = run_pipeline(make_case("short-guard", kShortGuard));
  const auto b = run_pipeline(make_case("short-guard", kShortGuard));
  EXPECT_EQ(a.verdict, b.verdict);
  ASSERT_EQ(a.generated.size(), b.generated.size());
  for (std::size_t i = 0; i < a.generated.size(); ++i) EXPECT_EQ(a.generated[i].test_id, b.generated[i].test_id);
}

TEST(Decide, FailOpenOnRecordedError) {
  PatchEvidence ev;
  ev.patch_id = "p";
  ev.error = "boom";
  const auto r = decide(ev, {}, {});
  EXPECT_EQ(r.verdict.label, PatchLabel::correct);
  EXPECT_EQ(r.verdict.rule, VerdictRule::error_passthrough);
  EXPECT_EQ(r.verdict.detail, "boom");
}

TEST(Decide, FailOpenWithoutFailingTests) {
  PatchEvidence ev;
  ev.patch_id = "p";
  TestEvidence t;
  t.test = {"t1", TestOrigin::original, TestResult::passing, "f()"};
  t.patch_distance = Distance{0.9};
  ev.originals.push_back(t);
  const auto r = decide(ev, {}, {});
  EXPECT_EQ(r.verdict.label, PatchLabel::correct);
  EXPECT_EQ(r.verdict.rule, VerdictRule::error_passthrough);
}

TEST(Decide, ErrorsInLivePipelineAreRecorded) {
  auto broken = make_case("broken", kSkipZero);
  broken.spec.patched_source = "fn ratios(xs) {";
  const auto ev = collect_live_evidence(broken, {});
  ASSERT_TRUE(ev.error.has_value());
  EXPECT_EQ(decide(ev, {}, {}).verdict.rule, VerdictRule::error_passthrough);

  auto no_failing = make_case("nf", kSkipZero);
  no_failing.originals.resize(2);
  EXPECT_EQ(run_pipeline(no_failing).verdict.rule, VerdictRule::error_passthrough);
}

TEST(TraceDirSource, MatchesLiveEvidence) {
  const auto patch = make_case("short-guard", kShortGuard);
  const PipelineConfig cfg;
  LiveRunner runner(patch, cfg.run);
  const auto generated = tests_to_generate(patch, runner, cfg);
  ASSERT_FALSE(generated.empty());

  const auto dir = fs::temp_directory_path() / "patchsim_pipeline_traces";
  fs::remove_all(dir);
  std::vector<TestCase> all;
  for (const auto& o : patch.originals) all.push_back(o.test);
  all.insert(all.end(), generated.begin(), generated.end());
  for (const auto& t : all) {
    const auto raw = runner(t);
    write_trace_file({t.id, "buggy", raw.buggy}, dir / "buggy" / (t.id + ".trace"));
    write_trace_file({t.id, "patched", raw.patched}, dir / "patched" / (t.id + ".trace"));
  }

  const auto live = decide(collect_evidence(patch, generated, std::cref(runner), cfg.prep), cfg.test, cfg.patch);
  const auto files = decide(collect_evidence(patch, generated, trace_dir_source(dir), cfg.prep), cfg.test, cfg.patch);
  EXPECT_EQ(live.verdict, files.verdict);
  ASSERT_EQ(live.distances.entries.size(), files.distances.entries.size());
  for (std::size_t i = 0; i < live.distances.entries.size(); ++i)
    EXPECT_EQ(live.distances.entries[i].distance.value, files.distances.entries[i].distance.value);

  fs::remove(dir / "patched" / "t2.trace");
  EXPECT_THROW(collect_evidence(patch, generated, trace_dir_source(dir), cfg.prep), MissingTrace);
  fs::remove_all(dir);
}

TEST(Evaluation, PlantedCorpusCounts) {
  const auto corpus = planted();
  const auto rep = evaluate(corpus);
  EXPECT_EQ(rep.total.incorrect_total, 3u);
  EXPECT_EQ(rep.total.correct_total, 1u);
  EXPECT_EQ(rep.total.incorrect_excluded, 3u);
  EXPECT_EQ(rep.total.correct_excluded, 0u);
  EXPECT_EQ(rep.by_archetype.at("planted").incorrect_excluded, 3u);
  ASSERT_EQ(rep.patches.size(), 4u);
  EXPECT_EQ(rep.patches[0].patch_id, "skip-zero");

  PipelineConfig off;
  off.generate = false;
  const auto ablated = evaluate(corpus, off);
  EXPECT_EQ(ablated.total.incorrect_excluded, 2u);
  EXPECT_EQ(ablated.total.correct_excluded, 0u);
}

TEST(Evaluation, ThreadCountDoesNotChangeResults) {
  const auto corpus = planted();
  const auto one = evaluate(corpus, {}, 1);
  const auto many = evaluate(corpus, {}, 4);
  for (std::size_t i = 0; i < corpus.size(); ++i) EXPECT_EQ(one.patches[i].result.verdict, many.patches[i].result.verdict);
}

TEST(Evaluation, StatsMatchHandComputedMeans) {
  const auto rep = evaluate(planted());
  // Mean over patches of each patch's mean passing distance.
  double sum = 0;
  int n = 0;
  for (const auto& p : rep.patches) {
    if (*p.truth != PatchLabel::incorrect) continue;
    double s = 0;
    int k = 0;
    for (const auto& e : p.result.distances.entries)
      if (e.result == TestResult::passing) s += e.distance.value, ++k;
    if (k) sum += s / k, ++n;
  }
  const auto stats = patch_sim_stats(rep);
  EXPECT_NEAR(stats.incorrect_passing, sum / n, 1e-12);
  EXPECT_LT(stats.correct_passing, stats.incorrect_passing);
  EXPECT_DOUBLE_EQ(PatchSimStats::ratio(0.0, 0.0), 1.0);
  EXPECT_TRUE(std::isinf(PatchSimStats::ratio(0.5, 0.0)));
}

TEST(Sweep, RowsAreKpMajor) {
  const auto corpus = planted();
  const auto evidence = collect_corpus(corpus, {});
  const std::vector<double> kp = {0.1, 0.5, 1.0}, kt = {0.2, 0.8};
  const auto rows = sweep(corpus, evidence, kp, kt);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].k_p, 0.1);
  EXPECT_EQ(rows[1].k_p, 0.1);
  EXPECT_EQ(rows[1].k_t, 0.8);
  EXPECT_EQ(rows[5].k_p, 1.0);
  // Row values equal a direct evaluation at the same thresholds.
  for (const auto& r : rows) {
    const auto rep = evaluate(corpus, evidence, TestSimConfig{r.k_t}, PatchSimConfig{r.k_p});
    EXPECT_EQ(r.incorrect_excluded, rep.total.incorrect_excluded);
    EXPECT_EQ(r.correct_excluded, rep.total.correct_excluded);
  }
}

TEST(Sweep, KtHasNoEffectWithoutGeneration) {
  const auto corpus = planted();
  PipelineConfig off;
  off.generate = false;
  const auto evidence = collect_corpus(corpus, off);
  const std::vector<double> kp = {0.25};
  const auto rows = sweep(corpus, evidence, kp, default_kt_grid());
  for (const auto& r : rows) {
    EXPECT_EQ(r.incorrect_excluded, rows[0].incorrect_excluded);
    EXPECT_EQ(r.correct_excluded, rows[0].correct_excluded);
  }
}

TEST(Sweep, FormatHasOneColumnPerValue) {
  const std::vector<SweepRow> rows = {{0.05, 0.4, 3, 1}, {1.0, 0.4, 0, 0}};
  EXPECT_EQ(format_sweep(rows, true), "K_p    0.05      1\nIE        3      0\nCE        1      0\n");
}
