// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "patchsim/patchsim.hpp"
#include "support/oracles.hpp"

using namespace patchsim;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = PATCHSIM_CORPUS_DIR;

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::uint32_t> raw(const std::vector<StatementId>& s) {
  std::vector<std::uint32_t> out;
  for (auto id : s) out.push_back(id.value);
  return out;
}

void lcs_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(10000);
  int mismatches = 0;
  const int pairs = 10000;
  for (int i = 0; i < pairs; ++i) {
    const std::uint32_t alphabet = 1 + static_cast<std::uint32_t>(rng() % 50);
    const auto a = oracle::random_ids(rng, 200, alphabet);
    const auto b = oracle::random_ids(rng, 200, alphabet);
    mismatches += lcs_length<StatementId>(a, b) != oracle::reference_lcs(raw(a), raw(b));
  }
  const double s = seconds_since(t0);
  report(mismatches == 0 && s < 60.0, "lcs-oracle-equivalence",
         fmt("%d pairs, %d mismatches, %.2f s", pairs, mismatches, s));
}

void metric_axioms() {
  std::mt19937_64 rng(10001);
  int violations = 0;
  const int pairs = 10000;
  for (int i = 0; i < pairs; ++i) {
    const std::uint32_t alphabet = 1 + static_cast<std::uint32_t>(rng() % 50);
    Spectrum a, b, sub;
    a.events = oracle::random_ids(rng, 200, alphabet);
    b.events = oracle::random_ids(rng, 200, alphabet);
    for (auto s : b.events)
      if (rng() % 2) sub.events.push_back(s);
    const double ab = distance(a, b).value;
    violations += ab != distance(b, a).value;
    violations += !(ab >= 0.0 && ab <= 1.0);
    violations += distance(a, a).value != 0.0;
    const double expect = b.empty() ? 0.0 : 1.0 - static_cast<double>(sub.size()) / static_cast<double>(b.size());
    violations += std::abs(distance(sub, b).value - expect) > 1e-12;
  }
  report(violations == 0, "metric-axioms", fmt("%d pairs, %d violations", pairs, violations));
}

TestDistanceVector tvec(std::optional<double> passing, double failing) {
  TestDistanceVector v;
  if (passing) v.entries.push_back({"p", TestResult::passing, Distance{*passing}});
  v.entries.push_back({"f", TestResult::failing, Distance{failing}});
  return v;
}

PatchDistanceVector pvec(std::vector<double> passing, std::vector<double> failing) {
  PatchDistanceVector v;
  for (double d : passing) v.entries.push_back({"p", TestResult::passing, TestOrigin::original, Distance{d}});
  for (double d : failing) v.entries.push_back({"f", TestResult::failing, TestOrigin::original, Distance{d}});
  return v;
}

void formula_examples() {
  int wrong = 0, total = 0;
  auto check = [&](bool ok) { ++total, wrong += !ok; };
  const TestSimConfig kt{0.4};
  check(classify_test(tvec(0.1, 0.5), kt).label == TestResult::passing);
  check(classify_test(tvec(0.3, 0.3), kt).label == TestResult::discarded);
  check(classify_test(tvec(std::nullopt, 0.5), kt).label == TestResult::passing);
  check(classify_test(tvec(std::nullopt, 0.2), kt).label == TestResult::failing);

  const PatchSimConfig kp{0.25};
  auto v = classify_patch(pvec({0.0, 0.01}, {0.30}), kp);
  check(v.label == PatchLabel::correct && v.rule == VerdictRule::ok);
  v = classify_patch(pvec({0.30}, {0.50}), kp);
  check(v.label == PatchLabel::incorrect && v.rule == VerdictRule::threshold_exceeded);
  v = classify_patch(pvec({0.20}, {0.10, 0.10}), kp);
  check(v.label == PatchLabel::incorrect && v.rule == VerdictRule::failing_not_larger);
  v = classify_patch(pvec({}, {0.9}), kp);
  check(v.label == PatchLabel::correct && v.rule == VerdictRule::no_passing_default);
  report(wrong == 0, "formula-conformance", fmt("%d/%d examples reproduced", total - wrong, total));
}

void ast_worked_example() {
  const auto a = minilang::parse("fn f(a, b, c, d) { if (a > b + 1) { return 1; } return 0; }");
  const auto b = minilang::parse("fn f(a, b, c, d) { if (c < d + 1) { return 1; } return 0; }");
  const auto d = syntactic_distance(a, b);
  report(d == 6, "ast-worked-example", fmt("distance %zu (expected 6)", static_cast<std::size_t>(d)));
}

const CorpusEntry* find(const std::vector<CorpusEntry>& c, const std::string& problem, const std::string& id) {
  for (const auto& e : c)
    if (e.patch.problem == problem && e.patch.id == id) return &e;
  return nullptr;
}

void motivating_scenarios() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CorpusEntry> entries;
  for (const char* p : {"chart-draw", "lang-replace"}) {
    auto c = load_corpus(kCorpus / p);
    std::move(c.begin(), c.end(), std::back_inserter(entries));
  }
  struct Case {
    const char* problem;
    const char* patch;
    PatchLabel expect;
  };
  const Case cases[] = {{"chart-draw", "skip-draw", PatchLabel::incorrect},
                        {"chart-draw", "guard-null", PatchLabel::correct},
                        {"lang-replace", "guard-repeat", PatchLabel::incorrect},
                        {"lang-replace", "skip-null", PatchLabel::correct}};
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    const auto* e = find(entries, c.problem, c.patch);
    if (!e) {
      ok = false;
      detail += fmt("%s/%s missing; ", c.problem, c.patch);
      continue;
    }
    const auto r = run_pipeline(e->patch);
    ok = ok && r.verdict.label == c.expect && r.verdict.rule != VerdictRule::error_passthrough;
    detail += fmt("%s=%s(A_p %.3f) ", c.patch, to_string(r.verdict.label).data(), r.verdict.a_p);
  }
  const double s = seconds_since(t0);
  report(ok && s < 30.0, "motivating-scenarios", detail + fmt("%.2f s", s));
}

void golden_corpus(const std::vector<CorpusEntry>& corpus, const std::vector<PatchEvidence>& evidence, double collect_s) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig defaults;
  const auto rep = evaluate(corpus, evidence, defaults.test, defaults.patch);
  PipelineConfig off;
  off.generate = false;
  const auto ablated = evaluate(corpus, off);
  const double s = collect_s + seconds_since(t0);
  const auto& t = rep.total;
  const bool ok = corpus.size() >= 30 && t.correct_excluded == 0 && 2 * t.incorrect_excluded >= t.incorrect_total &&
                  ablated.total.incorrect_excluded <= t.incorrect_excluded && s < 300.0;
  report(ok, "golden-corpus",
         fmt("%zu patches, IE %zu/%zu (%.1f%%), CE %zu/%zu, no-generation IE %zu, %.2f s", corpus.size(),
             t.incorrect_excluded, t.incorrect_total, 100.0 * t.incorrect_excluded_ratio(), t.correct_excluded,
             t.correct_total, ablated.total.incorrect_excluded, s));
}

void kp_sweep(const std::vector<CorpusEntry>& corpus, const std::vector<PatchEvidence>& evidence) {
  const std::vector<double> kt = {PipelineConfig{}.test.k_t};
  const auto rows = sweep(corpus, evidence, default_kp_grid(), kt);
  bool monotone = true, ce_zero = true;
  std::string ie, ce;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i && rows[i].incorrect_excluded > rows[i - 1].incorrect_excluded) monotone = false;
    if (rows[i].k_p >= 0.15 && rows[i].correct_excluded != 0) ce_zero = false;
    ie += fmt(" %zu", rows[i].incorrect_excluded);
    ce += fmt(" %zu", rows[i].correct_excluded);
  }
  report(monotone && ce_zero, "kp-sweep-trend", "IE" + ie + " | CE" + ce);
}

void directional(const std::vector<CorpusEntry>& corpus, const std::vector<PatchEvidence>& evidence) {
  const PipelineConfig defaults;
  const auto s = patch_sim_stats(evaluate(corpus, evidence, defaults.test, defaults.patch));
  const bool ok = s.correct_passing < s.incorrect_passing && s.correct_ratio() > s.incorrect_ratio();
  report(ok, "patch-sim-direction",
         fmt("passing: correct %.4f < incorrect %.4f; failing/passing: correct %.3f > incorrect %.3f",
             s.correct_passing, s.incorrect_passing, s.correct_ratio(), s.incorrect_ratio()));
}

}  // namespace

int main() {
  try {
    lcs_oracle();
    metric_axioms();
    formula_examples();
    ast_worked_example();
    motivating_scenarios();

    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus = load_corpus(kCorpus);
    const auto evidence = collect_corpus(corpus, PipelineConfig{});
    const double collect_s = seconds_since(t0);
    golden_corpus(corpus, evidence, collect_s);
    kp_sweep(corpus, evidence);
    directional(corpus, evidence);
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s\n", failures == 0 ? "all criteria passed" : fmt("%d criteria failed", failures).c_str());
  return failures == 0 ? 0 : 1;
}
