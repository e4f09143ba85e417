// patchsim command-line driver.
//
// Exit codes: 0 success (classify-patch: correct), 1 classify-patch:
// incorrect, 2 any error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "patchsim/patchsim.hpp"

namespace fs = std::filesystem;
using namespace patchsim;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<double> k_p;
  std::optional<double> k_t;
  std::optional<std::uint64_t> seed;
  bool no_gen = false;
  std::optional<std::size_t> threads;
};

ToolConfig resolve(const GlobalOptions& g) {
  ToolConfig c = g.config.empty() ? ToolConfig{} : load_config(g.config);
  if (g.k_p) c.pipeline.patch.k_p = *g.k_p;
  if (g.k_t) c.pipeline.test.k_t = *g.k_t;
  if (g.seed) c.pipeline.gen.seed = *g.seed;
  if (g.no_gen) c.pipeline.generate = false;
  if (g.threads) c.threads = *g.threads;
  return c;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<CorpusEntry> select_patches(const std::string& manifest, const std::string& patch_id) {
  auto entries = corpus_entries(load_manifest(manifest));
  if (patch_id.empty()) return entries;
  for (auto& e : entries)
    if (e.patch.id == patch_id) return {std::move(e)};
  throw ManifestError("no patch '" + patch_id + "' in " + manifest);
}

// Live evidence, or evidence read from `<traces>/<patch-id>/` when a trace
// directory is given. Errors propagate.
PatchEvidence evidence_for(const PatchCase& patch, const PipelineConfig& cfg, const std::string& traces) {
  LiveRunner runner(patch, cfg.run);
  const auto generated = tests_to_generate(patch, runner, cfg);
  if (traces.empty()) return collect_evidence(patch, generated, std::cref(runner), cfg.prep);
  return collect_evidence(patch, generated, trace_dir_source(fs::path(traces) / patch.id), cfg.prep);
}

PatchEvidence evidence_or_error(const PatchCase& patch, const PipelineConfig& cfg, const std::string& traces) {
  try {
    return evidence_for(patch, cfg, traces);
  } catch (const std::exception& e) {
    PatchEvidence ev;
    ev.patch_id = patch.id;
    ev.error = e.what();
    return ev;
  }
}

void print_line(const json& j) { std::cout << j.dump() << '\n'; }

// --- verbs ---------------------------------------------------------------

int cmd_run_single(const std::string& program, const std::string& call, const std::string& out,
                   const std::string& test_id, const ToolConfig& cfg) {
  const auto prog = minilang::parse(read_text(program));
  const auto inv = minilang::TestInvocation::parse(call);
  const auto r = minilang::run_traced(prog, inv, cfg.pipeline.run);
  TraceFile t{test_id, "buggy", r.events};
  if (out.empty() || out == "-") write_trace(std::cout, t);
  else write_trace_file(t, out);
  std::string result = std::string(minilang::to_string(r.outcome));
  if (r.fuel_exhausted) result += " (fuel exhausted)";
  else if (r.uncaught) result += " (uncaught " + r.uncaught->tag + ")";
  else if (r.returned) result += " -> " + minilang::to_literal(*r.returned);
  std::cerr << result << '\n';
  return 0;
}

int cmd_run_manifest(const std::string& manifest, const std::string& patch_id, const std::string& out,
                     const ToolConfig& cfg) {
  if (out.empty()) throw Error("--out is required with --manifest");
  for (const auto& e : select_patches(manifest, patch_id)) {
    LiveRunner runner(e.patch, cfg.pipeline.run);
    std::vector<TestCase> tests;
    for (const auto& o : e.patch.originals) tests.push_back(o.test);
    for (auto& g : tests_to_generate(e.patch, runner, cfg.pipeline)) tests.push_back(std::move(g));
    const fs::path dir = fs::path(out) / e.patch.id;
    for (const auto& t : tests) {
      const auto raw = runner(t);
      write_trace_file({t.id, "buggy", raw.buggy}, dir / "buggy" / (t.id + ".trace"));
      write_trace_file({t.id, "patched", raw.patched}, dir / "patched" / (t.id + ".trace"));
    }
    std::cerr << e.patch.id << ": " << tests.size() << " test(s) traced into " << dir.string() << '\n';
  }
  return 0;
}

int cmd_gen_tests(const std::string& manifest, const std::string& patch_id, const std::string& out,
                  const ToolConfig& cfg) {
  auto m = load_manifest(manifest);
  for (const auto& e : corpus_entries(m)) {
    if (!patch_id.empty() && e.patch.id != patch_id) continue;
    LiveRunner runner(e.patch, cfg.pipeline.run);
    PatchCase fresh = e.patch;
    fresh.generated.reset();
    auto pc = cfg.pipeline;
    pc.generate = true;
    m.generated[e.patch.id] = tests_to_generate(fresh, runner, pc);
    std::cerr << e.patch.id << ": " << m.generated[e.patch.id].size() << " generated test(s)\n";
  }
  save_manifest(m, out.empty() ? manifest : out);
  return 0;
}

int cmd_classify_test(const std::string& manifest, const std::string& patch_id, const std::string& traces,
                      const ToolConfig& cfg) {
  for (const auto& e : select_patches(manifest, patch_id)) {
    auto pc = cfg.pipeline;
    pc.generate = true;
    const auto ev = evidence_for(e.patch, pc, traces);
    for (const auto& g : ev.generated) {
      const auto v = classify_test(*g.similarity, cfg.pipeline.test);
      json j = {{"patch-id", e.patch.id},
                {"test-id", g.test.id},
                {"verdict", to_string(v.label)},
                {"a_p", v.a_p ? json(*v.a_p) : json(nullptr)},
                {"a_f", v.a_f}};
      print_line(j);
    }
  }
  return 0;
}

int cmd_classify_patch(const std::string& manifest, const std::string& patch_id, const std::string& traces,
                       const ToolConfig& cfg) {
  const auto entries = select_patches(manifest, patch_id);
  bool any_error = false;
  std::optional<PatchLabel> single;
  for (const auto& e : entries) {
    const auto r = decide(evidence_or_error(e.patch, cfg.pipeline, traces), cfg.pipeline.test, cfg.pipeline.patch);
    print_line(verdict_json(e.patch.id, r.verdict));
    any_error = any_error || r.verdict.rule == VerdictRule::error_passthrough;
    single = r.verdict.label;
  }
  if (entries.size() != 1) return any_error ? 2 : 0;
  if (any_error) return 2;
  return *single == PatchLabel::correct ? 0 : 1;
}

int cmd_evaluate(const std::string& corpus, bool as_json, const ToolConfig& cfg) {
  const auto entries = load_corpus(corpus);
  const auto rep = evaluate(entries, cfg.pipeline, cfg.threads);
  if (as_json) {
    auto j = report_json(rep);
    j["config"] = config_json(cfg);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << format_report(rep);
    const auto s = patch_sim_stats(rep);
    std::cout << "\nMean distance   Passing  Failing  Failing/Passing\n";
    std::printf("Incorrect       %7.4f  %7.4f  %15.3f\n", s.incorrect_passing, s.incorrect_failing, s.incorrect_ratio());
    std::printf("Correct         %7.4f  %7.4f  %15.3f\n", s.correct_passing, s.correct_failing, s.correct_ratio());
  }
  return 0;
}

int cmd_sweep(const std::string& corpus, const std::string& param, bool as_json, const ToolConfig& cfg) {
  const auto entries = load_corpus(corpus);
  const auto evidence = collect_corpus(entries, cfg.pipeline, cfg.threads);
  const std::vector<double> kp_fixed = {cfg.pipeline.patch.k_p}, kt_fixed = {cfg.pipeline.test.k_t};
  std::vector<SweepRow> kp_rows, kt_rows;
  if (param != "kt") kp_rows = sweep(entries, evidence, default_kp_grid(), kt_fixed);
  if (param != "kp") kt_rows = sweep(entries, evidence, kp_fixed, default_kt_grid());
  if (as_json) {
    json j = json::array();
    for (const auto* rows : {&kp_rows, &kt_rows})
      for (const auto& r : *rows)
        j.push_back({{"k_p", r.k_p}, {"k_t", r.k_t}, {"incorrect_excluded", r.incorrect_excluded},
                     {"correct_excluded", r.correct_excluded}});
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  if (!kp_rows.empty()) std::cout << "k_t = " << cfg.pipeline.test.k_t << '\n' << format_sweep(kp_rows, true);
  if (!kp_rows.empty() && !kt_rows.empty()) std::cout << '\n';
  if (!kt_rows.empty()) std::cout << "k_p = " << cfg.pipeline.patch.k_p << '\n' << format_sweep(kt_rows, false);
  return 0;
}

int cmd_baseline(const std::string& kind, const std::string& manifest, const std::string& patch_id,
                 const ToolConfig& cfg) {
  for (const auto& e : select_patches(manifest, patch_id)) {
    json j = {{"patch-id", e.patch.id}, {"kind", kind}};
    if (kind == "syn") {
      j["value"] = syntactic_distance(minilang::parse(e.patch.spec.buggy_source),
                                      minilang::parse(e.patch.spec.patched_source));
    } else {
      auto pc = cfg.pipeline;
      if (kind == "sem") pc.generate = false;
      const auto ev = evidence_for(e.patch, pc, "");
      if (kind == "sem") {
        std::vector<CoveredRun> runs;
        for (const auto& o : ev.originals)
          runs.push_back({{&o.test, &o.buggy_full, &o.patched_full},
                          !o.buggy_context.empty() || !o.patched_context.empty()});
        j["value"] = semantic_distance_led(runs, pc.prep);
      } else {
        std::vector<TestExecutionPair> runs;
        for (const auto* group : {&ev.originals, &ev.generated})
          for (const auto& t : *group) runs.push_back({&t.test, &t.buggy_full, &t.patched_full});
        j["value"] = crash_oracle(runs) == CrashSignal::incorrect ? "incorrect" : "no-signal";
      }
    }
    print_line(j);
  }
  return 0;
}

int cmd_distance(const std::string& a, const std::string& b, const std::vector<std::string>& methods, bool pipeline_prep) {
  const auto ta = read_trace_file(a);
  const auto tb = read_trace_file(b);
  const std::set<std::string> m(methods.begin(), methods.end());
  const Spectrum sa = m.empty() ? extract_full_spectrum(ta.events) : extract_context_spectrum(ta.events, m);
  const Spectrum sb = m.empty() ? extract_full_spectrum(tb.events) : extract_context_spectrum(tb.events, m);
  const auto prep = pipeline_prep ? TracePreprocessing::pipeline_default() : TracePreprocessing::exact();
  std::cout << fmt(distance(sa, sb, prep).value) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch correctness classification by execution similarity"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--kp", g.k_p, "PATCH-SIM threshold on passing-test distance")->check(CLI::Range(0.0, 1.0));
  app.add_option("--kt", g.k_t, "TEST-SIM threshold when no passing original covers the patch")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", g.seed, "test generation seed");
  app.add_flag("--no-gen", g.no_gen, "skip test generation (originals only)");
  app.add_option("--threads", g.threads, "worker threads for corpus runs (0 = all cores)");

  std::string manifest, patch_id, out, traces, corpus = "corpus", program, call, test_id = "t", kind, param = "both";
  std::string trace_a, trace_b;
  std::vector<std::string> methods;
  bool as_json = false, pipeline_prep = false;

  auto* run = app.add_subcommand("run", "run a program or a manifest's tests and write trace files");
  run->add_option("program", program, "mini-language source file");
  run->add_option("call", call, "invocation, e.g. 'f(1, [2])'");
  run->add_option("--manifest", manifest, "trace every test of the manifest's patches");
  run->add_option("--patch", patch_id, "restrict to one patch");
  run->add_option("-o,--out", out, "trace file (single run) or output directory (manifest)");
  run->add_option("--test-id", test_id, "test id written into the trace header");

  auto* gen = app.add_subcommand("gen-tests", "generate tests on the buggy program and store them in the manifest");
  gen->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  gen->add_option("--patch", patch_id, "restrict to one patch");
  gen->add_option("-o,--out", out, "write the updated manifest here instead of in place");

  auto* ct = app.add_subcommand("classify-test", "label generated tests (JSON lines)");
  ct->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  ct->add_option("--patch", patch_id, "restrict to one patch");
  ct->add_option("--traces", traces, "trace directory written by 'run --manifest'");

  auto* cp = app.add_subcommand("classify-patch", "classify patches; single patch exits 0/1/2");
  cp->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  cp->add_option("--patch", patch_id, "patch to classify");
  cp->add_option("--traces", traces, "trace directory written by 'run --manifest'");

  auto* ev = app.add_subcommand("evaluate", "evaluate every patch of a corpus against its labels");
  ev->add_option("corpus", corpus, "corpus directory or manifest")->check(CLI::ExistingPath);
  ev->add_flag("--json", as_json, "JSON report");

  auto* sw = app.add_subcommand("sweep", "incorrect/correct excluded over the k_p and k_t grids");
  sw->add_option("corpus", corpus, "corpus directory or manifest")->check(CLI::ExistingPath);
  sw->add_option("--param", param, "kp, kt or both")->check(CLI::IsMember({"kp", "kt", "both"}));
  sw->add_flag("--json", as_json, "JSON rows");

  auto* bl = app.add_subcommand("baseline", "syntactic, semantic (LED) or crash-oracle baseline");
  bl->add_option("--kind", kind, "syn, sem or crash")->required()->check(CLI::IsMember({"syn", "sem", "crash"}));
  bl->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  bl->add_option("--patch", patch_id, "restrict to one patch");

  auto* di = app.add_subcommand("distance", "LCS distance between two trace files");
  di->add_option("a", trace_a)->required()->check(CLI::ExistingFile);
  di->add_option("b", trace_b)->required()->check(CLI::ExistingFile);
  di->add_option("--context", methods, "compare calling-context spectra of these methods")->delimiter(',');
  di->add_flag("--preprocess", pipeline_prep, "collapse repeats and cap length as the pipeline does");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ToolConfig cfg = resolve(g);
    if (*run) {
      if (!manifest.empty()) return cmd_run_manifest(manifest, patch_id, out, cfg);
      if (program.empty() || call.empty()) throw Error("run needs <program> <call> or --manifest");
      return cmd_run_single(program, call, out, test_id, cfg);
    }
    if (*gen) return cmd_gen_tests(manifest, patch_id, out, cfg);
    if (*ct) return cmd_classify_test(manifest, patch_id, traces, cfg);
    if (*cp) return cmd_classify_patch(manifest, patch_id, traces, cfg);
    if (*ev) return cmd_evaluate(corpus, as_json, cfg);
    if (*sw) return cmd_sweep(corpus, param, as_json, cfg);
    if (*bl) return cmd_baseline(kind, manifest, patch_id, cfg);
    if (*di) return cmd_distance(trace_a, trace_b, methods, pipeline_prep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
