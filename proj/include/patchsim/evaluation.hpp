#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "patchsim/corpus.hpp"
#include "patchsim/pipeline.hpp"

namespace patchsim {

/// Runs fn(i) for i in [0, n) on a small worker pool. Each index is handled
/// exactly once; results must be written to per-index slots.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

struct GroupCounts {
  std::size_t incorrect_total = 0;
  std::size_t correct_total = 0;
  std::size_t incorrect_excluded = 0;
  std::size_t correct_excluded = 0;

  void add(std::optional<PatchLabel> truth, PatchLabel verdict) {
    if (!truth) return;
    const bool excluded = verdict == PatchLabel::incorrect;
    if (*truth == PatchLabel::incorrect) {
      ++incorrect_total;
      incorrect_excluded += excluded;
    } else {
      ++correct_total;
      correct_excluded += excluded;
    }
  }

  double incorrect_excluded_ratio() const {
    return incorrect_total == 0 ? 0.0 : static_cast<double>(incorrect_excluded) / static_cast<double>(incorrect_total);
  }
};

struct PatchOutcome {
  std::string patch_id;
  std::string problem;
  std::string project;
  std::string archetype;
  std::optional<PatchLabel> truth;
  PipelineResult result;
};

struct EvaluationReport {
  GroupCounts total;
  std::map<std::string, GroupCounts> by_archetype;
  std::map<std::string, GroupCounts> by_project;
  std::vector<PatchOutcome> patches;
};

/// Collects evidence for every entry (in parallel). Slot i belongs to entry i.
inline std::vector<PatchEvidence> collect_corpus(std::span<const CorpusEntry> corpus,
                                                 const PipelineConfig& cfg, std::size_t threads = 0) {
  std::vector<PatchEvidence> out(corpus.size());
  parallel_for(corpus.size(), threads,
               [&](std::size_t i) { out[i] = collect_live_evidence(corpus[i].patch, cfg); });
  return out;
}

inline EvaluationReport evaluate(std::span<const CorpusEntry> corpus, std::span<const PatchEvidence> evidence,
                                 const TestSimConfig& tcfg, const PatchSimConfig& pcfg) {
  EvaluationReport rep;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& e = corpus[i];
    PatchOutcome po{e.patch.id, e.patch.problem, e.project, e.archetype, e.ground_truth,
                    decide(evidence[i], tcfg, pcfg)};
    rep.total.add(e.ground_truth, po.result.verdict.label);
    rep.by_archetype[e.archetype].add(e.ground_truth, po.result.verdict.label);
    rep.by_project[e.project].add(e.ground_truth, po.result.verdict.label);
    rep.patches.push_back(std::move(po));
  }
  return rep;
}

inline EvaluationReport evaluate(std::span<const CorpusEntry> corpus, const PipelineConfig& cfg = {},
                                 std::size_t threads = 0) {
  const auto evidence = collect_corpus(corpus, cfg, threads);
  return evaluate(corpus, evidence, cfg.test, cfg.patch);
}

struct SweepRow {
  double k_p = 0.0;
  double k_t = 0.0;
  std::size_t incorrect_excluded = 0;
  std::size_t correct_excluded = 0;
};

/// Grids used for the K_p and K_t parameter tables.
inline const std::vector<double>& default_kp_grid() {
  static const std::vector<double> g = {0.05, 0.1, 0.15, 0.25, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0};
  return g;
}
inline const std::vector<double>& default_kt_grid() {
  static const std::vector<double> g = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  return g;
}

/// One row per (k_p, k_t) pair, k_p-major.
inline std::vector<SweepRow> sweep(std::span<const CorpusEntry> corpus, std::span<const PatchEvidence> evidence,
                                   std::span<const double> kp_grid, std::span<const double> kt_grid) {
  std::vector<SweepRow> rows;
  for (double kp : kp_grid) {
    for (double kt : kt_grid) {
      const auto rep = evaluate(corpus, evidence, TestSimConfig{kt}, PatchSimConfig{kp});
      rows.push_back({kp, kt, rep.total.incorrect_excluded, rep.total.correct_excluded});
    }
  }
  return rows;
}

/// Mean before/after distances on passing and failing tests, averaged over
/// patches of each ground-truth class.
struct PatchSimStats {
  double incorrect_passing = 0.0;
  double incorrect_failing = 0.0;
  double correct_passing = 0.0;
  double correct_failing = 0.0;

  static double ratio(double failing, double passing) {
    return passing == 0.0 ? (failing == 0.0 ? 1.0 : INFINITY) : failing / passing;
  }
  double correct_ratio() const { return ratio(correct_failing, correct_passing); }
  double incorrect_ratio() const { return ratio(incorrect_failing, incorrect_passing); }
};

inline PatchSimStats patch_sim_stats(const EvaluationReport& rep) {
  double sum[2][2] = {{0, 0}, {0, 0}};  // [correct?][failing?]
  std::size_t cnt[2][2] = {{0, 0}, {0, 0}};
  for (const auto& p : rep.patches) {
    if (!p.truth || p.result.verdict.rule == VerdictRule::error_passthrough) continue;
    const int c = *p.truth == PatchLabel::correct ? 1 : 0;
    for (int f = 0; f < 2; ++f) {
      const auto ds = p.result.distances.distances(f ? TestResult::failing : TestResult::passing);
      if (ds.empty()) continue;
      double s = 0.0;
      for (double d : ds) s += d;
      sum[c][f] += s / static_cast<double>(ds.size());
      ++cnt[c][f];
    }
  }
  auto mean = [&](int c, int f) { return cnt[c][f] ? sum[c][f] / static_cast<double>(cnt[c][f]) : 0.0; };
  return {mean(0, 0), mean(0, 1), mean(1, 0), mean(1, 1)};
}

inline nlohmann::json counts_json(const GroupCounts& g) {
  return {{"incorrect_total", g.incorrect_total},
          {"correct_total", g.correct_total},
          {"incorrect_excluded", g.incorrect_excluded},
          {"correct_excluded", g.correct_excluded}};
}

inline nlohmann::json verdict_json(const std::string& patch_id, const Verdict& v) {
  nlohmann::json j = {{"patch-id", patch_id},
                      {"label", to_string(v.label)},
                      {"rule", to_string(v.rule)},
                      {"a_p", v.a_p},
                      {"a_f", v.a_f}};
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

inline nlohmann::json report_json(const EvaluationReport& rep) {
  nlohmann::json j;
  j["total"] = counts_json(rep.total);
  for (const auto& [k, g] : rep.by_archetype) j["by_archetype"][k] = counts_json(g);
  for (const auto& [k, g] : rep.by_project) j["by_project"][k] = counts_json(g);
  j["patches"] = nlohmann::json::array();
  for (const auto& p : rep.patches) {
    auto pj = verdict_json(p.patch_id, p.result.verdict);
    pj["problem"] = p.problem;
    pj["archetype"] = p.archetype;
    if (p.truth) pj["truth"] = to_string(*p.truth);
    pj["distances"] = nlohmann::json::array();
    for (const auto& e : p.result.distances.entries)
      pj["distances"].push_back({{"test-id", e.test_id},
                                 {"result", to_string(e.result)},
                                 {"generated", e.origin == TestOrigin::generated},
                                 {"distance", e.distance.value}});
    j["patches"].push_back(std::move(pj));
  }
  return j;
}

namespace detail {

inline std::string percent_cell(std::size_t n, std::size_t total) {
  char buf[32];
  if (total == 0 || n == 0) std::snprintf(buf, sizeof buf, "%zu", n);
  else std::snprintf(buf, sizeof buf, "%zu(%.1f%%)", n, 100.0 * static_cast<double>(n) / static_cast<double>(total));
  return buf;
}

inline void table_rows(std::string& out, const std::map<std::string, GroupCounts>& groups, const GroupCounts& total,
                       const char* head) {
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %9s %7s %18s %16s\n", head, "Incorrect", "Correct", "Incorrect Excluded",
                "Correct Excluded");
  out += line;
  auto row = [&](const std::string& name, const GroupCounts& g) {
    std::snprintf(line, sizeof line, "%-24s %9zu %7zu %18s %16zu\n", name.c_str(), g.incorrect_total,
                  g.correct_total, percent_cell(g.incorrect_excluded, g.incorrect_total).c_str(), g.correct_excluded);
    out += line;
  };
  for (const auto& [k, g] : groups) row(k, g);
  row("Total", total);
}

}  // namespace detail

inline std::string format_report(const EvaluationReport& rep) {
  std::string out;
  detail::table_rows(out, rep.by_archetype, rep.total, "Archetype");
  out += '\n';
  detail::table_rows(out, rep.by_project, rep.total, "Project");
  return out;
}

/// Parameter table in the IE/CE layout, one column per grid value.
inline std::string format_sweep(std::span<const SweepRow> rows, bool by_kp) {
  std::string head = by_kp ? "K_p " : "K_t ", ie = "IE  ", ce = "CE  ";
  char cell[32];
  for (const auto& r : rows) {
    std::snprintf(cell, sizeof cell, " %6g", by_kp ? r.k_p : r.k_t);
    head += cell;
    std::snprintf(cell, sizeof cell, " %6zu", r.incorrect_excluded);
    ie += cell;
    std::snprintf(cell, sizeof cell, " %6zu", r.correct_excluded);
    ce += cell;
  }
  return head + '\n' + ie + '\n' + ce + '\n';
}

}  // namespace patchsim
