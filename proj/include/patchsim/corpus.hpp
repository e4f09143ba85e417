#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/minilang/align.hpp"
#include "patchsim/minilang/interpreter.hpp"
#include "patchsim/minilang/parser.hpp"
#include "patchsim/patch_classifier.hpp"
#include "patchsim/trace.hpp"

// Problem manifest (one JSON file per buggy program):
//
//   {
//     "problem": "chart-draw",
//     "project": "chart",
//     "buggy": "buggy.ml",
//     "tests": [
//       {"id": "t1", "call": "draw(null)", "expect": {"nothrow": true}, "result": "failing"}
//     ],
//     "patches": [
//       {"id": "p1", "source": "p1.ml", "label": "incorrect", "archetype": "functionality-deletion"}
//     ],
//     "generated": {"p1": [{"id": "gen000", "call": "draw([1])"}]}
//   }
//
// "expect" is one of {"returns": "<literal>"}, {"nothrow": true} or
// {"throws": "<tag>"}. "result" may be omitted; it is then computed by
// running the test on the buggy program. "label" is ground truth and is only
// read by evaluation. "generated" is written by gen-tests.

namespace patchsim {

struct OriginalTest {
  TestCase test;
  minilang::TestInvocation invocation;
};

/// Everything a classifier may see about one patch.
struct PatchCase {
  std::string id;
  std::string problem;
  PatchSpec spec;
  std::vector<OriginalTest> originals;
  std::optional<std::vector<TestCase>> generated;  // pre-generated tests, if any
};

struct CorpusEntry {
  PatchCase patch;
  std::string project;
  std::string archetype;
  std::optional<PatchLabel> ground_truth;  // never passed to classifiers
};

struct PatchRecord {
  std::string id;
  std::string source_path;
  std::string source;
  std::optional<PatchLabel> label;
  std::string archetype;
  std::optional<std::set<std::string>> declared_methods;
};

struct Manifest {
  std::filesystem::path file;
  std::string problem;
  std::string project;
  std::string buggy_path;
  std::string buggy_source;
  std::vector<OriginalTest> tests;
  std::vector<PatchRecord> patches;
  std::map<std::string, std::vector<TestCase>> generated;

  const PatchRecord* find_patch(const std::string& id) const {
    for (const auto& p : patches)
      if (p.id == id) return &p;
    return nullptr;
  }
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ManifestError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace detail {

inline minilang::Oracle parse_oracle(const nlohmann::json& j, const std::string& test_id) {
  minilang::Oracle o;
  if (!j.is_object() || j.size() != 1)
    throw ManifestError("test '" + test_id + "': 'expect' must hold exactly one of returns/nothrow/throws");
  if (j.contains("returns")) {
    o.kind = minilang::Oracle::Kind::returns;
    o.value = minilang::literal_value(*minilang::parse_expression(j.at("returns").get<std::string>()));
  } else if (j.contains("nothrow")) {
    o.kind = minilang::Oracle::Kind::nothrow;
  } else if (j.contains("throws")) {
    o.kind = minilang::Oracle::Kind::throws;
    o.tag = j.at("throws").get<std::string>();
  } else {
    throw ManifestError("test '" + test_id + "': unknown oracle kind");
  }
  return o;
}

inline nlohmann::json oracle_json(const minilang::Oracle& o) {
  switch (o.kind) {
    case minilang::Oracle::Kind::returns: return {{"returns", minilang::to_literal(o.value)}};
    case minilang::Oracle::Kind::nothrow: return {{"nothrow", true}};
    case minilang::Oracle::Kind::throws: return {{"throws", o.tag}};
  }
  return {};
}

inline std::optional<PatchLabel> parse_label(const std::string& s) {
  if (s == "correct") return PatchLabel::correct;
  if (s == "incorrect") return PatchLabel::incorrect;
  return std::nullopt;
}

}  // namespace detail

inline Manifest load_manifest(const std::filesystem::path& path) {
  Manifest m;
  m.file = path;
  const auto dir = path.parent_path();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }

  try {
    m.problem = j.at("problem").get<std::string>();
    m.project = j.value("project", m.problem);
    m.buggy_path = j.at("buggy").get<std::string>();
    m.buggy_source = read_text(dir / m.buggy_path);
    const auto buggy = minilang::parse(m.buggy_source);

    for (const auto& t : j.at("tests")) {
      OriginalTest ot;
      ot.test.id = t.at("id").get<std::string>();
      ot.test.origin = TestOrigin::original;
      ot.test.input = t.at("call").get<std::string>();
      ot.invocation = minilang::TestInvocation::parse(ot.test.input);
      if (!t.contains("expect")) throw ManifestError("original test '" + ot.test.id + "' has no oracle");
      ot.invocation.expected = detail::parse_oracle(t.at("expect"), ot.test.id);
      if (t.contains("result")) {
        auto r = parse_test_result(t.at("result").get<std::string>());
        if (!r || (*r != TestResult::passing && *r != TestResult::failing))
          throw ManifestError("original test '" + ot.test.id + "' must be passing or failing");
        ot.test.result = *r;
      } else {
        const auto run = minilang::run_traced(buggy, ot.invocation);
        ot.test.result = run.outcome == minilang::Outcome::passed ? TestResult::passing : TestResult::failing;
      }
      m.tests.push_back(std::move(ot));
    }
    if (std::none_of(m.tests.begin(), m.tests.end(),
                     [](const OriginalTest& t) { return t.test.result == TestResult::failing; }))
      throw ManifestError(path.string() + ": a problem needs at least one failing original test");

    for (const auto& p : j.at("patches")) {
      PatchRecord r;
      r.id = p.at("id").get<std::string>();
      r.source_path = p.at("source").get<std::string>();
      r.source = read_text(dir / r.source_path);
      if (p.contains("label")) {
        r.label = detail::parse_label(p.at("label").get<std::string>());
        if (!r.label) throw ManifestError("patch '" + r.id + "': label must be correct or incorrect");
      }
      r.archetype = p.value("archetype", "unspecified");
      if (p.contains("modified_methods"))
        r.declared_methods = p.at("modified_methods").get<std::set<std::string>>();
      m.patches.push_back(std::move(r));
    }

    if (j.contains("generated")) {
      for (const auto& [pid, tests] : j.at("generated").items()) {
        auto& list = m.generated[pid];
        for (const auto& t : tests) {
          TestCase tc;
          tc.id = t.at("id").get<std::string>();
          tc.origin = TestOrigin::generated;
          tc.input = t.at("call").get<std::string>();
          tc.result = TestResult::unknown;
          if (t.contains("result")) {
            auto r = parse_test_result(t.at("result").get<std::string>());
            if (!r) throw ManifestError("generated test '" + tc.id + "': bad result");
            tc.result = *r;
          }
          list.push_back(std::move(tc));
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
  return m;
}

inline nlohmann::json manifest_json(const Manifest& m) {
  nlohmann::json j;
  j["problem"] = m.problem;
  j["project"] = m.project;
  j["buggy"] = m.buggy_path;
  j["tests"] = nlohmann::json::array();
  for (const auto& t : m.tests) {
    nlohmann::json tj = {{"id", t.test.id}, {"call", t.test.input}, {"result", to_string(t.test.result)}};
    if (t.invocation.expected) tj["expect"] = detail::oracle_json(*t.invocation.expected);
    j["tests"].push_back(std::move(tj));
  }
  j["patches"] = nlohmann::json::array();
  for (const auto& p : m.patches) {
    nlohmann::json pj = {{"id", p.id}, {"source", p.source_path}, {"archetype", p.archetype}};
    if (p.label) pj["label"] = to_string(*p.label);
    if (p.declared_methods) pj["modified_methods"] = *p.declared_methods;
    j["patches"].push_back(std::move(pj));
  }
  if (!m.generated.empty()) {
    nlohmann::json gj = nlohmann::json::object();
    for (const auto& [pid, tests] : m.generated) {
      auto& arr = gj[pid] = nlohmann::json::array();
      for (const auto& t : tests) {
        nlohmann::json tj = {{"id", t.id}, {"call", t.input}};
        if (t.result != TestResult::unknown) tj["result"] = to_string(t.result);
        arr.push_back(std::move(tj));
      }
    }
    j["generated"] = std::move(gj);
  }
  return j;
}

inline void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ManifestError("cannot write '" + path.string() + "'");
  os << manifest_json(m).dump(2) << '\n';
}

/// One corpus entry per patch; derives alignment and modified methods.
inline std::vector<CorpusEntry> corpus_entries(const Manifest& m) {
  std::vector<CorpusEntry> out;
  std::vector<OriginalTest> originals = m.tests;
  for (const auto& p : m.patches) {
    CorpusEntry e;
    e.patch.id = p.id;
    e.patch.problem = m.problem;
    e.patch.spec = minilang::make_patch_spec(m.buggy_source, p.source);
    if (p.declared_methods && *p.declared_methods != e.patch.spec.modified_methods)
      throw ManifestError("patch '" + p.id + "': declared modified_methods differ from the source diff");
    e.patch.originals = originals;
    if (auto it = m.generated.find(p.id); it != m.generated.end()) e.patch.generated = it->second;
    e.project = m.project;
    e.archetype = p.archetype;
    e.ground_truth = p.label;
    out.push_back(std::move(e));
  }
  return out;
}

/// Loads every manifest.json below `root` (or `root` itself if it is a file),
/// in path order.
inline std::vector<CorpusEntry> load_corpus(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_regular_file(root)) {
    files.push_back(root);
  } else {
    if (!std::filesystem::is_directory(root)) throw ManifestError("no corpus at '" + root.string() + "'");
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
      if (e.is_regular_file() && e.path().filename() == "manifest.json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  }
  std::vector<CorpusEntry> out;
  for (const auto& f : files) {
    auto entries = corpus_entries(load_manifest(f));
    std::move(entries.begin(), entries.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace patchsim
