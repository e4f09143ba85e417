#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "patchsim/corpus.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/pipeline.hpp"

// Tool configuration file (JSON). Every key is optional; unknown keys are
// rejected so that typos do not silently fall back to defaults.
//
//   {
//     "k_p": 0.25,
//     "k_t": 0.4,
//     "generation": {"enabled": true, "seed": 20170, "attempts": 400, "max_selected": 20},
//     "runtime": {"fuel": 1000000, "max_call_depth": 200},
//     "lcs": {"collapse_repeats": true, "cap": 20000, "overflow": "subsample"},
//     "threads": 0
//   }

namespace patchsim {

struct ToolConfig {
  PipelineConfig pipeline;
  std::size_t threads = 0;  // 0: hardware concurrency
};

namespace detail {

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown key '" + where + k + "'");
  }
}

inline double unit_interval(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const double v = j.at(key).get<double>();
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(key) + " must lie in [0, 1]");
  return v;
}

}  // namespace detail

inline ToolConfig parse_config(const nlohmann::json& j) {
  ToolConfig c;
  auto& p = c.pipeline;
  try {
    detail::check_keys(j, {"k_p", "k_t", "generation", "runtime", "lcs", "threads"}, "");
    p.patch.k_p = detail::unit_interval(j, "k_p", p.patch.k_p);
    p.test.k_t = detail::unit_interval(j, "k_t", p.test.k_t);
    c.threads = j.value("threads", c.threads);

    if (j.contains("generation")) {
      const auto& g = j.at("generation");
      detail::check_keys(g, {"enabled", "seed", "attempts", "max_selected"}, "generation.");
      p.generate = g.value("enabled", p.generate);
      p.gen.seed = g.value("seed", p.gen.seed);
      p.gen.attempts = g.value("attempts", p.gen.attempts);
      p.gen.max_selected = g.value("max_selected", p.gen.max_selected);
    }
    if (j.contains("runtime")) {
      const auto& r = j.at("runtime");
      detail::check_keys(r, {"fuel", "max_call_depth"}, "runtime.");
      p.run.fuel = r.value("fuel", p.run.fuel);
      p.run.max_call_depth = r.value("max_call_depth", p.run.max_call_depth);
      if (p.run.fuel == 0) throw ConfigError("runtime.fuel must be positive");
    }
    if (j.contains("lcs")) {
      const auto& l = j.at("lcs");
      detail::check_keys(l, {"collapse_repeats", "cap", "overflow"}, "lcs.");
      p.prep.collapse_repeats = l.value("collapse_repeats", p.prep.collapse_repeats);
      p.prep.cap = l.value("cap", p.prep.cap);
      const auto overflow = l.value("overflow", std::string("subsample"));
      if (overflow == "subsample") p.prep.overflow = OverflowPolicy::subsample;
      else if (overflow == "reject") p.prep.overflow = OverflowPolicy::reject;
      else throw ConfigError("lcs.overflow must be 'subsample' or 'reject'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  p.gen.run = p.run;
  return c;
}

inline ToolConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ManifestError& e) {
    throw ConfigError(e.what());
  }
}

inline nlohmann::json config_json(const ToolConfig& c) {
  const auto& p = c.pipeline;
  return {{"k_p", p.patch.k_p},
          {"k_t", p.test.k_t},
          {"generation",
           {{"enabled", p.generate}, {"seed", p.gen.seed}, {"attempts", p.gen.attempts},
            {"max_selected", p.gen.max_selected}}},
          {"runtime", {{"fuel", p.run.fuel}, {"max_call_depth", p.run.max_call_depth}}},
          {"lcs",
           {{"collapse_repeats", p.prep.collapse_repeats},
            {"cap", p.prep.cap},
            {"overflow", p.prep.overflow == OverflowPolicy::reject ? "reject" : "subsample"}}},
          {"threads", c.threads}};
}

}  // namespace patchsim
