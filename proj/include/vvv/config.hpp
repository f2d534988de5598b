// Copyright 2026 The vvv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration. The on-disk form is a JSON object:
//
//   {
//     "images":  ["cells.png"],                    required, >= 1 entry
//     "stages":  {"veni": "gaussian_blur",         missing slots are
//                 "vidi": "surface_grid",           "identity"
//                 "vici": "fixed_threshold"},
//     "params":  [{"name": "sigma", "min": 0.5,    optional; defaults to
//                  "step": 0.5, "count": 8}, ...],  the stages' own grids
//     "shares":  [1, 1, 1],                        required
//     "range":   6,                                required
//     "defaults": [0, 0, 0],                       optional, all zero
//     "output_root": "runs",                       optional, "" = no files
//     "mode": "batch",                             "batch" | "serve"
//     "selections": "script.txt",                  optional
//     "pause_timeout_seconds": 30,                 optional
//     "feasible_fill": false                       optional
//   }
//
// Relative paths are resolved against the directory of the config file.

#ifndef VVV_CONFIG_HPP_
#define VVV_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vvv/codec.hpp"
#include "vvv/imageio.hpp"
#include "vvv/pipeline.hpp"

namespace vvv {

using json = nlohmann::json;

/// Carries every violated constraint, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join_issues(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& i : issues) {
      if (!out.empty()) out += "; ";
      out += i;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

enum class RunMode { kBatch, kServe };

struct RunConfig {
  std::vector<fs::path> images;
  PipelineSpec pipeline;
  PhaseShares shares;
  std::uint64_t range = 0;
  Settings defaults;
  fs::path output_root = "runs";
  RunMode mode = RunMode::kBatch;
  std::optional<fs::path> selections;
  std::optional<double> pause_timeout_seconds;
  bool feasible_fill = false;

  bool operator==(const RunConfig&) const = default;
};

/// Semantic checks shared by every entry point.
inline std::vector<std::string> config_problems(const RunConfig& c) {
  std::vector<std::string> out;
  if (c.images.empty()) out.push_back("images: at least one input image is required");
  auto pipeline = c.pipeline.problems();
  out.insert(out.end(), pipeline.begin(), pipeline.end());
  const std::size_t n = c.pipeline.params.size();
  if (c.shares.total() != n) {
    out.push_back("shares: " + std::to_string(c.shares.veni) + "+" +
                  std::to_string(c.shares.vidi) + "+" + std::to_string(c.shares.vici) +
                  " != " + std::to_string(n) + " parameters");
  } else if (pipeline.empty() && !(c.shares == c.pipeline.shares())) {
    const PhaseShares want = c.pipeline.shares();
    out.push_back("shares: stages take " + std::to_string(want.veni) + "," +
                  std::to_string(want.vidi) + "," + std::to_string(want.vici) +
                  " parameters");
  }
  if (c.defaults.indices.size() != n) {
    out.push_back("defaults: " + std::to_string(c.defaults.indices.size()) +
                  " indices for " + std::to_string(n) + " parameters");
  } else {
    for (auto& p : settings_problems(c.defaults, PhaseShares{n, 0, 0}, c.pipeline.params)) {
      out.push_back("defaults: " + p);
    }
  }
  if (c.pause_timeout_seconds && !(*c.pause_timeout_seconds > 0.0)) {
    out.push_back("pause_timeout_seconds: must be > 0");
  }
  return out;
}

inline void validate_config(const RunConfig& c) {
  auto problems = config_problems(c);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

/// Builds and validates a RunConfig from its JSON form.
inline RunConfig config_from_json(const json& j, const fs::path& base_dir = {}) {
  std::vector<std::string> issues;
  RunConfig c;
  if (!j.is_object()) throw ValidationError({"config: expected a JSON object"});

  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  auto field = [&](const char* key, auto&& body) {
    if (!j.contains(key)) return;
    try {
      body(j.at(key));
    } catch (const json::exception& e) {
      issues.push_back(std::string(key) + ": " + e.what());
    }
  };
  auto require = [&](const char* key) {
    if (!j.contains(key)) issues.push_back(std::string(key) + ": required");
  };

  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* kKnown[] = {"images", "stages", "params", "shares", "range",
                                   "defaults", "output_root", "mode", "selections",
                                   "pause_timeout_seconds", "feasible_fill"};
    bool known = false;
    for (const char* k : kKnown) known |= it.key() == k;
    if (!known) issues.push_back(it.key() + ": unknown field");
  }

  require("images");
  field("images", [&](const json& v) {
    for (const auto& p : v) c.images.push_back(resolve(p.get<std::string>()));
  });

  field("stages", [&](const json& v) {
    if (!v.is_object()) {
      issues.push_back("stages: expected an object with veni/vidi/vici keys");
      return;
    }
    for (auto it = v.begin(); it != v.end(); ++it) {
      bool matched = false;
      for (Phase p : kPhases) {
        if (it.key() == phase_name(p)) {
          c.pipeline.stages[static_cast<int>(p)] = it.value().get<std::string>();
          matched = true;
        }
      }
      if (!matched) issues.push_back("stages: unknown slot '" + it.key() + "'");
    }
  });

  bool explicit_params = false;
  field("params", [&](const json& v) {
    explicit_params = true;
    for (const auto& p : v) {
      ParamSchema s;
      s.name = p.at("name").get<std::string>();
      s.min = p.at("min").get<double>();
      s.step = p.at("step").get<double>();
      const auto count = p.at("count").get<std::int64_t>();
      s.count = count < 0 ? 0 : static_cast<std::uint64_t>(count);
      if (count < 0) issues.push_back(s.name + ": count must be >= 1");
      c.pipeline.params.push_back(std::move(s));
    }
  });
  if (!explicit_params) c.pipeline.params = c.pipeline.default_params();

  require("shares");
  field("shares", [&](const json& v) {
    auto s = v.get<std::vector<std::int64_t>>();
    if (s.size() != 3 || s[0] < 0 || s[1] < 0 || s[2] < 0) {
      issues.push_back("shares: expected three non-negative integers");
      return;
    }
    c.shares = {static_cast<std::size_t>(s[0]), static_cast<std::size_t>(s[1]),
                static_cast<std::size_t>(s[2])};
  });

  require("range");
  field("range", [&](const json& v) {
    const auto r = v.get<std::int64_t>();
    if (r < 0) {
      issues.push_back("range: must be >= 0");
      return;
    }
    c.range = static_cast<std::uint64_t>(r);
  });

  c.defaults.indices.assign(c.pipeline.params.size(), 0);
  field("defaults", [&](const json& v) {
    c.defaults.indices.clear();
    for (const auto& x : v) {
      const auto i = x.get<std::int64_t>();
      if (i < 0) issues.push_back("defaults: indices must be >= 0");
      c.defaults.indices.push_back(i < 0 ? 0 : static_cast<std::uint64_t>(i));
    }
  });

  c.output_root = resolve("runs");
  field("output_root", [&](const json& v) {
    const auto s = v.get<std::string>();
    c.output_root = s.empty() ? fs::path() : resolve(s);
  });
  field("mode", [&](const json& v) {
    const auto s = v.get<std::string>();
    if (s == "batch") c.mode = RunMode::kBatch;
    else if (s == "serve") c.mode = RunMode::kServe;
    else issues.push_back("mode: expected 'batch' or 'serve'");
  });
  field("selections", [&](const json& v) { c.selections = resolve(v.get<std::string>()); });
  field("pause_timeout_seconds",
        [&](const json& v) { c.pause_timeout_seconds = v.get<double>(); });
  field("feasible_fill", [&](const json& v) { c.feasible_fill = v.get<bool>(); });

  if (issues.empty()) issues = config_problems(c);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return c;
}

inline RunConfig parse_config_text(const std::string& text, const fs::path& base_dir = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("parse error: ") + e.what()});
  }
  return config_from_json(j, base_dir);
}

inline RunConfig parse_config(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError(path.string() + ": no such file");
  return parse_config_text(read_file(path), path.parent_path());
}

inline json config_to_json(const RunConfig& c) {
  json j;
  j["images"] = json::array();
  for (const auto& p : c.images) j["images"].push_back(p.string());
  j["stages"] = {{"veni", c.pipeline.stages[0]},
                 {"vidi", c.pipeline.stages[1]},
                 {"vici", c.pipeline.stages[2]}};
  j["params"] = json::array();
  for (const auto& s : c.pipeline.params) {
    j["params"].push_back({{"name", s.name}, {"min", s.min}, {"step", s.step},
                           {"count", s.count}});
  }
  j["shares"] = {c.shares.veni, c.shares.vidi, c.shares.vici};
  j["range"] = c.range;
  j["defaults"] = c.defaults.indices;
  j["output_root"] = c.output_root.string();
  j["mode"] = c.mode == RunMode::kBatch ? "batch" : "serve";
  if (c.selections) j["selections"] = c.selections->string();
  if (c.pause_timeout_seconds) j["pause_timeout_seconds"] = *c.pause_timeout_seconds;
  j["feasible_fill"] = c.feasible_fill;
  return j;
}

}  // namespace vvv

#endif  // VVV_CONFIG_HPP_
