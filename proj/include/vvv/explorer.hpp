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

// The steering loop. Each iteration encodes the current settings as one
// code, decodes every integer in a window around it, runs the pipeline for
// each feasible neighbour and waits for a selection, which becomes the next
// iteration's settings. A missing selection ends the session.
//
// States are immutable values: every operation returns a new SessionState.

#ifndef VVV_EXPLORER_HPP_
#define VVV_EXPLORER_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "vvv/codec.hpp"
#include "vvv/config.hpp"
#include "vvv/imageio.hpp"
#include "vvv/natural.hpp"
#include "vvv/pipeline.hpp"

namespace vvv {

struct Candidate {
  Natural code;
  Decoded status;
  // One entry per input image; present iff the candidate is feasible and
  // its pipeline ran without error.
  std::optional<std::vector<PipelineOutput>> outputs;
  std::optional<std::string> failure;  // pipeline error of a feasible candidate
  fs::path directory;                  // empty when nothing was persisted

  bool feasible() const { return is_feasible(status); }
  const Settings* settings() const { return std::get_if<Settings>(&status); }

  bool operator==(const Candidate&) const = default;
};

struct HistoryEntry {
  std::uint64_t iteration = 0;
  Natural code;

  bool operator==(const HistoryEntry&) const = default;
};

struct SessionState {
  RunConfig config;
  std::shared_ptr<const std::vector<ImageBuffer>> images;
  std::uint64_t iteration = 0;
  Settings settings;
  Natural code;  // encode_config(settings); set by evaluate_window
  std::vector<Candidate> window;
  std::vector<HistoryEntry> history;
  bool evaluated = false;

  const PhaseShares& shares() const { return config.shares; }
  std::uint64_t range() const { return config.range; }

  const Candidate* find(const Natural& c) const {
    for (const auto& cand : window) {
      if (cand.code == c) return &cand;
    }
    return nullptr;
  }

  bool operator==(const SessionState& o) const {
    const bool same_images = images == o.images || (images && o.images && *images == *o.images);
    return same_images && config == o.config && iteration == o.iteration &&
           settings == o.settings && code == o.code && window == o.window &&
           history == o.history && evaluated == o.evaluated;
  }
};

/// Final outcome when the user stops (or the pause times out).
struct Terminated {
  Settings settings;
  Natural code;
  std::uint64_t iteration = 0;
  std::vector<HistoryEntry> history;
  bool timed_out = false;

  bool operator==(const Terminated&) const = default;
};

class SelectionRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BatchError : public std::runtime_error {
 public:
  BatchError(std::size_t step, const std::string& what)
      : std::runtime_error("selection " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// ---------------------------------------------------------------------------

/// Validates the config, loads the input images and returns iteration 0
/// with the default settings. The window is not yet evaluated.
inline SessionState init_session(const RunConfig& config) {
  validate_config(config);
  auto images = std::make_shared<std::vector<ImageBuffer>>();
  for (const auto& path : config.images) images->push_back(load_image(path));
  SessionState s;
  s.config = config;
  s.images = std::move(images);
  s.settings = config.defaults;
  s.code = encode_config(s.settings, config.shares);
  return s;
}

/// Codes max(0, code - range/2) .. code + range/2, ascending.
inline std::vector<Natural> enumerate_window(const Natural& code, std::uint64_t range) {
  const std::uint64_t half = range / 2;
  const Natural lo = code >= half ? Natural(code - half) : Natural(0);
  const Natural hi = code + half;
  std::vector<Natural> out;
  for (Natural c = lo; c <= hi; ++c) out.push_back(c);
  return out;
}

/// Extension: scans upward from the window's lower bound until `range`
/// feasible codes are found (at least one), giving up after
/// 10 * range * (largest grid count) codes.
inline std::vector<Natural> enumerate_feasible(const Natural& code, std::uint64_t range,
                                               const PhaseShares& shares,
                                               std::span<const ParamSchema> params) {
  const std::uint64_t half = range / 2;
  std::uint64_t largest = 1;
  for (const auto& p : params) largest = std::max(largest, p.count);
  const std::uint64_t want = std::max<std::uint64_t>(range, 1);
  const std::uint64_t cap = 10 * std::max<std::uint64_t>(range, 1) * largest;
  std::vector<Natural> out;
  Natural c = code >= half ? Natural(code - half) : Natural(0);
  for (std::uint64_t scanned = 0; scanned < cap && out.size() < want; ++scanned, ++c) {
    if (is_feasible(decode_config(c, shares, params))) out.push_back(c);
  }
  return out;
}

/// Directory for a candidate. Codes whose text is not short decimal are
/// replaced by a digest of the text.
inline fs::path candidate_directory(const fs::path& root, std::uint64_t iteration,
                                    const Natural& code) {
  std::string text = to_text(code);
  std::string name;
  if (text.size() <= 200 && is_decimal_text(text)) {
    name = "cand_" + text;
  } else {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char ch : text) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    name = "cand_h" + std::string(hex) + "_" + std::to_string(text.size());
  }
  return root / ("iter_" + std::to_string(iteration)) / name;
}

inline Manifest candidate_manifest(const SessionState& s, const Candidate& c) {
  Manifest m;
  m.code = c.code;
  m.iteration = s.iteration;
  m.shares = s.shares();
  m.stages = s.config.pipeline.stages;
  for (const auto& p : s.config.pipeline.params) m.param_names.push_back(p.name);
  if (const Settings* st = c.settings()) {
    m.settings = *st;
    m.values = parameter_values(*st, s.config.pipeline.params);
  }
  return m;
}

/// Persists a feasible candidate's outputs under `dir`; returns the manifest
/// path.
inline fs::path save_outputs(const SessionState& s, const Candidate& c, const fs::path& dir) {
  if (!c.feasible() || !c.outputs) {
    throw std::invalid_argument("save_outputs: candidate has no outputs");
  }
  try {
    return write_candidate_files(*c.outputs, candidate_manifest(s, c), dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError(dir.string() + ": " + e.what());
  }
}

namespace detail {

inline void evaluate_candidate(const SessionState& s, Candidate& c) {
  const Settings* settings = c.settings();
  if (!settings) return;
  try {
    std::vector<PipelineOutput> outputs;
    for (const auto& img : *s.images) {
      outputs.push_back(run_pipeline(img, *settings, s.config.pipeline));
    }
    c.outputs = std::move(outputs);
  } catch (const std::exception& e) {
    c.failure = e.what();
    return;
  }
  if (!s.config.output_root.empty()) {
    c.directory = candidate_directory(s.config.output_root, s.iteration, c.code);
    try {
      save_outputs(s, c, c.directory);
    } catch (const std::exception& e) {
      c.failure = std::string("save failed: ") + e.what();
    }
  }
}

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
template <typename F>
void parallel_for(std::size_t n, F&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace detail

/// Encodes the current settings, decodes the window around that code and
/// runs (and persists) every feasible candidate. Pipeline failures are
/// recorded on their candidate.
inline SessionState evaluate_window(SessionState s) {
  const auto& params = s.config.pipeline.params;
  s.code = encode_config(s.settings, s.shares());
  const std::vector<Natural> codes =
      s.config.feasible_fill ? enumerate_feasible(s.code, s.range(), s.shares(), params)
                             : enumerate_window(s.code, s.range());
  s.window.clear();
  s.window.reserve(codes.size());
  for (const auto& c : codes) {
    s.window.push_back(Candidate{c, decode_config(c, s.shares(), params), {}, {}, {}});
  }
  detail::parallel_for(s.window.size(),
                       [&](std::size_t i) { detail::evaluate_candidate(s, s.window[i]); });
  s.evaluated = true;
  return s;
}

inline SessionState start_session(const RunConfig& config) {
  return evaluate_window(init_session(config));
}

/// Applies a selection. nullopt terminates with the current settings;
/// otherwise the selected feasible candidate from the current window
/// becomes the next iteration, whose window is evaluated before returning.
inline std::variant<SessionState, Terminated> apply_selection(
    const SessionState& s, const std::optional<Natural>& selection) {
  if (!selection) {
    return Terminated{s.settings, s.code, s.iteration, s.history, false};
  }
  const Candidate* chosen = s.find(*selection);
  if (!chosen) {
    throw SelectionRejected("code " + to_text(*selection) + " is not in the current window");
  }
  const Settings* settings = chosen->settings();
  if (!settings) {
    throw SelectionRejected("code " + to_text(*selection) + " is infeasible: " +
                            std::get<Infeasible>(chosen->status).detail);
  }
  SessionState next;
  next.config = s.config;
  next.images = s.images;
  next.iteration = s.iteration + 1;
  next.settings = *settings;
  next.history = s.history;
  next.history.push_back({s.iteration, *selection});
  return evaluate_window(std::move(next));
}

/// Timed-out pause: the session ends with its current settings.
inline Terminated terminate_on_timeout(const SessionState& s) {
  return Terminated{s.settings, s.code, s.iteration, s.history, true};
}

struct Trajectory {
  std::vector<SessionState> states;
  std::optional<Terminated> terminal;
};

/// Headless replay: starts a session and feeds the selections in order.
inline Trajectory run_batch(const RunConfig& config,
                            const std::vector<std::optional<Natural>>& selections) {
  Trajectory t;
  t.states.push_back(start_session(config));
  for (std::size_t i = 0; i < selections.size(); ++i) {
    if (t.terminal) throw BatchError(i, "session already terminated");
    std::variant<SessionState, Terminated> r;
    try {
      r = apply_selection(t.states.back(), selections[i]);
    } catch (const SelectionRejected& e) {
      throw BatchError(i, e.what());
    }
    if (auto* next = std::get_if<SessionState>(&r)) {
      t.states.push_back(std::move(*next));
    } else {
      t.terminal = std::get<Terminated>(std::move(r));
    }
  }
  return t;
}

/// Selections that reproduce a state's history from iteration 0.
inline std::vector<std::optional<Natural>> history_selections(
    const std::vector<HistoryEntry>& history) {
  std::vector<std::optional<Natural>> out;
  for (const auto& h : history) out.emplace_back(h.code);
  return out;
}

/// One selection per line: a decimal code or NONE. Blank lines and lines
/// starting with '#' are ignored.
inline std::vector<std::optional<Natural>> parse_selection_script(std::string_view text) {
  std::vector<std::optional<Natural>> out;
  std::size_t line_no = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    if (line.empty() || line.front() == '#') continue;
    if (line == "NONE") {
      out.emplace_back(std::nullopt);
      continue;
    }
    try {
      out.emplace_back(parse_natural(line));
    } catch (const std::invalid_argument&) {
      throw ValidationError({"selections line " + std::to_string(line_no) +
                             ": expected a code or NONE, got '" + std::string(line) + "'"});
    }
  }
  return out;
}

inline std::vector<std::optional<Natural>> load_selection_script(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError(path.string() + ": no such file");
  return parse_selection_script(read_file(path));
}

}  // namespace vvv

#endif  // VVV_EXPLORER_HPP_
