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

// Command-line entry point.
//
//   vvv run --config run.json [--selections script.txt]
//   vvv serve --config run.json [--port 8080]
//   vvv list-stages [--json]
//   vvv encode --settings 1,0,2 --shares 1,1,1
//   vvv decode --code 13 --shares 1,1,1 [--counts 8,4,16]
//
// Exit status: 0 success, 2 invalid input, 3 I/O failure, 1 anything else.

#include <poll.h>
#include <unistd.h>

#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "vvv/service.hpp"

namespace {

using namespace vvv;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInvalid = 2;
constexpr int kIoFailure = 3;

std::vector<std::uint64_t> parse_list(const std::string& csv, const char* what) {
  std::vector<std::uint64_t> out;
  if (csv.empty()) return out;
  for (const auto& part : detail::split(csv, ',')) {
    try {
      out.push_back(detail::parse_u64(part, what));
    } catch (const IoError&) {
      throw ValidationError({std::string(what) + ": '" + part + "' is not a non-negative integer"});
    }
  }
  return out;
}

PhaseShares parse_shares(const std::string& csv) {
  auto v = parse_list(csv, "shares");
  if (v.size() != 3) throw ValidationError({"shares: expected a,b,c"});
  return {v[0], v[1], v[2]};
}

std::string csv(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (auto x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
  return out;
}

std::string csv(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + format_double(x);
  return out;
}

void print_state(std::ostream& os, const SessionState& s) {
  os << "iteration " << s.iteration << " code " << to_text(s.code) << " settings "
     << csv(s.settings.indices) << " values " << csv(parameter_values(s.settings, s.config.pipeline.params))
     << "\n";
}

void print_terminal(std::ostream& os, const Terminated& t, const RunConfig& config) {
  os << (t.timed_out ? "timed out" : "stopped") << " at iteration " << t.iteration << " code "
     << to_text(t.code) << " settings " << csv(t.settings.indices) << " values "
     << csv(parameter_values(t.settings, config.pipeline.params)) << "\n";
}

void print_window(std::ostream& os, const SessionState& s) {
  for (const auto& c : s.window) {
    os << "  " << (c.code == s.code ? "* " : "  ") << to_text(c.code) << "  ";
    if (const auto* inf = std::get_if<Infeasible>(&c.status)) {
      os << "infeasible (" << inf->detail << ")";
    } else if (c.failure) {
      os << "failed (" << *c.failure << ")";
    } else {
      os << csv(parameter_values(*c.settings(), s.config.pipeline.params));
      if (!c.directory.empty()) os << "  " << c.directory.string();
    }
    os << "\n";
  }
}

/// Saves the selections that produced `history` (plus the final stop) as a
/// replayable selection script.
void write_history(const RunConfig& config, const std::vector<HistoryEntry>& history) {
  if (config.output_root.empty()) return;
  std::string text;
  for (const auto& h : history) text += to_text(h.code) + "\n";
  text += "NONE\n";
  write_file_atomic(config.output_root / "selections.txt", text);
}

/// Waits up to `seconds` (forever when absent) for a line on stdin.
/// nullopt on EOF or timeout; `timed_out` tells which.
std::optional<std::string> read_line(std::optional<double> seconds, bool& timed_out) {
  timed_out = false;
  if (seconds) {
    pollfd fd{STDIN_FILENO, POLLIN, 0};
    const int ms = static_cast<int>(*seconds * 1000.0);
    if (poll(&fd, 1, ms) == 0) {
      timed_out = true;
      return std::nullopt;
    }
  }
  std::string line;
  if (!std::getline(std::cin, line)) return std::nullopt;
  return line;
}

int run_interactive(const RunConfig& config) {
  SessionState s = start_session(config);
  for (;;) {
    print_state(std::cout, s);
    print_window(std::cout, s);
    std::cout << "select a code (empty or NONE stops): " << std::flush;
    bool timed_out = false;
    auto line = read_line(config.pause_timeout_seconds, timed_out);
    std::string text = line.value_or("");
    text.erase(0, text.find_first_not_of(" \t\r"));
    text.erase(text.find_last_not_of(" \t\r") + 1);
    if (!line || text.empty() || text == "NONE") {
      if (!line) std::cout << "\n";
      Terminated t = timed_out ? terminate_on_timeout(s) : std::get<Terminated>(apply_selection(s, std::nullopt));
      print_terminal(std::cout, t, config);
      write_history(config, t.history);
      return kOk;
    }
    try {
      s = std::get<SessionState>(apply_selection(s, parse_natural(text)));
    } catch (const std::invalid_argument& e) {
      std::cout << "rejected: " << e.what() << "\n";
    }
  }
}

int run_batch_mode(const RunConfig& config, const std::vector<std::optional<Natural>>& selections) {
  Trajectory t = run_batch(config, selections);
  for (const auto& s : t.states) print_state(std::cout, s);
  const auto& history = t.terminal ? t.terminal->history : t.states.back().history;
  if (t.terminal) print_terminal(std::cout, *t.terminal, config);
  write_history(config, history);
  if (!config.output_root.empty()) std::cout << "outputs in " << config.output_root.string() << "\n";
  return kOk;
}

int serve(const RunConfig& config, const fs::path& base_dir, int port) {
  Service service(base_dir);
  const std::string id = service.registry().create(config);
  std::cout << "session " << id << " on http://127.0.0.1:" << port << "/sessions/" << id
            << std::endl;
  if (!service.listen("127.0.0.1", port)) throw IoError("cannot listen on port " + std::to_string(port));
  return kOk;
}

int list_stages(bool as_json) {
  if (as_json) {
    std::cout << stages_json().dump(2) << "\n";
    return kOk;
  }
  for (const auto& st : stage_registry()) {
    std::cout << st.id << "  " << role_name(st.role);
    for (const auto& p : st.params) {
      std::cout << "  " << p.name << "=" << format_double(p.min) << "+" << format_double(p.step)
                << "*[0," << p.count << ")";
    }
    std::cout << "\n";
  }
  return kOk;
}

int encode(const std::string& settings, const std::string& shares) {
  const PhaseShares sh = parse_shares(shares);
  Settings s{parse_list(settings, "settings")};
  if (s.indices.size() != sh.total()) {
    throw ValidationError({"settings: " + std::to_string(s.indices.size()) + " indices for shares summing to " +
                           std::to_string(sh.total())});
  }
  std::cout << to_text(encode_config(s, sh)) << "\n";
  return kOk;
}

int decode(const std::string& code, const std::string& shares, const std::string& counts) {
  const PhaseShares sh = parse_shares(shares);
  Natural z;
  try {
    z = parse_natural(code);
  } catch (const std::invalid_argument&) {
    throw ValidationError({"code: '" + code + "' is not a natural number"});
  }
  std::vector<ParamSchema> params(sh.total());
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i].name = "p" + std::to_string(i);
    params[i].count = std::numeric_limits<std::uint64_t>::max();
  }
  if (!counts.empty()) {
    auto c = parse_list(counts, "counts");
    if (c.size() != params.size()) throw ValidationError({"counts: expected one per parameter"});
    for (std::size_t i = 0; i < c.size(); ++i) params[i].count = c[i];
  }
  Decoded d = decode_config(z, sh, params);
  if (const Settings* s = std::get_if<Settings>(&d)) {
    std::cout << csv(s->indices) << "\n";
  } else {
    const auto& inf = std::get<Infeasible>(d);
    std::cout << "infeasible " << infeasible_kind_name(inf.kind) << " " << phase_name(inf.phase)
              << ": " << inf.detail << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-space explorer for three-phase image pipelines"};
  app.require_subcommand(1);

  std::string config_path, selections_path, settings, shares, code, counts;
  int port = 8080;
  bool as_json = false;

  auto* run = app.add_subcommand("run", "Run a session (batch with a selection script)");
  run->add_option("--config", config_path, "run configuration (JSON)")->required();
  run->add_option("--selections", selections_path, "selection script; overrides the config's");
  run->add_option("--port", port, "port when the config's mode is serve");

  auto* srv = app.add_subcommand("serve", "Serve sessions over HTTP");
  srv->add_option("--config", config_path, "run configuration (JSON)")->required();
  srv->add_option("--port", port, "TCP port");

  auto* stages = app.add_subcommand("list-stages", "List registered stages");
  stages->add_flag("--json", as_json, "machine-readable output");

  auto* enc = app.add_subcommand("encode", "Encode settings as a configuration code");
  enc->add_option("--settings", settings, "grid indices, comma separated")->required();
  enc->add_option("--shares", shares, "parameters per phase, a,b,c")->required();

  auto* dec = app.add_subcommand("decode", "Decode a configuration code");
  dec->add_option("--code", code, "decimal code")->required();
  dec->add_option("--shares", shares, "parameters per phase, a,b,c")->required();
  dec->add_option("--counts", counts, "grid sizes, comma separated (default unbounded)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*run || *srv) {
      const fs::path path(config_path);
      RunConfig config = parse_config(path);
      if (*srv || config.mode == RunMode::kServe) return serve(config, path.parent_path(), port);
      if (!selections_path.empty()) {
        return run_batch_mode(config, load_selection_script(selections_path));
      }
      if (config.selections) return run_batch_mode(config, load_selection_script(*config.selections));
      return run_interactive(config);
    }
    if (*stages) return list_stages(as_json);
    if (*enc) return encode(settings, shares);
    if (*dec) return decode(code, shares, counts);
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kInvalid;
  } catch (const BatchError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
