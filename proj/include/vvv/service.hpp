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

// HTTP front end for interactive sessions. JSON in, JSON out; codes always
// travel as strings in their text form (decimal, or the run form for huge
// codes).
//
//   GET  /stages                                         stage registry
//   POST /sessions                     {config}       -> 201 {id, snapshot}
//   GET  /sessions/{id}                               -> snapshot | terminal
//   GET  /sessions/{id}/candidates/{code}/image/{phase}[?image=k]  -> PNG
//   POST /sessions/{id}/selection      {"code": "17" | null,
//                                       "iteration": k (optional)}
//
// {phase} is veni, vidi, vici or <phase>_aux for a rendered auxiliary plot.
// {code} may also be "~<i>", the i-th candidate of the current window, for
// codes too long to fit in a request line.
//
// Errors are {"error": message, "issues": [...]} with status 400 (bad
// config), 404 (unknown session or candidate), 409 (infeasible image,
// selection already in progress, stale iteration, session over) or 422
// (selection outside the window or infeasible).

#ifndef VVV_SERVICE_HPP_
#define VVV_SERVICE_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "vvv/config.hpp"
#include "vvv/explorer.hpp"

namespace vvv {

using Clock = std::function<std::chrono::steady_clock::time_point()>;

inline json natural_json(const Natural& n) { return to_text(n); }

inline json settings_json(const Settings& s) { return s.indices; }

inline json stages_json() {
  json out = json::array();
  for (const auto& st : stage_registry()) {
    json params = json::array();
    for (const auto& p : st.params) {
      params.push_back({{"name", p.name}, {"min", p.min}, {"step", p.step}, {"count", p.count}});
    }
    out.push_back({{"id", st.id}, {"phase", role_name(st.role)}, {"params", params}});
  }
  return out;
}

inline json history_json(const std::vector<HistoryEntry>& history) {
  json out = json::array();
  for (const auto& h : history) {
    out.push_back({{"iteration", h.iteration}, {"code", natural_json(h.code)}});
  }
  return out;
}

inline std::string candidate_status(const Candidate& c) {
  if (!c.feasible()) return "infeasible";
  return c.failure ? "failed" : "feasible";
}

inline json snapshot_json(const std::string& id, const SessionState& s) {
  const auto& params = s.config.pipeline.params;
  json window = json::array();
  for (std::size_t i = 0; i < s.window.size(); ++i) {
    const Candidate& c = s.window[i];
    const std::string digits = to_text(c.code);
    json j = {{"code", digits}, {"status", candidate_status(c)}, {"center", c.code == s.code}};
    if (const auto* inf = std::get_if<Infeasible>(&c.status)) {
      j["reason"] = {{"kind", infeasible_kind_name(inf->kind)},
                     {"phase", phase_name(inf->phase)},
                     {"detail", inf->detail}};
    }
    if (c.failure) j["reason"] = {{"kind", "pipeline"}, {"detail", *c.failure}};
    if (const Settings* st = c.settings()) {
      j["settings"] = settings_json(*st);
      j["values"] = parameter_values(*st, params);
    }
    if (c.outputs) {
      const bool addressable = digits.size() <= 1000 && is_decimal_text(digits);
      const std::string key = addressable ? digits : "~" + std::to_string(i);
      json images = json::array();
      for (std::size_t k = 0; k < c.outputs->size(); ++k) {
        json urls;
        for (Phase p : kPhases) {
          std::string url = "/sessions/" + id + "/candidates/" + key + "/image/" + phase_name(p);
          if (k > 0) url += "?image=" + std::to_string(k);
          urls[phase_name(p)] = url;
        }
        images.push_back(urls);
      }
      j["images"] = images;
    }
    if (!c.directory.empty()) j["directory"] = c.directory.string();
    window.push_back(std::move(j));
  }
  json names = json::array();
  for (const auto& p : params) names.push_back(p.name);
  return {{"id", id},
          {"state", "active"},
          {"iteration", s.iteration},
          {"code", natural_json(s.code)},
          {"settings", settings_json(s.settings)},
          {"values", parameter_values(s.settings, params)},
          {"param_names", names},
          {"stages", {{"veni", s.config.pipeline.stages[0]},
                      {"vidi", s.config.pipeline.stages[1]},
                      {"vici", s.config.pipeline.stages[2]}}},
          {"range", s.range()},
          {"window", window},
          {"history", history_json(s.history)}};
}

inline json terminal_json(const std::string& id, const Terminated& t,
                          const std::vector<ParamSchema>& params) {
  return {{"id", id},
          {"state", "terminated"},
          {"timed_out", t.timed_out},
          {"iteration", t.iteration},
          {"code", natural_json(t.code)},
          {"settings", settings_json(t.settings)},
          {"values", parameter_values(t.settings, params)},
          {"history", history_json(t.history)}};
}

/// Failure of a registry call, carrying the HTTP status to report.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what, std::vector<std::string> issues = {})
      : std::runtime_error(what), status_(status), issues_(std::move(issues)) {}

  int status() const { return status_; }
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  int status_;
  std::vector<std::string> issues_;
};

/// In-memory sessions. Readers take a shared snapshot under a short lock;
/// selections are serialized per session and a second selection arriving
/// while one is being evaluated is refused rather than queued. An idle
/// timeout, if configured, is checked whenever the session is touched.
class SessionRegistry {
 public:
  using View = std::variant<std::shared_ptr<const SessionState>, std::shared_ptr<const Terminated>>;

  explicit SessionRegistry(Clock clock = [] { return std::chrono::steady_clock::now(); })
      : clock_(std::move(clock)) {}

  std::string create(const RunConfig& config) {
    auto slot = std::make_shared<Slot>();
    try {
      slot->state = std::make_shared<const SessionState>(start_session(config));
    } catch (const ValidationError& e) {
      throw ServiceError(400, e.what(), e.issues());
    } catch (const IoError& e) {
      throw ServiceError(400, e.what(), {e.what()});
    }
    slot->touched = clock_();
    std::lock_guard lock(mu_);
    std::string id = "s" + std::to_string(++next_id_);
    sessions_[id] = std::move(slot);
    return id;
  }

  View view(const std::string& id) {
    auto slot = find(id);
    std::lock_guard lock(slot->mu);
    expire(*slot);
    if (slot->terminal) return slot->terminal;
    return slot->state;
  }

  /// Last evaluated state, also after termination (its images stay
  /// viewable).
  std::shared_ptr<const SessionState> state(const std::string& id) {
    auto slot = find(id);
    std::lock_guard lock(slot->mu);
    expire(*slot);
    return slot->state;
  }

  View select(const std::string& id, const std::optional<Natural>& code,
              std::optional<std::uint64_t> expected_iteration = std::nullopt) {
    auto slot = find(id);
    std::unique_lock busy(slot->select_mu, std::try_to_lock);
    if (!busy.owns_lock()) throw ServiceError(409, "a selection is already being processed");

    std::shared_ptr<const SessionState> current;
    {
      std::lock_guard lock(slot->mu);
      expire(*slot);
      if (slot->terminal) throw ServiceError(409, "session has terminated");
      current = slot->state;
    }
    if (expected_iteration && *expected_iteration != current->iteration) {
      throw ServiceError(409, "selection is for iteration " + std::to_string(*expected_iteration) +
                                  ", session is at " + std::to_string(current->iteration));
    }
    std::variant<SessionState, Terminated> next;
    try {
      next = apply_selection(*current, code);
    } catch (const SelectionRejected& e) {
      throw ServiceError(422, e.what());
    }

    std::lock_guard lock(slot->mu);
    slot->touched = clock_();
    if (auto* s = std::get_if<SessionState>(&next)) {
      slot->state = std::make_shared<const SessionState>(std::move(*s));
      return slot->state;
    }
    slot->terminal = std::make_shared<const Terminated>(std::get<Terminated>(std::move(next)));
    return slot->terminal;
  }

  std::vector<std::string> ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
  }

 private:
  struct Slot {
    std::mutex mu;         // guards the fields below
    std::mutex select_mu;  // held for the duration of a selection
    std::shared_ptr<const SessionState> state;
    std::shared_ptr<const Terminated> terminal;
    std::chrono::steady_clock::time_point touched;
  };

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "no session '" + id + "'");
    return it->second;
  }

  void expire(Slot& slot) const {
    const auto& timeout = slot.state->config.pause_timeout_seconds;
    if (slot.terminal || !timeout) return;
    if (clock_() - slot.touched >= std::chrono::duration<double>(*timeout)) {
      slot.terminal = std::make_shared<const Terminated>(terminate_on_timeout(*slot.state));
    }
  }

  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 0;
};

/// Wires a registry to an httplib server. Relative paths in posted configs
/// resolve against `base_dir`.
class Service {
 public:
  explicit Service(fs::path base_dir = {}, Clock clock = [] { return std::chrono::steady_clock::now(); })
      : base_dir_(std::move(base_dir)), registry_(std::move(clock)) {
    routes();
  }

  ~Service() { stop(); }

  SessionRegistry& registry() { return registry_; }
  httplib::Server& server() { return server_; }

  /// Binds (port 0 picks a free one) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  /// Blocks serving on the calling thread.
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void fail(httplib::Response& res, int status, const std::string& what,
                   const std::vector<std::string>& issues = {}) {
    reply(res, status, {{"error", what}, {"issues", issues}});
  }

  template <typename F>
  static void guarded(httplib::Response& res, F&& body) {
    try {
      body();
    } catch (const ServiceError& e) {
      fail(res, e.status(), e.what(), e.issues());
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    }
  }

  json view(const std::string& id, const SessionRegistry::View& v) {
    if (std::holds_alternative<std::shared_ptr<const Terminated>>(v)) {
      auto last = registry_.state(id);
      return terminal_json(id, *std::get<std::shared_ptr<const Terminated>>(v),
                           last->config.pipeline.params);
    }
    return snapshot_json(id, *std::get<std::shared_ptr<const SessionState>>(v));
  }

  static bool parse_index(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s.size() > 19) return false;
    out = 0;
    for (char ch : s) {
      if (ch < '0' || ch > '9') return false;
      out = out * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    return true;
  }

  void routes() {
    server_.Get("/stages", [](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, stages_json());
    });

    server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        RunConfig config;
        try {
          config = parse_config_text(req.body, base_dir_);
        } catch (const ValidationError& e) {
          throw ServiceError(400, e.what(), e.issues());
        }
        const std::string id = registry_.create(config);
        reply(res, 201, {{"id", id}, {"snapshot", view(id, registry_.view(id))}});
      });
    });

    server_.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        reply(res, 200, view(id, registry_.view(id)));
      });
    });

    server_.Get(R"(/sessions/([^/]+)/candidates/([^/]+)/image/([a-z_]+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] { image(req, res); });
                });

    server_.Post(R"(/sessions/([^/]+)/selection)",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   guarded(res, [&] { selection(req, res); });
                 });
  }

  void image(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const std::string key = req.matches[2];
    std::string phase = req.matches[3];
    auto state = registry_.state(id);

    const Candidate* cand = nullptr;
    if (!key.empty() && key[0] == '~') {
      std::uint64_t i = 0;
      if (!parse_index(key.substr(1), i) || i >= state->window.size()) {
        throw ServiceError(404, "no window slot '" + key + "'");
      }
      cand = &state->window[i];
    } else {
      Natural code;
      try {
        code = parse_natural(key);
      } catch (const std::invalid_argument&) {
        throw ServiceError(404, "'" + key + "' is not a code");
      }
      cand = state->find(code);
      if (!cand) throw ServiceError(404, "code " + key + " is not in the current window");
    }
    if (!cand->feasible()) throw ServiceError(409, "candidate is infeasible");
    if (!cand->outputs) throw ServiceError(409, "candidate failed: " + cand->failure.value_or(""));

    std::uint64_t k = 0;
    if (req.has_param("image") &&
        (!parse_index(req.get_param_value("image"), k) || k >= cand->outputs->size())) {
      throw ServiceError(404, "no input image " + req.get_param_value("image"));
    }
    const bool aux = phase.size() > 4 && phase.substr(phase.size() - 4) == "_aux";
    if (aux) phase.resize(phase.size() - 4);
    for (Phase p : kPhases) {
      if (phase != phase_name(p)) continue;
      const PhaseOutput& out = (*cand->outputs)[k][static_cast<int>(p)];
      if (aux && !out.rendering) throw ServiceError(404, phase + " has no auxiliary plot");
      res.set_content(encode_png(aux ? *out.rendering : out.image), "image/png");
      return;
    }
    throw ServiceError(404, "no phase '" + phase + "'");
  }

  void selection(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      throw ServiceError(400, std::string("parse error: ") + e.what());
    }
    if (!body.is_object() || !body.contains("code")) {
      throw ServiceError(400, "expected {\"code\": <decimal string> | null}");
    }
    std::optional<Natural> code;
    const json& c = body["code"];
    if (c.is_string()) {
      try {
        code = parse_natural(c.get<std::string>());
      } catch (const std::invalid_argument&) {
        throw ServiceError(400, "code must be a decimal string");
      }
    } else if (c.is_number_unsigned()) {
      code = Natural(c.get<std::uint64_t>());
    } else if (!c.is_null()) {
      throw ServiceError(400, "code must be a decimal string or null");
    }
    std::optional<std::uint64_t> iteration;
    if (body.contains("iteration")) {
      if (!body["iteration"].is_number_unsigned()) {
        throw ServiceError(400, "iteration must be a non-negative integer");
      }
      iteration = body["iteration"].get<std::uint64_t>();
    }
    reply(res, 200, view(id, registry_.select(id, code, iteration)));
  }

  fs::path base_dir_;
  SessionRegistry registry_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace vvv

#endif  // VVV_SERVICE_HPP_
