#pragma once

// Interactive election sessions behind a small JSON resource API.
//
//   GET  /api/templates                   -> {"templates": [template...]}
//   POST /api/sessions                    {"seed": 7, "template": "favorable-conservative"} -> 201 state
//   GET  /api/sessions/{id}               -> state
//   POST /api/sessions/{id}/actions       {"choice": "jackson-favored"} -> state
//
// Errors are {"error": message} with 400 (bad request body or illegal choice), 404 (unknown
// session, template or route), 405 (wrong method) or 409 (session final, or busy with another
// action; busy responses also carry "retry": true).
//
// SessionStore::handle does the routing so the API can be exercised without a socket; the
// HTTP binding lives in service_http.hpp.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "exai/election.hpp"
#include "exai/errors.hpp"
#include "exai/persistence.hpp"
#include "exai/response_types.hpp"
#include "exai/scenario.hpp"

namespace exai::service {

using nlohmann::json;
using election::Election;
using election::PollRecord;
using election::PollResult;
using election::Scenario;

struct Response {
  int status = 200;
  json body;
};

namespace detail {

inline json poll_json(const PollRecord& r) {
  return {{"round", r.round},
          {"choice", r.choice.empty() ? json(nullptr) : json(r.choice)},
          {"votes_con", r.poll.votes_con},
          {"votes_lib", r.poll.votes_lib},
          {"undecided", r.poll.undecided}};
}

inline json blocks_json(const PollResult& p) {
  json out = json::array();
  for (election::Block b : election::kAllBlocks) {
    int con = 0, lib = 0, und = 0;
    for (const auto& v : p.voters) {
      if (v.block != b) continue;
      if (v.vote == election::Vote::Con) {
        ++con;
      } else if (v.vote == election::Vote::Lib) {
        ++lib;
      } else {
        ++und;
      }
    }
    out.push_back({{"block", election::block_name(b)}, {"votes_con", con}, {"votes_lib", lib}, {"undecided", und}});
  }
  return out;
}

inline json voters_json(const PollResult& p) {
  json out = json::array();
  for (const auto& v : p.voters) {
    out.push_back({{"id", v.voter_id},
                   {"block", election::block_name(v.block)},
                   {"leaning", v.leaning},
                   {"turnout", v.turnout_pass},
                   {"vote", election::vote_name(v.vote)}});
  }
  return out;
}

inline std::string_view kind_name(election::ChoiceKind k) {
  return k == election::ChoiceKind::Personality ? "personality" : "round";
}

inline Response error(int status, std::string message) { return {status, {{"error", std::move(message)}}}; }

}  // namespace detail

inline json template_json(const Scenario& s) {
  json candidates = json::array();
  for (const auto& c : s.candidates) {
    candidates.push_back({{"id", c.id}, {"label", election::label_name(c.label)}, {"leaning", c.leaning_score}});
  }
  return {{"id", s.name}, {"electorate", s.electorate_size}, {"rounds", s.rounds}, {"candidates", candidates}};
}

/// Full snapshot of a session: history, menu, and the latest poll broken down by block and voter.
inline json state_json(const std::string& id, const Election& e) {
  json history = json::array();
  for (const auto& r : e.history()) history.push_back(detail::poll_json(r));
  json menu = json::array();
  for (const auto* c : e.menu()) menu.push_back({{"id", c->id}, {"kind", detail::kind_name(c->kind)}, {"label", c->label}});
  const PollResult& latest = e.history().back().poll;
  return {{"id", id},
          {"template", e.scenario().name},
          {"seed", e.seed()},
          {"rounds", e.scenario().rounds},
          {"rounds_played", std::max(e.rounds_played(), 0)},
          {"finished", e.finished()},
          {"history", history},
          {"menu", menu},
          {"blocks", detail::blocks_json(latest)},
          {"voters", detail::voters_json(latest)}};
}

class SessionStore {
 public:
  SessionStore(TypeRegistry registry, election::ElectionConfig config, std::vector<Scenario> templates,
               std::optional<std::filesystem::path> snapshot_dir = std::nullopt, std::optional<std::string> seal_key = std::nullopt)
      : registry_(std::move(registry)), config_(std::move(config)), snapshot_dir_(std::move(snapshot_dir)), seal_key_(std::move(seal_key)) {
    for (auto& t : templates) {
      election::validate_scenario(t, registry_);
      const std::string name = t.name;
      if (!templates_.emplace(name, std::move(t)).second) throw ValidationError("duplicate template '" + name + "'");
    }
  }

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  json templates() const {
    json list = json::array();
    for (const auto& [name, t] : templates_) list.push_back(template_json(t));
    return {{"templates", list}};
  }

  Response create(const json& request) {
    if (!request.is_object()) return detail::error(400, "request body must be a JSON object");
    if (!request.contains("seed") || !request.at("seed").is_number_unsigned()) {
      return detail::error(400, "'seed' must be a non-negative integer");
    }
    const auto seed = request.at("seed").get<std::uint64_t>();
    const std::string name = request.value("template", std::string("favorable-conservative"));
    auto t = templates_.find(name);
    if (t == templates_.end()) return detail::error(404, "unknown template '" + name + "'");

    auto session = std::make_shared<Session>(Election(t->second, registry_, config_, seed));
    const std::string id = "s" + std::to_string(++next_id_);
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_.emplace(id, session);
    }
    std::lock_guard guard(session->mutex);
    snapshot(id, session->election);
    return {201, state_json(id, session->election)};
  }

  Response state(const std::string& id) const {
    auto session = find(id);
    if (!session) return detail::error(404, "unknown session '" + id + "'");
    std::lock_guard guard(session->mutex);
    return {200, state_json(id, session->election)};
  }

  Response act(const std::string& id, const json& request) {
    auto session = find(id);
    if (!session) return detail::error(404, "unknown session '" + id + "'");
    if (!request.is_object() || !request.contains("choice") || !request.at("choice").is_string()) {
      return detail::error(400, "'choice' must be a string");
    }
    std::unique_lock guard(session->mutex, std::try_to_lock);
    if (!guard.owns_lock()) {
      Response r = detail::error(409, "session is busy with another action");
      r.body["retry"] = true;
      return r;
    }
    Election& e = session->election;
    if (e.finished()) return detail::error(409, "session is final");
    try {
      e.apply_choice(request.at("choice").get<std::string>());
    } catch (const ValidationError& ex) {
      return detail::error(400, ex.what());
    }
    snapshot(id, e);
    return {200, state_json(id, e)};
  }

  /// Routes one request. `path` excludes any query string.
  Response handle(std::string_view method, std::string_view path, std::string_view body) {
    try {
      if (path == "/api/templates") {
        if (method != "GET") return detail::error(405, "use GET");
        return {200, templates()};
      }
      if (path == "/api/sessions") {
        if (method != "POST") return detail::error(405, "use POST");
        return create(parse_body(body));
      }
      constexpr std::string_view prefix = "/api/sessions/";
      if (path.substr(0, prefix.size()) == prefix) {
        std::string_view rest = path.substr(prefix.size());
        constexpr std::string_view actions = "/actions";
        if (rest.size() > actions.size() && rest.substr(rest.size() - actions.size()) == actions) {
          if (method != "POST") return detail::error(405, "use POST");
          return act(std::string(rest.substr(0, rest.size() - actions.size())), parse_body(body));
        }
        if (!rest.empty() && rest.find('/') == std::string_view::npos) {
          if (method != "GET") return detail::error(405, "use GET");
          return state(std::string(rest));
        }
      }
      return detail::error(404, "no route for " + std::string(path));
    } catch (const ParseError& e) {
      return detail::error(400, e.what());
    } catch (const Error& e) {
      return detail::error(500, e.what());
    }
  }

  std::size_t session_count() const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
  }

 private:
  struct Session {
    explicit Session(Election e) : election(std::move(e)) {}
    mutable std::mutex mutex;
    Election election;
  };

  static json parse_body(std::string_view body) {
    if (body.empty()) return json::object();
    try {
      return json::parse(body);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), 1, static_cast<int>(e.byte));
    }
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  void snapshot(const std::string& id, const Election& e) const {
    if (!snapshot_dir_) return;
    std::vector<Personality> people;
    people.reserve(e.voters().size());
    for (const auto& v : e.voters()) people.push_back(v.personality);
    save_all(people, *snapshot_dir_ / id, seal_key_);
  }

  TypeRegistry registry_;
  election::ElectionConfig config_;
  std::map<std::string, Scenario> templates_;
  std::optional<std::filesystem::path> snapshot_dir_;
  std::optional<std::string> seal_key_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{0};
};

}  // namespace exai::service
