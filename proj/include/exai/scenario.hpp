#pragma once

// Scenario files, the round-by-round election state machine, and batch runs.
//
//   scenario favorable-conservative
//   electorate 100
//   rounds 5
//   candidate Jackson conservative 25
//   candidate Kingston liberal 95
//   profile ultra-conservative 0.85 0.05      # engaged share, apathetic share
//
//   choice jackson-likeable personality
//     label Jackson very likeable, efficient, not very dependable
//     event Jackson kind +1 0.6
//     event Kingston trust -1 0.4 sensitive
//   end
//
//   play jackson-likeable                      # optional scripted sequence
//
// The first `play` must name a personality choice; the rest name distinct round choices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exai/election.hpp"
#include "exai/errors.hpp"
#include "exai/rng.hpp"
#include "exai/text_format.hpp"

namespace exai::election {

enum class ChoiceKind { Personality, Round };

struct Choice {
  std::string id;
  ChoiceKind kind = ChoiceKind::Round;
  std::string label;
  std::vector<Event> events;
};

struct Scenario {
  std::string name;
  std::size_t electorate_size = 100;
  int rounds = 5;
  std::vector<Candidate> candidates;
  ElectorateProfile profile{};
  std::vector<Choice> choices;
  std::vector<std::string> play;

  const Choice* find_choice(std::string_view id) const {
    for (const auto& c : choices) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }
};

namespace detail {

inline std::optional<Block> parse_block(std::string_view s) {
  for (Block b : kAllBlocks) {
    if (block_name(b) == s) return b;
  }
  return std::nullopt;
}

inline void check_play(const Scenario& s) {
  std::vector<std::string> used;
  for (std::size_t i = 0; i < s.play.size(); ++i) {
    const Choice* c = s.find_choice(s.play[i]);
    if (c == nullptr) throw ValidationError("play names unknown choice '" + s.play[i] + "'");
    const ChoiceKind want = i == 0 ? ChoiceKind::Personality : ChoiceKind::Round;
    if (c->kind != want) {
      throw ValidationError("play step " + std::to_string(i + 1) + " ('" + c->id + "') must be a " +
                            (want == ChoiceKind::Personality ? "personality" : "round") + " choice");
    }
    if (i > 0 && std::find(used.begin(), used.end(), c->id) != used.end()) {
      throw ValidationError("round choice '" + c->id + "' played twice");
    }
    used.push_back(c->id);
  }
  if (s.play.size() > static_cast<std::size_t>(s.rounds) + 1) throw ValidationError("play has more steps than rounds");
}

}  // namespace detail

/// Structural checks plus every event's candidate and response type.
inline void validate_scenario(const Scenario& s, const TypeRegistry& registry) {
  if (s.name.empty()) throw ValidationError("scenario has no name");
  if (s.electorate_size < 5) throw ValidationError("electorate needs at least 5 voters");
  if (s.rounds < 1) throw ValidationError("scenario needs at least one round");
  pair_candidates(s.candidates);
  if (s.candidates.size() != 2) throw ValidationError("scenario needs exactly two candidates");
  for (const auto& c : s.candidates) {
    if (!(c.leaning_score >= kFacetMin && c.leaning_score <= kFacetMax)) {
      throw ValidationError("candidate '" + c.id + "' leaning outside [0, 99]");
    }
  }
  for (const auto& mix : s.profile) {
    if (mix.engaged < 0 || mix.apathetic < 0 || mix.engaged + mix.apathetic > 1.0 + 1e-12) {
      throw ValidationError("engagement shares must be non-negative and sum to at most 1");
    }
  }
  bool has_personality = false;
  for (const auto& c : s.choices) {
    has_personality |= c.kind == ChoiceKind::Personality;
    for (const auto& e : c.events) {
      bool known = false;
      for (const auto& cand : s.candidates) known |= cand.id == e.candidate_id;
      if (!known) throw ValidationError("choice '" + c.id + "' names unknown candidate '" + e.candidate_id + "'");
      for (const auto& eff : e.effects) {
        if (!registry.contains(eff.type_name)) {
          throw ValidationError("choice '" + c.id + "' uses unknown response type '" + eff.type_name + "'");
        }
        if (!(eff.valence >= -1.0 && eff.valence <= 1.0) || !(eff.magnitude > 0.0 && eff.magnitude <= 1.0)) {
          throw ValidationError("choice '" + c.id + "' has valence or magnitude out of range");
        }
      }
    }
  }
  if (!has_personality) throw ValidationError("scenario offers no personality choice");
  detail::check_play(s);
}

inline Scenario parse_scenario(std::string_view document) {
  const auto lines = text::read_lines(document);
  Scenario s;
  bool named = false;
  std::size_t pos = 0;
  auto expect_args = [](const text::Line& line, const std::vector<text::Token>& t, std::size_t n, const char* usage) {
    if (t.size() != n) text::fail(std::string("expected '") + usage + "'", line.number, line.column);
  };
  while (pos < lines.size()) {
    const auto& line = lines[pos];
    const auto t = text::tokens(line);
    const std::string_view kw = t[0].text;
    if (kw == "scenario") {
      expect_args(line, t, 2, "scenario <name>");
      if (named) text::fail("scenario named twice", line.number, line.column);
      s.name = std::string(t[1].text);
      named = true;
    } else if (kw == "electorate") {
      expect_args(line, t, 2, "electorate <voters>");
      const double n = text::parse_number(t[1], line.number);
      if (n < 5 || n != std::floor(n)) text::fail("electorate must be a whole number >= 5", line.number, t[1].column);
      s.electorate_size = static_cast<std::size_t>(n);
    } else if (kw == "rounds") {
      expect_args(line, t, 2, "rounds <count>");
      const double n = text::parse_number(t[1], line.number);
      if (n < 1 || n != std::floor(n)) text::fail("rounds must be a whole number >= 1", line.number, t[1].column);
      s.rounds = static_cast<int>(n);
    } else if (kw == "candidate") {
      expect_args(line, t, 4, "candidate <id> <conservative|liberal> <leaning>");
      Label label;
      if (t[2].text == "conservative") {
        label = Label::Conservative;
      } else if (t[2].text == "liberal") {
        label = Label::Liberal;
      } else {
        text::fail("candidate label must be conservative or liberal", line.number, t[2].column);
      }
      s.candidates.push_back({std::string(t[1].text), label, text::parse_number(t[3], line.number)});
    } else if (kw == "profile") {
      expect_args(line, t, 4, "profile <block> <engaged share> <apathetic share>");
      auto b = detail::parse_block(t[1].text);
      if (!b) text::fail("unknown block '" + std::string(t[1].text) + "'", line.number, t[1].column);
      s.profile[static_cast<std::size_t>(*b)] = {text::parse_number(t[2], line.number), text::parse_number(t[3], line.number)};
    } else if (kw == "choice") {
      expect_args(line, t, 3, "choice <id> <personality|round>");
      Choice c;
      c.id = std::string(t[1].text);
      if (s.find_choice(c.id) != nullptr) text::fail("duplicate choice '" + c.id + "'", line.number, t[1].column);
      if (t[2].text == "personality") {
        c.kind = ChoiceKind::Personality;
      } else if (t[2].text == "round") {
        c.kind = ChoiceKind::Round;
      } else {
        text::fail("choice kind must be personality or round", line.number, t[2].column);
      }
      bool closed = false;
      for (++pos; pos < lines.size(); ++pos) {
        const auto& inner = lines[pos];
        const auto it = text::tokens(inner);
        if (it[0].text == "end" && it.size() == 1) {
          closed = true;
          break;
        }
        if (it[0].text == "label") {
          if (it.size() < 2) text::fail("label needs text", inner.number, inner.column);
          c.label = text::join(it, 1, it.size());
        } else if (it[0].text == "event") {
          if (it.size() != 5 && !(it.size() == 6 && it[5].text == "sensitive")) {
            text::fail("expected 'event <candidate> <type> <valence> <magnitude> [sensitive]'", inner.number, inner.column);
          }
          EventEffect eff{std::string(it[2].text), text::parse_number(it[3], inner.number),
                          text::parse_number(it[4], inner.number), it.size() == 6};
          // Consecutive effects on the same candidate form one event.
          if (c.events.empty() || c.events.back().candidate_id != it[1].text) {
            c.events.push_back({std::string(it[1].text), {}});
          }
          c.events.back().effects.push_back(std::move(eff));
        } else {
          text::fail("unexpected '" + std::string(it[0].text) + "' inside choice", inner.number, inner.column);
        }
      }
      if (!closed) text::fail("choice '" + c.id + "' is missing 'end'", line.number, line.column);
      if (c.label.empty()) c.label = c.id;
      s.choices.push_back(std::move(c));
    } else if (kw == "play") {
      expect_args(line, t, 2, "play <choice id>");
      s.play.emplace_back(t[1].text);
    } else {
      text::fail("unknown directive '" + std::string(kw) + "'", line.number, line.column);
    }
    ++pos;
  }
  if (!named) throw ParseError("missing 'scenario <name>' line", 1, 1);
  return s;
}

// ---------------------------------------------------------------------------

struct PollRecord {
  std::string round;   // "initial", "personality", "1".."N"
  std::string choice;  // empty for the initial poll
  PollResult poll;

  friend bool operator==(const PollRecord&, const PollRecord&) = default;
};

/// One election from electorate generation to final tally. A single seeded stream drives
/// generation and every poll, so a given seed and choice sequence always replays identically.
class Election {
 public:
  Election(Scenario scenario, const TypeRegistry& registry, ElectionConfig config, std::uint64_t seed)
      : scenario_(std::move(scenario)), registry_(&registry), config_(std::move(config)), rng_(seed), seed_(seed) {
    validate_scenario(scenario_, registry);
    voters_ = generate_electorate(rng_, scenario_.electorate_size, registry, config_, scenario_.profile);
    history_.push_back({"initial", "", poll(voters_, scenario_.candidates, rng_, registry, config_, PollMode::LeaningOnly)});
  }

  const Scenario& scenario() const { return scenario_; }
  const ElectionConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Voter>& voters() const { return voters_; }
  const std::vector<PollRecord>& history() const { return history_; }

  // Round choices played so far (the personality choice is step 0).
  int rounds_played() const { return static_cast<int>(history_.size()) - 2; }

  bool finished() const { return rounds_played() >= scenario_.rounds; }

  std::vector<const Choice*> menu() const {
    std::vector<const Choice*> out;
    if (finished()) return out;
    const bool want_personality = history_.size() == 1;
    for (const auto& c : scenario_.choices) {
      if ((c.kind == ChoiceKind::Personality) != want_personality) continue;
      bool used = false;
      for (const auto& h : history_) used |= h.choice == c.id;
      if (!used) out.push_back(&c);
    }
    return out;
  }

  const PollRecord& apply_choice(std::string_view choice_id) {
    if (finished()) throw ValidationError("election is already final");
    const Choice* chosen = nullptr;
    for (const Choice* c : menu()) {
      if (c->id == choice_id) chosen = c;
    }
    if (chosen == nullptr) throw ValidationError("choice '" + std::string(choice_id) + "' is not on the current menu");
    for (const Event& e : chosen->events) apply_event(voters_, e, scenario_.candidates, *registry_, config_);
    const std::string label = history_.size() == 1 ? "personality" : std::to_string(rounds_played() + 1);
    history_.push_back({label, chosen->id, poll(voters_, scenario_.candidates, rng_, *registry_, config_)});
    return history_.back();
  }

 private:
  Scenario scenario_;
  const TypeRegistry* registry_;
  ElectionConfig config_;
  Rng rng_;
  std::uint64_t seed_;
  std::vector<Voter> voters_;
  std::vector<PollRecord> history_;
};

struct ScenarioRun {
  std::vector<PollRecord> series;  // initial, personality, rounds...
  PollResult final_tally;
  std::vector<Voter> voters;
};

inline ScenarioRun run_scenario(const Scenario& script, const TypeRegistry& registry, std::uint64_t seed,
                                const ElectionConfig& config = {}) {
  if (script.play.empty()) throw ValidationError("scenario '" + script.name + "' has no play sequence");
  Election election(script, registry, config, seed);
  for (const auto& id : script.play) election.apply_choice(id);
  ScenarioRun run{election.history(), election.history().back().poll, election.voters()};
  return run;
}

/// Round series as CSV: header, one row per poll, then a "final" row repeating the last poll.
inline std::string poll_series_csv(const std::vector<PollRecord>& series) {
  std::string out = "round,votes_con,votes_lib,undecided\n";
  auto row = [&out](const std::string& label, const PollResult& p) {
    out += label + "," + std::to_string(p.votes_con) + "," + std::to_string(p.votes_lib) + "," + std::to_string(p.undecided) + "\n";
  };
  for (const auto& r : series) row(r.round, r.poll);
  if (!series.empty()) row("final", series.back().poll);
  return out;
}

}  // namespace exai::election
