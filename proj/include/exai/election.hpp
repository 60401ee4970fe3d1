#pragma once

// Two-candidate election over an electorate of personality-driven voters.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "exai/drift.hpp"
#include "exai/errors.hpp"
#include "exai/evaluation.hpp"
#include "exai/facets.hpp"
#include "exai/response_types.hpp"
#include "exai/rng.hpp"

namespace exai::election {

enum class Label { Conservative, Liberal };

enum class Block { UltraConservative, LeaningConservative, Neutral, LeaningLiberal, UltraLiberal };

inline constexpr std::array<Block, 5> kAllBlocks = {Block::UltraConservative, Block::LeaningConservative, Block::Neutral,
                                                    Block::LeaningLiberal, Block::UltraLiberal};

enum class Vote { Con, Lib, Undecided };

inline std::string_view label_name(Label l) { return l == Label::Conservative ? "conservative" : "liberal"; }

inline std::string_view block_name(Block b) {
  constexpr std::array<std::string_view, 5> names = {"ultra-conservative", "leaning-conservative", "neutral", "leaning-liberal",
                                                     "ultra-liberal"};
  return names[static_cast<std::size_t>(b)];
}

inline std::string_view vote_name(Vote v) {
  switch (v) {
    case Vote::Con: return "con";
    case Vote::Lib: return "lib";
    case Vote::Undecided: return "undecided";
  }
  return "?";
}

struct LeaningBand {
  double low;
  double high;  // exclusive, except for the top band which includes 99
};

// Leaning 0 is maximally conservative, 99 maximally liberal.
inline constexpr std::array<LeaningBand, 5> kBlockBands = {{{0, 20}, {20, 40}, {40, 60}, {60, 80}, {80, 99}}};

inline Block block_for_leaning(double leaning) {
  for (std::size_t i = 0; i + 1 < kBlockBands.size(); ++i) {
    if (leaning < kBlockBands[i].high) return kAllBlocks[i];
  }
  return Block::UltraLiberal;
}

struct Candidate {
  std::string id;
  Label label;
  double leaning_score;  // [0, 99]
};

struct Voter {
  Personality personality;
  Block block;
};

/// How reliably a block turns out. Engaged voters carry turnout facets that always pass the
/// turnout check, apathetic voters ones that always fail it, and the remainder ("wavering") keep
/// the generic [20, 80] draw and pass probabilistically.
struct EngagementMix {
  double engaged = 0.0;
  double apathetic = 0.0;
};

using ElectorateProfile = std::array<EngagementMix, 5>;

struct ElectionConfig {
  double leaning_weight = 0.4;
  double liking_weight = 0.3;
  double trust_weight = 0.3;
  double decision_threshold = 5.0;
  double neutral_low = 40.0;  // initial poll: leanings inside [low, high] stay undecided
  double neutral_high = 60.0;
  double agree_factor = 1.0;
  double opposed_factor = -0.5;
  double neutral_factor = 0.25;
  std::string leaning_type = "political-leaning";
  std::string turnout_type = "turnout";
  std::string liking_type = "kind";
  std::string trust_type = "trust";
  DriftConfig drift{};
};

// ---------------------------------------------------------------------------

inline double political_leaning(const Voter& v, const TypeRegistry& registry, const ElectionConfig& config = {}) {
  return composite_score(v.personality.base(), registry.get(config.leaning_type));
}

namespace detail {

inline void draw_range(Personality& p, Facet f, Rng& rng, double lo, double hi) { p.set_base(f, rng.uniform(lo, hi)); }

// Places the type's facets around `target` and shifts them together until the composite lands on it.
inline void steer_score(Personality& p, const ResponseTypeDef& def, double target, Rng& rng) {
  for (const auto& [f, w] : def.weights()) {
    const double centre = w > 0.0 ? target : kFacetMax - target;
    p.set_base(f, centre + rng.uniform(-15.0, 15.0));
  }
  for (int iter = 0; iter < 8; ++iter) {
    const double gap = target - composite_score(p.base(), def);
    if (std::fabs(gap) < 1e-9) return;
    for (const auto& [f, w] : def.weights()) p.set_base(f, p.base()[f] + (w > 0.0 ? gap : -gap));
  }
  for (const auto& [f, w] : def.weights()) p.set_base(f, w > 0.0 ? target : kFacetMax - target);
}

inline std::string voter_id(std::size_t i, std::size_t n) {
  const int width = n > 1000 ? 5 : 3;
  char buf[32];
  std::snprintf(buf, sizeof buf, "v%0*zu", width, i);
  return buf;
}

}  // namespace detail

/// Five leaning blocks (n/5 each, remainder to neutral). All facets start uniform in [20, 80];
/// the leaning facets are then steered into the block's band and the turnout facets set by the
/// block's engagement mix.
inline std::vector<Voter> generate_electorate(Rng& rng, std::size_t n, const TypeRegistry& registry,
                                              const ElectionConfig& config = {}, const ElectorateProfile& profile = {}) {
  if (n < 5) throw ValidationError("electorate needs at least 5 voters");
  const ResponseTypeDef& leaning = registry.get(config.leaning_type);
  const ResponseTypeDef& turnout = registry.get(config.turnout_type);

  std::array<std::size_t, 5> sizes;
  sizes.fill(n / 5);
  sizes[static_cast<std::size_t>(Block::Neutral)] += n % 5;

  std::vector<Voter> voters;
  voters.reserve(n);
  for (std::size_t b = 0; b < 5; ++b) {
    const std::size_t size = sizes[b];
    const auto& mix = profile[b];
    const auto engaged = static_cast<std::size_t>(std::lround(mix.engaged * static_cast<double>(size)));
    const auto apathetic = std::min(size - std::min(engaged, size),
                                    static_cast<std::size_t>(std::lround(mix.apathetic * static_cast<double>(size))));
    for (std::size_t i = 0; i < size; ++i) {
      Personality p(detail::voter_id(voters.size(), n), FacetVector{});
      for (Facet f : kAllFacets) detail::draw_range(p, f, rng, 20.0, 80.0);

      if (i < engaged + apathetic) {
        // Engaged: every turnout facet fuzzifies at Average or above. Apathetic: all below Average.
        const bool keen = i < engaged;
        for (const auto& [f, w] : turnout.weights()) {
          const bool high = (w > 0.0) == keen;
          if (keen) {
            detail::draw_range(p, f, rng, high ? 55.0 : 20.0, high ? 80.0 : 44.0);
          } else {
            detail::draw_range(p, f, rng, high ? 71.0 : 20.0, high ? 80.0 : 28.0);
          }
        }
      }

      const LeaningBand band = kBlockBands[b];
      const double target = rng.uniform(band.low + 0.5, band.high - 0.5);
      detail::steer_score(p, leaning, target, rng);
      voters.push_back({std::move(p), kAllBlocks[b]});
    }
  }
  return voters;
}

inline std::vector<Voter> generate_electorate(std::uint64_t seed, std::size_t n, const TypeRegistry& registry,
                                              const ElectionConfig& config = {}, const ElectorateProfile& profile = {}) {
  Rng rng(seed);
  return generate_electorate(rng, n, registry, config, profile);
}

/// Fuzzy evaluation of the turnout type on the voter's own facets; passes at level 2 or above.
inline bool turnout_check(const Voter& v, Rng& rng, const TypeRegistry& registry, const ElectionConfig& config = {}) {
  const ResponseDistribution d = evaluate_fuzzy(v.personality.base(), registry.get(config.turnout_type));
  return sample_outcome(d, rng).level >= 2;
}

// ---------------------------------------------------------------------------

struct VoterPoll {
  std::string voter_id;
  Block block;
  double leaning = 0.0;
  double liking_con = 0.0;
  double liking_lib = 0.0;
  double trust_con = 0.0;
  double trust_lib = 0.0;
  bool turnout_pass = false;
  Vote vote = Vote::Undecided;

  friend bool operator==(const VoterPoll&, const VoterPoll&) = default;
};

struct PollResult {
  int votes_con = 0;
  int votes_lib = 0;
  int undecided = 0;  // includes projected non-voters
  std::vector<VoterPoll> voters;

  int total() const { return votes_con + votes_lib + undecided; }

  friend bool operator==(const PollResult&, const PollResult&) = default;
};

struct CandidatePair {
  Candidate con;
  Candidate lib;
};

inline CandidatePair pair_candidates(const std::vector<Candidate>& candidates) {
  const Candidate* con = nullptr;
  const Candidate* lib = nullptr;
  for (const auto& c : candidates) {
    const Candidate*& slot = c.label == Label::Conservative ? con : lib;
    if (slot != nullptr) throw ValidationError("more than one " + std::string(label_name(c.label)) + " candidate");
    slot = &c;
  }
  if (con == nullptr || lib == nullptr) throw ValidationError("election needs one conservative and one liberal candidate");
  return {*con, *lib};
}

inline double affinity(double leaning, const Candidate& c, double liking, double trust, const ElectionConfig& config) {
  return config.leaning_weight * (kFacetMax - std::fabs(leaning - c.leaning_score)) + config.liking_weight * liking +
         config.trust_weight * trust;
}

namespace detail {

inline VoterPoll score_voter(const Voter& v, const CandidatePair& pair, const TypeRegistry& registry, const ElectionConfig& config) {
  VoterPoll out;
  out.voter_id = v.personality.id();
  out.block = v.block;
  out.leaning = political_leaning(v, registry, config);
  const ResponseTypeDef& liking = registry.get(config.liking_type);
  const ResponseTypeDef& trust = registry.get(config.trust_type);
  const FacetVector toward_con = effective_facets(v.personality, pair.con.id);
  const FacetVector toward_lib = effective_facets(v.personality, pair.lib.id);
  out.liking_con = composite_score(toward_con, liking);
  out.liking_lib = composite_score(toward_lib, liking);
  out.trust_con = composite_score(toward_con, trust);
  out.trust_lib = composite_score(toward_lib, trust);
  return out;
}

inline Vote decide(const VoterPoll& s, const CandidatePair& pair, const ElectionConfig& config) {
  const double con = affinity(s.leaning, pair.con, s.liking_con, s.trust_con, config);
  const double lib = affinity(s.leaning, pair.lib, s.liking_lib, s.trust_lib, config);
  if (con - lib >= config.decision_threshold) return Vote::Con;
  if (lib - con >= config.decision_threshold) return Vote::Lib;
  return Vote::Undecided;
}

}  // namespace detail

/// Turnout gate, then the higher-affinity candidate when the margin reaches the threshold.
inline Vote vote_decision(const Voter& v, const std::vector<Candidate>& candidates, Rng& rng, const TypeRegistry& registry,
                          const ElectionConfig& config = {}) {
  const CandidatePair pair = pair_candidates(candidates);
  if (!turnout_check(v, rng, registry, config)) return Vote::Undecided;
  return detail::decide(detail::score_voter(v, pair, registry, config), pair, config);
}

enum class PollMode {
  LeaningOnly,  // before any candidate is known
  Full,
};

inline PollResult poll(const std::vector<Voter>& voters, const std::vector<Candidate>& candidates, Rng& rng,
                       const TypeRegistry& registry, const ElectionConfig& config = {}, PollMode mode = PollMode::Full) {
  const CandidatePair pair = pair_candidates(candidates);
  PollResult result;
  result.voters.reserve(voters.size());
  for (const Voter& v : voters) {
    VoterPoll s = detail::score_voter(v, pair, registry, config);
    s.turnout_pass = turnout_check(v, rng, registry, config);
    if (!s.turnout_pass) {
      s.vote = Vote::Undecided;
    } else if (mode == PollMode::LeaningOnly) {
      s.vote = s.leaning < config.neutral_low ? Vote::Con : s.leaning > config.neutral_high ? Vote::Lib : Vote::Undecided;
    } else {
      s.vote = detail::decide(s, pair, config);
    }
    switch (s.vote) {
      case Vote::Con: ++result.votes_con; break;
      case Vote::Lib: ++result.votes_lib; break;
      case Vote::Undecided: ++result.undecided; break;
    }
    result.voters.push_back(std::move(s));
  }
  return result;
}

// ---------------------------------------------------------------------------

struct EventEffect {
  std::string type_name;
  double valence = 0.0;
  double magnitude = 1.0;
  bool leaning_sensitive = false;

  friend bool operator==(const EventEffect&, const EventEffect&) = default;
};

struct Event {
  std::string candidate_id;
  std::vector<EventEffect> effects;

  friend bool operator==(const Event&, const Event&) = default;
};

inline double valence_factor(Block voter_block, Label candidate, const ElectionConfig& config) {
  if (voter_block == Block::Neutral) return config.neutral_factor;
  const bool voter_con = voter_block == Block::UltraConservative || voter_block == Block::LeaningConservative;
  return voter_con == (candidate == Label::Conservative) ? config.agree_factor : config.opposed_factor;
}

struct EventSummary {
  std::size_t stimuli_applied = 0;
  double total_abs_offset_change = 0.0;
};

/// Every voter reacts to every effect of the event, with the candidate as the actor.
inline EventSummary apply_event(std::vector<Voter>& voters, const Event& event, const std::vector<Candidate>& candidates,
                                const TypeRegistry& registry, const ElectionConfig& config = {}) {
  const Candidate* cand = nullptr;
  for (const auto& c : candidates) {
    if (c.id == event.candidate_id) cand = &c;
  }
  if (cand == nullptr) throw NotFoundError("event names unknown candidate '" + event.candidate_id + "'");
  for (const auto& e : event.effects) registry.get(e.type_name);

  EventSummary summary;
  for (Voter& v : voters) {
    for (const auto& e : event.effects) {
      const double valence = e.leaning_sensitive ? e.valence * valence_factor(v.block, cand->label, config) : e.valence;
      const DriftReport r = apply_stimulus(v.personality, {e.type_name, cand->id, valence, e.magnitude}, registry, config.drift);
      ++summary.stimuli_applied;
      for (const auto& d : r.deltas) summary.total_abs_offset_change += std::fabs(d.actor_delta);
    }
  }
  return summary;
}

}  // namespace exai::election
