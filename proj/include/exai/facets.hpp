#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exai/errors.hpp"

namespace exai {

enum class Factor : std::uint8_t { Openness, Conscientiousness, Extraversion, Agreeableness, Neuroticism };

// Ordered as the Five Factor facet listing: six facets per factor.
enum class Facet : std::uint8_t {
  Fantasy,
  Aesthetics,
  Feelings,
  Actions,
  Ideas,
  Values,
  Competence,
  Order,
  Dutifulness,
  AchievementStriving,
  SelfDiscipline,
  Deliberation,
  Warmth,
  Gregariousness,
  Assertiveness,
  Activity,
  ExcitementSeeking,
  PositiveEmotions,
  Trust,
  Straightforwardness,
  Altruism,
  Compliance,
  Modesty,
  TenderMindedness,
  Anxiety,
  AngryHostility,
  Depression,
  SelfConsciousness,
  Impulsiveness,
  Vulnerability,
};

inline constexpr std::size_t kFacetCount = 30;
inline constexpr std::size_t kFactorCount = 5;
inline constexpr double kFacetMin = 0.0;
inline constexpr double kFacetMax = 99.0;
inline constexpr double kOffsetBound = 40.0;
inline constexpr double kDefaultFacetValue = 50.0;

namespace detail {

inline constexpr std::array<std::string_view, kFacetCount> kFacetNames = {
    "Fantasy",       "Aesthetics",     "Feelings",          "Actions",
    "Ideas",         "Values",         "Competence",        "Order",
    "Dutifulness",   "Achievement Striving",                "Self-Discipline",
    "Deliberation",  "Warmth",         "Gregariousness",    "Assertiveness",
    "Activity",      "Excitement Seeking",                  "Positive Emotions",
    "Trust",         "Straightforwardness",                 "Altruism",
    "Compliance",    "Modesty",        "Tender-Mindedness", "Anxiety",
    "Angry Hostility",                 "Depression",        "Self-Consciousness",
    "Impulsiveness", "Vulnerability",
};

inline constexpr std::array<std::string_view, kFactorCount> kFactorNames = {
    "Openness", "Conscientiousness", "Extraversion", "Agreeableness", "Neuroticism"};

}  // namespace detail

constexpr std::size_t index_of(Facet f) { return static_cast<std::size_t>(f); }

constexpr Facet facet_at(std::size_t i) { return static_cast<Facet>(i); }

constexpr Factor factor_of(Facet f) { return static_cast<Factor>(index_of(f) / 6); }

constexpr std::string_view facet_name(Facet f) { return detail::kFacetNames[index_of(f)]; }

constexpr std::string_view factor_name(Factor f) { return detail::kFactorNames[static_cast<std::size_t>(f)]; }

inline constexpr std::array<Facet, kFacetCount> kAllFacets = [] {
  std::array<Facet, kFacetCount> out{};
  for (std::size_t i = 0; i < kFacetCount; ++i) out[i] = facet_at(i);
  return out;
}();

inline std::optional<Facet> parse_facet(std::string_view name) {
  for (std::size_t i = 0; i < kFacetCount; ++i) {
    if (detail::kFacetNames[i] == name) return facet_at(i);
  }
  return std::nullopt;
}

inline Facet require_facet(std::string_view name) {
  if (auto f = parse_facet(name)) return *f;
  throw ValidationError("unknown facet '" + std::string(name) + "'");
}

inline double clamp_facet(double v) { return std::clamp(v, kFacetMin, kFacetMax); }

inline double clamp_offset(double v) { return std::clamp(v, -kOffsetBound, kOffsetBound); }

/// Thirty facet values on the 0-99 scale. Writes clamp, so the range holds at all times.
class FacetVector {
 public:
  FacetVector() { values_.fill(kDefaultFacetValue); }

  static FacetVector filled(double v) {
    FacetVector out;
    out.values_.fill(clamp_facet(v));
    return out;
  }

  double operator[](Facet f) const { return values_[index_of(f)]; }

  void set(Facet f, double v) { values_[index_of(f)] = clamp_facet(v); }

  const std::array<double, kFacetCount>& values() const { return values_; }

  friend bool operator==(const FacetVector&, const FacetVector&) = default;

 private:
  std::array<double, kFacetCount> values_{};
};

/// Per-actor signed offsets layered on the base facets, each held within +/-40.
class OffsetVector {
 public:
  OffsetVector() { values_.fill(0.0); }

  double operator[](Facet f) const { return values_[index_of(f)]; }

  void set(Facet f, double v) { values_[index_of(f)] = clamp_offset(v); }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  friend bool operator==(const OffsetVector&, const OffsetVector&) = default;

 private:
  std::array<double, kFacetCount> values_{};
};

class Personality {
 public:
  Personality() = default;

  Personality(std::string id, FacetVector base) : id_(std::move(id)), base_(base) {}

  const std::string& id() const { return id_; }
  const FacetVector& base() const { return base_; }
  const std::map<std::string, OffsetVector>& attitudes() const { return attitudes_; }
  double change_rate() const { return change_rate_; }

  void set_base(Facet f, double v) { base_.set(f, v); }

  // Creates the actor entry on first use.
  OffsetVector& attitude(const std::string& actor) { return attitudes_[actor]; }

  const OffsetVector* find_attitude(const std::string& actor) const {
    auto it = attitudes_.find(actor);
    return it == attitudes_.end() ? nullptr : &it->second;
  }

  void set_change_rate(double rate) {
    if (!(rate > 0.0)) throw ValidationError("change rate must be positive");
    change_rate_ = rate;
  }

  friend bool operator==(const Personality&, const Personality&) = default;

 private:
  std::string id_;
  FacetVector base_;
  std::map<std::string, OffsetVector> attitudes_;
  double change_rate_ = 1.0;
};

/// Builds a personality from named assignments; unassigned facets sit at the midpoint.
inline Personality new_personality(std::string id, const std::vector<std::pair<std::string, double>>& assignments) {
  FacetVector base;
  std::array<bool, kFacetCount> seen{};
  for (const auto& [name, value] : assignments) {
    Facet f = require_facet(name);
    if (seen[index_of(f)]) throw ValidationError("facet '" + name + "' assigned twice");
    if (!(value >= kFacetMin && value <= kFacetMax)) {
      throw ValidationError("facet '" + name + "' value " + std::to_string(value) + " outside [0, 99]");
    }
    seen[index_of(f)] = true;
    base.set(f, value);
  }
  return Personality(std::move(id), base);
}

/// Base facets shifted by the attitude held toward `actor`; plain base when there is none.
inline FacetVector effective_facets(const Personality& p, const std::optional<std::string>& actor) {
  if (!actor) return p.base();
  const OffsetVector* offsets = p.find_attitude(*actor);
  if (offsets == nullptr) return p.base();
  FacetVector out = p.base();
  for (Facet f : kAllFacets) out.set(f, p.base()[f] + (*offsets)[f]);
  return out;
}

}  // namespace exai
