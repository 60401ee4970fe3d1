#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exai/errors.hpp"
#include "exai/facets.hpp"
#include "exai/text_format.hpp"

namespace exai {

struct FacetWeight {
  Facet facet;
  double weight;

  friend bool operator==(const FacetWeight&, const FacetWeight&) = default;
};

inline bool is_permitted_weight(double w) { return w == -1.0 || w == -0.5 || w == 0.5 || w == 1.0; }

/// A named stimulus/response type: a signed, weighted combination of facets.
class ResponseTypeDef {
 public:
  ResponseTypeDef() = default;

  ResponseTypeDef(std::string name, std::vector<FacetWeight> weights) : name_(std::move(name)), weights_(std::move(weights)) {
    if (weights_.empty()) throw ValidationError("type '" + name_ + "' has no facets");
    std::array<bool, kFacetCount> seen{};
    for (const auto& fw : weights_) {
      if (seen[index_of(fw.facet)]) {
        throw ValidationError("type '" + name_ + "' lists facet '" + std::string(facet_name(fw.facet)) + "' twice");
      }
      if (!is_permitted_weight(fw.weight)) {
        throw ValidationError("type '" + name_ + "' has illegal weight " + std::to_string(fw.weight));
      }
      seen[index_of(fw.facet)] = true;
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<FacetWeight>& weights() const { return weights_; }

  std::optional<double> weight_of(Facet f) const {
    for (const auto& fw : weights_) {
      if (fw.facet == f) return fw.weight;
    }
    return std::nullopt;
  }

  // Same facets, every weight negated.
  ResponseTypeDef flipped(std::string name) const {
    std::vector<FacetWeight> w = weights_;
    for (auto& fw : w) fw.weight = -fw.weight;
    return ResponseTypeDef(std::move(name), std::move(w));
  }

  friend bool operator==(const ResponseTypeDef&, const ResponseTypeDef&) = default;

 private:
  std::string name_;
  std::vector<FacetWeight> weights_;
};

// ---------------------------------------------------------------------------
// Correlation evidence -> weight (authoring tool).

enum class Strength { None, Moderate, ModHigh, High };

/// Correlations of one facet with a candidate type from up to three sources. The
/// tiebreak source is only consulted when the two numeric sources disagree.
struct CorrelationEvidence {
  Facet facet;
  std::optional<double> r_primary;
  std::optional<double> r_secondary;
  Strength tiebreak = Strength::None;
  int tiebreak_sign = +1;
};

enum class Rating { Excluded, Moderate, ModHigh, High };

struct DerivedWeight {
  Rating rating;
  double weight;  // 0 when excluded
};

inline constexpr double kModerateThreshold = 0.30;
inline constexpr double kHighThreshold = 0.60;

namespace detail {

inline Rating tier_of(double r) {
  const double a = std::fabs(r);
  if (a < kModerateThreshold) return Rating::Excluded;
  if (a < kHighThreshold) return Rating::Moderate;
  return Rating::High;
}

inline Rating tier_of(Strength s) {
  switch (s) {
    case Strength::Moderate: return Rating::Moderate;
    case Strength::ModHigh: return Rating::ModHigh;
    case Strength::High: return Rating::High;
    case Strength::None: break;
  }
  return Rating::Excluded;
}

}  // namespace detail

inline DerivedWeight weight_from_correlations(const CorrelationEvidence& ev) {
  if (!ev.r_primary && !ev.r_secondary && ev.tiebreak == Strength::None) {
    throw ValidationError("correlation evidence for '" + std::string(facet_name(ev.facet)) + "' has no sources");
  }
  for (auto r : {ev.r_primary, ev.r_secondary}) {
    if (r && !(*r >= -1.0 && *r <= 1.0)) throw ValidationError("correlation outside [-1, 1]");
  }

  double signal = ev.r_primary.value_or(0.0) + ev.r_secondary.value_or(0.0);
  if (signal == 0.0) signal = ev.tiebreak_sign;
  const double sign = signal < 0.0 ? -1.0 : 1.0;

  Rating rating;
  if (ev.r_primary && ev.r_secondary) {
    const Rating a = detail::tier_of(*ev.r_primary);
    const Rating b = detail::tier_of(*ev.r_secondary);
    if (a == b) {
      rating = a;
    } else if (a == Rating::High || b == Rating::High) {
      // Split across the 0.60 line.
      rating = ev.tiebreak == Strength::Moderate ? Rating::Moderate : Rating::ModHigh;
    } else if (ev.tiebreak != Strength::None) {
      rating = std::min(detail::tier_of(ev.tiebreak), Rating::ModHigh);
    } else {
      rating = Rating::Moderate;
    }
  } else if (ev.r_primary || ev.r_secondary) {
    rating = detail::tier_of(ev.r_primary ? *ev.r_primary : *ev.r_secondary);
  } else {
    rating = detail::tier_of(ev.tiebreak);
  }

  switch (rating) {
    case Rating::Excluded: return {rating, 0.0};
    case Rating::Moderate: return {rating, 0.5 * sign};
    case Rating::ModHigh:
    case Rating::High: return {rating, 1.0 * sign};
  }
  return {Rating::Excluded, 0.0};
}

// ---------------------------------------------------------------------------
// Registry and its text format:
//
//   type kindness
//     Warmth           +1.0
//     Angry Hostility  -1.0
//   end

class TypeRegistry {
 public:
  void add(ResponseTypeDef def) {
    const std::string name = def.name();
    if (!types_.emplace(name, std::move(def)).second) throw ValidationError("duplicate type '" + name + "'");
  }

  const ResponseTypeDef& get(std::string_view name) const {
    auto it = types_.find(std::string(name));
    if (it == types_.end()) throw NotFoundError("unknown response type '" + std::string(name) + "'");
    return it->second;
  }

  bool contains(std::string_view name) const { return types_.count(std::string(name)) != 0; }

  std::size_t size() const { return types_.size(); }
  bool empty() const { return types_.empty(); }

  auto begin() const { return types_.begin(); }
  auto end() const { return types_.end(); }

  friend bool operator==(const TypeRegistry&, const TypeRegistry&) = default;

 private:
  std::map<std::string, ResponseTypeDef> types_;
};

inline const ResponseTypeDef& get_type(const TypeRegistry& registry, std::string_view name) { return registry.get(name); }

namespace detail {

inline bool valid_type_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
  });
}

}  // namespace detail

/// Parses `type` blocks starting at lines[pos], stopping at the first line that is not a `type`
/// header. Shared with the scenario format, which embeds type blocks.
inline std::size_t parse_type_blocks(const std::vector<text::Line>& lines, std::size_t pos, TypeRegistry& out) {
  while (pos < lines.size()) {
    const auto& header = lines[pos];
    auto toks = text::tokens(header);
    if (toks[0].text != "type") break;
    if (toks.size() != 2) text::fail("expected 'type <name>'", header.number, header.column);
    if (!detail::valid_type_name(toks[1].text)) {
      text::fail("invalid type name '" + std::string(toks[1].text) + "'", header.number, toks[1].column);
    }
    const std::string name(toks[1].text);
    if (out.contains(name)) text::fail("duplicate type '" + name + "'", header.number, toks[1].column);

    std::vector<FacetWeight> weights;
    std::array<bool, kFacetCount> seen{};
    ++pos;
    bool closed = false;
    for (; pos < lines.size(); ++pos) {
      const auto& line = lines[pos];
      auto t = text::tokens(line);
      if (t.size() == 1 && t[0].text == "end") {
        closed = true;
        ++pos;
        break;
      }
      if (t.size() < 2) text::fail("expected '<facet name> <weight>'", line.number, line.column);
      const std::string facet = text::join(t, 0, t.size() - 1);
      auto f = parse_facet(facet);
      if (!f) text::fail("unknown facet '" + facet + "'", line.number, line.column);
      const double w = text::parse_number(t.back(), line.number);
      if (!is_permitted_weight(w)) {
        text::fail("illegal weight " + std::string(t.back().text) + " (allowed: -1.0, -0.5, +0.5, +1.0)", line.number,
                   t.back().column);
      }
      if (seen[index_of(*f)]) text::fail("facet '" + facet + "' listed twice", line.number, line.column);
      seen[index_of(*f)] = true;
      weights.push_back({*f, w});
    }
    if (!closed) text::fail("type '" + name + "' is missing 'end'", header.number, header.column);
    if (weights.empty()) text::fail("type '" + name + "' has no facets", header.number, header.column);
    out.add(ResponseTypeDef(name, std::move(weights)));
  }
  return pos;
}

inline TypeRegistry load_type_definitions(std::string_view document) {
  const auto lines = text::read_lines(document);
  TypeRegistry registry;
  std::size_t pos = parse_type_blocks(lines, 0, registry);
  if (pos != lines.size()) {
    text::fail("expected 'type <name>'", lines[pos].number, lines[pos].column);
  }
  return registry;
}

inline std::string serialize_type(const ResponseTypeDef& def) {
  std::string out = "type " + def.name() + "\n";
  for (const auto& fw : def.weights()) {
    std::string name(facet_name(fw.facet));
    name.resize(std::max<std::size_t>(name.size() + 1, 22), ' ');
    out += "  " + name + text::signed_fixed(fw.weight, 1) + "\n";
  }
  out += "end\n";
  return out;
}

inline std::string serialize_types(const TypeRegistry& registry) {
  std::string out;
  for (const auto& [name, def] : registry) {
    if (!out.empty()) out += "\n";
    out += serialize_type(def);
  }
  return out;
}

}  // namespace exai
