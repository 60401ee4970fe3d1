#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exai/errors.hpp"
#include "exai/facets.hpp"
#include "exai/response_types.hpp"
#include "exai/rng.hpp"
#include "exai/text_format.hpp"

namespace exai {

inline constexpr std::size_t kLevelCount = 5;
inline constexpr int kMaxLevel = 4;

/// Probability mass over response levels 0-4. `escalation` is the share of level 4 that
/// escalates past the scale (e.g. immediately offering help); it is included in mass[4].
struct ResponseDistribution {
  std::array<double, kLevelCount> mass{};
  double escalation = 0.0;

  double total() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }

  // Mass at or above `level`.
  double at_least(int level) const {
    double s = 0.0;
    for (int k = level; k <= kMaxLevel; ++k) s += mass[static_cast<std::size_t>(k)];
    return s;
  }

  friend bool operator==(const ResponseDistribution&, const ResponseDistribution&) = default;
};

struct ResponseOutcome {
  int level = 0;
  bool escalated = false;
  ResponseDistribution distribution;
  std::optional<double> score;  // absent for the random evaluator
};

enum class Method { Random, Dp, Fuzzy };

inline Method parse_method(std::string_view name) {
  if (name == "random") return Method::Random;
  if (name == "dp") return Method::Dp;
  if (name == "fuzzy") return Method::Fuzzy;
  throw ValidationError("unknown evaluation method '" + std::string(name) + "' (expected random, dp or fuzzy)");
}

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::Random: return "random";
    case Method::Dp: return "dp";
    case Method::Fuzzy: return "fuzzy";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Composite score

inline double composite_score(const FacetVector& facets, const ResponseTypeDef& def) {
  if (def.weights().empty()) throw ValidationError("composite score of an empty type");
  double num = 0.0;
  double den = 0.0;
  for (const auto& [facet, w] : def.weights()) {
    const double v = facets[facet];
    // Negative weights count through the reflected value, so low values raise the score.
    num += w > 0.0 ? w * v : -w * (kFacetMax - v);
    den += std::fabs(w);
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Sampling

inline void require_distribution(const ResponseDistribution& d) {
  for (double m : d.mass) {
    if (!(m >= 0.0)) throw ValidationError("negative or NaN response mass");
  }
  if (std::fabs(d.total() - 1.0) > 1e-9) throw ValidationError("response masses do not sum to 1");
  if (!(d.escalation >= 0.0) || d.escalation > d.mass[kMaxLevel] + 1e-12) {
    throw ValidationError("escalation mass exceeds level-4 mass");
  }
}

/// Inverse-CDF draw over levels in ascending order; a second draw decides escalation within level 4.
inline ResponseOutcome sample_outcome(const ResponseDistribution& d, Rng& rng) {
  ResponseOutcome out;
  out.distribution = d;
  const double u = rng.uniform() * d.total();
  double cum = 0.0;
  int level = -1;
  for (int k = 0; k <= kMaxLevel; ++k) {
    cum += d.mass[static_cast<std::size_t>(k)];
    if (u < cum) {
      level = k;
      break;
    }
  }
  if (level < 0) {
    // Rounding left u at the very top: take the highest level with mass.
    for (int k = kMaxLevel; k >= 0; --k) {
      if (d.mass[static_cast<std::size_t>(k)] > 0.0) {
        level = k;
        break;
      }
    }
  }
  out.level = level;
  if (level == kMaxLevel && d.escalation > 0.0) {
    out.escalated = rng.uniform() * d.mass[kMaxLevel] < d.escalation;
  }
  return out;
}

inline ResponseDistribution uniform_distribution() {
  ResponseDistribution d;
  d.mass.fill(1.0 / static_cast<double>(kLevelCount));
  return d;
}

inline ResponseOutcome evaluate_random(Rng& rng) { return sample_outcome(uniform_distribution(), rng); }

/// Rounds to a multiple of 2^-40. Sums and differences of such values in [0, 1] are exact, so
/// distributions built from snapped cumulative masses report at_least() without rounding drift.
inline double snap_to_grid(double v) {
  constexpr double grid = 1099511627776.0;
  return std::clamp(std::round(v * grid) / grid, 0.0, 1.0);
}

/// Distribution from cumulative masses: tail[k] is the mass at or above k, tail[0] == 1, tail[5] == 0.
inline ResponseDistribution from_tails(const std::array<double, kLevelCount + 1>& tail, double escalation = 0.0) {
  ResponseDistribution d;
  for (std::size_t k = 0; k < kLevelCount; ++k) d.mass[k] = tail[k] - tail[k + 1];
  d.escalation = std::min(escalation, d.mass[kMaxLevel]);
  return d;
}

// ---------------------------------------------------------------------------
// Determinism + Probability: an anchored table of distributions, interpolated between rows.

struct DpAnchor {
  double score;
  ResponseDistribution distribution;
};

class DpTable {
 public:
  explicit DpTable(std::vector<DpAnchor> anchors) : anchors_(std::move(anchors)) {
    if (anchors_.size() < 2) throw ValidationError("anchor table needs at least two rows");
    if (anchors_.front().score != kFacetMin || anchors_.back().score != kFacetMax) {
      throw ValidationError("anchor table must start at 0 and end at 99");
    }
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
      if (i > 0 && !(anchors_[i].score > anchors_[i - 1].score)) {
        throw ValidationError("anchor scores must be strictly increasing");
      }
      require_distribution(anchors_[i].distribution);
    }
  }

  const std::vector<DpAnchor>& anchors() const { return anchors_; }

 private:
  std::vector<DpAnchor> anchors_;
};

/// Parses the anchor-table format:
///
///   anchor 86
///     3    0.08
///     4    0.88     # non-escalated part of level 4
///     esc  0.04     # escalated part of level 4
///   end
inline DpTable load_dp_table(std::string_view document) {
  const auto lines = text::read_lines(document);
  std::vector<DpAnchor> anchors;
  std::size_t pos = 0;
  while (pos < lines.size()) {
    const auto& header = lines[pos];
    auto h = text::tokens(header);
    if (h[0].text != "anchor" || h.size() != 2) text::fail("expected 'anchor <score>'", header.number, header.column);
    DpAnchor anchor{text::parse_number(h[1], header.number), {}};
    std::array<bool, kLevelCount + 1> seen{};
    bool closed = false;
    for (++pos; pos < lines.size(); ++pos) {
      const auto& line = lines[pos];
      auto t = text::tokens(line);
      if (t.size() == 1 && t[0].text == "end") {
        closed = true;
        ++pos;
        break;
      }
      if (t.size() != 2) text::fail("expected '<level|esc> <mass>'", line.number, line.column);
      const double m = text::parse_number(t[1], line.number);
      if (!(m >= 0.0 && m <= 1.0)) text::fail("mass outside [0, 1]", line.number, t[1].column);
      std::size_t slot;
      if (t[0].text == "esc") {
        slot = kLevelCount;
      } else {
        const double lv = text::parse_number(t[0], line.number);
        if (lv != std::floor(lv) || lv < 0 || lv > kMaxLevel) text::fail("level must be 0-4 or esc", line.number, t[0].column);
        slot = static_cast<std::size_t>(lv);
      }
      if (seen[slot]) text::fail("level listed twice", line.number, t[0].column);
      seen[slot] = true;
      if (slot == kLevelCount) {
        anchor.distribution.escalation = m;
      } else {
        anchor.distribution.mass[slot] = m;
      }
    }
    if (!closed) text::fail("anchor is missing 'end'", header.number, header.column);
    anchor.distribution.mass[kMaxLevel] += anchor.distribution.escalation;
    anchors.push_back(anchor);
  }
  try {
    return DpTable(std::move(anchors));
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), lines.empty() ? 1 : lines.back().number, 1);
  }
}

inline std::string serialize_dp_table(const DpTable& table) {
  std::string out;
  for (const auto& a : table.anchors()) {
    out += "anchor " + text::fixed(a.score, 3) + "\n";
    for (std::size_t k = 0; k < kLevelCount; ++k) {
      double m = a.distribution.mass[k];
      if (k == kMaxLevel) m -= a.distribution.escalation;
      if (m > 0.0) out += "  " + std::to_string(k) + "    " + text::fixed(m, 6) + "\n";
    }
    if (a.distribution.escalation > 0.0) out += "  esc  " + text::fixed(a.distribution.escalation, 6) + "\n";
    out += "end\n";
  }
  return out;
}

inline ResponseDistribution evaluate_dp(const DpTable& table, double score) {
  if (!(score >= kFacetMin && score <= kFacetMax)) {
    throw ValidationError("score " + std::to_string(score) + " outside [0, 99]");
  }
  const auto& rows = table.anchors();
  std::size_t hi = 1;
  while (hi < rows.size() - 1 && rows[hi].score < score) ++hi;
  const DpAnchor& a = rows[hi - 1];
  const DpAnchor& b = rows[hi];
  if (score == a.score) return a.distribution;
  if (score == b.score) return b.distribution;

  const double t = (score - a.score) / (b.score - a.score);
  std::array<double, kLevelCount + 1> tail{};
  tail[0] = 1.0;
  for (int k = 1; k <= kMaxLevel; ++k) {
    const double lo = a.distribution.at_least(k);
    tail[static_cast<std::size_t>(k)] = snap_to_grid(lo + t * (b.distribution.at_least(k) - lo));
  }
  return from_tails(tail, snap_to_grid(a.distribution.escalation + t * (b.distribution.escalation - a.distribution.escalation)));
}

// ---------------------------------------------------------------------------
// Modified fuzzy pipeline: fuzzify -> positive/negative groups -> 10 Combs rules -> defuzzify.

enum class Flv : std::uint8_t { VeryLow, Low, Average, High, VeryHigh };

inline constexpr std::array<Flv, kLevelCount> kAllFlvs = {Flv::VeryLow, Flv::Low, Flv::Average, Flv::High, Flv::VeryHigh};

inline constexpr std::string_view flv_name(Flv v) {
  constexpr std::array<std::string_view, kLevelCount> names = {"Very Low", "Low", "Average", "High", "Very High"};
  return names[static_cast<std::size_t>(v)];
}

struct FlvMembership {
  std::array<double, kLevelCount> degree{};

  double operator[](Flv v) const { return degree[static_cast<std::size_t>(v)]; }

  double total() const {
    double s = 0.0;
    for (double d : degree) s += d;
    return s;
  }
};

// Peaks of the five linguistic values; neighbours overlap by one full width.
inline constexpr std::array<double, kLevelCount> kFlvPeaks = {10.0, 30.0, 50.0, 70.0, 90.0};
inline constexpr double kFlvWidth = 20.0;

inline FlvMembership fuzzify(double value) {
  if (!(value >= kFacetMin && value <= kFacetMax)) {
    throw ValidationError("value " + std::to_string(value) + " outside [0, 99]");
  }
  FlvMembership m;
  if (value <= kFlvPeaks.front()) {
    m.degree.front() = 1.0;
    return m;
  }
  if (value >= kFlvPeaks.back()) {
    m.degree.back() = 1.0;
    return m;
  }
  std::size_t upper = 1;
  while (kFlvPeaks[upper] < value) ++upper;
  const double hi = (value - kFlvPeaks[upper - 1]) / kFlvWidth;
  m.degree[upper] = hi;
  m.degree[upper - 1] = 1.0 - hi;
  return m;
}

struct GroupMemberships {
  FlvMembership positive;
  FlvMembership negative;
  double positive_share = 0.0;
  double negative_share = 0.0;
};

inline GroupMemberships group_memberships(const FacetVector& facets, const ResponseTypeDef& def) {
  if (def.weights().empty()) throw ValidationError("grouping an empty type");
  GroupMemberships g;
  double pos_w = 0.0;
  double neg_w = 0.0;
  for (const auto& [facet, w] : def.weights()) {
    const double v = facets[facet];
    const FlvMembership m = fuzzify(w > 0.0 ? v : kFacetMax - v);
    FlvMembership& target = w > 0.0 ? g.positive : g.negative;
    const double aw = std::fabs(w);
    for (std::size_t k = 0; k < kLevelCount; ++k) target.degree[k] += aw * m.degree[k];
    (w > 0.0 ? pos_w : neg_w) += aw;
  }
  if (pos_w > 0.0) {
    for (double& d : g.positive.degree) d /= pos_w;
  }
  if (neg_w > 0.0) {
    for (double& d : g.negative.degree) d /= neg_w;
  }
  g.positive_share = pos_w / (pos_w + neg_w);
  g.negative_share = neg_w / (pos_w + neg_w);
  return g;
}

enum class Group : std::uint8_t { Positive, Negative };

// "IF <group> is <flv> THEN level index(flv)": linear in groups x values.
struct CombsRule {
  Group group;
  Flv antecedent;
  int level;
};

inline constexpr std::array<CombsRule, 2 * kLevelCount> kCombsRules = [] {
  std::array<CombsRule, 2 * kLevelCount> rules{};
  std::size_t i = 0;
  for (Group g : {Group::Positive, Group::Negative}) {
    for (std::size_t k = 0; k < kLevelCount; ++k) rules[i++] = {g, static_cast<Flv>(k), static_cast<int>(k)};
  }
  return rules;
}();

struct RuleFiring {
  CombsRule rule;
  double confidence;
};

struct RuleEvaluation {
  std::array<double, kLevelCount> confidence{};
  std::vector<RuleFiring> firings;  // one entry per rule evaluated
};

inline RuleEvaluation apply_rules(const GroupMemberships& groups) {
  const double share_sum = groups.positive_share + groups.negative_share;
  if (std::fabs(share_sum - 1.0) > 1e-9) throw ValidationError("group shares must sum to 1");
  RuleEvaluation out;
  out.firings.reserve(kCombsRules.size());
  for (const CombsRule& r : kCombsRules) {
    const bool pos = r.group == Group::Positive;
    const double c = (pos ? groups.positive_share : groups.negative_share) * (pos ? groups.positive : groups.negative)[r.antecedent];
    out.confidence[static_cast<std::size_t>(r.level)] += c;
    out.firings.push_back({r, c});
  }
  return out;
}

inline ResponseDistribution defuzzify(const std::array<double, kLevelCount>& confidence) {
  double total = 0.0;
  for (double c : confidence) {
    if (!(c >= 0.0)) throw ValidationError("negative rule confidence");
    total += c;
  }
  if (total <= 0.0) throw ValidationError("all rule confidences are zero");
  ResponseDistribution d;
  for (std::size_t k = 0; k < kLevelCount; ++k) d.mass[k] = confidence[k] / total;
  return d;
}

/// Mass at or above `level` (1-4) for one fuzzified value: a ramp between neighbouring peaks.
inline double fuzzy_tail(double value, int level) {
  return std::clamp((value - kFlvPeaks[static_cast<std::size_t>(level - 1)]) / kFlvWidth, 0.0, 1.0);
}

/// defuzzify(apply_rules(group_memberships(...))) computed from cumulative shares on the snap grid.
inline ResponseDistribution evaluate_fuzzy(const FacetVector& facets, const ResponseTypeDef& def) {
  if (def.weights().empty()) throw ValidationError("grouping an empty type");
  std::array<double, kLevelCount> pos{}, neg{};
  double pos_w = 0.0;
  double neg_w = 0.0;
  for (const auto& [facet, w] : def.weights()) {
    const double v = w > 0.0 ? facets[facet] : kFacetMax - facets[facet];
    if (!(v >= kFacetMin && v <= kFacetMax)) throw ValidationError("facet value outside [0, 99]");
    auto& target = w > 0.0 ? pos : neg;
    const double aw = std::fabs(w);
    for (int k = 1; k <= kMaxLevel; ++k) target[static_cast<std::size_t>(k)] += aw * fuzzy_tail(v, k);
    (w > 0.0 ? pos_w : neg_w) += aw;
  }
  const double pos_share = pos_w / (pos_w + neg_w);
  const double neg_share = neg_w / (pos_w + neg_w);
  std::array<double, kLevelCount + 1> tail{};
  tail[0] = 1.0;
  for (std::size_t k = 1; k < kLevelCount; ++k) {
    double t = 0.0;
    if (pos_w > 0.0) t += pos_share * (pos[k] / pos_w);
    if (neg_w > 0.0) t += neg_share * (neg[k] / neg_w);
    tail[k] = snap_to_grid(t);
  }
  return from_tails(tail);
}

// ---------------------------------------------------------------------------

/// Resolves the facets `p` shows toward `actor`, scores `type_name` with `method` and samples one
/// level from the resulting distribution. Never touches the personality.
inline ResponseOutcome evaluate(const Personality& p, const std::optional<std::string>& actor, std::string_view type_name,
                                Method method, const TypeRegistry& registry, const DpTable& dp_table, Rng& rng) {
  if (method == Method::Random) return evaluate_random(rng);
  const ResponseTypeDef& def = registry.get(type_name);
  const FacetVector facets = effective_facets(p, actor);
  const double score = composite_score(facets, def);
  const ResponseDistribution d = method == Method::Dp ? evaluate_dp(dp_table, score) : evaluate_fuzzy(facets, def);
  ResponseOutcome out = sample_outcome(d, rng);
  out.score = score;
  return out;
}

}  // namespace exai
