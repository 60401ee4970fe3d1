#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "exai/errors.hpp"
#include "exai/facets.hpp"
#include "exai/response_types.hpp"

namespace exai {

/// How readily each facet moves, from the longitudinal trait-change studies.
class ElasticityTable {
 public:
  ElasticityTable() { values_.fill(0.5); }

  double operator[](Facet f) const { return values_[index_of(f)]; }

  void set(Facet f, double e) {
    if (e != 0.25 && e != 0.5 && e != 0.75 && e != 1.0) throw ValidationError("elasticity must be 0.25, 0.5, 0.75 or 1.0");
    values_[index_of(f)] = e;
  }

 private:
  std::array<double, kFacetCount> values_{};
};

inline ElasticityTable default_elasticity() {
  ElasticityTable t;
  for (Facet f : kAllFacets) {
    switch (factor_of(f)) {
      case Factor::Conscientiousness: t.set(f, 0.75); break;
      case Factor::Extraversion: t.set(f, 0.25); break;
      default: t.set(f, 0.5); break;
    }
  }
  // Social dominance facets vary far more than the rest of Extraversion.
  t.set(Facet::Warmth, 1.0);
  t.set(Facet::Gregariousness, 1.0);
  t.set(Facet::Competence, 1.0);
  return t;
}

struct DriftConfig {
  double base_step = 2.0;  // scale points per unit-magnitude stimulus
  double spillover = 0.1;  // share of the attitude shift that reaches the base personality
  ElasticityTable elasticity = default_elasticity();
};

struct Stimulus {
  std::string type_name;
  std::string actor;
  double valence = 0.0;    // [-1, 1]; sign is the direction the NPC experienced it
  double magnitude = 1.0;  // (0, 1]
};

struct FacetDelta {
  Facet facet;
  double actor_delta;  // applied to the attitude offset, after clamping
  double base_delta;   // applied to the base facet, after clamping
};

struct DriftReport {
  std::string actor;
  std::vector<FacetDelta> deltas;
};

/// Moves the attitude toward `s.actor` by the full step and the base personality by the
/// spillover share of it, for every facet in the stimulus type.
inline DriftReport apply_stimulus(Personality& p, const Stimulus& s, const TypeRegistry& registry, const DriftConfig& config) {
  const ResponseTypeDef& def = registry.get(s.type_name);
  if (!(s.valence >= -1.0 && s.valence <= 1.0)) throw ValidationError("valence outside [-1, 1]");
  if (!(s.magnitude > 0.0 && s.magnitude <= 1.0)) throw ValidationError("magnitude outside (0, 1]");

  DriftReport report{s.actor, {}};
  report.deltas.reserve(def.weights().size());
  if (s.valence == 0.0) {
    for (const auto& fw : def.weights()) report.deltas.push_back({fw.facet, 0.0, 0.0});
    return report;
  }
  OffsetVector& offsets = p.attitude(s.actor);
  for (const auto& [facet, w] : def.weights()) {
    const double delta = s.valence * s.magnitude * w * config.elasticity[facet] * p.change_rate() * config.base_step;
    const double base_delta = config.spillover * delta;
    const double old_offset = offsets[facet];
    offsets.set(facet, old_offset + delta);
    const double old_base = p.base()[facet];
    p.set_base(facet, old_base + base_delta);
    // Unclamped steps are reported as computed rather than as a difference of rounded values.
    const double applied_offset = offsets[facet] == old_offset + delta ? delta : offsets[facet] - old_offset;
    const double applied_base = p.base()[facet] == old_base + base_delta ? base_delta : p.base()[facet] - old_base;
    report.deltas.push_back({facet, applied_offset, applied_base});
  }
  return report;
}

inline void set_change_rate(Personality& p, double multiplier) { p.set_change_rate(multiplier); }

}  // namespace exai
