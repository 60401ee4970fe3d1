#pragma once

// Repeated runs of one scenario across consecutive seeds, summarised the way the
// published three-run results table is read: initial spread, final margin.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "exai/scenario.hpp"

namespace exai::election {

struct RunSummary {
  std::uint64_t seed = 0;
  PollResult initial;
  PollResult final_tally;
  bool rows_conserved = true;  // every poll row summed to the electorate size

  int initial_lib_lead() const { return initial.votes_lib - initial.votes_con; }
  int final_margin() const { return final_tally.votes_con - final_tally.votes_lib; }
};

struct Stats {
  double mean = 0.0;
  int min = 0;
  int max = 0;
};

struct ReproReport {
  std::vector<RunSummary> runs;
  Stats final_margin;
  Stats initial_lib_lead;
};

inline Stats stats_of(const std::vector<int>& xs) {
  Stats s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  return s;
}

inline ReproReport repro_runs(const Scenario& script, const TypeRegistry& registry, const ElectionConfig& config, int runs,
                              std::uint64_t seed_base) {
  if (runs < 1) throw ValidationError("need at least one run");
  ReproReport report;
  std::vector<int> margins;
  std::vector<int> leads;
  for (int i = 0; i < runs; ++i) {
    const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(i);
    const ScenarioRun run = run_scenario(script, registry, seed, config);
    RunSummary s{seed, run.series.front().poll, run.final_tally, true};
    for (const auto& r : run.series) s.rows_conserved &= r.poll.total() == static_cast<int>(script.electorate_size);
    margins.push_back(s.final_margin());
    leads.push_back(s.initial_lib_lead());
    report.runs.push_back(std::move(s));
  }
  report.final_margin = stats_of(margins);
  report.initial_lib_lead = stats_of(leads);
  return report;
}

}  // namespace exai::election
