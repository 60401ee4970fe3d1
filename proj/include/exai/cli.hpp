#pragma once

// The `exai` command line. Machine-readable output (CSV, the eval line, repro lines) goes to
// `out`; progress and summaries meant for people go to `err`.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exai/drift.hpp"
#include "exai/engine.hpp"
#include "exai/evaluation.hpp"
#include "exai/persistence.hpp"
#include "exai/repro.hpp"
#include "exai/rng.hpp"
#include "exai/scenario.hpp"

namespace exai::cli {

inline std::string sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

/// `level=3 escalated=false score=72.875 distribution={2: 0.075, 3: 0.70625} escalation=0`
inline std::string format_outcome(const ResponseOutcome& o) {
  std::string s = "level=" + std::to_string(o.level) + " escalated=" + (o.escalated ? "true" : "false");
  s += " score=" + (o.score ? sig6(*o.score) : std::string("none"));
  s += " distribution={";
  bool first = true;
  for (int k = 0; k <= kMaxLevel; ++k) {
    const double m = o.distribution.mass[static_cast<std::size_t>(k)];
    if (m == 0.0) continue;
    if (!first) s += ", ";
    s += std::to_string(k) + ": " + sig6(m);
    first = false;
  }
  s += "} escalation=" + sig6(o.distribution.escalation);
  return s;
}

inline std::string tally(const election::PollResult& p) {
  return std::to_string(p.votes_con) + "/" + std::to_string(p.votes_lib) + "/" + std::to_string(p.undecided);
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Personality engine and election simulator", "exai"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "Engine config JSON (else $EXAI_CONFIG, else ./exai.json)");

  // run
  auto* run = app.add_subcommand("run", "Run a scenario script and write the poll series as CSV");
  std::optional<std::string> run_script;
  std::uint64_t run_seed = 1;
  std::optional<std::string> run_out;
  run->add_option("script", run_script, "Scenario file (default: the shipped favorable-conservative script)");
  run->add_option("--seed", run_seed, "Electorate and polling seed");
  run->add_option("-o,--out", run_out, "CSV output path (default: standard output)");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate one response type for a stored personality");
  std::string ev_file, ev_type, ev_method = "fuzzy";
  std::optional<std::string> ev_actor;
  std::uint64_t ev_seed = 1;
  ev->add_option("personality", ev_file, "Personality file (.exai.xml or .exai.sealed)")->required();
  ev->add_option("-t,--type", ev_type, "Response type name")->required();
  ev->add_option("-m,--method", ev_method, "random, dp or fuzzy")->capture_default_str();
  ev->add_option("-a,--actor", ev_actor, "Resolve facets toward this actor");
  ev->add_option("--seed", ev_seed, "Sampling seed");

  // repro-table3
  auto* rep = app.add_subcommand("repro-table3", "Run the favorable-conservative script across consecutive seeds");
  int rep_runs = 3;
  std::uint64_t rep_base = 1;
  rep->add_option("-n,--runs", rep_runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  rep->add_option("--seed-base", rep_base, "First seed; run i uses seed-base + i")->capture_default_str();

  // inspect
  auto* ins = app.add_subcommand("inspect", "Show a stored personality");
  std::string ins_file;
  std::optional<std::string> ins_actor;
  ins->add_option("personality", ins_file, "Personality file")->required();
  ins->add_option("-a,--actor", ins_actor, "Show effective facets toward this actor");

  // drift
  auto* dr = app.add_subcommand("drift", "Apply one stimulus to a stored personality and save it");
  std::string dr_file, dr_type, dr_actor;
  double dr_valence = 1.0, dr_magnitude = 1.0;
  std::optional<std::string> dr_out;
  dr->add_option("personality", dr_file, "Personality file")->required();
  dr->add_option("-t,--type", dr_type, "Stimulus type")->required();
  dr->add_option("-a,--actor", dr_actor, "Actor causing the stimulus")->required();
  dr->add_option("--valence", dr_valence, "In [-1, 1]")->capture_default_str();
  dr->add_option("--magnitude", dr_magnitude, "In (0, 1]")->capture_default_str();
  dr->add_option("-o,--out", dr_out, "Write here instead of updating the file in place");

  // types
  auto* ty = app.add_subcommand("types", "List response types, or show one");
  std::optional<std::string> ty_name;
  ty->add_option("name", ty_name, "Type to print in file syntax");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const EngineConfig cfg = discover_engine_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
    const TypeRegistry registry = cfg.registry();

    if (*run) {
      const election::Scenario script =
          run_script ? election::parse_scenario(read_file(*run_script)) : favorable_conservative_scenario();
      const auto result = election::run_scenario(script, registry, run_seed, cfg.election);
      const std::string csv = election::poll_series_csv(result.series);
      std::ostream& human = run_out ? out : err;
      if (run_out) {
        write_file(*run_out, csv);
      } else {
        out << csv;
      }
      human << "final tally (con/lib/undecided): " << tally(result.final_tally)
            << "  margin: " << result.final_tally.votes_con - result.final_tally.votes_lib << "\n";
      return 0;
    }

    if (*ev) {
      const Method method = parse_method(ev_method);
      const Personality p = load_personality(ev_file, cfg.seal_key());
      Rng rng(ev_seed);
      out << format_outcome(evaluate(p, ev_actor, ev_type, method, registry, cfg.dp_table(), rng)) << "\n";
      return 0;
    }

    if (*rep) {
      const auto report = election::repro_runs(favorable_conservative_scenario(), registry, cfg.election, rep_runs, rep_base);
      for (const auto& r : report.runs) {
        out << "run seed=" << r.seed << " initial=" << tally(r.initial) << " final=" << tally(r.final_tally)
            << " lib_lead=" << r.initial_lib_lead() << " margin=" << r.final_margin()
            << " conserved=" << (r.rows_conserved ? "yes" : "no") << "\n";
      }
      if (rep_runs > 1) {
        auto line = [&out](const char* name, const election::Stats& s) {
          out << name << " mean=" << sig6(s.mean) << " min=" << s.min << " max=" << s.max << "\n";
        };
        line("final_margin", report.final_margin);
        line("initial_lib_lead", report.initial_lib_lead);
      }
      return 0;
    }

    if (*ins) {
      const Personality p = load_personality(ins_file, cfg.seal_key());
      const FacetVector facets = effective_facets(p, ins_actor);
      out << "id: " << p.id() << "\nchange rate: " << text::fixed(p.change_rate(), 3) << "\n";
      if (ins_actor) out << "toward: " << *ins_actor << (p.find_attitude(*ins_actor) ? "" : " (no attitude entry)") << "\n";
      for (Facet f : kAllFacets) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %-18s %-22s %8.3f\n", std::string(factor_name(factor_of(f))).c_str(),
                      std::string(facet_name(f)).c_str(), facets[f]);
        out << buf;
      }
      out << "attitudes:";
      if (p.attitudes().empty()) out << " none";
      for (const auto& [actor, _] : p.attitudes()) out << " " << actor;
      out << "\n";
      return 0;
    }

    if (*dr) {
      const std::optional<std::string> key = cfg.seal_key();
      Personality p = load_personality(dr_file, key);
      const DriftReport report = apply_stimulus(p, {dr_type, dr_actor, dr_valence, dr_magnitude}, registry, cfg.drift);
      const std::filesystem::path target = dr_out ? std::filesystem::path(*dr_out) : std::filesystem::path(dr_file);
      const std::string name = target.filename().string();
      save_personality(p, target, name.ends_with(kSealedSuffix) ? key : std::nullopt);
      for (const auto& d : report.deltas) {
        out << facet_name(d.facet) << " actor_delta=" << text::signed_fixed(d.actor_delta, 3)
            << " base_delta=" << text::signed_fixed(d.base_delta, 3) << "\n";
      }
      err << "saved " << target.string() << "\n";
      return 0;
    }

    if (*ty) {
      if (ty_name) {
        out << serialize_type(registry.get(*ty_name));
      } else {
        for (const auto& [name, def] : registry) out << name << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "exai: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(std::move(args), out, err);
}

}  // namespace exai::cli
