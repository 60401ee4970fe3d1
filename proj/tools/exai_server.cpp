#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exai/engine.hpp"
#include "exai/service_http.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Election session service", "exai_server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> config_path;
  std::optional<std::string> snapshot_dir;
  std::vector<std::string> scenario_files;
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port)->capture_default_str();
  app.add_option("--config", config_path, "Engine config JSON");
  app.add_option("--snapshot-dir", snapshot_dir, "Save every session's voters here after each change");
  app.add_option("--scenario", scenario_files, "Extra scenario templates");
  CLI11_PARSE(app, argc, argv);

  try {
    const exai::EngineConfig cfg =
        exai::discover_engine_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
    std::vector<exai::election::Scenario> templates{exai::favorable_conservative_scenario()};
    for (const auto& f : scenario_files) templates.push_back(exai::election::parse_scenario(exai::read_file(f)));
    std::optional<std::filesystem::path> snap;
    if (snapshot_dir) snap = *snapshot_dir;
    exai::service::SessionStore store(cfg.registry(), cfg.election, std::move(templates), snap, cfg.seal_key());

    httplib::Server server;
    exai::service::bind_routes(server, store);
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
      std::cerr << "exai_server: cannot listen on " << host << ":" << port << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "exai_server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
