// minesim: surplus-electricity Bitcoin mining simulator.
//
//   minesim <ingest|features|train|simulate|report|run> --config cfg.json
//           [--seed N] [--cases actual,forest/sim1,...] [--out DIR]
//
// Exit codes: 0 success, 2 validation error, 3 data insufficiency,
// 4 internal error.

#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minesim/common.hpp"
#include "minesim/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInsufficient = 3;
constexpr int kExitInternal = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace minesim;

  CLI::App app{"Surplus-electricity Bitcoin mining simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string cases;
  std::string out_dir;

  const std::map<std::string, std::pair<std::string, std::function<void(const pipeline::RunConfig&)>>> commands{
      {"ingest", {"Validate, clean and align the input datasets", pipeline::cmd_ingest}},
      {"features", {"Compute technical indicators (features.csv)", pipeline::cmd_features}},
      {"train", {"Train the forest and LSTM models and evaluate them", pipeline::cmd_train}},
      {"simulate", {"Plan fleets and simulate revenue, cost and profit", pipeline::cmd_simulate}},
      {"report", {"Render report.txt from simulation outputs", pipeline::cmd_report}},
      {"run", {"ingest, features, train and simulate in sequence", pipeline::cmd_run}},
  };
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--cases", cases, "Comma-separated cases: actual, forest, lstm, optionally /sim1 or /sim2");
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    pipeline::RunConfig config = pipeline::load_config(config_path);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!cases.empty()) {
      config.cases.clear();
      std::stringstream ss(cases);
      std::string token;
      while (std::getline(ss, token, ',')) {
        if (!token.empty()) config.cases.push_back(token);
      }
    }
    config.validate();
    for (const auto& [name, entry] : commands) {
      if (app.got_subcommand(name)) entry.second(config);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kExitInsufficient;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
