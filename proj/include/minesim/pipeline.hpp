#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "minesim/economics.hpp"
#include "minesim/fleet.hpp"
#include "minesim/forest.hpp"
#include "minesim/indicators.hpp"
#include "minesim/ingest.hpp"
#include "minesim/lstm.hpp"
#include "minesim/metrics.hpp"

namespace minesim::pipeline {

struct DateWindows {
  Date analysis_start = std::chrono::year{2016} / 1 / 1;
  Date analysis_end = std::chrono::year{2023} / 9 / 23;
  Date train_start = std::chrono::year{2016} / 1 / 16;
  Date train_end = std::chrono::year{2022} / 12 / 31;
  Date test_start = std::chrono::year{2023} / 1 / 1;
  Date test_end = std::chrono::year{2023} / 12 / 31;
  Date simulation_start = std::chrono::year{2023} / 1 / 1;
  Date simulation_end = std::chrono::year{2023} / 12 / 31;
  ingest::MonthWindow surplus_months;
};

struct RunConfig {
  std::filesystem::path market_path;   ///< as written in the config file
  std::filesystem::path surplus_path;
  std::filesystem::path base_dir;      ///< directory relative paths resolve against
  std::filesystem::path out_dir = "out";
  DateWindows dates;
  forest::ForestParams forest;
  lstm::TrainConfig lstm;
  fleet::MinerSpec miner;
  double loss_rate = fleet::kDefaultLossRate;
  std::vector<int> scenarios{1, 2};
  std::vector<std::string> cases{"actual", "forest", "lstm"};
  std::uint64_t seed = 42;

  [[nodiscard]] std::filesystem::path market_file() const { return base_dir / market_path; }
  [[nodiscard]] std::filesystem::path surplus_file() const { return base_dir / surplus_path; }

  /// Seeds of the two models, derived from the master seed.
  [[nodiscard]] std::uint64_t forest_seed() const;
  [[nodiscard]] std::uint64_t lstm_seed() const;

  /// Effective configuration without the output directory.
  [[nodiscard]] nlohmann::ordered_json to_json() const;
  /// FNV-1a of the compact effective configuration.
  [[nodiscard]] std::string hash() const;
  /// `# minesim config=<hash> seed=<seed>`
  [[nodiscard]] std::string header_line() const;
  [[nodiscard]] nlohmann::ordered_json header_json() const;

  /// Checks date ordering and numeric ranges; throws ValidationError.
  void validate() const;
};

/// Reads a JSON config; missing keys keep their defaults.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::ordered_json& doc, const std::filesystem::path& base_dir);

struct IngestedData {
  ingest::MarketSeries market;  ///< gap-filled, limited to the analysis window
  std::size_t market_rows_read = 0;
  std::size_t gaps_filled = 0;
  std::vector<ingest::SurplusRecord> surplus;
  std::vector<ingest::MonthlySurplusTotal> monthly;
  std::vector<std::string> warnings;
};

struct ModelSplit {
  indicators::FeatureMatrix train;
  indicators::FeatureMatrix test;
};

/// Dated next-day predictions for the test rows of one model.
struct TestPredictions {
  std::vector<Date> dates;  ///< the day each value prices
  std::vector<double> actual;
  std::vector<double> predicted;
};

IngestedData load_inputs(const RunConfig& config);
indicators::FeatureMatrix build_feature_matrix(const RunConfig& config, const IngestedData& data);
/// Rows are assigned by their own date.
ModelSplit split_rows(const RunConfig& config, const indicators::FeatureMatrix& features);

TestPredictions forest_predictions(const forest::ForestModel& model, const indicators::FeatureMatrix& rows);
TestPredictions lstm_predictions(const lstm::LstmModel& model, const indicators::FeatureMatrix& rows);
economics::PriceSeries to_price_series(std::string label, const TestPredictions& predictions);

// Subcommands; each writes its artifacts into config.out_dir.
void cmd_ingest(const RunConfig& config);
void cmd_features(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_simulate(const RunConfig& config);
void cmd_report(const RunConfig& config);
void cmd_run(const RunConfig& config);

}  // namespace minesim::pipeline
