#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "minesim/common.hpp"
#include "minesim/ingest.hpp"

namespace testing {

inline minesim::Date ymd(int y, unsigned m, unsigned d) {
  return std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("minesim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Market series with consecutive days from `start`, hash rate fixed.
inline minesim::ingest::MarketSeries series_from_prices(const std::vector<double>& prices,
                                                        minesim::Date start = ymd(2021, 1, 1),
                                                        double hashrate = 1.0e8) {
  minesim::ingest::MarketSeries s;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    s.records.push_back({start + std::chrono::days{static_cast<int>(i)}, prices[i], hashrate});
  }
  return s;
}

/// Runs the CLI with `args`; returns the exit status and fills `output` with stdout+stderr.
inline int run_cli(const std::string& args, std::string* output = nullptr) {
  const auto log = std::filesystem::temp_directory_path() / "minesim_cli_output.txt";
  const std::string cmd = std::string(MINESIM_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) *output = read_file(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::filesystem::path source_dir() { return MINESIM_SOURCE_DIR; }

}  // namespace testing
