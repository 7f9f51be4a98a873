#include "doctest.h"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using testing::read_file;
using testing::run_cli;
using testing::scratch_dir;
using testing::write_file;

namespace {

fs::path fixture_config() { return testing::source_dir() / "data" / "fixture" / "config.json"; }

/// Copies the fixture into `dir` with an edited config; returns the config path.
fs::path custom_fixture(const fs::path& dir, auto&& edit) {
  const auto src = testing::source_dir() / "data" / "fixture";
  fs::copy_file(src / "market.csv", dir / "market.csv");
  fs::copy_file(src / "surplus.csv", dir / "surplus.csv");
  auto cfg = nlohmann::ordered_json::parse(read_file(src / "config.json"));
  edit(cfg);
  write_file(dir / "config.json", cfg.dump(2));
  return dir / "config.json";
}

std::string first_line(const fs::path& p) {
  const auto text = read_file(p);
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage and validation errors exit with 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("ingest") == 2);
    CHECK(run_cli("ingest --config /nonexistent/config.json") == 2);
    const auto dir = scratch_dir("cli_bad_dates");
    const auto cfg = custom_fixture(dir, [](auto& c) { c["dates"]["train_end"] = "2023-06-30"; });
    std::string out;
    CHECK(run_cli("ingest --config " + cfg.string() + " --out " + (dir / "out").string(), &out) == 2);
    CHECK(out.find("train") != std::string::npos);
    CHECK(run_cli("simulate --config " + fixture_config().string() + " --cases bogus --out " +
                  (dir / "out").string()) == 2);
  }

  TEST_CASE("a corrupt market row names its line") {
    const auto dir = scratch_dir("cli_corrupt");
    const auto cfg = custom_fixture(dir, [](auto&) {});
    auto text = read_file(dir / "market.csv");
    const auto pos = text.find("2021-01-05");
    text.replace(text.find(',', pos) + 1, 1, "x");
    write_file(dir / "market.csv", text);
    std::string out;
    CHECK(run_cli("ingest --config " + cfg.string() + " --out " + (dir / "out").string(), &out) == 2);
    CHECK(out.find("market.csv:6") != std::string::npos);
  }

  TEST_CASE("too little market data exits with 3") {
    const auto dir = scratch_dir("cli_short");
    const auto cfg = custom_fixture(dir, [](auto& c) {
      c["dates"] = {{"analysis_start", "2023-01-01"}, {"analysis_end", "2023-01-10"},
                    {"train_start", "2023-01-01"},    {"train_end", "2023-01-05"},
                    {"test_start", "2023-01-06"},     {"test_end", "2023-01-10"},
                    {"simulation_start", "2023-01-06"}, {"simulation_end", "2023-01-10"}};
    });
    std::string out;
    CHECK(run_cli("features --config " + cfg.string() + " --out " + (dir / "out").string(), &out) == 3);
  }

  TEST_CASE("ingest is idempotent and reports no gaps") {
    const auto dir = scratch_dir("cli_ingest");
    const auto a = dir / "a";
    const auto b = dir / "b";
    REQUIRE(run_cli("ingest --config " + fixture_config().string() + " --out " + a.string()) == 0);
    REQUIRE(run_cli("ingest --config " + fixture_config().string() + " --out " + b.string()) == 0);
    CHECK(read_file(a / "ingest_summary.txt").find("gaps filled: 0") != std::string::npos);
    for (const auto& f : {"market_clean.csv", "surplus_monthly.csv", "ingest_summary.txt", "config.json"}) {
      CHECK(read_file(a / f) == read_file(b / f));
    }
  }

  TEST_CASE("actual-only simulation needs no models") {
    const auto dir = scratch_dir("cli_actual_only");
    const auto out = dir / "out";
    REQUIRE(run_cli("simulate --config " + fixture_config().string() + " --cases actual --out " + out.string()) == 0);
    const auto report = read_file(out / "report.txt");
    CHECK(report.find("Actual / Sim1") != std::string::npos);
    CHECK(report.find("Actual / Sim2") != std::string::npos);
    CHECK(report.find("RF /") == std::string::npos);
    CHECK(run_cli("simulate --config " + fixture_config().string() + " --cases forest/sim1 --out " +
                  (dir / "empty").string()) == 2);
  }

  TEST_CASE("full run matches the golden report") {
    const auto dir = scratch_dir("cli_full");
    const auto out = dir / "out";
    std::string stdout_text;
    REQUIRE(run_cli("run --config " + fixture_config().string() + " --out " + out.string(), &stdout_text) == 0);
    const auto golden = read_file(testing::source_dir() / "tests" / "golden" / "report.txt");
    CHECK(read_file(out / "report.txt") == golden);
    CHECK(stdout_text == golden);

    const std::string header = first_line(out / "report.txt");
    CHECK(header.rfind("# minesim config=", 0) == 0);
    for (const auto& entry : fs::directory_iterator(out)) {
      if (entry.path().extension() == ".json") {
        const auto doc = nlohmann::ordered_json::parse(read_file(entry.path()));
        CHECK(doc.begin().key() == "header");
      } else {
        CHECK(first_line(entry.path()) == header);
      }
    }

    const auto loss = read_file(out / "lstm_loss.csv");
    CHECK(std::count(loss.begin(), loss.end(), '\n') == 2 + 20);
    const auto eval = read_file(out / "eval.csv");
    CHECK(eval.find("forest,test,") != std::string::npos);
    CHECK(eval.find("lstm,test,") != std::string::npos);

    REQUIRE(run_cli("train --config " + fixture_config().string() + " --out " + out.string()) == 0);
    CHECK(read_file(out / "eval.csv") == eval);

    REQUIRE(run_cli("run --config " + fixture_config().string() + " --seed 7 --out " + (dir / "seed7").string()) == 0);
    CHECK(first_line(dir / "seed7" / "report.txt") != header);
    CHECK(read_file(dir / "seed7" / "eval.csv") != eval);
  }
}
