#include "minesim/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "minesim/rng.hpp"

namespace minesim::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

template <typename T>
T value_or(const ordered_json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  return obj.at(key).get<T>();
}

Date date_or(const ordered_json& obj, const char* key, Date fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return parse_date(obj.at(key).get<std::string>());
}

std::optional<std::size_t> optional_size(const ordered_json& obj, const char* key,
                                         std::optional<std::size_t> fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (obj.at(key).is_null()) return std::nullopt;
  return obj.at(key).get<std::size_t>();
}

ordered_json optional_json(const std::optional<std::size_t>& v) { return v ? ordered_json(*v) : ordered_json(); }

std::ofstream open_output(const RunConfig& config, const char* name) {
  fs::create_directories(config.out_dir);
  std::ofstream out(config.out_dir / name, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", (config.out_dir / name).string()));
  return out;
}

void write_json_file(const RunConfig& config, const char* name, const ordered_json& body, const char* key) {
  ordered_json doc;
  doc["header"] = config.header_json();
  doc[key] = body;
  auto out = open_output(config, name);
  out << doc.dump() << '\n';
}

ordered_json read_json_file(const fs::path& path, const char* key) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("missing model file {}", path.string()));
  try {
    return ordered_json::parse(in).at(key);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void echo_config(const RunConfig& config) { write_json_file(config, "config.json", config.to_json(), "config"); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Cents parse_cents(const std::string& text) {
  const bool negative = !text.empty() && text.front() == '-';
  const std::string body = negative ? text.substr(1) : text;
  const auto dot = body.find('.');
  if (dot == std::string::npos || body.size() - dot != 3) {
    throw ValidationError(fmt::format("invalid money value '{}'", text));
  }
  const std::int64_t whole = parse_int(body.substr(0, dot));
  const std::int64_t frac = parse_int(body.substr(dot + 1));
  const std::int64_t cents = whole * 100 + frac;
  return {negative ? -cents : cents};
}

struct CaseRequest {
  std::string source;
  int scenario;
};

std::vector<CaseRequest> requested_cases(const RunConfig& config) {
  std::vector<CaseRequest> out;
  const auto add = [&](const std::string& source, int scenario) {
    const bool known = std::any_of(out.begin(), out.end(), [&](const CaseRequest& c) {
      return c.source == source && c.scenario == scenario;
    });
    if (!known) out.push_back({source, scenario});
  };
  for (const auto& token : config.cases) {
    const auto slash = token.find('/');
    const std::string source = token.substr(0, slash);
    if (source != "actual" && source != "forest" && source != "lstm") {
      throw ValidationError(fmt::format("unknown case '{}' (expected actual, forest or lstm)", token));
    }
    if (slash == std::string::npos) {
      for (int s : config.scenarios) add(source, s);
    } else {
      const std::string sim = token.substr(slash + 1);
      if (sim != "sim1" && sim != "sim2") throw ValidationError(fmt::format("unknown scenario in case '{}'", token));
      add(source, sim == "sim1" ? 1 : 2);
    }
  }
  return out;
}

void write_predictions_csv(const RunConfig& config, const TestPredictions& rf, const TestPredictions& lstm) {
  std::map<Date, std::pair<std::optional<double>, std::optional<double>>> by_date;
  std::map<Date, double> actual;
  for (std::size_t i = 0; i < rf.dates.size(); ++i) {
    by_date[rf.dates[i]].first = rf.predicted[i];
    actual[rf.dates[i]] = rf.actual[i];
  }
  for (std::size_t i = 0; i < lstm.dates.size(); ++i) {
    by_date[lstm.dates[i]].second = lstm.predicted[i];
    actual[lstm.dates[i]] = lstm.actual[i];
  }
  auto out = open_output(config, "predictions.csv");
  out << config.header_line() << '\n' << "date,actual,forest,lstm\n";
  for (const auto& [date, pair] : by_date) {
    out << format_date(date) << ',' << format_double(actual[date]) << ','
        << (pair.first ? format_double(*pair.first) : "") << ',' << (pair.second ? format_double(*pair.second) : "")
        << '\n';
  }
}

}  // namespace

std::uint64_t RunConfig::forest_seed() const { return substream_seed(seed, 1); }
std::uint64_t RunConfig::lstm_seed() const { return substream_seed(seed, 2); }

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["market"] = market_path.generic_string();
  j["surplus"] = surplus_path.generic_string();
  j["seed"] = seed;
  j["dates"] = {
      {"analysis_start", format_date(dates.analysis_start)},
      {"analysis_end", format_date(dates.analysis_end)},
      {"train_start", format_date(dates.train_start)},
      {"train_end", format_date(dates.train_end)},
      {"test_start", format_date(dates.test_start)},
      {"test_end", format_date(dates.test_end)},
      {"simulation_start", format_date(dates.simulation_start)},
      {"simulation_end", format_date(dates.simulation_end)},
  };
  j["surplus_months"] = {{"first", format_year_month(dates.surplus_months.first)},
                         {"last", format_year_month(dates.surplus_months.last)}};
  j["forest"] = {{"n_trees", forest.n_trees},
                 {"m_try", optional_json(forest.m_try)},
                 {"min_samples_leaf", forest.min_samples_leaf},
                 {"max_depth", optional_json(forest.max_depth)}};
  j["lstm"] = {{"epochs", lstm.epochs},         {"window", lstm.window},
               {"hidden_size", lstm.hidden_size}, {"learning_rate", lstm.learning_rate},
               {"clip_norm", lstm.clip_norm},   {"batch_size", lstm.batch_size}};
  j["miner"] = {{"name", miner.name},
                {"hashrate_ths", miner.hashrate_ths},
                {"power_w", miner.power_w},
                {"efficiency_j_per_th", miner.efficiency_j_per_th},
                {"unit_price_usd", miner.unit_price_usd},
                {"lifespan_months", miner.lifespan_months}};
  j["loss_rate"] = loss_rate;
  j["scenarios"] = scenarios;
  j["cases"] = cases;
  return j;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

std::string RunConfig::header_line() const { return fmt::format("# minesim config={} seed={}", hash(), seed); }

ordered_json RunConfig::header_json() const { return {{"generator", "minesim"}, {"config", hash()}, {"seed", seed}}; }

void RunConfig::validate() const {
  const auto& d = dates;
  if (d.train_start > d.train_end) throw ValidationError("train_start is after train_end");
  if (!(d.train_end < d.test_start)) throw ValidationError("train_end must precede test_start");
  if (d.test_start > d.test_end) throw ValidationError("test_start is after test_end");
  if (d.analysis_start > d.train_start) throw ValidationError("train_start precedes analysis_start");
  if (d.simulation_start < d.test_start || d.simulation_end > d.test_end || d.simulation_start > d.simulation_end) {
    throw ValidationError("simulation range must lie within the test range");
  }
  if (d.surplus_months.first > d.surplus_months.last) throw ValidationError("surplus month window is empty");
  if (!(loss_rate >= 0.0 && loss_rate < 1.0)) throw ValidationError("loss_rate must be in [0, 1)");
  if (scenarios.empty()) throw ValidationError("no scenarios selected");
  for (int s : scenarios) {
    if (s != 1 && s != 2) throw ValidationError(fmt::format("unknown scenario {}", s));
  }
  if (forest.n_trees < 1) throw ValidationError("forest n_trees must be >= 1");
  if (forest.min_samples_leaf < 1) throw ValidationError("forest min_samples_leaf must be >= 1");
  lstm.validate();
  miner.validate();
  requested_cases(*this);
}

RunConfig config_from_json(const ordered_json& doc, const fs::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  try {
    c.market_path = value_or<std::string>(doc, "market", "market.csv");
    c.surplus_path = value_or<std::string>(doc, "surplus", "surplus.csv");
    c.out_dir = value_or<std::string>(doc, "out", "out");
    c.seed = value_or<std::uint64_t>(doc, "seed", c.seed);

    const ordered_json dates = doc.value("dates", ordered_json::object());
    auto& d = c.dates;
    d.analysis_start = date_or(dates, "analysis_start", d.analysis_start);
    d.analysis_end = date_or(dates, "analysis_end", d.analysis_end);
    d.train_start = date_or(dates, "train_start", d.train_start);
    d.train_end = date_or(dates, "train_end", d.train_end);
    d.test_start = date_or(dates, "test_start", d.test_start);
    d.test_end = date_or(dates, "test_end", d.test_end);
    d.simulation_start = date_or(dates, "simulation_start", d.simulation_start);
    d.simulation_end = date_or(dates, "simulation_end", d.simulation_end);
    const ordered_json months = doc.value("surplus_months", ordered_json::object());
    if (months.contains("first")) d.surplus_months.first = parse_year_month(months.at("first").get<std::string>());
    if (months.contains("last")) d.surplus_months.last = parse_year_month(months.at("last").get<std::string>());

    const ordered_json f = doc.value("forest", ordered_json::object());
    c.forest.n_trees = value_or<std::size_t>(f, "n_trees", c.forest.n_trees);
    c.forest.m_try = optional_size(f, "m_try", c.forest.m_try);
    c.forest.min_samples_leaf = value_or<std::size_t>(f, "min_samples_leaf", c.forest.min_samples_leaf);
    c.forest.max_depth = optional_size(f, "max_depth", c.forest.max_depth);

    const ordered_json l = doc.value("lstm", ordered_json::object());
    c.lstm.epochs = value_or<std::size_t>(l, "epochs", c.lstm.epochs);
    c.lstm.window = value_or<std::size_t>(l, "window", c.lstm.window);
    c.lstm.hidden_size = value_or<std::size_t>(l, "hidden_size", c.lstm.hidden_size);
    c.lstm.learning_rate = value_or<double>(l, "learning_rate", c.lstm.learning_rate);
    c.lstm.clip_norm = value_or<double>(l, "clip_norm", c.lstm.clip_norm);
    c.lstm.batch_size = value_or<std::size_t>(l, "batch_size", c.lstm.batch_size);

    const ordered_json m = doc.value("miner", ordered_json::object());
    c.miner.name = value_or<std::string>(m, "name", c.miner.name);
    c.miner.hashrate_ths = value_or<double>(m, "hashrate_ths", c.miner.hashrate_ths);
    c.miner.power_w = value_or<double>(m, "power_w", c.miner.power_w);
    c.miner.efficiency_j_per_th = value_or<double>(m, "efficiency_j_per_th", c.miner.efficiency_j_per_th);
    c.miner.unit_price_usd = value_or<double>(m, "unit_price_usd", c.miner.unit_price_usd);
    c.miner.lifespan_months = value_or<std::int64_t>(m, "lifespan_months", c.miner.lifespan_months);

    c.loss_rate = value_or<double>(doc, "loss_rate", c.loss_rate);
    c.scenarios = value_or<std::vector<int>>(doc, "scenarios", c.scenarios);
    c.cases = value_or<std::vector<std::string>>(doc, "cases", c.cases);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid config: {}", e.what()));
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open config '{}'", path.string()));
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
  RunConfig c = config_from_json(doc, path.parent_path());
  if (c.out_dir.is_relative()) c.out_dir = path.parent_path() / c.out_dir;
  return c;
}

IngestedData load_inputs(const RunConfig& config) {
  for (const auto& p : {config.market_file(), config.surplus_file()}) {
    if (!fs::exists(p)) throw ValidationError(fmt::format("input file {} does not exist", p.string()));
  }
  IngestedData data;
  const ingest::MarketSeries raw = ingest::parse_market_csv(config.market_file());
  data.market_rows_read = raw.size();

  const Date window_end = std::max(config.dates.test_end, config.dates.simulation_end);
  const ingest::MarketSeries window = raw.slice(config.dates.analysis_start, window_end);
  if (window.size() < 2) {
    throw InsufficientDataError(fmt::format("market data has {} rows within {}..{}", window.size(),
                                            format_date(config.dates.analysis_start), format_date(window_end)));
  }
  ingest::FillResult filled = ingest::fill_gaps(window, config.dates.analysis_start);
  if (filled.series.end() < window_end) {
    throw InsufficientDataError(fmt::format("market data ends {} but {} is required",
                                            format_date(filled.series.end()), format_date(window_end)));
  }
  data.market = std::move(filled.series);
  data.gaps_filled = filled.filled;

  ingest::SurplusData surplus = ingest::parse_surplus_csv(config.surplus_file(), config.dates.surplus_months);
  data.surplus = std::move(surplus.records);
  data.warnings = std::move(surplus.warnings);
  data.monthly = ingest::monthly_totals(data.surplus);
  return data;
}

indicators::FeatureMatrix build_feature_matrix(const RunConfig&, const IngestedData& data) {
  return indicators::build_features(data.market);
}

ModelSplit split_rows(const RunConfig& config, const indicators::FeatureMatrix& features) {
  ModelSplit split{features.slice(config.dates.train_start, config.dates.train_end),
                   features.slice(config.dates.test_start, config.dates.test_end)};
  if (split.train.size() < 2) {
    throw InsufficientDataError(fmt::format("only {} training rows", split.train.size()));
  }
  if (split.test.size() < 2) {
    throw InsufficientDataError(fmt::format("only {} test rows", split.test.size()));
  }
  return split;
}

TestPredictions forest_predictions(const forest::ForestModel& model, const indicators::FeatureMatrix& rows) {
  TestPredictions out;
  for (const auto& row : rows.rows) {
    const auto x = row.features();
    out.dates.push_back(row.date + std::chrono::days{1});
    out.actual.push_back(row.target_price);
    out.predicted.push_back(model.predict(x));
  }
  return out;
}

TestPredictions lstm_predictions(const lstm::LstmModel& model, const indicators::FeatureMatrix& rows) {
  TestPredictions out;
  const auto predicted = lstm::predict_series(model, rows.rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!predicted[i]) continue;
    out.dates.push_back(rows.rows[i].date + std::chrono::days{1});
    out.actual.push_back(rows.rows[i].target_price);
    out.predicted.push_back(*predicted[i]);
  }
  return out;
}

economics::PriceSeries to_price_series(std::string label, const TestPredictions& predictions) {
  economics::PriceSeries series{std::move(label), {}};
  for (std::size_t i = 0; i < predictions.dates.size(); ++i) {
    series.prices[predictions.dates[i]] = predictions.predicted[i];
  }
  return series;
}

void cmd_ingest(const RunConfig& config) {
  const IngestedData data = load_inputs(config);
  echo_config(config);
  {
    auto out = open_output(config, "market_clean.csv");
    out << config.header_line() << '\n';
    ingest::write_market_csv(out, data.market);
  }
  {
    auto out = open_output(config, "surplus_monthly.csv");
    out << config.header_line() << '\n' << "month,total_kwh,daily_kwh\n";
    for (const auto& m : data.monthly) {
      out << format_year_month(m.month) << ',' << format_double(m.total_kwh) << ','
          << format_double(ingest::monthly_to_daily(m)) << '\n';
    }
  }
  auto out = open_output(config, "ingest_summary.txt");
  out << config.header_line() << '\n';
  out << fmt::format("market rows read: {}\n", data.market_rows_read);
  out << fmt::format("market rows kept: {} ({}..{})\n", data.market.size(), format_date(data.market.start()),
                     format_date(data.market.end()));
  out << fmt::format("gaps filled: {}\n", data.gaps_filled);
  out << fmt::format("surplus records: {}\n", data.surplus.size());
  out << fmt::format("surplus months: {}\n", data.monthly.size());
  for (const auto& w : data.warnings) out << "warning: " << w << '\n';
}

void cmd_features(const RunConfig& config) {
  const IngestedData data = load_inputs(config);
  const auto features = build_feature_matrix(config, data);
  auto out = open_output(config, "features.csv");
  out << config.header_line() << '\n';
  indicators::write_features_csv(out, features);
}

void cmd_train(const RunConfig& config) {
  const IngestedData data = load_inputs(config);
  const auto features = build_feature_matrix(config, data);
  const ModelSplit split = split_rows(config, features);

  forest::ForestParams fp = config.forest;
  fp.seed = config.forest_seed();
  const forest::ForestModel rf = forest::fit_forest(split.train, fp);
  write_json_file(config, "forest.json", rf.to_json(), "model");

  lstm::TrainConfig lc = config.lstm;
  lc.seed = config.lstm_seed();
  const lstm::LstmModel net = lstm::fit_lstm(split.train, lc);
  write_json_file(config, "lstm.json", net.to_json(), "model");

  {
    auto out = open_output(config, "lstm_loss.csv");
    out << config.header_line() << '\n' << "epoch,loss\n";
    for (std::size_t e = 0; e < net.loss_trace.size(); ++e) {
      out << e + 1 << ',' << format_double(net.loss_trace[e]) << '\n';
    }
  }

  const auto rf_train = forest_predictions(rf, split.train);
  const auto rf_test = forest_predictions(rf, split.test);
  const auto lstm_train = lstm_predictions(net, split.train);
  const auto lstm_test = lstm_predictions(net, split.test);
  if (lstm_test.dates.size() < 2) {
    throw InsufficientDataError("test split too short for lstm windows");
  }

  auto out = open_output(config, "eval.csv");
  out << config.header_line() << '\n' << metrics::kEvalHeader << '\n';
  metrics::write_eval_row(out, metrics::evaluate("forest", "train", rf_train.actual, rf_train.predicted));
  metrics::write_eval_row(out, metrics::evaluate("forest", "test", rf_test.actual, rf_test.predicted));
  metrics::write_eval_row(out, metrics::evaluate("lstm", "train", lstm_train.actual, lstm_train.predicted));
  metrics::write_eval_row(out, metrics::evaluate("lstm", "test", lstm_test.actual, lstm_test.predicted));
  write_predictions_csv(config, rf_test, lstm_test);
}

void cmd_simulate(const RunConfig& config) {
  const IngestedData data = load_inputs(config);
  const auto cases = requested_cases(config);

  const auto capacity = fleet::monthly_capacity(data.monthly, config.miner, config.loss_rate);
  const auto [sim1, sim2] = fleet::build_scenarios(capacity, config.miner);
  {
    auto out = open_output(config, "fleet.csv");
    out << config.header_line() << '\n' << fleet::kFleetHeader << '\n';
    fleet::write_fleet_rows(out, sim1);
    fleet::write_fleet_rows(out, sim2);
  }

  const bool needs_models = std::any_of(cases.begin(), cases.end(), [](const CaseRequest& c) {
    return c.source != "actual";
  });
  std::map<std::string, economics::PriceSeries> sources;
  sources.emplace("actual", economics::PriceSeries::actual(data.market));
  if (needs_models) {
    const auto features = build_feature_matrix(config, data);
    const ModelSplit split = split_rows(config, features);
    for (const auto& c : cases) {
      if (sources.contains(c.source)) continue;
      if (c.source == "forest") {
        const auto model = forest::ForestModel::from_json(read_json_file(config.out_dir / "forest.json", "model"));
        sources.emplace("forest", to_price_series("forest", forest_predictions(model, split.test)));
      } else {
        const auto model = lstm::LstmModel::from_json(read_json_file(config.out_dir / "lstm.json", "model"));
        sources.emplace("lstm", to_price_series("lstm", lstm_predictions(model, split.test)));
      }
    }
  }

  const economics::SimulationRange range{config.dates.simulation_start, config.dates.simulation_end};
  std::vector<economics::SimulationReport> reports;
  // Actual-price cases run first so every model case has a baseline.
  for (const auto& source : {"actual", "forest", "lstm"}) {
    for (const auto& c : cases) {
      if (c.source != source) continue;
      const fleet::ScenarioPlan& plan = c.scenario == 1 ? sim1 : sim2;
      reports.push_back(economics::run_case(plan, sources.at(c.source), data.market, config.miner, range));
    }
  }
  economics::attach_deltas(reports);

  {
    auto out = open_output(config, "ledger.csv");
    out << config.header_line() << '\n' << economics::kLedgerHeader << '\n';
    for (const auto& r : reports) economics::write_ledger_rows(out, r);
  }
  {
    auto out = open_output(config, "cases.csv");
    out << config.header_line() << '\n' << economics::kCasesHeader << '\n';
    for (const auto& r : reports) economics::write_case_row(out, r);
  }
  {
    auto out = open_output(config, "warnings.txt");
    out << config.header_line() << '\n';
    for (const auto& w : data.warnings) out << w << '\n';
    for (const auto& r : reports) {
      for (const auto& w : r.warnings) out << w << '\n';
    }
  }
  cmd_report(config);
}

void cmd_report(const RunConfig& config) {
  std::ifstream cases_in(config.out_dir / "cases.csv");
  if (!cases_in) throw ValidationError("cases.csv not found; run `simulate` first");

  std::vector<economics::SimulationReport> reports;
  std::string line;
  bool header_seen = false;
  while (std::getline(cases_in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw ValidationError(fmt::format("cases.csv: malformed row '{}'", line));
    economics::SimulationReport r;
    r.case_label = f[0];
    r.price_source = f[1];
    r.scenario = static_cast<int>(parse_int(f[2]));
    r.owned_units = parse_int(f[3]);
    r.months_operated = parse_int(f[4]);
    r.btc_total = parse_double(f[5]);
    r.revenue = parse_cents(f[6]);
    r.cost = parse_cents(f[7]);
    r.profit = parse_cents(f[8]);
    if (!f[9].empty()) r.revenue_delta_pct = parse_double(f[9]);
    reports.push_back(std::move(r));
  }

  std::ostringstream text;
  text << config.header_line() << '\n';
  text << fmt::format("Mining simulation {}..{}\n", format_date(config.dates.simulation_start),
                      format_date(config.dates.simulation_end));
  const auto& m = config.miner;
  text << fmt::format("Miner: {} ({} TH/s, {} W, ${} per unit, {} month lifespan)\n", m.name,
                      format_double(m.hashrate_ths), format_double(m.power_w), format_double(m.unit_price_usd),
                      m.lifespan_months);
  text << fmt::format("Transmission loss: {:.2f}%\n", config.loss_rate * 100.0);
  for (const auto& r : reports) {
    if (r.price_source == "actual") {
      text << fmt::format("Scenario {}: {} miners owned, {:.2f} BTC mined\n", r.scenario, r.owned_units,
                          r.btc_total);
    }
  }
  text << '\n';
  economics::write_summary_table(text, reports);

  std::ifstream eval_in(config.out_dir / "eval.csv");
  if (eval_in) {
    text << "\nModel evaluation\n";
    text << fmt::format("{:<8} {:<6} {:>6} {:>14} {:>18} {:>8}\n", "model", "split", "n", "MAE", "MSE", "R2");
    bool eval_header = false;
    while (std::getline(eval_in, line)) {
      if (line.empty() || line.front() == '#') continue;
      if (!eval_header) {
        eval_header = true;
        continue;
      }
      const auto f = split_csv_line(line);
      if (f.size() != 6) throw ValidationError(fmt::format("eval.csv: malformed row '{}'", line));
      text << fmt::format("{:<8} {:<6} {:>6} {:>14.2f} {:>18.2f} {:>8.4f}\n", f[0], f[1], f[2], parse_double(f[3]),
                          parse_double(f[4]), parse_double(f[5]));
    }
  }

  std::vector<std::string> notes;
  if (config.dates.test_end > config.dates.analysis_end) {
    notes.push_back(fmt::format("test split ends {}, after the price analysis window end {}",
                                format_date(config.dates.test_end), format_date(config.dates.analysis_end)));
  }
  std::ifstream warn_in(config.out_dir / "warnings.txt");
  while (warn_in && std::getline(warn_in, line)) {
    if (!line.empty() && line.front() != '#') notes.push_back(line);
  }
  if (!notes.empty()) {
    text << "\nNotes\n";
    for (const auto& n : notes) text << "- " << n << '\n';
  }

  auto out = open_output(config, "report.txt");
  out << text.str();
  std::cout << text.str();
}

void cmd_run(const RunConfig& config) {
  cmd_ingest(config);
  cmd_features(config);
  cmd_train(config);
  cmd_simulate(config);
}

}  // namespace minesim::pipeline
