#include "minesim/lstm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "minesim/rng.hpp"

namespace minesim::lstm {

namespace {

constexpr std::string_view kFormat = "minesim-lstm";
constexpr int kVersion = 1;

Vector sigmoid(const Vector& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

Vector pre_activation(const Gate& gate, const Vector& x, const Vector& h_prev) {
  return gate.W * x + gate.U * h_prev + gate.b;
}

Gate zero_gate(std::size_t d, std::size_t h) {
  const auto hi = static_cast<Eigen::Index>(h);
  const auto di = static_cast<Eigen::Index>(d);
  return {Matrix::Zero(hi, di), Matrix::Zero(hi, hi), Vector::Zero(hi)};
}

template <typename Weights, typename Fn>
void for_each_parameter(Weights& w, Fn&& fn) {
  for (auto* gate : {&w.forget, &w.input, &w.candidate, &w.output}) {
    for (Eigen::Index r = 0; r < gate->W.rows(); ++r)
      for (Eigen::Index c = 0; c < gate->W.cols(); ++c) fn(gate->W(r, c));
    for (Eigen::Index r = 0; r < gate->U.rows(); ++r)
      for (Eigen::Index c = 0; c < gate->U.cols(); ++c) fn(gate->U(r, c));
    for (Eigen::Index r = 0; r < gate->b.size(); ++r) fn(gate->b(r));
  }
  for (Eigen::Index r = 0; r < w.head.size(); ++r) fn(w.head(r));
  fn(w.head_bias);
}

void accumulate(Gate& grad, const Vector& da, const StepCache& cache) {
  grad.W.noalias() += da * cache.x.transpose();
  grad.U.noalias() += da * cache.h_prev.transpose();
  grad.b += da;
}

nlohmann::ordered_json matrix_json(const Matrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::ordered_json& j, std::size_t rows, std::size_t cols) {
  if (j.size() != rows) throw ValidationError("lstm matrix has wrong row count");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ValidationError("lstm matrix has wrong column count");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Matrix scaled_window(const LstmModel& model, std::span<const indicators::FeatureRow> rows) {
  Matrix window(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kInputSize));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto x = input_vector(rows[t]);
    for (std::size_t j = 0; j < kInputSize; ++j) {
      window(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = model.input_scaler.scale(j, x[j]);
    }
  }
  return window;
}

}  // namespace

LstmWeights LstmWeights::zeros(std::size_t input_size, std::size_t hidden_size) {
  LstmWeights w;
  w.forget = zero_gate(input_size, hidden_size);
  w.input = zero_gate(input_size, hidden_size);
  w.candidate = zero_gate(input_size, hidden_size);
  w.output = zero_gate(input_size, hidden_size);
  w.head = Vector::Zero(static_cast<Eigen::Index>(hidden_size));
  w.head_bias = 0.0;
  return w;
}

std::size_t LstmWeights::parameter_count() const {
  const std::size_t d = input_size();
  const std::size_t h = hidden_size();
  return 4 * (h * d + h * h + h) + h + 1;
}

std::vector<double> LstmWeights::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for_each_parameter(*this, [&](const double& v) { out.push_back(v); });
  return out;
}

void LstmWeights::assign(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw ValidationError(fmt::format("expected {} parameters, got {}", parameter_count(), values.size()));
  }
  std::size_t k = 0;
  for_each_parameter(*this, [&](double& v) { v = values[k++]; });
}

CellOutput cell_forward(const Vector& x, const Vector& h_prev, const Vector& c_prev, const LstmWeights& w) {
  const auto d = static_cast<Eigen::Index>(w.input_size());
  const auto h = static_cast<Eigen::Index>(w.hidden_size());
  if (x.size() != d || h_prev.size() != h || c_prev.size() != h) {
    throw ValidationError(fmt::format("lstm cell expects x[{}], h[{}], c[{}]; got x[{}], h[{}], c[{}]", d, h, h,
                                      x.size(), h_prev.size(), c_prev.size()));
  }
  if (!x.allFinite() || !h_prev.allFinite() || !c_prev.allFinite()) {
    throw ValidationError("lstm cell received a non-finite input");
  }
  CellOutput out;
  StepCache& s = out.cache;
  s.x = x;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.f = sigmoid(pre_activation(w.forget, x, h_prev));
  s.i = sigmoid(pre_activation(w.input, x, h_prev));
  s.g = pre_activation(w.candidate, x, h_prev).array().tanh().matrix();
  s.o = sigmoid(pre_activation(w.output, x, h_prev));
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.tanh_c = s.c.array().tanh().matrix();
  out.c = s.c;
  out.h = s.o.cwiseProduct(s.tanh_c);
  return out;
}

namespace {

/// Runs the window forward, keeping every step's cache.
std::vector<StepCache> unroll(const Matrix& window, const LstmWeights& w, Vector& h_last) {
  if (window.rows() < 1 || window.cols() != static_cast<Eigen::Index>(w.input_size())) {
    throw ValidationError(fmt::format("incomplete lstm window ({}x{}, expected Tx{})", window.rows(),
                                      window.cols(), w.input_size()));
  }
  const auto h = static_cast<Eigen::Index>(w.hidden_size());
  Vector h_t = Vector::Zero(h);
  Vector c_t = Vector::Zero(h);
  std::vector<StepCache> caches;
  caches.reserve(static_cast<std::size_t>(window.rows()));
  for (Eigen::Index t = 0; t < window.rows(); ++t) {
    CellOutput step = cell_forward(window.row(t).transpose(), h_t, c_t, w);
    h_t = std::move(step.h);
    c_t = std::move(step.c);
    caches.push_back(std::move(step.cache));
  }
  h_last = std::move(h_t);
  return caches;
}

}  // namespace

double forward_window(const Matrix& window, const LstmWeights& w) {
  Vector h_last;
  unroll(window, w, h_last);
  return w.head.dot(h_last) + w.head_bias;
}

Gradients bptt_gradients(std::span<const Example> batch, const LstmWeights& w) {
  if (batch.empty()) throw InsufficientDataError("bptt_gradients needs a non-empty batch");
  const auto h = static_cast<Eigen::Index>(w.hidden_size());
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  Gradients out{LstmWeights::zeros(w.input_size(), w.hidden_size()), 0.0};
  LstmWeights& g = out.grad;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    Vector h_last;
    const auto caches = unroll(batch[k].window, w, h_last);
    const double prediction = w.head.dot(h_last) + w.head_bias;
    const double residual = prediction - batch[k].target;
    if (!std::isfinite(residual)) {
      throw ValidationError(fmt::format("non-finite loss on window {} of the batch", k));
    }
    out.loss += residual * residual * inv_n;

    const double dy = 2.0 * residual * inv_n;
    g.head += dy * h_last;
    g.head_bias += dy;

    Vector dh = dy * w.head;
    Vector dc_next = Vector::Zero(h);
    for (auto it = caches.rbegin(); it != caches.rend(); ++it) {
      const StepCache& s = *it;
      const Vector d_o = dh.cwiseProduct(s.tanh_c);
      const Vector dc =
          dc_next + dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix());
      const Vector da_f = dc.cwiseProduct(s.c_prev).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
      const Vector da_i = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
      const Vector da_g = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());
      const Vector da_o = d_o.cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
      dc_next = dc.cwiseProduct(s.f);

      accumulate(g.forget, da_f, s);
      accumulate(g.input, da_i, s);
      accumulate(g.candidate, da_g, s);
      accumulate(g.output, da_o, s);

      dh = w.forget.U.transpose() * da_f + w.input.U.transpose() * da_i + w.candidate.U.transpose() * da_g +
           w.output.U.transpose() * da_o;
    }
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("lstm epochs must be >= 1");
  if (window < 1) throw ValidationError("lstm window must be >= 1");
  if (hidden_size < 1) throw ValidationError("lstm hidden_size must be >= 1");
  if (batch_size < 1) throw ValidationError("lstm batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("lstm learning_rate must be > 0");
  if (!(clip_norm > 0.0)) throw ValidationError("lstm clip_norm must be > 0");
}

void MinMaxScaler::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InsufficientDataError("cannot fit a scaler on zero rows");
  lo = rows.front();
  hi = rows.front();
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      lo[j] = std::min(lo[j], row[j]);
      hi[j] = std::max(hi[j], row[j]);
    }
  }
}

double MinMaxScaler::scale(std::size_t column, double value) const {
  const double range = hi[column] - lo[column];
  return range > 0.0 ? (value - lo[column]) / range : value - lo[column];
}

double MinMaxScaler::inverse(std::size_t column, double value) const {
  const double range = hi[column] - lo[column];
  return range > 0.0 ? value * range + lo[column] : value + lo[column];
}

std::vector<double> input_vector(const indicators::FeatureRow& row) {
  return {row.sma14, row.wma14, row.momentum, row.k_pct, row.d_pct, row.rsi, row.price};
}

LstmWeights init_weights(std::size_t input_size, std::size_t hidden_size, std::uint64_t seed) {
  LstmWeights w = LstmWeights::zeros(input_size, hidden_size);
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  std::vector<double> values(w.parameter_count());
  for (auto& v : values) v = rng.uniform(-bound, bound);
  w.assign(values);
  return w;
}

std::vector<double> train(LstmWeights& w, std::span<const Example> examples, const TrainConfig& config) {
  config.validate();
  if (examples.empty()) throw InsufficientDataError("no training windows");
  std::vector<double> trace;
  trace.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < examples.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, examples.size() - start);
      Gradients step = bptt_gradients(examples.subspan(start, count), w);
      epoch_loss += step.loss * static_cast<double>(count);

      std::vector<double> grad = step.grad.flatten();
      double norm_sq = 0.0;
      for (double v : grad) norm_sq += v * v;
      const double norm = std::sqrt(norm_sq);
      const double factor = norm > config.clip_norm ? config.clip_norm / norm : 1.0;

      std::vector<double> params = w.flatten();
      for (std::size_t k = 0; k < params.size(); ++k) params[k] -= config.learning_rate * factor * grad[k];
      w.assign(params);
    }
    trace.push_back(epoch_loss / static_cast<double>(examples.size()));
  }
  return trace;
}

double LstmModel::predict(std::span<const indicators::FeatureRow> rows) const {
  if (rows.size() != config.window) {
    throw ValidationError(fmt::format("lstm window needs {} rows, got {}", config.window, rows.size()));
  }
  return target_scaler.inverse(0, forward_window(scaled_window(*this, rows), weights));
}

std::vector<Example> make_examples(const LstmModel& scaling, std::span<const indicators::FeatureRow> rows) {
  const std::size_t T = scaling.config.window;
  std::vector<Example> out;
  if (rows.size() < T) return out;
  out.reserve(rows.size() - T + 1);
  for (std::size_t k = 0; k + T <= rows.size(); ++k) {
    const auto block = rows.subspan(k, T);
    out.push_back({scaled_window(scaling, block), scaling.target_scaler.scale(0, block.back().target_price)});
  }
  return out;
}

LstmModel fit_lstm(const indicators::FeatureMatrix& train_rows, const TrainConfig& config) {
  config.validate();
  if (train_rows.size() < config.window) {
    throw InsufficientDataError(
        fmt::format("lstm needs at least {} training rows for one window, got {}", config.window, train_rows.size()));
  }
  LstmModel model;
  model.config = config;

  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  inputs.reserve(train_rows.size());
  targets.reserve(train_rows.size());
  for (const auto& row : train_rows.rows) {
    inputs.push_back(input_vector(row));
    targets.push_back({row.target_price});
  }
  model.input_scaler.fit(inputs);
  model.target_scaler.fit(targets);

  const auto examples = make_examples(model, train_rows.rows);
  model.weights = init_weights(kInputSize, config.hidden_size, config.seed);
  model.loss_trace = train(model.weights, examples, config);
  return model;
}

std::vector<std::optional<double>> predict_series(const LstmModel& model,
                                                  std::span<const indicators::FeatureRow> rows) {
  const std::size_t T = model.config.window;
  std::vector<std::optional<double>> out(rows.size());
  for (std::size_t i = T == 0 ? 0 : T - 1; i < rows.size(); ++i) {
    out[i] = model.predict(rows.subspan(i + 1 - T, T));
  }
  return out;
}

nlohmann::ordered_json LstmModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["config"] = {
      {"epochs", config.epochs},       {"window", config.window},
      {"hidden_size", config.hidden_size}, {"learning_rate", config.learning_rate},
      {"clip_norm", config.clip_norm}, {"batch_size", config.batch_size},
      {"seed", config.seed},
  };
  doc["input_size"] = weights.input_size();
  doc["scaler"] = {
      {"input_min", input_scaler.lo},
      {"input_max", input_scaler.hi},
      {"target_min", target_scaler.lo.at(0)},
      {"target_max", target_scaler.hi.at(0)},
  };
  nlohmann::ordered_json gates;
  const std::pair<const char*, const Gate*> named[] = {
      {"forget", &weights.forget}, {"input", &weights.input}, {"candidate", &weights.candidate},
      {"output", &weights.output}};
  for (const auto& [name, gate] : named) {
    gates[name] = {{"W", matrix_json(gate->W)}, {"U", matrix_json(gate->U)}, {"b", matrix_json(gate->b)}};
  }
  doc["gates"] = std::move(gates);
  doc["head"] = {{"V", matrix_json(weights.head.transpose())}, {"c", weights.head_bias}};
  doc["loss_trace"] = loss_trace;
  return doc;
}

LstmModel LstmModel::from_json(const nlohmann::ordered_json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat || doc.at("version").get<int>() != kVersion) {
      throw ValidationError("unsupported lstm model format or version");
    }
    LstmModel m;
    const auto& c = doc.at("config");
    m.config.epochs = c.at("epochs").get<std::size_t>();
    m.config.window = c.at("window").get<std::size_t>();
    m.config.hidden_size = c.at("hidden_size").get<std::size_t>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.clip_norm = c.at("clip_norm").get<double>();
    m.config.batch_size = c.at("batch_size").get<std::size_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.validate();

    const auto d = doc.at("input_size").get<std::size_t>();
    const std::size_t h = m.config.hidden_size;
    const auto& s = doc.at("scaler");
    m.input_scaler.lo = s.at("input_min").get<std::vector<double>>();
    m.input_scaler.hi = s.at("input_max").get<std::vector<double>>();
    m.target_scaler.lo = {s.at("target_min").get<double>()};
    m.target_scaler.hi = {s.at("target_max").get<double>()};
    if (d != kInputSize || m.input_scaler.lo.size() != d || m.input_scaler.hi.size() != d) {
      throw ValidationError("lstm scaler does not match input size");
    }

    const auto& gates = doc.at("gates");
    const std::pair<const char*, Gate*> named[] = {
        {"forget", &m.weights.forget}, {"input", &m.weights.input}, {"candidate", &m.weights.candidate},
        {"output", &m.weights.output}};
    for (const auto& [name, gate] : named) {
      const auto& g = gates.at(name);
      gate->W = matrix_from_json(g.at("W"), h, d);
      gate->U = matrix_from_json(g.at("U"), h, h);
      gate->b = matrix_from_json(g.at("b"), h, 1);
    }
    m.weights.head = matrix_from_json(doc.at("head").at("V"), 1, h).transpose();
    m.weights.head_bias = doc.at("head").at("c").get<double>();
    m.loss_trace = doc.at("loss_trace").get<std::vector<double>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed lstm model: {}", e.what()));
  }
}

}  // namespace minesim::lstm
