#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "minesim/common.hpp"
#include "minesim/indicators.hpp"

namespace minesim::lstm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Input, recurrent and bias parameters of one gate.
struct Gate {
  Matrix W;  ///< hidden x input
  Matrix U;  ///< hidden x hidden
  Vector b;  ///< hidden
};

struct LstmWeights {
  Gate forget;
  Gate input;
  Gate candidate;
  Gate output;
  Vector head;             ///< linear read-out of the last hidden state
  double head_bias = 0.0;

  static LstmWeights zeros(std::size_t input_size, std::size_t hidden_size);

  [[nodiscard]] std::size_t input_size() const { return static_cast<std::size_t>(forget.W.cols()); }
  [[nodiscard]] std::size_t hidden_size() const { return static_cast<std::size_t>(forget.W.rows()); }
  [[nodiscard]] std::size_t parameter_count() const;

  /// Gates in forget, input, candidate, output order (W row-major, U row-major,
  /// b each), then the head weights and the head bias.
  [[nodiscard]] std::vector<double> flatten() const;
  void assign(std::span<const double> values);
};

/// Gate activations kept from the forward pass for backpropagation.
struct StepCache {
  Vector x;
  Vector h_prev;
  Vector c_prev;
  Vector f;
  Vector i;
  Vector g;  ///< candidate memory
  Vector o;
  Vector c;
  Vector tanh_c;
};

struct CellOutput {
  Vector h;
  Vector c;
  StepCache cache;
};

CellOutput cell_forward(const Vector& x, const Vector& h_prev, const Vector& c_prev, const LstmWeights& w);

/// Window rows are consecutive days (oldest first), columns are inputs.
/// Starts from zero hidden and cell state; returns head(h_T).
double forward_window(const Matrix& window, const LstmWeights& w);

struct Example {
  Matrix window;
  double target = 0.0;
};

struct Gradients {
  LstmWeights grad;
  double loss = 0.0;  ///< mean squared error over the batch
};

/// Exact gradients of the batch-mean squared error by backpropagation through time.
Gradients bptt_gradients(std::span<const Example> batch, const LstmWeights& w);

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t window = 14;
  std::size_t hidden_size = 64;
  double learning_rate = 1e-3;
  double clip_norm = 1.0;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Per-column min-max scaling to [0, 1]. Constant columns map to 0.
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  void fit(const std::vector<std::vector<double>>& rows);
  [[nodiscard]] double scale(std::size_t column, double value) const;
  [[nodiscard]] double inverse(std::size_t column, double value) const;
};

/// Inputs per day: the six indicators followed by the day's price.
inline constexpr std::size_t kInputSize = indicators::kFeatureCount + 1;
std::vector<double> input_vector(const indicators::FeatureRow& row);

/// Uniform in [-1/sqrt(h), 1/sqrt(h)] for every parameter, in flatten() order.
LstmWeights init_weights(std::size_t input_size, std::size_t hidden_size, std::uint64_t seed);

/// Chronological mini-batch SGD with global gradient-norm clipping.
/// Returns the mean training loss of each epoch.
std::vector<double> train(LstmWeights& w, std::span<const Example> examples, const TrainConfig& config);

struct LstmModel {
  TrainConfig config;
  LstmWeights weights;
  MinMaxScaler input_scaler;   ///< kInputSize columns
  MinMaxScaler target_scaler;  ///< one column: next-day price
  std::vector<double> loss_trace;

  /// `rows` must hold exactly config.window consecutive days, oldest first.
  /// Returns the price of the day after the last row, in USD.
  [[nodiscard]] double predict(std::span<const indicators::FeatureRow> rows) const;

  [[nodiscard]] nlohmann::ordered_json to_json() const;
  static LstmModel from_json(const nlohmann::ordered_json& doc);
};

/// Builds scaled sliding windows from `rows`; window k covers rows k..k+T-1
/// and targets the next-day price of row k+T-1.
std::vector<Example> make_examples(const LstmModel& scaling, std::span<const indicators::FeatureRow> rows);

/// Fits scalers on `train_rows` only, then trains.
LstmModel fit_lstm(const indicators::FeatureMatrix& train_rows, const TrainConfig& config);

/// One entry per row; entry i predicts rows[i].target_price from rows
/// i-T+1..i and is empty for the first T-1 rows.
std::vector<std::optional<double>> predict_series(const LstmModel& model,
                                                  std::span<const indicators::FeatureRow> rows);

}  // namespace minesim::lstm
