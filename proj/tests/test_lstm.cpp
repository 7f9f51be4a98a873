#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "gradcheck.hpp"
#include "minesim/indicators.hpp"
#include "minesim/lstm.hpp"
#include "support.hpp"

using namespace minesim;
using namespace minesim::lstm;

namespace {

Vector filled(std::size_t n, double v) { return Vector::Constant(static_cast<Eigen::Index>(n), v); }

indicators::FeatureMatrix sine_features(std::size_t n) {
  return indicators::build_features(testing::series_from_prices(gradcheck::sine_prices(n)));
}

}  // namespace

TEST_SUITE("lstm") {
  TEST_CASE("zero weights give half-open gates") {
    const auto w = LstmWeights::zeros(3, 4);
    const auto out = cell_forward(filled(3, 0.7), filled(4, 0.2), filled(4, 0.0), w);
    for (Eigen::Index k = 0; k < 4; ++k) {
      CHECK(out.cache.f(k) == 0.5);
      CHECK(out.cache.i(k) == 0.5);
      CHECK(out.cache.o(k) == 0.5);
      CHECK(out.c(k) == 0.0);
      CHECK(out.h(k) == 0.0);
    }
    const auto carried = cell_forward(filled(3, 0.7), filled(4, 0.0), filled(4, 1.6), w);
    for (Eigen::Index k = 0; k < 4; ++k) {
      CHECK(carried.c(k) == doctest::Approx(0.8).epsilon(1e-15));
      CHECK(carried.h(k) == doctest::Approx(0.5 * std::tanh(0.8)).epsilon(1e-15));
    }
  }

  TEST_CASE("cell state grows by at most one per step and gates stay open intervals") {
    Rng rng(3);
    const auto w = init_weights(5, 6, 17);
    Vector h = Vector::Zero(6);
    Vector c = Vector::Zero(6);
    for (int step = 0; step < 200; ++step) {
      Vector x(5);
      for (auto& v : x) v = rng.uniform(-20.0, 20.0);
      const auto out = cell_forward(x, h, c, w);
      for (Eigen::Index k = 0; k < 6; ++k) {
        CHECK(std::abs(out.c(k)) <= std::abs(c(k)) + 1.0);
        CHECK(out.cache.f(k) >= 0.0);
        CHECK(out.cache.f(k) <= 1.0);
        CHECK(std::abs(out.cache.g(k)) <= 1.0);
      }
      h = out.h;
      c = out.c;
    }
  }

  TEST_CASE("cell_forward rejects bad input") {
    const auto w = LstmWeights::zeros(2, 3);
    CHECK_THROWS_AS(cell_forward(filled(3, 0), filled(3, 0), filled(3, 0), w), ValidationError);
    CHECK_THROWS_AS(cell_forward(filled(2, NAN), filled(3, 0), filled(3, 0), w), ValidationError);
  }

  TEST_CASE("forward_window") {
    auto w = LstmWeights::zeros(2, 3);
    w.head_bias = 0.37;
    CHECK(forward_window(Matrix::Ones(4, 2), w) == 0.37);

    const auto r = init_weights(2, 3, 5);
    Matrix one(1, 2);
    one << 0.3, -0.4;
    const auto step = cell_forward(one.row(0).transpose(), Vector::Zero(3), Vector::Zero(3), r);
    CHECK(forward_window(one, r) == doctest::Approx(r.head.dot(step.h) + r.head_bias).epsilon(1e-14));

    const auto batch = gradcheck::toy_batch(2, 6, 1, 8);
    Matrix swapped = batch[0].window;
    swapped.row(1).swap(swapped.row(3));
    CHECK(forward_window(batch[0].window, r) != forward_window(swapped, r));
    CHECK_THROWS_AS(forward_window(Matrix(0, 2), r), ValidationError);
  }

  TEST_CASE("analytic gradients match central differences") {
    const auto batch = gradcheck::toy_batch(2, 4, 2, 99);
    const auto w = init_weights(2, 3, 4);
    const auto r = gradcheck::check(batch, w);
    CHECK(r.parameters == 4 * (3 * 2 + 3 * 3 + 3) + 3 + 1);
    CHECK(r.max_rel_error < 1e-4);
  }

  TEST_CASE("zero residual and batch duplication") {
    const auto w = init_weights(2, 3, 6);
    auto batch = gradcheck::toy_batch(2, 4, 3, 12);
    for (auto& e : batch) e.target = forward_window(e.window, w);
    const auto exact = bptt_gradients(batch, w);
    CHECK(exact.loss == 0.0);
    CHECK(exact.grad.head.norm() == 0.0);
    CHECK(exact.grad.head_bias == 0.0);

    const auto b = gradcheck::toy_batch(2, 4, 3, 13);
    auto doubled = b;
    doubled.insert(doubled.end(), b.begin(), b.end());
    const auto g1 = bptt_gradients(b, w).grad.flatten();
    const auto g2 = bptt_gradients(doubled, w).grad.flatten();
    for (std::size_t k = 0; k < g1.size(); ++k) CHECK(g2[k] == doctest::Approx(g1[k]).epsilon(1e-12));
    CHECK_THROWS_AS(bptt_gradients(std::span<const Example>{}, w), InsufficientDataError);
  }

  TEST_CASE("initialization bounds and flatten round trip") {
    const auto w = init_weights(7, 64, 1);
    const double bound = 1.0 / 8.0;
    const auto flat = w.flatten();
    CHECK(flat.size() == w.parameter_count());
    CHECK(std::all_of(flat.begin(), flat.end(), [&](double v) { return std::abs(v) <= bound; }));
    auto copy = LstmWeights::zeros(7, 64);
    copy.assign(flat);
    CHECK(copy.flatten() == flat);
    CHECK(init_weights(7, 64, 1).flatten() == flat);
  }

  TEST_CASE("training on a sine wave lowers the loss") {
    const auto fm = sine_features(200);
    const auto model = fit_lstm(fm, TrainConfig{});
    REQUIRE(model.loss_trace.size() == 20);
    CHECK(model.loss_trace.back() < model.loss_trace.front());
  }

  TEST_CASE("training is reproducible") {
    const auto fm = sine_features(120);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.hidden_size = 8;
    const auto a = fit_lstm(fm, cfg);
    const auto b = fit_lstm(fm, cfg);
    CHECK(a.loss_trace == b.loss_trace);
    CHECK(a.to_json().dump() == b.to_json().dump());
    const auto back = LstmModel::from_json(nlohmann::ordered_json::parse(a.to_json().dump()));
    CHECK(back.to_json().dump() == a.to_json().dump());
  }

  TEST_CASE("configuration is validated") {
    const auto fm = sine_features(60);
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(fit_lstm(fm, cfg), ValidationError);
    cfg = TrainConfig{};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(fit_lstm(fm, cfg), ValidationError);
    cfg = TrainConfig{};
    cfg.window = 100;
    CHECK_THROWS_AS(fit_lstm(fm, cfg), InsufficientDataError);
  }

  TEST_CASE("scalers come from the training rows only") {
    const auto fm = sine_features(150);
    indicators::FeatureMatrix train;
    train.rows.assign(fm.rows.begin(), fm.rows.begin() + 80);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.hidden_size = 4;
    const auto model = fit_lstm(train, cfg);
    double lo = INFINITY;
    double hi = -INFINITY;
    double rsi_lo = INFINITY;
    double rsi_hi = -INFINITY;
    for (const auto& r : train.rows) {
      lo = std::min(lo, r.target_price);
      hi = std::max(hi, r.target_price);
      rsi_lo = std::min(rsi_lo, r.rsi);
      rsi_hi = std::max(rsi_hi, r.rsi);
    }
    CHECK(model.target_scaler.lo[0] == lo);
    CHECK(model.target_scaler.hi[0] == hi);
    CHECK(model.input_scaler.lo[5] == rsi_lo);
    CHECK(model.input_scaler.hi[5] == rsi_hi);
    for (double p : {lo, hi, 0.5 * (lo + hi), 3.0 * hi}) {
      CHECK(model.target_scaler.inverse(0, model.target_scaler.scale(0, p)) == doctest::Approx(p).epsilon(1e-9));
    }
  }

  TEST_CASE("series prediction leaves the warm-up days empty") {
    const auto fm = sine_features(120);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.hidden_size = 4;
    const auto model = fit_lstm(fm, cfg);
    const auto pred = predict_series(model, fm.rows);
    REQUIRE(pred.size() == fm.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
      CHECK(pred[i].has_value() == (i + 1 >= cfg.window));
      if (pred[i]) CHECK(std::isfinite(*pred[i]));
    }
    CHECK(*pred[20] == model.predict(std::span(fm.rows).subspan(20 + 1 - cfg.window, cfg.window)));
    CHECK_THROWS_AS((void)model.predict(std::span(fm.rows).subspan(0, 3)), ValidationError);
  }
}
