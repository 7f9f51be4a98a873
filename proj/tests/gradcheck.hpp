#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "minesim/lstm.hpp"
#include "minesim/rng.hpp"

namespace gradcheck {

struct Result {
  std::size_t parameters = 0;
  double max_rel_error = 0.0;
  std::size_t worst = 0;
};

/// Random toy problem: `batch` windows of T x d inputs with random targets.
inline std::vector<minesim::lstm::Example> toy_batch(std::size_t d, std::size_t T, std::size_t batch,
                                                     std::uint64_t seed) {
  minesim::Rng rng(seed);
  std::vector<minesim::lstm::Example> out(batch);
  for (auto& e : out) {
    e.window.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < e.window.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.window.cols(); ++c) e.window(r, c) = rng.uniform(-1.0, 1.0);
    }
    e.target = rng.uniform(-1.0, 1.0);
  }
  return out;
}

/// Central differences on the batch-mean loss for every parameter. The
/// relative error denominator is floored at `floor` so that parameters with
/// vanishing gradients are compared absolutely.
inline Result check(const std::vector<minesim::lstm::Example>& batch, const minesim::lstm::LstmWeights& w,
                    double eps = 1e-5, double floor = 1e-7) {
  using minesim::lstm::bptt_gradients;
  const auto analytic = bptt_gradients(batch, w).grad.flatten();
  const auto theta = w.flatten();
  Result r;
  r.parameters = theta.size();
  minesim::lstm::LstmWeights probe = w;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    auto t = theta;
    t[k] = theta[k] + eps;
    probe.assign(t);
    const double up = bptt_gradients(batch, probe).loss;
    t[k] = theta[k] - eps;
    probe.assign(t);
    const double down = bptt_gradients(batch, probe).loss;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[k] - numeric) / denom;
    if (rel > r.max_rel_error) {
      r.max_rel_error = rel;
      r.worst = k;
    }
  }
  return r;
}

/// Sine-wave price series of `n` days.
inline std::vector<double> sine_prices(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = 100.0 + 10.0 * std::sin(2.0 * M_PI * static_cast<double>(i) / 25.0);
  return p;
}

}  // namespace gradcheck
