#pragma once

// Brute-force regression tree used as a reference for grow_tree: every
// (feature, midpoint) pair is tried by explicit partition and two-pass SSE.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <vector>

#include "minesim/forest.hpp"
#include "minesim/rng.hpp"

namespace oracle {

struct Instance {
  std::vector<std::vector<double>> x;  ///< row-major
  std::vector<double> y;
};

struct Node {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
};

inline double mean_of(const Instance& d, const std::vector<std::size_t>& rows) {
  double s = 0.0;
  for (auto r : rows) s += d.y[r];
  return s / static_cast<double>(rows.size());
}

inline double sse_of(const Instance& d, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  const double m = mean_of(d, rows);
  double s = 0.0;
  for (auto r : rows) s += (d.y[r] - m) * (d.y[r] - m);
  return s;
}

/// Appends the subtree over `rows` in pre-order.
inline void grow(const Instance& d, const std::vector<std::size_t>& rows, std::size_t depth, std::size_t max_depth,
                 std::vector<Node>& out) {
  const std::size_t id = out.size();
  out.push_back({-1, 0.0, mean_of(d, rows)});
  if (rows.size() < 2 || depth >= max_depth) return;
  bool constant = true;
  for (auto r : rows) constant = constant && d.y[r] == d.y[rows[0]];
  if (constant) return;

  const double parent = sse_of(d, rows);
  const double tol = minesim::forest::kTieTolerance * parent;
  const std::size_t p = d.x[0].size();
  std::optional<Node> best;
  double best_sse = 0.0;
  for (std::size_t f = 0; f < p; ++f) {
    std::vector<double> values;
    for (auto r : rows) values.push_back(d.x[r][f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = (values[k] + values[k + 1]) / 2.0;
      std::vector<std::size_t> l;
      std::vector<std::size_t> r;
      for (auto i : rows) (d.x[i][f] <= t ? l : r).push_back(i);
      const double s = sse_of(d, l) + sse_of(d, r);
      if (!best || s < best_sse - tol) {
        best = Node{static_cast<int>(f), t, 0.0};
        best_sse = s;
      }
    }
  }
  if (!best || best_sse >= parent - tol) return;
  out[id].feature = best->feature;
  out[id].threshold = best->threshold;
  std::vector<std::size_t> l;
  std::vector<std::size_t> r;
  for (auto i : rows) (d.x[i][static_cast<std::size_t>(best->feature)] <= best->threshold ? l : r).push_back(i);
  grow(d, l, depth + 1, max_depth, out);
  grow(d, r, depth + 1, max_depth, out);
}

inline std::vector<Node> build(const Instance& d, std::size_t max_depth) {
  std::vector<std::size_t> rows(d.y.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<Node> out;
  grow(d, rows, 0, max_depth, out);
  return out;
}

inline minesim::forest::Dataset to_dataset(const Instance& d) {
  minesim::forest::Dataset data(d.x[0].size());
  for (std::size_t i = 0; i < d.y.size(); ++i) data.add_row(d.x[i], d.y[i]);
  return data;
}

/// Random instance; half of them use small integers so that ties are common.
inline Instance random_instance(minesim::Rng& rng) {
  const std::size_t n = 2 + rng.below(11);
  const std::size_t p = 1 + rng.below(3);
  const bool discrete = rng.below(2) == 0;
  Instance d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    for (std::size_t f = 0; f < p; ++f) {
      row.push_back(discrete ? static_cast<double>(rng.below(4)) : rng.uniform(-5.0, 5.0));
    }
    d.x.push_back(row);
    d.y.push_back(discrete ? static_cast<double>(rng.below(4)) : rng.uniform(0.0, 10.0));
  }
  return d;
}

struct Comparison {
  bool structure_equal = true;
  double sse_tree = 0.0;
  double sse_oracle = 0.0;
};

inline double training_sse(const Instance& d, auto&& predict) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    const double e = d.y[i] - predict(d.x[i]);
    s += e * e;
  }
  return s;
}

/// Grows a tree with m_try = p on the rows as given and compares it to the oracle.
inline Comparison compare(const Instance& d, std::size_t max_depth, std::uint64_t seed) {
  const auto data = to_dataset(d);
  minesim::forest::ForestParams params;
  params.m_try = d.x[0].size();
  params.max_depth = max_depth;
  std::vector<std::size_t> rows(d.y.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  minesim::Rng rng(seed);
  const auto tree = minesim::forest::grow_tree(data, rows, params, rng);
  const auto want = build(d, max_depth);

  Comparison c;
  c.structure_equal = tree.nodes.size() == want.size();
  for (std::size_t i = 0; c.structure_equal && i < want.size(); ++i) {
    const auto& a = tree.nodes[i];
    c.structure_equal = a.feature == want[i].feature && (a.is_leaf() || a.threshold == want[i].threshold) &&
                        std::abs(a.value - want[i].value) <= 1e-12 * (1.0 + std::abs(want[i].value));
  }
  c.sse_tree = training_sse(d, [&](const std::vector<double>& x) { return tree.predict(x); });
  c.sse_oracle = training_sse(d, [&](const std::vector<double>& x) {
    std::size_t i = 0;
    // Pre-order layout: the left child follows its parent, the right child
    // follows the left subtree.
    auto subtree_end = [&](auto&& self, std::size_t k) -> std::size_t {
      if (want[k].feature < 0) return k + 1;
      return self(self, self(self, k + 1));
    };
    while (want[i].feature >= 0) {
      const bool left = x[static_cast<std::size_t>(want[i].feature)] <= want[i].threshold;
      i = left ? i + 1 : subtree_end(subtree_end, i + 1);
    }
    return want[i].value;
  });
  return c;
}

}  // namespace oracle
