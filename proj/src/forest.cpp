#include "minesim/forest.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include <fmt/format.h>

namespace minesim::forest {

namespace {

constexpr std::string_view kFormat = "minesim-forest";
constexpr int kVersion = 1;

double mean_target(const Dataset& data, std::span<const std::size_t> rows) {
  double sum = 0.0;
  for (std::size_t r : rows) sum += data.y(r);
  return sum / static_cast<double>(rows.size());
}

bool constant_target(const Dataset& data, std::span<const std::size_t> rows) {
  const double first = data.y(rows.front());
  return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return data.y(r) == first; });
}

double split_midpoint(double lo, double hi) {
  const double mid = std::midpoint(lo, hi);
  // Adjacent doubles can round the midpoint onto the upper value.
  return mid < hi ? mid : lo;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestParams& params, Rng& rng)
      : data_(data), params_(params), rng_(rng), m_try_(params.resolved_m_try(data.feature_count())) {
    all_features_.resize(data.feature_count());
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
  }

  Tree build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::int32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{.value = mean_target(data_, rows)});

    const bool depth_capped = params_.max_depth && depth >= *params_.max_depth;
    if (rows.size() < 2 * params_.min_samples_leaf || depth_capped || constant_target(data_, rows)) {
      return id;
    }
    const auto features = draw_features();
    const auto split = best_split(data_, rows, features, params_.min_samples_leaf);
    if (!split) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (data_.x(r, split->feature) <= split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const std::int32_t l = grow(std::move(left), depth + 1);
    const std::int32_t r = grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> draw_features() {
    std::vector<std::size_t> pool = all_features_;
    for (std::size_t i = 0; i < m_try_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(m_try_);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  const Dataset& data_;
  const ForestParams& params_;
  Rng& rng_;
  std::size_t m_try_;
  std::vector<std::size_t> all_features_;
  Tree tree_;
};

}  // namespace

void Dataset::add_row(std::span<const double> x, double y) {
  if (x.size() != feature_count_) {
    throw ValidationError(fmt::format("row has {} features, dataset has {}", x.size(), feature_count_));
  }
  x_.insert(x_.end(), x.begin(), x.end());
  y_.push_back(y);
}

Dataset Dataset::from_features(const indicators::FeatureMatrix& features) {
  Dataset data(indicators::kFeatureCount);
  for (const auto& row : features.rows) {
    const auto x = row.features();
    data.add_row(x, row.target_price);
  }
  return data;
}

double node_sse(const Dataset& data, std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  const double mean = mean_target(data, rows);
  double sse = 0.0;
  for (std::size_t r : rows) {
    const double d = data.y(r) - mean;
    sse += d * d;
  }
  return sse;
}

std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, std::size_t min_leaf) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;
  min_leaf = std::max<std::size_t>(min_leaf, 1);

  // Prefix sums run over targets centred on the node mean; this keeps the
  // SSE arithmetic well conditioned when targets share a large offset.
  const double mean = mean_target(data, rows);
  double total_sum = 0.0;
  double total_sq = 0.0;
  for (std::size_t r : rows) {
    const double d = data.y(r) - mean;
    total_sum += d;
    total_sq += d * d;
  }
  const double parent_sse = std::max(0.0, total_sq - total_sum * total_sum / static_cast<double>(n));
  if (parent_sse <= 0.0) return std::nullopt;
  const double tol = kTieTolerance * parent_sse;

  std::vector<std::size_t> ordered_features(features.begin(), features.end());
  std::sort(ordered_features.begin(), ordered_features.end());

  std::optional<Split> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f : ordered_features) {
    std::copy(rows.begin(), rows.end(), order.begin());
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.x(a, f) < data.x(b, f); });
    double left_sum = 0.0;
    double left_sq = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double d = data.y(order[k]) - mean;
      left_sum += d;
      left_sq += d * d;
      const double lo = data.x(order[k], f);
      const double hi = data.x(order[k + 1], f);
      if (lo == hi) continue;
      const std::size_t n_left = k + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse_left = std::max(0.0, left_sq - left_sum * left_sum / static_cast<double>(n_left));
      const double sse_right = std::max(0.0, right_sq - right_sum * right_sum / static_cast<double>(n_right));
      const double sse = sse_left + sse_right;
      if (!best || sse < best->sse - tol) {
        best = Split{f, split_midpoint(lo, hi), sse};
      }
    }
  }
  if (!best || best->sse >= parent_sse - tol) return std::nullopt;
  return best;
}

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& node = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                               : node.right);
  }
  return nodes[i].value;
}

std::size_t Tree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return deepest;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t ForestParams::resolved_m_try(std::size_t feature_count) const {
  const std::size_t m = m_try.value_or(std::max<std::size_t>(1, feature_count / 3));
  if (m < 1 || m > feature_count) {
    throw ValidationError(fmt::format("m_try {} outside [1, {}]", m, feature_count));
  }
  return m;
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng) {
  if (n == 0) throw InsufficientDataError("bootstrap sample of an empty dataset");
  std::vector<std::size_t> out(n);
  for (auto& idx : out) idx = static_cast<std::size_t>(rng.below(n));
  return out;
}

Tree grow_tree(const Dataset& data, std::span<const std::size_t> rows, const ForestParams& params, Rng& rng) {
  if (rows.empty()) throw InsufficientDataError("cannot grow a tree on an empty sample");
  if (params.min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
  TreeBuilder builder(data, params, rng);
  return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

ForestModel::ForestModel(std::vector<Tree> trees, std::size_t feature_count, std::size_t m_try, ForestParams params)
    : trees_(std::move(trees)), feature_count_(feature_count), m_try_(m_try), params_(std::move(params)) {}

double ForestModel::predict(std::span<const double> x) const {
  if (x.size() != feature_count_) {
    throw ValidationError(fmt::format("forest expects {} features, got {}", feature_count_, x.size()));
  }
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(x);
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> ForestModel::predict(const Dataset& data) const {
  std::vector<double> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(predict(data.row(i)));
  return out;
}

nlohmann::ordered_json ForestModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["feature_count"] = feature_count_;
  doc["m_try"] = m_try_;
  doc["params"] = {
      {"n_trees", params_.n_trees},
      {"min_samples_leaf", params_.min_samples_leaf},
      {"max_depth", params_.max_depth ? nlohmann::ordered_json(*params_.max_depth) : nlohmann::ordered_json()},
      {"seed", params_.seed},
      {"bootstrap", params_.bootstrap},
  };
  auto& trees = doc["trees"] = nlohmann::ordered_json::array();
  for (const auto& tree : trees_) {
    std::vector<std::int32_t> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
    }
    nlohmann::ordered_json t;
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["left"] = left;
    t["right"] = right;
    t["value"] = value;
    trees.push_back(std::move(t));
  }
  return doc;
}

ForestModel ForestModel::from_json(const nlohmann::ordered_json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat || doc.at("version").get<int>() != kVersion) {
      throw ValidationError("unsupported forest model format or version");
    }
    ForestParams params;
    const auto& p = doc.at("params");
    params.n_trees = p.at("n_trees").get<std::size_t>();
    params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
    if (!p.at("max_depth").is_null()) params.max_depth = p.at("max_depth").get<std::size_t>();
    params.seed = p.at("seed").get<std::uint64_t>();
    params.bootstrap = p.at("bootstrap").get<bool>();
    const auto feature_count = doc.at("feature_count").get<std::size_t>();
    const auto m_try = doc.at("m_try").get<std::size_t>();
    params.m_try = m_try;

    std::vector<Tree> trees;
    for (const auto& t : doc.at("trees")) {
      const auto& feature = t.at("feature");
      const std::size_t count = feature.size();
      if (t.at("threshold").size() != count || t.at("left").size() != count || t.at("right").size() != count ||
          t.at("value").size() != count || count == 0) {
        throw ValidationError("forest tree arrays have inconsistent lengths");
      }
      Tree tree;
      tree.nodes.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        TreeNode& node = tree.nodes[i];
        node.feature = feature[i].get<std::int32_t>();
        node.threshold = t["threshold"][i].get<double>();
        node.left = t["left"][i].get<std::int32_t>();
        node.right = t["right"][i].get<std::int32_t>();
        node.value = t["value"][i].get<double>();
        const auto in_range = [&](std::int32_t c) { return c > static_cast<std::int32_t>(i) && c < static_cast<std::int32_t>(count); };
        if (!node.is_leaf() && (node.feature < 0 || static_cast<std::size_t>(node.feature) >= feature_count ||
                                !in_range(node.left) || !in_range(node.right))) {
          throw ValidationError(fmt::format("forest node {} is malformed", i));
        }
      }
      trees.push_back(std::move(tree));
    }
    if (trees.empty()) throw ValidationError("forest model has no trees");
    return ForestModel(std::move(trees), feature_count, m_try, params);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed forest model: {}", e.what()));
  }
}

ForestModel fit_forest(const Dataset& data, const ForestParams& params) {
  if (data.size() < 2) {
    throw InsufficientDataError(fmt::format("forest needs at least 2 rows, got {}", data.size()));
  }
  if (params.n_trees < 1) throw ValidationError("n_trees must be >= 1");
  const std::size_t m_try = params.resolved_m_try(data.feature_count());

  std::vector<std::size_t> identity(data.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});

  std::vector<Tree> trees;
  trees.reserve(params.n_trees);
  for (std::size_t b = 0; b < params.n_trees; ++b) {
    Rng rng(substream_seed(params.seed, b));
    const auto sample = params.bootstrap ? bootstrap_sample(data.size(), rng) : identity;
    trees.push_back(grow_tree(data, sample, params, rng));
  }
  return ForestModel(std::move(trees), data.feature_count(), m_try, params);
}

ForestModel fit_forest(const indicators::FeatureMatrix& features, const ForestParams& params) {
  return fit_forest(Dataset::from_features(features), params);
}

}  // namespace minesim::forest
