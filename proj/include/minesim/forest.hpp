#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "minesim/indicators.hpp"
#include "minesim/rng.hpp"

namespace minesim::forest {

/// Dense row-major design matrix with one regression target per row.
class Dataset {
 public:
  explicit Dataset(std::size_t feature_count) : feature_count_(feature_count) {}

  void add_row(std::span<const double> x, double y);

  [[nodiscard]] std::size_t size() const { return y_.size(); }
  [[nodiscard]] std::size_t feature_count() const { return feature_count_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {x_.data() + i * feature_count_, feature_count_};
  }
  [[nodiscard]] double x(std::size_t i, std::size_t feature) const { return x_[i * feature_count_ + feature]; }
  [[nodiscard]] double y(std::size_t i) const { return y_[i]; }

  /// Indicator features of each row against its next-day price.
  static Dataset from_features(const indicators::FeatureMatrix& features);

 private:
  std::size_t feature_count_;
  std::vector<double> x_;
  std::vector<double> y_;
};

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double sse = 0.0;  ///< SSE of the left child plus SSE of the right child
};

/// Candidate SSEs closer than this fraction of the node SSE count as ties.
inline constexpr double kTieTolerance = 1e-10;

/// Sum of squared deviations from the mean of `rows`' targets.
double node_sse(const Dataset& data, std::span<const std::size_t> rows);

/// Exhaustive search over midpoints of consecutive distinct values of each
/// feature in `features`. Ties go to the lowest feature index, then the lowest
/// threshold. Splits leaving fewer than `min_leaf` rows on a side are skipped.
/// Returns nothing when no candidate reduces the node SSE.
std::optional<Split> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                std::span<const std::size_t> features, std::size_t min_leaf = 1);

struct TreeNode {
  static constexpr std::int32_t kNone = -1;

  std::int32_t feature = kNone;  ///< kNone for leaves
  double threshold = 0.0;
  std::int32_t left = kNone;
  std::int32_t right = kNone;
  double value = 0.0;  ///< mean training target of the node

  [[nodiscard]] bool is_leaf() const { return feature == kNone; }
};

/// Nodes in pre-order; nodes[0] is the root. Rows with x <= threshold go left.
struct Tree {
  std::vector<TreeNode> nodes;

  [[nodiscard]] double predict(std::span<const double> x) const;
  [[nodiscard]] std::size_t depth() const;
  [[nodiscard]] std::size_t leaf_count() const;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> m_try;  ///< defaults to max(1, p / 3)
  std::size_t min_samples_leaf = 1;
  std::optional<std::size_t> max_depth;  ///< unlimited when empty
  std::uint64_t seed = 42;
  bool bootstrap = true;  ///< false trains every tree on the rows as given

  [[nodiscard]] std::size_t resolved_m_try(std::size_t feature_count) const;
};

/// n indices drawn uniformly with replacement from [0, n).
std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng);

/// Grows one unpruned regression tree; a fresh feature subset of size m_try
/// is drawn from `rng` at every node that attempts a split.
Tree grow_tree(const Dataset& data, std::span<const std::size_t> rows, const ForestParams& params, Rng& rng);

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<Tree> trees, std::size_t feature_count, std::size_t m_try, ForestParams params);

  [[nodiscard]] double predict(std::span<const double> x) const;
  [[nodiscard]] std::vector<double> predict(const Dataset& data) const;

  [[nodiscard]] const std::vector<Tree>& trees() const { return trees_; }
  [[nodiscard]] std::size_t feature_count() const { return feature_count_; }
  [[nodiscard]] std::size_t m_try() const { return m_try_; }
  [[nodiscard]] const ForestParams& params() const { return params_; }

  [[nodiscard]] nlohmann::ordered_json to_json() const;
  static ForestModel from_json(const nlohmann::ordered_json& doc);

 private:
  std::vector<Tree> trees_;
  std::size_t feature_count_ = 0;
  std::size_t m_try_ = 1;
  ForestParams params_;
};

/// Tree b grows from the substream substream_seed(params.seed, b), so the
/// model does not depend on the order in which trees are built.
ForestModel fit_forest(const Dataset& data, const ForestParams& params);
ForestModel fit_forest(const indicators::FeatureMatrix& features, const ForestParams& params);

}  // namespace minesim::forest
