// Copyright 2026 The crashrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "crashrisk/features.hpp"
#include "crashrisk/rng.hpp"

namespace crashrisk::forest {

struct ForestParams {
  std::size_t n_estimators = 100;
  std::optional<std::size_t> max_depth;  // none: grow until pure or min_samples_leaf
  std::size_t min_samples_leaf = 1;
  std::optional<std::size_t> mtry;       // none: all features (bagging)
  bool bootstrap = true;                 // false only for tests
  std::size_t threads = 1;               // training parallelism; results do not depend on it

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Flat tree node. Leaves have feature == -1.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;  // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;      // mean training response of the node
  std::uint32_t n = 0;     // training draws reaching the node

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  /// SSE reduction per feature accumulated while growing. Not persisted.
  std::vector<double> gain_by_feature;

  double predict(std::span<const double> x) const;
  std::size_t depth() const;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  features::FeatureSchema schema;
  std::vector<double> importance;  // sums to 1, or all zero when no split occurred
  double mean_precip = 0.0;        // training mean of the precipitation column
  std::size_t n_train = 0;
};

/// n draws with replacement from [0, n), returned as per-row counts.
std::vector<std::uint32_t> bootstrap_counts(std::size_t n, Rng& rng);

/// CART regression tree over the rows with a positive count (counts act as
/// multiplicities). Splits maximize the SSE reduction over `mtry` randomly
/// chosen features at midpoints of consecutive distinct values; ties go to
/// the lowest feature index, then the lowest threshold.
Tree fit_tree(const features::DesignMatrix& rows, std::span<const std::uint32_t> counts, const ForestParams& params,
              Rng& rng);
/// Every row once.
Tree fit_tree(const features::DesignMatrix& rows, const ForestParams& params, Rng& rng);

/// Tree t is trained on a bootstrap sample drawn from substream (seed, "tree", t).
ForestModel fit_forest(const features::DesignMatrix& design, const ForestParams& params, std::uint64_t seed);

/// The first `n_trees` trees of a freshly fitted forest, with importance
/// recomputed over them. Equals fitting `n_trees` directly.
ForestModel truncate(const ForestModel& model, std::size_t n_trees);

/// Mean of the first `n_trees` trees (all when unset).
double predict_forest(const ForestModel& model, std::span<const double> x,
                      std::optional<std::size_t> n_trees = std::nullopt);
std::vector<double> predict_forest(const ForestModel& model, const features::DesignMatrix& design,
                                   std::optional<std::size_t> n_trees = std::nullopt);

struct Evaluation {
  double mae = 0.0;
  double r2 = 0.0;
  bool r2_defined = true;  // false when the test response is constant
};

Evaluation evaluate(std::span<const double> predicted, std::span<const double> actual);
Evaluation evaluate(const ForestModel& model, const features::DesignMatrix& test);

struct SweepRow {
  std::size_t n_trees = 0;
  double mae = 0.0;
  double r2 = 0.0;
  bool r2_defined = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  ForestModel largest;  // the forest with max(sizes) trees, trained on the split's training rows
};

/// One fixed seeded train/test split shared by all sizes. Forests are nested:
/// a forest of k trees is the first k trees of the largest one, which equals
/// fitting k trees directly.
SweepResult estimator_sweep(const features::DesignMatrix& design, std::span<const std::size_t> sizes,
                            std::uint64_t seed, const ForestParams& params, double test_fraction = 0.25);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_importance_csv(std::ostream& out, const ForestModel& model);

}  // namespace crashrisk::forest
