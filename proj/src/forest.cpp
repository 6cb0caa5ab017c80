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

#include "crashrisk/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "crashrisk/csv.hpp"
#include "crashrisk/error.hpp"
#include "crashrisk/simd/kernels.hpp"

namespace crashrisk::forest {

namespace {

using features::DesignMatrix;

// Row indices sorted by (value, row) for every feature, computed once per
// training design and filtered per tree.
struct Presorted {
  std::vector<std::vector<std::uint32_t>> order;
};

Presorted presort(const DesignMatrix& d) {
  Presorted p;
  p.order.resize(d.cols());
  for (std::size_t f = 0; f < d.cols(); ++f) {
    auto& o = p.order[f];
    o.resize(d.rows());
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return d.x(a, f) < d.x(b, f); });
  }
  return p;
}

void validate(const DesignMatrix& d, const ForestParams& params) {
  if (d.rows() == 0 || d.cols() == 0) throw Error(ErrorKind::usage, "empty_design", "forest needs a non-empty design");
  if (params.n_estimators == 0) throw Error(ErrorKind::usage, "bad_params", "n_estimators must be at least 1");
  if (params.min_samples_leaf == 0) throw Error(ErrorKind::usage, "bad_params", "min_samples_leaf must be at least 1");
  if (params.mtry && (*params.mtry == 0 || *params.mtry > d.cols())) {
    throw Error(ErrorKind::usage, "bad_params", "mtry must lie in [1, number of features]");
  }
  if (params.max_depth && *params.max_depth == 0) {
    throw Error(ErrorKind::usage, "bad_params", "max_depth must be at least 1 when set");
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const DesignMatrix& d, std::span<const std::uint32_t> counts, const ForestParams& params, Rng& rng,
              const Presorted& pre)
      : d_(d), counts_(counts), params_(params), rng_(rng), p_(d.cols()) {
    lists_.resize(p_);
    for (std::size_t f = 0; f < p_; ++f) {
      auto& l = lists_[f];
      l.reserve(d.rows());
      for (std::uint32_t r : pre.order[f]) {
        if (counts_[r] > 0) l.push_back(r);
      }
    }
    goes_left_.assign(d.rows(), 0);
    scratch_.resize(lists_.empty() ? 0 : lists_[0].size());
    feature_pool_.resize(p_);
    tree_.gain_by_feature.assign(p_, 0.0);
  }

  Tree build() {
    const std::size_t m = lists_[0].size();
    if (m == 0) throw Error(ErrorKind::usage, "empty_sample", "tree sample is empty");
    struct Pending {
      std::int32_t node;
      std::size_t begin, end, depth;
    };
    std::vector<Pending> stack;
    tree_.nodes.emplace_back();
    stack.push_back({0, 0, m, 0});
    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      const auto split = grow(job.node, job.begin, job.end, job.depth);
      if (!split) continue;
      const auto left = static_cast<std::int32_t>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      tree_.nodes.emplace_back();
      tree_.nodes[static_cast<std::size_t>(job.node)].left = left;
      tree_.nodes[static_cast<std::size_t>(job.node)].right = left + 1;
      // Right first so the left subtree is expanded first (node order is stable).
      stack.push_back({left + 1, job.begin + *split, job.end, job.depth + 1});
      stack.push_back({left, job.begin, job.begin + *split, job.depth + 1});
    }
    return std::move(tree_);
  }

 private:
  // Fills node `id`; returns the number of rows of the left child on a split.
  std::optional<std::size_t> grow(std::int32_t id, std::size_t begin, std::size_t end, std::size_t depth) {
    const auto& rows = lists_[0];
    double w = 0.0, s = 0.0;
    double y_min = d_.response[rows[begin]], y_max = y_min;
    for (std::size_t k = begin; k < end; ++k) {
      const std::uint32_t r = rows[k];
      const double c = counts_[r];
      const double y = d_.response[r];
      w += c;
      s += c * y;
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
    const double mean = s / w;
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.value = mean;
    node.n = static_cast<std::uint32_t>(w);

    const auto min_leaf = static_cast<double>(params_.min_samples_leaf);
    if (y_min == y_max || w < 2.0 * min_leaf || (params_.max_depth && depth >= *params_.max_depth)) {
      return std::nullopt;
    }
    double sst = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::uint32_t r = rows[k];
      const double dy = d_.response[r] - mean;
      sst += counts_[r] * dy * dy;
    }

    const std::size_t mtry = params_.mtry ? *params_.mtry : p_;
    std::span<const std::size_t> candidates;
    if (mtry >= p_) {
      std::iota(feature_pool_.begin(), feature_pool_.end(), std::size_t{0});
      candidates = feature_pool_;
    } else {
      std::iota(feature_pool_.begin(), feature_pool_.end(), std::size_t{0});
      for (std::size_t i = 0; i < mtry; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng_.uniform_index(p_ - i));
        std::swap(feature_pool_[i], feature_pool_[j]);
      }
      std::sort(feature_pool_.begin(), feature_pool_.begin() + static_cast<std::ptrdiff_t>(mtry));
      candidates = std::span<const std::size_t>(feature_pool_.data(), mtry);
    }

    double best_gain = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;
    for (const std::size_t f : candidates) {
      const auto& list = lists_[f];
      if (d_.x(list[begin], f) == d_.x(list[end - 1], f)) continue;  // constant in node
      double wl = 0.0, sl = 0.0;
      for (std::size_t k = begin; k + 1 < end; ++k) {
        const std::uint32_t r = list[k];
        wl += counts_[r];
        sl += counts_[r] * d_.response[r];
        const double xv = d_.x(r, f);
        const double xn = d_.x(list[k + 1], f);
        if (!(xv < xn)) continue;
        const double wr = w - wl;
        if (wl < min_leaf || wr < min_leaf) continue;
        const double diff = sl / wl - (s - sl) / wr;
        const double gain = wl * wr / w * diff * diff;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          double mid = xv + 0.5 * (xn - xv);
          if (!(mid < xn)) mid = xv;
          best_threshold = mid;
          found = true;
        }
      }
    }
    if (!found || !(best_gain > 1e-12 * sst)) return std::nullopt;

    node.feature = static_cast<std::int32_t>(best_feature);
    node.threshold = best_threshold;
    tree_.gain_by_feature[best_feature] += best_gain;

    const auto& split_list = lists_[best_feature];
    std::size_t n_left = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::uint32_t r = split_list[k];
      const bool left = d_.x(r, best_feature) <= best_threshold;
      goes_left_[r] = left ? 1 : 0;
      n_left += left;
    }
    for (std::size_t f = 0; f < p_; ++f) {
      auto& list = lists_[f];
      std::size_t li = begin, ri = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const std::uint32_t r = list[k];
        if (goes_left_[r]) {
          list[li++] = r;
        } else {
          scratch_[ri++] = r;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(ri),
                list.begin() + static_cast<std::ptrdiff_t>(li));
    }
    return n_left;
  }

  const DesignMatrix& d_;
  std::span<const std::uint32_t> counts_;
  const ForestParams& params_;
  Rng& rng_;
  std::size_t p_;
  std::vector<std::vector<std::uint32_t>> lists_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::size_t> feature_pool_;
  Tree tree_;
};

std::size_t depth_from(const Tree& t, std::int32_t id) {
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{id, 0}};
  while (!stack.empty()) {
    const auto [node, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    const auto& n = t.nodes[static_cast<std::size_t>(node)];
    if (!n.is_leaf()) {
      stack.push_back({n.left, depth + 1});
      stack.push_back({n.right, depth + 1});
    }
  }
  return best;
}

std::optional<std::size_t> precip_index(const ForestModel& m) {
  for (std::size_t j = 0; j < m.feature_names.size(); ++j) {
    if (m.feature_names[j] == features::kPrecipLabel) return j;
  }
  return std::nullopt;
}

void sum_importance(ForestModel& model) {
  const std::size_t p = model.feature_names.size();
  model.importance.assign(p, 0.0);
  for (const auto& t : model.trees) {
    if (t.gain_by_feature.size() != p) throw Error(ErrorKind::usage, "no_gains", "tree split gains are not available");
    for (std::size_t f = 0; f < p; ++f) model.importance[f] += t.gain_by_feature[f];
  }
  const double total = std::accumulate(model.importance.begin(), model.importance.end(), 0.0);
  if (total > 0.0) {
    for (double& v : model.importance) v /= total;
  }
}

}  // namespace

double Tree::predict(std::span<const double> x) const {
  std::size_t id = 0;
  for (;;) {
    const TreeNode& n = nodes[id];
    if (n.is_leaf()) return n.value;
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
}

std::size_t Tree::depth() const { return nodes.empty() ? 0 : depth_from(*this, 0); }

std::vector<std::uint32_t> bootstrap_counts(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.uniform_index(n))];
  return counts;
}

Tree fit_tree(const DesignMatrix& rows, std::span<const std::uint32_t> counts, const ForestParams& params, Rng& rng) {
  validate(rows, params);
  if (counts.size() != rows.rows()) throw Error(ErrorKind::usage, "shape", "counts length does not match rows");
  const auto pre = presort(rows);
  return TreeBuilder(rows, counts, params, rng, pre).build();
}

Tree fit_tree(const DesignMatrix& rows, const ForestParams& params, Rng& rng) {
  const std::vector<std::uint32_t> ones(rows.rows(), 1);
  return fit_tree(rows, ones, params, rng);
}

ForestModel fit_forest(const DesignMatrix& design, const ForestParams& params, std::uint64_t seed) {
  validate(design, params);
  if (design.rows() > 0xFFFFFFFFull) throw Error(ErrorKind::usage, "too_large", "design has too many rows");
  const auto pre = presort(design);
  ForestModel model;
  model.params = params;
  model.seed = seed;
  model.feature_names = design.column_names;
  model.schema = design.schema;
  model.n_train = design.rows();
  model.trees.resize(params.n_estimators);

  auto train_one = [&](std::size_t t) {
    Rng rng = substream(seed, "tree", t);
    std::vector<std::uint32_t> counts =
        params.bootstrap ? bootstrap_counts(design.rows(), rng) : std::vector<std::uint32_t>(design.rows(), 1);
    model.trees[t] = TreeBuilder(design, counts, params, rng, pre).build();
  };
  const std::size_t workers = std::min(std::max<std::size_t>(params.threads, 1), params.n_estimators);
  if (workers <= 1) {
    for (std::size_t t = 0; t < params.n_estimators; ++t) train_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = next++; t < params.n_estimators; t = next++) train_one(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  sum_importance(model);
  if (const auto pc = precip_index(model)) {
    double s = 0.0;
    for (std::size_t i = 0; i < design.rows(); ++i) s += design.x(i, *pc);
    model.mean_precip = s / static_cast<double>(design.rows());
  }
  return model;
}

ForestModel truncate(const ForestModel& model, std::size_t n_trees) {
  if (n_trees == 0 || n_trees > model.trees.size()) {
    throw Error(ErrorKind::usage, "bad_params", "cannot keep " + std::to_string(n_trees) + " of " +
                                                    std::to_string(model.trees.size()) + " trees");
  }
  ForestModel out = model;
  out.trees.resize(n_trees);
  out.params.n_estimators = n_trees;
  sum_importance(out);
  return out;
}

double predict_forest(const ForestModel& model, std::span<const double> x, std::optional<std::size_t> n_trees) {
  if (x.size() != model.feature_names.size()) {
    throw Error(ErrorKind::usage, "dimension_mismatch",
                "feature vector has " + std::to_string(x.size()) + " entries, forest expects " +
                    std::to_string(model.feature_names.size()));
  }
  const std::size_t k = std::min(n_trees.value_or(model.trees.size()), model.trees.size());
  if (k == 0) throw Error(ErrorKind::usage, "empty_forest", "forest has no trees");
  double s = 0.0;
  for (std::size_t t = 0; t < k; ++t) s += model.trees[t].predict(x);
  return s / static_cast<double>(k);
}

std::vector<double> predict_forest(const ForestModel& model, const DesignMatrix& design,
                                   std::optional<std::size_t> n_trees) {
  std::vector<double> out(design.rows());
  for (std::size_t i = 0; i < design.rows(); ++i) out[i] = predict_forest(model, design.row(i), n_trees);
  return out;
}

Evaluation evaluate(std::span<const double> predicted, std::span<const double> actual) {
  if (actual.empty() || predicted.size() != actual.size()) {
    throw Error(ErrorKind::usage, "empty_design", "evaluation needs equally sized, non-empty inputs");
  }
  const auto n = static_cast<double>(actual.size());
  Evaluation e;
  e.mae = simd::sum_abs_diff(predicted, actual) / n;
  const double mean = simd::sum(actual) / n;
  const std::vector<double> centre(actual.size(), mean);
  const double sst = simd::sum_sq_diff(actual, centre);
  const double sse = simd::sum_sq_diff(predicted, actual);
  if (sst > 0.0) {
    e.r2 = 1.0 - sse / sst;
  } else {
    e.r2_defined = false;
    e.r2 = 0.0;
  }
  return e;
}

Evaluation evaluate(const ForestModel& model, const DesignMatrix& test) {
  return evaluate(predict_forest(model, test), test.response);
}

SweepResult estimator_sweep(const DesignMatrix& design, std::span<const std::size_t> sizes, std::uint64_t seed,
                            const ForestParams& params, double test_fraction) {
  if (sizes.empty()) throw Error(ErrorKind::usage, "bad_sweep", "sweep needs at least one forest size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw Error(ErrorKind::usage, "bad_sweep", "sweep sizes must be positive and strictly ascending");
    }
  }
  const auto [train, test] = features::split(design, test_fraction, seed);
  ForestParams p = params;
  p.n_estimators = sizes.back();
  SweepResult result;
  result.largest = fit_forest(train, p, seed);

  // Running per-row sums over trees, in tree order, so each prefix mean is
  // bit-identical to predict_forest with that many trees.
  std::vector<double> sums(test.rows(), 0.0), pred(test.rows());
  std::size_t done = 0;
  for (const std::size_t k : sizes) {
    for (; done < k; ++done) {
      const auto& tree = result.largest.trees[done];
      for (std::size_t i = 0; i < test.rows(); ++i) sums[i] += tree.predict(test.row(i));
    }
    for (std::size_t i = 0; i < test.rows(); ++i) pred[i] = sums[i] / static_cast<double>(k);
    const auto e = evaluate(pred, test.response);
    result.rows.push_back({k, e.mae, e.r2, e.r2_defined});
  }
  return result;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "n_trees,mae,r2\n";
  for (const auto& r : rows) {
    out << r.n_trees << ',' << csv::format_double(r.mae) << ',' << (r.r2_defined ? csv::format_double(r.r2) : "")
        << '\n';
  }
}

void write_importance_csv(std::ostream& out, const ForestModel& model) {
  out << "feature,importance\n";
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    out << csv::escape(model.feature_names[j]) << ',' << csv::format_double(model.importance[j]) << '\n';
  }
}

}  // namespace crashrisk::forest
