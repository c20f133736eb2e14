#include "ape/tree_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "ape/rng.hpp"

namespace ape {

int DecisionTree::predict(const Eigen::VectorXd &x) const {
  int at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const TreeNode &n = nodes[static_cast<std::size_t>(at)];
    at = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(at)].vote;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const TreeNode &n = nodes[static_cast<std::size_t>(at)];
    if (n.feature >= 0) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

int TreeEnsemble::positive_votes(const Eigen::VectorXd &x) const {
  int votes = 0;
  for (const auto &t : trees) votes += t.predict(x);
  return votes;
}

double TreeEnsemble::probability(const Eigen::VectorXd &x) const {
  if (trees.empty()) return 0.0;
  return static_cast<double>(positive_votes(x)) / static_cast<double>(trees.size());
}

namespace {

double gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child impurity
};

Split best_split_on(const Eigen::MatrixXd &X, const std::vector<int> &labels, std::vector<Eigen::Index> &rows,
                    std::size_t begin, std::size_t end, int feature, int min_leaf) {
  Split best;
  auto first = rows.begin() + static_cast<long>(begin);
  auto last = rows.begin() + static_cast<long>(end);
  std::sort(first, last, [&](Eigen::Index a, Eigen::Index b) {
    const double va = X(a, feature), vb = X(b, feature);
    return va < vb || (va == vb && a < b);
  });
  const double total = static_cast<double>(end - begin);
  double total_pos = 0.0;
  for (auto it = first; it != last; ++it) total_pos += labels[static_cast<std::size_t>(*it)];
  double left_pos = 0.0;
  for (std::size_t k = begin; k + 1 < end; ++k) {
    left_pos += labels[static_cast<std::size_t>(rows[k])];
    const double lv = X(rows[k], feature);
    const double rv = X(rows[k + 1], feature);
    if (!(lv < rv)) continue;
    const double nl = static_cast<double>(k - begin + 1);
    const double nr = total - nl;
    if (nl < min_leaf || nr < min_leaf) continue;
    const double imp = (nl * gini(left_pos, nl) + nr * gini(total_pos - left_pos, nr)) / total;
    if (best.feature < 0 || imp < best.impurity) {
      best.feature = feature;
      best.threshold = lv + (rv - lv) / 2.0;
      best.impurity = imp;
    }
  }
  return best;
}

}  // namespace

DecisionTree grow_tree(const Eigen::MatrixXd &X, const std::vector<int> &labels, std::vector<Eigen::Index> rows,
                       const TreeEnsembleConfig &config, std::uint64_t seed) {
  const int d = static_cast<int>(X.cols());
  int mtry = config.max_features;
  if (mtry == 0) mtry = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d)))));
  if (mtry < 0 || mtry > d) mtry = d;
  const int min_leaf = std::max(1, config.min_leaf);
  std::mt19937_64 rng(seed);

  DecisionTree tree;
  struct Pending {
    int node;
    std::size_t begin, end;
    int depth;
  };
  tree.nodes.push_back({});
  std::vector<Pending> stack{{0, 0, rows.size(), 0}};
  std::vector<int> features(static_cast<std::size_t>(d));
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const double total = static_cast<double>(p.end - p.begin);
    double pos = 0.0;
    for (std::size_t k = p.begin; k < p.end; ++k) pos += labels[static_cast<std::size_t>(rows[k])];
    // Ties vote negative.
    tree.nodes[static_cast<std::size_t>(p.node)].vote = 2.0 * pos > total ? 1 : 0;
    const double parent = gini(pos, total);
    if (parent <= 0.0 || total < 2.0 * min_leaf) continue;
    if (config.max_depth > 0 && p.depth >= config.max_depth) continue;

    std::iota(features.begin(), features.end(), 0);
    shuffle_in_place(features, rng);
    Split best;
    // Sampled features first; fall back to the rest if none of them splits.
    for (int k = 0; k < d; ++k) {
      if (k == mtry && best.feature >= 0) break;
      Split s = best_split_on(X, labels, rows, p.begin, p.end, features[static_cast<std::size_t>(k)], min_leaf);
      if (s.feature >= 0 && (best.feature < 0 || s.impurity < best.impurity)) best = s;
    }
    if (best.feature < 0 || !(best.impurity < parent - 1e-12)) continue;

    auto mid = std::stable_partition(rows.begin() + static_cast<long>(p.begin), rows.begin() + static_cast<long>(p.end),
                                     [&](Eigen::Index r) { return X(r, best.feature) <= best.threshold; });
    const auto split_at = static_cast<std::size_t>(mid - rows.begin());
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    const int right = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    TreeNode &node = tree.nodes[static_cast<std::size_t>(p.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    stack.push_back({right, split_at, p.end, p.depth + 1});
    stack.push_back({left, p.begin, split_at, p.depth + 1});
  }
  return tree;
}

TreeEnsemble fit_tree_ensemble(const Eigen::MatrixXd &X, const std::vector<int> &labels,
                               const TreeEnsembleConfig &config, std::uint64_t seed) {
  TreeEnsemble forest;
  forest.trees.resize(static_cast<std::size_t>(std::max(0, config.trees)));
  const auto n = static_cast<std::size_t>(X.rows());
  auto build = [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    std::vector<Eigen::Index> rows(n);
    if (config.bootstrap) {
      for (auto &r : rows) r = static_cast<Eigen::Index>(uniform_below(rng, n));
    } else {
      std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    }
    forest.trees[t] = grow_tree(X, labels, std::move(rows), config, rng());
  };
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, config.jobs));
  if (jobs == 1 || forest.trees.size() < 2) {
    for (std::size_t t = 0; t < forest.trees.size(); ++t) build(t);
    return forest;
  }
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t t = w; t < forest.trees.size(); t += jobs) build(t);
    });
  }
  for (auto &th : workers) th.join();
  return forest;
}

}  // namespace ape
