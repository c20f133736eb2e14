#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ape {

struct TreeEnsembleConfig {
  int trees = 100;
  int max_depth = 0;     // 0: unlimited
  int min_leaf = 1;
  int max_features = 0;  // features tried per split; 0: round(sqrt(d)), < 0: all
  bool bootstrap = true;
  int jobs = 1;          // trees are grown on up to `jobs` threads
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int vote = 0;  // leaf class, 0 or 1
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(const Eigen::VectorXd &x) const;
  int depth() const;
};

struct TreeEnsemble {
  std::vector<DecisionTree> trees;

  int positive_votes(const Eigen::VectorXd &x) const;
  // Fraction of trees voting for class 1.
  double probability(const Eigen::VectorXd &x) const;
};

// Gini-impurity CART tree on 0/1 labels over the rows listed in `rows`
// (duplicates allowed, as produced by bootstrap sampling).
DecisionTree grow_tree(const Eigen::MatrixXd &X, const std::vector<int> &labels, std::vector<Eigen::Index> rows,
                       const TreeEnsembleConfig &config, std::uint64_t seed);

// Tree t draws its bootstrap sample and split features from its own RNG
// stream derived from (seed, t), so results do not depend on `jobs`.
TreeEnsemble fit_tree_ensemble(const Eigen::MatrixXd &X, const std::vector<int> &labels,
                               const TreeEnsembleConfig &config, std::uint64_t seed);

}  // namespace ape
