#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ape {

struct LinearMarginConfig {
  double lambda = 1e-3;  // L2 regularization strength
  int epochs = 60;
  bool balanced = true;  // reweight classes to equal total mass
};

// Logistic link p = 1 / (1 + exp(a * margin + b)).
struct SigmoidCalibration {
  double a = -1.0;
  double b = 0.0;

  double operator()(double margin) const;
};

struct LinearMargin {
  Eigen::VectorXd mean;   // feature standardization
  Eigen::VectorXd scale;
  Eigen::VectorXd weights;
  double bias = 0.0;

  double margin(const Eigen::VectorXd &x) const;
  Eigen::VectorXd margins(const Eigen::MatrixXd &X) const;
};

// Hinge-loss linear classifier trained by stochastic subgradient descent
// with step 1/(lambda t), projection onto the ball of radius 1/sqrt(lambda)
// and suffix averaging over the second half of the run. Labels are 0/1.
LinearMargin fit_linear_margin(const Eigen::MatrixXd &X, const std::vector<int> &labels,
                               const LinearMarginConfig &config, std::uint64_t seed);

// Platt scaling with smoothed targets, fitted by Newton's method with
// backtracking.
SigmoidCalibration fit_sigmoid(const Eigen::VectorXd &margins, const std::vector<int> &labels);

}  // namespace ape
