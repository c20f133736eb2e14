#include "ape/linear_margin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ape/rng.hpp"

namespace ape {

double SigmoidCalibration::operator()(double margin) const {
  const double z = a * margin + b;
  // Numerically stable 1 / (1 + exp(z)).
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double LinearMargin::margin(const Eigen::VectorXd &x) const {
  return weights.dot(((x - mean).array() / scale.array()).matrix()) + bias;
}

Eigen::VectorXd LinearMargin::margins(const Eigen::MatrixXd &X) const {
  Eigen::MatrixXd Z = (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  return (Z * weights).array() + bias;
}

LinearMargin fit_linear_margin(const Eigen::MatrixXd &X, const std::vector<int> &labels,
                               const LinearMarginConfig &config, std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  LinearMargin model;
  model.mean = X.colwise().mean().transpose();
  model.scale = ((X.rowwise() - model.mean.transpose()).array().square().colwise().sum() /
                 static_cast<double>(n))
                    .sqrt()
                    .transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(model.scale[j] > 1e-12)) model.scale[j] = 1.0;
  }
  // Standardized design with a trailing constant column for the bias.
  Eigen::MatrixXd Z(n, d + 1);
  Z.leftCols(d) = (X.rowwise() - model.mean.transpose()).array().rowwise() / model.scale.transpose().array();
  Z.col(d).setOnes();

  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double negatives = static_cast<double>(n) - positives;
  std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  double max_weight = 1.0;
  if (config.balanced && positives > 0 && negatives > 0) {
    const double wp = static_cast<double>(n) / (2.0 * positives);
    const double wn = static_cast<double>(n) / (2.0 * negatives);
    for (Eigen::Index i = 0; i < n; ++i) weight[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] == 1 ? wp : wn;
    max_weight = std::max(wp, wn);
  }

  const double lambda = config.lambda;
  const double radius = std::sqrt(max_weight / lambda);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(d + 1);
  long averaged = 0;
  const long total = static_cast<long>(config.epochs) * n;
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  long t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_in_place(order, rng);
    for (Eigen::Index i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double y = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
      const double m = y * Z.row(i).dot(w);
      w *= 1.0 - eta * lambda;
      if (m < 1.0) w += (eta * weight[static_cast<std::size_t>(i)] * y) * Z.row(i).transpose();
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
      if (2 * t > total) {
        avg += w;
        ++averaged;
      }
    }
  }
  if (averaged > 0) w = avg / static_cast<double>(averaged);
  model.weights = w.head(d);
  model.bias = w[d];
  return model;
}

SigmoidCalibration fit_sigmoid(const Eigen::VectorXd &margins, const std::vector<int> &labels) {
  const Eigen::Index n = margins.size();
  const auto prior1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double prior0 = static_cast<double>(n) - prior1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) target[i] = labels[static_cast<std::size_t>(i)] == 1 ? hi : lo;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = margins[i] * a + b;
      f += z >= 0.0 ? target[i] * z + std::log1p(std::exp(-z)) : (target[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;
  constexpr double kMinStep = 1e-10;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = margins[i] * a + b;
      double p, q;
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += margins[i] * margins[i] * d2;
      h22 += d2;
      h21 += margins[i] * d2;
      const double d1 = target[i] - p;
      g1 += margins[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

}  // namespace ape
