#include <cmath>

#include <Eigen/Cholesky>

#include "desirev/error.hpp"
#include "desirev/models.hpp"

namespace desirev {

namespace {

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

void LogisticRegression::fit(const Eigen::MatrixXd& x, const std::vector<int>& labels, double c,
                             std::size_t max_iterations, double tolerance) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw TrainingError("feature/label count mismatch");
  if (c <= 0) throw ConfigError("inverse regularization strength must be positive");
  const double lambda = 1.0 / c;

  // theta = [w; b]
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  Eigen::MatrixXd xa(n, p + 1);
  xa.leftCols(p) = x;
  xa.col(p).setOnes();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0;

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd z = xa * theta;
    Eigen::VectorXd prob(n), curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(z[i]);
      curvature[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-12);
    }
    Eigen::VectorXd grad = xa.transpose() * (prob - y);
    grad.head(p) += lambda * theta.head(p);
    Eigen::MatrixXd hess = xa.transpose() * curvature.asDiagonal() * xa;
    hess.diagonal().head(p).array() += lambda;
    hess(p, p) += 1e-12;
    const Eigen::VectorXd delta = hess.ldlt().solve(grad);
    theta -= delta;
    if (delta.lpNorm<Eigen::Infinity>() < tolerance) break;
  }
  weights_ = theta.head(p);
  intercept_ = theta[p];
}

double LogisticRegression::probability(const Eigen::VectorXd& x) const {
  if (x.size() != weights_.size()) throw TrainingError("feature dimension does not match the fitted model");
  return sigmoid(weights_.dot(x) + intercept_);
}

void LogisticRegression::set(Eigen::VectorXd weights, double intercept) {
  weights_ = std::move(weights);
  intercept_ = intercept;
}

Eigen::VectorXd baseline_features(const TrainingInstance& instance, const VectorTable& table) {
  return avg_word_vectors(instance.original, instance.revised, &table).cast<double>();
}

Prediction LogRegBaseline::predict(const TrainingInstance& instance) const {
  const double p = model_.probability(baseline_features(instance, *table_));
  return {p, binarize(p)};
}

LogRegBaseline train_logreg_baseline(std::span<const TrainingInstance> instances,
                                     std::shared_ptr<const VectorTable> table, std::uint64_t /*seed*/, double c) {
  if (!table) throw DataError("the logistic-regression baseline needs a word-vector table");
  require_both_classes(instances);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(instances.size()), static_cast<Eigen::Index>(2 * table->dim()));
  std::vector<int> labels;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = baseline_features(instances[i], *table).transpose();
    labels.push_back(instances[i].label == Desirability::desirable ? 1 : 0);
  }
  LogisticRegression model;
  model.fit(x, labels, c);
  return LogRegBaseline(std::move(table), std::move(model));
}

}  // namespace desirev
