#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emgshift/core.hpp"

namespace emgshift::learn {

/// Shared-covariance Gaussian classifier.
///
/// The pooled within-class covariance gets a ridge of
/// lambda * trace(cov) / d on its diagonal, so rank-deficient problems
/// (d >= N, duplicated features) still factorize.
struct LdaModel {
  std::vector<int> labels;      // ascending; row g of class_means belongs to labels[g]
  Eigen::MatrixXd class_means;  // G x d
  Eigen::MatrixXd pooled_cov;   // d x d, regularized
  Eigen::VectorXd log_priors;   // G
  double lambda = 1e-6;

  // Derived from the above by finalize().
  Eigen::MatrixXd weights;  // G x d, Sigma^-1 mu_g
  Eigen::VectorXd bias;     // G

  std::size_t dim() const { return static_cast<std::size_t>(class_means.cols()); }
  std::size_t num_classes() const { return labels.size(); }

  void finalize() {
    Eigen::LLT<Eigen::MatrixXd> llt(pooled_cov);
    if (llt.info() != Eigen::Success)
      throw NumericalError("lda: pooled covariance is not positive definite (increase lambda)");
    weights = llt.solve(class_means.transpose()).transpose();
    bias.resize(class_means.rows());
    for (Eigen::Index g = 0; g < class_means.rows(); ++g)
      bias(g) = -0.5 * weights.row(g).dot(class_means.row(g)) + log_priors(g);
  }
};

struct LdaPrediction {
  int label = 0;
  Eigen::VectorXd scores;  // one discriminant per class, in model.labels order
};

inline LdaModel fit_lda(const Eigen::MatrixXd& x, const std::vector<int>& y, double lambda = 1e-6) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw ParameterError("fit_lda: " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(y.size()) + " labels");
  if (!(lambda >= 0)) throw ParameterError("fit_lda: lambda must be >= 0");
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(static_cast<Eigen::Index>(i));
  if (members.empty()) throw ParameterError("fit_lda: no training data");
  for (const auto& [label, rows] : members)
    if (rows.size() < 2)
      throw ParameterError("fit_lda: class " + std::to_string(label) + " has fewer than 2 samples");

  const Eigen::Index d = x.cols();
  const auto g_count = static_cast<Eigen::Index>(members.size());
  const auto n = static_cast<double>(x.rows());

  LdaModel model;
  model.lambda = lambda;
  model.class_means.resize(g_count, d);
  model.log_priors.resize(g_count);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index g = 0;
  for (const auto& [label, rows] : members) {
    model.labels.push_back(label);
    Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r) block.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    model.class_means.row(g) = block.colwise().mean();
    block.rowwise() -= model.class_means.row(g);
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    model.log_priors(g) = std::log(static_cast<double>(rows.size()) / n);
    ++g;
  }
  scatter = scatter.selfadjointView<Eigen::Lower>();
  const double dof = n - static_cast<double>(g_count);
  model.pooled_cov = dof > 0 ? Eigen::MatrixXd(scatter / dof) : scatter;
  double ridge_scale = model.pooled_cov.trace() / static_cast<double>(d);
  if (!(ridge_scale > 0)) ridge_scale = 1.0;
  model.pooled_cov.diagonal().array() += lambda * ridge_scale;
  model.finalize();
  return model;
}

/// Largest discriminant wins; ties go to the smallest label.
inline LdaPrediction lda_predict(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != model.dim())
    throw ParameterError("lda_predict: input dimension " + std::to_string(x.size()) +
                         " does not match model (" + std::to_string(model.dim()) + ")");
  if (!x.allFinite()) throw ParameterError("lda_predict: non-finite input");
  LdaPrediction p;
  p.scores = model.weights * x + model.bias;
  Eigen::Index best = 0;
  for (Eigen::Index g = 1; g < p.scores.size(); ++g)
    if (p.scores(g) > p.scores(best)) best = g;
  p.label = model.labels[static_cast<std::size_t>(best)];
  return p;
}

/// Batch prediction over rows.
inline std::vector<int> lda_predict_rows(const LdaModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != model.dim())
    throw ParameterError("lda_predict: input dimension mismatch");
  if (!x.allFinite()) throw ParameterError("lda_predict: non-finite input");
  const Eigen::MatrixXd scores = (x * model.weights.transpose()).rowwise() + model.bias.transpose();
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index g = 1; g < scores.cols(); ++g)
      if (scores(i, g) > scores(i, best)) best = g;
    out[static_cast<std::size_t>(i)] = model.labels[static_cast<std::size_t>(best)];
  }
  return out;
}

}  // namespace emgshift::learn
