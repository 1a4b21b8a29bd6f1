#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emgshift/core.hpp"

namespace emgshift::learn {

/// Column z-scoring fitted on training rows (population std, 1 for flat
/// columns).
struct FeatureScaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static FeatureScaler fit(const Eigen::MatrixXd& x) {
    if (x.rows() < 1) throw ParameterError("feature scaler: no rows");
    FeatureScaler s;
    s.mean = x.colwise().mean();
    s.scale = ((x.rowwise() - s.mean).array().square().colwise().sum() / static_cast<double>(x.rows()))
                  .sqrt()
                  .matrix();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j)
      if (!(s.scale(j) > 0)) s.scale(j) = 1.0;
    return s;
  }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size()) throw ParameterError("feature scaler: dimension mismatch");
    return ((x.rowwise() - mean).array().rowwise() / scale.array()).matrix();
  }
};

struct PcaModel {
  Eigen::RowVectorXd mean;           // d
  Eigen::MatrixXd components;        // k x d, orthonormal rows
  Eigen::VectorXd explained_ratio;   // k, descending
  Eigen::VectorXd eigenvalues;       // k, sample-covariance eigenvalues
  double variance_threshold = 0.95;

  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(components.rows()); }
};

/// Minimal number of leading components whose cumulative explained variance
/// reaches `threshold`.
inline PcaModel fit_pca(const Eigen::MatrixXd& x, double threshold = 0.95) {
  if (x.rows() < 2) throw ParameterError("fit_pca: need at least 2 rows");
  if (!(threshold > 0 && threshold <= 1)) throw ParameterError("fit_pca: threshold must be in (0, 1]");
  const Eigen::Index d = x.cols();
  PcaModel model;
  model.variance_threshold = threshold;
  model.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - model.mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("fit_pca: eigendecomposition failed");
  // Eigen sorts ascending; reverse to descending and clamp round-off negatives.
  Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double total = values.sum();

  Eigen::Index k = d;
  if (total > 0) {
    double cumulative = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      cumulative += values(i) / total;
      if (cumulative >= threshold - 1e-12) {
        k = i + 1;
        break;
      }
    }
  } else {
    k = 1;
  }

  model.components.resize(k, d);
  model.explained_ratio.resize(k);
  model.eigenvalues = values.head(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::VectorXd v = vectors.col(i);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.row(i) = v.transpose();
    model.explained_ratio(i) = total > 0 ? values(i) / total : 1.0;
  }
  return model;
}

inline Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.mean.size())
    throw ParameterError("pca_transform: input has " + std::to_string(x.cols()) +
                         " columns, model expects " + std::to_string(model.mean.size()));
  return (x.rowwise() - model.mean) * model.components.transpose();
}

inline Eigen::MatrixXd pca_inverse(const PcaModel& model, const Eigen::MatrixXd& scores) {
  return (scores * model.components).rowwise() + model.mean;
}

}  // namespace emgshift::learn
