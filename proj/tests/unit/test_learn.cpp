#include <numeric>

#include "test_util.hpp"

using namespace emgshift;
using namespace emgshift::learn;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  return m;
}

// log N(x; mu, S) + log prior, evaluated from the explicit density.
double gaussian_log_posterior(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::MatrixXd& s,
                              double prior) {
  const Eigen::Index d = x.size();
  const Eigen::VectorXd diff = x - mu;
  const double quad = diff.dot(s.inverse() * diff);
  return -0.5 * quad - 0.5 * std::log(s.determinant()) - 0.5 * static_cast<double>(d) * std::log(2 * std::numbers::pi) +
         std::log(prior);
}

}  // namespace

TEST(Pca, DiagonalVariances) {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd x = random_matrix(4000, 2, rng);
  // Whiten exactly, then scale to variances 9 and 1.
  x.rowwise() -= x.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x.transpose() * x / 3999.0);
  x = x * eig.operatorInverseSqrt();
  x.col(0) *= 3.0;
  const auto m = fit_pca(x, 0.95);
  ASSERT_EQ(m.output_dim(), 2u);
  EXPECT_NEAR(m.explained_ratio(0), 0.9, 1e-9);
  EXPECT_NEAR(m.explained_ratio(1), 0.1, 1e-9);
  EXPECT_NEAR(m.eigenvalues(0), 9.0, 1e-9);
  EXPECT_NEAR(std::abs(m.components(0, 0)), 1.0, 1e-9);
  EXPECT_EQ(fit_pca(x, 0.9).output_dim(), 1u);
}

TEST(Pca, SingleColumn) {
  std::mt19937_64 rng(2);
  const auto m = fit_pca(random_matrix(50, 1, rng), 0.95);
  ASSERT_EQ(m.output_dim(), 1u);
  EXPECT_DOUBLE_EQ(m.explained_ratio(0), 1.0);
}

TEST(Pca, FullThresholdKeepsEverything) {
  std::mt19937_64 rng(3);
  EXPECT_EQ(fit_pca(random_matrix(100, 6, rng), 1.0).output_dim(), 6u);
  EXPECT_THROW(fit_pca(random_matrix(100, 6, rng), 0.0), ParameterError);
  EXPECT_THROW(fit_pca(random_matrix(1, 6, rng), 0.9), ParameterError);
}

TEST(Pca, MatchesExplicitCovarianceEigenvalues) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd mix = random_matrix(5, 5, rng);
    const Eigen::MatrixXd x = random_matrix(60, 5, rng) * mix;
    // Covariance accumulated element by element.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(5, 5);
    const Eigen::RowVectorXd mu = x.colwise().mean();
    for (Eigen::Index a = 0; a < 5; ++a)
      for (Eigen::Index b = 0; b < 5; ++b)
        for (Eigen::Index i = 0; i < 60; ++i) cov(a, b) += (x(i, a) - mu(a)) * (x(i, b) - mu(b)) / 59.0;
    Eigen::EigenSolver<Eigen::MatrixXd> general(cov);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < 5; ++i) ev.push_back(general.eigenvalues()(i).real());
    std::sort(ev.rbegin(), ev.rend());
    const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
    const auto m = fit_pca(x, 1.0);
    for (Eigen::Index i = 0; i < 5; ++i) {
      EXPECT_NEAR(m.explained_ratio(i), ev[static_cast<std::size_t>(i)] / total, 1e-9);
      EXPECT_NEAR(m.eigenvalues(i), ev[static_cast<std::size_t>(i)], 1e-9 * std::max(1.0, total));
    }
  }
}

TEST(Pca, TransformProperties) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd x = random_matrix(200, 4, rng) * random_matrix(4, 4, rng);
  const auto m = fit_pca(x, 1.0);
  const Eigen::MatrixXd z = pca_transform(m, x);
  const Eigen::RowVectorXd zm = z.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double var = (z.col(j).array() - zm(j)).square().sum() / 199.0;
    EXPECT_NEAR(var, m.eigenvalues(j), 1e-9 * std::max(1.0, m.eigenvalues(0)));
  }
  EXPECT_NEAR(pca_transform(m, m.mean).norm(), 0.0, 1e-12);
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j)
      EXPECT_NEAR((z.row(i) - z.row(j)).norm(), (x.row(i) - x.row(j)).norm(), 1e-9);
  EXPECT_NEAR((pca_inverse(m, z) - x).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_THROW(pca_transform(m, Eigen::MatrixXd::Zero(3, 5)), ParameterError);
}

TEST(Pca, ComponentsAreOrthonormalWithSignRule) {
  std::mt19937_64 rng(6);
  const auto m = fit_pca(random_matrix(100, 5, rng) * random_matrix(5, 5, rng), 0.99);
  const Eigen::MatrixXd gram = m.components * m.components.transpose();
  EXPECT_NEAR((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  for (Eigen::Index i = 0; i < m.components.rows(); ++i) {
    Eigen::Index arg;
    m.components.row(i).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(m.components(i, arg), 0.0);
  }
}

TEST(Scaler, ZScoresTrainingColumns) {
  std::mt19937_64 rng(7);
  Eigen::MatrixXd x = random_matrix(100, 3, rng);
  x.col(1) = x.col(1) * 5.0 + Eigen::VectorXd::Constant(100, 2.0);
  x.col(2).setConstant(4.0);
  const auto s = FeatureScaler::fit(x);
  const Eigen::MatrixXd z = s.transform(x);
  EXPECT_NEAR(z.col(1).mean(), 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(z.col(1).array().square().mean()), 1.0, 1e-12);
  EXPECT_EQ(z.col(2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lda, TwoClassGeometry) {
  std::mt19937_64 rng(8);
  Eigen::MatrixXd x = random_matrix(400, 2, rng);
  std::vector<int> y(400);
  for (int i = 0; i < 400; ++i) {
    y[static_cast<std::size_t>(i)] = i % 2 + 1;
    if (i % 2) x(i, 0) += 10.0;
  }
  const auto m = fit_lda(x, y);
  EXPECT_EQ(lda_predict(m, Eigen::Vector2d(1, 0)).label, 1);
  EXPECT_EQ(lda_predict(m, Eigen::Vector2d(9, 0)).label, 2);
  // Boundary crossing along x1 sits near 5.
  double lo = 0, hi = 10;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lda_predict(m, Eigen::Vector2d(mid, 0)).label == 1 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 5.0, 0.3);
}

TEST(Lda, TieGoesToSmallestLabel) {
  Eigen::MatrixXd x(4, 1);
  x << -2, -1, 1, 2;
  const auto m = fit_lda(x, {4, 4, 7, 7}, 0.0);
  EXPECT_EQ(lda_predict(m, Eigen::VectorXd::Zero(1)).label, 4);
  EXPECT_EQ(lda_predict_rows(m, Eigen::MatrixXd::Zero(1, 1))[0], 4);
}

TEST(Lda, RankDeficientFitsWithRidge) {
  std::mt19937_64 rng(9);
  Eigen::MatrixXd base = random_matrix(60, 3, rng);
  Eigen::MatrixXd x(60, 6);
  x << base, base;
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) y[static_cast<std::size_t>(i)] = i % 3 + 1;
  EXPECT_NO_THROW(fit_lda(x, y, 1e-6));
}

TEST(Lda, UnregularizedMatchesExplicitInverse) {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd x = random_matrix(30, 3, rng);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) y[static_cast<std::size_t>(i)] = i < 12 ? 1 : 2;
  const auto m = fit_lda(x, y, 0.0);
  Eigen::Vector3d mu1 = x.topRows(12).colwise().mean(), mu2 = x.bottomRows(18).colwise().mean();
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d d = x.row(i).transpose() - (i < 12 ? mu1 : mu2);
    s += d * d.transpose();
  }
  s /= 28.0;
  const Eigen::Matrix3d inv = s.inverse();
  EXPECT_NEAR((m.pooled_cov - s).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_NEAR((m.weights.row(0).transpose() - inv * mu1).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_NEAR(m.bias(1) - (-0.5 * mu2.dot(inv * mu2) + std::log(18.0 / 30.0)), 0.0, 1e-9);
}

TEST(Lda, AgreesWithGaussianBayesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 5), classes(2, 3), per_class(4, 15);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dim(rng), g = classes(rng);
    std::vector<int> counts;
    for (int c = 0; c < g; ++c) counts.push_back(per_class(rng) + d);
    const int n = std::accumulate(counts.begin(), counts.end(), 0);
    Eigen::MatrixXd x(n, d);
    std::vector<int> y;
    const Eigen::MatrixXd mix = random_matrix(d, d, rng) + 2.0 * Eigen::MatrixXd::Identity(d, d);
    int row = 0;
    for (int c = 0; c < g; ++c) {
      const Eigen::RowVectorXd shift = random_matrix(1, d, rng) * 2.0;
      for (int k = 0; k < counts[static_cast<std::size_t>(c)]; ++k, ++row) {
        x.row(row) = random_matrix(1, d, rng) * mix + shift;
        y.push_back(c + 1);
      }
    }
    const auto m = fit_lda(x, y, 0.0);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    std::vector<Eigen::VectorXd> mu(static_cast<std::size_t>(g), Eigen::VectorXd::Zero(d));
    for (int i = 0; i < n; ++i) mu[static_cast<std::size_t>(y[i] - 1)] += x.row(i).transpose() / counts[static_cast<std::size_t>(y[i] - 1)];
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd diff = x.row(i).transpose() - mu[static_cast<std::size_t>(y[i] - 1)];
      s += diff * diff.transpose() / static_cast<double>(n - g);
    }
    const Eigen::MatrixXd queries = random_matrix(5, d, rng) * 3.0;
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
      std::vector<double> post;
      for (int c = 0; c < g; ++c)
        post.push_back(gaussian_log_posterior(queries.row(q).transpose(), mu[static_cast<std::size_t>(c)], s,
                                              static_cast<double>(counts[static_cast<std::size_t>(c)]) / n));
      auto sorted = post;
      std::sort(sorted.rbegin(), sorted.rend());
      if (sorted[0] - sorted[1] <= 1e-9) continue;
      const int oracle = static_cast<int>(std::max_element(post.begin(), post.end()) - post.begin()) + 1;
      EXPECT_EQ(lda_predict(m, queries.row(q).transpose()).label, oracle);
      ++compared;
    }
  }
  EXPECT_GT(compared, 900);
}

TEST(Lda, Errors) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  EXPECT_THROW(fit_lda(x, {1, 1}), ParameterError);
  EXPECT_THROW(fit_lda(x, {1, 1, 2}), ParameterError);
  const auto m = fit_lda(x, {1, 1, 1});
  Eigen::VectorXd bad(1);
  bad << std::nan("");
  EXPECT_THROW(lda_predict(m, bad), ParameterError);
  EXPECT_THROW(lda_predict(m, Eigen::VectorXd::Zero(2)), ParameterError);
}

TEST(Serialize, RoundTrips) {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd x = random_matrix(40, 3, rng);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) y[static_cast<std::size_t>(i)] = i % 4 + 2;
  const auto lda = fit_lda(x, y);
  const auto lda2 = lda_from_json(nlohmann::json::parse(to_json(lda).dump()));
  EXPECT_EQ(lda2.labels, lda.labels);
  EXPECT_EQ(lda_predict_rows(lda2, x), lda_predict_rows(lda, x));
  EXPECT_NEAR((lda2.weights - lda.weights).cwiseAbs().maxCoeff(), 0.0, 1e-12);

  const auto pca = fit_pca(x, 0.8);
  const auto pca2 = pca_from_json(nlohmann::json::parse(to_json(pca).dump()));
  EXPECT_EQ(pca2.output_dim(), pca.output_dim());
  EXPECT_NEAR((pca_transform(pca2, x) - pca_transform(pca, x)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}
