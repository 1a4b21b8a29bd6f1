#pragma once

// JSON model documents. Matrices are nested row arrays.

#include <string>
#include <vector>

#include <json.hpp>

#include "emgshift/learn/lda.hpp"
#include "emgshift/learn/pca.hpp"

namespace emgshift::learn {

namespace detail {
inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : Eigen::Index{0};
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ParameterError("model json: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace detail

inline nlohmann::json to_json(const PcaModel& m) {
  return {{"kind", "pca"},
          {"mean", detail::vector_to_json(m.mean.transpose())},
          {"components", detail::matrix_to_json(m.components)},
          {"explained_ratio", detail::vector_to_json(m.explained_ratio)},
          {"eigenvalues", detail::vector_to_json(m.eigenvalues)},
          {"variance_threshold", m.variance_threshold}};
}

inline nlohmann::json to_json(const LdaModel& m) {
  return {{"kind", "lda"},
          {"labels", m.labels},
          {"class_means", detail::matrix_to_json(m.class_means)},
          {"pooled_cov", detail::matrix_to_json(m.pooled_cov)},
          {"log_priors", detail::vector_to_json(m.log_priors)},
          {"lambda", m.lambda}};
}

inline PcaModel pca_from_json(const nlohmann::json& j) {
  try {
    if (j.at("kind") != "pca") throw ParameterError("model json: kind is not 'pca'");
    PcaModel m;
    m.mean = detail::vector_from_json(j.at("mean")).transpose();
    m.components = detail::matrix_from_json(j.at("components"));
    m.explained_ratio = detail::vector_from_json(j.at("explained_ratio"));
    m.eigenvalues = j.contains("eigenvalues") ? detail::vector_from_json(j.at("eigenvalues"))
                                              : Eigen::VectorXd(m.explained_ratio.size());
    m.variance_threshold = j.value("variance_threshold", 0.95);
    if (m.components.cols() != m.mean.size()) throw ParameterError("model json: pca shape mismatch");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("model json: ") + e.what());
  }
}

inline LdaModel lda_from_json(const nlohmann::json& j) {
  try {
    if (j.at("kind") != "lda") throw ParameterError("model json: kind is not 'lda'");
    LdaModel m;
    m.class_means = detail::matrix_from_json(j.at("class_means"));
    m.pooled_cov = detail::matrix_from_json(j.at("pooled_cov"));
    m.log_priors = detail::vector_from_json(j.at("log_priors"));
    m.lambda = j.at("lambda").get<double>();
    if (j.contains("labels")) {
      m.labels = j.at("labels").get<std::vector<int>>();
    } else {
      for (Eigen::Index g = 0; g < m.class_means.rows(); ++g) m.labels.push_back(static_cast<int>(g) + 1);
    }
    if (static_cast<Eigen::Index>(m.labels.size()) != m.class_means.rows() ||
        m.log_priors.size() != m.class_means.rows() || m.pooled_cov.rows() != m.class_means.cols() ||
        m.pooled_cov.cols() != m.class_means.cols())
      throw ParameterError("model json: lda shape mismatch");
    m.finalize();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("model json: ") + e.what());
  }
}

}  // namespace emgshift::learn
