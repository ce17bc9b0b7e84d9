// Copyright 2026 The ILoSA Authors
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

#include "ilosa/gp/serialize.hpp"

#include "ilosa/common.hpp"

namespace ilosa::gp {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc, Eigen::Index cols) {
  if (!doc.is_array()) throw InvalidArgument("expected an array of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(doc.size()), cols);
  for (size_t i = 0; i < doc.size(); ++i) {
    const json& row = doc[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument("matrix row has the wrong length");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), j) = row[static_cast<size_t>(j)].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& doc) {
  if (!doc.is_array()) throw InvalidArgument("expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (size_t i = 0; i < doc.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = doc[i].get<double>();
  }
  return v;
}

json to_json(const Hyperparameters& hyper) {
  return {{"lengthscales", vector_to_json(hyper.lengthscales)},
          {"signal_variance", hyper.signal_variance},
          {"noise_variance", hyper.noise_variance}};
}

Hyperparameters hyper_from_json(const json& doc) {
  Hyperparameters h;
  h.lengthscales = vector_from_json(doc.at("lengthscales"));
  h.signal_variance = doc.at("signal_variance").get<double>();
  h.noise_variance = doc.at("noise_variance").get<double>();
  h.validate();
  return h;
}

json to_json(const GPModel& model) {
  return {{"inputs", matrix_to_json(model.inputs())},
          {"targets", matrix_to_json(model.targets())},
          {"prior_mean", vector_to_json(model.prior_mean())},
          {"hyper", to_json(model.hyper())},
          {"jitter", model.empty() ? 0.0 : model.factorization().jitter}};
}

GPModel model_from_json(const json& doc) {
  try {
    Hyperparameters hyper = hyper_from_json(doc.at("hyper"));
    Eigen::VectorXd prior = vector_from_json(doc.at("prior_mean"));
    Eigen::MatrixXd inputs = matrix_from_json(doc.at("inputs"), hyper.dim());
    Eigen::MatrixXd targets = matrix_from_json(doc.at("targets"), prior.size());
    const double jitter = doc.value("jitter", 0.0);
    return GPModel::build(std::move(inputs), std::move(targets),
                          std::move(prior), std::move(hyper), jitter);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed GP model document: ") +
                          e.what());
  }
}

}  // namespace ilosa::gp
