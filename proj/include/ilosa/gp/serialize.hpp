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

#pragma once

#include <nlohmann/json.hpp>

#include "ilosa/gp/model.hpp"

namespace ilosa::gp {

// {"inputs": [[..],..], "targets": [[..],..], "prior_mean": [..],
//  "hyper": {"lengthscales": [..], "signal_variance": s, "noise_variance": n},
//  "jitter": j}
nlohmann::json to_json(const GPModel& model);
GPModel model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Hyperparameters& hyper);
Hyperparameters hyper_from_json(const nlohmann::json& doc);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& doc, Eigen::Index cols);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& doc);

}  // namespace ilosa::gp
