// Copyright 2026 The shcell Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shcell/run_config.hpp"

#include <fstream>

#include "shcell/error.hpp"

namespace shcell {

void RunConfig::validate() const {
  if (l_max < 0) throw InvalidArgument("l_max must be non-negative");
  if (n_orientations < 1) throw InvalidArgument("n_orientations must be positive");
  if (!(t_det >= 0.0 && t_det <= 1.0)) throw InvalidArgument("t_det must lie in [0, 1]");
  if (d_min < 1) throw InvalidArgument("d_min must be at least 1");
  if (!(lambda_dist >= 0.0) || !(lambda_harm >= 0.0) ||
      !(lambda_dist > 0.0 || lambda_harm > 0.0)) {
    throw InvalidArgument("loss weights must be non-negative with at least one positive");
  }
}

RunConfig apply_config_json(const nlohmann::json& j, RunConfig base) {
  if (!j.is_object()) throw InvalidArgument("run config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "l_max") {
        base.l_max = value.get<int>();
      } else if (key == "n_orientations") {
        base.n_orientations = value.get<std::size_t>();
      } else if (key == "t_det") {
        base.t_det = value.get<double>();
      } else if (key == "d_min") {
        base.d_min = value.get<int>();
      } else if (key == "lambda_dist") {
        base.lambda_dist = value.get<double>();
      } else if (key == "lambda_harm") {
        base.lambda_harm = value.get<double>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else {
        throw InvalidArgument("unknown run config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed run config: ") + e.what());
  }
  base.validate();
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return apply_config_json(j, base);
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"l_max", c.l_max},           {"n_orientations", c.n_orientations},
          {"t_det", c.t_det},           {"d_min", c.d_min},
          {"lambda_dist", c.lambda_dist}, {"lambda_harm", c.lambda_harm},
          {"seed", c.seed}};
}

}  // namespace shcell
