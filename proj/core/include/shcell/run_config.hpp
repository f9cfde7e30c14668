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

#ifndef SHCELL_RUN_CONFIG_HPP_
#define SHCELL_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace shcell {

// Shared pipeline settings. Defaults are tuned for nuclei:
// order 5 (36 coefficients) over 5000 orientations, t_det 0.5, d_min 10 and
// equal loss weights.
struct RunConfig {
  int l_max = 5;
  std::size_t n_orientations = 5000;
  double t_det = 0.5;
  int d_min = 10;
  double lambda_dist = 0.5;
  double lambda_harm = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// Keys present in `j` override the corresponding fields of `base`; unknown
// keys are rejected.
RunConfig apply_config_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});
nlohmann::json to_json(const RunConfig& config);

}  // namespace shcell

#endif  // SHCELL_RUN_CONFIG_HPP_
