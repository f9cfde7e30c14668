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

#include "shcell/training_objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shcell/distance_transform.hpp"
#include "shcell/error.hpp"

namespace shcell {

DistanceMap compute_distance_map(const LabelVolume& volume) {
  DistanceMap dist = instance_boundary_distance(volume);
  std::map<Label, double> peak;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (volume[i] == 0) continue;
    double& m = peak[volume[i]];
    m = std::max(m, dist[i]);
  }
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (volume[i] == 0) continue;
    const double m = peak[volume[i]];
    dist[i] = std::isfinite(m) ? dist[i] / m : 1.0;
  }
  return dist;
}

EncodingMap compute_encoding_map(const LabelVolume& volume,
                                 const std::map<Label, ShapeEncoding>& encodings) {
  std::size_t channels = 0;
  for (const auto& [id, e] : encodings) {
    if (channels == 0) channels = e.coefficients.size();
    if (e.coefficients.size() != channels) {
      throw InvalidArgument("encodings do not share a common order");
    }
  }
  EncodingMap map(volume.dims(), channels);
  for (std::size_t i = 0; i < volume.size(); ++i) {
    const Label id = volume[i];
    if (id == 0) continue;
    const auto it = encodings.find(id);
    if (it == encodings.end()) {
      throw InvalidArgument("no encoding for instance " + std::to_string(id));
    }
    std::copy(it->second.coefficients.begin(), it->second.coefficients.end(),
              map.at(i).begin());
  }
  return map;
}

double loss_dist(const DistanceMap& target, const DistanceMap& prediction) {
  if (target.dims() != prediction.dims()) {
    throw InvalidArgument("loss_dist: target and prediction extents differ");
  }
  double fg_sum = 0.0, bg_sum = 0.0;
  std::size_t fg = 0, bg = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double err = std::abs(target[i] - prediction[i]);
    if (target[i] >= 0.5) {
      fg_sum += err;
      ++fg;
    } else {
      bg_sum += err;
      ++bg;
    }
  }
  return (fg ? fg_sum / static_cast<double>(fg) : 0.0) +
         (bg ? bg_sum / static_cast<double>(bg) : 0.0);
}

double loss_harm(const EncodingMap& target, const EncodingMap& prediction,
                 const DistanceMap& target_distance) {
  if (target.channels() != prediction.channels()) {
    throw InvalidArgument("loss_harm: channel counts differ");
  }
  if (target.dims() != prediction.dims() || target.dims() != target_distance.dims()) {
    throw InvalidArgument("loss_harm: spatial extents differ");
  }
  const std::size_t channels = target.channels();
  double sum = 0.0;
  std::size_t voxels = 0;
  for (std::size_t i = 0; i < target_distance.size(); ++i) {
    if (!(target_distance[i] > 0.0)) continue;
    const auto t = target.at(i);
    const auto p = prediction.at(i);
    for (std::size_t c = 0; c < channels; ++c) sum += std::abs(t[c] - p[c]);
    ++voxels;
  }
  if (voxels == 0 || channels == 0) return 0.0;
  return sum / (static_cast<double>(voxels) * static_cast<double>(channels));
}

double combine_losses(double l_dist, double l_harm, const LossWeights& weights) {
  if (!(weights.lambda_dist >= 0.0) || !(weights.lambda_harm >= 0.0) ||
      !(weights.lambda_dist > 0.0 || weights.lambda_harm > 0.0)) {
    throw InvalidArgument("loss weights must be non-negative with at least one positive");
  }
  return weights.lambda_dist * l_dist + weights.lambda_harm * l_harm;
}

LossReport loss_combined(const DistanceMap& target_distance,
                         const DistanceMap& predicted_distance,
                         const EncodingMap& target_encoding,
                         const EncodingMap& predicted_encoding, const LossWeights& weights) {
  LossReport r;
  r.loss_dist = loss_dist(target_distance, predicted_distance);
  r.loss_harm = loss_harm(target_encoding, predicted_encoding, target_distance);
  r.loss_combined = combine_losses(r.loss_dist, r.loss_harm, weights);
  return r;
}

}  // namespace shcell
