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

#ifndef SHCELL_TRAINING_OBJECTIVES_HPP_
#define SHCELL_TRAINING_OBJECTIVES_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "shcell/grid.hpp"
#include "shcell/shape_codec.hpp"

namespace shcell {

// Per-voxel relative distance to the instance boundary, in [0, 1].
using DistanceMap = ScalarVolume;

// R channels per voxel, stored voxel-major (all channels of a voxel are
// contiguous).
class EncodingMap {
 public:
  EncodingMap() = default;
  EncodingMap(Dims dims, std::size_t channels)
      : dims_(dims), channels_(channels), values_(dims.count() * channels, 0.0) {}

  const Dims& dims() const { return dims_; }
  std::size_t channels() const { return channels_; }

  std::span<double> at(std::size_t voxel) {
    return {values_.data() + voxel * channels_, channels_};
  }
  std::span<const double> at(std::size_t voxel) const {
    return {values_.data() + voxel * channels_, channels_};
  }
  std::vector<double>& storage() { return values_; }
  const std::vector<double>& storage() const { return values_; }

  friend bool operator==(const EncodingMap&, const EncodingMap&) = default;

 private:
  Dims dims_;
  std::size_t channels_ = 0;
  std::vector<double> values_;
};

// Exact Euclidean distance of every instance voxel to the nearest voxel with
// a different label, divided by the instance maximum. Voxels outside the
// volume are not boundary; an instance that touches no other label anywhere
// is set to 1 throughout.
DistanceMap compute_distance_map(const LabelVolume& volume);

// Broadcasts each instance's coefficients to its voxels. Throws
// InvalidArgument when an id has no encoding or the orders differ.
EncodingMap compute_encoding_map(const LabelVolume& volume,
                                 const std::map<Label, ShapeEncoding>& encodings);

struct LossWeights {
  double lambda_dist = 0.5;
  double lambda_harm = 0.5;
};

// Class-balanced L1: mean |x_t - x_p| over {x_t >= 0.5} plus mean over
// {x_t < 0.5}. An empty class contributes 0.
double loss_dist(const DistanceMap& target, const DistanceMap& prediction);

// Mean |y_t - y_p| over voxels with x_t > 0 and over all channels; 0 without
// foreground.
double loss_harm(const EncodingMap& target, const EncodingMap& prediction,
                 const DistanceMap& target_distance);

struct LossReport {
  double loss_dist = 0.0;
  double loss_harm = 0.0;
  double loss_combined = 0.0;
};

LossReport loss_combined(const DistanceMap& target_distance,
                         const DistanceMap& predicted_distance,
                         const EncodingMap& target_encoding,
                         const EncodingMap& predicted_encoding, const LossWeights& weights);

// lambda_dist * l_dist + lambda_harm * l_harm, validating the weights.
double combine_losses(double l_dist, double l_harm, const LossWeights& weights);

}  // namespace shcell

#endif  // SHCELL_TRAINING_OBJECTIVES_HPP_
