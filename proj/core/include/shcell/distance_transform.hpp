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

#ifndef SHCELL_DISTANCE_TRANSFORM_HPP_
#define SHCELL_DISTANCE_TRANSFORM_HPP_

#include <span>

#include "shcell/grid.hpp"

namespace shcell {

// One-dimensional squared distance transform (lower envelope of parabolas).
// `f` holds per-site costs, +inf for sites that are not seeds; `out` receives
// min_p (q - p)^2 + f[p]. Both spans must have equal length.
void squared_distance_1d(std::span<const double> f, std::span<double> out);

// Exact Euclidean distance from every instance voxel to the nearest voxel of
// the volume carrying a different label. Voxels outside the volume are not
// considered. Background voxels get 0; an instance that fills the whole
// volume gets +inf.
ScalarVolume instance_boundary_distance(const LabelVolume& labels);

}  // namespace shcell

#endif  // SHCELL_DISTANCE_TRANSFORM_HPP_
