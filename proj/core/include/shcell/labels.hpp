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

#ifndef SHCELL_LABELS_HPP_
#define SHCELL_LABELS_HPP_

#include <algorithm>
#include <cstddef>
#include <map>

#include "shcell/grid.hpp"

namespace shcell {

// Inclusive voxel bounding box.
struct Box {
  Voxel lo;
  Voxel hi;
  std::size_t voxel_count = 0;  // voxels carrying the label, not box volume
};

// Bounding box and size of every nonzero label, keyed by id.
inline std::map<Label, Box> instance_boxes(const LabelVolume& labels) {
  std::map<Label, Box> boxes;
  const Dims d = labels.dims();
  std::size_t i = 0;
  for (std::size_t z = 0; z < d.z; ++z) {
    for (std::size_t y = 0; y < d.y; ++y) {
      for (std::size_t x = 0; x < d.x; ++x, ++i) {
        const Label id = labels[i];
        if (id == 0) continue;
        const Voxel v{static_cast<std::ptrdiff_t>(x), static_cast<std::ptrdiff_t>(y),
                      static_cast<std::ptrdiff_t>(z)};
        auto [it, inserted] = boxes.try_emplace(id, Box{v, v, 0});
        Box& b = it->second;
        if (!inserted) {
          b.lo = {std::min(b.lo.x, v.x), std::min(b.lo.y, v.y), std::min(b.lo.z, v.z)};
          b.hi = {std::max(b.hi.x, v.x), std::max(b.hi.y, v.y), std::max(b.hi.z, v.z)};
        }
        ++b.voxel_count;
      }
    }
  }
  return boxes;
}

}  // namespace shcell

#endif  // SHCELL_LABELS_HPP_
