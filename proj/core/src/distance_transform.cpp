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

#include "shcell/distance_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "shcell/labels.hpp"

namespace shcell {

void squared_distance_1d(std::span<const double> f, std::span<double> out) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  if (static_cast<std::ptrdiff_t>(out.size()) != n) {
    throw InvalidArgument("squared_distance_1d: span length mismatch");
  }
  // Felzenszwalb & Huttenlocher: sites with infinite cost are skipped.
  std::vector<std::ptrdiff_t> site(static_cast<std::size_t>(n));
  std::vector<double> boundary(static_cast<std::size_t>(n) + 1);
  std::ptrdiff_t k = -1;
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    const double fq = f[q] + static_cast<double>(q * q);
    while (k >= 0) {
      const std::ptrdiff_t p = site[k];
      const double s = (fq - (f[p] + static_cast<double>(p * p))) /
                       (2.0 * static_cast<double>(q - p));
      if (s <= boundary[k]) {
        --k;
      } else {
        ++k;
        site[k] = q;
        boundary[k] = s;
        break;
      }
    }
    if (k < 0) {
      k = 0;
      site[0] = q;
      boundary[0] = -kInf;
    }
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  boundary[k + 1] = kInf;
  std::ptrdiff_t j = 0;
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    while (boundary[j + 1] < static_cast<double>(q)) ++j;
    const std::ptrdiff_t p = site[j];
    out[q] = static_cast<double>((q - p) * (q - p)) + f[p];
  }
}

ScalarVolume instance_boundary_distance(const LabelVolume& labels) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Dims d = labels.dims();
  ScalarVolume result(d, 0.0);

  // The nearest differently-labeled voxel of any instance voxel lies inside
  // the instance bounding box grown by one voxel (clipped to the volume).
  for (const auto& [id, box] : instance_boxes(labels)) {
    const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(box.lo.x - 1, 0);
    const std::ptrdiff_t y0 = std::max<std::ptrdiff_t>(box.lo.y - 1, 0);
    const std::ptrdiff_t z0 = std::max<std::ptrdiff_t>(box.lo.z - 1, 0);
    const std::ptrdiff_t x1 = std::min<std::ptrdiff_t>(box.hi.x + 1, d.x - 1);
    const std::ptrdiff_t y1 = std::min<std::ptrdiff_t>(box.hi.y + 1, d.y - 1);
    const std::ptrdiff_t z1 = std::min<std::ptrdiff_t>(box.hi.z + 1, d.z - 1);
    const Dims local{static_cast<std::size_t>(x1 - x0 + 1), static_cast<std::size_t>(y1 - y0 + 1),
                     static_cast<std::size_t>(z1 - z0 + 1)};
    ScalarVolume cost(local);
    for (std::size_t z = 0; z < local.z; ++z)
      for (std::size_t y = 0; y < local.y; ++y)
        for (std::size_t x = 0; x < local.x; ++x)
          cost(x, y, z) = labels(x + x0, y + y0, z + z0) == id ? kInf : 0.0;

    const std::size_t longest = std::max({local.x, local.y, local.z});
    std::vector<double> line(longest), swept(longest);
    auto sweep = [&](int axis) {
      const std::size_t n = local[axis];
      const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? local.x : local.x * local.y);
      const std::size_t lines = local.count() / n;
      for (std::size_t l = 0; l < lines; ++l) {
        std::size_t base;
        if (axis == 0) {
          base = l * local.x;
        } else if (axis == 1) {
          base = (l % local.x) + (l / local.x) * local.x * local.y;
        } else {
          base = l;
        }
        for (std::size_t i = 0; i < n; ++i) line[i] = cost[base + i * stride];
        squared_distance_1d(std::span<const double>(line.data(), n),
                            std::span<double>(swept.data(), n));
        for (std::size_t i = 0; i < n; ++i) cost[base + i * stride] = swept[i];
      }
    };
    sweep(0);
    sweep(1);
    sweep(2);

    for (std::size_t z = 0; z < local.z; ++z)
      for (std::size_t y = 0; y < local.y; ++y)
        for (std::size_t x = 0; x < local.x; ++x)
          if (labels(x + x0, y + y0, z + z0) == id)
            result(x + x0, y + y0, z + z0) = std::sqrt(cost(x, y, z));
  }
  return result;
}

}  // namespace shcell
