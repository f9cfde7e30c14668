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

#ifndef SHCELL_GRID_HPP_
#define SHCELL_GRID_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shcell/error.hpp"

namespace shcell {

// Voxel extents. Storage order everywhere is x-fastest, then y, then z.
struct Dims {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;

  constexpr std::size_t count() const { return x * y * z; }
  constexpr bool empty() const { return count() == 0; }
  constexpr std::size_t operator[](int axis) const {
    return axis == 0 ? x : (axis == 1 ? y : z);
  }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

// Integer voxel coordinate. Signed so that out-of-bounds probes are
// representable.
struct Voxel {
  std::ptrdiff_t x = 0;
  std::ptrdiff_t y = 0;
  std::ptrdiff_t z = 0;

  friend constexpr bool operator==(const Voxel&, const Voxel&) = default;
  friend constexpr auto operator<=>(const Voxel&, const Voxel&) = default;
};

// Dense 3D grid with value semantics.
template <typename T>
class Grid3 {
 public:
  using value_type = T;

  Grid3() = default;
  explicit Grid3(Dims dims, T fill = T{})
      : dims_(dims), values_(dims.count(), fill) {}
  Grid3(Dims dims, std::vector<T> values) : dims_(dims), values_(std::move(values)) {
    if (values_.size() != dims_.count()) {
      throw InvalidArgument("grid payload size does not match extents");
    }
  }

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims_.x * (y + dims_.y * z);
  }
  Voxel voxel(std::size_t index) const {
    const auto x = index % dims_.x;
    const auto yz = index / dims_.x;
    return {static_cast<std::ptrdiff_t>(x),
            static_cast<std::ptrdiff_t>(yz % dims_.y),
            static_cast<std::ptrdiff_t>(yz / dims_.y)};
  }
  bool contains(std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < static_cast<std::ptrdiff_t>(dims_.x) &&
           y < static_cast<std::ptrdiff_t>(dims_.y) &&
           z < static_cast<std::ptrdiff_t>(dims_.z);
  }
  bool contains(const Voxel& v) const { return contains(v.x, v.y, v.z); }

  T& operator()(std::size_t x, std::size_t y, std::size_t z) {
    return values_[index(x, y, z)];
  }
  const T& operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return values_[index(x, y, z)];
  }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::vector<T>& storage() { return values_; }
  const std::vector<T>& storage() const { return values_; }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  Dims dims_;
  std::vector<T> values_;
};

using Label = std::uint16_t;
using LabelVolume = Grid3<Label>;     // 0 = background, k > 0 = instance id
using Mask = Grid3<std::uint8_t>;     // 0 / 1
using ScalarVolume = Grid3<double>;   // intensities, distance maps
using FloatVolume = Grid3<float>;     // on-disk scalar precision

}  // namespace shcell

#endif  // SHCELL_GRID_HPP_
