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

#ifndef SHCELL_SYNTH_DATA_HPP_
#define SHCELL_SYNTH_DATA_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <random>

#include "shcell/grid.hpp"
#include "shcell/shape_codec.hpp"

namespace shcell {

struct PhantomSpec {
  Dims dims{256, 128, 128};
  std::size_t n_cells = 30;
  double r_min = 8.0;
  double r_max = 14.0;
  int l_max = 5;
  double perturbation = 0.15;  // relative amplitude of orders l >= 1, in [0, 1)
  double min_separation = 30.0;
  std::uint64_t seed = 0;
};

// Anisotropic Gaussian stand-in for a measured point spread function.
struct Psf {
  std::array<double, 3> sigma{1.0, 1.0, 3.0};  // voxels, per axis (x, y, z)

  static Psf primary() { return {{1.0, 1.0, 3.0}}; }
  // Second preset, used to make test images differ structurally from training images.
  static Psf secondary() { return {{1.5, 1.5, 4.5}}; }
};

struct ScenePair {
  ScalarVolume intensity;  // 1 inside cells, 0 outside
  LabelVolume labels;
  std::map<Label, ShapeEncoding> encodings;  // generating shapes
};

// Mean radius r ~ U[r_min, r_max], c_1 = r sqrt(4 pi), higher coefficients
// i.i.d. N(0, (perturbation * r / (l + 1))^2). Redraws while a 500-direction
// probe finds a radius <= 0.2 r; throws GenerationError after 100 attempts.
// The centroid of the result is the origin.
ShapeEncoding random_shape(std::mt19937_64& rng, double r_min, double r_max, int l_max,
                           double perturbation);

// Rejection-samples cell centers at least min_separation apart, rejecting
// cells that would cross the border, for at most 50 * n_cells attempts.
// Earlier cells keep their voxels where shapes touch.
ScenePair generate_phantom(const PhantomSpec& spec);

// Separable Gaussian blur with mirrored borders; a zero sigma leaves that axis
// untouched.
ScalarVolume apply_psf(const ScalarVolume& image, const Psf& psf);

// Adds i.i.d. N(0, sigma^2), unclipped.
ScalarVolume add_gaussian_noise(const ScalarVolume& image, double sigma, std::uint64_t seed);

}  // namespace shcell

#endif  // SHCELL_SYNTH_DATA_HPP_
