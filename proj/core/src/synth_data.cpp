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

#include "shcell/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "shcell/diagnostics.hpp"
#include "shcell/error.hpp"
#include "shcell/sh_basis.hpp"
#include "shcell/sphere_sampling.hpp"

namespace shcell {
namespace {

const std::vector<Eigen::Vector3d>& probe_directions(std::size_t n) {
  static const std::vector<Eigen::Vector3d> small = fibonacci_lattice(500).cartesian();
  static const std::vector<Eigen::Vector3d> large = fibonacci_lattice(2000).cartesian();
  return n <= 500 ? small : large;
}

// Largest radius of the shape, taken from a dense probe plus one voxel and
// capped by the analytic bound.
double extent(const ShapeEncoding& shape) {
  const ShEvaluator eval(shape.l_max);
  double r = 0.0;
  for (const auto& u : probe_directions(2000)) r = std::max(r, eval.expand(u, shape.coefficients));
  return std::min(r + 1.0, radius_upper_bound(shape));
}

// Mirror an out-of-range index back into [0, n), repeating the edge sample.
std::ptrdiff_t mirror(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace

ShapeEncoding random_shape(std::mt19937_64& rng, double r_min, double r_max, int l_max,
                           double perturbation) {
  if (!(r_min > 0.0) || !(r_max >= r_min)) throw InvalidArgument("invalid radius range");
  if (!(perturbation >= 0.0 && perturbation < 1.0)) {
    throw InvalidArgument("perturbation must lie in [0, 1)");
  }
  if (l_max < 0) throw InvalidArgument("l_max must be non-negative");
  const ShEvaluator eval(l_max);
  const auto& probe = probe_directions(500);
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::uniform_real_distribution<double> radius(r_min, r_max);
    const double r = radius(rng);
    ShapeEncoding e = sphere_encoding(Eigen::Vector3d::Zero(), r, l_max);
    for (int l = 1; l <= l_max; ++l) {
      std::normal_distribution<double> coeff(0.0, perturbation * r / (l + 1.0));
      for (int m = -l; m <= l; ++m) {
        e.coefficients[static_cast<std::size_t>(linear_index(l, m) - 1)] =
            perturbation > 0.0 ? coeff(rng) : 0.0;
      }
    }
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& u : probe) smallest = std::min(smallest, eval.expand(u, e.coefficients));
    if (smallest > 0.2 * r) return e;
  }
  throw GenerationError("no admissible shape after 100 draws; perturbation too large");
}

ScenePair generate_phantom(const PhantomSpec& spec) {
  if (spec.n_cells > std::numeric_limits<Label>::max()) {
    throw InvalidArgument("too many cells for 16-bit labels");
  }
  for (int a = 0; a < 3; ++a) {
    if (static_cast<double>(spec.dims[a]) - 1.0 < 2.0 * spec.r_min) {
      throw InvalidArgument("volume too small for a cell of radius " + std::to_string(spec.r_min));
    }
  }
  if (spec.min_separation < 2.0 * spec.r_min) {
    warn("min_separation below 2 * r_min; cells may touch");
  }
  std::mt19937_64 rng(spec.seed);
  ScenePair scene;
  scene.labels = LabelVolume(spec.dims, 0);
  scene.intensity = ScalarVolume(spec.dims, 0.0);

  std::vector<Eigen::Vector3d> centers;
  const std::size_t max_attempts = 50 * spec.n_cells;
  for (std::size_t attempt = 0; attempt < max_attempts && centers.size() < spec.n_cells;
       ++attempt) {
    ShapeEncoding shape = random_shape(rng, spec.r_min, spec.r_max, spec.l_max, spec.perturbation);
    const double reach = extent(shape);
    Eigen::Vector3d c;
    bool fits = true;
    for (int a = 0; a < 3; ++a) {
      const double hi = static_cast<double>(spec.dims[a]) - 1.0 - reach;
      std::uniform_real_distribution<double> pos(reach, std::max(reach, hi));
      c[a] = pos(rng);
      if (hi < reach) fits = false;
    }
    if (!fits) continue;
    const bool spaced = std::all_of(centers.begin(), centers.end(), [&](const auto& o) {
      return (o - c).norm() >= spec.min_separation;
    });
    if (!spaced) continue;

    centers.push_back(c);
    shape.centroid = c;
    const auto id = static_cast<Label>(centers.size());
    rasterize(shape, spec.dims, [&](std::size_t i, double) {
      if (scene.labels[i] == 0) {
        scene.labels[i] = id;
        scene.intensity[i] = 1.0;
      }
    });
    scene.encodings[id] = std::move(shape);
  }
  return scene;
}

ScalarVolume apply_psf(const ScalarVolume& image, const Psf& psf) {
  ScalarVolume current = image;
  const Dims d = image.dims();
  if (d.empty()) return current;
  for (int axis = 0; axis < 3; ++axis) {
    const double sigma = psf.sigma[axis];
    if (!(sigma >= 0.0)) throw InvalidArgument("PSF sigma must be non-negative");
    if (sigma == 0.0) continue;
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
      const double w = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
      kernel[static_cast<std::size_t>(k + radius)] = w;
      total += w;
    }
    for (double& w : kernel) w /= total;

    const auto n = static_cast<std::ptrdiff_t>(d[axis]);
    const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? d.x : d.x * d.y);
    const std::size_t lines = d.count() / d[axis];
    ScalarVolume next(d, 0.0);
    std::vector<double> line(static_cast<std::size_t>(n));
    for (std::size_t l = 0; l < lines; ++l) {
      std::size_t base;
      if (axis == 0) {
        base = l * d.x;
      } else if (axis == 1) {
        base = (l % d.x) + (l / d.x) * d.x * d.y;
      } else {
        base = l;
      }
      for (std::ptrdiff_t i = 0; i < n; ++i) line[i] = current[base + i * stride];
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
          acc += kernel[static_cast<std::size_t>(k + radius)] * line[mirror(i + k, n)];
        }
        next[base + i * stride] = acc;
      }
    }
    current = std::move(next);
  }
  return current;
}

ScalarVolume add_gaussian_noise(const ScalarVolume& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  ScalarVolume out = image;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : out.storage()) v += noise(rng);
  return out;
}

}  // namespace shcell
