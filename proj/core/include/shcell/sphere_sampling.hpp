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

#ifndef SHCELL_SPHERE_SAMPLING_HPP_
#define SHCELL_SPHERE_SAMPLING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace shcell {

// Direction on the unit sphere. theta is the polar angle measured from +z,
// phi the azimuth measured from +x towards +y.
struct UnitDirection {
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d cartesian() const;
  // `v` need not be normalized but must be nonzero.
  static UnitDirection from_cartesian(const Eigen::Vector3d& v);
};

// An ordered set of orientations together with its quality statistics.
// Build through make_orientation_set() so the statistics stay consistent.
struct OrientationSet {
  std::vector<UnitDirection> directions;
  std::uint64_t seed = 0;
  double energy = 0.0;              // sum over pairs of 1 / chord length
  double min_pairwise_angle = 0.0;  // radians

  std::size_t size() const { return directions.size(); }
  std::vector<Eigen::Vector3d> cartesian() const;
};

// Computes energy and minimum angle. Throws InvalidArgument on an empty set
// or on coincident directions. A single direction gets energy 0 and
// min_pairwise_angle pi.
OrientationSet make_orientation_set(std::vector<UnitDirection> directions,
                                    std::uint64_t seed = 0);

// Golden-angle spiral with z_i = 1 - (2i + 1) / n.
OrientationSet fibonacci_lattice(std::size_t n);

struct RepulsionOptions {
  int max_iters = 200;
  double step = 0.0;  // 0 selects 0.5 / n
  double tol = 1e-9;  // stop once the relative energy decrease drops below
  // Called after every accepted iteration with the iteration number and the
  // new energy.
  std::function<void(int, double)> on_iteration;
};

// Electrostatic repulsion: moves every point along the tangential part of the
// summed inverse-square pairwise force, projects back onto the sphere and
// halves the step whenever the Coulomb energy would increase. The returned
// energy never exceeds the input energy.
OrientationSet repulsion_optimize(const OrientationSet& init,
                                  const RepulsionOptions& options = {});

// Sum over i < j of 1 / |x_i - x_j|.
double coulomb_energy(const OrientationSet& set);

// Fibonacci lattice, rotated by a seed-derived random rotation when seed != 0,
// then repulsion-optimized. Fully determined by (n, seed, options).
OrientationSet sample_orientations(std::size_t n, std::uint64_t seed,
                                   const RepulsionOptions& options = {});

// CSV with header `theta,phi`, radians, 9 significant digits.
void write_orientations_csv(const OrientationSet& set, std::ostream& out);
OrientationSet read_orientations_csv(std::istream& in, std::uint64_t seed = 0);

}  // namespace shcell

#endif  // SHCELL_SPHERE_SAMPLING_HPP_
