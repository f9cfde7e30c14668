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

#include "shcell/sphere_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Geometry>

#include "shcell/error.hpp"

namespace shcell {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Structure-of-arrays positions; the pair loops below vectorize over j.
struct Points {
  std::vector<double> x, y, z;

  explicit Points(std::size_t n) : x(n), y(n), z(n) {}
  std::size_t size() const { return x.size(); }
};

Points to_points(const std::vector<UnitDirection>& dirs) {
  Points p(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Eigen::Vector3d v = dirs[i].cartesian();
    p.x[i] = v.x();
    p.y[i] = v.y();
    p.z[i] = v.z();
  }
  return p;
}

[[noreturn]] void throw_coincident(std::size_t i, std::size_t j) {
  throw InvalidArgument("coincident orientations " + std::to_string(i) + " and " +
                        std::to_string(j));
}

// Energy, and optionally the summed pairwise force on each point.
double energy_and_forces(const Points& p, Points* force) {
  const std::size_t n = p.size();
  if (force) {
    std::fill(force->x.begin(), force->x.end(), 0.0);
    std::fill(force->y.begin(), force->y.end(), 0.0);
    std::fill(force->z.begin(), force->z.end(), 0.0);
  }
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double xi = p.x[i], yi = p.y[i], zi = p.z[i];
    double row = 0.0;
    double fx = 0.0, fy = 0.0, fz = 0.0;
    double min_r2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xi - p.x[j];
      const double dy = yi - p.y[j];
      const double dz = zi - p.z[j];
      const double r2 = dx * dx + dy * dy + dz * dz;
      min_r2 = std::min(min_r2, r2);
      const double inv = 1.0 / std::sqrt(r2);
      row += inv;
      if (force) {
        const double inv3 = inv * inv * inv;
        fx += dx * inv3;
        fy += dy * inv3;
        fz += dz * inv3;
        force->x[j] -= dx * inv3;
        force->y[j] -= dy * inv3;
        force->z[j] -= dz * inv3;
      }
    }
    if (min_r2 == 0.0) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (p.x[j] == xi && p.y[j] == yi && p.z[j] == zi) throw_coincident(i, j);
      }
    }
    if (force) {
      force->x[i] += fx;
      force->y[i] += fy;
      force->z[i] += fz;
    }
    energy += row;
  }
  return energy;
}

double min_angle(const Points& p) {
  const std::size_t n = p.size();
  double best = -1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double xi = p.x[i], yi = p.y[i], zi = p.z[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      best = std::max(best, xi * p.x[j] + yi * p.y[j] + zi * p.z[j]);
    }
  }
  return std::acos(std::clamp(best, -1.0, 1.0));
}

std::vector<UnitDirection> to_directions(const Points& p) {
  std::vector<UnitDirection> dirs(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    dirs[i] = UnitDirection::from_cartesian({p.x[i], p.y[i], p.z[i]});
  }
  return dirs;
}

}  // namespace

Eigen::Vector3d UnitDirection::cartesian() const {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

UnitDirection UnitDirection::from_cartesian(const Eigen::Vector3d& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw InvalidArgument("direction from zero vector");
  const double theta = std::acos(std::clamp(v.z() / norm, -1.0, 1.0));
  double phi = std::atan2(v.y(), v.x());
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return {theta, phi};
}

std::vector<Eigen::Vector3d> OrientationSet::cartesian() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(directions.size());
  for (const auto& d : directions) out.push_back(d.cartesian());
  return out;
}

OrientationSet make_orientation_set(std::vector<UnitDirection> directions,
                                    std::uint64_t seed) {
  if (directions.empty()) throw InvalidArgument("orientation set is empty");
  OrientationSet set;
  set.seed = seed;
  set.directions = std::move(directions);
  if (set.size() == 1) {
    set.energy = 0.0;
    set.min_pairwise_angle = std::numbers::pi;
    return set;
  }
  const Points p = to_points(set.directions);
  set.energy = energy_and_forces(p, nullptr);
  set.min_pairwise_angle = min_angle(p);
  return set;
}

OrientationSet fibonacci_lattice(std::size_t n) {
  if (n == 0) throw InvalidArgument("fibonacci_lattice: n must be positive");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<UnitDirection> dirs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double phi = std::fmod(golden_angle * static_cast<double>(i), kTwoPi);
    dirs[i] = {std::acos(z), phi};
  }
  return make_orientation_set(std::move(dirs));
}

double coulomb_energy(const OrientationSet& set) {
  if (set.size() < 2) throw InvalidArgument("coulomb_energy needs at least two points");
  return energy_and_forces(to_points(set.directions), nullptr);
}

OrientationSet repulsion_optimize(const OrientationSet& init, const RepulsionOptions& options) {
  const std::size_t n = init.size();
  if (n < 2) throw InvalidArgument("repulsion_optimize needs at least two points");
  double step = options.step == 0.0 ? 0.5 / static_cast<double>(n) : options.step;
  if (!(step > 0.0)) throw InvalidArgument("repulsion_optimize: step must be positive");

  Points pos = to_points(init.directions);
  Points force(n), trial(n), trial_force(n);
  double energy = energy_and_forces(pos, &force);
  constexpr int kMaxHalvings = 40;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    // Tangential projection; radial force components only change the norm.
    for (std::size_t i = 0; i < n; ++i) {
      const double radial = force.x[i] * pos.x[i] + force.y[i] * pos.y[i] + force.z[i] * pos.z[i];
      force.x[i] -= radial * pos.x[i];
      force.y[i] -= radial * pos.y[i];
      force.z[i] -= radial * pos.z[i];
    }
    bool accepted = false;
    double trial_energy = energy;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = pos.x[i] + step * force.x[i];
        const double y = pos.y[i] + step * force.y[i];
        const double z = pos.z[i] + step * force.z[i];
        const double inv = 1.0 / std::sqrt(x * x + y * y + z * z);
        trial.x[i] = x * inv;
        trial.y[i] = y * inv;
        trial.z[i] = z * inv;
      }
      trial_energy = energy_and_forces(trial, &trial_force);
      if (trial_energy <= energy) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double decrease = (energy - trial_energy) / energy;
    std::swap(pos, trial);
    std::swap(force, trial_force);
    energy = trial_energy;
    if (options.on_iteration) options.on_iteration(iter, energy);
    if (decrease < options.tol) break;
  }

  OrientationSet out = make_orientation_set(to_directions(pos), init.seed);
  // Re-deriving angles can perturb the last bit of a coordinate. Never report
  // a result worse than the input.
  if (out.energy > init.energy) return init;
  return out;
}

OrientationSet sample_orientations(std::size_t n, std::uint64_t seed,
                                   const RepulsionOptions& options) {
  OrientationSet lattice = fibonacci_lattice(n);
  lattice.seed = seed;
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
    q.normalize();
    const Eigen::Matrix3d rot = q.toRotationMatrix();
    std::vector<UnitDirection> dirs;
    dirs.reserve(n);
    for (const auto& d : lattice.directions) {
      dirs.push_back(UnitDirection::from_cartesian(rot * d.cartesian()));
    }
    lattice = make_orientation_set(std::move(dirs), seed);
  }
  if (n < 2) return lattice;
  return repulsion_optimize(lattice, options);
}

void write_orientations_csv(const OrientationSet& set, std::ostream& out) {
  out << "theta,phi\n";
  char buf[64];
  for (const auto& d : set.directions) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", d.theta, d.phi);
    out << buf;
  }
}

OrientationSet read_orientations_csv(std::istream& in, std::uint64_t seed) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("orientation CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "theta,phi") throw InvalidArgument("orientation CSV header must be 'theta,phi'");
  std::vector<UnitDirection> dirs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InvalidArgument("orientation CSV line " + std::to_string(line_no) + ": expected 2 fields");
    }
    char* end = nullptr;
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    const double theta = std::strtod(a.c_str(), &end);
    if (end == a.c_str() || *end != '\0') {
      throw InvalidArgument("orientation CSV line " + std::to_string(line_no) + ": bad theta");
    }
    const double phi = std::strtod(b.c_str(), &end);
    if (end == b.c_str() || *end != '\0') {
      throw InvalidArgument("orientation CSV line " + std::to_string(line_no) + ": bad phi");
    }
    // 9-digit rounding may push a value just past the closed range ends.
    constexpr double kSlack = 1e-8;
    if (!(theta >= -kSlack && theta <= std::numbers::pi + kSlack) ||
        !(phi >= -kSlack && phi <= kTwoPi + kSlack)) {
      throw InvalidArgument("orientation CSV line " + std::to_string(line_no) +
                            ": angle out of range");
    }
    dirs.push_back({theta, phi});
  }
  return make_orientation_set(std::move(dirs), seed);
}

}  // namespace shcell
