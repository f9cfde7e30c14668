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

#include "shcell/shape_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shcell/distance_transform.hpp"
#include "shcell/error.hpp"
#include "shcell/labels.hpp"

namespace shcell {
namespace {

const double kSqrt4Pi = std::sqrt(4.0 * std::numbers::pi);

Label label_at(const LabelVolume& volume, const Eigen::Vector3d& p) {
  const auto x = static_cast<std::ptrdiff_t>(std::floor(p.x() + 0.5));
  const auto y = static_cast<std::ptrdiff_t>(std::floor(p.y() + 0.5));
  const auto z = static_cast<std::ptrdiff_t>(std::floor(p.z() + 0.5));
  if (!volume.contains(x, y, z)) return 0;
  return volume(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                static_cast<std::size_t>(z));
}

// Distance along `dir` from `origin` to the first exit from `id`.
double first_exit(const LabelVolume& volume, Label id, const Eigen::Vector3d& origin,
                  const Eigen::Vector3d& dir, double max_distance) {
  double inside = 0.0;
  double t = kRayStep;
  while (t <= max_distance && label_at(volume, origin + t * dir) == id) {
    inside = t;
    t += kRayStep;
  }
  double outside = t;
  for (int i = 0; i < 12; ++i) {
    const double mid = 0.5 * (inside + outside);
    if (label_at(volume, origin + mid * dir) == id) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return 0.5 * (inside + outside);
}

}  // namespace

double ShapeEncoding::mean_radius() const {
  return coefficients.empty() ? 0.0 : coefficients.front() / kSqrt4Pi;
}

ShapeEncoding sphere_encoding(const Eigen::Vector3d& centroid, double radius, int l_max) {
  ShapeEncoding e;
  e.centroid = centroid;
  e.l_max = l_max;
  e.coefficients.assign(coefficient_count(l_max), 0.0);
  e.coefficients[0] = radius * kSqrt4Pi;
  return e;
}

Eigen::Vector3d instance_centroid(const LabelVolume& volume, Label id) {
  const Dims d = volume.dims();
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  std::size_t i = 0;
  for (std::size_t z = 0; z < d.z; ++z) {
    for (std::size_t y = 0; y < d.y; ++y) {
      for (std::size_t x = 0; x < d.x; ++x, ++i) {
        if (id != 0 && volume[i] == id) {
          sum += Eigen::Vector3d(static_cast<double>(x), static_cast<double>(y),
                                 static_cast<double>(z));
          ++count;
        }
      }
    }
  }
  if (count == 0) throw NotFound("instance " + std::to_string(id) + " not present");
  return sum / static_cast<double>(count);
}

RadialSampleSet sample_radii(const LabelVolume& volume, Label id,
                             const Eigen::Vector3d& centroid,
                             const OrientationSet& orientations) {
  if (id == 0 || label_at(volume, centroid) != id) {
    throw DegenerateCentroid("centroid of instance " + std::to_string(id) +
                             " lies outside the instance");
  }
  const Dims d = volume.dims();
  const double max_distance =
      std::sqrt(static_cast<double>(d.x * d.x + d.y * d.y + d.z * d.z)) + 1.0;
  RadialSampleSet samples;
  samples.orientations = &orientations;
  samples.radii.reserve(orientations.size());
  for (const auto& dir : orientations.directions) {
    samples.radii.push_back(first_exit(volume, id, centroid, dir.cartesian(), max_distance));
  }
  return samples;
}

CoefficientSolver::CoefficientSolver(const BasisMatrix& basis) : basis_(basis) {
  if (basis_.values.rows() == 0) throw InvalidArgument("empty basis matrix");
  qr_.compute(basis_.values);
  if (qr_.rank() < basis_.values.cols()) {
    throw NumericalRankError("basis matrix is rank deficient: rank " +
                                 std::to_string(qr_.rank()) + " of " +
                                 std::to_string(basis_.values.cols()),
                             qr_.rank());
  }
}

CoefficientFit CoefficientSolver::solve(const std::vector<double>& radii) const {
  if (static_cast<Eigen::Index>(radii.size()) != basis_.values.rows()) {
    throw InvalidArgument("radius count " + std::to_string(radii.size()) +
                          " does not match basis rows " +
                          std::to_string(basis_.values.rows()));
  }
  const Eigen::Map<const Eigen::VectorXd> r(radii.data(), static_cast<Eigen::Index>(radii.size()));
  const Eigen::VectorXd c = qr_.solve(r);
  CoefficientFit fit;
  fit.coefficients.assign(c.data(), c.data() + c.size());
  fit.residual_norm = (basis_.values * c - r).norm();
  return fit;
}

CoefficientFit fit_coefficients(const RadialSampleSet& samples, const BasisMatrix& basis) {
  if (samples.orientations && samples.orientations->size() != basis.orientation_count) {
    throw InvalidArgument("samples and basis use different orientation sets");
  }
  return CoefficientSolver(basis).solve(samples.radii);
}

double evaluate_radius(const ShapeEncoding& encoding, const UnitDirection& dir) {
  return evaluate_radius(encoding, dir.cartesian());
}

double evaluate_radius(const ShapeEncoding& encoding, const Eigen::Vector3d& unit) {
  const ShEvaluator eval(encoding.l_max);
  return eval.expand(unit, encoding.coefficients);
}

double radius_upper_bound(const ShapeEncoding& encoding) {
  // sum_m Y_lm^2 = (2l + 1) / (4 pi), so |sum_m c_lm Y_lm| <= |c_l| sqrt((2l+1)/(4 pi)).
  double bound = 0.0;
  const auto& c = encoding.coefficients;
  for (int l = 0; static_cast<std::size_t>(l * l) < c.size(); ++l) {
    double norm2 = 0.0;
    for (int m = -l; m <= l; ++m) {
      const auto j = static_cast<std::size_t>(l * l + l + m);
      if (j < c.size()) norm2 += c[j] * c[j];
    }
    bound += std::sqrt(norm2 * (2.0 * l + 1.0) / (4.0 * std::numbers::pi));
  }
  return bound;
}

void rasterize(const ShapeEncoding& encoding, Dims dims,
               const std::function<void(std::size_t, double)>& visit) {
  if (dims.empty()) return;
  const double bound = radius_upper_bound(encoding);
  if (!(bound > 0.0)) return;
  const ShEvaluator eval(encoding.l_max);
  const Eigen::Vector3d& c = encoding.centroid;
  std::ptrdiff_t lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::floor(c[a] - bound)));
    hi[a] = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(dims[a]) - 1,
                                     static_cast<std::ptrdiff_t>(std::ceil(c[a] + bound)));
    if (lo[a] > hi[a]) return;
  }
  const bool positive_mean = encoding.mean_radius() > 0.0;
  // The voxel holding the centroid, foreground for any positive mean radius.
  const std::ptrdiff_t cx = static_cast<std::ptrdiff_t>(std::floor(c.x() + 0.5));
  const std::ptrdiff_t cy = static_cast<std::ptrdiff_t>(std::floor(c.y() + 0.5));
  const std::ptrdiff_t cz = static_cast<std::ptrdiff_t>(std::floor(c.z() + 0.5));
  for (std::ptrdiff_t z = lo[2]; z <= hi[2]; ++z) {
    for (std::ptrdiff_t y = lo[1]; y <= hi[1]; ++y) {
      for (std::ptrdiff_t x = lo[0]; x <= hi[0]; ++x) {
        const Eigen::Vector3d d(static_cast<double>(x) - c.x(), static_cast<double>(y) - c.y(),
                                static_cast<double>(z) - c.z());
        const double rho = d.norm();
        const std::size_t index = static_cast<std::size_t>(x) +
                                  dims.x * (static_cast<std::size_t>(y) +
                                            dims.y * static_cast<std::size_t>(z));
        if (x == cx && y == cy && z == cz) {
          if (positive_mean) visit(index, 0.0);
          continue;
        }
        if (rho > bound) continue;
        const double r = eval.expand(d / rho, encoding.coefficients);
        if (r > 0.0 && rho <= r) visit(index, rho / r);
      }
    }
  }
}

Mask decode_to_volume(const ShapeEncoding& encoding, Dims dims) {
  Mask mask(dims, 0);
  rasterize(encoding, dims, [&](std::size_t i, double) { mask[i] = 1; });
  return mask;
}

TriangleMesh decode_to_mesh(const ShapeEncoding& encoding, const OrientationSet& orientations) {
  const std::vector<Eigen::Vector3d> dirs = orientations.cartesian();
  TriangleMesh mesh;
  mesh.faces = convex_hull(dirs);
  const ShEvaluator eval(encoding.l_max);
  mesh.vertices.reserve(dirs.size());
  for (const auto& u : dirs) {
    const double r = std::max(0.0, eval.expand(u, encoding.coefficients));
    mesh.vertices.push_back(encoding.centroid + r * u);
  }
  return mesh;
}

ShapeEncoding encode_instance_about(const LabelVolume& volume, Label id,
                                    const Eigen::Vector3d& center,
                                    const OrientationSet& orientations,
                                    const CoefficientSolver& solver) {
  const RadialSampleSet samples = sample_radii(volume, id, center, orientations);
  if (orientations.size() != solver.basis().orientation_count) {
    throw InvalidArgument("samples and basis use different orientation sets");
  }
  ShapeEncoding e;
  e.centroid = center;
  e.l_max = solver.basis().l_max;
  e.coefficients = solver.solve(samples.radii).coefficients;
  return e;
}

ShapeEncoding encode_instance(const LabelVolume& volume, Label id,
                              const OrientationSet& orientations,
                              const CoefficientSolver& solver) {
  return encode_instance_about(volume, id, instance_centroid(volume, id), orientations, solver);
}

ShapeEncoding encode_instance(const LabelVolume& volume, Label id,
                              const OrientationSet& orientations, const BasisMatrix& basis) {
  const Eigen::Vector3d centroid = instance_centroid(volume, id);
  return encode_instance_about(volume, id, centroid, orientations, CoefficientSolver(basis));
}

Voxel deepest_voxel(const LabelVolume& volume, Label id) {
  const auto boxes = instance_boxes(volume);
  const auto it = boxes.find(id);
  if (id == 0 || it == boxes.end()) {
    throw NotFound("instance " + std::to_string(id) + " not present");
  }
  const Box& b = it->second;
  const Dims d = volume.dims();
  const Voxel lo{std::max<std::ptrdiff_t>(b.lo.x - 1, 0), std::max<std::ptrdiff_t>(b.lo.y - 1, 0),
                 std::max<std::ptrdiff_t>(b.lo.z - 1, 0)};
  const Voxel hi{std::min<std::ptrdiff_t>(b.hi.x + 1, d.x - 1),
                 std::min<std::ptrdiff_t>(b.hi.y + 1, d.y - 1),
                 std::min<std::ptrdiff_t>(b.hi.z + 1, d.z - 1)};
  LabelVolume crop(Dims{static_cast<std::size_t>(hi.x - lo.x + 1),
                        static_cast<std::size_t>(hi.y - lo.y + 1),
                        static_cast<std::size_t>(hi.z - lo.z + 1)});
  for (std::size_t z = 0; z < crop.dims().z; ++z)
    for (std::size_t y = 0; y < crop.dims().y; ++y)
      for (std::size_t x = 0; x < crop.dims().x; ++x)
        crop(x, y, z) = volume(x + lo.x, y + lo.y, z + lo.z) == id ? 1 : 0;
  const ScalarVolume dist = instance_boundary_distance(crop);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (crop[i] != 0 && dist[i] > best_value) best_value = dist[i], best = i;
  }
  const Voxel v = crop.voxel(best);
  return {v.x + lo.x, v.y + lo.y, v.z + lo.z};
}

}  // namespace shcell
