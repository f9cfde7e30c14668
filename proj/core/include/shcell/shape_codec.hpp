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

#ifndef SHCELL_SHAPE_CODEC_HPP_
#define SHCELL_SHAPE_CODEC_HPP_

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "shcell/grid.hpp"
#include "shcell/mesh.hpp"
#include "shcell/sh_basis.hpp"
#include "shcell/sphere_sampling.hpp"

namespace shcell {

// Spherical-harmonic description of one star-convex instance: the radius
// along direction u from `centroid` is sum_j coefficients[j] * Y_j(u).
// Coefficients are in voxels.
struct ShapeEncoding {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();  // voxel coordinates (x, y, z)
  int l_max = 0;
  std::vector<double> coefficients;  // (l_max + 1)^2 entries, c_1 first

  double mean_radius() const;
};

// A sphere of `radius` voxels.
ShapeEncoding sphere_encoding(const Eigen::Vector3d& centroid, double radius, int l_max = 0);

struct RadialSampleSet {
  const OrientationSet* orientations = nullptr;
  std::vector<double> radii;  // voxels, one per orientation
};

// Mean voxel-center coordinate of instance `id`; NotFound when absent.
Eigen::Vector3d instance_centroid(const LabelVolume& volume, Label id);

// Ray march step used by sample_radii, in voxels.
inline constexpr double kRayStep = 0.25;

// Casts one ray per orientation from `centroid` and records the distance of
// the first exit from instance `id`. Labels are looked up nearest neighbor,
// and voxels outside the volume count as exits. The exit found by the
// 0.25-voxel march is localized further by bisection inside the last step.
// Throws DegenerateCentroid when the centroid voxel does not carry `id`.
RadialSampleSet sample_radii(const LabelVolume& volume, Label id,
                             const Eigen::Vector3d& centroid,
                             const OrientationSet& orientations);

struct CoefficientFit {
  std::vector<double> coefficients;
  double residual_norm = 0.0;
};

// Least-squares solver bound to one basis matrix. The column-pivoting
// Householder QR is computed once and reused for every right-hand side.
class CoefficientSolver {
 public:
  explicit CoefficientSolver(const BasisMatrix& basis);

  const BasisMatrix& basis() const { return basis_; }
  // Throws InvalidArgument when `radii` does not match the basis rows.
  CoefficientFit solve(const std::vector<double>& radii) const;

 private:
  BasisMatrix basis_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

// argmin_c |B c - r|_2. Throws NumericalRankError for a rank-deficient basis.
CoefficientFit fit_coefficients(const RadialSampleSet& samples, const BasisMatrix& basis);

// sum_j c_j Y_j(dir); not clamped.
double evaluate_radius(const ShapeEncoding& encoding, const UnitDirection& dir);
double evaluate_radius(const ShapeEncoding& encoding, const Eigen::Vector3d& unit);

// Upper bound on the radius in any direction (addition theorem per order).
double radius_upper_bound(const ShapeEncoding& encoding);

// Visits every voxel inside the decoded shape with its linear index and its
// normalized radial coordinate rho / r(direction) in [0, 1]. A voxel is inside
// iff |v - centroid| <= max(0, r(direction)); the voxel at the centroid itself
// is inside whenever the mean radius is positive. Shapes are cropped to `dims`.
void rasterize(const ShapeEncoding& encoding, Dims dims,
               const std::function<void(std::size_t, double)>& visit);

Mask decode_to_volume(const ShapeEncoding& encoding, Dims dims);

// Vertices centroid + max(0, r_i) u_i per orientation, faces from the convex
// hull of the unit directions.
TriangleMesh decode_to_mesh(const ShapeEncoding& encoding, const OrientationSet& orientations);

// instance_centroid -> sample_radii -> fit_coefficients.
ShapeEncoding encode_instance(const LabelVolume& volume, Label id,
                              const OrientationSet& orientations, const BasisMatrix& basis);
ShapeEncoding encode_instance(const LabelVolume& volume, Label id,
                              const OrientationSet& orientations, const CoefficientSolver& solver);

// Same as encode_instance but rays start from `center` instead of the centroid.
ShapeEncoding encode_instance_about(const LabelVolume& volume, Label id,
                                    const Eigen::Vector3d& center,
                                    const OrientationSet& orientations,
                                    const CoefficientSolver& solver);

// Voxel of instance `id` farthest from any other label (first in storage
// order on ties): the fallback ray origin for shapes whose centroid lies
// outside them.
Voxel deepest_voxel(const LabelVolume& volume, Label id);

}  // namespace shcell

#endif  // SHCELL_SHAPE_CODEC_HPP_
