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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "shcell/error.hpp"
#include "test_support.hpp"

namespace shcell {
namespace {

using testing::ball_volume;
using testing::cached_orientations;
using testing::ellipsoid_volume;
using testing::kPi;

const double kSqrt4Pi = std::sqrt(4 * kPi);

double mask_dice(const Mask& a, const Mask& b) {
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] != 0;
    nb += b[i] != 0;
    both += a[i] != 0 && b[i] != 0;
  }
  return na + nb == 0 ? 1.0 : 2.0 * both / (na + nb);
}

std::size_t count(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m.values()) n += v != 0;
  return n;
}

LabelVolume from_mask(const Mask& m, Label id = 1) {
  LabelVolume v(m.dims());
  for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i] ? id : 0;
  return v;
}

// Smooth random encoding with mean radius r and 1/(l+1) decay.
ShapeEncoding random_encoding(std::mt19937_64& rng, double r, int l_max, Eigen::Vector3d c) {
  std::normal_distribution<double> g;
  ShapeEncoding e;
  e.centroid = c;
  e.l_max = l_max;
  e.coefficients.assign(coefficient_count(l_max), 0.0);
  e.coefficients[0] = r * kSqrt4Pi;
  for (const auto& h : index_table(l_max))
    if (h.l > 0) e.coefficients[h.j - 1] = 0.12 * r / (h.l + 1) * g(rng);
  return e;
}

const OrientationSet& orient() { return cached_orientations(5000); }

TEST(InstanceCentroid, HandExamples) {
  LabelVolume v({8, 8, 8});
  v(3, 4, 5) = 2;
  EXPECT_EQ(instance_centroid(v, 2), Eigen::Vector3d(3, 4, 5));

  LabelVolume block({4, 4, 4});
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) block(x, y, z) = 1;
  EXPECT_TRUE(instance_centroid(block, 1).isApprox(Eigen::Vector3d(0.5, 0.5, 0.5)));

  LabelVolume ell({3, 3, 1});
  ell(0, 0, 0) = ell(1, 0, 0) = ell(0, 1, 0) = 1;
  const Eigen::Vector3d c = instance_centroid(ell, 1);
  EXPECT_NEAR(c.x(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(c.y(), 1.0 / 3, 1e-15);
  EXPECT_EQ(c.z(), 0.0);

  EXPECT_THROW(instance_centroid(ell, 7), NotFound);
}

TEST(SampleRadii, DigitalBall) {
  const LabelVolume v = ball_volume({32, 32, 32}, {15.5, 15.5, 15.5}, 10.0);
  const RadialSampleSet s = sample_radii(v, 1, instance_centroid(v, 1), orient());
  ASSERT_EQ(s.radii.size(), orient().size());
  EXPECT_EQ(s.orientations, &orient());
  for (double r : s.radii) EXPECT_NEAR(r, 10.0, 0.75);
}

TEST(SampleRadii, DigitalBallVoxelCentred) {
  // A ray grazing a boundary voxel corner can exit up to half a voxel diagonal
  // away from the continuous sphere.
  const LabelVolume v = ball_volume({32, 32, 32}, {16, 16, 16}, 10.0);
  const RadialSampleSet s = sample_radii(v, 1, instance_centroid(v, 1), orient());
  double mean = 0.0;
  for (double r : s.radii) {
    EXPECT_NEAR(r, 10.0, std::sqrt(3.0) / 2);
    mean += r / s.radii.size();
  }
  EXPECT_NEAR(mean, 10.0, 0.1);
}

TEST(SampleRadii, SingleVoxelStaysInCell) {
  LabelVolume v({5, 5, 5});
  v(2, 2, 2) = 1;
  const RadialSampleSet s = sample_radii(v, 1, instance_centroid(v, 1), orient());
  for (double r : s.radii) {
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, std::sqrt(3.0) / 2 + 1e-9);
  }
}

TEST(SampleRadii, FirstExitAcrossGap) {
  // A shell around a core: the ray must stop at the first exit.
  LabelVolume v = ball_volume({40, 40, 40}, {20, 20, 20}, 14.0);
  const LabelVolume hole = ball_volume({40, 40, 40}, {20, 20, 20}, 8.0);
  const LabelVolume core = ball_volume({40, 40, 40}, {20, 20, 20}, 4.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (hole[i] && !core[i]) v[i] = 0;
  const RadialSampleSet s = sample_radii(v, 1, {20, 20, 20}, cached_orientations(300));
  for (double r : s.radii) EXPECT_NEAR(r, 4.0, 0.75);
}

TEST(SampleRadii, TouchingNeighbourCountsAsExit) {
  LabelVolume v({30, 10, 10});
  for (int z = 0; z < 10; ++z)
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 30; ++x) v(x, y, z) = x < 15 ? 1 : 2;
  const OrientationSet plus_x = make_orientation_set({{kPi / 2, 0.0}});
  const RadialSampleSet s = sample_radii(v, 1, {10, 5, 5}, plus_x);
  EXPECT_NEAR(s.radii[0], 4.5, 0.25);
}

TEST(SampleRadii, CrescentIsDegenerate) {
  LabelVolume v = ball_volume({40, 40, 40}, {20, 20, 20}, 12.0);
  const LabelVolume bite = ball_volume({40, 40, 40}, {25, 20, 20}, 11.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (bite[i]) v[i] = 0;
  const Eigen::Vector3d c = instance_centroid(v, 1);
  EXPECT_THROW(sample_radii(v, 1, c, orient()), DegenerateCentroid);
}

TEST(FitCoefficients, ConstantRadii) {
  const BasisMatrix b = build_basis_matrix(orient(), 5);
  RadialSampleSet s{&orient(), std::vector<double>(orient().size(), 10.0)};
  const CoefficientFit fit = fit_coefficients(s, b);
  EXPECT_NEAR(fit.coefficients[0], 10 * kSqrt4Pi, 1e-9);
  EXPECT_NEAR(fit.coefficients[0], 35.4491, 1e-4);
  for (std::size_t j = 1; j < fit.coefficients.size(); ++j) EXPECT_LT(std::abs(fit.coefficients[j]), 1e-6);
  EXPECT_LT(fit.residual_norm, 1e-8);
}

TEST(FitCoefficients, ExactModelRecovered) {
  const BasisMatrix b = build_basis_matrix(orient(), 5);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXd c(36);
  for (int j = 0; j < 36; ++j) c[j] = g(rng);
  const Eigen::VectorXd r = b.values * c;
  const CoefficientFit fit =
      fit_coefficients({&orient(), std::vector<double>(r.data(), r.data() + r.size())}, b);
  const Eigen::Map<const Eigen::VectorXd> got(fit.coefficients.data(), 36);
  EXPECT_LT((got - c).norm(), 1e-8 * c.norm());
}

TEST(FitCoefficients, RankDeficientBasis) {
  testing::CaptureWarnings quiet;
  const OrientationSet few = fibonacci_lattice(10);
  try {
    CoefficientSolver solver(build_basis_matrix(few, 5));
    FAIL() << "expected a rank error";
  } catch (const NumericalRankError& e) {
    EXPECT_LE(e.effective_rank(), 10);
  }
}

TEST(FitCoefficients, SizeMismatch) {
  const CoefficientSolver solver(build_basis_matrix(orient(), 2));
  EXPECT_THROW(solver.solve(std::vector<double>(3, 1.0)), InvalidArgument);
}

TEST(FitCoefficients, EllipsoidResidualFallsWithOrder) {
  const LabelVolume v = ellipsoid_volume({64, 48, 40}, {32, 24, 20}, {20, 15, 10});
  const RadialSampleSet s = sample_radii(v, 1, instance_centroid(v, 1), orient());
  double prev = INFINITY;
  for (int l = 0; l <= 5; ++l) {
    const double res = fit_coefficients(s, build_basis_matrix(orient(), l)).residual_norm;
    EXPECT_LE(res, prev + 1e-9) << "l=" << l;
    prev = res;
  }
}

TEST(EvaluateRadius, Basics) {
  const ShapeEncoding sphere = sphere_encoding({0, 0, 0}, 10.0, 3);
  EXPECT_NEAR(evaluate_radius(sphere, UnitDirection{0.7, 1.9}), 10.0, 1e-12);
  EXPECT_NEAR(sphere.mean_radius(), 10.0, 1e-12);
  ShapeEncoding c1_only{{0, 0, 0}, 0, {35.4491}};
  EXPECT_NEAR(evaluate_radius(c1_only, UnitDirection{2.0, 0.3}), 10.0, 1e-4);
  ShapeEncoding zero{{0, 0, 0}, 2, std::vector<double>(9, 0.0)};
  EXPECT_EQ(evaluate_radius(zero, UnitDirection{1.0, 1.0}), 0.0);
}

TEST(EvaluateRadius, EllipsoidSemiAxis) {
  const LabelVolume v = ellipsoid_volume({64, 48, 40}, {32, 24, 20}, {20, 15, 10});
  const ShapeEncoding e = encode_instance(v, 1, orient(), build_basis_matrix(orient(), 5));
  EXPECT_NEAR(evaluate_radius(e, UnitDirection{kPi / 2, 0.0}), 20.0, 1.0);
  EXPECT_NEAR(evaluate_radius(e, Eigen::Vector3d(0, 0, 1)), 10.0, 1.0);
}

TEST(RadiusUpperBound, DominatesProbes) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    const ShapeEncoding e = random_encoding(rng, 12.0, 5, {0, 0, 0});
    const double bound = radius_upper_bound(e);
    for (const auto& d : cached_orientations(300).directions) EXPECT_LE(evaluate_radius(e, d), bound);
  }
}

TEST(DecodeToVolume, SphereVoxelCount) {
  const Mask m = decode_to_volume(sphere_encoding({16, 16, 16}, 10.0), {32, 32, 32});
  const double ball = 4.0 / 3.0 * kPi * 1000.0;
  EXPECT_NEAR(static_cast<double>(count(m)), ball, 0.02 * ball);
}

TEST(DecodeToVolume, ZeroCoefficientsAreEmpty) {
  ShapeEncoding zero{{5, 5, 5}, 1, std::vector<double>(4, 0.0)};
  EXPECT_EQ(count(decode_to_volume(zero, {10, 10, 10})), 0u);
}

TEST(DecodeToVolume, CentroidVoxelIncluded) {
  const Mask m = decode_to_volume(sphere_encoding({4.3, 4.6, 4.1}, 0.2), {10, 10, 10});
  EXPECT_EQ(count(m), 1u);
  EXPECT_EQ(m(4, 5, 4), 1);
}

TEST(DecodeToVolume, CroppedAtBorders) {
  const Mask m = decode_to_volume(sphere_encoding({0, 0, 0}, 6.0), {10, 10, 10});
  const Mask full = decode_to_volume(sphere_encoding({10, 10, 10}, 6.0), {21, 21, 21});
  std::size_t octant = 0;
  for (int z = 10; z < 21; ++z)
    for (int y = 10; y < 21; ++y)
      for (int x = 10; x < 21; ++x) octant += full(x, y, z);
  EXPECT_EQ(count(m), octant);
}

TEST(DecodeToVolume, MatchesBruteForceRadialTest) {
  std::mt19937_64 rng(4);
  const ShapeEncoding e = random_encoding(rng, 7.0, 4, {10.2, 9.7, 11.1});
  const Mask m = decode_to_volume(e, {22, 20, 24});
  std::size_t disagreements = 0;
  for (std::size_t z = 0; z < 24; ++z)
    for (std::size_t y = 0; y < 20; ++y)
      for (std::size_t x = 0; x < 22; ++x) {
        const Eigen::Vector3d d = Eigen::Vector3d(x, y, z) - e.centroid;
        const double rho = d.norm();
        bool in = rho == 0.0;
        if (!in) in = rho <= std::max(0.0, evaluate_radius(e, UnitDirection::from_cartesian(d)));
        disagreements += in != (m(x, y, z) != 0);
      }
  EXPECT_EQ(disagreements, 0u);
}

TEST(RoundTrip, RasterizedBall) {
  const LabelVolume v = ball_volume({40, 40, 40}, {20, 20, 20}, 15.0);
  const ShapeEncoding e = encode_instance(v, 1, orient(), build_basis_matrix(orient(), 5));
  EXPECT_GE(mask_dice(testing::to_mask(v, 1), decode_to_volume(e, v.dims())), 0.97);
}

TEST(EncodeInstance, RasterizedBallCoefficients) {
  const LabelVolume v = ball_volume({32, 32, 32}, {16, 16, 16}, 10.0);
  const ShapeEncoding e = encode_instance(v, 1, orient(), build_basis_matrix(orient(), 5));
  EXPECT_EQ(e.coefficients.size(), 36u);
  EXPECT_NEAR(e.coefficients[0], 35.4, 1.0);
  for (std::size_t j = 1; j < 36; ++j) EXPECT_LT(std::abs(e.coefficients[j]), 0.5) << "j=" << j + 1;
  EXPECT_THROW(encode_instance(v, 3, orient(), build_basis_matrix(orient(), 5)), NotFound);
}

TEST(EncodeInstance, EllipsoidRoundTrip) {
  const LabelVolume v = ellipsoid_volume({64, 48, 40}, {32, 24, 20}, {20, 15, 10});
  const ShapeEncoding e = encode_instance(v, 1, orient(), build_basis_matrix(orient(), 5));
  EXPECT_GE(mask_dice(testing::to_mask(v, 1), decode_to_volume(e, v.dims())), 0.95);
}

TEST(EncodeInstance, SolverOverloadMatches) {
  const LabelVolume v = ellipsoid_volume({40, 40, 40}, {20, 20, 20}, {12, 9, 7});
  const BasisMatrix b = build_basis_matrix(orient(), 4);
  const ShapeEncoding a = encode_instance(v, 1, orient(), b);
  const ShapeEncoding c = encode_instance(v, 1, orient(), CoefficientSolver(b));
  EXPECT_EQ(a.coefficients, c.coefficients);
  EXPECT_EQ(a.centroid, c.centroid);
}

TEST(EncodeInstance, DeepestVoxelFallback) {
  LabelVolume v = ball_volume({40, 40, 40}, {20, 20, 20}, 12.0);
  const LabelVolume bite = ball_volume({40, 40, 40}, {25, 20, 20}, 11.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (bite[i]) v[i] = 0;
  const Voxel p = deepest_voxel(v, 1);
  ASSERT_EQ(v(p.x, p.y, p.z), 1);
  const ShapeEncoding e = encode_instance_about(
      v, 1, Eigen::Vector3d(p.x, p.y, p.z), orient(), CoefficientSolver(build_basis_matrix(orient(), 5)));
  EXPECT_GT(e.mean_radius(), 0.0);
}

TEST(Mesh, TetrahedronHull) {
  const double a = 1 / std::sqrt(3.0);
  std::vector<UnitDirection> d;
  for (const Eigen::Vector3d& v : {Eigen::Vector3d(a, a, a), Eigen::Vector3d(a, -a, -a),
                                   Eigen::Vector3d(-a, a, -a), Eigen::Vector3d(-a, -a, a)})
    d.push_back(UnitDirection::from_cartesian(v));
  const TriangleMesh m = decode_to_mesh(sphere_encoding({1, 2, 3}, 5.0), make_orientation_set(d));
  EXPECT_EQ(m.vertices.size(), 4u);
  EXPECT_EQ(m.faces.size(), 4u);
  EXPECT_EQ(m.euler_characteristic(), 2);
  // Regular tetrahedron inscribed in radius 5: volume 8 r^3 / (9 sqrt 3).
  EXPECT_NEAR(m.volume(), 8 * 125 / (9 * std::sqrt(3.0)), 1e-9);
}

TEST(Mesh, SphereVolumeAt5000) {
  const TriangleMesh m = decode_to_mesh(sphere_encoding({0, 0, 0}, 10.0), orient());
  const double ball = 4.0 / 3.0 * kPi * 1000.0;
  EXPECT_NEAR(m.volume(), ball, 0.01 * ball);
  EXPECT_EQ(m.euler_characteristic(), 2);
  EXPECT_EQ(m.vertices.size(), 5000u);
  EXPECT_EQ(m.faces.size(), 2 * 5000u - 4);
}

TEST(Mesh, WatertightAndOutwardForRandomShapes) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    const ShapeEncoding e = random_encoding(rng, 10.0, 5, {30, 30, 30});
    const TriangleMesh m = decode_to_mesh(e, cached_orientations(1500));
    EXPECT_EQ(m.euler_characteristic(), 2);
    EXPECT_GT(m.volume(), 0.0);
    // Every directed edge appears once, its reverse once.
    std::map<std::pair<int, int>, int> edges;
    for (const auto& f : m.faces)
      for (int i = 0; i < 3; ++i) ++edges[{f[i], f[(i + 1) % 3]}];
    for (const auto& [e2, n] : edges) {
      EXPECT_EQ(n, 1);
      EXPECT_EQ(edges.count({e2.second, e2.first}), 1u);
    }
    const Mask vox = decode_to_volume(e, {60, 60, 60});
    EXPECT_NEAR(m.volume(), static_cast<double>(count(vox)), 0.05 * m.volume());
  }
}

TEST(Mesh, CoplanarOrientationsRejected) {
  std::vector<UnitDirection> ring;
  for (int k = 0; k < 8; ++k) ring.push_back({kPi / 2, 2 * kPi * k / 8});
  EXPECT_THROW(decode_to_mesh(sphere_encoding({0, 0, 0}, 1.0), make_orientation_set(ring)),
               TriangulationError);
}

TEST(Mesh, StlAndOffText) {
  const TriangleMesh m = decode_to_mesh(sphere_encoding({0, 0, 0}, 2.0), cached_orientations(20));
  std::ostringstream stl, off;
  write_stl(m, stl, "cell");
  write_off(m, off);
  EXPECT_EQ(stl.str().rfind("solid cell\n", 0), 0u);
  EXPECT_NE(stl.str().find("endsolid cell"), std::string::npos);
  std::size_t facets = 0, pos = 0;
  while ((pos = stl.str().find("facet normal", pos)) != std::string::npos) ++facets, ++pos;
  EXPECT_EQ(facets, m.faces.size());
  std::istringstream in(off.str());
  std::string magic;
  std::size_t nv, nf, ne;
  in >> magic >> nv >> nf >> ne;
  EXPECT_EQ(magic, "OFF");
  EXPECT_EQ(nv, m.vertices.size());
  EXPECT_EQ(nf, m.faces.size());
}

// Property sweeps

TEST(Properties, RoundTripFidelity) {
  std::mt19937_64 rng(2024);
  const BasisMatrix b = build_basis_matrix(orient(), 5);
  const CoefficientSolver solver(b);
  std::uniform_int_distribution<int> lpick(0, 5);
  std::uniform_real_distribution<double> rpick(10.0, 16.0);
  for (int k = 0; k < 12; ++k) {
    const int l = lpick(rng);
    const double r = rpick(rng);
    const ShapeEncoding e = random_encoding(rng, r, l, {30.3, 29.8, 30.1});
    const Dims dims{61, 61, 61};
    const Mask m = decode_to_volume(e, dims);
    const ShapeEncoding back = encode_instance(from_mask(m), 1, orient(), solver);
    EXPECT_NEAR(back.coefficients[0], e.coefficients[0], 0.05 * e.coefficients[0]);
    EXPECT_GE(mask_dice(m, decode_to_volume(back, dims)), 0.97) << "k=" << k << " l=" << l;
  }
}

TEST(Properties, MeanRadiusRotationInvariant) {
  const LabelVolume v = ellipsoid_volume({50, 44, 38}, {24.5, 21.2, 18.7}, {16, 12, 9});
  const BasisMatrix b = build_basis_matrix(orient(), 5);
  const double c1 = encode_instance(v, 1, orient(), b).coefficients[0];
  const Dims d = v.dims();
  // 90 degrees about z, x and y.
  LabelVolume rz({d.y, d.x, d.z}), rx({d.x, d.z, d.y}), ry({d.z, d.y, d.x});
  for (std::size_t z = 0; z < d.z; ++z)
    for (std::size_t y = 0; y < d.y; ++y)
      for (std::size_t x = 0; x < d.x; ++x) {
        rz(d.y - 1 - y, x, z) = v(x, y, z);
        rx(x, d.z - 1 - z, y) = v(x, y, z);
        ry(z, y, d.x - 1 - x) = v(x, y, z);
      }
  for (const LabelVolume* r : {&rz, &rx, &ry}) {
    const double c = encode_instance(*r, 1, orient(), b).coefficients[0];
    EXPECT_NEAR(c, c1, 0.01 * c1);
  }
}

TEST(Properties, TranslationEquivariance) {
  const LabelVolume v = ellipsoid_volume({48, 48, 48}, {20, 21, 19}, {11, 8, 6});
  const BasisMatrix b = build_basis_matrix(orient(), 5);
  const ShapeEncoding e0 = encode_instance(v, 1, orient(), b);
  LabelVolume shifted(v.dims());
  const int ox = 5, oy = -3, oz = 7;
  for (std::size_t z = 0; z < 48; ++z)
    for (std::size_t y = 0; y < 48; ++y)
      for (std::size_t x = 0; x < 48; ++x)
        if (v(x, y, z)) shifted(x + ox, y + oy, z + oz) = 1;
  const ShapeEncoding e1 = encode_instance(shifted, 1, orient(), b);
  EXPECT_NEAR(e1.centroid.x() - e0.centroid.x(), ox, 1e-9);
  EXPECT_NEAR(e1.centroid.y() - e0.centroid.y(), oy, 1e-9);
  EXPECT_NEAR(e1.centroid.z() - e0.centroid.z(), oz, 1e-9);
  for (std::size_t j = 0; j < e0.coefficients.size(); ++j)
    EXPECT_NEAR(e1.coefficients[j], e0.coefficients[j], 1e-9) << "j=" << j + 1;
}

TEST(Properties, FidelityMonotoneInOrder) {
  std::mt19937_64 rng(77);
  std::vector<LabelVolume> shapes;
  for (int k = 0; k < 6; ++k)
    shapes.push_back(from_mask(decode_to_volume(random_encoding(rng, 12.0, 5, {25, 25, 25}), {51, 51, 51})));
  shapes.push_back(ellipsoid_volume({51, 51, 51}, {25, 25, 25}, {18, 13, 10}));
  double prev = 0.0;
  for (int l = 0; l <= 7; ++l) {
    const CoefficientSolver solver(build_basis_matrix(orient(), l));
    double sum = 0.0;
    for (const auto& s : shapes) {
      const ShapeEncoding e = encode_instance(s, 1, orient(), solver);
      sum += mask_dice(testing::to_mask(s, 1), decode_to_volume(e, s.dims()));
    }
    const double mean = sum / shapes.size();
    EXPECT_GE(mean, prev - 0.01) << "l=" << l;
    prev = mean;
  }
}

}  // namespace
}  // namespace shcell
