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

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "shcell/error.hpp"
#include "shcell/labels.hpp"
#include "test_support.hpp"

namespace shcell {
namespace {

using testing::kPi;

std::vector<Eigen::Vector3d> probe(std::size_t n) { return fibonacci_lattice(n).cartesian(); }

double min_radius(const ShapeEncoding& e, const std::vector<Eigen::Vector3d>& dirs) {
  double m = INFINITY;
  for (const auto& u : dirs) m = std::min(m, evaluate_radius(e, u));
  return m;
}

TEST(RandomShape, ZeroPerturbationIsSphere) {
  std::mt19937_64 rng(1);
  const ShapeEncoding e = random_shape(rng, 8.0, 14.0, 5, 0.0);
  EXPECT_EQ(e.coefficients.size(), 36u);
  const double r = e.mean_radius();
  EXPECT_GE(r, 8.0);
  EXPECT_LE(r, 14.0);
  for (const auto& u : probe(200)) EXPECT_NEAR(evaluate_radius(e, u), r, 1e-12);
}

TEST(RandomShape, PerturbedShapeStaysAdmissible) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const ShapeEncoding e = random_shape(rng, 12.0, 12.0, 5, 0.15);
    EXPECT_DOUBLE_EQ(e.mean_radius(), 12.0);
    EXPECT_GE(min_radius(e, probe(500)), 2.4);
    double spread = 0.0;
    for (std::size_t j = 1; j < e.coefficients.size(); ++j) spread += std::abs(e.coefficients[j]);
    EXPECT_GT(spread, 0.0);
  }
}

TEST(RandomShape, Deterministic) {
  std::mt19937_64 a(77), b(77);
  EXPECT_EQ(random_shape(a, 8, 14, 5, 0.15).coefficients, random_shape(b, 8, 14, 5, 0.15).coefficients);
}

TEST(RandomShape, CoefficientSpreadDecaysWithOrder) {
  std::mt19937_64 rng(3);
  const int draws = 4000;
  std::vector<double> sq(6, 0.0);
  std::vector<int> n(6, 0);
  for (int k = 0; k < draws; ++k) {
    const ShapeEncoding e = random_shape(rng, 10.0, 10.0, 5, 0.1);
    for (const auto& h : index_table(5)) {
      if (h.l == 0) continue;
      sq[h.l] += e.coefficients[h.j - 1] * e.coefficients[h.j - 1];
      ++n[h.l];
    }
  }
  for (int l = 1; l <= 5; ++l) {
    const double sd = std::sqrt(sq[l] / n[l]);
    EXPECT_NEAR(sd, 0.1 * 10.0 / (l + 1), 0.05 * 0.1 * 10.0 / (l + 1)) << "l=" << l;
  }
}

TEST(RandomShape, Errors) {
  std::mt19937_64 rng(4);
  EXPECT_THROW(random_shape(rng, 0.0, 5.0, 3, 0.1), InvalidArgument);
  EXPECT_THROW(random_shape(rng, 5.0, 4.0, 3, 0.1), InvalidArgument);
  EXPECT_THROW(random_shape(rng, 5.0, 6.0, 3, 1.0), InvalidArgument);
  for (int k = 0; k < 5; ++k) EXPECT_THROW(random_shape(rng, 5.0, 6.0, 12, 0.95), GenerationError);
}

TEST(GeneratePhantom, SingleCell) {
  PhantomSpec s;
  s.dims = {48, 48, 48};
  s.n_cells = 1;
  const ScenePair p = generate_phantom(s);
  EXPECT_EQ(instance_boxes(p.labels).size(), 1u);
  EXPECT_EQ(p.encodings.size(), 1u);
}

TEST(GeneratePhantom, DefaultSceneSpacingAndConsistency) {
  PhantomSpec s;  // 30 cells in 256x128x128, r in [8, 14], separation 30
  const ScenePair p = generate_phantom(s);
  const auto boxes = instance_boxes(p.labels);
  EXPECT_EQ(boxes.size(), 30u);
  ASSERT_EQ(p.encodings.size(), 30u);
  for (const auto& [id, box] : boxes) EXPECT_TRUE(p.encodings.contains(id));
  for (auto a = p.encodings.begin(); a != p.encodings.end(); ++a)
    for (auto b = std::next(a); b != p.encodings.end(); ++b)
      EXPECT_GE((a->second.centroid - b->second.centroid).norm(), 30.0);
  for (std::size_t i = 0; i < p.labels.size(); ++i)
    EXPECT_EQ(p.intensity[i], p.labels[i] ? 1.0 : 0.0);
  EXPECT_EQ(p.intensity.dims(), p.labels.dims());
}

TEST(GeneratePhantom, LabelsReproduceGeneratingRadius) {
  PhantomSpec s;
  s.dims = {160, 96, 96};
  s.n_cells = 10;
  s.seed = 5;
  const ScenePair p = generate_phantom(s);
  const OrientationSet& o = testing::cached_orientations(1500);
  const CoefficientSolver solver(build_basis_matrix(o, 5));
  for (const auto& [id, gen] : p.encodings) {
    const ShapeEncoding rec = encode_instance(p.labels, id, o, solver);
    EXPECT_NEAR(rec.coefficients[0], gen.coefficients[0], 0.05 * gen.coefficients[0]) << "id " << id;
  }
}

TEST(GeneratePhantom, LaterCellsNeverOverwrite) {
  PhantomSpec s;
  s.dims = {64, 64, 64};
  s.n_cells = 12;
  s.min_separation = 12.0;  // cells may touch
  s.r_min = 8;
  s.r_max = 10;
  testing::CaptureWarnings cap;
  const ScenePair p = generate_phantom(s);
  EXPECT_EQ(cap.messages.size(), 1u);
  for (const auto& [id, e] : p.encodings) {
    const Mask m = decode_to_volume(e, s.dims);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      // Each voxel of a decoded cell is either its own or an earlier cell's.
      EXPECT_LE(p.labels[i], id);
      EXPECT_NE(p.labels[i], 0);
    }
  }
}

TEST(GeneratePhantom, BitExactReproducibility) {
  PhantomSpec s;
  s.dims = {96, 64, 64};
  s.n_cells = 6;
  s.seed = 42;
  const ScenePair a = generate_phantom(s), b = generate_phantom(s);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.intensity, b.intensity);
  ASSERT_EQ(a.encodings.size(), b.encodings.size());
  for (const auto& [id, e] : a.encodings) {
    EXPECT_EQ(e.coefficients, b.encodings.at(id).coefficients);
    EXPECT_EQ(e.centroid, b.encodings.at(id).centroid);
  }
  s.seed = 43;
  EXPECT_NE(generate_phantom(s).labels, a.labels);
}

TEST(GeneratePhantom, LargeSparseSceneCellCount) {
  // 1000 x 140 x 140 with roughly 350 nuclei.
  PhantomSpec s;
  s.dims = {1000, 140, 140};
  s.n_cells = 350;
  s.r_min = 6.0;
  s.r_max = 9.0;
  s.min_separation = 20.0;
  const ScenePair p = generate_phantom(s);
  EXPECT_GE(p.encodings.size(), 300u);
  EXPECT_LE(p.encodings.size(), 350u);
}

TEST(GeneratePhantom, TooSmallVolume) {
  PhantomSpec s;
  s.dims = {15, 64, 64};
  s.r_min = 8;
  EXPECT_THROW(generate_phantom(s), InvalidArgument);
}

// Independent separable Gaussian with the same kernel support.
ScalarVolume reference_blur(const ScalarVolume& img, std::array<double, 3> sigma) {
  ScalarVolume cur = img;
  const Dims d = img.dims();
  for (int a = 0; a < 3; ++a) {
    if (sigma[a] == 0) continue;
    const int r = static_cast<int>(std::ceil(4 * sigma[a]));
    std::vector<double> k;
    double tot = 0;
    for (int i = -r; i <= r; ++i) tot += std::exp(-i * i / (2 * sigma[a] * sigma[a]));
    for (int i = -r; i <= r; ++i) k.push_back(std::exp(-i * i / (2 * sigma[a] * sigma[a])) / tot);
    ScalarVolume next(d, 0.0);
    for (std::size_t z = 0; z < d.z; ++z)
      for (std::size_t y = 0; y < d.y; ++y)
        for (std::size_t x = 0; x < d.x; ++x) {
          double acc = 0;
          for (int i = -r; i <= r; ++i) {
            std::ptrdiff_t p[3] = {static_cast<std::ptrdiff_t>(x), static_cast<std::ptrdiff_t>(y),
                                   static_cast<std::ptrdiff_t>(z)};
            std::ptrdiff_t q = p[a] + i;
            const auto n = static_cast<std::ptrdiff_t>(d[a]);
            while (q < 0 || q >= n) q = q < 0 ? -q - 1 : 2 * n - q - 1;
            p[a] = q;
            acc += k[i + r] * cur(p[0], p[1], p[2]);
          }
          next(x, y, z) = acc;
        }
    cur = std::move(next);
  }
  return cur;
}

TEST(ApplyPsf, ZeroSigmaIsIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  ScalarVolume img({7, 6, 5});
  for (auto& v : img.storage()) v = u(rng);
  EXPECT_EQ(apply_psf(img, Psf{{0, 0, 0}}), img);
}

TEST(ApplyPsf, ImpulseGivesDiscreteGaussian) {
  ScalarVolume img({31, 31, 31}, 0.0);
  img(15, 15, 15) = 1.0;
  const ScalarVolume out = apply_psf(img, Psf{{2, 2, 2}});
  double mass = 0.0;
  for (double v : out.values()) mass += v;
  EXPECT_NEAR(mass, 1.0, 1e-6);
  // Shape against analytic Gaussian samples, normalized over the kernel support.
  double norm1 = 0.0;
  for (int k = -8; k <= 8; ++k) norm1 += std::exp(-k * k / 8.0);
  for (int z = 7; z <= 23; ++z)
    for (int y = 7; y <= 23; ++y)
      for (int x = 7; x <= 23; ++x) {
        const double r2 = (x - 15) * (x - 15) + (y - 15) * (y - 15) + (z - 15) * (z - 15);
        EXPECT_NEAR(out(x, y, z), std::exp(-r2 / 8.0) / (norm1 * norm1 * norm1), 1e-12);
      }
}

TEST(ApplyPsf, MatchesReferenceWithMirrorBoundary) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u;
  ScalarVolume img({9, 8, 12});
  for (auto& v : img.storage()) v = u(rng);
  for (const Psf& p : {Psf::primary(), Psf::secondary(), Psf{{0.7, 0.0, 1.3}}}) {
    const ScalarVolume lib = apply_psf(img, p), ref = reference_blur(img, p.sigma);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(lib[i], ref[i], 1e-12);
  }
}

TEST(ApplyPsf, PresetsAndBallBoundary) {
  EXPECT_EQ(Psf::primary().sigma, (std::array<double, 3>{1, 1, 3}));
  EXPECT_EQ(Psf::secondary().sigma, (std::array<double, 3>{1.5, 1.5, 4.5}));
  const LabelVolume ball = testing::ball_volume({48, 48, 64}, {24, 24, 32}, 10.0);
  ScalarVolume img(ball.dims(), 0.0);
  double before = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) before += img[i] = ball[i] ? 1.0 : 0.0;
  const ScalarVolume out = apply_psf(img, Psf::primary());
  double after = 0.0;
  for (double v : out.values()) after += v;
  EXPECT_NEAR(after, before, 0.005 * before);
  // Voxels on the digital surface get strictly intermediate values.
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!ball[i]) continue;
    const Voxel v = ball.voxel(i);
    if (ball(v.x + 1, v.y, v.z) == 0) {
      EXPECT_GT(out[i], 0.0);
      EXPECT_LT(out[i], 1.0);
    }
  }
  EXPECT_THROW(apply_psf(img, Psf{{-1, 0, 0}}), InvalidArgument);
}

TEST(GaussianNoise, Statistics) {
  const ScalarVolume zero({100, 100, 100}, 0.0);
  const ScalarVolume out = add_gaussian_noise(zero, 0.1, 9);
  double mean = 0.0, sq = 0.0;
  bool negative = false;
  for (double v : out.values()) {
    mean += v;
    sq += v * v;
    negative |= v < 0.0;
  }
  mean /= out.size();
  const double sd = std::sqrt(sq / out.size() - mean * mean);
  EXPECT_GE(sd, 0.0995);
  EXPECT_LE(sd, 0.1005);
  EXPECT_NEAR(mean, 0.0, 5e-4);
  EXPECT_TRUE(negative);  // unclipped
}

TEST(GaussianNoise, IdentityAndDeterminism) {
  ScalarVolume img({10, 10, 10}, 0.5);
  EXPECT_EQ(add_gaussian_noise(img, 0.0, 1), img);
  EXPECT_EQ(add_gaussian_noise(img, 0.2, 1), add_gaussian_noise(img, 0.2, 1));
  EXPECT_NE(add_gaussian_noise(img, 0.2, 1), add_gaussian_noise(img, 0.2, 2));
  EXPECT_THROW(add_gaussian_noise(img, -0.1, 1), InvalidArgument);
}

}  // namespace
}  // namespace shcell
