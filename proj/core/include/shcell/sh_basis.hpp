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

#ifndef SHCELL_SH_BASIS_HPP_
#define SHCELL_SH_BASIS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "shcell/sphere_sampling.hpp"

namespace shcell {

// Position of basis function Y_l^m in coefficient vectors: j = l^2 + l + m + 1
// (1-based). Coefficient arrays are stored 0-based, i.e. at j - 1.
struct HarmonicIndex {
  int j = 1;
  int l = 0;
  int m = 0;

  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
};

constexpr std::size_t coefficient_count(int l_max) {
  return static_cast<std::size_t>(l_max + 1) * static_cast<std::size_t>(l_max + 1);
}
constexpr int linear_index(int l, int m) { return l * l + l + m + 1; }

// Order of a coefficient count R = (l + 1)^2; throws InvalidArgument when R is
// not a perfect square.
int order_for_count(std::size_t count);

// Ordered by increasing l, then increasing m.
std::vector<HarmonicIndex> index_table(int l_max);

// Associated Legendre function P_l^m(x) without the Condon-Shortley phase,
// e.g. P_1^1(x) = +sqrt(1 - x^2).
double associated_legendre(int l, int m, double x);

// sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!), evaluated with log-factorials.
double sh_normalization(int l, int m);

// Evaluates the real orthonormal basis
//   m = 0:  N_l^0 P_l^0(cos theta)
//   m > 0:  sqrt(2) N_l^m P_l^m(cos theta) cos(m phi)
//   m < 0:  sqrt(2) N_l^|m| P_l^|m|(cos theta) sin(|m| phi)
// with normalization factors cached for one maximum order.
class ShEvaluator {
 public:
  explicit ShEvaluator(int l_max);

  int l_max() const { return l_max_; }
  std::size_t size() const { return coefficient_count(l_max_); }

  void evaluate(const UnitDirection& dir, std::span<double> out) const;
  // `unit` must have norm 1.
  void evaluate(const Eigen::Vector3d& unit, std::span<double> out) const;
  // Sum_j coefficients[j] * Y_j at `unit`; `coefficients` may be shorter than size().
  double expand(const Eigen::Vector3d& unit, std::span<const double> coefficients) const;

 private:
  void evaluate_trig(double cos_theta, double sin_theta, double cos_phi, double sin_phi,
                     std::span<double> out) const;

  int l_max_;
  std::vector<double> scale_;  // per (l, m >= 0): N_l^m, times sqrt(2) for m > 0
};

std::vector<double> evaluate_basis(const UnitDirection& dir, int l_max);

struct BasisMatrix {
  Eigen::MatrixXd values;  // orientation_count x (l_max + 1)^2
  int l_max = 0;
  std::size_t orientation_count = 0;

  std::size_t coefficient_count() const { return static_cast<std::size_t>(values.cols()); }
};

// Row i holds the basis evaluated at direction i. Emits a warning when there
// are fewer orientations than basis functions.
BasisMatrix build_basis_matrix(const OrientationSet& orientations, int l_max);

}  // namespace shcell

#endif  // SHCELL_SH_BASIS_HPP_
