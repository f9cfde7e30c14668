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

#include "shcell/sh_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shcell/diagnostics.hpp"
#include "shcell/error.hpp"

namespace shcell {
namespace {

void check_order(int l_max) {
  if (l_max < 0) throw InvalidArgument("maximum order must be non-negative");
}

// Triangular storage for m >= 0.
inline std::size_t tri(int l, int m) {
  return static_cast<std::size_t>(l * (l + 1) / 2 + m);
}

}  // namespace

int order_for_count(std::size_t count) {
  const auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (root == 0 || root * root != count) {
    throw InvalidArgument("coefficient count " + std::to_string(count) +
                          " is not of the form (l + 1)^2");
  }
  return static_cast<int>(root) - 1;
}

std::vector<HarmonicIndex> index_table(int l_max) {
  check_order(l_max);
  std::vector<HarmonicIndex> table;
  table.reserve(coefficient_count(l_max));
  for (int l = 0; l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) table.push_back({linear_index(l, m), l, m});
  }
  return table;
}

double associated_legendre(int l, int m, double x) {
  if (m < 0 || m > l) throw InvalidArgument("associated_legendre requires 0 <= m <= l");
  if (!(std::abs(x) <= 1.0)) throw InvalidArgument("associated_legendre requires |x| <= 1");
  const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  double odd = 1.0;
  for (int i = 1; i <= m; ++i) {
    pmm *= odd * somx2;
    odd += 2.0;
  }
  if (l == m) return pmm;
  double pmm1 = x * (2.0 * m + 1.0) * pmm;
  for (int ll = m + 2; ll <= l; ++ll) {
    const double pll = ((2.0 * ll - 1.0) * x * pmm1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmm1;
    pmm1 = pll;
  }
  return pmm1;
}

double sh_normalization(int l, int m) {
  if (l < 0 || std::abs(m) > l) throw InvalidArgument("sh_normalization requires |m| <= l");
  m = std::abs(m);
  const double log_ratio = std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0);
  return std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * std::exp(log_ratio));
}

ShEvaluator::ShEvaluator(int l_max) : l_max_(l_max) {
  check_order(l_max);
  scale_.resize(tri(l_max, l_max) + 1);
  for (int l = 0; l <= l_max; ++l) {
    for (int m = 0; m <= l; ++m) {
      scale_[tri(l, m)] = sh_normalization(l, m) * (m == 0 ? 1.0 : std::numbers::sqrt2);
    }
  }
}

void ShEvaluator::evaluate_trig(double cos_theta, double sin_theta, double cos_phi,
                                double sin_phi, std::span<double> out) const {
  if (out.size() < size()) throw InvalidArgument("basis output span too short");
  thread_local std::vector<double> legendre_;
  legendre_.resize(scale_.size());
  // Legendre table, diagonal first and then upward in l.
  double diag = 1.0;
  for (int m = 0; m <= l_max_; ++m) {
    if (m > 0) diag *= (2.0 * m - 1.0) * sin_theta;
    legendre_[tri(m, m)] = diag;
    if (m + 1 <= l_max_) legendre_[tri(m + 1, m)] = cos_theta * (2.0 * m + 1.0) * diag;
    for (int l = m + 2; l <= l_max_; ++l) {
      legendre_[tri(l, m)] = ((2.0 * l - 1.0) * cos_theta * legendre_[tri(l - 1, m)] -
                              (l + m - 1.0) * legendre_[tri(l - 2, m)]) /
                             (l - m);
    }
  }
  // cos(m phi), sin(m phi) by the angle-addition recurrence.
  double cm = 1.0, sm = 0.0;
  for (int m = 0; m <= l_max_; ++m) {
    if (m > 0) {
      const double c = cm * cos_phi - sm * sin_phi;
      sm = sm * cos_phi + cm * sin_phi;
      cm = c;
    }
    for (int l = m; l <= l_max_; ++l) {
      const double base = scale_[tri(l, m)] * legendre_[tri(l, m)];
      if (m == 0) {
        out[static_cast<std::size_t>(l * l + l)] = base;
      } else {
        out[static_cast<std::size_t>(l * l + l + m)] = base * cm;
        out[static_cast<std::size_t>(l * l + l - m)] = base * sm;
      }
    }
  }
}

void ShEvaluator::evaluate(const UnitDirection& dir, std::span<double> out) const {
  evaluate_trig(std::cos(dir.theta), std::sin(dir.theta), std::cos(dir.phi),
                std::sin(dir.phi), out);
}

void ShEvaluator::evaluate(const Eigen::Vector3d& unit, std::span<double> out) const {
  const double rho = std::hypot(unit.x(), unit.y());
  const double cos_phi = rho > 0.0 ? unit.x() / rho : 1.0;
  const double sin_phi = rho > 0.0 ? unit.y() / rho : 0.0;
  evaluate_trig(std::clamp(unit.z(), -1.0, 1.0), rho, cos_phi, sin_phi, out);
}

double ShEvaluator::expand(const Eigen::Vector3d& unit,
                           std::span<const double> coefficients) const {
  thread_local std::vector<double> values;
  values.resize(size());
  evaluate(unit, values);
  const std::size_t n = std::min(values.size(), coefficients.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += coefficients[j] * values[j];
  return sum;
}

std::vector<double> evaluate_basis(const UnitDirection& dir, int l_max) {
  ShEvaluator eval(l_max);
  std::vector<double> out(eval.size());
  eval.evaluate(dir, out);
  return out;
}

BasisMatrix build_basis_matrix(const OrientationSet& orientations, int l_max) {
  if (orientations.size() == 0) throw InvalidArgument("basis matrix needs orientations");
  ShEvaluator eval(l_max);
  BasisMatrix basis;
  basis.l_max = l_max;
  basis.orientation_count = orientations.size();
  const auto n = static_cast<Eigen::Index>(orientations.size());
  const auto r = static_cast<Eigen::Index>(eval.size());
  if (n < r) {
    warn("basis matrix has " + std::to_string(n) + " orientations for " + std::to_string(r) +
         " basis functions; the fit is underdetermined");
  }
  // Row-major scratch so each row is one contiguous evaluation.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(n, r);
  for (Eigen::Index i = 0; i < n; ++i) {
    eval.evaluate(orientations.directions[static_cast<std::size_t>(i)],
                  std::span<double>(rows.row(i).data(), static_cast<std::size_t>(r)));
  }
  basis.values = rows;
  return basis;
}

}  // namespace shcell
