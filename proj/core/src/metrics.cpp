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

#include "shcell/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>

#include "shcell/error.hpp"
#include "shcell/labels.hpp"
#include "shcell/sh_basis.hpp"
#include "shcell/shape_codec.hpp"

namespace shcell {
namespace {

struct Overlaps {
  std::map<Label, std::size_t> gt_sizes;
  std::map<Label, std::size_t> pred_sizes;
  std::map<std::pair<Label, Label>, std::size_t> pairs;
};

Overlaps count_overlaps(const LabelVolume& gt, const LabelVolume& pred) {
  if (gt.dims() != pred.dims()) throw InvalidArgument("label volumes have different extents");
  Overlaps o;
  std::unordered_map<std::uint32_t, std::size_t> pairs;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Label g = gt[i], p = pred[i];
    if (g) ++o.gt_sizes[g];
    if (p) ++o.pred_sizes[p];
    if (g && p) ++pairs[(static_cast<std::uint32_t>(g) << 16) | p];
  }
  for (const auto& [key, n] : pairs) {
    o.pairs[{static_cast<Label>(key >> 16), static_cast<Label>(key & 0xffff)}] = n;
  }
  return o;
}

InstanceMatching greedy_match(const Overlaps& o) {
  std::vector<std::pair<std::pair<Label, Label>, std::size_t>> ranked(o.pairs.begin(),
                                                                      o.pairs.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::map<Label, bool> gt_used, pred_used;
  InstanceMatching m;
  for (const auto& [ids, n] : ranked) {
    if (gt_used[ids.first] || pred_used[ids.second]) continue;
    gt_used[ids.first] = pred_used[ids.second] = true;
    m.pairs.push_back(ids);
  }
  for (const auto& [id, n] : o.gt_sizes) {
    if (!gt_used[id]) m.unmatched_gt.push_back(id);
  }
  for (const auto& [id, n] : o.pred_sizes) {
    if (!pred_used[id]) m.unmatched_pred.push_back(id);
  }
  return m;
}

}  // namespace

double dice(const Mask& a, const Mask& b) {
  if (a.dims() != b.dims()) throw InvalidArgument("dice: masks have different extents");
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0, y = b[i] != 0;
    na += x;
    nb += y;
    both += x && y;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

InstanceMatching match_instances(const LabelVolume& gt, const LabelVolume& pred) {
  return greedy_match(count_overlaps(gt, pred));
}

EvaluationSummary evaluate_segmentation(const LabelVolume& gt, const LabelVolume& pred) {
  const Overlaps o = count_overlaps(gt, pred);
  if (o.gt_sizes.empty()) throw InvalidArgument("ground truth has no instances");
  const InstanceMatching m = greedy_match(o);
  double sum = 0.0;
  for (const auto& ids : m.pairs) {
    const double overlap = static_cast<double>(o.pairs.at(ids));
    sum += 2.0 * overlap /
           static_cast<double>(o.gt_sizes.at(ids.first) + o.pred_sizes.at(ids.second));
  }
  EvaluationSummary s;
  s.mean_dice = sum / static_cast<double>(o.gt_sizes.size());
  s.matched = m.pairs.size();
  s.missed = m.unmatched_gt.size();
  s.spurious = m.unmatched_pred.size();
  return s;
}

double averaged_instance_dice(const LabelVolume& gt, const LabelVolume& pred) {
  return evaluate_segmentation(gt, pred).mean_dice;
}

TradeoffCurve tradeoff_curve(const LabelVolume& gt, const std::vector<int>& orders,
                             const OrientationSet& orientations) {
  const auto boxes = instance_boxes(gt);
  if (boxes.empty()) throw InvalidArgument("tradeoff_curve: no instances");
  for (int l : orders) {
    if (l < 0) throw InvalidArgument("orders must be non-negative");
  }

  struct Sampled {
    Label id;
    Eigen::Vector3d centroid;
    std::vector<double> radii;
    std::size_t size;
  };
  std::vector<Sampled> sampled;
  TradeoffCurve curve;
  for (const auto& [id, box] : boxes) {
    const Eigen::Vector3d c = instance_centroid(gt, id);
    try {
      sampled.push_back({id, c, sample_radii(gt, id, c, orientations).radii, box.voxel_count});
    } catch (const DegenerateCentroid&) {
      ++curve.skipped_instances;
    }
  }
  if (sampled.empty()) throw EvaluationError("every instance has a degenerate centroid");
  curve.evaluated_instances = sampled.size();

  for (int l : orders) {
    const CoefficientSolver solver(build_basis_matrix(orientations, l));
    double sum = 0.0;
    for (const auto& s : sampled) {
      ShapeEncoding e;
      e.centroid = s.centroid;
      e.l_max = l;
      e.coefficients = solver.solve(s.radii).coefficients;
      std::size_t decoded = 0, overlap = 0;
      rasterize(e, gt.dims(), [&](std::size_t i, double) {
        ++decoded;
        overlap += gt[i] == s.id;
      });
      sum += 2.0 * static_cast<double>(overlap) / static_cast<double>(decoded + s.size);
    }
    curve.points.push_back({coefficient_count(l), sum / static_cast<double>(sampled.size())});
  }
  return curve;
}

}  // namespace shcell
