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

#ifndef SHCELL_METRICS_HPP_
#define SHCELL_METRICS_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "shcell/grid.hpp"
#include "shcell/sphere_sampling.hpp"

namespace shcell {

// 2 |a & b| / (|a| + |b|); 1 when both are empty. Nonzero voxels count as set.
double dice(const Mask& a, const Mask& b);

struct InstanceMatching {
  std::vector<std::pair<Label, Label>> pairs;  // (ground truth, prediction)
  std::vector<Label> unmatched_gt;
  std::vector<Label> unmatched_pred;
};

// Greedy one-to-one matching by decreasing overlap voxel count, ties broken by
// the smaller (gt id, pred id). Only overlapping instances are paired.
InstanceMatching match_instances(const LabelVolume& gt, const LabelVolume& pred);

// Mean over ground-truth instances of the Dice with the matched prediction;
// unmatched ground truth scores 0. Throws InvalidArgument without ground truth.
double averaged_instance_dice(const LabelVolume& gt, const LabelVolume& pred);

struct EvaluationSummary {
  double mean_dice = 0.0;
  std::size_t matched = 0;
  std::size_t missed = 0;    // unmatched ground truth
  std::size_t spurious = 0;  // unmatched predictions
};

EvaluationSummary evaluate_segmentation(const LabelVolume& gt, const LabelVolume& pred);

struct TradeoffPoint {
  std::size_t coefficient_count = 0;  // R = (l + 1)^2
  double mean_dice = 0.0;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  std::size_t skipped_instances = 0;  // degenerate centroids
  std::size_t evaluated_instances = 0;
};

// Encodes every instance at each order, decodes it and averages the
// round-trip Dice against the original mask. Instances whose centroid lies
// outside them are skipped; throws EvaluationError when all are.
TradeoffCurve tradeoff_curve(const LabelVolume& gt, const std::vector<int>& orders,
                             const OrientationSet& orientations);

}  // namespace shcell

#endif  // SHCELL_METRICS_HPP_
