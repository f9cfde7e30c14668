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

#ifndef SHCELL_INSTANCE_PIPELINE_HPP_
#define SHCELL_INSTANCE_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "shcell/grid.hpp"
#include "shcell/shape_codec.hpp"
#include "shcell/training_objectives.hpp"

namespace shcell {

// What a prediction head emits: a distance map and an aligned encoding map,
// `scale_factor` times coarser than the input image. Map voxel i corresponds
// to input voxel i * scale_factor.
struct PredictionMaps {
  DistanceMap distance;
  EncodingMap encodings;
  int scale_factor = 1;

  // Throws InvalidArgument on misaligned maps or a scale outside {1, 2, 4, 8}.
  void validate() const;
};

struct DetectionParams {
  double t_det = 0.5;
  int d_min = 10;  // window half-width, voxels at input resolution

  void validate() const;
};

struct InstanceSegmentation {
  LabelVolume labels;
  std::map<Label, ShapeEncoding> encodings;
  std::vector<Voxel> detections;  // detection k carries label k + 1
};

// Distance trilinearly, encodings nearest neighbor. `target` may differ from
// map extents * scale_factor by less than one scale step per axis.
PredictionMaps upsample_maps(const PredictionMaps& maps, Dims target);

// Voxels with value >= t_det that are >= every value in the cube of side
// 2 * d_min + 1 around them; among equal values in one window the
// lexicographically smallest (x, y, z) wins. Sorted by decreasing value, then
// by coordinate.
std::vector<Voxel> detect_peaks(const DistanceMap& distance, const DetectionParams& params);

// Distance-weighted mean of the encodings in the 5x5x5 window around
// `centroid` (clipped to the volume; negative weights count as zero). Throws
// DegenerateDetection when every weight vanishes.
ShapeEncoding aggregate_encoding(const PredictionMaps& maps, const Voxel& centroid);

// Decodes every encoding; a voxel claimed by several shapes goes to the one
// with the smallest normalized radial coordinate rho / r, the earlier
// detection winning exact ties. Labels follow detection order.
InstanceSegmentation assemble_instances(const std::vector<Voxel>& detections,
                                        const std::vector<ShapeEncoding>& encodings, Dims dims);

// Same overlap rule with caller-chosen label ids (used to decode documents).
LabelVolume assemble_labels(const std::vector<std::pair<Label, ShapeEncoding>>& shapes, Dims dims);

// upsample -> detect_peaks -> aggregate_encoding -> assemble_instances.
// Detections whose aggregation degenerates are dropped with a warning.
InstanceSegmentation extract_instances(const PredictionMaps& maps, Dims input_dims,
                                       const DetectionParams& params);

// Ground-truth stand-in for network output: target distance and encoding
// maps, downsampled by `scale_factor` (mean pooling for the distance, the
// block-origin voxel for encodings), plus zero-mean Gaussian noise whose
// standard deviation is noise_sigma times the maximum absolute value of each
// map (the distance map, and each coefficient channel separately).
// Deterministic for a given seed.
PredictionMaps make_oracle_predictions(const LabelVolume& volume,
                                       const std::map<Label, ShapeEncoding>& encodings,
                                       int scale_factor, double noise_sigma,
                                       std::uint64_t seed);

}  // namespace shcell

#endif  // SHCELL_INSTANCE_PIPELINE_HPP_
