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

#include "shcell/instance_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>

#include "shcell/diagnostics.hpp"
#include "shcell/error.hpp"
#include "shcell/sh_basis.hpp"

namespace shcell {
namespace {

std::size_t stride_of(const Dims& d, int axis) {
  return axis == 0 ? 1 : (axis == 1 ? d.x : d.x * d.y);
}

// First index of line `l` running along `axis`.
std::size_t line_base(const Dims& d, int axis, std::size_t l) {
  if (axis == 0) return l * d.x;
  if (axis == 1) return (l % d.x) + (l / d.x) * d.x * d.y;
  return l;
}

// Max over the clipped window [i - half, i + half] along one axis.
void max_filter_axis(const ScalarVolume& in, ScalarVolume& out, int axis, std::size_t half) {
  const Dims d = in.dims();
  const std::size_t n = d[axis];
  const std::size_t stride = stride_of(d, axis);
  const std::size_t lines = d.count() / n;
  std::deque<std::size_t> window;
  for (std::size_t l = 0; l < lines; ++l) {
    const std::size_t base = line_base(d, axis, l);
    window.clear();
    std::size_t next = 0;  // next position to enter the window
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t last = std::min(n - 1, i + half);
      for (; next <= last; ++next) {
        const double v = in[base + next * stride];
        while (!window.empty() && in[base + window.back() * stride] <= v) window.pop_back();
        window.push_back(next);
      }
      const std::size_t first = i >= half ? i - half : 0;
      while (window.front() < first) window.pop_front();
      out[base + i * stride] = in[base + window.front() * stride];
    }
  }
}

double trilinear(const ScalarVolume& v, double x, double y, double z) {
  const Dims d = v.dims();
  auto split = [](double c, std::size_t n, std::size_t& i0, std::size_t& i1, double& f) {
    c = std::clamp(c, 0.0, static_cast<double>(n - 1));
    i0 = static_cast<std::size_t>(std::floor(c));
    i1 = std::min(i0 + 1, n - 1);
    f = c - static_cast<double>(i0);
  };
  std::size_t x0, x1, y0, y1, z0, z1;
  double fx, fy, fz;
  split(x, d.x, x0, x1, fx);
  split(y, d.y, y0, y1, fy);
  split(z, d.z, z0, z1, fz);
  auto lerp = [](double a, double b, double t) { return t == 0.0 ? a : a + t * (b - a); };
  const double c00 = lerp(v(x0, y0, z0), v(x1, y0, z0), fx);
  const double c10 = lerp(v(x0, y1, z0), v(x1, y1, z0), fx);
  const double c01 = lerp(v(x0, y0, z1), v(x1, y0, z1), fx);
  const double c11 = lerp(v(x0, y1, z1), v(x1, y1, z1), fx);
  return lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz);
}

}  // namespace

void PredictionMaps::validate() const {
  if (distance.dims() != encodings.dims()) {
    throw InvalidArgument("distance and encoding maps have different extents");
  }
  if (scale_factor != 1 && scale_factor != 2 && scale_factor != 4 && scale_factor != 8) {
    throw InvalidArgument("scale factor must be 1, 2, 4 or 8");
  }
}

void DetectionParams::validate() const {
  if (!(t_det >= 0.0 && t_det <= 1.0)) throw InvalidArgument("t_det must lie in [0, 1]");
  if (d_min < 1) throw InvalidArgument("d_min must be at least 1");
}

std::vector<Voxel> detect_peaks(const DistanceMap& distance, const DetectionParams& params) {
  params.validate();
  const Dims d = distance.dims();
  if (d.empty()) return {};
  const auto half = static_cast<std::size_t>(params.d_min);
  ScalarVolume a(d), b(d);
  max_filter_axis(distance, a, 0, half);
  max_filter_axis(a, b, 1, half);
  max_filter_axis(b, a, 2, half);

  const auto h = static_cast<std::ptrdiff_t>(half);
  std::vector<std::pair<double, Voxel>> peaks;
  for (std::size_t i = 0; i < distance.size(); ++i) {
    const double v = distance[i];
    if (!(v >= params.t_det) || v != a[i]) continue;
    const Voxel p = distance.voxel(i);
    // Window maximum equals v here, so only ties can disqualify p.
    bool wins = true;
    for (std::ptrdiff_t z = std::max<std::ptrdiff_t>(0, p.z - h);
         wins && z <= std::min<std::ptrdiff_t>(d.z - 1, p.z + h); ++z) {
      for (std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, p.y - h);
           wins && y <= std::min<std::ptrdiff_t>(d.y - 1, p.y + h); ++y) {
        for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(0, p.x - h);
             x <= std::min<std::ptrdiff_t>(d.x - 1, p.x + h); ++x) {
          const Voxel q{x, y, z};
          if (q < p && distance(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                static_cast<std::size_t>(z)) == v) {
            wins = false;
            break;
          }
        }
      }
    }
    if (wins) peaks.emplace_back(v, p);
  }
  std::sort(peaks.begin(), peaks.end(), [](const auto& l, const auto& r) {
    if (l.first != r.first) return l.first > r.first;
    return l.second < r.second;
  });
  std::vector<Voxel> out;
  out.reserve(peaks.size());
  for (const auto& [v, p] : peaks) out.push_back(p);
  return out;
}

namespace {

// Aggregation over a full-resolution distance map with encodings stored
// `encoding_scale` times coarser (nearest-neighbor lookup).
ShapeEncoding aggregate_scaled(const DistanceMap& dist, const EncodingMap& encodings,
                               std::size_t encoding_scale, const Voxel& centroid) {
  if (!dist.contains(centroid)) throw InvalidArgument("detection lies outside the maps");
  const Dims d = dist.dims();
  const Dims e = encodings.dims();
  const std::size_t channels = encodings.channels();
  std::vector<double> sum(channels, 0.0);
  double total = 0.0;
  constexpr std::ptrdiff_t kHalf = 2;  // 5x5x5 window
  for (std::ptrdiff_t z = std::max<std::ptrdiff_t>(0, centroid.z - kHalf);
       z <= std::min<std::ptrdiff_t>(d.z - 1, centroid.z + kHalf); ++z) {
    for (std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, centroid.y - kHalf);
         y <= std::min<std::ptrdiff_t>(d.y - 1, centroid.y + kHalf); ++y) {
      for (std::ptrdiff_t x = std::max<std::ptrdiff_t>(0, centroid.x - kHalf);
           x <= std::min<std::ptrdiff_t>(d.x - 1, centroid.x + kHalf); ++x) {
        const auto ux = static_cast<std::size_t>(x), uy = static_cast<std::size_t>(y),
                   uz = static_cast<std::size_t>(z);
        const double w = dist(ux, uy, uz);
        if (!(w > 0.0)) continue;
        const std::size_t ex = std::min(ux / encoding_scale, e.x - 1);
        const std::size_t ey = std::min(uy / encoding_scale, e.y - 1);
        const std::size_t ez = std::min(uz / encoding_scale, e.z - 1);
        const auto y_v = encodings.at(ex + e.x * (ey + e.y * ez));
        for (std::size_t c = 0; c < channels; ++c) sum[c] += w * y_v[c];
        total += w;
      }
    }
  }
  if (!(total > 0.0)) {
    throw DegenerateDetection("all aggregation weights vanish around detection");
  }
  ShapeEncoding out;
  out.centroid = {static_cast<double>(centroid.x), static_cast<double>(centroid.y),
                  static_cast<double>(centroid.z)};
  out.l_max = order_for_count(channels);
  out.coefficients.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) out.coefficients[c] = sum[c] / total;
  return out;
}

DistanceMap upsample_distance(const DistanceMap& distance, std::size_t s, Dims target) {
  DistanceMap out(target, 0.0);
  const double inv = 1.0 / static_cast<double>(s);
  std::size_t i = 0;
  for (std::size_t z = 0; z < target.z; ++z)
    for (std::size_t y = 0; y < target.y; ++y)
      for (std::size_t x = 0; x < target.x; ++x, ++i)
        out[i] = trilinear(distance, static_cast<double>(x) * inv, static_cast<double>(y) * inv,
                           static_cast<double>(z) * inv);
  return out;
}

void check_upsample_target(const PredictionMaps& maps, Dims target) {
  const auto s = static_cast<std::size_t>(maps.scale_factor);
  const Dims src = maps.distance.dims();
  for (int a = 0; a < 3; ++a) {
    // Maps cover ceil(target / s) cells per axis.
    const std::size_t expect = src[a] * s;
    if (target[a] > expect || expect - target[a] >= s) {
      throw InvalidArgument("upsample target extent " + std::to_string(target[a]) +
                            " does not match " + std::to_string(src[a]) + " x " +
                            std::to_string(s));
    }
  }
}

}  // namespace

PredictionMaps upsample_maps(const PredictionMaps& maps, Dims target) {
  maps.validate();
  check_upsample_target(maps, target);
  const auto s = static_cast<std::size_t>(maps.scale_factor);
  const Dims src = maps.distance.dims();
  if (s == 1) return maps;
  PredictionMaps out;
  out.scale_factor = 1;
  out.distance = upsample_distance(maps.distance, s, target);
  const std::size_t channels = maps.encodings.channels();
  out.encodings = EncodingMap(target, channels);
  std::size_t i = 0;
  for (std::size_t z = 0; z < target.z; ++z) {
    for (std::size_t y = 0; y < target.y; ++y) {
      for (std::size_t x = 0; x < target.x; ++x, ++i) {
        const std::size_t sx = std::min(x / s, src.x - 1);
        const std::size_t sy = std::min(y / s, src.y - 1);
        const std::size_t sz = std::min(z / s, src.z - 1);
        const auto from = maps.encodings.at(maps.distance.index(sx, sy, sz));
        std::copy_n(from.begin(), channels, out.encodings.at(i).begin());
      }
    }
  }
  return out;
}

ShapeEncoding aggregate_encoding(const PredictionMaps& maps, const Voxel& centroid) {
  maps.validate();
  if (maps.scale_factor != 1) throw InvalidArgument("aggregate_encoding expects scale-1 maps");
  return aggregate_scaled(maps.distance, maps.encodings, 1, centroid);
}

LabelVolume assemble_labels(const std::vector<std::pair<Label, ShapeEncoding>>& shapes,
                            Dims dims) {
  LabelVolume labels(dims, 0);
  std::vector<double> interiority(dims.count(), std::numeric_limits<double>::infinity());
  for (const auto& [id, encoding] : shapes) {
    rasterize(encoding, dims, [&, id = id](std::size_t i, double rho) {
      if (rho < interiority[i]) {
        interiority[i] = rho;
        labels[i] = id;
      }
    });
  }
  return labels;
}

InstanceSegmentation assemble_instances(const std::vector<Voxel>& detections,
                                        const std::vector<ShapeEncoding>& encodings, Dims dims) {
  if (detections.size() != encodings.size()) {
    throw InvalidArgument("detections and encodings differ in count");
  }
  if (encodings.size() > std::numeric_limits<Label>::max()) {
    throw InvalidArgument("too many instances for 16-bit labels");
  }
  InstanceSegmentation seg;
  seg.detections = detections;
  std::vector<std::pair<Label, ShapeEncoding>> shapes;
  shapes.reserve(encodings.size());
  for (std::size_t k = 0; k < encodings.size(); ++k) {
    const auto id = static_cast<Label>(k + 1);
    shapes.emplace_back(id, encodings[k]);
    seg.encodings[id] = encodings[k];
  }
  seg.labels = assemble_labels(shapes, dims);
  return seg;
}

InstanceSegmentation extract_instances(const PredictionMaps& maps, Dims input_dims,
                                       const DetectionParams& params) {
  maps.validate();
  check_upsample_target(maps, input_dims);
  const auto s = static_cast<std::size_t>(maps.scale_factor);
  // Only the distance map is materialized at input resolution; encodings are
  // read through the nearest-neighbor mapping.
  const DistanceMap full =
      s == 1 ? maps.distance : upsample_distance(maps.distance, s, input_dims);
  if (full.dims() != input_dims) {
    throw InvalidArgument("prediction maps do not match the input extents");
  }
  std::vector<Voxel> kept;
  std::vector<ShapeEncoding> encodings;
  for (const Voxel& p : detect_peaks(full, params)) {
    try {
      encodings.push_back(aggregate_scaled(full, maps.encodings, s, p));
      kept.push_back(p);
    } catch (const DegenerateDetection& e) {
      warn(std::string("dropping detection: ") + e.what());
    }
  }
  return assemble_instances(kept, encodings, input_dims);
}

PredictionMaps make_oracle_predictions(const LabelVolume& volume,
                                       const std::map<Label, ShapeEncoding>& encodings,
                                       int scale_factor, double noise_sigma,
                                       std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  PredictionMaps probe;
  probe.scale_factor = scale_factor;
  probe.validate();

  const DistanceMap distance = compute_distance_map(volume);
  const Dims d = volume.dims();
  const auto s = static_cast<std::size_t>(scale_factor);
  const Dims low{(d.x + s - 1) / s, (d.y + s - 1) / s, (d.z + s - 1) / s};
  std::size_t channels = 0;
  for (const auto& [id, e] : encodings) {
    if (channels == 0) channels = e.coefficients.size();
    if (e.coefficients.size() != channels) {
      throw InvalidArgument("encodings do not share a common order");
    }
  }
  for (std::size_t v = 0; v < volume.size(); ++v) {
    if (volume[v] != 0 && !encodings.contains(volume[v])) {
      throw InvalidArgument("no encoding for instance " + std::to_string(volume[v]));
    }
  }

  PredictionMaps maps;
  maps.scale_factor = scale_factor;
  maps.distance = DistanceMap(low, 0.0);
  maps.encodings = EncodingMap(low, channels);
  std::size_t i = 0;
  for (std::size_t z = 0; z < low.z; ++z) {
    for (std::size_t y = 0; y < low.y; ++y) {
      for (std::size_t x = 0; x < low.x; ++x, ++i) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t zz = z * s; zz < std::min(d.z, (z + 1) * s); ++zz)
          for (std::size_t yy = y * s; yy < std::min(d.y, (y + 1) * s); ++yy)
            for (std::size_t xx = x * s; xx < std::min(d.x, (x + 1) * s); ++xx, ++n)
              sum += distance(xx, yy, zz);
        maps.distance[i] = sum / static_cast<double>(n);
        const Label id = volume(x * s, y * s, z * s);
        if (id != 0) {
          const auto& c = encodings.at(id).coefficients;
          std::copy(c.begin(), c.end(), maps.encodings.at(i).begin());
        }
      }
    }
  }

  if (noise_sigma > 0.0) {
    // Each coefficient channel is its own output map with its own scale;
    // c_1 would otherwise swamp the higher orders.
    std::mt19937_64 rng(seed);
    auto perturb = [&](std::vector<double>& values, std::size_t first, std::size_t stride) {
      double scale = 0.0;
      for (std::size_t k = first; k < values.size(); k += stride)
        scale = std::max(scale, std::abs(values[k]));
      if (!(scale > 0.0)) return;
      std::normal_distribution<double> noise(0.0, noise_sigma * scale);
      for (std::size_t k = first; k < values.size(); k += stride) values[k] += noise(rng);
    };
    perturb(maps.distance.storage(), 0, 1);
    for (std::size_t c = 0; c < channels; ++c) perturb(maps.encodings.storage(), c, channels);
  }
  return maps;
}

}  // namespace shcell
