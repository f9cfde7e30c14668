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

#ifndef SHCELL_VOLUME_IO_HPP_
#define SHCELL_VOLUME_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "shcell/grid.hpp"
#include "shcell/training_objectives.hpp"

namespace shcell {

// On-disk layout ("SHV1"):
//   bytes 0-3   magic "SHV1"
//   byte  4     dtype: 0 = uint8 mask, 1 = uint16 labels, 2 = float32
//   bytes 5-16  extents x, y, z as little-endian uint32
//   payload     x * y * z little-endian voxels, x fastest
enum class VoxelType : std::uint8_t { kUint8 = 0, kUint16 = 1, kFloat32 = 2 };

inline constexpr std::size_t kVolumeHeaderSize = 17;

struct VolumeHeader {
  VoxelType dtype = VoxelType::kUint8;
  Dims dims;

  std::size_t bytes_per_voxel() const;
  std::size_t payload_size() const { return dims.count() * bytes_per_voxel(); }
};

using AnyVolume = std::variant<Mask, LabelVolume, FloatVolume>;

std::vector<std::uint8_t> encode_volume(const AnyVolume& volume);

// Parses one volume starting at `offset`; on return `offset` points past it.
// Throws FormatError naming the failing byte offset; nothing is returned on
// failure.
AnyVolume decode_volume(std::span<const std::uint8_t> bytes, std::size_t& offset);
// Parses exactly one volume; trailing bytes are a format error.
AnyVolume decode_volume(std::span<const std::uint8_t> bytes);

AnyVolume read_volume(const std::string& path);
void write_volume(const AnyVolume& volume, const std::string& path);

// Typed convenience wrappers. Labels accept uint8 or uint16 files; scalar
// reads accept any dtype.
LabelVolume read_labels(const std::string& path);
ScalarVolume read_scalar(const std::string& path);
void write_labels(const LabelVolume& labels, const std::string& path);
void write_mask(const Mask& mask, const std::string& path);
void write_scalar(const ScalarVolume& volume, const std::string& path);  // as float32

// Multi-channel maps are stored as R consecutive float32 volumes (one per
// channel, identical extents) in a single file.
void save_encoding_map(const EncodingMap& map, const std::string& path);
EncodingMap load_encoding_map(const std::string& path);

FloatVolume to_float(const ScalarVolume& volume);
ScalarVolume to_scalar(const FloatVolume& volume);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace shcell

#endif  // SHCELL_VOLUME_IO_HPP_
