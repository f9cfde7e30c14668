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

#include "shcell/volume_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "shcell/error.hpp"

namespace shcell {
namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'H', 'V', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t checked_extent(std::size_t n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("volume extent exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(n);
}

template <typename T>
void append_payload(std::vector<std::uint8_t>& out, const Grid3<T>& g) {
  for (const T v : g.values()) {
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      out.push_back(v);
    } else if constexpr (std::is_same_v<T, std::uint16_t>) {
      out.push_back(static_cast<std::uint8_t>(v));
      out.push_back(static_cast<std::uint8_t>(v >> 8));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
  }
}

template <typename T>
VoxelType type_of() {
  if constexpr (std::is_same_v<T, std::uint8_t>) return VoxelType::kUint8;
  if constexpr (std::is_same_v<T, std::uint16_t>) return VoxelType::kUint16;
  return VoxelType::kFloat32;
}

}  // namespace

std::size_t VolumeHeader::bytes_per_voxel() const {
  switch (dtype) {
    case VoxelType::kUint8: return 1;
    case VoxelType::kUint16: return 2;
    case VoxelType::kFloat32: return 4;
  }
  return 0;
}

std::vector<std::uint8_t> encode_volume(const AnyVolume& volume) {
  std::vector<std::uint8_t> out;
  std::visit(
      [&](const auto& g) {
        using T = typename std::decay_t<decltype(g)>::value_type;
        const VolumeHeader h{type_of<T>(), g.dims()};
        out.reserve(kVolumeHeaderSize + h.payload_size());
        out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
        out.push_back(static_cast<std::uint8_t>(h.dtype));
        put_u32(out, checked_extent(h.dims.x));
        put_u32(out, checked_extent(h.dims.y));
        put_u32(out, checked_extent(h.dims.z));
        append_payload(out, g);
      },
      volume);
  return out;
}

AnyVolume decode_volume(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  const std::size_t start = offset;
  const std::size_t available = bytes.size() - std::min(bytes.size(), start);
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= available) throw FormatError("truncated magic", start + i);
    if (bytes[start + i] != kMagic[i]) throw FormatError("bad magic, expected SHV1", start + i);
  }
  if (available < 5) throw FormatError("truncated header: missing dtype", start + 4);
  const std::uint8_t dtype = bytes[start + 4];
  if (dtype > 2) {
    throw FormatError("unknown dtype " + std::to_string(dtype), start + 4);
  }
  if (available < kVolumeHeaderSize) {
    throw FormatError("truncated header: missing extents", start + available);
  }
  VolumeHeader h;
  h.dtype = static_cast<VoxelType>(dtype);
  const std::uint8_t* p = bytes.data() + start + 5;
  h.dims = {get_u32(p), get_u32(p + 4), get_u32(p + 8)};

  // Payload length in 128 bits so absurd extents cannot wrap around.
  const unsigned __int128 payload = static_cast<unsigned __int128>(h.dims.x) * h.dims.y *
                                    h.dims.z * h.bytes_per_voxel();
  const std::size_t have = available - kVolumeHeaderSize;
  if (payload > have) {
    throw FormatError("truncated payload: expected " + std::to_string(h.payload_size()) +
                          " bytes, found " + std::to_string(have),
                      start + available);
  }
  const std::uint8_t* data = bytes.data() + start + kVolumeHeaderSize;
  const std::size_t n = h.dims.count();
  offset = start + kVolumeHeaderSize + static_cast<std::size_t>(payload);
  switch (h.dtype) {
    case VoxelType::kUint8:
      return Mask(h.dims, std::vector<std::uint8_t>(data, data + n));
    case VoxelType::kUint16: {
      std::vector<std::uint16_t> v(n);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = static_cast<std::uint16_t>(data[2 * i] | (data[2 * i + 1] << 8));
      }
      return LabelVolume(h.dims, std::move(v));
    }
    case VoxelType::kFloat32: {
      std::vector<float> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = std::bit_cast<float>(get_u32(data + 4 * i));
      return FloatVolume(h.dims, std::move(v));
    }
  }
  throw FormatError("unknown dtype", start + 4);
}

AnyVolume decode_volume(std::span<const std::uint8_t> bytes) {
  std::size_t offset = 0;
  AnyVolume v = decode_volume(bytes, offset);
  if (offset != bytes.size()) throw FormatError("trailing bytes after payload", offset);
  return v;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidArgument("failed writing " + path);
}

AnyVolume read_volume(const std::string& path) {
  const auto bytes = read_file(path);
  return decode_volume(bytes);
}

void write_volume(const AnyVolume& volume, const std::string& path) {
  write_file(path, encode_volume(volume));
}

LabelVolume read_labels(const std::string& path) {
  AnyVolume v = read_volume(path);
  if (auto* labels = std::get_if<LabelVolume>(&v)) return std::move(*labels);
  if (auto* mask = std::get_if<Mask>(&v)) {
    return LabelVolume(mask->dims(),
                       std::vector<Label>(mask->storage().begin(), mask->storage().end()));
  }
  throw InvalidArgument(path + ": expected a uint8 or uint16 label volume");
}

ScalarVolume read_scalar(const std::string& path) {
  const AnyVolume v = read_volume(path);
  return std::visit(
      [](const auto& g) {
        return ScalarVolume(g.dims(), std::vector<double>(g.storage().begin(), g.storage().end()));
      },
      v);
}

void write_labels(const LabelVolume& labels, const std::string& path) {
  write_volume(labels, path);
}

void write_mask(const Mask& mask, const std::string& path) { write_volume(mask, path); }

void write_scalar(const ScalarVolume& volume, const std::string& path) {
  write_volume(to_float(volume), path);
}

FloatVolume to_float(const ScalarVolume& volume) {
  return FloatVolume(volume.dims(),
                     std::vector<float>(volume.storage().begin(), volume.storage().end()));
}

ScalarVolume to_scalar(const FloatVolume& volume) {
  return ScalarVolume(volume.dims(),
                      std::vector<double>(volume.storage().begin(), volume.storage().end()));
}

void save_encoding_map(const EncodingMap& map, const std::string& path) {
  std::vector<std::uint8_t> bytes;
  const std::size_t channels = map.channels();
  const Dims d = map.dims();
  for (std::size_t c = 0; c < channels; ++c) {
    FloatVolume channel(d);
    for (std::size_t i = 0; i < d.count(); ++i) {
      channel[i] = static_cast<float>(map.at(i)[c]);
    }
    const auto rec = encode_volume(channel);
    bytes.insert(bytes.end(), rec.begin(), rec.end());
  }
  write_file(path, bytes);
}

EncodingMap load_encoding_map(const std::string& path) {
  const auto bytes = read_file(path);
  std::vector<FloatVolume> channels;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t at = offset;
    AnyVolume v = decode_volume(bytes, offset);
    auto* f = std::get_if<FloatVolume>(&v);
    if (!f) throw FormatError("encoding map channels must be float32", at + 4);
    if (!channels.empty() && f->dims() != channels.front().dims()) {
      throw FormatError("encoding map channel extents differ", at + 5);
    }
    channels.push_back(std::move(*f));
  }
  if (channels.empty()) throw FormatError("encoding map has no channels", 0);
  const Dims d = channels.front().dims();
  EncodingMap map(d, channels.size());
  for (std::size_t i = 0; i < d.count(); ++i) {
    auto dst = map.at(i);
    for (std::size_t c = 0; c < channels.size(); ++c) dst[c] = channels[c][i];
  }
  return map;
}

}  // namespace shcell
