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

#ifndef SHCELL_ENCODING_IO_HPP_
#define SHCELL_ENCODING_IO_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shcell/grid.hpp"
#include "shcell/shape_codec.hpp"

namespace shcell {

// Rounds to 9 significant decimal digits, the precision of every number the
// library writes to text.
double round_significant9(double value);

struct EncodedInstance {
  Label id = 0;
  ShapeEncoding encoding;
};

// {"l_max": int, "orientation_seed": int,
//  "instances": [{"id": int, "centroid": [x, y, z], "coefficients": [...]}]}
struct EncodingDocument {
  int l_max = 0;
  std::uint64_t orientation_seed = 0;
  std::vector<EncodedInstance> instances;

  std::map<Label, ShapeEncoding> by_id() const;
};

nlohmann::json to_json(const EncodingDocument& doc);
// Throws InvalidArgument on schema violations.
EncodingDocument encoding_document_from_json(const nlohmann::json& j);

void save_encodings(const EncodingDocument& doc, const std::string& path);
EncodingDocument load_encodings(const std::string& path);

}  // namespace shcell

#endif  // SHCELL_ENCODING_IO_HPP_
