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

#include "shcell/encoding_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "shcell/error.hpp"

namespace shcell {

double round_significant9(double value) {
  if (!std::isfinite(value)) return value;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return std::strtod(buf, nullptr);
}

std::map<Label, ShapeEncoding> EncodingDocument::by_id() const {
  std::map<Label, ShapeEncoding> out;
  for (const auto& inst : instances) out[inst.id] = inst.encoding;
  return out;
}

nlohmann::json to_json(const EncodingDocument& doc) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& inst : doc.instances) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (double c : inst.encoding.coefficients) coeffs.push_back(round_significant9(c));
    const auto& p = inst.encoding.centroid;
    instances.push_back({{"id", inst.id},
                         {"centroid",
                          {round_significant9(p.x()), round_significant9(p.y()),
                           round_significant9(p.z())}},
                         {"coefficients", std::move(coeffs)}});
  }
  return {{"l_max", doc.l_max},
          {"orientation_seed", doc.orientation_seed},
          {"instances", std::move(instances)}};
}

EncodingDocument encoding_document_from_json(const nlohmann::json& j) {
  try {
    EncodingDocument doc;
    doc.l_max = j.at("l_max").get<int>();
    if (doc.l_max < 0) throw InvalidArgument("l_max must be non-negative");
    doc.orientation_seed = j.value("orientation_seed", std::uint64_t{0});
    const std::size_t count = coefficient_count(doc.l_max);
    for (const auto& item : j.at("instances")) {
      EncodedInstance inst;
      const auto id = item.at("id").get<long long>();
      if (id <= 0 || id > 65535) throw InvalidArgument("instance id out of range");
      inst.id = static_cast<Label>(id);
      const auto& c = item.at("centroid");
      if (!c.is_array() || c.size() != 3) throw InvalidArgument("centroid must have 3 entries");
      inst.encoding.centroid = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
      inst.encoding.l_max = doc.l_max;
      inst.encoding.coefficients = item.at("coefficients").get<std::vector<double>>();
      if (inst.encoding.coefficients.size() != count) {
        throw InvalidArgument("instance " + std::to_string(id) + " has " +
                              std::to_string(inst.encoding.coefficients.size()) +
                              " coefficients, expected " + std::to_string(count));
      }
      doc.instances.push_back(std::move(inst));
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed encoding document: ") + e.what());
  }
}

void save_encodings(const EncodingDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << to_json(doc).dump(2) << '\n';
  if (!out) throw InvalidArgument("failed writing " + path);
}

EncodingDocument load_encodings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return encoding_document_from_json(j);
}

}  // namespace shcell
