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

#ifndef SHCELL_MESH_HPP_
#define SHCELL_MESH_HPP_

#include <array>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace shcell {

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;  // counter-clockwise seen from outside

  // Signed enclosed volume via the divergence theorem.
  double volume() const;
  std::size_t edge_count() const;
  long euler_characteristic() const;
};

// Outward-oriented triangulated convex hull of points in general position.
// Every input point becomes a vertex (points on the unit sphere are all
// extreme, which makes this the spherical Delaunay triangulation). Throws
// TriangulationError when fewer than 4 points are given or all points are
// coplanar.
std::vector<std::array<int, 3>> convex_hull(std::span<const Eigen::Vector3d> points);

void write_stl(const TriangleMesh& mesh, std::ostream& out, std::string_view name = "shape");
void write_off(const TriangleMesh& mesh, std::ostream& out);

}  // namespace shcell

#endif  // SHCELL_MESH_HPP_
