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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <Eigen/Geometry>

#include "shcell/error.hpp"
#include "shcell/mesh.hpp"

namespace shcell {
namespace {

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d normal;  // unit
  double offset;           // normal . x = offset on the plane
  bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

Face make_face(std::span<const Eigen::Vector3d> pts, int a, int b, int c) {
  Face f{{a, b, c}, Eigen::Vector3d::Zero(), 0.0};
  const Eigen::Vector3d n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  const double len = n.norm();
  f.normal = len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
  f.offset = f.normal.dot(pts[a]);
  return f;
}

}  // namespace

std::vector<std::array<int, 3>> convex_hull(std::span<const Eigen::Vector3d> pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw TriangulationError("convex hull needs at least 4 points");

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * std::max(scale, 1.0);

  // Initial tetrahedron from extreme points.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = 0.0;
  for (int i = 1; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).squaredNorm();
    if (d > best) best = d, i1 = i;
  }
  if (i1 < 0 || best <= eps * eps) throw TriangulationError("points are coincident");
  best = 0.0;
  const Eigen::Vector3d axis = (pts[i1] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).cross(axis).squaredNorm();
    if (d > best) best = d, i2 = i;
  }
  if (i2 < 0 || best <= eps * eps) throw TriangulationError("points are collinear");
  best = 0.0;
  const Eigen::Vector3d plane = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(plane.dot(pts[i] - pts[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (i3 < 0 || best <= eps) throw TriangulationError("points are coplanar");

  std::vector<Face> faces;
  const Eigen::Vector3d inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  auto add_face = [&](int a, int b, int c) {
    Face f = make_face(pts, a, b, c);
    if (f.normal.dot(inside) > f.offset) {
      std::swap(f.v[1], f.v[2]);
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    faces.push_back(f);
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  std::vector<int> visible;
  std::unordered_set<std::uint64_t> visible_edges;
  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    int closest = -1;
    double closest_dist = -std::numeric_limits<double>::infinity();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (!faces[f].alive) continue;
      const double d = faces[f].normal.dot(pts[p]) - faces[f].offset;
      if (d > eps) visible.push_back(f);
      if (d > closest_dist) closest_dist = d, closest = f;
    }
    // A point on (not beyond) the hull still has to become a vertex; split
    // the face it is closest to.
    if (visible.empty()) visible.push_back(closest);

    visible_edges.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) visible_edges.insert(edge_key(v[e], v[(e + 1) % 3]));
    }
    std::vector<std::array<int, 2>> horizon;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e], b = v[(e + 1) % 3];
        if (!visible_edges.contains(edge_key(b, a))) horizon.push_back({a, b});
      }
      faces[f].alive = false;
    }
    for (const auto& [a, b] : horizon) faces.push_back(make_face(pts, a, b, p));

    // Compact occasionally so the per-point scan stays proportional to the
    // live surface.
    if (faces.size() > 64 && faces.size() > 4 * static_cast<std::size_t>(p + 1)) {
      std::erase_if(faces, [](const Face& f) { return !f.alive; });
    }
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(faces.size());
  for (const auto& f : faces) {
    if (f.alive) out.push_back(f.v);
  }
  return out;
}

double TriangleMesh::volume() const {
  double six_v = 0.0;
  for (const auto& f : faces) {
    six_v += vertices[f[0]].dot(vertices[f[1]].cross(vertices[f[2]]));
  }
  return six_v / 6.0;
}

std::size_t TriangleMesh::edge_count() const {
  std::unordered_set<std::uint64_t> edges;
  for (const auto& f : faces) {
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      edges.insert(edge_key(std::min(a, b), std::max(a, b)));
    }
  }
  return edges.size();
}

long TriangleMesh::euler_characteristic() const {
  return static_cast<long>(vertices.size()) - static_cast<long>(edge_count()) +
         static_cast<long>(faces.size());
}

void write_stl(const TriangleMesh& mesh, std::ostream& out, std::string_view name) {
  char buf[160];
  out << "solid " << name << '\n';
  for (const auto& f : mesh.faces) {
    const Eigen::Vector3d& a = mesh.vertices[f[0]];
    const Eigen::Vector3d& b = mesh.vertices[f[1]];
    const Eigen::Vector3d& c = mesh.vertices[f[2]];
    Eigen::Vector3d n = (b - a).cross(c - a);
    if (n.norm() > 0.0) n.normalize();
    std::snprintf(buf, sizeof buf, "  facet normal %.9g %.9g %.9g\n", n.x(), n.y(), n.z());
    out << buf << "    outer loop\n";
    for (const auto* v : {&a, &b, &c}) {
      std::snprintf(buf, sizeof buf, "      vertex %.9g %.9g %.9g\n", v->x(), v->y(), v->z());
      out << buf;
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid " << name << '\n';
}

void write_off(const TriangleMesh& mesh, std::ostream& out) {
  char buf[160];
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace shcell
