// Copyright 2026 The hvi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HVI_MESH_FE_HPP
#define HVI_MESH_FE_HPP

#include "hvi/common.hpp"

#include <array>
#include <memory>
#include <vector>

namespace hvi {

/// Boundary parts of the rectangle (0,L1)x(0,L2):
///   Gamma1  left side x = 0 (clamped),
///   Gamma2  right side x = L1 and top side y = L2 (tractions),
///   Gamma3  bottom side y = 0 (contact).
enum class BoundaryTag { Gamma1, Gamma2, Gamma3 };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundaryEdge {
  std::array<int, 2> v;  // counterclockwise along the boundary
  BoundaryTag tag;
};

/// Structured triangulation of a rectangle. Each of the nx*ny cells is split
/// into two counterclockwise triangles by its SW-NE diagonal. Vertex (i, j)
/// has index j*(nx+1) + i.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  double L1 = 0.0;
  double L2 = 0.0;
  int nx = 0;
  int ny = 0;

  int vertex_index(int i, int j) const { return j * (nx + 1) + i; }
  double triangle_area(int t) const;
};

Mesh build_rect_mesh(double L1, double L2, int nx, int ny);

/// Mesh with square cells of side h: nx = L1/h, ny = L2/h (must be integers).
Mesh build_rect_mesh_h(double L1, double L2, double h);

/// A node on the contact boundary. On Gamma3 the outward normal is (0,-1),
/// so the normal displacement is u_nu = -u_y.
struct Gamma3Node {
  int vertex;
  double x;
  int dof_y;  // -1 when the vertex is clamped
};

/// Continuous P1 vector field space with u = 0 on Gamma1. Free dofs are
/// numbered vertex by vertex: (x, y) of the first free vertex, then the next.
class FESpace {
 public:
  explicit FESpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int n_free() const { return n_free_; }
  /// Free dof of component c (0 = x, 1 = y) at vertex v, or -1 if clamped.
  int dof(int v, int c) const { return dof_map_[v][c]; }
  const std::vector<Gamma3Node>& gamma3_nodes() const { return gamma3_; }

  /// Free-dof vector -> nodal vector of size 2*V (x0, y0, x1, y1, ...).
  Vector to_nodal(const Vector& u) const;
  /// Nodal vector -> free-dof vector; clamped values are dropped.
  Vector from_nodal(const Vector& nodal) const;
  /// u_nu = -u_y at each Gamma3 node, ordered by x.
  Vector normal_trace(const Vector& u) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::array<int, 2>> dof_map_;
  std::vector<Gamma3Node> gamma3_;
  int n_free_ = 0;
};

FESpace build_fespace(Mesh mesh);

/// Full H1 norm sqrt(int |u|^2 + |grad u|^2) of a nodal P1 field, integrated
/// exactly element by element.
double h1_norm_nodal(const Mesh& mesh, const Vector& nodal);
double h1_norm(const Vector& u, const FESpace& space);

/// Exact P1 interpolation of a coarse field onto a nested finer mesh. The
/// fine mesh must cover the same rectangle with an integer refinement ratio.
Vector prolongate(const Vector& u_coarse, const FESpace& coarse,
                  const FESpace& fine);

}  // namespace hvi

#endif  // HVI_MESH_FE_HPP
