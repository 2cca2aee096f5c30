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

#include "hvi/mesh_fe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hvi {

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh build_rect_mesh(double L1, double L2, int nx, int ny) {
  if (!(L1 > 0.0) || !(L2 > 0.0) || nx < 1 || ny < 1) {
    std::ostringstream msg;
    msg << "build_rect_mesh: invalid dimensions L1=" << L1 << " L2=" << L2
        << " nx=" << nx << " ny=" << ny;
    throw InvalidArgument(msg.str());
  }
  Mesh m;
  m.L1 = L1;
  m.L2 = L2;
  m.nx = nx;
  m.ny = ny;
  m.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Exact endpoints so that nested meshes share coordinates bitwise.
      const double x = (i == nx) ? L1 : L1 * i / nx;
      const double y = (j == ny) ? L2 : L2 * j / ny;
      m.vertices.push_back({x, y});
    }
  }
  m.triangles.reserve(2 * static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int sw = m.vertex_index(i, j);
      const int se = m.vertex_index(i + 1, j);
      const int ne = m.vertex_index(i + 1, j + 1);
      const int nw = m.vertex_index(i, j + 1);
      m.triangles.push_back({sw, se, ne});
      m.triangles.push_back({sw, ne, nw});
    }
  }
  // Walk the boundary counterclockwise: bottom, right, top, left.
  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back(
        {{m.vertex_index(i, 0), m.vertex_index(i + 1, 0)}, BoundaryTag::Gamma3});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary_edges.push_back(
        {{m.vertex_index(nx, j), m.vertex_index(nx, j + 1)},
         BoundaryTag::Gamma2});
  }
  for (int i = nx; i > 0; --i) {
    m.boundary_edges.push_back(
        {{m.vertex_index(i, ny), m.vertex_index(i - 1, ny)},
         BoundaryTag::Gamma2});
  }
  for (int j = ny; j > 0; --j) {
    m.boundary_edges.push_back(
        {{m.vertex_index(0, j), m.vertex_index(0, j - 1)}, BoundaryTag::Gamma1});
  }
  return m;
}

Mesh build_rect_mesh_h(double L1, double L2, double h) {
  if (!(h > 0.0)) throw InvalidArgument("build_rect_mesh_h: h must be > 0");
  const auto cells = [h](double L) {
    const double n = std::round(L / h);
    if (n < 1.0 || std::abs(n * h - L) > 1e-9 * L) {
      std::ostringstream msg;
      msg << "mesh size h=" << h << " does not divide side length " << L;
      throw InvalidArgument(msg.str());
    }
    return static_cast<int>(n);
  };
  return build_rect_mesh(L1, L2, cells(L1), cells(L2));
}

FESpace::FESpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw InvalidArgument("FESpace: null mesh");
  const Mesh& m = *mesh_;
  dof_map_.assign(m.vertices.size(), {-1, -1});
  int next = 0;
  for (int j = 0; j <= m.ny; ++j) {
    for (int i = 0; i <= m.nx; ++i) {
      // Gamma1 closure, corners included, is clamped.
      if (i == 0) continue;
      auto& d = dof_map_[m.vertex_index(i, j)];
      d[0] = next++;
      d[1] = next++;
    }
  }
  n_free_ = next;
  gamma3_.reserve(m.nx + 1);
  for (int i = 0; i <= m.nx; ++i) {
    const int v = m.vertex_index(i, 0);
    gamma3_.push_back({v, m.vertices[v].x, dof_map_[v][1]});
  }
}

Vector FESpace::to_nodal(const Vector& u) const {
  if (u.size() != n_free_) throw InvalidArgument("to_nodal: dimension mismatch");
  Vector nodal = Vector::Zero(2 * static_cast<Eigen::Index>(dof_map_.size()));
  for (size_t v = 0; v < dof_map_.size(); ++v) {
    for (int c = 0; c < 2; ++c) {
      if (dof_map_[v][c] >= 0) nodal[2 * v + c] = u[dof_map_[v][c]];
    }
  }
  return nodal;
}

Vector FESpace::from_nodal(const Vector& nodal) const {
  if (nodal.size() != 2 * static_cast<Eigen::Index>(dof_map_.size())) {
    throw InvalidArgument("from_nodal: dimension mismatch");
  }
  Vector u(n_free_);
  for (size_t v = 0; v < dof_map_.size(); ++v) {
    for (int c = 0; c < 2; ++c) {
      if (dof_map_[v][c] >= 0) u[dof_map_[v][c]] = nodal[2 * v + c];
    }
  }
  return u;
}

Vector FESpace::normal_trace(const Vector& u) const {
  if (u.size() != n_free_) {
    throw InvalidArgument("normal_trace: dimension mismatch");
  }
  Vector un(static_cast<Eigen::Index>(gamma3_.size()));
  for (size_t a = 0; a < gamma3_.size(); ++a) {
    un[a] = gamma3_[a].dof_y >= 0 ? -u[gamma3_[a].dof_y] : 0.0;
  }
  return un;
}

FESpace build_fespace(Mesh mesh) {
  return FESpace(std::make_shared<const Mesh>(std::move(mesh)));
}

double h1_norm_nodal(const Mesh& mesh, const Vector& nodal) {
  if (nodal.size() != 2 * static_cast<Eigen::Index>(mesh.vertices.size())) {
    throw InvalidArgument("h1_norm: dimension mismatch");
  }
  double sum = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    const double area = 0.5 * det;
    // Gradients of the barycentric coordinates.
    const std::array<double, 3> bx = {(p1.y - p2.y) / det, (p2.y - p0.y) / det,
                                      (p0.y - p1.y) / det};
    const std::array<double, 3> by = {(p2.x - p1.x) / det, (p0.x - p2.x) / det,
                                      (p1.x - p0.x) / det};
    for (int c = 0; c < 2; ++c) {
      double sq = 0.0, s = 0.0, gx = 0.0, gy = 0.0;
      for (int a = 0; a < 3; ++a) {
        const double val = nodal[2 * tri[a] + c];
        sq += val * val;
        s += val;
        gx += val * bx[a];
        gy += val * by[a];
      }
      sum += area / 12.0 * (sq + s * s) + area * (gx * gx + gy * gy);
    }
  }
  return std::sqrt(std::max(sum, 0.0));
}

double h1_norm(const Vector& u, const FESpace& space) {
  return h1_norm_nodal(space.mesh(), space.to_nodal(u));
}

Vector prolongate(const Vector& u_coarse, const FESpace& coarse,
                  const FESpace& fine) {
  const Mesh& mc = coarse.mesh();
  const Mesh& mf = fine.mesh();
  const bool same_domain = std::abs(mc.L1 - mf.L1) <= 1e-12 * mc.L1 &&
                           std::abs(mc.L2 - mf.L2) <= 1e-12 * mc.L2;
  if (!same_domain || mf.nx % mc.nx != 0 || mf.ny % mc.ny != 0 ||
      mf.nx / mc.nx != mf.ny / mc.ny) {
    throw InvalidArgument("prolongate: meshes are not nested");
  }
  const int r = mf.nx / mc.nx;
  const Vector nc = coarse.to_nodal(u_coarse);
  Vector nf(2 * static_cast<Eigen::Index>(mf.vertices.size()));
  for (int jf = 0; jf <= mf.ny; ++jf) {
    for (int i_f = 0; i_f <= mf.nx; ++i_f) {
      const int ic = std::min(i_f / r, mc.nx - 1);
      const int jc = std::min(jf / r, mc.ny - 1);
      const int ia = i_f - ic * r;  // local offsets in units of 1/r
      const int ja = jf - jc * r;
      const double a = static_cast<double>(ia) / r;
      const double b = static_cast<double>(ja) / r;
      const int sw = mc.vertex_index(ic, jc);
      const int se = mc.vertex_index(ic + 1, jc);
      const int ne = mc.vertex_index(ic + 1, jc + 1);
      const int nw = mc.vertex_index(ic, jc + 1);
      const int vf = mf.vertex_index(i_f, jf);
      for (int c = 0; c < 2; ++c) {
        const double vsw = nc[2 * sw + c], vse = nc[2 * se + c];
        const double vne = nc[2 * ne + c], vnw = nc[2 * nw + c];
        nf[2 * vf + c] = (ia >= ja)
                             ? vsw + a * (vse - vsw) + b * (vne - vse)
                             : vsw + a * (vne - vnw) + b * (vnw - vsw);
      }
    }
  }
  return fine.from_nodal(nf);
}

}  // namespace hvi
