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

#include "hvi/contact_model.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hvi {

namespace {

/// Constant-strain data of one triangle.
struct ElementGeometry {
  double area;
  std::array<double, 3> bx;  // d(lambda_a)/dx
  std::array<double, 3> by;  // d(lambda_a)/dy
};

ElementGeometry geometry(const Mesh& m, int t) {
  const auto& tri = m.triangles[t];
  const Point& p0 = m.vertices[tri[0]];
  const Point& p1 = m.vertices[tri[1]];
  const Point& p2 = m.vertices[tri[2]];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  return {0.5 * det,
          {(p1.y - p2.y) / det, (p2.y - p0.y) / det, (p0.y - p1.y) / det},
          {(p2.x - p1.x) / det, (p0.x - p2.x) / det, (p1.x - p0.x) / det}};
}

/// Strain of the vector basis function lambda_a e_c.
Strain basis_strain(const ElementGeometry& g, int a, int c) {
  if (c == 0) return {g.bx[a], 0.0, 0.5 * g.by[a]};
  return {0.0, g.by[a], 0.5 * g.bx[a]};
}

template <typename Form>
SparseMatrix assemble_bilinear(const FESpace& space, Form&& form) {
  const Mesh& m = space.mesh();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.triangles.size() * 36);
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const ElementGeometry g = geometry(m, t);
    const auto& tri = m.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int ca = 0; ca < 2; ++ca) {
        const int row = space.dof(tri[a], ca);
        if (row < 0) continue;
        const Strain ea = basis_strain(g, a, ca);
        for (int b = 0; b < 3; ++b) {
          for (int cb = 0; cb < 2; ++cb) {
            const int col = space.dof(tri[b], cb);
            if (col < 0) continue;
            trips.emplace_back(row, col,
                               g.area * form(ea, basis_strain(g, b, cb)));
          }
        }
      }
    }
  }
  SparseMatrix K(space.n_free(), space.n_free());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

constexpr double kGaussOffset = 0.21132486540518711775;  // (1 - 1/sqrt 3)/2

}  // namespace

Strain elasticity_apply(const Strain& eps, double E, double kappa) {
  const double lam = E * kappa / (1.0 - kappa * kappa);
  const double two_g = E / (1.0 + kappa);
  const double tr = eps.xx + eps.yy;
  return {lam * tr + two_g * eps.xx, lam * tr + two_g * eps.yy,
          two_g * eps.xy};
}

double NormalLaw::operator()(double s) const {
  if (s <= 0.0) return 0.0;
  if (s <= s1) return c1 * s;
  if (s <= s2) return c1 * s1 + c2 * (s - s1);
  return c1 * s1 + c2 * (s2 - s1) + c3 * (s - s2);
}

double ContactData::relax_kernel(double t) const {
  return relax_amplitude * std::exp(-relax_rate * t);
}

Vec2 ContactData::body_force(double t) const {
  return {0.0, -body_force_amplitude * std::sin(t)};
}

Vec2 ContactData::surface_traction(double t, const Point& x) const {
  // Zero on the right side; sinusoidal downward load on the top side.
  if (x.y < L2 - 1e-12 * L2) return {0.0, 0.0};
  return {0.0, -top_traction_amplitude * std::sin(t) *
                   std::sin(std::numbers::pi * x.x / 2.0)};
}

void ContactData::validate() const {
  std::vector<std::string> bad;
  if (!(L1 > 0.0)) bad.push_back("L1 must be > 0");
  if (!(L2 > 0.0)) bad.push_back("L2 must be > 0");
  if (!(T > 0.0)) bad.push_back("T must be > 0");
  if (!(E > 0.0)) bad.push_back("E must be > 0");
  if (!(kappa > 0.0 && kappa < 0.5)) bad.push_back("kappa must lie in (0, 0.5)");
  if (!(mu >= 0.0)) bad.push_back("mu must be >= 0");
  if (!(alpha_j >= 0.0)) bad.push_back("alpha_j must be >= 0");
  if (!(g >= 0.0)) bad.push_back("g must be >= 0");
  if (!(S_force >= 0.0)) bad.push_back("S must be >= 0");
  if (!(law.s1 > 0.0 && law.s1 < law.s2)) bad.push_back("need 0 < s1 < s2");
  if (!std::isfinite(law.c1) || !std::isfinite(law.c2) || !std::isfinite(law.c3)) {
    bad.push_back("c1, c2, c3 must be finite");
  }
  if (!std::isfinite(relax_amplitude) || !std::isfinite(relax_rate)) {
    bad.push_back("relaxation kernel parameters must be finite");
  }
  if (bad.empty()) return;
  std::ostringstream msg;
  msg << "invalid contact data:";
  for (const auto& b : bad) msg << "\n  " << b;
  throw InvalidArgument(msg.str());
}

void AbstractConstants::validate() const {
  const double all[] = {m_A,     L_A, alpha_phi, beta_phi, alpha_j_relax,
                        alpha_c, c_j, c0_growth, c1_growth};
  for (double v : all) {
    if (!(v >= 0.0)) throw InvalidArgument("abstract constants must be >= 0");
  }
  if (!(m_A > 0.0)) throw InvalidArgument("m_A must be > 0");
}

bool AbstractConstants::well_posed() const {
  return alpha_phi + alpha_j_relax * c_j * c_j < m_A;
}

bool AbstractConstants::first_order_small() const {
  return alpha_phi + alpha_c * c_j * c_j < m_A;
}

bool AbstractConstants::extrapolation_small() const {
  return alpha_phi + alpha_c * c_j * c_j < m_A / 3.0;
}

std::vector<std::string> AbstractConstants::warnings() const {
  std::vector<std::string> w;
  if (!well_posed()) w.emplace_back("alpha_phi + alpha_j c_j^2 < m_A violated");
  if (!first_order_small()) {
    w.emplace_back("alpha_phi + alpha_c c_j^2 < m_A violated");
  }
  if (!extrapolation_small()) {
    w.emplace_back("alpha_phi + alpha_c c_j^2 < m_A/3 violated "
                   "(extrapolation scheme)");
  }
  return w;
}

SparseMatrix assemble_stiffness(const FESpace& space, const ContactData& data) {
  const double E = data.E, kappa = data.kappa, mu = data.mu;
  return assemble_bilinear(space, [=](const Strain& a, const Strain& b) {
    return contract(elasticity_apply(a, E, kappa), b) + mu * contract(a, b);
  });
}

SparseMatrix assemble_strain_gram(const FESpace& space) {
  return assemble_bilinear(
      space, [](const Strain& a, const Strain& b) { return contract(a, b); });
}

SparseMatrix assemble_gamma3_mass(const FESpace& space) {
  const auto& nodes = space.gamma3_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  for (size_t a = 0; a + 1 < nodes.size(); ++a) {
    const double len = nodes[a + 1].x - nodes[a].x;
    const int d[2] = {nodes[a].dof_y, nodes[a + 1].dof_y};
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        if (d[p] < 0 || d[q] < 0) continue;
        trips.emplace_back(d[p], d[q], len / 6.0 * (p == q ? 2.0 : 1.0));
      }
    }
  }
  SparseMatrix M(space.n_free(), space.n_free());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

AssembledSystem assemble_system(const FESpace& space, const ContactData& data) {
  return {assemble_stiffness(space, data), assemble_gamma3_mass(space),
          assemble_strain_gram(space)};
}

Vector assemble_load(const FESpace& space, const ContactData& data, double t) {
  const Mesh& m = space.mesh();
  Vector f = Vector::Zero(space.n_free());
  const Vec2 f0 = data.body_force(t);
  for (int e = 0; e < static_cast<int>(m.triangles.size()); ++e) {
    const double share = m.triangle_area(e) / 3.0;
    for (int v : m.triangles[e]) {
      if (space.dof(v, 0) >= 0) f[space.dof(v, 0)] += f0.x * share;
      if (space.dof(v, 1) >= 0) f[space.dof(v, 1)] += f0.y * share;
    }
  }
  for (const auto& edge : m.boundary_edges) {
    if (edge.tag != BoundaryTag::Gamma2) continue;
    const Point& p = m.vertices[edge.v[0]];
    const Point& q = m.vertices[edge.v[1]];
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    for (double s : {kGaussOffset, 1.0 - kGaussOffset}) {
      const Vec2 tr =
          data.surface_traction(t, {p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)});
      const double w[2] = {0.5 * len * (1.0 - s), 0.5 * len * s};
      for (int a = 0; a < 2; ++a) {
        if (space.dof(edge.v[a], 0) >= 0) f[space.dof(edge.v[a], 0)] += w[a] * tr.x;
        if (space.dof(edge.v[a], 1) >= 0) f[space.dof(edge.v[a], 1)] += w[a] * tr.y;
      }
    }
  }
  return f;
}

Vector normal_traction_weights(const FESpace& space, const ContactData& data,
                               const Vector& u_nu) {
  const auto& nodes = space.gamma3_nodes();
  if (u_nu.size() != static_cast<Eigen::Index>(nodes.size())) {
    throw InvalidArgument("normal_traction_weights: trace dimension mismatch");
  }
  Vector w = Vector::Zero(u_nu.size());
  for (size_t a = 0; a + 1 < nodes.size(); ++a) {
    const double len = nodes[a + 1].x - nodes[a].x;
    for (double s : {kGaussOffset, 1.0 - kGaussOffset}) {
      const double un = (1.0 - s) * u_nu[a] + s * u_nu[a + 1];
      // mu_j vanishes for un <= 0, so sign(un) only matters where it is +1.
      const double xi = un > 0.0 ? data.S_force * data.law(un) : 0.0;
      w[a] += 0.5 * len * xi * (1.0 - s);
      w[a + 1] += 0.5 * len * xi * s;
    }
  }
  return w;
}

Vector nonsmooth_traction(const FESpace& space, const ContactData& data,
                          const Vector& u_nu) {
  const Vector w = normal_traction_weights(space, data, u_nu);
  Vector f = Vector::Zero(space.n_free());
  const auto& nodes = space.gamma3_nodes();
  for (size_t a = 0; a < nodes.size(); ++a) {
    if (nodes[a].dof_y >= 0) f[nodes[a].dof_y] = -w[a];
  }
  return f;
}

std::vector<Strain> element_strains(const FESpace& space, const Vector& u) {
  if (u.size() != space.n_free()) {
    throw InvalidArgument("element_strains: dimension mismatch");
  }
  const Mesh& m = space.mesh();
  std::vector<Strain> out(m.triangles.size());
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const ElementGeometry g = geometry(m, t);
    Strain e;
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 2; ++c) {
        const int d = space.dof(m.triangles[t][a], c);
        if (d < 0) continue;
        const Strain b = basis_strain(g, a, c);
        e.xx += u[d] * b.xx;
        e.yy += u[d] * b.yy;
        e.xy += u[d] * b.xy;
      }
    }
    out[t] = e;
  }
  return out;
}

Vector projection_force(const FESpace& space, const ContactData& data,
                        const Vector& w, double zeta) {
  Vector f = Vector::Zero(space.n_free());
  if (data.mu == 0.0) return f;
  const Mesh& m = space.mesh();
  const std::vector<Strain> eps = element_strains(space, w);
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const ElementGeometry g = geometry(m, t);
    const Strain p = data.projection ? data.projection(eps[t], zeta) : eps[t];
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 2; ++c) {
        const int d = space.dof(m.triangles[t][a], c);
        if (d >= 0) f[d] -= data.mu * g.area * contract(p, basis_strain(g, a, c));
      }
    }
  }
  return f;
}

}  // namespace hvi
