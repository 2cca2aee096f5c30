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

#ifndef HVI_CONTACT_MODEL_HPP
#define HVI_CONTACT_MODEL_HPP

#include "hvi/common.hpp"
#include "hvi/mesh_fe.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hvi {

/// Symmetric 2x2 tensor (xx, yy, xy).
struct Strain {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

/// Full tensor contraction a:b.
inline double contract(const Strain& a, const Strain& b) {
  return a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
}

/// Plane stress law: (A e)_ij = E k/(1-k^2) tr(e) delta_ij + E/(1+k) e_ij.
Strain elasticity_apply(const Strain& eps, double E, double kappa);

/// Piecewise linear normal compliance slope mu_j(s). Branches are closed on
/// the right, which fixes the selection at the kinks 0, s1 and s2.
struct NormalLaw {
  double s1 = 0.1;
  double s2 = 0.15;
  double c1 = 0.1;
  double c2 = -0.1;
  double c3 = 0.4;

  double operator()(double s) const;
};

/// Strain-level projection hook for the mu-term of the constitutive law. The
/// second argument is the accumulated strain history zeta.
using StrainProjection = std::function<Strain(const Strain&, double)>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Physical data of the viscoelastic frictionless contact problem. The
/// defaults are the benchmark setting on (0,2)x(0,1).
struct ContactData {
  double L1 = 2.0;           // m
  double L2 = 1.0;           // m
  double T = 0.5;            // s
  double E = 2.0;            // N/m^2
  double kappa = 0.3;        // Poisson ratio
  double mu = 0.0;           // projection coefficient
  double alpha_j = 0.5;      // convexification weight, 1/m
  double g = 0.15;           // maximal penetration, m
  double S_force = 1.0;      // N
  NormalLaw law;
  double relax_amplitude = 1.0;  // B(t) = amplitude * exp(-rate t)
  double relax_rate = 1.0;
  double body_force_amplitude = 0.1;    // f0 = (0, -a sin t), N/m^2
  double top_traction_amplitude = 0.2;  // f2 = (0, -a sin t sin(pi x/2)), N/m
  StrainProjection projection;          // empty means identity

  double relax_kernel(double t) const;
  Vec2 body_force(double t) const;
  /// Surface traction density on Gamma2 at the boundary point x.
  Vec2 surface_traction(double t, const Point& x) const;

  /// Throws InvalidArgument listing every offending field.
  void validate() const;
};

/// Constants of the abstract well-posedness theory. They are user estimates
/// for the contact instance and only feed warnings and predicted rates.
struct AbstractConstants {
  double m_A = 1.0;
  double L_A = 1.0;
  double alpha_phi = 0.0;
  double beta_phi = 1.0;
  double alpha_j_relax = 0.1;
  double alpha_c = 0.5;
  double c_j = 1.0;
  double c0_growth = 0.0;
  double c1_growth = 0.4;

  void validate() const;
  /// alpha_phi + alpha_j c_j^2 < m_A
  bool well_posed() const;
  /// alpha_phi + alpha_c c_j^2 < m_A
  bool first_order_small() const;
  /// alpha_phi + alpha_c c_j^2 < m_A / 3
  bool extrapolation_small() const;
  /// Human readable warnings for each violated smallness condition.
  std::vector<std::string> warnings() const;
};

/// Operators of the space-discrete problem on the free dofs.
struct AssembledSystem {
  SparseMatrix K_stiff;   // (A e(u), e(v)) + mu (e(u), e(v))
  SparseMatrix M_gamma3;  // (u_nu, v_nu) on Gamma3
  SparseMatrix K_visc;    // (e(u), e(v)); history term is B(t) * K_visc
  SparseMatrix history_matrix(double t, const ContactData& data) const {
    return data.relax_kernel(t) * K_visc;
  }
};

SparseMatrix assemble_stiffness(const FESpace& space, const ContactData& data);
SparseMatrix assemble_strain_gram(const FESpace& space);
SparseMatrix assemble_gamma3_mass(const FESpace& space);
AssembledSystem assemble_system(const FESpace& space, const ContactData& data);

/// (f0(t), v) over the domain plus (f2(t), v) over Gamma2 for every free dof.
Vector assemble_load(const FESpace& space, const ContactData& data, double t);

/// Per Gamma3 node a, the integral of xi(u_nu) * phi_a over Gamma3 with
/// xi(s) = S mu_j(s) sign(s), evaluated by two-point Gauss per edge.
Vector normal_traction_weights(const FESpace& space, const ContactData& data,
                               const Vector& u_nu);

/// The nonsmooth boundary force as a free-dof vector. Because v_nu = -v_y on
/// Gamma3, entry dof_y of node a equals -normal_traction_weights[a].
Vector nonsmooth_traction(const FESpace& space, const ContactData& data,
                          const Vector& u_nu);

/// Force vector of the mu-term evaluated at w:
///   -mu (P(e(w), zeta), e(v)) for every free dof v.
/// With the identity projection this is -mu K_visc w.
Vector projection_force(const FESpace& space, const ContactData& data,
                        const Vector& w, double zeta);

/// Per-triangle constant strain of a free-dof field.
std::vector<Strain> element_strains(const FESpace& space, const Vector& u);

}  // namespace hvi

#endif  // HVI_CONTACT_MODEL_HPP
