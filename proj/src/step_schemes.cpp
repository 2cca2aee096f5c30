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

#include "hvi/step_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hvi {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::FirstOrder:
      return "first-order";
    case Scheme::FixedPointImplicit:
      return "fixed-point";
    case Scheme::Extrapolation:
      return "extrapolation";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "first-order" || name == "first_order" || name == "FirstOrder") {
    return Scheme::FirstOrder;
  }
  if (name == "fixed-point" || name == "fixed_point" ||
      name == "FixedPointImplicit" || name == "implicit") {
    return Scheme::FixedPointImplicit;
  }
  if (name == "extrapolation" || name == "Extrapolation") {
    return Scheme::Extrapolation;
  }
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

void SchemeConfig::validate() const {
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) {
    throw InvalidArgument("scheme tolerances must be > 0");
  }
  if (outer_max_iter < 1 || inner_max_iter < 1) {
    throw InvalidArgument("scheme iteration caps must be >= 1");
  }
  constants.validate();
}

// ---------------------------------------------------------------------------
// Contact instance

ContactInstance::ContactInstance(FESpace space, ContactData data)
    : space_(std::move(space)), data_(std::move(data)) {
  data_.validate();
  assembled_ = assemble_system(space_, data_);
  jc_ = data_.alpha_j * assembled_.M_gamma3;
  std::vector<int> interface;
  for (const auto& node : space_.gamma3_nodes()) {
    if (node.dof_y >= 0) interface.push_back(node.dof_y);
  }
  system_ = std::make_unique<CondensedSystem>(
      SparseMatrix(assembled_.K_stiff + jc_), std::move(interface));
  const double theta = shift_weight();
  if (theta > 0.0 && data_.S_force > 0.0) {
    const auto& dofs = system_->interface_dofs();
    const auto nc = static_cast<Eigen::Index>(dofs.size());
    DenseMatrix D = DenseMatrix::Zero(nc, nc);
    for (Eigen::Index a = 0; a < nc; ++a) {
      for (Eigen::Index b = 0; b < nc; ++b) {
        D(a, b) = theta * assembled_.M_gamma3.coeff(dofs[a], dofs[b]);
      }
    }
    shift_ = std::make_unique<ShiftedSolver>(*system_, std::move(D));
  }
}

double ContactInstance::shift_weight() const {
  const NormalLaw& l = data_.law;
  const double lo = std::min({0.0, l.c1, l.c2, l.c3});
  const double hi = std::max({0.0, l.c1, l.c2, l.c3});
  return data_.S_force * 0.5 * (lo + hi);
}

Vector ContactInstance::load(double t) const {
  return assemble_load(space_, data_, t);
}

double ContactInstance::kernel(double t, double s) const {
  return data_.relax_kernel(t - s);
}

Vector ContactInstance::history_force(const Vector& w) const {
  return assembled_.K_visc * w;
}

Vector ContactInstance::phi_force(const Vector& w, double zeta) const {
  return projection_force(space_, data_, w, zeta);
}

double ContactInstance::strain_norm(const Vector& u) const {
  return std::sqrt(std::max(0.0, u.dot(assembled_.K_visc * u)));
}

Vector ContactInstance::lower_bounds() const {
  Vector lower = Vector::Constant(size(), kNoBound);
  for (int d : system_->interface_dofs()) lower[d] = -data_.g;
  return lower;
}

InterfaceTraction ContactInstance::nonsmooth() const {
  // Interface position of each Gamma3 node (-1 for the clamped corner).
  std::vector<int> pos;
  for (const auto& node : space_.gamma3_nodes()) {
    pos.push_back(node.dof_y >= 0 ? system_->interface_position(node.dof_y) : -1);
  }
  return [this, pos](const Vector& x) {
    Vector u_nu(static_cast<Eigen::Index>(pos.size()));
    for (size_t a = 0; a < pos.size(); ++a) u_nu[a] = pos[a] >= 0 ? -x[pos[a]] : 0.0;
    const Vector w = normal_traction_weights(space_, data_, u_nu);
    Vector f = Vector::Zero(x.size());
    for (size_t a = 0; a < pos.size(); ++a) {
      if (pos[a] >= 0) f[pos[a]] = -w[a];
    }
    return f;
  };
}

double ContactInstance::norm(const Vector& u) const { return strain_norm(u); }

// ---------------------------------------------------------------------------
// Schemes

StepFailure::StepFailure(int step, const ConvergenceError& cause)
    : ConvergenceError("step " + std::to_string(step) + ": " + cause.what(),
                       cause.iterations(), cause.last_change()),
      step_(step) {}

namespace {

/// f_n - H(S_n): the part of the right-hand side fixed during step n.
Vector fixed_rhs(int n, const RunState& st) {
  const DiscreteInstance& inst = *st.instance;
  Vector rhs = inst.load(st.grid.t(n));
  if (n > 0) {
    HistoryOperatorSpec spec;
    spec.kernel = [&inst](double t, double s) { return inst.kernel(t, s); };
    rhs -= inst.history_force(
        s_modified_trapezoid(spec, st.grid, st.history.trajectory, n));
  }
  return rhs;
}

double zeta_at(int n, const RunState& st) {
  return update_zeta(st.grid, st.strain_norms, n);
}

SolveOptions solve_options(const SchemeConfig& cfg) {
  return {cfg.outer_tol, cfg.outer_max_iter, cfg.inner_tol, cfg.inner_max_iter};
}

/// One convexified solve with phi and j_c evaluated explicitly at w.
SolveReport explicit_solve(const RunState& st, const Vector& base, const Vector& w,
                           double zeta, const Vector& start) {
  const DiscreteInstance& inst = *st.instance;
  StepProblem p;
  p.system = &inst.system();
  p.rhs = base - inst.phi_force(w, zeta) + inst.convexification() * w;
  p.lower = inst.lower_bounds();
  p.nonsmooth = inst.nonsmooth();
  p.shift = inst.nonsmooth_shift();
  return solve_step(p, start, solve_options(st.cfg));
}

void absorb(StepDiagnostics& diag, const SolveReport& rep) {
  diag.qp_iters += rep.outer_iters;
  diag.inner_sweeps += rep.inner_sweeps_total;
  diag.active_count = static_cast<int>(rep.active_set.size());
  diag.kkt_residual = rep.kkt_residual;
}

Vector single_explicit_step(int n, const RunState& st, const Vector& w,
                            StepDiagnostics& diag) {
  const Vector base = fixed_rhs(n, st);
  const SolveReport rep =
      explicit_solve(st, base, w, zeta_at(n, st), st.history.trajectory[n - 1]);
  diag.outer_iters = 1;
  absorb(diag, rep);
  return rep.solution;
}

}  // namespace

Vector step_first_order(int n, const RunState& state, StepDiagnostics& diag) {
  if (n == 0) return step_fixed_point_implicit(0, state, diag);
  return single_explicit_step(n, state, state.history.trajectory[n - 1], diag);
}

Vector step_fixed_point_implicit(int n, const RunState& st,
                                 StepDiagnostics& diag) {
  const DiscreteInstance& inst = *st.instance;
  const Vector base = fixed_rhs(n, st);
  const double zeta = zeta_at(n, st);
  Vector prev = n > 0 ? st.history.trajectory[n - 1] : Vector::Zero(inst.size());
  std::vector<Vector> iterates;
  double change = 0.0;
  for (int i = 1; i <= st.cfg.outer_max_iter; ++i) {
    const SolveReport rep = explicit_solve(st, base, prev, zeta, prev);
    absorb(diag, rep);
    diag.outer_iters = i;
    const double dn = inst.norm(rep.solution - prev);
    const double un = inst.norm(rep.solution);
    change = un > 0.0 ? dn / un : dn;
    prev = rep.solution;
    if (st.cfg.record_iterate_errors) iterates.push_back(prev);
    if (change < st.cfg.outer_tol) {
      diag.final_change = change;
      for (const auto& it : iterates) {
        diag.iterate_errors.push_back(inst.norm(it - prev));
      }
      return prev;
    }
  }
  std::ostringstream msg;
  msg << "fixed-point iteration did not converge in " << st.cfg.outer_max_iter
      << " iterations (last relative change " << change << ")";
  throw ConvergenceError(msg.str(), st.cfg.outer_max_iter, change);
}

Vector step_extrapolation(int n, const RunState& state, StepDiagnostics& diag) {
  if (n < 2) return step_fixed_point_implicit(n, state, diag);
  const auto& traj = state.history.trajectory;
  const Vector w = 2.0 * traj[n - 1] - traj[n - 2];
  return single_explicit_step(n, state, w, diag);
}

Trajectory run(const SchemeConfig& cfg, const DiscreteInstance& instance,
               const TimeGrid& grid) {
  cfg.validate();
  RunState st{&instance, grid, cfg, {}, {}};
  Trajectory out{grid, {}, {}, {}};
  for (int n = 0; n <= grid.N(); ++n) {
    StepDiagnostics diag;
    Vector u;
    try {
      switch (cfg.scheme) {
        case Scheme::FirstOrder:
          u = step_first_order(n, st, diag);
          break;
        case Scheme::FixedPointImplicit:
          u = step_fixed_point_implicit(n, st, diag);
          break;
        case Scheme::Extrapolation:
          u = step_extrapolation(n, st, diag);
          break;
      }
    } catch (const ConvergenceError& e) {
      throw StepFailure(n, e);
    }
    out.zeta.push_back(zeta_at(n, st));
    // The accumulator moves only once a step is accepted.
    st.strain_norms.push_back(instance.strain_norm(u));
    st.history.trajectory.push_back(u);
    st.history.zeta_tilde = update_zeta(grid, st.strain_norms, n + 1);
    out.steps.push_back(std::move(diag));
  }
  out.states = std::move(st.history.trajectory);
  return out;
}

}  // namespace hvi
