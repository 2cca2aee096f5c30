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

#ifndef HVI_STEP_SCHEMES_HPP
#define HVI_STEP_SCHEMES_HPP

#include "hvi/common.hpp"
#include "hvi/contact_model.hpp"
#include "hvi/history_quadrature.hpp"
#include "hvi/mesh_fe.hpp"
#include "hvi/nonsmooth_qp_solver.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hvi {

enum class Scheme { FirstOrder, FixedPointImplicit, Extrapolation };

std::string_view to_string(Scheme s);
/// Accepts "first-order", "fixed-point", "extrapolation" and a few aliases.
Scheme parse_scheme(std::string_view name);

struct SchemeConfig {
  Scheme scheme = Scheme::FixedPointImplicit;
  double outer_tol = 1e-10;
  int outer_max_iter = 200;
  double inner_tol = 1e-11;
  int inner_max_iter = 100000;
  AbstractConstants constants;
  /// Keep ||u_i - u_final|| for every fixed-point iterate (rate studies).
  bool record_iterate_errors = false;

  void validate() const;
};

/// A space-discrete instance of the abstract inequality. Every scheme step
/// solves
///   A_tot u + xi(u) - rhs in -N_K(u),
///   rhs = f_n - H(S_n) - Phi(w_phi, zeta) + J_c w_c,
/// with A_tot = A + J_c, S_n the modified-trapezoid history sum and the
/// arguments w_phi, w_c chosen by the scheme.
class DiscreteInstance {
 public:
  virtual ~DiscreteInstance() = default;

  virtual int size() const = 0;
  virtual double final_time() const = 0;
  /// A + J_c, condensed onto the constrained / nonsmooth dofs.
  virtual const CondensedSystem& system() const = 0;
  virtual const SparseMatrix& convexification() const = 0;
  virtual Vector load(double t) const = 0;
  virtual double kernel(double t, double s) const = 0;
  /// Force of the history term for the weighted state sum w.
  virtual Vector history_force(const Vector& w) const = 0;
  /// Force of the explicitly treated part of phi at w.
  virtual Vector phi_force(const Vector& w, double zeta) const = 0;
  /// Norm fed into the scalar history accumulator.
  virtual double strain_norm(const Vector& u) const = 0;
  virtual Vector lower_bounds() const = 0;
  virtual InterfaceTraction nonsmooth() const = 0;
  /// Stabilising shift for the nonsmooth iteration, or nullptr.
  virtual const ShiftedSolver* nonsmooth_shift() const { return nullptr; }
  /// Norm of the state space, used by the fixed-point stopping rule.
  virtual double norm(const Vector& u) const = 0;
};

/// The frictionless viscoelastic contact problem on a P1 space.
class ContactInstance final : public DiscreteInstance {
 public:
  ContactInstance(FESpace space, ContactData data);

  const FESpace& space() const { return space_; }
  const ContactData& data() const { return data_; }
  const AssembledSystem& assembled() const { return assembled_; }

  int size() const override { return space_.n_free(); }
  double final_time() const override { return data_.T; }
  const CondensedSystem& system() const override { return *system_; }
  const SparseMatrix& convexification() const override { return jc_; }
  Vector load(double t) const override;
  double kernel(double t, double s) const override;
  Vector history_force(const Vector& w) const override;
  Vector phi_force(const Vector& w, double zeta) const override;
  double strain_norm(const Vector& u) const override;
  Vector lower_bounds() const override;
  InterfaceTraction nonsmooth() const override;
  const ShiftedSolver* nonsmooth_shift() const override { return shift_.get(); }
  double norm(const Vector& u) const override;

  /// theta in the shift theta * M_Gamma3: S times the midpoint of the range
  /// of slopes of the normal law.
  double shift_weight() const;

 private:
  FESpace space_;
  ContactData data_;
  AssembledSystem assembled_;
  SparseMatrix jc_;
  std::unique_ptr<CondensedSystem> system_;
  std::unique_ptr<ShiftedSolver> shift_;
};

struct StepDiagnostics {
  int outer_iters = 0;     // scheme-level fixed-point iterations
  int qp_iters = 0;        // nonsmooth freezing iterations, summed
  int inner_sweeps = 0;    // QP sweeps, summed
  int active_count = 0;
  double kkt_residual = 0.0;
  double final_change = 0.0;
  std::vector<double> iterate_errors;  // only when recording
};

struct Trajectory {
  TimeGrid grid;
  std::vector<Vector> states;
  std::vector<StepDiagnostics> steps;
  std::vector<double> zeta;  // accumulator value used at each step
};

/// Thrown by run() when a step fails; carries the step index.
class StepFailure : public ConvergenceError {
 public:
  StepFailure(int step, const ConvergenceError& cause);
  int step() const { return step_; }

 private:
  int step_;
};

/// Working state of a run while advancing step n.
struct RunState {
  const DiscreteInstance* instance;
  TimeGrid grid;
  SchemeConfig cfg;
  HistoryState history;
  std::vector<double> strain_norms;
};

/// Each returns u_n; the trajectory in `state` must hold u_0..u_{n-1}.
Vector step_first_order(int n, const RunState& state, StepDiagnostics& diag);
Vector step_fixed_point_implicit(int n, const RunState& state,
                                 StepDiagnostics& diag);
Vector step_extrapolation(int n, const RunState& state, StepDiagnostics& diag);

Trajectory run(const SchemeConfig& cfg, const DiscreteInstance& instance,
               const TimeGrid& grid);

}  // namespace hvi

#endif  // HVI_STEP_SCHEMES_HPP
