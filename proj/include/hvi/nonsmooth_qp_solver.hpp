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

#ifndef HVI_NONSMOOTH_QP_SOLVER_HPP
#define HVI_NONSMOOTH_QP_SOLVER_HPP

#include "hvi/common.hpp"
#include "hvi/contact_model.hpp"

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <vector>

namespace hvi {

inline constexpr double kNoBound = -std::numeric_limits<double>::infinity();

/// Bound-constrained quadratic program  min 1/2 x'Ax - b'x  s.t. x >= lower.

/// || x - max(lower, x - (Ax - b)) ||_inf, zero exactly at a KKT point.
double projected_kkt_residual(const SparseMatrix& A, const Vector& b,
                              const Vector& lower, const Vector& x);
double projected_kkt_residual(const DenseMatrix& A, const Vector& b,
                              const Vector& lower, const Vector& x);

double qp_energy(const SparseMatrix& A, const Vector& b, const Vector& x);
double qp_energy(const DenseMatrix& A, const Vector& b, const Vector& x);

struct PgsResult {
  Vector x;
  int sweeps = 0;
  double residual = 0.0;
};

/// Called after every sweep with the sweep count and the current iterate.
using SweepObserver = std::function<void(int, const Vector&)>;

/// Projected Gauss-Seidel in ascending dof order:
///   x_i <- max(lower_i, (b_i - sum_{j != i} A_ij x_j) / A_ii).
/// A must be symmetric with a positive diagonal. The start is clamped into
/// the feasible set. Throws ConvergenceError after max_sweeps.
PgsResult projected_gauss_seidel(const SparseMatrix& A, const Vector& b,
                                 const Vector& lower, const Vector& x0,
                                 double tol, int max_sweeps,
                                 const SweepObserver& observe = {});
PgsResult projected_gauss_seidel(const DenseMatrix& A, const Vector& b,
                                 const Vector& lower, const Vector& x0,
                                 double tol, int max_sweeps,
                                 const SweepObserver& observe = {});

/// Dense bound-constrained QP solver: projected Gauss-Seidel sweeps
/// interleaved with subspace minimisation on the current free set. Each
/// accepted subspace step stays feasible and does not raise the energy.
/// Free-set factorisations are cached across calls.
class BoundQpSolver {
 public:
  explicit BoundQpSolver(DenseMatrix A);

  const DenseMatrix& matrix() const { return A_; }
  /// `sweeps` counts Gauss-Seidel sweeps plus subspace solves.
  PgsResult solve(const Vector& b, const Vector& lower, const Vector& x0,
                  double tol, int max_sweeps) const;

 private:
  const Eigen::LLT<DenseMatrix>& free_factor(const std::vector<int>& free) const;

  DenseMatrix A_;
  mutable std::map<std::vector<bool>, Eigen::LLT<DenseMatrix>> cache_;
};

/// Static condensation of a sparse SPD matrix onto a small set of interface
/// dofs. The remaining interior dofs are eliminated exactly with a sparse
/// LDL^T factorisation, leaving the dense Schur complement
///   S = A_CC - A_CI A_II^{-1} A_IC.
class CondensedSystem {
 public:
  CondensedSystem(SparseMatrix A, std::vector<int> interface_dofs);

  int size() const { return static_cast<int>(A_.rows()); }
  const SparseMatrix& matrix() const { return A_; }
  const std::vector<int>& interface_dofs() const { return interface_; }
  /// Position of a global dof in the interface ordering, or -1.
  int interface_position(int dof) const { return position_[dof]; }
  const BoundQpSolver& interface_solver() const { return *qp_; }

  struct Condensed {
    Vector b_interface;  // b_C - A_CI A_II^{-1} b_I
    Vector interior;     // A_II^{-1} b_I
  };
  Condensed condense(const Vector& b) const;
  /// Full vector from interface values and a condensed right-hand side.
  Vector expand(const Vector& x_interface, const Condensed& c) const;
  Vector restrict_to_interface(const Vector& full) const;

 private:
  SparseMatrix A_;
  std::vector<int> interface_;
  std::vector<int> interior_;
  std::vector<int> position_;
  SparseMatrix A_ii_;
  SparseMatrix A_ic_;  // interior rows, interface columns
  Eigen::SimplicialLDLT<SparseMatrix> interior_factor_;
  std::unique_ptr<BoundQpSolver> qp_;
};

/// Selection of the subdifferential of the nonsmooth boundary functional,
/// as a force on the interface dofs (interface ordering in and out).
using InterfaceTraction = std::function<Vector(const Vector&)>;

/// A fixed symmetric positive semidefinite matrix D on the interface dofs
/// together with the QP solver for S + D, S the condensed system matrix.
/// Used to stabilise the frozen iteration of solve_step.
class ShiftedSolver {
 public:
  ShiftedSolver(const CondensedSystem& system, DenseMatrix D);

  const DenseMatrix& shift() const { return D_; }
  const BoundQpSolver& solver() const { return *qp_; }

 private:
  DenseMatrix D_;
  std::unique_ptr<BoundQpSolver> qp_;
};

/// One time-step inequality:
///   A_tot u + xi(u) - rhs  in  -N_K(u),  K = { u >= lower }.
/// Finite bounds and the nonsmooth term must live on interface dofs.
struct StepProblem {
  const CondensedSystem* system = nullptr;
  Vector rhs;
  Vector lower;                  // size n; kNoBound where unconstrained
  InterfaceTraction nonsmooth;   // empty when absent
  /// Optional: iterate (S + D) x_{m+1} = b - xi(x_m) + D x_m instead of the
  /// plain frozen step. Same fixed points; D near the derivative of xi makes
  /// the loop contract where the plain one diverges.
  const ShiftedSolver* shift = nullptr;
};

struct SolveOptions {
  double outer_tol = 1e-10;
  int outer_max = 200;
  double inner_tol = 1e-11;
  int inner_max = 100000;
};

struct SolveReport {
  Vector solution;
  int outer_iters = 0;
  int inner_sweeps_total = 0;
  double final_change = 0.0;
  std::vector<int> active_set;  // dofs sitting on their bound
  double kkt_residual = 0.0;    // full-space, xi evaluated at the solution
};

/// Freezes the nonsmooth selection at the previous iterate and solves the
/// resulting QP until the relative change of the interface values drops
/// below outer_tol. Without a nonsmooth term exactly one QP is solved.
SolveReport solve_step(const StepProblem& p, const Vector& start,
                       const SolveOptions& opts);

struct RatePrediction {
  double rho = 0.0;
  bool warning = false;  // rho >= 1: contraction not guaranteed
};

/// rho = (alpha_phi + alpha_c c_j^2) / m_A.
RatePrediction predicted_rate(const AbstractConstants& c);

}  // namespace hvi

#endif  // HVI_NONSMOOTH_QP_SOLVER_HPP
