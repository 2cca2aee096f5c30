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

#include "hvi/nonsmooth_qp_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace hvi {

namespace {

void check_qp_dims(Eigen::Index rows, Eigen::Index cols, const Vector& b,
                   const Vector& lower, const Vector& x) {
  if (rows != cols || b.size() != rows || lower.size() != rows ||
      x.size() != rows) {
    throw InvalidArgument("bound QP: dimension mismatch");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || lower[i] == std::numeric_limits<double>::infinity()) {
      throw InvalidArgument("bound QP: infeasible lower bound");
    }
  }
}

Vector clamp(const Vector& x, const Vector& lower) { return x.cwiseMax(lower); }

double kkt_from_gradient(const Vector& grad, const Vector& lower,
                         const Vector& x) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double proj = std::max(lower[i], x[i] - grad[i]);
    r = std::max(r, std::abs(x[i] - proj));
  }
  return r;
}

/// One PGS sweep. RowDot(i, x) returns sum_j A_ij x_j including j = i.
template <typename RowDot>
void pgs_sweep(const Vector& diag, const Vector& b, const Vector& lower,
               Vector& x, RowDot&& row_dot) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double off = row_dot(i, x) - diag[i] * x[i];
    x[i] = std::max(lower[i], (b[i] - off) / diag[i]);
  }
}

template <typename Matrix, typename RowDot>
PgsResult pgs_impl(const Matrix& A, const Vector& b, const Vector& lower,
                   const Vector& x0, double tol, int max_sweeps,
                   const SweepObserver& observe, RowDot&& row_dot) {
  check_qp_dims(A.rows(), A.cols(), b, lower, x0);
  const Vector diag = A.diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw InvalidArgument("projected_gauss_seidel: nonpositive diagonal");
  }
  PgsResult out{clamp(x0, lower), 0, 0.0};
  out.residual = projected_kkt_residual(A, b, lower, out.x);
#ifndef NDEBUG
  double energy = qp_energy(A, b, out.x);
#endif
  while (out.residual >= tol) {
    if (out.sweeps >= max_sweeps) {
      throw ConvergenceError("projected Gauss-Seidel: sweep limit reached",
                             out.sweeps, out.residual);
    }
    pgs_sweep(diag, b, lower, out.x, row_dot);
    ++out.sweeps;
    if (observe) observe(out.sweeps, out.x);
#ifndef NDEBUG
    const double e = qp_energy(A, b, out.x);
    assert(e <= energy + 1e-12 * (1.0 + std::abs(energy)));
    energy = e;
#endif
    out.residual = projected_kkt_residual(A, b, lower, out.x);
  }
  return out;
}

double sparse_row_dot(const SparseMatrix& A, Eigen::Index i, const Vector& x) {
  double s = 0.0;
  for (SparseMatrix::InnerIterator it(A, i); it; ++it) s += it.value() * x[it.row()];
  return s;
}

}  // namespace

double projected_kkt_residual(const SparseMatrix& A, const Vector& b,
                              const Vector& lower, const Vector& x) {
  return kkt_from_gradient(A * x - b, lower, x);
}

double projected_kkt_residual(const DenseMatrix& A, const Vector& b,
                              const Vector& lower, const Vector& x) {
  return kkt_from_gradient(A * x - b, lower, x);
}

double qp_energy(const SparseMatrix& A, const Vector& b, const Vector& x) {
  return 0.5 * x.dot(A * x) - b.dot(x);
}

double qp_energy(const DenseMatrix& A, const Vector& b, const Vector& x) {
  return 0.5 * x.dot(A * x) - b.dot(x);
}

PgsResult projected_gauss_seidel(const SparseMatrix& A, const Vector& b,
                                 const Vector& lower, const Vector& x0,
                                 double tol, int max_sweeps,
                                 const SweepObserver& observe) {
  // Column i of a symmetric matrix is row i.
  return pgs_impl(A, b, lower, x0, tol, max_sweeps, observe,
                  [&A](Eigen::Index i, const Vector& x) {
                    return sparse_row_dot(A, i, x);
                  });
}

PgsResult projected_gauss_seidel(const DenseMatrix& A, const Vector& b,
                                 const Vector& lower, const Vector& x0,
                                 double tol, int max_sweeps,
                                 const SweepObserver& observe) {
  return pgs_impl(A, b, lower, x0, tol, max_sweeps, observe,
                  [&A](Eigen::Index i, const Vector& x) {
                    return A.col(i).dot(x);
                  });
}

BoundQpSolver::BoundQpSolver(DenseMatrix A) : A_(std::move(A)) {
  if (A_.rows() != A_.cols()) throw InvalidArgument("BoundQpSolver: not square");
}

const Eigen::LLT<DenseMatrix>& BoundQpSolver::free_factor(
    const std::vector<int>& free) const {
  std::vector<bool> key(static_cast<size_t>(A_.rows()), false);
  for (int i : free) key[i] = true;
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  if (cache_.size() >= 64) cache_.clear();
  const Eigen::Index m = static_cast<Eigen::Index>(free.size());
  DenseMatrix sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index c = 0; c < m; ++c) sub(a, c) = A_(free[a], free[c]);
  }
  return cache_.emplace(std::move(key), Eigen::LLT<DenseMatrix>(sub))
      .first->second;
}

PgsResult BoundQpSolver::solve(const Vector& b, const Vector& lower,
                               const Vector& x0, double tol,
                               int max_sweeps) const {
  check_qp_dims(A_.rows(), A_.cols(), b, lower, x0);
  const Eigen::Index n = A_.rows();
  const Vector diag = A_.diagonal();
  PgsResult out{clamp(x0, lower), 0, 0.0};
  if (n == 0) return out;
  constexpr int kSweepsBetweenSubspaceSteps = 3;

  Vector grad = A_ * out.x - b;
  out.residual = kkt_from_gradient(grad, lower, out.x);
  while (out.residual >= tol) {
    if (out.sweeps >= max_sweeps) {
      throw ConvergenceError("bound QP: sweep limit reached", out.sweeps,
                             out.residual);
    }
    // Subspace minimisation with the bound-active dofs frozen.
    std::vector<int> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out.x[i] > lower[i] || grad[i] < 0.0) free.push_back(static_cast<int>(i));
    }
    Vector y = out.x;
    bool subspace_ok = true;
    if (!free.empty()) {
      const auto& llt = free_factor(free);
      if (llt.info() == Eigen::Success) {
        Vector rhs(static_cast<Eigen::Index>(free.size()));
        for (size_t a = 0; a < free.size(); ++a) {
          // b_F - A_FA x_A, written with the full product to keep it simple.
          rhs[a] = b[free[a]] - (A_.col(free[a]).dot(out.x));
          for (size_t c = 0; c < free.size(); ++c) {
            rhs[a] += A_(free[a], free[c]) * out.x[free[c]];
          }
        }
        const Vector yf = llt.solve(rhs);
        for (size_t a = 0; a < free.size(); ++a) y[free[a]] = yf[a];
      } else {
        subspace_ok = false;
      }
    }
    if (subspace_ok) {
      // Largest feasible step toward the face minimiser.
      const Vector d = y - out.x;
      double tau = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d[i] < 0.0 && out.x[i] + d[i] < lower[i]) {
          tau = std::min(tau, (lower[i] - out.x[i]) / d[i]);
        }
      }
      out.x += tau * d;
      out.x = clamp(out.x, lower);
      ++out.sweeps;
      grad = A_ * out.x - b;
      out.residual = kkt_from_gradient(grad, lower, out.x);
      if (out.residual < tol) break;
    }
    for (int s = 0; s < kSweepsBetweenSubspaceSteps; ++s) {
      pgs_sweep(diag, b, lower, out.x, [this](Eigen::Index i, const Vector& x) {
        return A_.col(i).dot(x);
      });
      ++out.sweeps;
    }
    grad = A_ * out.x - b;
    out.residual = kkt_from_gradient(grad, lower, out.x);
  }
  return out;
}

CondensedSystem::CondensedSystem(SparseMatrix A, std::vector<int> interface_dofs)
    : A_(std::move(A)), interface_(std::move(interface_dofs)) {
  const int n = static_cast<int>(A_.rows());
  if (A_.cols() != n) throw InvalidArgument("CondensedSystem: not square");
  position_.assign(n, -1);
  for (size_t a = 0; a < interface_.size(); ++a) {
    const int d = interface_[a];
    if (d < 0 || d >= n || position_[d] >= 0) {
      throw InvalidArgument("CondensedSystem: bad interface dof list");
    }
    position_[d] = static_cast<int>(a);
  }
  std::vector<int> interior_pos(n, -1);
  for (int d = 0; d < n; ++d) {
    if (position_[d] < 0) {
      interior_pos[d] = static_cast<int>(interior_.size());
      interior_.push_back(d);
    }
  }
  const Eigen::Index ni = static_cast<Eigen::Index>(interior_.size());
  const Eigen::Index nc = static_cast<Eigen::Index>(interface_.size());
  std::vector<Eigen::Triplet<double>> tii, tic;
  DenseMatrix S = DenseMatrix::Zero(nc, nc);
  for (int col = 0; col < n; ++col) {
    for (SparseMatrix::InnerIterator it(A_, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (position_[row] < 0 && position_[col] < 0) {
        tii.emplace_back(interior_pos[row], interior_pos[col], it.value());
      } else if (position_[row] < 0) {
        tic.emplace_back(interior_pos[row], position_[col], it.value());
      } else if (position_[col] >= 0) {
        S(position_[row], position_[col]) += it.value();
      }
    }
  }
  A_ii_.resize(ni, ni);
  A_ii_.setFromTriplets(tii.begin(), tii.end());
  A_ic_.resize(ni, nc);
  A_ic_.setFromTriplets(tic.begin(), tic.end());
  if (ni > 0) {
    interior_factor_.compute(A_ii_);
    if (interior_factor_.info() != Eigen::Success) {
      throw InvalidArgument("CondensedSystem: interior block is not SPD");
    }
    constexpr Eigen::Index kBlock = 32;
    for (Eigen::Index c0 = 0; c0 < nc; c0 += kBlock) {
      const Eigen::Index w = std::min(kBlock, nc - c0);
      const DenseMatrix rhs = DenseMatrix(A_ic_.middleCols(c0, w));
      const DenseMatrix X = interior_factor_.solve(rhs);
      S.middleCols(c0, w) -= A_ic_.transpose() * X;
    }
  }
  S = 0.5 * (S + S.transpose()).eval();
  qp_ = std::make_unique<BoundQpSolver>(std::move(S));
}

CondensedSystem::Condensed CondensedSystem::condense(const Vector& b) const {
  if (b.size() != size()) throw InvalidArgument("condense: dimension mismatch");
  Condensed c;
  c.b_interface = restrict_to_interface(b);
  if (!interior_.empty()) {
    Vector bi(static_cast<Eigen::Index>(interior_.size()));
    for (size_t a = 0; a < interior_.size(); ++a) bi[a] = b[interior_[a]];
    c.interior = interior_factor_.solve(bi);
    c.b_interface -= A_ic_.transpose() * c.interior;
  }
  return c;
}

Vector CondensedSystem::expand(const Vector& x_interface,
                               const Condensed& c) const {
  Vector u(size());
  for (size_t a = 0; a < interface_.size(); ++a) u[interface_[a]] = x_interface[a];
  if (!interior_.empty()) {
    Vector xi = c.interior;
    if (!interface_.empty()) {
      const Vector coupling = A_ic_ * x_interface;
      xi -= interior_factor_.solve(coupling);
    }
    for (size_t a = 0; a < interior_.size(); ++a) u[interior_[a]] = xi[a];
  }
  return u;
}

Vector CondensedSystem::restrict_to_interface(const Vector& full) const {
  Vector out(static_cast<Eigen::Index>(interface_.size()));
  for (size_t a = 0; a < interface_.size(); ++a) out[a] = full[interface_[a]];
  return out;
}

ShiftedSolver::ShiftedSolver(const CondensedSystem& system, DenseMatrix D)
    : D_(std::move(D)) {
  const auto nc = static_cast<Eigen::Index>(system.interface_dofs().size());
  if (D_.rows() != nc || D_.cols() != nc) {
    throw InvalidArgument("ShiftedSolver: shift must match the interface size");
  }
  qp_ = std::make_unique<BoundQpSolver>(system.interface_solver().matrix() + D_);
}

SolveReport solve_step(const StepProblem& p, const Vector& start,
                       const SolveOptions& opts) {
  if (p.system == nullptr) throw InvalidArgument("solve_step: no system");
  const CondensedSystem& sys = *p.system;
  const int n = sys.size();
  if (p.rhs.size() != n || p.lower.size() != n || start.size() != n) {
    throw InvalidArgument("solve_step: dimension mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (std::isnan(p.lower[i]) ||
        p.lower[i] == std::numeric_limits<double>::infinity()) {
      throw InvalidArgument("solve_step: infeasible constraint data");
    }
    if (p.lower[i] != kNoBound && sys.interface_position(i) < 0) {
      throw InvalidArgument("solve_step: bound on a non-interface dof");
    }
  }

  const auto cond = sys.condense(p.rhs);
  const Vector lower_c = sys.restrict_to_interface(p.lower);
  Vector x = sys.restrict_to_interface(start).cwiseMax(lower_c);
  const BoundQpSolver& qp = sys.interface_solver();
  const BoundQpSolver& frozen_qp = p.shift ? p.shift->solver() : qp;

  SolveReport rep;
  Vector xi = Vector::Zero(x.size());
  if (!p.nonsmooth) {
    auto r = qp.solve(cond.b_interface, lower_c, x, opts.inner_tol, opts.inner_max);
    x = std::move(r.x);
    rep.outer_iters = 1;
    rep.inner_sweeps_total = r.sweeps;
  } else {
    bool converged = false;
    double change = 0.0;
    for (int m = 1; m <= opts.outer_max; ++m) {
      xi = p.nonsmooth(x);
      Vector b = cond.b_interface - xi;
      if (p.shift) b += p.shift->shift() * x;
      auto r = frozen_qp.solve(b, lower_c, x, opts.inner_tol, opts.inner_max);
      rep.inner_sweeps_total += r.sweeps;
      const double dn = (r.x - x).norm();
      const double xn = r.x.norm();
      change = xn > 0.0 ? dn / xn : dn;
      x = std::move(r.x);
      rep.outer_iters = m;
      if (change < opts.outer_tol) {
        converged = true;
        break;
      }
    }
    rep.final_change = change;
    if (!converged) {
      throw ConvergenceError("solve_step: nonsmooth fixed point did not converge",
                             rep.outer_iters, change);
    }
    xi = p.nonsmooth(x);
  }

  rep.solution = sys.expand(x, cond);
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (x[a] <= lower_c[a]) rep.active_set.push_back(sys.interface_dofs()[a]);
  }
  Vector grad = sys.matrix() * rep.solution - p.rhs;
  for (Eigen::Index a = 0; a < xi.size(); ++a) grad[sys.interface_dofs()[a]] += xi[a];
  rep.kkt_residual = kkt_from_gradient(grad, p.lower, rep.solution);
  return rep;
}

RatePrediction predicted_rate(const AbstractConstants& c) {
  if (!(c.m_A > 0.0)) throw InvalidArgument("predicted_rate: m_A must be > 0");
  const double rho = (c.alpha_phi + c.alpha_c * c.c_j * c.c_j) / c.m_A;
  return {rho, rho >= 1.0};
}

}  // namespace hvi
