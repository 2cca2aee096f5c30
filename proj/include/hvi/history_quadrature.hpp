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

#ifndef HVI_HISTORY_QUADRATURE_HPP
#define HVI_HISTORY_QUADRATURE_HPP

#include "hvi/common.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hvi {

/// Uniform partition t_n = n k of [0, T] with k = T / N.
class TimeGrid {
 public:
  TimeGrid(double T, int N);

  double T() const { return T_; }
  int N() const { return N_; }
  double k() const { return T_ / N_; }
  double t(int n) const { return n == N_ ? T_ : n * k(); }

 private:
  double T_;
  int N_;
};

/// History operator  (S v)(t) = R( int_0^t q(t,s) v(s) ds + a_S ).
/// The kernel is scalar valued (it multiplies the state); R defaults to the
/// identity and a_S to zero.
struct HistoryOperatorSpec {
  std::function<double(double, double)> kernel;
  std::function<Vector(const Vector&)> output;  // R; empty means identity
  Vector offset;                                // a_S; empty means zero
};

/// Past states u_0..u_m of one run plus the accumulated strain history
/// used by the projection term.
struct HistoryState {
  std::vector<Vector> trajectory;
  double zeta_tilde = 0.0;
};

/// Trapezoid weights with the last interval replaced by a left rectangle:
///   k/2 at t_0, k at t_1..t_{n-2}, 3k/2 at t_{n-1}  (k at t_0 when n = 1).
/// Size n; no weight sits at t_n.
std::vector<double> modified_trapezoid_weights(const TimeGrid& grid, int n);

/// R( k/2 q(t_n,t_0) u_0 + k sum_{j=1}^{n-1} q(t_n,t_j) u_j
///    + k/2 q(t_n,t_{n-1}) u_{n-1} + a_S )
Vector s_modified_trapezoid(const HistoryOperatorSpec& spec,
                            const TimeGrid& grid,
                            std::span<const Vector> traj, int n);

/// R( k sum_{j=0}^{n-1} q(t_n,t_j) u_j + a_S ), first order.
Vector s_left_rectangle(const HistoryOperatorSpec& spec, const TimeGrid& grid,
                        std::span<const Vector> traj, int n);

/// Like s_modified_trapezoid but the last half-weight term extrapolates,
/// k/2 (2 q(t_n,t_{n-1}) u_{n-1} - q(t_n,t_{n-2}) u_{n-2}). Falls back to
/// s_modified_trapezoid for n < 2.
Vector s_extrapolated(const HistoryOperatorSpec& spec, const TimeGrid& grid,
                      std::span<const Vector> traj, int n);

/// Modified-trapezoid accumulation of ||e(u_j)||, j = 0..n-1, i.e. the
/// scalar history value used at step n.
double update_zeta(const TimeGrid& grid, std::span<const double> strain_norms,
                   int n);

}  // namespace hvi

#endif  // HVI_HISTORY_QUADRATURE_HPP
