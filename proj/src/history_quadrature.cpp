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

#include "hvi/history_quadrature.hpp"

#include <sstream>

namespace hvi {

TimeGrid::TimeGrid(double T, int N) : T_(T), N_(N) {
  if (!(T > 0.0) || N < 1) {
    std::ostringstream msg;
    msg << "TimeGrid: need T > 0 and N >= 1 (T=" << T << ", N=" << N << ")";
    throw InvalidArgument(msg.str());
  }
}

namespace {

void require_length(std::span<const Vector> traj, int n, int needed) {
  if (n < 0) throw InvalidArgument("history quadrature: negative step index");
  if (static_cast<int>(traj.size()) < needed) {
    std::ostringstream msg;
    msg << "history quadrature at step " << n << " needs " << needed
        << " stored states, got " << traj.size();
    throw InvalidArgument(msg.str());
  }
}

Eigen::Index state_size(const HistoryOperatorSpec& spec,
                        std::span<const Vector> traj) {
  if (!traj.empty()) return traj.front().size();
  return spec.offset.size();
}

/// R( sum_j c_j q(t_n, t_j) u_j + a_S ).
Vector finish(const HistoryOperatorSpec& spec, const TimeGrid& grid,
              std::span<const Vector> traj, int n,
              std::span<const double> weights) {
  Vector acc = Vector::Zero(state_size(spec, traj));
  const double tn = grid.t(n);
  for (size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] == 0.0) continue;
    acc += (weights[j] * spec.kernel(tn, grid.t(static_cast<int>(j)))) * traj[j];
  }
  if (spec.offset.size() > 0) acc += spec.offset;
  return spec.output ? spec.output(acc) : acc;
}

}  // namespace

std::vector<double> modified_trapezoid_weights(const TimeGrid& grid, int n) {
  std::vector<double> w(static_cast<size_t>(n), grid.k());
  if (n >= 1) {
    w.front() -= 0.5 * grid.k();
    w.back() += 0.5 * grid.k();
  }
  return w;
}

Vector s_modified_trapezoid(const HistoryOperatorSpec& spec,
                            const TimeGrid& grid,
                            std::span<const Vector> traj, int n) {
  require_length(traj, n, n);
  const auto w = modified_trapezoid_weights(grid, n);
  return finish(spec, grid, traj, n, w);
}

Vector s_left_rectangle(const HistoryOperatorSpec& spec, const TimeGrid& grid,
                        std::span<const Vector> traj, int n) {
  require_length(traj, n, n);
  const std::vector<double> w(static_cast<size_t>(n), grid.k());
  return finish(spec, grid, traj, n, w);
}

Vector s_extrapolated(const HistoryOperatorSpec& spec, const TimeGrid& grid,
                      std::span<const Vector> traj, int n) {
  if (n < 2) return s_modified_trapezoid(spec, grid, traj, n);
  require_length(traj, n, n);
  const double k = grid.k();
  std::vector<double> w(static_cast<size_t>(n), k);
  w[0] = 0.5 * k;
  // k/2 (2 u_{n-1} - u_{n-2}) on top of the regular weights.
  w[n - 1] += k;
  w[n - 2] -= 0.5 * k;
  return finish(spec, grid, traj, n, w);
}

double update_zeta(const TimeGrid& grid, std::span<const double> strain_norms,
                   int n) {
  if (n < 0 || static_cast<int>(strain_norms.size()) < n) {
    throw InvalidArgument("update_zeta: strain norm list shorter than step");
  }
  const auto w = modified_trapezoid_weights(grid, n);
  double z = 0.0;
  for (int j = 0; j < n; ++j) z += w[j] * strain_norms[j];
  return z;
}

}  // namespace hvi
