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

#include "hvi/scalar_bench.hpp"

#include <algorithm>
#include <cmath>

namespace hvi {

AbstractConstants ScalarProblem::constants() const {
  AbstractConstants c;
  c.m_A = m_A;
  c.L_A = m_A;
  c.alpha_phi = alpha_phi;
  c.beta_phi = beta_phi;
  c.alpha_j_relax = 0.0;
  c.alpha_c = alpha_c;
  c.c_j = 1.0;
  return c;
}

namespace {

ScalarProblem base_bench() {
  ScalarProblem p;
  p.kernel = [](double t, double s) { return std::exp(-(t - s)); };
  return p;
}

// f from the exact solution u and I(t) = int_0^t exp(-(t - s)) u(s) ds.
void manufacture(ScalarProblem& p, std::function<double(double)> u,
                 std::function<double(double)> memory) {
  const double lead = p.m_A + p.alpha_phi;
  const double beta = p.beta_phi;
  p.f = [lead, beta, u, memory](double t) { return lead * u(t) + beta * memory(t); };
  p.exact_u = std::move(u);
}

}  // namespace

ScalarProblem make_default_bench() {
  ScalarProblem p = base_bench();
  manufacture(
      p, [](double t) { return std::cos(t); },
      [](double t) { return 0.5 * (std::cos(t) + std::sin(t) - std::exp(-t)); });
  return p;
}

ScalarProblem make_constant_bench(double c) {
  ScalarProblem p = base_bench();
  manufacture(
      p, [c](double) { return c; },
      [c](double t) { return c * (1.0 - std::exp(-t)); });
  return p;
}

ScalarProblem make_linear_bench() {
  ScalarProblem p = base_bench();
  manufacture(
      p, [](double t) { return t; },
      [](double t) { return t - 1.0 + std::exp(-t); });
  return p;
}

ScalarInstance::ScalarInstance(ScalarProblem p) : p_(std::move(p)) {
  if (!p_.kernel || !p_.f || !p_.exact_u) {
    throw InvalidArgument("ScalarInstance: kernel, f and exact_u are required");
  }
  p_.constants().validate();
  jc_.resize(1, 1);
  jc_.insert(0, 0) = p_.alpha_c;
  SparseMatrix a(1, 1);
  a.insert(0, 0) = p_.m_A + p_.alpha_c;
  system_ = std::make_unique<CondensedSystem>(std::move(a), std::vector<int>{0});
}

Vector ScalarInstance::load(double t) const {
  return Vector::Constant(1, p_.f(t));
}

Vector ScalarInstance::lower_bounds() const {
  return Vector::Constant(1, kNoBound);
}

BenchRun run_bench(const ScalarProblem& p, const SchemeConfig& cfg,
                   const TimeGrid& grid) {
  const ScalarInstance inst(p);
  BenchRun out{grid.k(), 0.0, run(cfg, inst, grid)};
  for (int n = 0; n <= grid.N(); ++n) {
    const double e = std::abs(out.trajectory.states[n][0] - p.exact_u(grid.t(n)));
    out.max_error = std::max(out.max_error, e);
  }
  return out;
}

std::vector<BenchRun> run_bench(const ScalarProblem& p, const SchemeConfig& cfg,
                                const std::vector<int>& steps) {
  std::vector<BenchRun> out;
  out.reserve(steps.size());
  for (int N : steps) out.push_back(run_bench(p, cfg, TimeGrid(p.T, N)));
  return out;
}

std::vector<double> measure_fp_rate(const DiscreteInstance& instance,
                                    const TimeGrid& grid, SchemeConfig cfg) {
  cfg.scheme = Scheme::FixedPointImplicit;
  cfg.record_iterate_errors = true;
  const Trajectory tr = run(cfg, instance, grid);
  std::vector<double> rates;
  rates.reserve(tr.steps.size());
  for (int n = 0; n <= grid.N(); ++n) {
    // Errors near round-off carry no rate information.
    const double floor = 1e-11 * std::max(instance.norm(tr.states[n]), 1e-300);
    const auto& e = tr.steps[n].iterate_errors;
    int last = -1;
    for (int i = 0; i < static_cast<int>(e.size()); ++i) {
      if (e[i] > floor) last = i;
      else break;
    }
    if (last < 1) {
      rates.push_back(0.0);
    } else {
      rates.push_back(std::pow(e[last] / e[0], 1.0 / last));
    }
  }
  return rates;
}

std::vector<double> measure_fp_rate(const ScalarProblem& p, const TimeGrid& grid,
                                    SchemeConfig cfg) {
  return measure_fp_rate(ScalarInstance(p), grid, std::move(cfg));
}

}  // namespace hvi
