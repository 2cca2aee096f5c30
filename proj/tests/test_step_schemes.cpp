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
#include "hvi/step_schemes.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace hvi;

namespace {

constexpr Scheme kAll[] = {Scheme::FirstOrder, Scheme::FixedPointImplicit,
                           Scheme::Extrapolation};

SchemeConfig config(Scheme s) {
  SchemeConfig c;
  c.scheme = s;
  return c;
}

ContactInstance contact(double h, ContactData data = {}) {
  return ContactInstance(build_fespace(build_rect_mesh_h(data.L1, data.L2, h)), data);
}

double max_normal(const ContactInstance& inst, const Trajectory& tr) {
  double m = -1e300;
  for (const auto& u : tr.states) m = std::max(m, inst.space().normal_trace(u).maxCoeff());
  return m;
}

}  // namespace

TEST_SUITE("step_schemes") {

TEST_CASE("scheme names") {
  for (Scheme s : kAll) CHECK(parse_scheme(to_string(s)) == s);
  CHECK(parse_scheme("implicit") == Scheme::FixedPointImplicit);
  CHECK_THROWS_AS(parse_scheme("rk4"), InvalidArgument);
  SchemeConfig c;
  c.outer_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SchemeConfig{};
  c.inner_max_iter = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("zero forcing gives the zero trajectory") {
  ContactData data;
  data.body_force_amplitude = 0.0;
  data.top_traction_amplitude = 0.0;
  const ContactInstance inst = contact(0.25, data);
  for (Scheme s : kAll) {
    const Trajectory tr = run(config(s), inst, TimeGrid(data.T, 4));
    REQUIRE(tr.states.size() == 5);
    for (const auto& u : tr.states) CHECK(u.norm() == 0.0);
    for (const auto& d : tr.steps) CHECK(d.outer_iters == 1);
  }
}

TEST_CASE("N = 1 is the initial solve plus one step") {
  const ScalarProblem p = make_default_bench();
  SchemeConfig c = config(Scheme::Extrapolation);
  c.constants = p.constants();
  const Trajectory tr = run(c, ScalarInstance(p), TimeGrid(p.T, 1));
  CHECK(tr.states.size() == 2);
  CHECK(tr.steps.size() == 2);
  CHECK(tr.zeta.size() == 2);
}

TEST_CASE("contact runs stay feasible with small KKT residuals") {
  const ContactData data;
  const ContactInstance inst = contact(0.125, data);
  for (Scheme s : kAll) {
    const SchemeConfig c = config(s);
    const Trajectory tr = run(c, inst, TimeGrid(data.T, 4));
    CHECK(max_normal(inst, tr) <= data.g + 1e-8);
    for (const auto& d : tr.steps) CHECK(d.kkt_residual < c.inner_tol);
    if (s == Scheme::FirstOrder) {
      for (size_t n = 1; n < tr.steps.size(); ++n) CHECK(tr.steps[n].outer_iters == 1);
    }
  }
}

TEST_CASE("fixed-point iterations stay within the contraction bound") {
  // k = h = 1/16, TOL = 1e-10. With rho the worst ratio e_{i+1} / e_i of
  // successive iterate errors observed in a step, the stopping rule must
  // fire within log(TOL ||u_n|| / e_1) / log(rho) + 2 iterations.
  const ContactData data;
  const ContactInstance inst = contact(1.0 / 16, data);
  SchemeConfig c = config(Scheme::FixedPointImplicit);
  c.record_iterate_errors = true;
  const Trajectory tr = run(c, inst, TimeGrid(data.T, 8));
  int worst = 0;
  double worst_rho = 0.0;
  for (size_t n = 1; n < tr.steps.size(); ++n) {
    const StepDiagnostics& d = tr.steps[n];
    worst = std::max(worst, d.outer_iters);
    const auto& e = d.iterate_errors;
    const double un = inst.norm(tr.states[n]);
    double rho = 0.0;
    for (size_t i = 0; i + 1 < e.size() && e[i + 1] > 1e-12 * un; ++i) {
      rho = std::max(rho, e[i + 1] / e[i]);
    }
    REQUIRE(rho > 0.0);
    REQUIRE(rho < 1.0);
    worst_rho = std::max(worst_rho, rho);
    const double bound = std::log(c.outer_tol * un / e[0]) / std::log(rho) + 2.0;
    CHECK(d.outer_iters <= std::ceil(bound));
  }
  MESSAGE("k = h = 1/16: max outer iterations " << worst << ", worst contraction " << worst_rho);
}

TEST_CASE("runs are deterministic") {
  const ContactData data;
  const ContactInstance inst = contact(0.125, data);
  const Trajectory a = run(config(Scheme::FixedPointImplicit), inst, TimeGrid(data.T, 4));
  const Trajectory b = run(config(Scheme::FixedPointImplicit), inst, TimeGrid(data.T, 4));
  for (size_t n = 0; n < a.states.size(); ++n) CHECK((a.states[n].array() == b.states[n].array()).all());
}

TEST_CASE("the initial step is identical across schemes") {
  const ContactData data;
  const ContactInstance inst = contact(0.125, data);
  const TimeGrid g(data.T, 4);
  const Trajectory fo = run(config(Scheme::FirstOrder), inst, g);
  const Trajectory fp = run(config(Scheme::FixedPointImplicit), inst, g);
  const Trajectory ex = run(config(Scheme::Extrapolation), inst, g);
  CHECK((fo.states[0].array() == fp.states[0].array()).all());
  CHECK((ex.states[0].array() == fp.states[0].array()).all());
  // Extrapolation also reuses the implicit scheme at n = 1.
  CHECK((ex.states[1].array() == fp.states[1].array()).all());

  const ScalarProblem p = make_default_bench();
  const ScalarInstance si(p);
  const TimeGrid gs(p.T, 8);
  CHECK(run(config(Scheme::FirstOrder), si, gs).states[0][0] ==
        run(config(Scheme::Extrapolation), si, gs).states[0][0]);
}

TEST_CASE("causality: later forcing does not change earlier states") {
  ScalarProblem p = make_default_bench();
  ScalarProblem q = p;
  const auto f = p.f;
  q.f = [f](double t) { return t > 0.3 ? f(t) + 1.0 : f(t); };
  const TimeGrid g(p.T, 10);
  for (Scheme s : kAll) {
    const Trajectory a = run(config(s), ScalarInstance(p), g);
    const Trajectory b = run(config(s), ScalarInstance(q), g);
    for (int n = 0; n <= g.N(); ++n) {
      if (g.t(n) <= 0.3) CHECK(a.states[n][0] == b.states[n][0]);
    }
    CHECK(a.states.back()[0] != b.states.back()[0]);
  }
}

TEST_CASE("extrapolation on a linear solution: error is the quadrature defect only") {
  // With exact history u_j = t_j the extrapolated data 2u_{n-1} - u_{n-2}
  // equals u_n, so u_n - t_n = beta (S_exact - S_k) / (m_A + alpha_c).
  const ScalarProblem p = make_linear_bench();
  const ScalarInstance inst(p);
  const TimeGrid g(p.T, 8);
  SchemeConfig c = config(Scheme::Extrapolation);
  RunState st{&inst, g, c, {}, {}};
  for (int j = 0; j < 6; ++j) {
    st.history.trajectory.push_back(Vector::Constant(1, g.t(j)));
    st.strain_norms.push_back(g.t(j));
  }
  StepDiagnostics d;
  const int n = 6;
  const double un = step_extrapolation(n, st, d)[0];
  HistoryOperatorSpec spec;
  spec.kernel = p.kernel;
  const double sk = s_modified_trapezoid(spec, g, st.history.trajectory, n)[0];
  const double tn = g.t(n);
  const double exact_memory = tn - 1.0 + std::exp(-tn);
  CHECK(un - tn == doctest::Approx(p.beta_phi * (exact_memory - sk) / (p.m_A + p.alpha_c)).epsilon(1e-10));
  CHECK(d.outer_iters == 1);
}

TEST_CASE("constant exact solution: only the quadrature defect remains") {
  // Every explicit argument equals the constant, so each scheme inherits the
  // O(k^2) defect of the history rule on q(t, s) u(s) and nothing else.
  const ScalarProblem p = make_constant_bench(0.8);
  for (Scheme s : kAll) {
    SchemeConfig c = config(s);
    c.constants = p.constants();
    const double e16 = run_bench(p, c, TimeGrid(p.T, 16)).max_error;
    const double e32 = run_bench(p, c, TimeGrid(p.T, 32)).max_error;
    CHECK(e16 < 5e-4);
    CHECK(e16 / e32 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("scalar bench: first order against extrapolation and scheme agreement") {
  const ScalarProblem p = make_default_bench();
  SchemeConfig c;
  c.constants = p.constants();
  c.scheme = Scheme::FirstOrder;
  const double e_fo = run_bench(p, c, TimeGrid(p.T, 32)).max_error;
  c.scheme = Scheme::Extrapolation;
  const double e_ex = run_bench(p, c, TimeGrid(p.T, 32)).max_error;
  CHECK(e_ex < e_fo);

  // Differences at T between schemes shrink with k.
  double prev = 1e300;
  for (int N : {4, 8, 16, 32}) {
    double diff = 0.0;
    double uT[3];
    int i = 0;
    for (Scheme s : kAll) {
      c.scheme = s;
      uT[i++] = run(c, ScalarInstance(p), TimeGrid(p.T, N)).states.back()[0];
    }
    diff = std::max({std::abs(uT[0] - uT[1]), std::abs(uT[1] - uT[2]), std::abs(uT[0] - uT[2])});
    CHECK(diff < prev);
    prev = diff;
  }
}

TEST_CASE("failures carry the step index") {
  const ContactData data;
  const ContactInstance inst = contact(0.25, data);
  SchemeConfig c = config(Scheme::FixedPointImplicit);
  c.outer_max_iter = 2;
  c.outer_tol = 1e-14;
  try {
    run(c, inst, TimeGrid(data.T, 4));
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 1);  // zero load at t = 0 converges at once
    CHECK(e.iterations() == 2);
  }
}

TEST_CASE("strain accumulator follows the modified trapezoid rule") {
  ContactData data;
  data.mu = 0.2;
  const ContactInstance inst = contact(0.25, data);
  const TimeGrid g(data.T, 4);
  const Trajectory tr = run(config(Scheme::FixedPointImplicit), inst, g);
  std::vector<double> norms;
  for (const auto& u : tr.states) norms.push_back(inst.strain_norm(u));
  for (int n = 0; n <= g.N(); ++n) CHECK(tr.zeta[n] == doctest::Approx(update_zeta(g, norms, n)));
  CHECK(tr.zeta.back() > 0.0);
}

}  // TEST_SUITE
