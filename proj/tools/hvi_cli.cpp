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

// Command-line driver: single solves, refinement studies, the scalar bench
// and contact-boundary profiles.

#include "hvi/config.hpp"
#include "hvi/scalar_bench.hpp"
#include "hvi/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNonConvergence = 3, kIoError = 4 };

struct CommonFlags {
  std::string config;
  std::string scheme;
  std::string h;
  std::string k;
  std::string output;
};

hvi::Config build_config(const CommonFlags& f) {
  hvi::Config c = f.config.empty() ? hvi::Config{} : hvi::load_config(f.config);
  if (!f.scheme.empty()) {
    c.scheme.scheme = hvi::parse_scheme(f.scheme);
    c.study.scheme = c.scheme.scheme;
  }
  if (!f.h.empty()) c.h = hvi::parse_number(f.h);
  if (!f.k.empty()) c.k = hvi::parse_number(f.k);
  if (!f.output.empty()) c.study.output = f.output;
  return c;
}

void finish(hvi::Config& c) {
  hvi::finalize_config(c);
  for (const auto& w : c.warnings) std::cerr << "warning: " << w << '\n';
}

void print_report(const hvi::ConvergenceReport& r) {
  hvi::write_report_csv(r, std::cout);
  std::printf("fitted slope %.4f, final order %.4f, wall time %.2f s\n",
              r.fitted_slope(), r.final_order(), r.wall_seconds);
}

int report_status(const hvi::ConvergenceReport& r) {
  for (const auto& row : r.rows) {
    if (!row.ok) return kNonConvergence;
  }
  return kOk;
}

int cmd_solve(const CommonFlags& f) {
  hvi::Config c = build_config(f);
  finish(c);
  const int N = hvi::step_count(c.data.T, c.k);
  const hvi::ContactRun run = hvi::solve_contact(c.data, c.scheme, c.h, N);
  const Eigen::VectorXd& u = run.trajectory.states.back();
  std::printf("scheme %s, h %.6g, k %.6g, dofs %d, steps %d\n",
              std::string(hvi::to_string(c.scheme.scheme)).c_str(), c.h, c.k,
              run.space->n_free(), N);
  std::printf("H1 norm at T: %.6e\n", hvi::h1_norm(u, *run.space));
  std::printf("max outer iterations %d, max u_nu %.6e (g = %.6g), max KKT residual %.3e\n",
              run.stats.max_outer_iters, run.stats.max_normal_displacement, c.data.g,
              run.stats.max_kkt_residual);
  std::printf("wall time %.2f s\n", run.wall_seconds);
  if (!c.study.output.empty()) {
    std::ofstream out(c.study.output);
    if (!out) throw hvi::IoError("cannot open '" + c.study.output + "' for writing");
    hvi::write_step_log(run, out);
    if (!out) throw hvi::IoError("write to '" + c.study.output + "' failed");
  }
  return kOk;
}

int cmd_profile(const CommonFlags& f, const std::string& t_final) {
  hvi::Config c = build_config(f);
  if (!t_final.empty()) c.data.T = hvi::parse_number(t_final);
  finish(c);
  const int N = hvi::step_count(c.data.T, c.k);
  const hvi::ContactRun run = hvi::solve_contact(c.data, c.scheme, c.h, N);
  const std::string path = c.study.output.empty() ? "profile.csv" : c.study.output;
  hvi::emit_profile(run.trajectory, *run.space, c.data.T, path);
  double max_unu = -INFINITY;
  for (const auto& p : hvi::gamma3_profile(run.trajectory.states.back(), *run.space)) {
    max_unu = std::max(max_unu, p.u_nu);
  }
  std::printf("profile at t = %.6g written to %s; max u_nu %.6e (g = %.6g)\n",
              c.data.T, path.c_str(), max_unu, c.data.g);
  return kOk;
}

int cmd_bench(const CommonFlags& f, const std::string& k_levels) {
  hvi::Config c = build_config(f);
  if (!k_levels.empty()) c.study.ks = hvi::parse_number_list(k_levels);
  c.study.mode = hvi::StudyMode::ScalarBench;
  finish(c);
  const hvi::ScalarProblem p = hvi::make_default_bench();
  std::vector<hvi::Scheme> schemes;
  if (f.scheme.empty()) {
    schemes = {hvi::Scheme::FirstOrder, hvi::Scheme::FixedPointImplicit,
               hvi::Scheme::Extrapolation};
  } else {
    schemes = {c.scheme.scheme};
  }
  int status = kOk;
  for (hvi::Scheme s : schemes) {
    hvi::StudySpec spec = c.study;
    spec.scheme = s;
    const auto r = hvi::run_bench_study(spec, c.scheme, p);
    print_report(r);
    if (!spec.output.empty()) {
      std::string path = spec.output;
      if (schemes.size() > 1) {
        const auto dot = path.find_last_of('.');
        const std::string tag = "_" + std::string(hvi::to_string(s));
        path = dot == std::string::npos ? path + tag : path.insert(dot, tag);
      }
      hvi::save_report(r, path);
    }
    status = std::max(status, report_status(r));
  }
  return status;
}

struct StudyFlags {
  std::string mode;
  std::string h_levels;
  std::string k_levels;
  std::string h_ref;
  std::string k_ref;
  std::string reference_scheme;
};

int cmd_study(const CommonFlags& f, const StudyFlags& s) {
  hvi::Config c = build_config(f);
  if (!s.mode.empty()) c.study.mode = hvi::parse_study_mode(s.mode);
  if (!s.h_levels.empty()) c.study.hs = hvi::parse_number_list(s.h_levels);
  if (!s.k_levels.empty()) c.study.ks = hvi::parse_number_list(s.k_levels);
  if (!s.h_ref.empty()) c.study.h_ref = hvi::parse_number(s.h_ref);
  if (!s.k_ref.empty()) c.study.k_ref = hvi::parse_number(s.k_ref);
  if (!s.reference_scheme.empty()) {
    c.study.reference_scheme = hvi::parse_scheme(s.reference_scheme);
  }
  c.study.scheme = c.scheme.scheme;
  if (c.study.mode == hvi::StudyMode::Profile) {
    CommonFlags g = f;
    g.output = c.study.output;
    return cmd_profile(g, "");
  }
  finish(c);
  hvi::ConvergenceReport r;
  if (c.study.mode == hvi::StudyMode::ScalarBench) {
    r = hvi::run_bench_study(c.study, c.scheme);
  } else {
    r = hvi::run_study(c.study, c.data, c.scheme);
  }
  print_report(r);
  std::printf("max outer iterations %d, max u_nu %.6e, max KKT residual %.3e\n",
              r.stats.max_outer_iters, r.stats.max_normal_displacement,
              r.stats.max_kkt_residual);
  if (!c.study.output.empty()) hvi::save_report(r, c.study.output);
  return report_status(r);
}

void add_common(CLI::App* app, CommonFlags& f, bool grid) {
  app->add_option("--config", f.config, "INI configuration file");
  app->add_option("--scheme", f.scheme, "first-order | fixed-point | extrapolation");
  app->add_option("--output", f.output, "output CSV path");
  if (grid) {
    app->add_option("--h", f.h, "mesh size, e.g. 1/16");
    app->add_option("--k", f.k, "time step, e.g. 1/16");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time stepping and convergence studies for history-dependent "
               "contact inequalities"};
  app.require_subcommand(1);
  // "--h" is a grid option, so help is reachable only as --help.
  app.set_help_flag("--help", "print this help message and exit");

  CommonFlags solve_f, study_f, bench_f, profile_f;
  StudyFlags study_s;
  std::string bench_k, t_final;

  auto* solve = app.add_subcommand("solve", "run one contact simulation");
  add_common(solve, solve_f, true);

  auto* study = app.add_subcommand("study", "run a refinement study");
  add_common(study, study_f, true);
  study->add_option("--mode", study_s.mode,
                    "temporal | spatial | path-keqh | path-k2eqh | profile | scalar_bench");
  study->add_option("--h-levels", study_s.h_levels, "comma separated mesh sizes");
  study->add_option("--k-levels", study_s.k_levels, "comma separated time steps");
  study->add_option("--h-ref", study_s.h_ref, "reference mesh size");
  study->add_option("--k-ref", study_s.k_ref, "reference time step");
  study->add_option("--reference-scheme", study_s.reference_scheme,
                    "scheme of the reference run (default fixed-point)");

  auto* bench = app.add_subcommand("bench", "scalar bench against the closed form");
  add_common(bench, bench_f, false);
  bench->add_option("--k-levels", bench_k, "comma separated time steps");

  auto* profile = app.add_subcommand("profile", "normal displacement on the contact boundary");
  add_common(profile, profile_f, true);
  profile->add_option("--t-final", t_final, "final time of the run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*solve) return cmd_solve(solve_f);
    if (*study) return cmd_study(study_f, study_s);
    if (*bench) return cmd_bench(bench_f, bench_k);
    if (*profile) return cmd_profile(profile_f, t_final);
  } catch (const hvi::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const hvi::ConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const hvi::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
