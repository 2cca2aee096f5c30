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

#include "hvi/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hvi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::string fixed7(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7f", v);
  return buf;
}

}  // namespace

std::string_view to_string(StudyMode m) {
  switch (m) {
    case StudyMode::Temporal:
      return "temporal";
    case StudyMode::Spatial:
      return "spatial";
    case StudyMode::PathKEqH:
      return "path_keqh";
    case StudyMode::PathK2EqH:
      return "path_k2eqh";
    case StudyMode::Profile:
      return "profile";
    case StudyMode::ScalarBench:
      return "scalar_bench";
  }
  return "unknown";
}

StudyMode parse_study_mode(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  for (StudyMode m : {StudyMode::Temporal, StudyMode::Spatial, StudyMode::PathKEqH,
                      StudyMode::PathK2EqH, StudyMode::Profile,
                      StudyMode::ScalarBench}) {
    if (s == to_string(m)) return m;
  }
  if (s == "bench") return StudyMode::ScalarBench;
  throw InvalidArgument("unknown study mode '" + std::string(name) + "'");
}

std::vector<double> StudySpec::levels() const {
  switch (mode) {
    case StudyMode::Temporal:
    case StudyMode::ScalarBench:
      if (!ks.empty()) return ks;
      if (mode == StudyMode::ScalarBench) return {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
      return {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32};
    case StudyMode::Spatial:
      if (!hs.empty()) return hs;
      return {1.0 / 8, 1.0 / 16, 1.0 / 32};
    case StudyMode::PathKEqH:
    case StudyMode::PathK2EqH:
      if (!hs.empty()) return hs;
      return {1.0 / 16, 1.0 / 32, 1.0 / 64};
    case StudyMode::Profile:
      return {};
  }
  return {};
}

void StudySpec::validate() const {
  if (!(h_ref > 0.0) || !(k_ref > 0.0)) {
    throw InvalidArgument("study: h_ref and k_ref must be > 0");
  }
  for (double v : levels()) {
    if (!(v > 0.0)) throw InvalidArgument("study: step sizes must be > 0");
    const bool spatial_level = mode == StudyMode::Spatial ||
                               mode == StudyMode::PathKEqH ||
                               mode == StudyMode::PathK2EqH;
    if (spatial_level && !(v > h_ref)) {
      throw InvalidArgument("study: every h level must be coarser than h_ref");
    }
    if (mode == StudyMode::Temporal && !(v > k_ref)) {
      throw InvalidArgument("study: every k level must be coarser than k_ref");
    }
  }
  if (mode == StudyMode::PathKEqH) {
    for (double v : levels()) {
      if (!(v > k_ref)) {
        throw InvalidArgument("study: path levels must be coarser than k_ref");
      }
    }
  }
}

std::vector<double> fit_order(const std::vector<double>& errors,
                              const std::vector<double>& steps) {
  if (errors.size() != steps.size() || errors.size() < 2) {
    throw InvalidArgument("fit_order: need two or more (error, step) pairs");
  }
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(steps[i] > 0.0)) {
      throw InvalidArgument("fit_order: errors and steps must be positive");
    }
  }
  std::vector<double> out;
  for (size_t i = 1; i < errors.size(); ++i) {
    out.push_back(std::log(errors[i - 1] / errors[i]) /
                  std::log(steps[i - 1] / steps[i]));
  }
  return out;
}

double fit_slope(const std::vector<double>& errors,
                 const std::vector<double>& steps) {
  fit_order(errors, steps);  // argument checks
  const size_t n = errors.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(steps[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InvalidArgument("fit_slope: all steps are equal");
  return (n * sxy - sx * sy) / den;
}

int step_count(double T, double k) {
  if (!(k > 0.0)) throw InvalidArgument("time step must be > 0");
  const double n = std::round(T / k);
  if (n < 1.0 || std::abs(n * k - T) > 1e-9 * T) {
    std::ostringstream msg;
    msg << "time step k=" << k << " does not divide T=" << T;
    throw InvalidArgument(msg.str());
  }
  return static_cast<int>(n);
}

void IterationStats::absorb(const IterationStats& o) {
  max_outer_iters = std::max(max_outer_iters, o.max_outer_iters);
  total_outer_iters += o.total_outer_iters;
  max_qp_iters = std::max(max_qp_iters, o.max_qp_iters);
  total_inner_sweeps += o.total_inner_sweeps;
  max_active = std::max(max_active, o.max_active);
  max_kkt_residual = std::max(max_kkt_residual, o.max_kkt_residual);
  max_normal_displacement =
      std::max(max_normal_displacement, o.max_normal_displacement);
}

ContactRun solve_contact(const ContactData& data, const SchemeConfig& cfg,
                         double h, int N) {
  const auto t0 = std::chrono::steady_clock::now();
  auto space = std::make_shared<const FESpace>(
      build_fespace(build_rect_mesh_h(data.L1, data.L2, h)));
  const ContactInstance inst(*space, data);
  ContactRun out{space, run(cfg, inst, TimeGrid(data.T, N)), {}, 0.0};
  IterationStats& s = out.stats;
  s.max_normal_displacement = -std::numeric_limits<double>::infinity();
  for (size_t n = 0; n < out.trajectory.steps.size(); ++n) {
    const StepDiagnostics& st = out.trajectory.steps[n];
    s.max_outer_iters = std::max(s.max_outer_iters, st.outer_iters);
    s.total_outer_iters += st.outer_iters;
    s.max_qp_iters = std::max(s.max_qp_iters, st.qp_iters);
    s.total_inner_sweeps += st.inner_sweeps;
    s.max_active = std::max(s.max_active, st.active_count);
    s.max_kkt_residual = std::max(s.max_kkt_residual, st.kkt_residual);
    const Vector un = space->normal_trace(out.trajectory.states[n]);
    s.max_normal_displacement = std::max(s.max_normal_displacement, un.maxCoeff());
  }
  out.wall_seconds = seconds_since(t0);
  return out;
}

const ContactRun& RunCache::get(const ContactData& data, const SchemeConfig& cfg,
                                double h, int N) {
  const auto key = std::make_tuple(static_cast<int>(cfg.scheme),
                                   std::llround(h * 1e12), N);
  auto it = runs_.find(key);
  if (it == runs_.end()) {
    it = runs_.emplace(key, solve_contact(data, cfg, h, N)).first;
  }
  return it->second;
}

double ConvergenceReport::varying_step(const ConvergenceRow& r) const {
  switch (mode) {
    case StudyMode::Temporal:
    case StudyMode::ScalarBench:
      return r.k;
    default:
      return r.h;
  }
}

double ConvergenceReport::final_order() const {
  return rows.empty() ? kNaN : rows.back().order;
}

double ConvergenceReport::fitted_slope() const {
  std::vector<double> e, s;
  for (const auto& r : rows) {
    if (r.ok && r.error > 0.0) {
      e.push_back(r.error);
      s.push_back(varying_step(r));
    }
  }
  if (e.size() < 2) return kNaN;
  return fit_slope(e, s);
}

namespace {

void fill_orders(ConvergenceReport& rep) {
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [&rep](const ConvergenceRow& a, const ConvergenceRow& b) {
                     return rep.varying_step(a) > rep.varying_step(b);
                   });
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    ConvergenceRow& r = rep.rows[i];
    r.order = kNaN;
    if (i == 0) continue;
    const ConvergenceRow& p = rep.rows[i - 1];
    const double rp = rep.varying_step(p), rc = rep.varying_step(r);
    if (p.ok && r.ok && p.error > 0.0 && r.error > 0.0 && rp != rc) {
      r.order = fit_order({p.error, r.error}, {rp, rc}).front();
    } else if (p.ok && r.ok && rp == rc && p.error > 0.0) {
      r.order = 0.0;  // repeated level
    }
  }
}

}  // namespace

ConvergenceReport run_study(const StudySpec& spec, const ContactData& data,
                            const SchemeConfig& cfg_in, RunCache* cache) {
  if (spec.mode == StudyMode::Profile || spec.mode == StudyMode::ScalarBench) {
    throw InvalidArgument("run_study: mode '" + std::string(to_string(spec.mode)) +
                          "' is not a contact refinement study");
  }
  spec.validate();
  data.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SchemeConfig cfg = cfg_in;
  cfg.scheme = spec.scheme;
  RunCache local;
  RunCache& runs = cache ? *cache : local;

  ConvergenceReport rep;
  rep.mode = spec.mode;
  rep.scheme = spec.scheme;
  rep.reference_scheme = spec.reference_scheme;
  rep.h_ref = spec.h_ref;
  rep.k_ref = spec.k_ref;

  const int n_ref = step_count(data.T, spec.k_ref);
  SchemeConfig ref_cfg = cfg;
  ref_cfg.scheme = spec.reference_scheme;
  const ContactRun& ref = runs.get(data, ref_cfg, spec.h_ref, n_ref);
  rep.stats.absorb(ref.stats);
  const Vector& u_ref = ref.trajectory.states.back();

  for (double level : spec.levels()) {
    ConvergenceRow row;
    try {
      int N = 0;
      switch (spec.mode) {
        case StudyMode::Temporal:
          row.h = spec.h_ref;
          N = step_count(data.T, level);
          break;
        case StudyMode::Spatial:
          row.h = level;
          N = n_ref;
          break;
        case StudyMode::PathKEqH:
          row.h = level;
          N = step_count(data.T, level);
          break;
        case StudyMode::PathK2EqH:
          row.h = level;
          N = std::max(1, static_cast<int>(std::lround(data.T / std::sqrt(level))));
          break;
        default:
          break;
      }
      row.k = data.T / N;
      const ContactRun& lv = runs.get(data, cfg, row.h, N);
      row.stats = lv.stats;
      rep.stats.absorb(lv.stats);
      const Vector diff =
          prolongate(lv.trajectory.states.back(), *lv.space, *ref.space) - u_ref;
      row.error = h1_norm(diff, *ref.space);
    } catch (const Error& e) {
      row.ok = false;
      row.error = kNaN;
      row.message = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  fill_orders(rep);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

ConvergenceReport run_bench_study(const StudySpec& spec, const SchemeConfig& cfg_in,
                                  const ScalarProblem& p) {
  const auto t0 = std::chrono::steady_clock::now();
  SchemeConfig cfg = cfg_in;
  cfg.scheme = spec.scheme;
  cfg.constants = p.constants();
  ConvergenceReport rep;
  rep.mode = StudyMode::ScalarBench;
  rep.scheme = spec.scheme;
  for (double k : spec.levels()) {
    ConvergenceRow row;
    row.h = 0.0;
    try {
      const BenchRun b = run_bench(p, cfg, TimeGrid(p.T, step_count(p.T, k)));
      row.k = b.k;
      row.error = b.max_error;
      for (const auto& st : b.trajectory.steps) {
        row.stats.max_outer_iters = std::max(row.stats.max_outer_iters, st.outer_iters);
        row.stats.total_outer_iters += st.outer_iters;
        row.stats.total_inner_sweeps += st.inner_sweeps;
      }
      rep.stats.absorb(row.stats);
    } catch (const Error& e) {
      row.k = k;
      row.ok = false;
      row.error = kNaN;
      row.message = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  fill_orders(rep);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

void write_report_csv(const ConvergenceReport& r, std::ostream& out) {
  out << "# mode=" << to_string(r.mode) << " scheme=" << to_string(r.scheme);
  if (r.mode != StudyMode::ScalarBench) {
    out << " reference=" << to_string(r.reference_scheme) << " h_ref=" << sci(r.h_ref)
        << " k_ref=" << sci(r.k_ref);
  }
  out << "\nh,k,error,order,max_outer_iters,total_inner_sweeps,status\n";
  // Orders are recomputed from the printed errors and steps so that a reader
  // of the file reproduces the order column exactly.
  const auto printed = [](double v) { return std::stod(sci(v)); };
  for (size_t i = 0; i < r.rows.size(); ++i) {
    const ConvergenceRow& row = r.rows[i];
    double order = kNaN;
    if (i > 0 && !std::isnan(row.order)) {
      const ConvergenceRow& prev = r.rows[i - 1];
      order = std::log(printed(prev.error) / printed(row.error)) /
              std::log(printed(r.varying_step(prev)) / printed(r.varying_step(row)));
    }
    out << sci(row.h) << ',' << sci(row.k) << ',' << sci(row.error) << ','
        << fixed7(order) << ',' << row.stats.max_outer_iters << ','
        << row.stats.total_inner_sweeps << ',';
    if (row.ok) {
      out << "ok";
    } else {
      std::string m = row.message;
      std::replace(m.begin(), m.end(), ',', ';');
      std::replace(m.begin(), m.end(), '\n', ' ');
      out << "failed: " << m;
    }
    out << '\n';
  }
}

void write_report_svg(const ConvergenceReport& r, std::ostream& out) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : r.rows) {
    if (row.ok && row.error > 0.0) {
      pts.emplace_back(std::log10(r.varying_step(row)), std::log10(row.error));
    }
  }
  const double W = 480, H = 360, pad = 50;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << to_string(r.mode) << " / " << to_string(r.scheme) << "</text>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">log10 step</text>\n";
  out << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">log10 error</text>\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad
      << "\" height=\"" << H - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!pts.empty()) {
    double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    const auto sx = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
    const auto sy = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : pts) {
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
          << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
  }
  out << "</svg>\n";
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

void check_written(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string svg_path(const std::string& csv) {
  const auto slash = csv.find_last_of('/');
  const auto dot = csv.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv.substr(0, dot) + ".svg";
  }
  return csv + ".svg";
}

}  // namespace

void save_report(const ConvergenceReport& r, const std::string& path,
                 bool with_svg) {
  {
    auto f = open_output(path);
    write_report_csv(r, f);
    check_written(f, path);
  }
  if (with_svg) {
    const std::string p = svg_path(path);
    auto f = open_output(p);
    write_report_svg(r, f);
    check_written(f, p);
  }
}

std::vector<ProfilePoint> gamma3_profile(const Vector& u, const FESpace& space) {
  const Vector un = space.normal_trace(u);
  std::vector<ProfilePoint> out;
  const auto& nodes = space.gamma3_nodes();
  for (size_t a = 0; a < nodes.size(); ++a) out.push_back({nodes[a].x, un[a]});
  return out;
}

void emit_profile(const Trajectory& tr, const FESpace& space, double t,
                  std::ostream& out) {
  if (std::abs(t - tr.grid.T()) > 1e-12 * std::max(1.0, tr.grid.T())) {
    throw InvalidArgument("emit_profile: t must equal the final grid time");
  }
  out << "x,u_nu\n";
  for (const auto& p : gamma3_profile(tr.states.back(), space)) {
    out << sci(p.x) << ',' << sci(p.u_nu) << '\n';
  }
}

void emit_profile(const Trajectory& tr, const FESpace& space, double t,
                  const std::string& path) {
  auto f = open_output(path);
  emit_profile(tr, space, t, f);
  check_written(f, path);
}

void write_step_log(const ContactRun& run, std::ostream& out) {
  out << "n,t,outer_iters,qp_iters,inner_sweeps,active,kkt_residual,max_u_nu\n";
  const Trajectory& tr = run.trajectory;
  for (size_t n = 0; n < tr.steps.size(); ++n) {
    const StepDiagnostics& s = tr.steps[n];
    const Vector un = run.space->normal_trace(tr.states[n]);
    out << n << ',' << sci(tr.grid.t(static_cast<int>(n))) << ',' << s.outer_iters
        << ',' << s.qp_iters << ',' << s.inner_sweeps << ',' << s.active_count << ','
        << sci(s.kkt_residual) << ',' << sci(un.maxCoeff()) << '\n';
  }
}

}  // namespace hvi
