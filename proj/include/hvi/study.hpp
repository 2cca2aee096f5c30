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

#ifndef HVI_STUDY_HPP
#define HVI_STUDY_HPP

#include "hvi/contact_model.hpp"
#include "hvi/mesh_fe.hpp"
#include "hvi/scalar_bench.hpp"
#include "hvi/step_schemes.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace hvi {

enum class StudyMode { Temporal, Spatial, PathKEqH, PathK2EqH, Profile, ScalarBench };

std::string_view to_string(StudyMode m);
/// Accepts both "path_keqh" and "path-keqh" spellings.
StudyMode parse_study_mode(std::string_view name);

struct StudySpec {
  StudyMode mode = StudyMode::Temporal;
  Scheme scheme = Scheme::FixedPointImplicit;
  std::vector<double> hs;  // empty: mode default
  std::vector<double> ks;  // empty: mode default
  double h_ref = 1.0 / 128.0;
  double k_ref = 1.0 / 128.0;
  /// Scheme of the reference run, shared by every studied scheme. The
  /// default is the most accurate one so that the reference error stays
  /// O(k_ref^2) even when a first-order scheme is studied.
  Scheme reference_scheme = Scheme::FixedPointImplicit;
  std::string output;      // CSV path, empty for none

  /// The level list actually used: hs or ks depending on the mode, with
  /// the mode default substituted when empty.
  std::vector<double> levels() const;
  /// Throws InvalidArgument when a level is not coarser than the reference.
  void validate() const;
};

/// Pairwise orders ln(e_{i-1}/e_i) / ln(r_{i-1}/r_i); result has size n-1.
std::vector<double> fit_order(const std::vector<double>& errors,
                              const std::vector<double>& steps);
/// Least-squares slope of ln e against ln r.
double fit_slope(const std::vector<double>& errors,
                 const std::vector<double>& steps);

/// N with N k = T, rejecting step sizes that do not divide T.
int step_count(double T, double k);

struct IterationStats {
  int max_outer_iters = 0;
  long total_outer_iters = 0;
  int max_qp_iters = 0;
  long total_inner_sweeps = 0;
  int max_active = 0;
  double max_kkt_residual = 0.0;
  double max_normal_displacement = 0.0;  // max u_nu over Gamma3, all steps

  void absorb(const IterationStats& o);
};

struct ContactRun {
  std::shared_ptr<const FESpace> space;
  Trajectory trajectory;
  IterationStats stats;
  double wall_seconds = 0.0;
};

/// Assembles and runs one contact problem on the mesh of size h with N steps.
ContactRun solve_contact(const ContactData& data, const SchemeConfig& cfg,
                         double h, int N);

/// Keeps finished runs so that several studies with the same physical data
/// and solver settings can share one reference solve.
/// Memoises contact runs by (scheme, h, N). The physical data and the
/// remaining solver settings must stay fixed for the lifetime of a cache.
class RunCache {
 public:
  const ContactRun& get(const ContactData& data, const SchemeConfig& cfg,
                        double h, int N);
  size_t size() const { return runs_.size(); }

 private:
  std::map<std::tuple<int, long long, int>, ContactRun> runs_;
};

struct ConvergenceRow {
  double h = 0.0;
  double k = 0.0;
  double error = 0.0;
  double order = 0.0;    // NaN on the first row or after a failed level
  bool ok = true;
  std::string message;   // failure reason
  IterationStats stats;
};

struct ConvergenceReport {
  StudyMode mode = StudyMode::Temporal;
  Scheme scheme = Scheme::FixedPointImplicit;
  Scheme reference_scheme = Scheme::FixedPointImplicit;
  double h_ref = 0.0;
  double k_ref = 0.0;
  double wall_seconds = 0.0;
  IterationStats stats;  // over all levels and the reference
  std::vector<ConvergenceRow> rows;

  /// The step size that varies along the study (k or h).
  double varying_step(const ConvergenceRow& r) const;
  /// Order of the last row, NaN when unavailable.
  double final_order() const;
  /// Least-squares slope over successful rows.
  double fitted_slope() const;
};

/// Runs every level, measures the H1 distance to the reference at T on the
/// reference mesh and fills the order column. A level that fails is reported
/// in its row and the remaining levels still run.
ConvergenceReport run_study(const StudySpec& spec, const ContactData& data,
                            const SchemeConfig& cfg, RunCache* cache = nullptr);

/// Scalar bench: one row per k of the spec, max nodal error as the error.
ConvergenceReport run_bench_study(const StudySpec& spec, const SchemeConfig& cfg,
                                  const ScalarProblem& p = make_default_bench());

/// Header "h,k,error,order,max_outer_iters,total_inner_sweeps,status";
/// floating values in scientific notation with 6 significant digits.
void write_report_csv(const ConvergenceReport& r, std::ostream& out);
/// Log-log plot of error against the varying step.
void write_report_svg(const ConvergenceReport& r, std::ostream& out);
/// Writes `path` and the SVG next to it. Throws IoError.
void save_report(const ConvergenceReport& r, const std::string& path,
                 bool with_svg = true);

struct ProfilePoint {
  double x = 0.0;
  double u_nu = 0.0;
};

std::vector<ProfilePoint> gamma3_profile(const Vector& u, const FESpace& space);
/// CSV "x,u_nu" of the state at time t, which must be the final grid time.
void emit_profile(const Trajectory& tr, const FESpace& space, double t,
                  std::ostream& out);
void emit_profile(const Trajectory& tr, const FESpace& space, double t,
                  const std::string& path);

/// Per-step diagnostics "n,t,outer_iters,qp_iters,inner_sweeps,active,kkt,max_u_nu".
void write_step_log(const ContactRun& run, std::ostream& out);

}  // namespace hvi

#endif  // HVI_STUDY_HPP
