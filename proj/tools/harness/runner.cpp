#include "harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "superrad/choi.hpp"
#include "superrad/closed_form.hpp"
#include "superrad/memory.hpp"
#include "superrad/parallel.hpp"
#include "superrad/superradiance.hpp"

namespace superrad::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One CSV file: header row with units, then rows of numbers or labels.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  CsvWriter& label(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvWriter& num(double v) {
    sep();
    if (std::isnan(v)) {
      out_ << "nan";
    } else {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12e", v);
      out_ << buf;
    }
    return *this;
  }
  CsvWriter& num(const std::optional<double>& v) { return num(v.value_or(kNaN)); }
  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Dicke dicke_of(int n, int twice_m) { return Dicke{HalfInt::from_twice(n), HalfInt::from_twice(twice_m)}; }

struct FactorizedPoint {
  double rho_ee;
  double abs_rho_eg;
};

// Physical (rho_ee, |rho_eg|) points on a res x res grid over [0,1]x[0,1/2].
std::vector<FactorizedPoint> factorized_points(int res) {
  std::vector<FactorizedPoint> pts;
  for (double ee : linspace(0.0, 1.0, res)) {
    for (double eg : linspace(0.0, 0.5, res)) {
      if (eg * eg <= ee * (1.0 - ee) + 1e-14) pts.push_back({ee, eg});
    }
  }
  return pts;
}

FactorizedIdentical factorized_of(int n, const FactorizedPoint& p) {
  // Clamp grid points that sit on the purity boundary up to rounding.
  const double bound = std::sqrt(std::max(0.0, p.rho_ee * (1.0 - p.rho_ee)));
  return FactorizedIdentical{n, p.rho_ee, Complex(std::min(p.abs_rho_eg, bound), 0.0)};
}

struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  unsigned jobs;
  std::ostream* log;
  std::vector<std::string> files;
  json headline = json::object();

  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
    files.push_back(name);
    return CsvWriter(dir / name, header);
  }
  void note(const std::string& msg) const {
    if (log) *log << "[" << cfg.id() << "] " << msg << std::endl;
  }
  MemoryGridOptions grid_options(unsigned inner_jobs) const {
    MemoryGridOptions o;
    o.grid_points = cfg.get_int("window.grid_points");
    const std::string diag = cfg.get_string("window.diagonal_only");
    if (diag != "auto") o.diagonal_only = diag == "true";
    o.jobs = inner_jobs;
    return o;
  }
};

// --- fig2 / fig3 -----------------------------------------------------------

void run_error_curves(Context& ctx, bool choi) {
  const auto integ = ctx.cfg.integrator();
  const auto times = linspace(0.0, ctx.cfg.get_double("window.duration"), ctx.cfg.get_int("sweep.resolution"));
  auto out = ctx.csv(choi ? "choi_error.csv" : "excitation_error.csv",
                     {"n_atoms[1]", "gamma_over_g[1]", "gt[1]", choi ? "choi_error[1]" : "excitation_error[excitations]"});
  for (int n : ctx.cfg.get_int_list("sweep.n_atoms")) {
    for (double g : ctx.cfg.get_list("sweep.gamma_over_g")) {
      ctx.note("N=" + std::to_string(n) + " gamma/g=" + tag(g));
      const SystemSpec spec = ctx.cfg.system_for(n, g);
      std::vector<double> errors(times.size());
      parallel_for(times.size(), ctx.jobs, [&](std::size_t k) {
        errors[k] = choi ? choi_error(spec, times[k], integ)
                         : excitation_error(spec, dicke_of(n, n), times[k], integ);
      });
      for (std::size_t k = 0; k < times.size(); ++k) out.num(n).num(g).num(times[k]).num(errors[k]).end();
      const std::string key = "N" + std::to_string(n) + "_g" + tag(g);
      ctx.headline["error_at_end_" + key] = errors.back();
      ctx.headline["log_slope_" + key] = log_log_slope(times, errors);
    }
  }
}

// --- fig4 / fig5 -----------------------------------------------------------

void run_dicke_early(Context& ctx, bool degree) {
  auto out = degree ? ctx.csv("dicke_degree_early.csv", {"n_atoms[1]", "J[1]", "M[1]", "S[1]", "N_M/N_M_ind[1]"})
                    : ctx.csv("dicke_early.csv", {"n_atoms[1]", "J[1]", "M[1]", "N_M/(gt)^2[1]", "N_P/(gt)^2[1]"});
  for (int n : ctx.cfg.get_int_list("sweep.n_atoms")) {
    for (int tm = -n; tm <= n; tm += 2) {
      const InitialState s = dicke_of(n, tm);
      if (degree) {
        if (tm == -n) continue;
        out.num(n).num(0.5 * n).num(0.5 * tm).num(degree_early(s)).num(nm_early_closed(s) / nm_early_independent(s)).end();
      } else {
        out.num(n).num(0.5 * n).num(0.5 * tm).num(nm_early_closed(s)).num(np_early(s)).end();
      }
      if (n == 4 && tm == 0) {
        ctx.headline["N4_M0_N_M_norm"] = nm_early_closed(s);
        ctx.headline["N4_M0_N_P_norm"] = np_early(s);
      }
    }
  }
}

// --- fig6 / fig7 / table2 --------------------------------------------------

void run_factorized_early(Context& ctx, bool degree) {
  auto out = degree ? ctx.csv("factorized_degree_early.csv",
                              {"n_atoms[1]", "rho_ee[1]", "abs_rho_eg[1]", "S[1]", "N_M/N_M_ind[1]"})
                    : ctx.csv("factorized_early.csv",
                              {"n_atoms[1]", "rho_ee[1]", "abs_rho_eg[1]", "N_M/(gt)^2[1]", "N_P/(gt)^2[1]"});
  const auto pts = factorized_points(ctx.cfg.get_int("sweep.resolution"));
  for (int n : ctx.cfg.get_int_list("sweep.n_atoms")) {
    ctx.note("N=" + std::to_string(n));
    std::vector<std::array<double, 2>> vals(pts.size());
    parallel_for(pts.size(), ctx.jobs, [&](std::size_t k) {
      const InitialState s = factorized_of(n, pts[k]);
      if (degree) {
        if (pts[k].rho_ee == 0.0) {
          vals[k] = {kNaN, kNaN};
          return;
        }
        vals[k] = {degree_early(s).value_or(kNaN), nm_early_closed(s) / nm_early_independent(s)};
      } else {
        vals[k] = {nm_early_closed(s), np_early(s)};
      }
    });
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (degree && pts[k].rho_ee == 0.0) continue;
      out.num(n).num(pts[k].rho_ee).num(pts[k].abs_rho_eg).num(vals[k][0]).num(vals[k][1]).end();
    }
  }
}

const char* kCharacteristics[] = {"N_P", "N_M", "N_P_ind", "N_M_ind", "S", "N_M/N_M_ind"};

void table_row(CsvWriter& out, const InitialState& s, const std::vector<double>& keys) {
  const TableRow early = table_evaluator(s, TableRegime::EarlyTime);
  const TableRow markov = table_evaluator(s, TableRegime::EarlyStageMarkov);
  const std::optional<double> e[] = {early.n_p, early.n_m, early.n_p_ind, early.n_m_ind, early.s, early.enhancement};
  const std::optional<double> m[] = {markov.n_p, markov.n_m, markov.n_p_ind, markov.n_m_ind, markov.s,
                                     markov.enhancement};
  for (int c = 0; c < 6; ++c) {
    for (double k : keys) out.num(k);
    out.label(kCharacteristics[c]).num(e[c]).num(m[c]).end();
  }
}

void run_table1(Context& ctx) {
  auto out = ctx.csv("table1.csv", {"J[1]", "M[1]", "lambda[1]", "characteristic", "early_time[(gt)^2]",
                                    "early_stage_markov[(g*tau_E)^2]"});
  int rows = 0;
  for (int n : ctx.cfg.get_int_list("sweep.n_atoms")) {
    for (int tm = -n; tm <= n; tm += 2) {
      for (double lambda : ctx.cfg.get_list("sweep.lambdas")) {
        const InitialState s = DephasedDicke{HalfInt::from_twice(n), HalfInt::from_twice(tm), lambda};
        table_row(out, s, {0.5 * n, 0.5 * tm, lambda});
        rows += 6;
      }
    }
  }
  ctx.headline["rows"] = rows;
}

void run_table2(Context& ctx) {
  auto out = ctx.csv("table2.csv", {"n_atoms[1]", "rho_ee[1]", "abs_rho_eg[1]", "characteristic",
                                    "early_time[(gt)^2]", "early_stage_markov[(g*tau_E)^2]"});
  int rows = 0;
  for (int n : ctx.cfg.get_int_list("sweep.n_atoms")) {
    for (const auto& p : factorized_points(ctx.cfg.get_int("sweep.resolution"))) {
      table_row(out, factorized_of(n, p), {static_cast<double>(n), p.rho_ee, p.abs_rho_eg});
      rows += 6;
    }
  }
  ctx.headline["rows"] = rows;
}

// --- fig8 / fig9 / custom --------------------------------------------------

void write_surface(Context& ctx, const std::string& name, const MemoryGrid& grid, double gamma_over_g) {
  auto out = ctx.csv(name, {"tau10[1/g]", "tau21[1/g]", "gamma*tau10[1]", "gamma*tau21[1]", "D[1]", "dN_ex[excitations]"});
  for (Eigen::Index i = 0; i < grid.D.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.D.cols(); ++j) {
      if (std::isnan(grid.D(i, j))) continue;
      const double a = grid.taus[static_cast<std::size_t>(i)], b = grid.taus[static_cast<std::size_t>(j)];
      out.num(a).num(b).num(gamma_over_g * a).num(gamma_over_g * b).num(grid.D(i, j)).num(grid.dNex(i, j)).end();
    }
  }
}

void write_trajectory(Context& ctx, const std::string& name, const Trajectory& t) {
  auto out = ctx.csv(name, {"t[1/g]", "gamma*t[1]", "N_ex[excitations]", "N_P[photons]", "R[g]"});
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    out.num(t.times[k]).num(t.gamma_over_g * t.times[k]).num(t.n_ex_atom[k]).num(t.n_photon[k]).num(t.emission_rate[k]).end();
  }
}

void run_example(Context& ctx) {
  const SystemSpec spec = ctx.cfg.system();
  const InitialState init = ctx.cfg.state();
  const auto integ = ctx.cfg.integrator();
  const double window = ctx.cfg.get_double("window.duration");
  const double horizon = ctx.cfg.has("window.horizon") ? ctx.cfg.get_double("window.horizon") : window;
  const double g = spec.gamma_over_g();
  EvolveOptions eo;
  eo.sample_dt = ctx.cfg.get_double("window.sample_dt");

  ctx.note("trajectories to gt=" + tag(horizon));
  Trajectory common = spec.topology == Topology::CommonCavity ? evolve_auto(spec, init, horizon, integ, eo)
                                                              : independent_trajectory(init, g, horizon, integ, eo);
  const Trajectory ind = independent_trajectory(init, g, horizon, integ, eo);
  write_trajectory(ctx, "trajectory.csv", common);
  write_trajectory(ctx, "trajectory_independent.csv", ind);

  ctx.note("memory surfaces over gt<=" + tag(window));
  const MemoryGridPair grids = memory_grids(spec, init, window, ctx.grid_options(ctx.jobs), integ, true);
  write_surface(ctx, "memory_surface.csv", grids.common, g);
  write_surface(ctx, "memory_surface_independent.csv", *grids.independent, g);

  const MemoryReport rep = report_from_grids(grids, g);
  auto& h = ctx.headline;
  h["regime"] = to_string(rep.regime);
  h["N_M"] = rep.n_m;
  h["N_M_ind"] = rep.n_m_ind;
  h["enhancement"] = opt(rep.enhancement);
  h["argmax_tau10"] = rep.argmax.first;
  h["argmax_tau21"] = rep.argmax.second;
  h["max_dN_ex"] = rep.manifestation_max;
  if (rep.regime == Regime::EarlyTime) {
    h["N_M_normalized"] = rep.n_m / (window * window);
  } else if (rep.regime == Regime::NearMarkovian) {
    h["N_M_normalized"] = rep.n_m * g * g;
  }
  if (ctx.cfg.has("window.plateau_start") && g > 0.0) {
    const double a = ctx.cfg.get_double("window.plateau_start"), b = ctx.cfg.get_double("window.plateau_end");
    if (b <= horizon * (1.0 + 1e-12)) {
      const PlateauReport pc = plateau_extract(common, a, b, &grids.common);
      const PlateauReport pi = plateau_extract(ind, a, b);
      h["N_P_steady"] = pc.n_p_steady;
      h["R_steady_over_gamma"] = pc.r_steady;
      h["dN_ex_steady"] = opt(pc.dnex_steady);
      h["plateau_drift"] = pc.drift;
      h["plateau"] = pc.plateau;
      h["S"] = pi.n_p_steady > 0.0 ? json(pc.n_p_steady / pi.n_p_steady) : json(nullptr);
    }
  }
  if (rep.regime != Regime::NearMarkovian) {
    const StrongDegree sd = degree_strong(common, ind);
    h["R_max"] = sd.r_max.value;
    h["t_R_max"] = sd.r_max.time;
    h["N_P_max"] = sd.n_p_max.value;
    h["t_N_P_max"] = sd.n_p_max.time;
    h["R_max_ind"] = sd.r_max_ind.value;
    if (!h.contains("S")) h["S"] = opt(sd.s);
    h["peak_at_boundary"] = sd.boundary;
    h["backflow_time"] = opt(sd.backflow_time);
  }
}

// --- fig10 / fig11 / fig12 -------------------------------------------------

struct StrongPoint {
  double n_m = 0, n_m_ind = 0, r_max = 0, r_max_ind = 0;
  std::optional<double> s, enhancement;
};

StrongPoint strong_point(const Context& ctx, const SystemSpec& spec, const InitialState& init) {
  const auto integ = ctx.cfg.integrator();
  const double window = ctx.cfg.get_double("window.duration");
  const double horizon = ctx.cfg.has("window.horizon") ? ctx.cfg.get_double("window.horizon") : window;
  EvolveOptions eo;
  eo.sample_dt = ctx.cfg.get_double("window.sample_dt");
  const MemoryReport rep = report_from_grids(memory_grids(spec, init, window, ctx.grid_options(1), integ, true),
                                             spec.gamma_over_g());
  const StrongDegree sd = degree_strong(evolve_auto(spec, init, horizon, integ, eo),
                                        independent_trajectory(init, spec.gamma_over_g(), horizon, integ, eo));
  return {rep.n_m, rep.n_m_ind, sd.r_max.value, sd.r_max_ind.value, sd.s, rep.enhancement};
}

void run_dicke_strong(Context& ctx) {
  const double g = ctx.cfg.get_double("system.gamma_over_g");
  struct Job {
    int n, tm;
  };
  std::vector<Job> jobs;
  for (int n : ctx.cfg.get_int_list("sweep.n_atoms")) {
    for (int tm = -n; tm <= n; tm += 2) jobs.push_back({n, tm});
  }
  std::vector<StrongPoint> res(jobs.size());
  parallel_for(jobs.size(), ctx.jobs, [&](std::size_t k) {
    if (jobs[k].tm == -jobs[k].n) return;  // ground state: nothing radiates
    res[k] = strong_point(ctx, ctx.cfg.system_for(jobs[k].n, g), dicke_of(jobs[k].n, jobs[k].tm));
  });
  auto out = ctx.csv("dicke_strong.csv", {"n_atoms[1]", "J[1]", "M[1]", "N_M[1]", "R_max[g]", "S[1]",
                                          "N_M/N_M_ind[1]", "N_M_ind[1]", "R_max_ind[g]"});
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& r = res[k];
    out.num(jobs[k].n).num(0.5 * jobs[k].n).num(0.5 * jobs[k].tm).num(r.n_m).num(r.r_max).num(r.s).num(r.enhancement)
        .num(r.n_m_ind).num(r.r_max_ind).end();
  }
}

void run_factorized_strong(Context& ctx, bool degree) {
  const double g = ctx.cfg.get_double("system.gamma_over_g");
  const auto pts = factorized_points(ctx.cfg.get_int("sweep.resolution"));
  auto out = degree ? ctx.csv("factorized_degree_strong.csv",
                              {"n_atoms[1]", "rho_ee[1]", "abs_rho_eg[1]", "S[1]", "N_M/N_M_ind[1]"})
                    : ctx.csv("factorized_strong.csv", {"n_atoms[1]", "rho_ee[1]", "abs_rho_eg[1]", "N_M[1]", "R_max[g]"});
  for (int n : ctx.cfg.get_int_list("sweep.n_atoms")) {
    ctx.note("N=" + std::to_string(n) + ", " + std::to_string(pts.size()) + " states");
    std::vector<StrongPoint> res(pts.size());
    parallel_for(pts.size(), ctx.jobs, [&](std::size_t k) {
      if (pts[k].rho_ee == 0.0) return;
      res[k] = strong_point(ctx, ctx.cfg.system_for(n, g), factorized_of(n, pts[k]));
    });
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (degree && pts[k].rho_ee == 0.0) continue;
      out.num(n).num(pts[k].rho_ee).num(pts[k].abs_rho_eg);
      if (degree) {
        out.num(res[k].s).num(res[k].enhancement).end();
      } else {
        out.num(res[k].n_m).num(res[k].r_max).end();
      }
    }
  }
}

void dispatch(Context& ctx) {
  const std::string& id = ctx.cfg.id();
  if (id == "fig2") return run_error_curves(ctx, true);
  if (id == "fig3") return run_error_curves(ctx, false);
  if (id == "fig4") return run_dicke_early(ctx, false);
  if (id == "fig5") return run_dicke_early(ctx, true);
  if (id == "fig6") return run_factorized_early(ctx, false);
  if (id == "fig7") return run_factorized_early(ctx, true);
  if (id == "fig8" || id == "fig9" || id == "custom") return run_example(ctx);
  if (id == "fig10") return run_dicke_strong(ctx);
  if (id == "fig11") return run_factorized_strong(ctx, false);
  if (id == "fig12") return run_factorized_strong(ctx, true);
  if (id == "table1") return run_table1(ctx);
  if (id == "table2") return run_table2(ctx);
  throw ConfigError("experiment.id: no runner for '" + id + "'");
}

}  // namespace

fs::path resolve_output_root(const std::optional<std::string>& flag, const ExperimentConfig& cfg) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  if (auto dir = cfg.output_dir()) return *dir;
  return "results";
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  RunResult result;
  result.dir = options.out_root / cfg.hash();
  const fs::path manifest_path = result.dir / "manifest.json";
  if (!options.force && fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    result.manifest = json::parse(in);
    result.cache_hit = true;
    return result;
  }
  fs::create_directories(result.dir);
  fs::remove(manifest_path);

  const auto start = std::chrono::steady_clock::now();
  Context ctx{cfg, result.dir, std::max(1u, options.jobs), options.log, {}, json::object()};
  {
    std::ofstream(result.dir / "config.canonical") << cfg.canonical_text();
  }
  dispatch(ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json files = json::array();
  for (const auto& f : ctx.files) files.push_back(f);
  files.push_back("config.canonical");
  result.manifest = {{"experiment", cfg.id()},   {"config_hash", cfg.hash()}, {"code_version", kCodeVersion},
                     {"wall_time_s", wall},      {"files", files},           {"headline", ctx.headline}};
  std::ofstream(manifest_path) << result.manifest.dump(2) << '\n';
  return result;
}

InitialState parse_state_flag(const std::string& text, std::optional<int> n_atoms) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("--state: cannot parse number '" + item + "'");
      }
    }
  }
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw UsageError("--state " + family + ": wrong number of parameters");
  };
  InitialState init;
  if (family == "ground") {
    need(0, 0);
    if (!n_atoms) throw UsageError("--state ground requires --n-atoms");
    init = ground_state(*n_atoms);
  } else if (family == "dicke") {
    need(2, 2);
    init = Dicke{HalfInt::from_double(args[0]), HalfInt::from_double(args[1])};
  } else if (family == "dephased") {
    need(3, 3);
    init = DephasedDicke{HalfInt::from_double(args[0]), HalfInt::from_double(args[1]), args[2]};
  } else if (family == "mixture") {
    if (args.size() < 2) throw UsageError("--state mixture: need at least two weights");
    init = DickeMixture{args};
  } else if (family == "factorized") {
    need(2, 3);
    if (!n_atoms) throw UsageError("--state factorized requires --n-atoms");
    init = FactorizedIdentical{*n_atoms, args[0], Complex(args[1], args.size() > 2 ? args[2] : 0.0)};
  } else {
    throw UsageError("--state: unknown family '" + family + "'");
  }
  validate(init);
  if (n_atoms && atom_count(init) != *n_atoms) {
    throw UsageError("--state describes " + std::to_string(atom_count(init)) + " atoms but --n-atoms is " +
                     std::to_string(*n_atoms));
  }
  return init;
}

json measure(const MeasureRequest& req) {
  const InitialState init = parse_state_flag(req.state, req.n_atoms);
  const int n = atom_count(init);
  const double g = req.gamma_over_g;
  if (!(g >= 0.0)) throw UsageError("--gamma-over-g must be >= 0");
  const SystemSpec spec = SystemSpec::common(n, g);
  const double window = req.window.value_or(g >= 100.0 ? default_markov_windows(g).memory_window : 10.0);
  if (!(window > 0.0)) throw UsageError("--window must be positive");

  MemoryGridOptions mo;
  mo.grid_points = req.grid_points;
  mo.jobs = std::max(1u, req.jobs);
  const MemoryReport rep = memory_measure(spec, init, window, mo);

  double n_p = 0.0;
  std::optional<double> s;
  if (rep.regime == Regime::EarlyTime) {
    const Trajectory c = evolve_auto(spec, init, window);
    const Trajectory i = independent_trajectory(init, g, window);
    n_p = c.n_photon.back();
    if (i.n_photon.back() > 0.0) s = n_p / i.n_photon.back();
  } else if (rep.regime == Regime::NearMarkovian) {
    const MarkovWindows w = default_markov_windows(g);
    const NearMarkovDegree d = degree_near_markovian(spec, init, w.plateau_start, w.plateau_end);
    n_p = d.common.n_p_steady;
    s = d.s;
  } else {
    const StrongDegree d = degree_strong(spec, init, window);
    n_p = d.n_p_max.value;
    s = d.s;
  }
  const double scale = rep.regime == Regime::EarlyTime ? 1.0 / (window * window)
                       : rep.regime == Regime::NearMarkovian ? g * g
                                                              : 1.0;
  return json{{"n_atoms", n},
              {"gamma_over_g", g},
              {"window", window},
              {"regime", to_string(rep.regime)},
              {"N_M", rep.n_m},
              {"N_M_ind", rep.n_m_ind},
              {"enhancement", rep.enhancement.value_or(0.0)},
              {"enhancement_defined", rep.enhancement.has_value()},
              {"N_P", n_p},
              {"S", s.value_or(0.0)},
              {"S_defined", s.has_value()},
              {"N_M_normalized", rep.n_m * scale},
              {"N_P_normalized", n_p * scale},
              {"argmax_tau10", rep.argmax.first},
              {"argmax_tau21", rep.argmax.second}};
}

}  // namespace superrad::harness
