#pragma once

// Command implementations shared by the command-line tool and the tests. Each
// job writes its artifacts under one output directory and returns an exit code.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nlsdelta/config.hpp"
#include "nlsdelta/errors.hpp"
#include "nlsdelta/evolution.hpp"
#include "nlsdelta/functionals.hpp"
#include "nlsdelta/ground_state.hpp"
#include "nlsdelta/inequalities.hpp"
#include "nlsdelta/initial_data.hpp"
#include "nlsdelta/io.hpp"
#include "nlsdelta/operator.hpp"
#include "nlsdelta/virial.hpp"

namespace nlsdelta {

inline constexpr int exit_ok = 0;
inline constexpr int exit_numerical_failure = 1;
inline constexpr int exit_blowup = 2;
inline constexpr int exit_config_error = 3;

/// Ordered `key: value` lines for summary.txt.
class Summary {
public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  std::string text() const {
    std::string out;
    for (const auto& [k, v] : lines_) out += k + ": " + v + "\n";
    return out;
  }

private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

struct JobContext {
  Command command;
  JobConfig config;
  std::filesystem::path out_dir;
  OutputHeader header;
  Summary summary;

  std::string path(const std::string& name) const { return (out_dir / name).string(); }
  void write(const std::string& name, const std::string& body) const { write_text_file(path(name), body); }
  void write_snapshot_file(const std::string& name, const DecomposedState& s, double p) const {
    Snapshot snap = make_snapshot(s, p);
    snap.manifest_hash = header.manifest_hash;
    write_snapshot(path(name), snap);
  }
};

/// Content hash of the job: command, seed and the resolved configuration.
inline std::string manifest_hash(Command command, const JobConfig& c) {
  return git_blob_hash("command = " + to_string(command) + "\n" + emit(c));
}

inline ModelPtr job_model(const JobConfig& c) { return make_model(make_grid(c.sim.n_points, c.sim.r_max), c.sim.alpha); }

inline ScaledGroundParams scaled_params(const JobConfig& c) {
  ScaledGroundParams sp;
  sp.omega = c.omega;
  sp.p = c.sim.p;
  sp.c = c.scale_c;
  sp.c_max = c.scale_c_max;
  sp.ground = c.ground;
  return sp;
}

inline std::string ground_log_csv(const GroundStateReport& rep, const OutputHeader& header) {
  std::string out = header.text() + csv_row({"iteration", "action", "residual"});
  for (const auto& e : rep.log)
    out += csv_row({std::to_string(e.iteration), format_double(e.action), format_double(e.residual)});
  return out;
}

inline void summarize_ground(Summary& s, const GroundStateReport& g) {
  const FunctionalReport fr = evaluate(g.state, g.p, Sign::focusing, g.omega);
  s.add("ground.omega", g.omega);
  s.add("ground.p", g.p);
  s.add("ground.action", g.action_value);
  s.add("ground.residual_relative", g.residual);
  s.add("ground.nehari_relative", g.nehari);
  s.add("ground.pohozaev", fr.pohozaev);
  s.add("ground.mass", fr.mass);
  s.add("ground.q", g.state.q.real());
  s.add("ground.iterations", g.iterations);
  s.add("ground.converged", g.converged);
}

inline void summarize_certificate(Summary& s, const BlowupCertificate& c, double scale) {
  s.add("certificate.c", scale);
  s.add("certificate.action_u0", c.action_u0);
  s.add("certificate.action_ground", c.action_ground);
  s.add("certificate.margin_action", c.margin_action);
  s.add("certificate.margin_energy", c.margin_energy);
  s.add("certificate.margin_pohozaev", c.margin_pohozaev);
  s.add("certificate.pohozaev_bound", c.pohozaev_bound);
  s.add("certificate.delta", c.delta);
  s.add("certificate.c2", c.c2);
  s.add("certificate.hypothesis_applicable", c.hypothesis_applicable);
  s.add("certificate.holds", c.holds);
}

/// Runs the evolution and writes evolution.csv (plus virial.csv when focusing).
inline int evolve_and_write(JobContext& ctx, const DecomposedState& u0) {
  const SimConfig& sim = ctx.config.sim;
  ctx.write_snapshot_file("initial_state.json", u0, sim.p);
  const RunResult res = run(sim, u0);
  ctx.write("evolution.csv", evolution_csv(res.series, ctx.header));
  if (sim.sign == Sign::focusing) ctx.write("virial.csv", virial_csv(res.series, res.virial, ctx.header));
  ctx.write_snapshot_file("final_state.json", res.final_state, sim.p);

  const auto& first = res.series.front();
  double mass_drift = 0.0, energy_drift = 0.0, h1_max = 0.0;
  for (const auto& r : res.series) {
    mass_drift = std::max(mass_drift, std::abs(r.mass - first.mass) / first.mass);
    energy_drift = std::max(energy_drift, std::abs(r.energy - first.energy) / std::max(std::abs(first.energy), 1e-300));
    h1_max = std::max(h1_max, r.h1_alpha);
  }
  Summary& s = ctx.summary;
  s.add("run.t_final", res.t_final);
  s.add("run.steps", res.steps);
  s.add("run.records", long(res.series.size()));
  s.add("run.dt_smallest", res.dt_smallest);
  s.add("run.blowup", res.blowup);
  s.add("run.blowup_reason", res.blowup ? res.blowup_reason : std::string("none"));
  s.add("run.mass_drift_max_relative", mass_drift);
  s.add("run.energy_drift_max_relative", energy_drift);
  s.add("run.h1_alpha_initial", first.h1_alpha);
  s.add("run.h1_alpha_max", h1_max);
  s.add("run.h1_alpha_final", res.series.back().h1_alpha);
  return res.blowup ? exit_blowup : exit_ok;
}

// ---------------------------------------------------------------- commands

inline int job_spectrum(JobContext& ctx) {
  const double alpha = ctx.config.sim.alpha;
  const double e = eigenvalue_alpha(alpha);
  const double gamma_at_e = gamma_coeff(alpha, std::abs(e));
  const ModelPtr model = job_model(ctx.config);
  Summary& s = ctx.summary;
  s.add("alpha", alpha);
  s.add("e_alpha", e);
  s.add("gamma_at_abs_e_alpha", gamma_at_e);
  s.add("discrete_kappa", model->kappa());

  std::string csv = ctx.header.text() + csv_row({"lambda", "green_l2_sq", "discrete_green_l2_sq", "expected", "rel_error"});
  for (double lambda : {1.0, 4.0, std::abs(e)}) {
    const GreenParams gp{alpha, cplx{lambda, 0.0}};
    const Field g = sample(model->grid(), [&](double r) { return green_value(gp, r).real(); });
    const double sampled = norm_sq(model->grid(), g);
    const double discrete = norm_sq(model->grid(), make_workspace(model, lambda)->green());
    const double expected = 1.0 / (4.0 * pi * lambda);
    csv += csv_row({format_double(lambda), format_double(sampled), format_double(discrete), format_double(expected),
                    format_double(std::abs(sampled - expected) / expected)});
  }
  ctx.write("spectrum.csv", csv);
  return std::abs(gamma_at_e) <= 1e-12 ? exit_ok : exit_numerical_failure;
}

inline int job_groundstate(JobContext& ctx) {
  const JobConfig& c = ctx.config;
  const GroundStateReport g = solve_ground_state(job_model(c), c.omega, c.sim.p, c.ground);
  ctx.write("groundstate_log.csv", ground_log_csv(g, ctx.header));
  ctx.write_snapshot_file("ground_state.json", g.state, c.sim.p);
  summarize_ground(ctx.summary, g);
  return g.converged ? exit_ok : exit_numerical_failure;
}

inline DecomposedState job_initial_data(JobContext& ctx, const WorkspacePtr& ws) {
  const JobConfig& c = ctx.config;
  ctx.summary.add("initial", to_string(c.initial));
  switch (c.initial) {
    case InitialKind::gaussian: return gaussian_data(ws, c.gaussian);
    case InitialKind::custom_snapshot: return snapshot_data(ws, c.snapshot);
    case InitialKind::scaled_ground_state: {
      const ScaledGroundResult r = scaled_ground_data(ws, scaled_params(c));
      summarize_ground(ctx.summary, r.ground);
      summarize_certificate(ctx.summary, r.certificate, r.c);
      return r.state;
    }
  }
  fail(ErrorKind::parameter, "unknown initial data kind");
}

inline int job_evolve(JobContext& ctx) {
  const ModelPtr model = job_model(ctx.config);
  const WorkspacePtr ws = make_workspace(model, ctx.config.sim.resolved_lambda_ref());
  return evolve_and_write(ctx, job_initial_data(ctx, ws));
}

inline int job_blowup_demo(JobContext& ctx) {
  const JobConfig& c = ctx.config;
  if (c.sim.sign != Sign::focusing) throw ConfigError(0, "blowup-demo needs sign = focusing");
  const ModelPtr model = job_model(c);
  const WorkspacePtr ws = make_workspace(model, c.sim.resolved_lambda_ref());
  const GroundStateReport g = solve_ground_state(model, c.omega, c.sim.p, c.ground);
  ctx.write("groundstate_log.csv", ground_log_csv(g, ctx.header));
  ctx.write_snapshot_file("ground_state.json", g.state, c.sim.p);
  summarize_ground(ctx.summary, g);
  ScaledGroundResult r;
  try {
    r = scaled_ground_data(ws, g, scaled_params(c));
  } catch (const Error& e) {
    ctx.summary.add("certificate.error", std::string(e.what()));
    throw;
  }
  summarize_certificate(ctx.summary, r.certificate, r.c);
  return evolve_and_write(ctx, r.state);
}

inline int job_virial_scan(JobContext& ctx) {
  const JobConfig& c = ctx.config;
  const ModelPtr model = job_model(c);
  const WorkspacePtr ws = make_workspace(model, c.sim.resolved_lambda_ref());
  const DecomposedState u0 = job_initial_data(ctx, ws);

  const std::size_t nR = c.virial_R_list.size();
  std::vector<std::vector<TimeSeriesRecord>> series(nR);
  std::vector<std::vector<VirialBreakdown>> parts(nR);
  RunObserver obs;
  obs.on_state = [&](const TimeSeriesRecord& rec, const DecomposedState& u) {
    for (std::size_t k = 0; k < nR; ++k) {
      const double R = c.virial_R_list[k];
      TimeSeriesRecord r = rec;
      r.V = virial_V(u, R);
      r.Vprime = virial_Vprime(u, R);
      const VirialBreakdown b = virial_Vsecond(u, R, c.sim.p, Sign::focusing, std::numeric_limits<double>::infinity());
      r.Vsecond_analytic = b.total;
      series[k].push_back(r);
      parts[k].push_back(b);
    }
  };
  const RunResult res = run(c.sim, u0, obs);
  ctx.write("evolution.csv", evolution_csv(res.series, ctx.header));
  for (std::size_t k = 0; k < nR; ++k) {
    const std::string tag = format_double(c.virial_R_list[k]);
    ctx.write("virial_R" + tag + ".csv", virial_csv(series[k], parts[k], ctx.header));
    double worst = 0.0;
    for (const auto& b : parts[k]) worst = std::max(worst, std::abs(b.remainder()));
    ctx.summary.add("remainder_max_abs.R" + tag, worst);
  }
  ctx.summary.add("run.t_final", res.t_final);
  ctx.summary.add("run.blowup", res.blowup);
  return res.blowup ? exit_blowup : exit_ok;
}

// ---------------------------------------------------------------- inequality bench

struct BenchRow {
  std::string family;
  std::string params;
  std::string grid;
  double ratio = 0.0;
  double empirical_C = 0.0;
  bool flagged = false;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double log_hardy_bump_integral = 0.0;
  double c_gn_empirical = 0.0;  // p = 3
  double cubic_mass_threshold = 0.0;
  KatoReport kato_coarse;
  KatoReport kato_fine;
  LogFit green_growth;
  std::vector<double> cutoff_green_norms;
};

inline std::string grid_tag(std::size_t n, double r_max) { return "n=" + std::to_string(n) + ";r_max=" + format_double(r_max); }

/// Adds two rows (coarse and fine grid) for one member; empirical_C is filled per family afterwards.
inline void add_refined(BenchResult& out, const std::string& family, const std::string& params,
                        const RefinedValue& v, std::size_t n, double r_max) {
  out.rows.push_back({family, params, grid_tag(n, r_max), v.coarse, 0.0, v.flagged});
  out.rows.push_back({family, params, grid_tag(2 * n, r_max), v.fine, 0.0, v.flagged});
}

inline BenchResult run_inequality_bench(const JobConfig& c) {
  BenchResult out;
  const std::size_t n = c.ineq_n_points;
  const double rm = c.ineq_r_max;
  const double alpha = c.sim.alpha;
  const double lambda = c.sim.resolved_lambda_ref();
  const double a = c.hardy_a, b = c.hardy_b;
  auto ws_on = [&](const GridPtr& g) { return make_workspace(make_model(g, alpha), lambda); };
  const std::vector<double> sigmas{1.0, 0.1, 0.01};

  {
    const auto g = make_grid(n, rm);
    out.log_hardy_bump_integral = log_hardy_integral(*g, hardy_bump(*g), a, b);
  }
  add_refined(out, "log_hardy", "bump;a=" + format_double(a) + ";b=" + format_double(b),
              refine([&](const GridPtr& g) { return log_hardy_ratio(*g, hardy_bump(*g), a, b); }, n, rm), n, rm);
  for (double sg : sigmas)
    add_refined(out, "log_hardy", "sigma=" + format_double(sg) + ";a=" + format_double(a) + ";b=" + format_double(b),
                refine([&](const GridPtr& g) { return log_hardy_ratio(*g, concentrating_gaussian(*g, sg), a, b); }, n, rm),
                n, rm);

  for (double sg : sigmas)
    add_refined(out, "strauss", "sigma=" + format_double(sg),
                refine([&](const GridPtr& g) {
                  return strauss_ratio(*g, concentrating_gaussian(*g, sg), 4.0 * rm / double(n));
                }, n, rm),
                n, rm);

  const auto family = random_family(c.family_size, c.seed);
  for (std::size_t k = 0; k < family.size(); ++k)
    add_refined(out, "sobolev", "member=" + std::to_string(k) + ";rho=" + format_double(c.sobolev_rho),
                refine([&](const GridPtr& g) { return sobolev_ratio(realize(family[k], ws_on(g)), c.sobolev_rho); }, n, rm),
                n, rm);

  // Gagliardo-Nirenberg at p = 3 over Gaussians, projected Gaussians and the random family.
  const double p_gn = 3.0;
  std::vector<std::pair<std::string, std::function<DecomposedState(const WorkspacePtr&)>>> gn_members;
  for (double sg : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
    gn_members.push_back({"gaussian;sigma=" + format_double(sg), [sg](const WorkspacePtr& ws) {
                            return gaussian_data(ws, GaussianParams{1.0, sg, ChargeMode::zero, 0.0, 0.0});
                          }});
    gn_members.push_back({"projected_gaussian;sigma=" + format_double(sg), [sg](const WorkspacePtr& ws) {
                            return gaussian_data(ws, GaussianParams{1.0, sg, ChargeMode::project, 0.0, 0.0});
                          }});
  }
  if (holds_bound_state(make_model(make_grid(n, rm), alpha)))
    gn_members.push_back({"bound_state", [](const WorkspacePtr& ws) { return change_lambda(bound_state(ws->model_ptr()), ws); }});
  for (std::size_t k = 0; k < family.size(); ++k)
    gn_members.push_back({"random;member=" + std::to_string(k),
                          [&family, k](const WorkspacePtr& ws) { return realize(family[k], ws); }});
  for (const auto& [name, make] : gn_members) {
    const RefinedValue v = refine([&](const GridPtr& g) { return gagliardo_nirenberg_ratio(make(ws_on(g)), p_gn); }, n, rm);
    add_refined(out, "gagliardo_nirenberg", name + ";p=3", v, n, rm);
    out.c_gn_empirical = std::max({out.c_gn_empirical, v.coarse, v.fine});
  }
  out.cubic_mass_threshold = cubic_mass_threshold(out.c_gn_empirical);

  // Lipschitz bound of g: disjoint random pairs, bounded by kato_M in H^1_alpha, plus one u = v pair.
  const auto kato_family = random_family(2 * c.kato_pairs, c.seed + 1);
  auto kato_on = [&](const GridPtr& g) {
    const WorkspacePtr ws = ws_on(g);
    std::vector<StatePair> pairs;
    for (std::size_t k = 0; k < c.kato_pairs; ++k)
      pairs.push_back({realize(kato_family[2 * k], ws, c.kato_M), realize(kato_family[2 * k + 1], ws, c.kato_M)});
    pairs.push_back({pairs.front().u, pairs.front().u});
    return kato_lipschitz_check(pairs, c.sim.p, c.kato_eps);
  };
  out.kato_coarse = kato_on(make_grid(n, rm));
  out.kato_fine = kato_on(make_grid(2 * n, rm));
  {
    RefinedValue v{out.kato_coarse.worst_ratio, out.kato_fine.worst_ratio, false};
    v.flagged = !(v.relative_change() <= refinement_flag_threshold);
    add_refined(out, "kato_lipschitz",
                "pairs=" + std::to_string(c.kato_pairs) + ";p=" + format_double(c.sim.p) + ";eps=" +
                    format_double(c.kato_eps) + ";M=" + format_double(c.kato_M),
                v, n, rm);
  }
  {
    const RefinedValue v = refine([&](const GridPtr& g) {
      const WorkspacePtr ws = ws_on(g);
      return nonlinearity_lr_norm(gaussian_data(ws, GaussianParams{1.0, 1.0, ChargeMode::project, 0.0, 0.0}), c.sim.p,
                                  2.0 - c.kato_eps);
    }, n, rm);
    add_refined(out, "kato_source_norm", "projected_gaussian;sigma=1;r=" + format_double(2.0 - c.kato_eps), v, n, rm);
  }

  // G^lambda is not in H^1 (log growth); a quadratic-at-origin cut-off of it is.
  out.green_growth = green_h1_growth(lambda, {n, 2 * n, 4 * n}, rm);
  for (std::size_t i = 0; i < out.green_growth.h.size(); ++i)
    out.rows.push_back({"green_h1_sq", "lambda=" + format_double(lambda),
                        grid_tag(std::size_t(std::lround(rm / out.green_growth.h[i])), rm), out.green_growth.value[i],
                        out.green_growth.b, false});
  for (std::size_t m : {n, 2 * n, 4 * n}) {
    out.cutoff_green_norms.push_back(cutoff_green_h1(lambda, m, rm));
    out.rows.push_back({"cutoff_green_h1", "lambda=" + format_double(lambda), grid_tag(m, rm),
                        out.cutoff_green_norms.back(), 0.0, false});
  }

  // empirical_C: the family maximum, written on every row of the family.
  for (auto& row : out.rows) {
    if (row.family == "green_h1_sq") continue;
    double mx = 0.0;
    for (const auto& other : out.rows)
      if (other.family == row.family) mx = std::max(mx, other.ratio);
    row.empirical_C = mx;
  }
  return out;
}

inline std::string inequality_csv(const BenchResult& b, const OutputHeader& header) {
  std::string out = header.text() + csv_row(inequality_columns());
  for (const auto& r : b.rows)
    out += csv_row({r.family, r.params, r.grid, format_double(r.ratio), format_double(r.empirical_C),
                    r.flagged ? "1" : "0"});
  return out;
}

inline int job_inequalities(JobContext& ctx) {
  const BenchResult b = run_inequality_bench(ctx.config);
  ctx.write("inequalities.csv", inequality_csv(b, ctx.header));
  Summary& s = ctx.summary;
  s.add("log_hardy.bump_integral", b.log_hardy_bump_integral);
  s.add("log_hardy.bump_integral_exact", 2.0 * pi / ((ctx.config.hardy_b - 1.0) *
                                                     std::pow(std::log(2.0), ctx.config.hardy_b - 1.0)));
  s.add("gagliardo_nirenberg.empirical_C_p3", b.c_gn_empirical);
  s.add("gagliardo_nirenberg.cubic_mass_threshold", b.cubic_mass_threshold);
  s.add("kato.worst_ratio_coarse", b.kato_coarse.worst_ratio);
  s.add("kato.worst_ratio_fine", b.kato_fine.worst_ratio);
  s.add("kato.fitted_C_coarse", b.kato_coarse.fitted_C);
  s.add("kato.fitted_C_fine", b.kato_fine.fitted_C);
  s.add("kato.pairs_skipped", b.kato_coarse.pairs_skipped);
  s.add("green_h1_sq.log_slope", b.green_growth.b);
  long flagged = 0;
  for (const auto& r : b.rows) flagged += r.flagged;
  s.add("rows_flagged_by_refinement", flagged / 2);
  return exit_ok;
}

// ---------------------------------------------------------------- entry point

/// Parses, writes the config echo, dispatches, and maps failures onto exit codes.
/// `seed` < 0 keeps the config's seed.
inline int run_job(Command command, const std::string& config_text, const std::vector<std::string>& overrides,
                   long long seed, const std::filesystem::path& out_dir, std::ostream& log) {
  JobContext ctx{command, {}, out_dir, {}, {}};
  try {
    ctx.config = parse_config(config_text, command, overrides);
  } catch (const Error& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
  if (seed >= 0) ctx.config.seed = std::uint64_t(seed);
  ctx.header.manifest_hash = manifest_hash(command, ctx.config);
  ctx.header.lambda_ref = ctx.config.sim.resolved_lambda_ref();

  try {
    std::filesystem::create_directories(out_dir);
    ctx.write("config.resolved.txt", "# command=" + to_string(command) + "\n" + ctx.header.text() + emit(ctx.config));
  } catch (const std::exception& e) {
    log << "io error: " << e.what() << "\n";
    return exit_numerical_failure;
  }

  ctx.summary.add("command", to_string(command));
  ctx.summary.add("manifest_hash", ctx.header.manifest_hash);
  ctx.summary.add("lambda_ref", ctx.header.lambda_ref);
  int code = exit_numerical_failure;
  try {
    switch (command) {
      case Command::spectrum: code = job_spectrum(ctx); break;
      case Command::groundstate: code = job_groundstate(ctx); break;
      case Command::evolve: code = job_evolve(ctx); break;
      case Command::blowup_demo: code = job_blowup_demo(ctx); break;
      case Command::virial_scan: code = job_virial_scan(ctx); break;
      case Command::inequalities: code = job_inequalities(ctx); break;
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    ctx.summary.add("error", std::string(e.what()));
    code = exit_config_error;
  } catch (const Error& e) {
    log << "numerical failure: " << e.what() << "\n";
    ctx.summary.add("error", std::string(e.what()));
    code = exit_numerical_failure;
  }
  ctx.summary.add("exit_code", code);
  try {
    ctx.write("summary.txt", ctx.summary.text());
  } catch (const Error& e) {
    log << "io error: " << e.what() << "\n";
  }
  log << ctx.summary.text();
  return code;
}

}  // namespace nlsdelta
