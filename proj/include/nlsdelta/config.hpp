#pragma once

// Flat `key = value` job files with `#` comments. Parsing fills every default,
// validates ranges, and emit() writes the resolved record back out.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/evolution.hpp"
#include "nlsdelta/functionals.hpp"
#include "nlsdelta/initial_data.hpp"
#include "nlsdelta/io.hpp"
#include "nlsdelta/specfun.hpp"

namespace nlsdelta {

/// Error raised by parse_config; line 0 means the key was missing or came from an override.
class ConfigError : public Error {
public:
  ConfigError(int line, const std::string& what)
      : Error(ErrorKind::config, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

enum class Command { groundstate, evolve, blowup_demo, virial_scan, inequalities, spectrum };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::groundstate: return "groundstate";
    case Command::evolve: return "evolve";
    case Command::blowup_demo: return "blowup-demo";
    case Command::virial_scan: return "virial-scan";
    case Command::inequalities: return "inequalities";
    case Command::spectrum: return "spectrum";
  }
  return "?";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (Command c : {Command::groundstate, Command::evolve, Command::blowup_demo, Command::virial_scan,
                    Command::inequalities, Command::spectrum})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

/// Everything a job can be told; parse_config resolves all defaults.
struct JobConfig {
  SimConfig sim;

  double omega = 2.0;
  GroundStateOptions ground;

  InitialKind initial = InitialKind::gaussian;
  GaussianParams gaussian;
  double scale_c = 0.0;
  double scale_c_max = 2.0;
  std::string snapshot;

  std::vector<double> virial_R_list{5.0, 10.0, 20.0};

  std::uint64_t seed = 0;
  std::size_t family_size = 50;
  std::size_t kato_pairs = 100;
  double kato_eps = 0.5;
  double kato_M = 5.0;
  double hardy_a = 2.0;
  double hardy_b = 4.0;
  double sobolev_rho = 4.0;
  std::size_t ineq_n_points = 4096;
  double ineq_r_max = 8.0;

  bool operator==(const JobConfig& o) const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct RawEntry {
  std::string value;
  int line = 0;
};

inline double to_double(const std::string& key, const RawEntry& e) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  if (!e.value.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(e.line, "malformed number for " + key + ": '" + e.value + "'");
  return v;
}

inline long long to_integer(const std::string& key, const RawEntry& e) {
  long long v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(e.line, "malformed integer for " + key + ": '" + e.value + "'");
  return v;
}

}  // namespace detail

/// Keys in emit order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "alpha",       "p",           "sign",          "dt",           "t_end",        "n_points",
      "r_max",       "lambda_ref",  "monitor_every", "virial_R",     "blowup_norm_threshold",
      "dt_min",      "stiffness",   "nonlinear_coeff", "action_convention", "omega", "dtau",
      "tol_resid",   "tol_nehari",  "max_iters",     "initial",      "amplitude",    "sigma",
      "mass",        "charge",      "projection_shift", "scale_c",  "scale_c_max",  "snapshot",
      "virial_R_list", "seed",      "family_size",   "kato_pairs",   "kato_eps",     "kato_M",
      "hardy_a",     "hardy_b",     "sobolev_rho",   "ineq_n_points", "ineq_r_max"};
  return keys;
}

inline std::set<std::string> mandatory_keys(Command c) {
  switch (c) {
    case Command::evolve: return {"alpha", "p", "sign", "dt", "t_end"};
    case Command::groundstate: return {"alpha", "p", "omega"};
    case Command::blowup_demo: return {"alpha", "p", "omega"};
    case Command::virial_scan: return {"alpha", "p", "dt", "t_end"};
    case Command::inequalities: return {};
    case Command::spectrum: return {"alpha"};
  }
  return {};
}

/// Splits text into key -> (value, line); later lines override earlier ones.
inline std::map<std::string, detail::RawEntry> read_entries(std::string_view text) {
  std::map<std::string, detail::RawEntry> out;
  const std::set<std::string> known(config_keys().begin(), config_keys().end());
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = detail::trim(line);
    if (body.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value', got '" + body + "'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (!known.count(key)) throw ConfigError(line_no, "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(line_no, "empty value for " + key);
    out[key] = {value, line_no};
    if (end == text.size()) break;
  }
  return out;
}

/// Parses, fills defaults, and validates for `command` (no mandatory-key check when absent).
/// Overrides are `key=value` strings applied after the file.
inline JobConfig parse_config(std::string_view text, std::optional<Command> command = std::nullopt,
                              const std::vector<std::string>& overrides = {}) {
  auto raw = read_entries(text);
  for (const auto& ov : overrides) {
    auto extra = read_entries(ov);
    if (extra.empty()) throw ConfigError(0, "override '" + ov + "' is not key=value");
    for (auto& [k, e] : extra) raw[k] = {e.value, 0};
  }

  if (command)
    for (const auto& k : mandatory_keys(*command))
      if (!raw.count(k)) throw ConfigError(0, "missing mandatory key '" + k + "' for " + to_string(*command));

  JobConfig c;
  auto line_of = [&](const std::string& k) { return raw.count(k) ? raw[k].line : 0; };
  auto get_d = [&](const std::string& k, double& dst) {
    if (raw.count(k)) dst = detail::to_double(k, raw[k]);
  };
  auto get_size = [&](const std::string& k, std::size_t& dst, long long min) {
    if (!raw.count(k)) return;
    const long long v = detail::to_integer(k, raw[k]);
    if (v < min) throw ConfigError(raw[k].line, k + " must be at least " + std::to_string(min));
    dst = std::size_t(v);
  };
  auto get_int = [&](const std::string& k, int& dst, long long min) {
    std::size_t v = std::size_t(dst);
    get_size(k, v, min);
    dst = int(v);
  };
  auto get_choice = [&](const std::string& k, std::initializer_list<const char*> allowed) -> std::optional<std::string> {
    if (!raw.count(k)) return std::nullopt;
    for (const char* a : allowed)
      if (raw[k].value == a) return raw[k].value;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
    throw ConfigError(raw[k].line, k + " must be one of " + list + ", got '" + raw[k].value + "'");
  };
  auto require = [&](bool ok, const std::string& k, const std::string& what) {
    if (!ok) throw ConfigError(line_of(k), what);
  };

  SimConfig& s = c.sim;
  get_d("alpha", s.alpha);
  get_d("p", s.p);
  require(s.p > 1.0, "p", "p must satisfy p > 1 (got " + format_double(s.p) + ")");
  if (auto v = get_choice("sign", {"focusing", "defocusing"})) s.sign = *v == "focusing" ? Sign::focusing : Sign::defocusing;
  get_d("dt", s.dt);
  require(s.dt > 0.0, "dt", "dt must be positive");
  get_d("t_end", s.t_end);
  require(s.t_end > 0.0, "t_end", "t_end must be positive");
  get_size("n_points", s.n_points, 8);
  get_d("r_max", s.r_max);
  require(s.r_max > 0.0, "r_max", "r_max must be positive");

  const double e = std::abs(eigenvalue_alpha(s.alpha));
  s.lambda_ref = default_lambda_ref(s.alpha);
  get_d("lambda_ref", s.lambda_ref);
  require(s.lambda_ref > e, "lambda_ref", "lambda_ref must exceed |e_alpha| = " + format_double(e));
  get_int("monitor_every", s.monitor_every, 1);
  s.virial_R = s.r_max / 4.0;
  get_d("virial_R", s.virial_R);
  require(s.virial_R > 0.0, "virial_R", "virial_R must be positive");
  get_d("blowup_norm_threshold", s.blowup_norm_threshold);
  require(s.blowup_norm_threshold >= 0.0, "blowup_norm_threshold", "blowup_norm_threshold must be >= 0 (0 selects 1e3 x initial)");
  s.dt_min = s.dt / default_dt_min_divisor;
  get_d("dt_min", s.dt_min);
  require(s.dt_min > 0.0 && s.dt_min <= s.dt, "dt_min", "dt_min must lie in (0, dt]");
  get_d("stiffness", s.stiffness);
  require(s.stiffness > 0.0, "stiffness", "stiffness must be positive");
  get_d("nonlinear_coeff", s.nonlinear_coeff);
  if (auto v = get_choice("action_convention", {"half_omega", "full_omega"}))
    s.action_convention = *v == "half_omega" ? ActionConvention::half_omega : ActionConvention::full_omega;

  get_d("omega", c.omega);
  const bool needs_omega = command && (*command == Command::groundstate || *command == Command::blowup_demo);
  if (needs_omega || raw.count("omega"))
    require(c.omega > e, "omega", "omega must exceed |e_alpha| = " + format_double(e));
  c.ground.lambda_ref = s.lambda_ref;
  get_d("dtau", c.ground.dtau);
  require(c.ground.dtau > 0.0, "dtau", "dtau must be positive");
  get_d("tol_resid", c.ground.tol_resid);
  require(c.ground.tol_resid > 0.0, "tol_resid", "tol_resid must be positive");
  get_d("tol_nehari", c.ground.tol_nehari);
  require(c.ground.tol_nehari > 0.0, "tol_nehari", "tol_nehari must be positive");
  get_int("max_iters", c.ground.max_iters, 1);

  if (auto v = get_choice("initial", {"gaussian", "scaled_ground_state", "custom_snapshot"}))
    c.initial = *v == "gaussian" ? InitialKind::gaussian
                : *v == "scaled_ground_state" ? InitialKind::scaled_ground_state
                                              : InitialKind::custom_snapshot;
  get_d("amplitude", c.gaussian.amplitude);
  get_d("sigma", c.gaussian.sigma);
  require(c.gaussian.sigma > 0.0, "sigma", "sigma must be positive");
  get_d("mass", c.gaussian.target_mass);
  require(c.gaussian.target_mass >= 0.0, "mass", "mass must be >= 0 (0 keeps the amplitude)");
  if (auto v = get_choice("charge", {"project", "zero"})) c.gaussian.charge = *v == "project" ? ChargeMode::project : ChargeMode::zero;
  c.gaussian.projection_shift = s.lambda_ref;
  get_d("projection_shift", c.gaussian.projection_shift);
  require(c.gaussian.projection_shift > 0.0, "projection_shift", "projection_shift must be positive");
  get_d("scale_c", c.scale_c);
  require(c.scale_c == 0.0 || c.scale_c > 1.0, "scale_c", "scale_c must exceed 1 (0 searches)");
  get_d("scale_c_max", c.scale_c_max);
  require(c.scale_c_max > 1.0, "scale_c_max", "scale_c_max must exceed 1");
  if (raw.count("snapshot")) c.snapshot = raw["snapshot"].value;
  require(c.initial != InitialKind::custom_snapshot || !c.snapshot.empty(), "initial",
          "initial = custom_snapshot needs a snapshot path");
  if (c.initial == InitialKind::scaled_ground_state)
    require(c.omega > e, "omega", "omega must exceed |e_alpha| = " + format_double(e));

  if (raw.count("virial_R_list")) {
    c.virial_R_list.clear();
    std::stringstream ss(raw["virial_R_list"].value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const double R = detail::to_double("virial_R_list", {detail::trim(item), raw["virial_R_list"].line});
      require(R > 0.0, "virial_R_list", "virial_R_list entries must be positive");
      c.virial_R_list.push_back(R);
    }
  }

  if (raw.count("seed")) {
    const long long v = detail::to_integer("seed", raw["seed"]);
    require(v >= 0, "seed", "seed must be non-negative");
    c.seed = std::uint64_t(v);
  }
  get_size("family_size", c.family_size, 1);
  get_size("kato_pairs", c.kato_pairs, 1);
  get_d("kato_eps", c.kato_eps);
  require(c.kato_eps > 0.0 && c.kato_eps < 1.0, "kato_eps", "kato_eps must lie in (0, 1)");
  get_d("kato_M", c.kato_M);
  require(c.kato_M > 0.0, "kato_M", "kato_M must be positive");
  get_d("hardy_a", c.hardy_a);
  get_d("hardy_b", c.hardy_b);
  require(c.hardy_a > 1.0, "hardy_a", "hardy_a must exceed 1");
  require(1.0 + c.hardy_a - c.hardy_b < 0.0, "hardy_b", "log-Hardy needs 1 + a - b < 0");
  get_d("sobolev_rho", c.sobolev_rho);
  require(c.sobolev_rho >= 2.0, "sobolev_rho", "sobolev_rho must be >= 2");
  get_size("ineq_n_points", c.ineq_n_points, 8);
  get_d("ineq_r_max", c.ineq_r_max);
  require(c.ineq_r_max > 0.0, "ineq_r_max", "ineq_r_max must be positive");

  if (command && (*command == Command::evolve || *command == Command::virial_scan || *command == Command::blowup_demo)) {
    try {
      validate(s);
    } catch (const Error& err) {
      throw ConfigError(0, err.what());
    }
  }
  if (command && *command == Command::virial_scan)
    require(s.sign == Sign::focusing, "sign", "virial-scan covers the focusing equation only");
  return c;
}

/// Resolved record, one key per line in a fixed order.
inline std::string emit(const JobConfig& c) {
  const SimConfig& s = c.sim;
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto d = [&](const std::string& k, double v) { kv(k, format_double(v)); };
  d("alpha", s.alpha);
  d("p", s.p);
  kv("sign", to_string(s.sign));
  d("dt", s.dt);
  d("t_end", s.t_end);
  kv("n_points", std::to_string(s.n_points));
  d("r_max", s.r_max);
  d("lambda_ref", s.lambda_ref);
  kv("monitor_every", std::to_string(s.monitor_every));
  d("virial_R", s.virial_R);
  d("blowup_norm_threshold", s.blowup_norm_threshold);
  d("dt_min", s.dt_min);
  d("stiffness", s.stiffness);
  d("nonlinear_coeff", s.nonlinear_coeff);
  kv("action_convention", s.action_convention == ActionConvention::half_omega ? "half_omega" : "full_omega");
  d("omega", c.omega);
  d("dtau", c.ground.dtau);
  d("tol_resid", c.ground.tol_resid);
  d("tol_nehari", c.ground.tol_nehari);
  kv("max_iters", std::to_string(c.ground.max_iters));
  kv("initial", to_string(c.initial));
  d("amplitude", c.gaussian.amplitude);
  d("sigma", c.gaussian.sigma);
  d("mass", c.gaussian.target_mass);
  kv("charge", c.gaussian.charge == ChargeMode::project ? "project" : "zero");
  d("projection_shift", c.gaussian.projection_shift);
  d("scale_c", c.scale_c);
  d("scale_c_max", c.scale_c_max);
  if (!c.snapshot.empty()) kv("snapshot", c.snapshot);
  std::string list;
  for (double R : c.virial_R_list) list += (list.empty() ? "" : ",") + format_double(R);
  kv("virial_R_list", list);
  kv("seed", std::to_string(c.seed));
  kv("family_size", std::to_string(c.family_size));
  kv("kato_pairs", std::to_string(c.kato_pairs));
  d("kato_eps", c.kato_eps);
  d("kato_M", c.kato_M);
  d("hardy_a", c.hardy_a);
  d("hardy_b", c.hardy_b);
  d("sobolev_rho", c.sobolev_rho);
  kv("ineq_n_points", std::to_string(c.ineq_n_points));
  d("ineq_r_max", c.ineq_r_max);
  return out;
}

inline bool JobConfig::operator==(const JobConfig& o) const { return emit(*this) == emit(o); }

}  // namespace nlsdelta
