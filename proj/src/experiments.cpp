#include "blowup/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "blowup/io.hpp"
#include "blowup/similarity.hpp"
#include "blowup/spectral.hpp"
#include "blowup/trap.hpp"

namespace blowup {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ojson params_json(const ProblemParams& p) {
  ojson d;
  d["rtol"] = p.disc.rtol;
  d["atol"] = p.disc.atol;
  d["safety"] = p.disc.safety;
  d["ode_cap"] = p.disc.ode_cap;
  d["blowup_threshold"] = p.disc.blowup_threshold;
  d["resolution_cells"] = p.disc.resolution_cells;
  d["frame_ds"] = p.disc.frame_ds;
  d["regrid_levels"] = p.disc.regrid_levels;
  ojson j;
  j["p"] = p.p;
  j["K0"] = p.K0;
  j["eps0"] = p.eps0;
  j["A"] = p.A;
  j["eta0"] = p.eta0;
  j["s0"] = p.s0;
  j["grid_n"] = p.grid_n;
  j["y_halfwidth_mult"] = p.y_halfwidth_mult;
  j["discretization"] = d;
  return j;
}

std::string stem(Experiment e) {
  switch (e) {
    case Experiment::SpectralChecks: return "spectral_checks";
    case Experiment::KernelChecks: return "kernel_checks";
    case Experiment::Simulate: return "simulate";
    case Experiment::Shoot: return "shoot";
    case Experiment::Profile: return "profile";
    case Experiment::FinalProfile: return "final_profile";
    case Experiment::Flatness: return "flatness";
    case Experiment::OuterBound: return "outer_bound";
    case Experiment::Perturb: return "perturb";
  }
  return "unknown";
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name, Report& rep) {
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream os(cfg.output_dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (cfg.output_dir / name).string());
  rep.files.push_back(name);
  return os;
}

void write_report(const RunConfig& cfg, Report& rep, ojson data) {
  const std::string name = stem(cfg.experiment) + ".json";
  auto os = open_out(cfg, name, rep);
  ojson j;
  j["experiment"] = rep.experiment;
  j["config"] = cfg.to_json();
  const auto r = rep.to_json();
  j["passed"] = r["passed"];
  j["checks"] = r["checks"];
  j["files"] = rep.files;
  j["data"] = std::move(data);
  os << j.dump(2) << '\n';
}

Report with_runtime(Report rep, std::chrono::steady_clock::time_point t0, double limit) {
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.add("runtime [s]", sec, limit, sec <= limit);
  return rep;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Trapezoid rule on [-30, 30] with spacing 1e-3.
template <class F>
double integrate_line(F&& f) {
  const int n = 60000;
  const double h = 60.0 / n;
  double sum = 0.5 * (f(-30.0) + f(30.0));
  for (int i = 1; i < n; ++i) sum += f(-30.0 + h * i);
  return sum * h;
}

std::vector<double> log_slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

// Solves tau |log tau| = c for tau in (0, 1/e).
double solve_tau_log(double c) {
  if (!(c > 0.0) || c >= std::exp(-1.0)) return std::numeric_limits<double>::quiet_NaN();
  double lo = 1e-300, hi = std::exp(-1.0);
  for (int i = 0; i < 300; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (mid * std::abs(std::log(mid)) < c) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

const TimeState& state_at(const Trajectory& tr, double t) {
  auto it = std::min_element(tr.states.begin(), tr.states.end(),
                             [t](const TimeState& a, const TimeState& b) { return std::abs(a.t - t) < std::abs(b.t - t); });
  return *it;
}

bool reached(const Trajectory& tr, double t) { return tr.last().t >= t; }

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::SpectralChecks: return "spectral-checks";
    case Experiment::KernelChecks: return "kernel-checks";
    case Experiment::Simulate: return "simulate";
    case Experiment::Shoot: return "shoot";
    case Experiment::Profile: return "profile";
    case Experiment::FinalProfile: return "final-profile";
    case Experiment::Flatness: return "flatness";
    case Experiment::OuterBound: return "outer-bound";
    case Experiment::Perturb: return "perturb";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  static const std::map<std::string, Experiment> names{
      {"spectral-checks", Experiment::SpectralChecks}, {"check-spectral", Experiment::SpectralChecks},
      {"kernel-checks", Experiment::KernelChecks},     {"check-kernel", Experiment::KernelChecks},
      {"simulate", Experiment::Simulate},              {"shoot", Experiment::Shoot},
      {"profile", Experiment::Profile},                {"final-profile", Experiment::FinalProfile},
      {"flatness", Experiment::Flatness},              {"outer-bound", Experiment::OuterBound},
      {"perturb", Experiment::Perturb}};
  auto it = names.find(name);
  if (it == names.end()) throw ConfigError("unknown experiment '" + name + "'");
  return it->second;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j, {"experiment", "output_dir", "seed", "threads", "params", "shoot", "d_star", "simulate",
                       "perturb", "flatness"},
                   "config");
    if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    if (j.contains("params")) {
      const auto& p = j.at("params");
      reject_unknown(p, {"p", "K0", "eps0", "A", "eta0", "s0", "grid_n", "y_halfwidth_mult", "discretization"},
                     "params");
      read(p, "p", c.params.p);
      read(p, "K0", c.params.K0);
      read(p, "eps0", c.params.eps0);
      read(p, "A", c.params.A);
      read(p, "eta0", c.params.eta0);
      read(p, "s0", c.params.s0);
      read(p, "grid_n", c.params.grid_n);
      read(p, "y_halfwidth_mult", c.params.y_halfwidth_mult);
      if (p.contains("discretization")) {
        const auto& d = p.at("discretization");
        reject_unknown(d, {"rtol", "atol", "safety", "ode_cap", "blowup_threshold", "resolution_cells", "frame_ds",
                           "regrid_levels"},
                       "params.discretization");
        read(d, "rtol", c.params.disc.rtol);
        read(d, "atol", c.params.disc.atol);
        read(d, "safety", c.params.disc.safety);
        read(d, "ode_cap", c.params.disc.ode_cap);
        read(d, "blowup_threshold", c.params.disc.blowup_threshold);
        read(d, "resolution_cells", c.params.disc.resolution_cells);
        read(d, "frame_ds", c.params.disc.frame_ds);
        read(d, "regrid_levels", c.params.disc.regrid_levels);
      }
    }
    if (j.contains("shoot")) {
      const auto& s = j.at("shoot");
      reject_unknown(s, {"s_max_offset", "tol", "max_levels", "polish_offset"}, "shoot");
      read(s, "s_max_offset", c.s_max_offset);
      read(s, "tol", c.search_tol);
      read(s, "max_levels", c.max_levels);
      read(s, "polish_offset", c.polish_offset);
    }
    if (j.contains("d_star")) {
      const auto v = j.at("d_star").get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("d_star must have two entries");
      c.d_star = Vec2{v[0], v[1]};
    }
    if (j.contains("simulate")) {
      const auto& s = j.at("simulate");
      reject_unknown(s, {"initial", "constant_value"}, "simulate");
      read(s, "initial", c.initial);
      read(s, "constant_value", c.constant_value);
      if (c.initial != "shooting" && c.initial != "constant")
        throw ConfigError("simulate.initial must be 'shooting' or 'constant'");
    }
    if (j.contains("perturb")) {
      const auto& s = j.at("perturb");
      reject_unknown(s, {"eps"}, "perturb");
      read(s, "eps", c.perturb_eps);
    }
    if (j.contains("flatness")) {
      const auto& s = j.at("flatness");
      reject_unknown(s, {"theta"}, "flatness");
      read(s, "theta", c.flatness_theta);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!(c.s_max_offset > 0.0)) throw ConfigError("shoot.s_max_offset must be positive");
  if (!(c.search_tol > 0.0)) throw ConfigError("shoot.tol must be positive");
  if (c.max_levels < 1) throw ConfigError("shoot.max_levels must be at least 1");
  if (c.polish_offset < 0.0) throw ConfigError("shoot.polish_offset must be non-negative");
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  return from_json(j);
}

ojson RunConfig::to_json() const {
  ojson j;
  j["experiment"] = blowup::to_string(experiment);
  j["output_dir"] = output_dir.generic_string();
  j["seed"] = seed;
  j["threads"] = threads;
  j["params"] = params_json(params);
  ojson s;
  s["s_max_offset"] = s_max_offset;
  s["tol"] = search_tol;
  s["max_levels"] = max_levels;
  s["polish_offset"] = polish_offset;
  j["shoot"] = s;
  if (d_star) j["d_star"] = {(*d_star)[0], (*d_star)[1]};
  ojson sim;
  sim["initial"] = initial;
  sim["constant_value"] = constant_value;
  j["simulate"] = sim;
  j["perturb"] = ojson{{"eps", perturb_eps}};
  j["flatness"] = ojson{{"theta", flatness_theta}};
  return j;
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void Report::add(std::string name, double value, double threshold, bool ok, std::string detail) {
  checks.push_back({std::move(name), value, threshold, ok, std::move(detail)});
}

ojson Report::to_json() const {
  ojson j;
  j["experiment"] = experiment;
  j["passed"] = passed();
  ojson arr = ojson::array();
  for (const auto& c : checks) {
    if (c.name == "runtime [s]") continue;
    ojson o;
    o["name"] = c.name;
    o["value"] = c.value;
    o["threshold"] = c.threshold;
    o["passed"] = c.passed;
    if (!c.detail.empty()) o["detail"] = c.detail;
    arr.push_back(o);
  }
  j["checks"] = arr;
  return j;
}

Report spectral_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.experiment = "spectral";
  double ortho = 0.0;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) {
      const double ip = hermite_gram(i, j);
      ortho = std::max(ortho, std::abs(ip - (i == j ? HermiteBasis::norm2(i) : 0.0)));
    }
  rep.add("hermite orthogonality, i,j <= 8", ortho, 1e-9, ortho <= 1e-9);
  double eig = 0.0;
  for (int m = 0; m <= 6; ++m) {
    const auto h = hermite_h(m);
    for (int k = 0; k <= 2000; ++k) {
      const double y = -10.0 + 0.01 * k;
      eig = std::max(eig, std::abs(apply_L(h, y) - (1.0 - 0.5 * m) * h(y)));
    }
  }
  rep.add("eigenfunction residual, m <= 6", eig, 1e-8, eig <= 1e-8);
  return with_runtime(std::move(rep), t0, 1.0);
}

Report mehler_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.experiment = "mehler";
  const double ys[] = {-2.7, -0.6, 0.9, 3.1};
  double mass = 0.0, comp = 0.0, eig = 0.0;
  for (double r : {0.1, 1.0}) {
    for (double y : ys) {
      mass = std::max(mass, rel(integrate_line([&](double x) { return mehler_kernel(r, y, x); }), std::exp(r)));
      for (int m = 0; m <= 4; ++m) {
        const auto h = hermite_h(m);
        const double got = integrate_line([&](double x) { return mehler_kernel(r, y, x) * h(x); });
        eig = std::max(eig, rel(got, std::exp(r * (1.0 - 0.5 * m)) * h(y)));
      }
      for (double x : {-1.0, 0.5, 2.0}) {
        const double got =
            integrate_line([&](double z) { return mehler_kernel(r, y, z) * mehler_kernel(r, z, x); });
        comp = std::max(comp, rel(got, mehler_kernel(2.0 * r, y, x)));
      }
    }
  }
  rep.add("mass identity", mass, 1e-10, mass <= 1e-10);
  rep.add("semigroup composition", comp, 1e-8, comp <= 1e-8);
  rep.add("eigen-action, m <= 4", eig, 1e-8, eig <= 1e-8);
  return with_runtime(std::move(rep), t0, 10.0);
}

Report residual_suite(double p) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.experiment = "residual";
  const std::vector<double> s{25.0, 100.0, 400.0, 1600.0};
  std::vector<double> a, b;
  for (double v : s) {
    a.push_back(residual_R_sup(v, p, RReading::PhiPower, 4.0 * std::sqrt(v)));
    b.push_back(residual_R_sup(v, p, RReading::PhiPowerMinusOne, 4.0 * std::sqrt(v)));
  }
  const double sa = log_slope_fit(s, a)[0];
  const double sb = log_slope_fit(s, b)[0];
  rep.add("slope of sup|R| (phi^p)", sa, -1.0, sa >= -1.3 && sa <= -0.7, "window [-1.3, -0.7]");
  rep.add("slope of sup|R| (phi^(p-1))", sb, 0.0, sb >= -0.1 && sb <= 0.1, "window [-0.1, 0.1]");
  return with_runtime(std::move(rep), t0, 5.0);
}

Report decomposition_suite(const ProblemParams& params, std::uint64_t seed, int fields) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.experiment = "decomposition";
  std::mt19937_64 rng(seed);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double s = params.s0;
  const double L = frame_halfwidth(s, params);
  std::vector<double> y(2001);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = -L + 2.0 * L * static_cast<double>(i) / (y.size() - 1);
  double worst = 0.0;
  for (int f = 0; f < fields; ++f) {
    double amp[6], freq[6], phase[6];
    for (int k = 0; k < 6; ++k) {
      amp[k] = 2.0 * uni() - 1.0;
      freq[k] = 2.0 * uni();
      phase[k] = 2.0 * std::numbers::pi * uni();
    }
    const double width = 2.0 + 10.0 * uni();
    std::vector<double> q(y.size());
    double qmax = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double v = 0.0;
      for (int k = 0; k < 6; ++k) v += amp[k] * std::cos(freq[k] * y[i] + phase[k]);
      q[i] = v * std::exp(-y[i] * y[i] / (width * width));
      qmax = std::max(qmax, std::abs(q[i]));
    }
    const auto dec = decompose(q, y, s, params);
    const auto back = dec.reconstruct();
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(back[i] - q[i]));
    worst = std::max(worst, err / qmax);
  }
  rep.add("reconstruct(decompose(q)) relative error", worst, 1e-12, worst <= 1e-12);
  return with_runtime(std::move(rep), t0, 5.0);
}

Report ode_suite(double c, double p) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.experiment = "ode";
  Discretization disc;
  IntegrateOptions io;
  io.sup_threshold = disc.blowup_threshold;
  auto tr = integrate_until(TimeState{0.0, PeriodicField(64, c), 0.0}, p, StepControl::from(disc), io);
  const auto est = estimate_T(tr.history, p);
  const double exact = 1.0 / ((p - 1.0) * std::pow(c, p - 1.0));
  const auto& v = tr.last().field.values;
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  rep.add("T_est - 1/((p-1) c^(p-1))", std::abs(est.T_est - exact), 1e-4, std::abs(est.T_est - exact) <= 1e-4);
  rep.add("spatial spread / sup", (*mx - *mn) / *mx, 1e-12, (*mx - *mn) <= 1e-12 * *mx);
  return with_runtime(std::move(rep), t0, 5.0);
}

Report kernel_suite(const ProblemParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.experiment = "kernel";
  const double sigma = params.s0;
  double worst_m[2] = {0, 0}, worst_d = 0.0, drift = 0.0;
  for (double r : {1.0, 2.0, 4.0}) {
    const double s = sigma + r;
    const auto coarse = KernelGrid::for_regime(s, params, 0.02);
    const auto fine = KernelGrid::for_regime(s, params, 0.01);
    int idx = 0;
    for (int m : {0, 3}) {
      const double a = kernel_moment_check(m, s, sigma, coarse, params);
      const double b = kernel_moment_check(m, s, sigma, fine, params);
      worst_m[idx] = std::max(worst_m[idx], b);
      drift = std::max(drift, std::abs(a / b - 1.0));
      ++idx;
    }
    auto g_on = [](const KernelGrid& grid) {
      std::vector<double> g;
      for (double x : grid.nodes()) g.push_back(std::exp(-x * x / 8.0) * (1.0 + 0.5 * x));
      return g;
    };
    const double a = kernel_derivative_check(g_on(coarse), s, sigma, coarse, params);
    const double b = kernel_derivative_check(g_on(fine), s, sigma, fine, params);
    worst_d = std::max(worst_d, b);
    drift = std::max(drift, std::abs(a / b - 1.0));
  }
  rep.add("moment ratio m=0", worst_m[0], kKernelMomentConstant0, worst_m[0] <= kKernelMomentConstant0);
  rep.add("moment ratio m=3", worst_m[1], kKernelMomentConstant3, worst_m[1] <= kKernelMomentConstant3);
  rep.add("derivative ratio", worst_d, kKernelDerivativeConstant, worst_d <= kKernelDerivativeConstant);
  rep.add("relative change under grid doubling", drift, 0.05, drift <= 0.05);
  return with_runtime(std::move(rep), t0, 120.0);
}

DstarRun simulate_dstar(Vec2 d, const ProblemParams& params, std::vector<double> extra_times) {
  DstarRun run;
  run.d = d;
  run.T = params.T();
  IntegrateOptions io;
  std::vector<double> times{0.0};
  for (int k = 1;; ++k) {
    const double s = params.s0 + k * params.disc.frame_ds;
    if (s > params.s0 + 40.0) break;
    times.push_back(run.T - std::exp(-s));
  }
  for (double t : extra_times)
    if (t >= 0.0 && t < run.T) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  io.checkpoints = times;
  io.sup_threshold = params.disc.blowup_threshold;
  io.resolution_cells = params.disc.resolution_cells;
  io.blowup_time = run.T;
  const auto control = StepControl::from(params.disc);
  run.trajectory = integrate_until(TimeState{0.0, build_initial_data(d[0], d[1], params), 0.0}, params.p, control, io);
  for (int level = 0; level < params.disc.regrid_levels && run.trajectory.reason == StopReason::Resolution; ++level) {
    const auto& last = run.trajectory.last();
    const std::size_t n = 2 * last.field.n();
    TimeState fine{last.t, PeriodicField::sample(n, [&](double th) { return last.field.interpolate(th); }), 0.0};
    io.checkpoints.clear();
    for (double t : times)
      if (t > last.t) io.checkpoints.push_back(t);
    auto more = integrate_until(std::move(fine), params.p, control, io);
    auto& tr = run.trajectory;
    tr.states.insert(tr.states.end(), std::make_move_iterator(more.states.begin()),
                     std::make_move_iterator(more.states.end()));
    tr.history.insert(tr.history.end(), more.history.begin() + 1, more.history.end());
    tr.steps += more.steps;
    tr.reason = more.reason;
  }
  for (const auto& st : run.trajectory.states) run.s_of_state.push_back(-std::log(run.T - st.t));
  return run;
}

double profile_error(const PeriodicField& u, double t, double T, double R, const ProblemParams& params) {
  const double tau = T - t;
  if (!(tau > 0.0)) throw std::invalid_argument("profile_error needs t < T");
  const double s = -std::log(tau);
  const double scale = std::pow(tau, 1.0 / (params.p - 1.0));
  const double rt = std::sqrt(tau), rs = std::sqrt(s);
  double e = 0.0;
  for (std::size_t j = 0; j < u.n(); ++j) {
    const double y = u.theta(j) / rt;
    if (std::abs(y) > R * rs) continue;
    e = std::max(e, std::abs(scale * u.values[j] - profile_f(y / rs, params.p)));
  }
  return e;
}

Vec2 resolve_d_star(const RunConfig& cfg) {
  if (cfg.d_star) return *cfg.d_star;
  const auto path = cfg.output_dir / "shoot.json";
  std::ifstream is(path);
  if (!is) throw ConfigError("no accepted parameters: run `shoot` first or set d_star in the config");
  try {
    const auto j = json::parse(is);
    const auto& d = j.at("data").at("d_star");
    return {d.at(0).get<double>(), d.at(1).get<double>()};
  } catch (const json::exception& e) {
    throw ConfigError("cannot read d_star from " + path.string() + ": " + e.what());
  }
}

Report run_spectral_checks(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::SpectralChecks);
  ojson data;
  for (auto sub : {spectral_suite(), mehler_suite(), residual_suite(cfg.params.p),
                   decomposition_suite(cfg.params, cfg.seed)}) {
    for (auto& c : sub.checks) {
      if (c.name == "runtime [s]") continue;
      c.name = sub.experiment + ": " + c.name;
      rep.checks.push_back(c);
    }
  }
  write_report(cfg, rep, data);
  return rep;
}

Report run_kernel_checks(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::KernelChecks);
  auto sub = kernel_suite(cfg.params);
  for (auto& c : sub.checks)
    if (c.name != "runtime [s]") rep.checks.push_back(c);
  write_report(cfg, rep, ojson::object());
  return rep;
}

Report run_simulate(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::Simulate);
  const auto& P = cfg.params;
  Trajectory tr;
  double T_ref = 0.0;
  if (cfg.initial == "constant") {
    IntegrateOptions io;
    io.sup_threshold = P.disc.blowup_threshold;
    tr = integrate_until(TimeState{0.0, PeriodicField(static_cast<std::size_t>(P.grid_n), cfg.constant_value), 0.0},
                         P.p, StepControl::from(P.disc), io);
    T_ref = 1.0 / ((P.p - 1.0) * std::pow(std::abs(cfg.constant_value), P.p - 1.0));
  } else {
    tr = simulate_dstar(resolve_d_star(cfg), P).trajectory;
    T_ref = P.T();
  }
  {
    auto os = open_out(cfg, "history.csv", rep);
    write_history_csv(os, tr.history);
  }
  {
    auto os = open_out(cfg, "final_field.bin", rep);
    write_field_binary(os, tr.last().field, tr.last().t);
  }
  const auto est = estimate_T(tr.history, P.p);
  ojson data;
  data["stop_reason"] = to_string(tr.reason);
  data["steps"] = tr.steps;
  data["t_end"] = tr.last().t;
  data["sup_end"] = tr.last().field.sup_norm();
  data["T_reference"] = T_ref;
  data["T_est"] = est.T_est;
  data["theta_blowup"] = est.theta_blowup;
  data["low_confidence"] = est.low_confidence;
  if (cfg.initial == "constant")
    rep.add("|T_est - T_ode|", std::abs(est.T_est - T_ref), 1e-4, std::abs(est.T_est - T_ref) <= 1e-4);
  else
    rep.add("|T_est - T| / T", rel(est.T_est, T_ref), 1e-2, rel(est.T_est, T_ref) <= 1e-2);
  write_report(cfg, rep, data);
  return rep;
}

Report run_shoot(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::Shoot);
  const auto& P = cfg.params;
  const double B0 = P.A / (P.s0 * P.s0);
  const auto rect = init_rectangle(P);

  double affine_dev = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const Vec2 d = rect.point(-1.0 + 0.5 * i, -1.0 + 0.5 * j);
      const auto m = initial_modes(d[0], d[1], P);
      for (int k = 0; k < 2; ++k) {
        const double fit = rect.M[k][0] * d[0] + rect.M[k][1] * d[1] + rect.offset[k];
        affine_dev = std::max(affine_dev, std::abs(m[k] - fit) / B0);
      }
    }
  rep.add("affine deviation of (q0,q1)(s0) on a 5x5 grid", affine_dev, 1e-10, affine_dev <= 1e-10);

  const int deg64 = degree_on_boundary(rect, P, 64);
  const int deg128 = degree_on_boundary(rect, P, 128);
  rep.add("degree on the boundary, 64 samples", deg64, 1, deg64 == 1);
  rep.add("degree on the boundary, 128 samples", deg128, 1, deg128 == 1);
  {
    auto os = open_out(cfg, "winding.csv", rep);
    CsvWriter w(os);
    w.header({"k [1]", "d0 [1]", "d1 [1]", "image_q0 [A/s0^2]", "image_q1 [A/s0^2]"});
    std::vector<Vec2> loop;
    for (int k = 0; k < 128; ++k) {
      const double u = 8.0 * k / 128.0;
      const int side = static_cast<int>(u / 2.0);
      const double f = u - 2.0 * side - 1.0;
      const Vec2 ab = side == 0 ? Vec2{f, -1.0} : side == 1 ? Vec2{1.0, f} : side == 2 ? Vec2{-f, 1.0} : Vec2{-1.0, -f};
      const Vec2 d = rect.point(ab[0], ab[1]);
      const auto m = initial_modes(d[0], d[1], P);
      w.row({static_cast<long long>(k), d[0], d[1], m[0] / B0, m[1] / B0});
    }
  }

  SearchOptions so;
  so.s_max = P.s0 + cfg.s_max_offset;
  so.tol = cfg.search_tol;
  so.max_levels = cfg.max_levels;
  so.threads = cfg.threads;
  const auto res = search(rect, P, so);

  RunOptions ro;
  ro.s_max = so.s_max;
  const auto search_run = run_trajectory(res.d_star[0], res.d_star[1], P, ro);
  const double s_search = search_run.exit.exited ? search_run.exit.s_star : search_run.records.back().s;
  rep.add("search found a trapped sample", res.trapped ? 1.0 : 0.0, 1.0, res.trapped && !res.degraded);
  rep.add("search d* trapped through s_max", s_search, so.s_max,
          !search_run.exit.exited && s_search >= so.s_max - 1e-9);

  Vec2 accepted = res.d_star;
  std::optional<PolishResult> pol;
  double s_final = so.s_max;
  if (cfg.polish_offset > cfg.s_max_offset) {
    s_final = P.s0 + cfg.polish_offset;
    pol = polish(res.d_star, rect, P, s_final, 12, cfg.threads);
    accepted = pol->d;
    rep.add("polished d* trapped through s0 + polish_offset", pol->s_trapped, s_final, pol->trapped);
  }
  ro.s_max = s_final;
  const auto run = pol ? run_trajectory(accepted[0], accepted[1], P, ro) : search_run;
  double min_margin = std::numeric_limits<double>::infinity();
  {
    auto os = open_out(cfg, "modes.csv", rep);
    CsvWriter w(os);
    w.header({"s [1]", "q0 [1]", "q1 [1]", "q2 [1]", "q_minus_weighted [1]", "q_e_sup [1]", "outer_sup [u]",
              "bound_q01 [1]", "bound_q2 [1]", "bound_q_e [1]", "min_relative_margin [1]"});
    for (const auto& r : run.records) {
      const auto b = trap_bounds(r.s, P);
      const auto st = evaluate(r, P);
      const double rm = std::min({st.margins[0] / b.q01, st.margins[1] / b.q01, st.margins[2] / b.q2,
                                  st.margins[3] / b.q_minus, st.margins[4] / b.q_e, st.outer_margin / b.outer});
      min_margin = std::min(min_margin, rm);
      w.row({r.s, r.q0, r.q1, r.q2, r.q_minus_weighted, r.q_e_sup, r.outer_sup, b.q01, b.q2, b.q_e, rm});
    }
  }
  const double s_reached = run.exit.exited ? run.exit.s_star : run.records.back().s;
  rep.add("smallest relative trap margin over the checkpoints", min_margin, 0.0, min_margin > 0.0);

  int exits = 0, transverse = 0;
  ojson boundary = ojson::array();
  for (const auto& smp : res.boundary_exits) {
    ojson o;
    o["d"] = {smp.d[0], smp.d[1]};
    o["s_star"] = smp.s_star;
    o["violated"] = smp.trapped ? std::string("still_trapped") : to_string(smp.violated);
    o["omega"] = smp.omega;
    o["phi"] = {smp.phi[0], smp.phi[1]};
    if (smp.transverse) {
      ++exits;
      if (smp.transverse->satisfied) ++transverse;
      o["dq_ds"] = smp.transverse->derivative;
      o["transverse"] = smp.transverse->satisfied;
    }
    boundary.push_back(o);
  }
  const double frac = exits ? static_cast<double>(transverse) / exits : 0.0;
  rep.add("transverse fraction of boundary exits on q0/q1", frac, 0.9, exits > 0 && frac >= 0.9);

  ojson data;
  ojson rj;
  rj["center"] = {rect.center[0], rect.center[1]};
  rj["e0"] = {rect.e0[0], rect.e0[1]};
  rj["e1"] = {rect.e1[0], rect.e1[1]};
  rj["M"] = {{rect.M[0][0], rect.M[0][1]}, {rect.M[1][0], rect.M[1][1]}};
  rj["offset"] = {rect.offset[0], rect.offset[1]};
  data["rect"] = rj;
  data["degree_64"] = deg64;
  data["degree_128"] = deg128;
  data["s_max"] = so.s_max;
  ojson levels = ojson::array();
  for (const auto& l : res.levels) {
    ojson o;
    o["center"] = {l.rect.center[0], l.rect.center[1]};
    o["e0"] = {l.rect.e0[0], l.rect.e0[1]};
    o["e1"] = {l.rect.e1[0], l.rect.e1[1]};
    o["winding"] = l.winding;
    o["child_winding"] = l.child_winding;
    o["chosen"] = l.chosen;
    o["best_score"] = l.best_score;
    o["best_d"] = {l.best_d[0], l.best_d[1]};
    o["evaluations"] = l.evaluations;
    levels.push_back(o);
  }
  data["levels"] = levels;
  data["search_d_star"] = {res.d_star[0], res.d_star[1]};
  data["search_s_star"] = s_search;
  if (pol) {
    ojson steps = ojson::array();
    for (const auto& st : pol->steps) {
      ojson o;
      o["d"] = {st.d[0], st.d[1]};
      o["s_trapped"] = st.s_trapped;
      o["s_eval"] = st.s_eval;
      o["residual"] = st.residual;
      steps.push_back(o);
    }
    ojson pj;
    pj["horizon"] = s_final;
    pj["steps"] = steps;
    pj["final_residual"] = pol->residual;
    data["polish"] = pj;
  }
  data["d_star"] = {accepted[0], accepted[1]};
  data["s_star"] = s_reached;
  data["trapped"] = res.trapped;
  data["degraded"] = res.degraded;
  data["boundary_samples"] = boundary;
  {
    std::ostringstream ex;
    write_exit_record(ex, accepted[0], accepted[1], run.exit);
    data["d_star_exit"] = ojson::parse(ex.str());
  }
  write_report(cfg, rep, data);
  return rep;
}

Report run_profile(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::Profile);
  const auto& P = cfg.params;
  const double T = P.T();
  std::vector<double> s_list, times;
  for (int k = 0; k <= 40; ++k) {
    s_list.push_back(P.s0 + 0.5 * k);
    times.push_back(k == 0 ? 0.0 : T - std::exp(-s_list.back()));
  }
  const auto run = simulate_dstar(resolve_d_star(cfg), P, times);
  std::vector<std::array<double, 4>> rows;
  {
    auto os = open_out(cfg, "profile.csv", rep);
    CsvWriter w(os);
    w.header({"s [1]", "E_R1 [1]", "E_R2 [1]", "E_R4 [1]"});
    for (std::size_t k = 0; k < s_list.size(); ++k) {
      if (!reached(run.trajectory, times[k])) break;
      const auto& st = state_at(run.trajectory, times[k]);
      std::array<double, 4> r{s_list[k], profile_error(st.field, st.t, T, 1.0, P),
                              profile_error(st.field, st.t, T, 2.0, P), profile_error(st.field, st.t, T, 4.0, P)};
      rows.push_back(r);
      w.row({r[0], r[1], r[2], r[3]});
    }
  }
  bool decreasing = true;
  double e1 = std::numeric_limits<double>::quiet_NaN(), e3 = e1;
  double prev = std::numeric_limits<double>::infinity();
  int count = 0;
  for (const auto& r : rows) {
    if (r[0] < P.s0 + 1.0 - 1e-9 || r[0] > P.s0 + 3.0 + 1e-9) continue;
    if (!(r[2] < prev)) decreasing = false;
    prev = r[2];
    ++count;
    if (std::abs(r[0] - (P.s0 + 1.0)) < 1e-9) e1 = r[2];
    if (std::abs(r[0] - (P.s0 + 3.0)) < 1e-9) e3 = r[2];
  }
  rep.add("E(s,2) strictly decreasing on [s0+1, s0+3]", count, 5, decreasing && count == 5);
  const double ratio = e3 / e1;
  rep.add("E(s0+3,2) / E(s0+1,2)", ratio, 0.7, ratio <= 0.7);
  ojson data;
  data["d_star"] = {run.d[0], run.d[1]};
  data["stop_reason"] = to_string(run.trajectory.reason);
  data["s_end"] = run.s_of_state.back();
  write_report(cfg, rep, data);
  return rep;
}

Report run_final_profile(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::FinalProfile);
  const auto& P = cfg.params;
  const auto run = simulate_dstar(resolve_d_star(cfg), P);
  const auto& st = run.trajectory.last();
  const double tau = run.T - st.t;
  const double width = P.K0 * std::sqrt(tau * std::abs(std::log(tau)));
  std::vector<double> thetas;
  for (int k = 0; k <= 20; ++k) thetas.push_back(0.02 * std::pow(10.0, k / 20.0));
  thetas.push_back(0.05);
  std::sort(thetas.begin(), thetas.end());
  double r005 = 0, r02 = 0, worst_band = 0.0, asym = 0.0;
  bool in_band = true;
  {
    auto os = open_out(cfg, "final_profile.csv", rep);
    CsvWriter w(os);
    w.header({"theta [rad]", "u [u]", "u_reflected [u]", "u_star [u]", "ratio [1]", "resolved [bool]"});
    for (double th : thetas) {
      const double u = st.field.interpolate(th);
      const double um = st.field.interpolate(-th);
      const double us = u_star(th, P.p);
      const double ratio = u / us;
      const bool resolved = th >= width;
      w.row({th, u, um, us, ratio, static_cast<long long>(resolved)});
      if (!resolved) continue;
      asym = std::max(asym, std::abs(u - um) / std::abs(u));
      if (th >= 0.05 - 1e-12 && th <= 0.2 + 1e-12) {
        if (ratio < 0.5 || ratio > 2.0) in_band = false;
        worst_band = std::max(worst_band, std::max(ratio, 1.0 / ratio));
      }
      if (std::abs(th - 0.05) < 1e-12) r005 = ratio;
      if (std::abs(th - 0.2) < 1e-12) r02 = ratio;
    }
  }
  rep.add("ratio u/u* in [0.5, 2] on [0.05, 0.2]", worst_band, 2.0, in_band, "value: worst max(r, 1/r)");
  rep.add("|ratio - 1| at 0.05 below that at 0.2", std::abs(r005 - 1.0), std::abs(r02 - 1.0),
          std::abs(r005 - 1.0) < std::abs(r02 - 1.0));
  ojson data;
  data["d_star"] = {run.d[0], run.d[1]};
  data["stop_reason"] = to_string(run.trajectory.reason);
  data["t_end"] = st.t;
  data["s_end"] = run.s_of_state.back();
  data["sup_end"] = st.field.sup_norm();
  data["unresolved_below"] = width;
  data["ratio_0.05"] = r005;
  data["ratio_0.2"] = r02;
  data["max_relative_asymmetry"] = asym;
  write_report(cfg, rep, data);
  return rep;
}

Report run_flatness(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::Flatness);
  const auto& P = cfg.params;
  const double T = P.T();
  const std::vector<double> taus{0.0, 0.25, 0.5, 0.75};
  struct Entry {
    double theta0, tau0, t0;
  };
  std::vector<Entry> entries;
  std::vector<double> extra;
  ojson skipped = ojson::array();
  for (double th : cfg.flatness_theta) {
    const double tau0 = solve_tau_log(th * th / (P.K0 * P.K0));
    if (!(tau0 > 0.0) || tau0 > T) {
      skipped.push_back(th);
      continue;
    }
    entries.push_back({th, tau0, T - tau0});
    for (double tau : taus) extra.push_back(T - tau0 + tau * tau0);
  }
  const auto run = simulate_dstar(resolve_d_star(cfg), P, extra);
  std::vector<double> dev0;
  {
    auto os = open_out(cfg, "flatness.csv", rep);
    CsvWriter w(os);
    w.header({"theta0 [rad]", "t0 [time]", "tau [1]", "deviation [1]", "U_K0 [1]"});
    for (const auto& e : entries) {
      const double xi_max = std::pow(std::abs(std::log(e.tau0)), 0.25);
      const double scale = std::pow(e.tau0, 1.0 / (P.p - 1.0));
      for (double tau : taus) {
        const double t = e.t0 + tau * e.tau0;
        if (!reached(run.trajectory, t)) continue;
        const auto& st = state_at(run.trajectory, t);
        const double target = U_K0(tau, P.p, P.K0);
        double dev = 0.0;
        for (int k = 0; k <= 200; ++k) {
          const double xi = -xi_max + 2.0 * xi_max * k / 200.0;
          dev = std::max(dev, std::abs(scale * st.field.interpolate(e.theta0 + xi * std::sqrt(e.tau0)) - target));
        }
        if (tau == 0.0) dev0.push_back(dev);
        w.row({e.theta0, e.t0, tau, dev, target});
      }
    }
  }
  bool monotone = true;
  for (std::size_t i = 1; i < dev0.size(); ++i)
    if (dev0[i] > 1.1 * dev0[i - 1]) monotone = false;
  const double largest = dev0.empty() ? 0.0 : *std::max_element(dev0.begin(), dev0.end());
  rep.add("tau=0 deviation non-increasing as theta0 decreases (10% slack)", largest, 0.0,
          monotone && dev0.size() >= 2);
  ojson data;
  data["d_star"] = {run.d[0], run.d[1]};
  data["skipped_theta0"] = skipped;
  data["tau0_deviation"] = dev0;
  write_report(cfg, rep, data);
  return rep;
}

Report run_outer_bound(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::OuterBound);
  const auto& P = cfg.params;
  const auto run = simulate_dstar(resolve_d_star(cfg), P);
  const double s_end = run.s_of_state.back();
  double outer = 0.0, inter = 0.0, gk = 0.0, outer0 = 0.0;
  {
    auto os = open_out(cfg, "outer_bound.csv", rep);
    CsvWriter w(os);
    w.header({"s [1]", "t [time]", "outer_sup [u]", "intermediate_ratio [1]", "giga_kohn [1]"});
    for (std::size_t k = 0; k < run.trajectory.states.size(); ++k) {
      const auto& st = run.trajectory.states[k];
      const double tau = run.T - st.t;
      const double lower = P.K0 * std::sqrt(tau * std::abs(std::log(tau)));
      const double scale = std::pow(tau, 1.0 / (P.p - 1.0));
      const double o = outer_sup(st.field, P.eps0);
      double ir = 0.0, g = 0.0;
      for (std::size_t j = 0; j < st.field.n(); ++j) {
        const double th = std::abs(st.field.theta(j));
        const double u = std::abs(st.field.values[j]);
        if (th >= lower && th <= P.eps0 / 2.0) ir = std::max(ir, u / (2.0 * u_star(th, P.p)));
        if (th >= 0.05) g = std::max(g, scale * u);
      }
      if (k == 0) outer0 = o;
      outer = std::max(outer, o);
      inter = std::max(inter, ir);
      if (run.s_of_state[k] >= s_end - 0.5) gk = std::max(gk, g);
      w.row({run.s_of_state[k], st.t, o, ir, g});
    }
  }
  rep.add("outer sup at the initial time", outer0, 0.0, outer0 == 0.0);
  rep.add("outer sup over the run", outer, P.eta0 / 2.0, outer <= P.eta0 / 2.0, "margin >= eta0/2");
  rep.add("|u| / (2|u*|) on the intermediate region", inter, 1.0, inter <= 1.0);
  rep.add("Giga-Kohn scalar away from 0 near t_end", gk, 0.2, gk <= 0.2);
  ojson data;
  data["d_star"] = {run.d[0], run.d[1]};
  data["stop_reason"] = to_string(run.trajectory.reason);
  data["s_end"] = s_end;
  write_report(cfg, rep, data);
  return rep;
}

Report run_perturb(const RunConfig& cfg) {
  Report rep;
  rep.experiment = to_string(Experiment::Perturb);
  const auto& P = cfg.params;
  std::vector<double> eps = cfg.perturb_eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const auto rows = perturbation_experiment(resolve_d_star(cfg), P, eps, cfg.seed, cfg.threads);
  {
    auto os = open_out(cfg, "perturb.csv", rep);
    CsvWriter w(os);
    w.header({"eps [u]", "T_est [time]", "theta_blowup [rad]", "drift_T [time]", "drift_theta [rad]", "peaks [1]",
              "low_confidence [bool]"});
    for (const auto& r : rows)
      w.row({r.eps, r.T_est, r.theta_blowup, r.drift_T, r.drift_theta, static_cast<long long>(r.peaks),
             static_cast<long long>(r.low_confidence)});
  }
  const double noise_T = 1e-6 * P.T();
  const double noise_theta = 2.0 * std::numbers::pi / P.grid_n;
  bool monotone = true, single = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].peaks != 1) single = false;
    if (i >= 2) {
      if (rows[i].drift_T > rows[i - 1].drift_T + 2.0 * noise_T) monotone = false;
      if (rows[i].drift_theta > rows[i - 1].drift_theta + 2.0 * noise_theta) monotone = false;
    }
  }
  rep.add("drift non-increasing as eps decreases (2x noise floor)", rows.size() - 1.0, 0.0, monotone);
  rep.add("single blow-up point for every eps", single ? 1.0 : 0.0, 1.0, single);
  ojson data;
  data["d_star"] = {resolve_d_star(cfg)[0], resolve_d_star(cfg)[1]};
  data["noise_floor_T"] = noise_T;
  data["noise_floor_theta"] = noise_theta;
  write_report(cfg, rep, data);
  return rep;
}

Report run_experiment(const RunConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::SpectralChecks: return run_spectral_checks(cfg);
    case Experiment::KernelChecks: return run_kernel_checks(cfg);
    case Experiment::Simulate: return run_simulate(cfg);
    case Experiment::Shoot: return run_shoot(cfg);
    case Experiment::Profile: return run_profile(cfg);
    case Experiment::FinalProfile: return run_final_profile(cfg);
    case Experiment::Flatness: return run_flatness(cfg);
    case Experiment::OuterBound: return run_outer_bound(cfg);
    case Experiment::Perturb: return run_perturb(cfg);
  }
  throw ConfigError("unknown experiment");
}

namespace {

struct PlotSpec {
  const char* csv;
  const char* script;
  const char* body;
};

constexpr PlotSpec kPlots[] = {
    {"profile.csv", "plot_profile.py",
     "s = col('s [1]')\n"
     "for name in ('E_R1 [1]', 'E_R2 [1]', 'E_R4 [1]'):\n"
     "    plt.semilogy(s, col(name), marker='o', label=name)\n"
     "plt.xlabel('s'); plt.ylabel('E(s,R)'); plt.legend()\n"},
    {"final_profile.csv", "plot_final_profile.py",
     "th = col('theta [rad]')\n"
     "plt.semilogx(th, col('ratio [1]'), marker='o')\n"
     "plt.axhline(1.0, color='k', lw=0.5)\n"
     "plt.xlabel('theta'); plt.ylabel('u / u*')\n"},
    {"modes.csv", "plot_modes.py",
     "s = col('s [1]')\n"
     "b = col('bound_q01 [1]')\n"
     "plt.plot(s, [x / y for x, y in zip(col('q0 [1]'), b)], label='q0 s^2/A')\n"
     "plt.plot(s, [x / y for x, y in zip(col('q1 [1]'), b)], label='q1 s^2/A')\n"
     "plt.plot(s, [x / y for x, y in zip(col('q2 [1]'), col('bound_q2 [1]'))], label='q2 / bound')\n"
     "plt.xlabel('s'); plt.legend()\n"},
    {"winding.csv", "plot_winding.py",
     "x = col('image_q0 [A/s0^2]'); y = col('image_q1 [A/s0^2]')\n"
     "plt.plot(x + x[:1], y + y[:1], marker='.')\n"
     "plt.plot([0], [0], 'k+')\n"
     "plt.gca().set_aspect('equal'); plt.xlabel('q0 s0^2/A'); plt.ylabel('q1 s0^2/A')\n"},
    {"flatness.csv", "plot_flatness.py",
     "th = col('theta0 [rad]'); tau = col('tau [1]'); dev = col('deviation [1]')\n"
     "for t in sorted(set(tau)):\n"
     "    pts = [(a, d) for a, b, d in zip(th, tau, dev) if b == t]\n"
     "    plt.loglog([a for a, _ in pts], [d for _, d in pts], marker='o', label='tau=%g' % t)\n"
     "plt.xlabel('theta0'); plt.ylabel('sup |U - U_K0|'); plt.legend()\n"},
    {"outer_bound.csv", "plot_outer_bound.py",
     "s = col('s [1]')\n"
     "plt.plot(s, col('outer_sup [u]'), label='outer sup')\n"
     "plt.plot(s, col('intermediate_ratio [1]'), label='|u|/(2u*)')\n"
     "plt.plot(s, col('giga_kohn [1]'), label='Giga-Kohn scalar')\n"
     "plt.xlabel('s'); plt.legend()\n"},
};

}  // namespace

PlotEmission emit_plots(const std::filesystem::path& dir) {
  PlotEmission out;
  for (const auto& p : kPlots) {
    if (!std::filesystem::exists(dir / p.csv)) {
      out.missing.push_back(p.csv);
      continue;
    }
    std::ofstream os(dir / p.script, std::ios::binary);
    if (!os) throw std::runtime_error(std::string("cannot write ") + p.script);
    os << "import csv\nimport os\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
       << "HERE = os.path.dirname(os.path.abspath(__file__))\n"
       << "with open(os.path.join(HERE, '" << p.csv << "'), newline='') as fh:\n"
       << "    rows = list(csv.DictReader(fh))\n\n"
       << "def col(name):\n    return [float(r[name]) for r in rows]\n\n"
       << p.body << "\nplt.savefig(os.path.join(HERE, '" << std::filesystem::path(p.script).stem().string()
       << ".png'), dpi=150)\n";
    out.scripts.push_back(p.script);
  }
  return out;
}

}  // namespace blowup
