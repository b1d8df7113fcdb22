#include "blowup/solver.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include "blowup/io.hpp"

#ifdef BLOWUP_WITH_FFTW
#include <fftw3.h>
#endif

namespace blowup {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

void nonlinear_add(std::span<const double> u, std::span<double> out, double p) {
  const std::size_t n = u.size();
  if (p == 3.0) {
    for (std::size_t j = 0; j < n; ++j) out[j] += u[j] * u[j] * u[j];
  } else {
    for (std::size_t j = 0; j < n; ++j) out[j] += std::pow(std::abs(u[j]), p - 1.0) * u[j];
  }
}

void eval_rhs(std::span<const double> u, std::span<double> out, double p) {
  periodic_laplacian<SpatialScheme::FourthOrder>(u, out);
  nonlinear_add(u, out, p);
}

void require_grid(std::size_t n) {
  if (n < 8) throw std::invalid_argument("periodic grid needs at least 8 points");
}

}  // namespace

double PeriodicField::dtheta() const { return kTwoPi / static_cast<double>(n()); }

double PeriodicField::theta(std::size_t j) const {
  return -std::numbers::pi + kTwoPi * static_cast<double>(j) / static_cast<double>(n());
}

double PeriodicField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::size_t PeriodicField::argmax_abs() const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n(); ++j)
    if (std::abs(values[j]) > std::abs(values[best])) best = j;
  return best;
}

double PeriodicField::interpolate(double th) const {
  const std::size_t N = n();
  const double x = (wrap_angle(th) + std::numbers::pi) / dtheta();
  double fl = std::floor(x);
  const double r = x - fl;
  const auto i = static_cast<long long>(fl);
  auto at = [&](long long k) {
    long long m = k % static_cast<long long>(N);
    if (m < 0) m += static_cast<long long>(N);
    return values[static_cast<std::size_t>(m)];
  };
  const double fm = at(i - 1), f0 = at(i), f1 = at(i + 1), f2 = at(i + 2);
  const double wm = -r * (r - 1.0) * (r - 2.0) / 6.0;
  const double w0 = (r + 1.0) * (r - 1.0) * (r - 2.0) / 2.0;
  const double w1 = -(r + 1.0) * r * (r - 2.0) / 2.0;
  const double w2 = (r + 1.0) * r * (r - 1.0) / 6.0;
  return wm * fm + w0 * f0 + w1 * f1 + w2 * f2;
}

template <>
void periodic_laplacian<SpatialScheme::FourthOrder>(std::span<const double> u, std::span<double> out) {
  const std::size_t n = u.size();
  require_grid(n);
  const double h = kTwoPi / static_cast<double>(n);
  const double c = 1.0 / (12.0 * h * h);
  auto stencil = [&](double um2, double um1, double u0, double up1, double up2) {
    return c * (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2);
  };
  out[0] = stencil(u[n - 2], u[n - 1], u[0], u[1], u[2]);
  out[1] = stencil(u[n - 1], u[0], u[1], u[2], u[3]);
  for (std::size_t j = 2; j + 2 < n; ++j) out[j] = stencil(u[j - 2], u[j - 1], u[j], u[j + 1], u[j + 2]);
  out[n - 2] = stencil(u[n - 4], u[n - 3], u[n - 2], u[n - 1], u[0]);
  out[n - 1] = stencil(u[n - 3], u[n - 2], u[n - 1], u[0], u[1]);
}

#ifdef BLOWUP_WITH_FFTW
template <>
void periodic_laplacian<SpatialScheme::Spectral>(std::span<const double> u, std::span<double> out) {
  const std::size_t n = u.size();
  require_grid(n);
  const std::size_t nc = n / 2 + 1;
  std::vector<double> in(u.begin(), u.end());
  auto* spec = fftw_alloc_complex(nc);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), spec, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, out.data(), FFTW_ESTIMATE);
  fftw_execute(fwd);
  for (std::size_t k = 0; k < nc; ++k) {
    // The Nyquist mode is dropped: its derivative is not representable on the grid.
    const double kk = (k == n / 2) ? 0.0 : static_cast<double>(k);
    const double scale = -kk * kk / static_cast<double>(n);
    spec[k][0] *= scale;
    spec[k][1] *= scale;
  }
  fftw_execute(bwd);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(spec);
}
#endif

void periodic_gradient(std::span<const double> u, std::span<double> out) {
  const std::size_t n = u.size();
  require_grid(n);
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double um2 = u[(j + n - 2) % n], um1 = u[(j + n - 1) % n];
    const double up1 = u[(j + 1) % n], up2 = u[(j + 2) % n];
    out[j] = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h);
  }
}

template <SpatialScheme S>
PeriodicField rhs(const PeriodicField& field, double p) {
  PeriodicField out(field.n());
  periodic_laplacian<S>(field.values, out.values);
  nonlinear_add(field.values, out.values, p);
  return out;
}

template PeriodicField rhs<SpatialScheme::FourthOrder>(const PeriodicField&, double);
#ifdef BLOWUP_WITH_FFTW
template PeriodicField rhs<SpatialScheme::Spectral>(const PeriodicField&, double);
#endif

StepControl StepControl::from(const Discretization& d) {
  StepControl c;
  c.rtol = d.rtol;
  c.atol = d.atol;
  c.safety = d.safety;
  c.ode_cap = d.ode_cap;
  return c;
}

double diffusion_dt(double h) {
  // Spectral radius of the fourth-order stencil is 16/(3h^2).
  return 3.3 * 3.0 * h * h / 16.0;
}

TimeState Integrator::step(const TimeState& state, double t_limit) {
  const auto& y0 = state.field.values;
  const std::size_t n = y0.size();
  if (!(t_limit > state.t)) throw SolverError("step requested at or past its time limit");
  for (auto& k : k_) k.resize(n);
  stage_.resize(n);

  const double sup = state.field.sup_norm();
  double cap = diffusion_dt(state.field.dtheta());
  if (sup > 0.0) cap = std::min(cap, ctl_.ode_cap * std::pow(sup, -(p_ - 1.0)));
  cap *= ctl_.safety;

  if (!(fsal_t_ == state.t)) eval_rhs(y0, k_[0], p_);
  double dt = dt_next_ > 0.0 ? std::min(dt_next_, cap) : cap;

  TimeState next;
  next.field.values.resize(n);
  auto& y1 = next.field.values;
  for (;;) {
    bool landing = false;
    if (state.t + dt >= t_limit) {
      dt = t_limit - state.t;
      landing = true;
    }
    if (!(dt >= ctl_.dt_min) || !std::isfinite(dt))
      throw SolverError("time step underflow at t = " + std::to_string(state.t));

    auto stage = [&](std::vector<double>& dst, auto&& combo) {
      for (std::size_t j = 0; j < n; ++j) stage_[j] = y0[j] + dt * combo(j);
      eval_rhs(stage_, dst, p_);
    };
    const auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    stage(k2, [&](std::size_t j) { return a21 * k1[j]; });
    stage(k3, [&](std::size_t j) { return a31 * k1[j] + a32 * k2[j]; });
    stage(k4, [&](std::size_t j) { return a41 * k1[j] + a42 * k2[j] + a43 * k3[j]; });
    stage(k5, [&](std::size_t j) { return a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]; });
    stage(k6, [&](std::size_t j) {
      return a61 * k1[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] + a65 * k5[j];
    });
    for (std::size_t j = 0; j < n; ++j)
      y1[j] = y0[j] + dt * (a71 * k1[j] + a73 * k3[j] + a74 * k4[j] + a75 * k5[j] + a76 * k6[j]);
    eval_rhs(y1, k7, p_);

    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = dt * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
      const double sc = ctl_.atol + ctl_.rtol * std::max(std::abs(y0[j]), std::abs(y1[j]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));

    // Hairer's PI controller, beta = 0.04.
    constexpr double expo = 0.2 - 0.04 * 0.75;
    if (err <= 1.0 && std::isfinite(err)) {
      const double e = std::max(err, 1e-10);
      double fac = std::pow(e, expo) / std::pow(err_prev_, 0.04) / ctl_.safety;
      fac = std::clamp(fac, 0.1, 5.0);
      err_prev_ = std::max(err, 1e-4);
      if (!landing) dt_next_ = dt / fac;
      next.t = landing ? t_limit : state.t + dt;
      next.dt_last = dt;
      std::swap(k_[0], k_[6]);
      fsal_t_ = next.t;
      ++accepted_;
      return next;
    }
    ++rejected_;
    const double fac = std::isfinite(err) ? std::clamp(std::pow(err, expo) / ctl_.safety, 1.0 / 0.2, 10.0) : 10.0;
    dt /= fac;
    dt_next_ = dt;
  }
}

TimeState step_adaptive(const TimeState& state, double p, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("safety must lie in (0, 1]");
  StepControl c;
  c.safety = safety;
  Integrator integ(p, c);
  return integ.step(state, std::numeric_limits<double>::infinity());
}

PeriodicField build_initial_data(double d0, double d1, const ProblemParams& params) {
  params.validate();
  if (!std::isfinite(d0) || !std::isfinite(d1)) throw std::invalid_argument("d0, d1 must be finite");
  if (params.profile_support() >= std::numbers::pi) throw std::invalid_argument("profile support exceeds the circle");
  if (params.perturbation_support() >= params.eps0 / 2.0)
    throw std::invalid_argument("perturbation support K0 sqrt(s0) e^{-s0/2} reaches the outer region |theta| >= eps0/2");
  const double p = params.p, s0 = params.s0, T = params.T();
  const double amp = std::pow(T, -1.0 / (p - 1.0));
  const double sqT = std::sqrt(T);
  const double lead = params.A / (s0 * s0);
  return PeriodicField::sample(static_cast<std::size_t>(params.grid_n), [&](double th) {
    const double y = th / sqT;
    double v = 0.0;
    const double c8 = chi(8.0 * y, s0, params.eps0);
    if (c8 > 0.0) v += profile_phi(y, s0, p) * c8;
    const double c1 = chi1(2.0 * y, s0, params.K0);
    if (c1 > 0.0) v += lead * (d0 + d1 * y) * c1;
    return amp * v;
  });
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::SupThreshold: return "sup_threshold";
    case StopReason::FinalTime: return "final_time";
    case StopReason::Predicate: return "predicate";
    case StopReason::Resolution: return "resolution";
    case StopReason::DtUnderflow: return "dt_underflow";
  }
  return "unknown";
}

Trajectory integrate_until(TimeState state, double p, const StepControl& control,
                           const IntegrateOptions& options) {
  if (!(options.sup_threshold > 0.0 || options.final_time > 0.0 || options.stop ||
        options.resolution_cells > 0.0))
    throw std::invalid_argument("integrate_until needs at least one stop condition");
  if (!std::is_sorted(options.checkpoints.begin(), options.checkpoints.end()))
    throw std::invalid_argument("checkpoints must be increasing");
  StepControl ctl = control;
  if (options.blowup_time > 0.0) ctl.dt_min = std::max(ctl.dt_min, 1e-14 * options.blowup_time);
  Integrator integ(p, ctl);

  Trajectory traj;
  auto sample = [&](const TimeState& s) {
    const std::size_t j = s.field.argmax_abs();
    traj.history.push_back({s.t, s.dt_last, s.field.sup_norm(), s.field.theta(j)});
  };
  sample(state);

  std::size_t next_cp = 0;
  while (next_cp < options.checkpoints.size() && options.checkpoints[next_cp] < state.t) ++next_cp;
  const double h = state.field.dtheta();
  bool last_stored = false;

  auto finish = [&](StopReason r) {
    traj.reason = r;
    if (!last_stored) traj.states.push_back(state);
    return traj;
  };

  for (;;) {
    if (next_cp < options.checkpoints.size() && options.checkpoints[next_cp] == state.t) {
      traj.states.push_back(state);
      last_stored = true;
      ++next_cp;
      if (options.stop && options.stop(state)) return finish(StopReason::Predicate);
    }
    if (options.sup_threshold > 0.0 && state.field.sup_norm() >= options.sup_threshold)
      return finish(StopReason::SupThreshold);
    if (options.final_time > 0.0 && state.t >= options.final_time) return finish(StopReason::FinalTime);
    if (options.resolution_cells > 0.0 && options.blowup_time > state.t) {
      const double tau = options.blowup_time - state.t;
      if (std::sqrt(tau * std::abs(std::log(tau))) < options.resolution_cells * h)
        return finish(StopReason::Resolution);
    }

    double limit = std::numeric_limits<double>::infinity();
    if (options.final_time > 0.0) limit = options.final_time;
    if (next_cp < options.checkpoints.size()) limit = std::min(limit, options.checkpoints[next_cp]);
    try {
      state = integ.step(state, limit);
    } catch (const SolverError&) {
      return finish(StopReason::DtUnderflow);
    }
    last_stored = false;
    ++traj.steps;
    sample(state);
  }
}

BlowupEstimate estimate_T(std::span<const SupSample> history, double p) {
  if (history.size() < 5) throw std::invalid_argument("estimate_T needs at least five samples");
  BlowupEstimate est;
  for (const auto& h : history) est.sup_norm_history.emplace_back(h.t, h.sup_norm);
  est.theta_blowup = wrap_angle(history.back().theta_argmax);

  const double top = history.back().sup_norm;
  std::size_t first = history.size() - 1;
  while (first > 0 && history[first - 1].sup_norm >= top / 10.0) --first;
  if (history.size() - first < 5) first = history.size() - 5;

  // Fit y = alpha + beta t with y = |u|^{-(p-1)}; T = -alpha / beta.
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double m = static_cast<double>(history.size() - first);
  const double t0 = history[first].t;
  bool monotone = true;
  for (std::size_t i = first; i < history.size(); ++i) {
    const double t = history[i].t - t0;
    const double y = std::pow(history[i].sup_norm, -(p - 1.0));
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    if (i > first && history[i].sup_norm <= history[i - 1].sup_norm) monotone = false;
  }
  const double den = m * stt - st * st;
  const double beta = den != 0.0 ? (m * sty - st * sy) / den : 0.0;
  const double alpha = (sy - beta * st) / m;
  if (!(beta < 0.0) || !std::isfinite(beta)) {
    est.low_confidence = true;
    est.T_est = std::numeric_limits<double>::infinity();
    return est;
  }
  est.T_est = t0 - alpha / beta;
  const double rate = -beta / (p - 1.0);
  est.low_confidence = !monotone || std::abs(rate - 1.0) > 0.25 || top < 10.0 * history[first].sup_norm;
  return est;
}

double regular_region_residual(std::span<const TimeState> states, const ProblemParams& params) {
  double worst = 0.0;
  for (const auto& st : states) {
    const auto& u = st.field;
    const std::size_t n = u.n();
    std::vector<double> cb(n), cb1(n), cb2(n), ubar(n), lap_u(n), lap_ubar(n), du(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto c = chibar_jet(u.theta(j), params.eps0);
      cb[j] = c.value;
      cb1[j] = c.d1;
      cb2[j] = c.d2;
      ubar[j] = u.values[j] * c.value;
    }
    periodic_laplacian(u.values, lap_u);
    periodic_laplacian(ubar, lap_ubar);
    periodic_gradient(u.values, du);
    for (std::size_t j = 0; j < n; ++j) {
      const double uj = u.values[j];
      const double nl = std::pow(std::abs(uj), params.p - 1.0);
      const double dt_ubar = cb[j] * (lap_u[j] + nl * uj);
      const double r = dt_ubar - lap_ubar[j] - nl * ubar[j] + 2.0 * cb1[j] * du[j] + cb2[j] * uj;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

void write_history_csv(std::ostream& os, std::span<const SupSample> history) {
  CsvWriter csv(os);
  csv.header({"t [time]", "dt [time]", "sup_norm [u]", "theta_argmax [rad]"});
  for (const auto& h : history) csv.row({h.t, h.dt, h.sup_norm, h.theta_argmax});
}

namespace {
template <class T>
void put_le(std::ostream& os, T v) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  os.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}
template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bits{};
  if (!is.read(reinterpret_cast<char*>(bits.data()), sizeof(T))) throw std::runtime_error("truncated field dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}
}  // namespace

void write_field_binary(std::ostream& os, const PeriodicField& field, double t) {
  put_le<std::uint64_t>(os, field.n());
  put_le<double>(os, t);
  for (double v : field.values) put_le<double>(os, v);
}

std::pair<PeriodicField, double> read_field_binary(std::istream& is) {
  const auto n = get_le<std::uint64_t>(is);
  if (n > (1ull << 32)) throw std::runtime_error("field dump header is implausible");
  const double t = get_le<double>(is);
  PeriodicField f(static_cast<std::size_t>(n));
  for (auto& v : f.values) v = get_le<double>(is);
  return {std::move(f), t};
}

}  // namespace blowup
