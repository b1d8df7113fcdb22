#pragma once

// Method-of-lines integration of u_t = u_thth + |u|^{p-1} u on the circle.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blowup/model.hpp"

namespace blowup {

/// Samples of u at theta_j = -pi + 2 pi j / n, j = 0..n-1.
struct PeriodicField {
  std::vector<double> values;

  PeriodicField() = default;
  explicit PeriodicField(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit PeriodicField(std::vector<double> v) : values(std::move(v)) {}

  std::size_t n() const { return values.size(); }
  double dtheta() const;
  double theta(std::size_t j) const;
  double sup_norm() const;
  std::size_t argmax_abs() const;
  /// Periodic four-point cubic (Lagrange) interpolation at any theta.
  double interpolate(double theta) const;

  template <class F>
  static PeriodicField sample(std::size_t n, F&& fn) {
    PeriodicField out(n);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = fn(out.theta(j));
    return out;
  }
};

enum class SpatialScheme { FourthOrder, Spectral };

/// Second derivative of periodic samples on [-pi, pi).
template <SpatialScheme S = SpatialScheme::FourthOrder>
void periodic_laplacian(std::span<const double> u, std::span<double> out);
template <>
void periodic_laplacian<SpatialScheme::FourthOrder>(std::span<const double> u, std::span<double> out);
/// Needs the library built with FFTW support.
template <>
void periodic_laplacian<SpatialScheme::Spectral>(std::span<const double> u, std::span<double> out);

/// First derivative, fourth-order central differences.
void periodic_gradient(std::span<const double> u, std::span<double> out);

/// d^2u/dtheta^2 + |u|^{p-1} u.
template <SpatialScheme S = SpatialScheme::FourthOrder>
PeriodicField rhs(const PeriodicField& field, double p);

struct TimeState {
  double t = 0.0;
  PeriodicField field;
  double dt_last = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepControl {
  double rtol = 1e-8;
  double atol = 1e-10;
  double safety = 0.9;
  double ode_cap = 0.1;
  /// Absolute dt below which integration is abandoned.
  double dt_min = 1e-300;
  static StepControl from(const Discretization& d);
};

/// Largest explicit step of the Dormand-Prince pair that is stable for the
/// fourth-order Laplacian on spacing h (real-axis stability limit 3.3).
double diffusion_dt(double h);

/// Dormand-Prince 5(4) with PI step-size control.
///
/// Each call performs exactly one accepted step, never crossing `t_limit`. dt is
/// additionally capped by safety * min(diffusion_dt, ode_cap |u|_inf^{-(p-1)}).
/// Throws SolverError when the step underflows dt_min.
class Integrator {
 public:
  Integrator(double p, StepControl control) : p_(p), ctl_(control) {}

  TimeState step(const TimeState& state, double t_limit);
  std::size_t rejected() const { return rejected_; }
  std::size_t accepted() const { return accepted_; }

 private:
  double p_;
  StepControl ctl_;
  double err_prev_ = 1e-4;
  double dt_next_ = 0.0;
  double fsal_t_ = std::numeric_limits<double>::quiet_NaN();
  std::size_t rejected_ = 0;
  std::size_t accepted_ = 0;
  std::vector<double> k_[7];
  std::vector<double> stage_;
};

/// One adaptive step with the controls taken from `safety` and defaults otherwise.
TimeState step_adaptive(const TimeState& state, double p, double safety);

/// u0(theta) = T^{-1/(p-1)} [phi(y,s0) chi(8y,s0) + A/s0^2 (d0 + d1 y) chi1(2y,s0)], y = theta/sqrt(T).
PeriodicField build_initial_data(double d0, double d1, const ProblemParams& params);

struct SupSample {
  double t;
  double dt;
  double sup_norm;
  double theta_argmax;
};

enum class StopReason { SupThreshold, FinalTime, Predicate, Resolution, DtUnderflow };
std::string to_string(StopReason r);

struct Trajectory {
  std::vector<TimeState> states;   ///< states at the requested checkpoints plus the last one
  std::vector<SupSample> history;  ///< every accepted step
  StopReason reason = StopReason::FinalTime;
  std::size_t steps = 0;
  const TimeState& last() const { return states.back(); }
};

struct IntegrateOptions {
  double sup_threshold = 0.0;  ///< <= 0 disables
  double final_time = 0.0;     ///< <= 0 disables
  /// Increasing times where the integrator lands exactly and stores the state.
  std::vector<double> checkpoints;
  /// Called at every stored checkpoint; returning true stops the integration there.
  std::function<bool(const TimeState&)> stop;
  /// Stop once sqrt((T-t)|log(T-t)|) spans fewer than this many cells (needs blowup_time).
  double resolution_cells = 0.0;
  double blowup_time = 0.0;
};

/// Integrates until one stop condition holds. A dt underflow ends the run with
/// the partial trajectory instead of throwing.
Trajectory integrate_until(TimeState state, double p, const StepControl& control,
                           const IntegrateOptions& options);

struct BlowupEstimate {
  double T_est = 0.0;
  double theta_blowup = 0.0;
  bool low_confidence = false;
  std::vector<std::pair<double, double>> sup_norm_history;
};

/// Least-squares fit of |u|^{-(p-1)} = (p-1)(T - t) over the last decade of growth.
/// Throws std::invalid_argument with fewer than five samples.
BlowupEstimate estimate_T(std::span<const SupSample> history, double p);

/// sup over theta and the stored states of
/// |d_t ubar - d_thth ubar - |u|^{p-1} ubar + 2 chibar' u_th + chibar'' u|, ubar = u chibar,
/// with d_t ubar = chibar * rhs(u).
double regular_region_residual(std::span<const TimeState> states, const ProblemParams& params);

/// CSV: t,dt,sup_norm,theta_argmax with a unit header.
void write_history_csv(std::ostream& os, std::span<const SupSample> history);
/// Binary dump: uint64 n, float64 t, n little-endian float64 samples.
void write_field_binary(std::ostream& os, const PeriodicField& field, double t);
std::pair<PeriodicField, double> read_field_binary(std::istream& is);

}  // namespace blowup
