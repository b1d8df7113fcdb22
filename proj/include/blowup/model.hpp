#pragma once

// Closed-form objects of the construction: the blow-up profile, the final
// profile, the constant-data ODE solution and the cut-off functions.

#include <cstdint>
#include <numbers>

namespace blowup {

/// Numerical knobs that are not part of the mathematical construction.
struct Discretization {
  double rtol = 1e-8;               ///< relative local-error tolerance of the RK pair
  double atol = 1e-10;              ///< absolute local-error tolerance
  double safety = 0.9;              ///< step safety factor in (0, 1]
  double ode_cap = 0.1;             ///< dt <= ode_cap * |u|_inf^{-(p-1)}
  double blowup_threshold = 1e6;    ///< stop once |u|_inf reaches this value
  double resolution_cells = 8.0;    ///< stop blow-up runs when the profile width spans fewer cells
  double frame_ds = 0.02;           ///< spacing in s between recorded similarity frames
  int regrid_levels = 2;            ///< grid doublings allowed after a resolution stop
};

/// All constants of the construction plus discretization controls.
struct ProblemParams {
  double p = 3.0;
  double K0 = 1.0;
  double eps0 = 0.78;
  double A = 20.0;
  double eta0 = 1.0;
  double s0 = 5.0;
  int grid_n = 4096;
  double y_halfwidth_mult = 1.5;
  Discretization disc{};

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  double kappa() const;
  double b() const;
  /// Blow-up time T = e^{-s0}.
  double T() const;
  /// Largest |theta| reached by the (d0 + d1 y) perturbation in the initial data.
  double perturbation_support() const;
  /// Largest |theta| reached by the truncated profile in the initial data (eps0/4).
  double profile_support() const { return eps0 / 4.0; }
};

double kappa(double p);
double profile_b(double p);

/// (p-1 + b z^2)^{-1/(p-1)}.
double profile_f(double z, double p);
/// (p-1 + |z|^{2m})^{-1/(p-1)}, m >= 2.
double profile_fm(double z, double p, int m);

/// First and second derivatives of profile_f in z.
struct ProfileJet {
  double f, df, d2f;
};
ProfileJet profile_f_jet(double z, double p);

/// phi(y,s) = f(y/sqrt(s)) + kappa/(4ps).
double profile_phi(double y, double s, double p);

/// phi together with its closed-form partial derivatives.
struct PhiJet {
  double phi, dy, dyy, ds;
};
PhiJet profile_phi_jet(double y, double s, double p);

/// Final blow-up profile [(p-1)^2 theta^2 / (8p |log theta|)]^{-1/(p-1)}.
///
/// Singular at theta = 0; this is the form for which
/// (T - t0(theta))^{1/(p-1)} u*(theta) -> U_K0(1) holds.
double u_star(double theta, double p);

/// The final profile exactly as it is usually printed,
/// [(p-1)^2 |log theta| / (8p theta^2)]^{-1/(p-1)}, which vanishes at theta = 0.
/// Kept for comparison runs; it is the reciprocal of u_star up to a constant.
double u_star_as_printed(double theta, double p);

/// kappa((1 - tau) + (p-1) K0^2 / (4p))^{-1/(p-1)}: the solution of u' = u^p with u(0) = f(K0).
double U_K0(double tau, double p, double K0);

/// Smooth cut-off: 1 on |xi| <= 1, 0 on |xi| >= 2, monotone in between.
double chi0(double xi);

struct CutoffJet {
  double value, d1, d2;
};
/// chi0 with its first two derivatives in xi.
CutoffJet chi0_jet(double xi);

/// chi(y,s) = chi0(y e^{-s/2} / eps0).
double chi(double y, double s, double eps0);
/// chi1(y,s) = chi0(|y| / (K0 sqrt(s))).
double chi1(double y, double s, double K0);
/// 2pi-periodic, equal to 1 - chi0(4 xi / eps0) on [-pi, pi].
double chibar(double theta, double eps0);

/// Partial derivatives of chi(y,s) needed by the boundary terms.
struct ChiJet {
  double value, dy, dyy, ds;
};
ChiJet chi_jet(double y, double s, double eps0);

/// chibar with first and second theta-derivatives.
CutoffJet chibar_jet(double theta, double eps0);

/// Wraps theta into [-pi, pi).
double wrap_angle(double theta);

}  // namespace blowup
