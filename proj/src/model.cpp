#include "blowup/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace blowup {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

void require_exponent(double p) {
  require_finite(p, "p");
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
}

// Logistic form of g(t)/(g(t)+g(1-t)) with g(t) = exp(-1/t), t in (0,1):
// S = sigma(h), h = 1/(1-t) - 1/t.
CutoffJet smooth_step(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  const double a = std::exp(-1.0 / t);
  const double c = std::exp(-1.0 / (1.0 - t));
  const double S = a / (a + c);
  const double one_minus = c / (a + c);
  const double u = 1.0 - t;
  const double h1 = 1.0 / (t * t) + 1.0 / (u * u);
  const double h2 = -2.0 / (t * t * t) + 2.0 / (u * u * u);
  const double s1 = S * one_minus;
  return {S, s1 * h1, s1 * (one_minus - S) * h1 * h1 + s1 * h2};
}

}  // namespace

double kappa(double p) {
  require_exponent(p);
  return std::pow(p - 1.0, -1.0 / (p - 1.0));
}

double profile_b(double p) {
  require_exponent(p);
  return (p - 1.0) * (p - 1.0) / (4.0 * p);
}

void ProblemParams::validate() const {
  require_exponent(p);
  for (auto [v, name] : {std::pair{K0, "K0"}, {eps0, "eps0"}, {A, "A"}, {eta0, "eta0"}, {s0, "s0"},
                         {y_halfwidth_mult, "y_halfwidth_mult"}})
    require_finite(v, name);
  if (!(K0 >= 1.0)) throw std::invalid_argument("K0 must be >= 1");
  if (!(eps0 > 0.0 && eps0 < std::numbers::pi / 4.0))
    throw std::invalid_argument("eps0 must lie in (0, pi/4)");
  if (!(A >= 1.0)) throw std::invalid_argument("A must be >= 1");
  if (!(eta0 > 0.0 && eta0 <= 1.0)) throw std::invalid_argument("eta0 must lie in (0, 1]");
  if (!(s0 > 1.0)) throw std::invalid_argument("s0 must exceed 1");
  if (grid_n < 64 || grid_n % 2 != 0) throw std::invalid_argument("grid_n must be even and >= 64");
  if (!(y_halfwidth_mult >= 1.0)) throw std::invalid_argument("y_halfwidth_mult must be >= 1");
  if (!(disc.safety > 0.0 && disc.safety <= 1.0))
    throw std::invalid_argument("safety must lie in (0, 1]");
  if (!(disc.rtol > 0.0 && disc.atol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(disc.ode_cap > 0.0)) throw std::invalid_argument("ode_cap must be positive");
  if (!(disc.blowup_threshold > 0.0)) throw std::invalid_argument("blowup_threshold must be positive");
  if (!(disc.frame_ds > 0.0)) throw std::invalid_argument("frame_ds must be positive");
  if (!(disc.resolution_cells >= 2.0)) throw std::invalid_argument("resolution_cells must be >= 2");
  if (disc.regrid_levels < 0 || disc.regrid_levels > 6) throw std::invalid_argument("regrid_levels must lie in [0, 6]");
}

double ProblemParams::kappa() const { return blowup::kappa(p); }
double ProblemParams::b() const { return profile_b(p); }
double ProblemParams::T() const { return std::exp(-s0); }

double ProblemParams::perturbation_support() const {
  // chi1(2y, s0) vanishes for |y| >= K0 sqrt(s0); theta = y sqrt(T).
  return K0 * std::sqrt(s0) * std::exp(-s0 / 2.0);
}

double profile_f(double z, double p) {
  require_finite(z, "z");
  require_exponent(p);
  return std::pow(p - 1.0 + profile_b(p) * z * z, -1.0 / (p - 1.0));
}

double profile_fm(double z, double p, int m) {
  require_finite(z, "z");
  require_exponent(p);
  if (m < 2) throw std::invalid_argument("profile_fm requires m >= 2");
  return std::pow(p - 1.0 + std::pow(std::abs(z), 2.0 * m), -1.0 / (p - 1.0));
}

ProfileJet profile_f_jet(double z, double p) {
  const double f = profile_f(z, p);
  const double b = profile_b(p);
  // f^{p-1} (p-1 + b z^2) = 1 gives f' = -(2bz/(p-1)) f^p.
  const double fp = std::pow(f, p);
  const double c = 2.0 * b / (p - 1.0);
  const double df = -c * z * fp;
  const double d2f = -c * fp + c * c * z * z * p * std::pow(f, 2.0 * p - 1.0);
  return {f, df, d2f};
}

double profile_phi(double y, double s, double p) {
  require_finite(y, "y");
  if (!(s > 0.0)) throw std::invalid_argument("profile_phi requires s > 0");
  return profile_f(y / std::sqrt(s), p) + kappa(p) / (4.0 * p * s);
}

PhiJet profile_phi_jet(double y, double s, double p) {
  require_finite(y, "y");
  if (!(s > 0.0)) throw std::invalid_argument("profile_phi_jet requires s > 0");
  const double rs = std::sqrt(s);
  const double z = y / rs;
  const auto j = profile_f_jet(z, p);
  const double corr = kappa(p) / (4.0 * p * s);
  return {j.f + corr, j.df / rs, j.d2f / s, -0.5 * z / s * j.df - corr / s};
}

double u_star(double theta, double p) {
  require_exponent(p);
  const double a = std::abs(theta);
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("u_star requires 0 < |theta| < 1");
  const double L = std::abs(std::log(a));
  return std::pow((p - 1.0) * (p - 1.0) * a * a / (8.0 * p * L), -1.0 / (p - 1.0));
}

double u_star_as_printed(double theta, double p) {
  require_exponent(p);
  const double a = std::abs(theta);
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("u_star requires 0 < |theta| < 1");
  const double L = std::abs(std::log(a));
  return std::pow((p - 1.0) * (p - 1.0) * L / (8.0 * p * a * a), -1.0 / (p - 1.0));
}

double U_K0(double tau, double p, double K0) {
  require_exponent(p);
  require_finite(tau, "tau");
  const double arg = (1.0 - tau) + (p - 1.0) * K0 * K0 / (4.0 * p);
  if (!(arg > 0.0)) throw std::invalid_argument("U_K0: tau is at or past the ODE blow-up time");
  return kappa(p) * std::pow(arg, -1.0 / (p - 1.0));
}

CutoffJet chi0_jet(double xi) {
  const double a = std::abs(xi);
  if (a <= 1.0) return {1.0, 0.0, 0.0};
  if (a >= 2.0) return {0.0, 0.0, 0.0};
  const auto S = smooth_step(2.0 - a);
  const double sgn = xi > 0 ? 1.0 : -1.0;
  return {S.value, -sgn * S.d1, S.d2};
}

double chi0(double xi) { return chi0_jet(xi).value; }

double chi(double y, double s, double eps0) { return chi0(y * std::exp(-s / 2.0) / eps0); }

double chi1(double y, double s, double K0) {
  if (!(s > 0.0)) throw std::invalid_argument("chi1 requires s > 0");
  return chi0(std::abs(y) / (K0 * std::sqrt(s)));
}

ChiJet chi_jet(double y, double s, double eps0) {
  const double scale = std::exp(-s / 2.0) / eps0;
  const double xi = y * scale;
  const auto c = chi0_jet(xi);
  return {c.value, c.d1 * scale, c.d2 * scale * scale, -0.5 * xi * c.d1};
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta + std::numbers::pi, two_pi);
  if (r < 0) r += two_pi;
  return r - std::numbers::pi;
}

CutoffJet chibar_jet(double theta, double eps0) {
  const double t = wrap_angle(theta);
  const double scale = 4.0 / eps0;
  const auto c = chi0_jet(scale * t);
  return {1.0 - c.value, -c.d1 * scale, -c.d2 * scale * scale};
}

double chibar(double theta, double eps0) { return chibar_jet(theta, eps0).value; }

}  // namespace blowup
