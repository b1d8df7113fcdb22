#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "blowup/solver.hpp"

using namespace blowup;

namespace {

double laplacian_error(std::size_t n, int k) {
  auto u = PeriodicField::sample(n, [k](double th) { return std::cos(k * th); });
  std::vector<double> out(n);
  periodic_laplacian(u.values, out);
  double e = 0.0;
  for (std::size_t j = 0; j < n; ++j) e = std::max(e, std::abs(out[j] + k * k * std::cos(k * u.theta(j))));
  return e;
}

}  // namespace

TEST_CASE("PeriodicField geometry") {
  PeriodicField f(8);
  CHECK(f.theta(0) == doctest::Approx(-std::numbers::pi));
  CHECK(f.dtheta() == doctest::Approx(std::numbers::pi / 4.0));
  f.values[5] = -3.0;
  CHECK(f.sup_norm() == 3.0);
  CHECK(f.argmax_abs() == 5u);
}

TEST_CASE("cubic interpolation of a smooth periodic field") {
  auto f = PeriodicField::sample(256, [](double th) { return std::sin(th) + 0.3 * std::cos(2 * th); });
  for (double th : {-3.1, -0.01, 0.77, 3.14}) CHECK(f.interpolate(th) == doctest::Approx(std::sin(th) + 0.3 * std::cos(2 * th)).epsilon(1e-6));
  CHECK(f.interpolate(1.0 + 2.0 * std::numbers::pi) == doctest::Approx(f.interpolate(1.0)));
}

TEST_CASE("fourth-order Laplacian converges at rate four") {
  const double e1 = laplacian_error(64, 3);
  const double e2 = laplacian_error(128, 3);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
}

#ifdef BLOWUP_WITH_FFTW
TEST_CASE("spectral Laplacian is exact on trigonometric polynomials") {
  const std::size_t n = 64;
  auto u = PeriodicField::sample(n, [](double th) { return std::cos(3 * th) - 2.0 * std::sin(5 * th); });
  std::vector<double> out(n);
  periodic_laplacian<SpatialScheme::Spectral>(u.values, out);
  for (std::size_t j = 0; j < n; ++j) {
    const double th = u.theta(j);
    CHECK(out[j] == doctest::Approx(-9.0 * std::cos(3 * th) + 50.0 * std::sin(5 * th)).epsilon(1e-10).scale(1.0));
  }
}
#endif

TEST_CASE("periodic gradient") {
  auto u = PeriodicField::sample(256, [](double th) { return std::sin(2 * th); });
  std::vector<double> out(256);
  periodic_gradient(u.values, out);
  for (std::size_t j = 0; j < 256; j += 17) CHECK(out[j] == doctest::Approx(2 * std::cos(2 * u.theta(j))).epsilon(1e-5).scale(1.0));
}

TEST_CASE("rhs adds the power nonlinearity") {
  auto u = PeriodicField(std::vector<double>(32, -2.0));
  const auto r = rhs(u, 3.0);
  for (double v : r.values) CHECK(v == doctest::Approx(-8.0));
}

TEST_CASE("small first mode decays like e^{-t}") {
  const double amp = 1e-6;
  TimeState st{0.0, PeriodicField::sample(128, [amp](double th) { return amp * std::cos(th); }), 0.0};
  IntegrateOptions opt;
  opt.final_time = 1.0;
  const auto tr = integrate_until(st, 3.0, StepControl{}, opt);
  CHECK(tr.reason == StopReason::FinalTime);
  CHECK(tr.last().t == doctest::Approx(1.0));
  const auto& f = tr.last().field;
  for (std::size_t j = 0; j < f.n(); j += 9)
    CHECK(f.values[j] == doctest::Approx(amp * std::exp(-1.0) * std::cos(f.theta(j))).epsilon(1e-6).scale(amp));
}

TEST_CASE("constant data follows the ODE solution") {
  TimeState st{0.0, PeriodicField(std::vector<double>(16, 1.0)), 0.0};
  IntegrateOptions opt;
  opt.checkpoints = {0.2, 0.4};
  opt.final_time = 0.4;
  const auto tr = integrate_until(st, 3.0, StepControl{}, opt);
  REQUIRE(tr.states.size() >= 2);
  CHECK(tr.states[0].t == doctest::Approx(0.2));
  CHECK(tr.states[0].field.values[3] == doctest::Approx(1.0 / std::sqrt(1.0 - 0.4)).epsilon(1e-7));
  CHECK(tr.states[1].field.values[3] == doctest::Approx(1.0 / std::sqrt(1.0 - 0.8)).epsilon(1e-7));
}

TEST_CASE("sup threshold and blow-up time estimate") {
  TimeState st{0.0, PeriodicField(std::vector<double>(16, 1.0)), 0.0};
  IntegrateOptions opt;
  opt.sup_threshold = 1e5;
  const auto tr = integrate_until(st, 3.0, StepControl{}, opt);
  CHECK(tr.reason == StopReason::SupThreshold);
  const auto est = estimate_T(tr.history, 3.0);
  CHECK(est.T_est == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("estimate_T is exact on the ODE profile") {
  std::vector<SupSample> h;
  const double T = 0.5;
  for (int k = 0; k < 200; ++k) {
    const double t = T - 0.5 * std::pow(10.0, -k / 40.0);
    h.push_back({t, 1e-3, 1.0 / std::sqrt(2.0 * (T - t)), 0.0});
  }
  CHECK(estimate_T(h, 3.0).T_est == doctest::Approx(T).epsilon(1e-10));
  h.resize(3);
  CHECK_THROWS_AS(estimate_T(h, 3.0), std::invalid_argument);
}

TEST_CASE("diffusion-limited step size") {
  const double h = 2.0 * std::numbers::pi / 512.0;
  CHECK(diffusion_dt(h) > 0.0);
  CHECK(diffusion_dt(h / 2.0) == doctest::Approx(diffusion_dt(h) / 4.0));
}

TEST_CASE("initial data carries the profile at theta = 0") {
  ProblemParams P;
  P.grid_n = 1024;
  const auto u0 = build_initial_data(0.0, 0.0, P);
  const auto j0 = P.grid_n / 2;
  CHECK(u0.theta(j0) == doctest::Approx(0.0));
  CHECK(u0.values[j0] == doctest::Approx(std::pow(P.T(), -0.5) * profile_phi(0.0, P.s0, P.p)).epsilon(1e-12));
  CHECK(u0.values[0] == 0.0);
  // d0 shifts the centre by T^{-1/(p-1)} A/s0^2 d0
  const auto u1 = build_initial_data(1.0, 0.0, P);
  CHECK(u1.values[j0] - u0.values[j0] == doctest::Approx(std::pow(P.T(), -0.5) * P.A / (P.s0 * P.s0)).epsilon(1e-10));
}

TEST_CASE("binary field round trip and history CSV") {
  auto f = PeriodicField::sample(33, [](double th) { return std::exp(std::sin(th)); });
  std::stringstream ss;
  write_field_binary(ss, f, 0.125);
  const auto [g, t] = read_field_binary(ss);
  CHECK(t == 0.125);
  CHECK(g.values == f.values);

  std::ostringstream os;
  std::vector<SupSample> h{{0.0, 1e-3, 2.0, 0.5}};
  write_history_csv(os, h);
  CHECK(os.str().rfind("t [time],dt [time],sup_norm [u],theta_argmax [rad]", 0) == 0);
}
