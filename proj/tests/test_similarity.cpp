#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "blowup/similarity.hpp"

using namespace blowup;

TEST_CASE("potential V") {
  const double phi = profile_phi(0.0, 10.0, 3.0);
  CHECK(potential_V(0.0, 10.0, 3.0) == doctest::Approx(3.0 * phi * phi - 1.5).epsilon(1e-14));
  CHECK(potential_V(0.0, 10.0, 3.0) == doctest::Approx(0.0250966).epsilon(1e-5));
  // far out phi -> kappa/(4ps), V -> -p/(p-1)
  CHECK(potential_V(1e4, 10.0, 3.0) == doctest::Approx(-1.5).epsilon(1e-3));
}

TEST_CASE("nonlinear_B is the Taylor remainder") {
  for (double phi : {0.3, 0.7}) {
    CHECK(nonlinear_B(phi, phi, 2.0) == doctest::Approx(phi * phi));
    for (double q : {-0.2, 0.05, 0.4}) CHECK(nonlinear_B(q, phi, 3.0) == doctest::Approx(3.0 * phi * q * q + q * q * q));
  }
  CHECK(nonlinear_B(0.0, 0.5, 3.0) == 0.0);
  // odd power with phi + q < 0
  CHECK(nonlinear_B(-1.0, 0.5, 3.0) == doctest::Approx(-0.125 - 0.125 + 0.75));
}

TEST_CASE("residual R against finite differences of phi") {
  const double p = 3.0, h = 1e-3;
  for (double s : {9.0, 40.0}) {
    for (double y : {0.0, 1.5, -4.0, 10.0}) {
      auto ph = [&](double yy, double ss) { return profile_phi(yy, ss, p); };
      const double phi = ph(y, s);
      const double dyy = (ph(y + h, s) - 2 * phi + ph(y - h, s)) / (h * h);
      const double dy = (ph(y + h, s) - ph(y - h, s)) / (2 * h);
      const double ds = (ph(y, s + h) - ph(y, s - h)) / (2 * h);
      const double R = dyy - 0.5 * y * dy - phi / (p - 1.0) + std::pow(phi, p) - ds;
      CHECK(residual_R(y, s, p) == doctest::Approx(R).epsilon(1e-6).scale(1e-3));
      CHECK(residual_R(y, s, p, RReading::PhiPowerMinusOne) - residual_R(y, s, p) ==
            doctest::Approx(phi * phi - std::pow(phi, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sup of R decays like 1/s") {
  const double r1 = residual_R_sup(100.0, 3.0, RReading::PhiPower, 40.0);
  const double r2 = residual_R_sup(400.0, 3.0, RReading::PhiPower, 80.0);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.15));
  const double t1 = residual_R_sup(100.0, 3.0, RReading::PhiPowerMinusOne, 40.0);
  const double t2 = residual_R_sup(400.0, 3.0, RReading::PhiPowerMinusOne, 80.0);
  CHECK(t1 / t2 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("round trip through similarity variables") {
  ProblemParams P;
  P.grid_n = 2048;
  const auto u0 = build_initial_data(0.1, -0.2, P);
  const double T = P.T();
  const auto fr = to_similarity(u0, 0.0, T, P);
  CHECK(fr.s == doctest::Approx(P.s0));
  CHECK(fr.tau == doctest::Approx(T));
  const auto back = from_similarity(fr, u0.n());
  for (std::size_t j = 0; j < u0.n(); j += 7) CHECK(back.values[j] == doctest::Approx(u0.values[j]).epsilon(1e-8).scale(1.0));

  for (std::size_t i = 0; i < fr.size(); i += 37) {
    CHECK(fr.W[i] == doctest::Approx(std::sqrt(T) * u0.interpolate(fr.y[i] * std::sqrt(T))).epsilon(1e-8).scale(1.0));
    CHECK(fr.q[i] + profile_phi(fr.y[i], fr.s, P.p) == doctest::Approx(fr.w[i]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("frame on a supplied grid and interpolation beyond it") {
  ProblemParams P;
  P.grid_n = 2048;
  const auto u0 = build_initial_data(0.0, 0.0, P);
  std::vector<double> y;
  for (int i = -200; i <= 200; ++i) y.push_back(0.05 * i);
  const auto fr = to_similarity(u0, 0.0, P.T(), P, y);
  CHECK(fr.size() == y.size());
  CHECK(fr.extent() == doctest::Approx(10.0));
  CHECK(fr.W_at(0.0) == doctest::Approx(profile_phi(0.0, P.s0, P.p)).epsilon(1e-8));
  CHECK(fr.W_at(30.0) == doctest::Approx(std::sqrt(P.T()) * u0.interpolate(30.0 * std::sqrt(P.T()))).epsilon(1e-8).scale(1.0));
  CHECK(frame_halfwidth(P.s0, P) >= 20.0);
}

TEST_CASE("F from its two forms agrees") {
  ProblemParams P;
  P.grid_n = 4096;
  const auto u0 = build_initial_data(0.3, 0.2, P);
  const auto fr = to_similarity(u0, 0.0, P.T(), P);
  const auto terms = boundary_terms(fr, P);
  REQUIRE(terms.F.size() == fr.size());
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 5; i + 5 < fr.size(); ++i) {
    diff = std::max(diff, std::abs(terms.F[i] - terms.F_direct[i]));
    scale = std::max(scale, std::abs(terms.F_direct[i]));
  }
  CHECK(diff <= 1e-3 * std::max(1.0, scale));
  // F vanishes where chi = 1
  for (std::size_t i = 0; i < fr.size(); ++i)
    if (std::abs(fr.y[i]) < 5.0) CHECK(std::abs(terms.F[i]) < 1e-10);
}

TEST_CASE("uniform derivatives are fourth order") {
  auto err = [](int n) {
    const double L = 3.0, dy = 2 * L / (n - 1);
    std::vector<double> f(n), d1(n), d2(n);
    for (int i = 0; i < n; ++i) f[i] = std::sin(-L + dy * i);
    uniform_derivatives(f, dy, d1, d2);
    double e = 0.0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(d2[i] + f[i]));
    return e;
  };
  CHECK(err(101) / err(201) > 10.0);
}

TEST_CASE("frame CSV has one row per node") {
  ProblemParams P;
  P.grid_n = 512;
  const auto fr = to_similarity(build_initial_data(0.0, 0.0, P), 0.0, P.T(), P);
  std::ostringstream os;
  write_frame_csv(os, fr, P);
  std::size_t lines = 0;
  for (char c : os.str()) lines += c == '\n';
  CHECK(lines == fr.size() + 1);
}
