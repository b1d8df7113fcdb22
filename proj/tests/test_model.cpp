#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "blowup/model.hpp"

using namespace blowup;

namespace {

double central(double (*fn)(double, double), double z, double p, double h = 1e-5) {
  return (fn(z + h, p) - fn(z - h, p)) / (2.0 * h);
}

}  // namespace

TEST_CASE("kappa is the constant solution of the self-similar ODE") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const double k = kappa(p);
    CHECK(std::pow(k, p) == doctest::Approx(k / (p - 1.0)).epsilon(1e-14));
    CHECK(profile_b(p) == doctest::Approx((p - 1.0) * (p - 1.0) / (4.0 * p)));
  }
}

TEST_CASE("profile_f values") {
  CHECK(profile_f(1.0, 3.0) == doctest::Approx(0.654653670707977).epsilon(1e-14));
  CHECK(profile_f(0.0, 3.0) == doctest::Approx(kappa(3.0)).epsilon(1e-15));
  CHECK(profile_f(-2.0, 3.0) == profile_f(2.0, 3.0));
}

TEST_CASE("profile_f solves the first order profile equation") {
  // -z f'/2 - f/(p-1) + f^p = 0
  for (double p : {2.0, 3.0, 4.5}) {
    for (double z : {-3.0, -0.7, 0.4, 1.0, 2.5}) {
      const double f = profile_f(z, p);
      const double df = central(profile_f, z, p);
      CHECK(-0.5 * z * df - f / (p - 1.0) + std::pow(f, p) == doctest::Approx(0.0).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("profile_f_jet matches finite differences") {
  const double p = 3.0, h = 1e-4;
  for (double z : {-1.3, 0.0, 0.8, 2.0}) {
    const auto j = profile_f_jet(z, p);
    CHECK(j.f == doctest::Approx(profile_f(z, p)));
    CHECK(j.df == doctest::Approx((profile_f(z + h, p) - profile_f(z - h, p)) / (2 * h)).epsilon(1e-7));
    CHECK(j.d2f == doctest::Approx((profile_f(z + h, p) - 2 * profile_f(z, p) + profile_f(z - h, p)) / (h * h))
                       .epsilon(1e-5));
  }
}

TEST_CASE("profile_phi and its jet") {
  CHECK(profile_phi(0.0, 10.0, 3.0) == doctest::Approx(std::sqrt(0.5) * (1.0 + 1.0 / 120.0)).epsilon(1e-14));
  CHECK(profile_phi(std::sqrt(10.0), 10.0, 3.0) == doctest::Approx(0.6605462).epsilon(1e-6));

  const double p = 3.0, h = 1e-4;
  for (double y : {-4.0, 0.3, 2.2}) {
    for (double s : {6.0, 25.0}) {
      const auto j = profile_phi_jet(y, s, p);
      CHECK(j.phi == doctest::Approx(profile_phi(y, s, p)));
      CHECK(j.dy == doctest::Approx((profile_phi(y + h, s, p) - profile_phi(y - h, s, p)) / (2 * h)).epsilon(1e-6));
      CHECK(j.dyy == doctest::Approx((profile_phi(y + h, s, p) - 2 * profile_phi(y, s, p) + profile_phi(y - h, s, p)) /
                                     (h * h))
                         .epsilon(1e-4));
      CHECK(j.ds == doctest::Approx((profile_phi(y, s + h, p) - profile_phi(y, s - h, p)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("profile_fm is even and decays like |z|^{-2m/(p-1)}") {
  const double p = 3.0;
  CHECK(profile_fm(1.7, p, 2) == profile_fm(-1.7, p, 2));
  const double z = 50.0;
  CHECK(profile_fm(z, p, 2) * std::pow(z, 2.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("U_K0 solves u' = u^p from f(K0)") {
  const double p = 3.0, K0 = 2.0, h = 1e-6;
  CHECK(U_K0(0.0, p, K0) == doctest::Approx(profile_f(K0, p)).epsilon(1e-14));
  CHECK(U_K0(1.0, 3.0, 2.0) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
  for (double tau : {0.1, 0.5, 0.9}) {
    const double du = (U_K0(tau + h, p, K0) - U_K0(tau - h, p, K0)) / (2 * h);
    CHECK(du == doctest::Approx(std::pow(U_K0(tau, p, K0), p)).epsilon(1e-7));
  }
}

TEST_CASE("final profiles") {
  CHECK(u_star_as_printed(0.1, 3.0) == doctest::Approx(0.161425).epsilon(1e-5));
  // the two forms are reciprocal up to ((p-1)^2/(8p))^{-2/(p-1)}
  const double p = 3.0;
  const double c = std::pow((p - 1.0) * (p - 1.0) / (8.0 * p), -2.0 / (p - 1.0));
  for (double th : {0.01, 0.05, 0.2, 0.5}) CHECK(u_star(th, p) * u_star_as_printed(th, p) == doctest::Approx(c));
  CHECK(u_star(0.01, p) > u_star(0.02, p));
  CHECK(u_star(-0.1, p) == doctest::Approx(u_star(0.1, p)));
}

TEST_CASE("chi0 cut-off") {
  CHECK(chi0(0.0) == 1.0);
  CHECK(chi0(1.0) == 1.0);
  CHECK(chi0(-0.99) == 1.0);
  CHECK(chi0(2.0) == 0.0);
  CHECK(chi0(3.5) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = chi0(1.0 + i / 100.0);
    CHECK(v <= prev + 1e-15);
    CHECK(v >= 0.0);
    prev = v;
  }
  const double h = 1e-5;
  for (double xi : {1.2, 1.5, -1.7}) {
    const auto j = chi0_jet(xi);
    CHECK(j.value == doctest::Approx(chi0(xi)));
    CHECK(j.d1 == doctest::Approx((chi0(xi + h) - chi0(xi - h)) / (2 * h)).epsilon(1e-6));
    CHECK(j.d2 == doctest::Approx((chi0(xi + h) - 2 * chi0(xi) + chi0(xi - h)) / (h * h)).epsilon(1e-3));
  }
}

TEST_CASE("derived cut-offs") {
  const double eps0 = 0.78;
  CHECK(chi(0.0, 5.0, eps0) == 1.0);
  CHECK(chi(3.0 * eps0 * std::exp(2.5), 5.0, eps0) == 0.0);
  CHECK(chi1(std::sqrt(16.0), 16.0, 1.0) == 1.0);
  CHECK(chi1(2.0 * std::sqrt(16.0), 16.0, 1.0) == 0.0);
  CHECK(chibar(0.0, eps0) == 0.0);
  CHECK(chibar(3.0, eps0) == 1.0);
  CHECK(chibar(0.3 + 2.0 * std::numbers::pi, eps0) == doctest::Approx(chibar(0.3, eps0)));

  const double h = 1e-5, y = 1.7 * eps0 * std::exp(2.5), s = 5.0;
  const auto j = chi_jet(y, s, eps0);
  CHECK(j.dy == doctest::Approx((chi(y + h, s, eps0) - chi(y - h, s, eps0)) / (2 * h)).epsilon(1e-5));
  CHECK(j.ds == doctest::Approx((chi(y, s + h, eps0) - chi(y, s - h, eps0)) / (2 * h)).epsilon(1e-5));
  const auto b = chibar_jet(0.25, eps0);
  CHECK(b.d1 == doctest::Approx((chibar(0.25 + h, eps0) - chibar(0.25 - h, eps0)) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(0.5) == doctest::Approx(0.5));
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(-std::numbers::pi));
  CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2.0 * std::numbers::pi));
}

TEST_CASE("ProblemParams validation") {
  ProblemParams P;
  CHECK_NOTHROW(P.validate());
  CHECK(P.T() == doctest::Approx(std::exp(-5.0)));
  CHECK(P.kappa() == doctest::Approx(std::sqrt(0.5)));

  auto bad = P;
  bad.p = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = P;
  bad.eps0 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = P;
  bad.disc.safety = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = P;
  bad.grid_n = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
