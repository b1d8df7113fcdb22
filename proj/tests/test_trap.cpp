#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "blowup/trap.hpp"

using namespace blowup;

namespace {

TrapRecord quiet(double s) {
  TrapRecord r;
  r.s = s;
  return r;
}

}  // namespace

TEST_CASE("trap bounds at s = 10") {
  ProblemParams P;
  const auto b = trap_bounds(10.0, P);
  CHECK(b.q01 == doctest::Approx(0.2));
  CHECK(b.q2 == doctest::Approx(400.0 * std::log(10.0) / 100.0));
  CHECK(b.q_minus == doctest::Approx(0.2));
  CHECK(b.q_e == doctest::Approx(20.0 / std::sqrt(10.0)));
  CHECK(b.outer == doctest::Approx(P.eta0));
  CHECK_THROWS_AS(trap_bounds(1.0, P), std::invalid_argument);
}

TEST_CASE("evaluate reports the first violated component") {
  ProblemParams P;
  auto r = quiet(10.0);
  CHECK(evaluate(r, P).inside);

  r.q1 = -0.25;
  auto st = evaluate(r, P);
  CHECK_FALSE(st.inside);
  CHECK(st.violated == Component::q1);
  CHECK(st.omega == -1);
  CHECK(st.margins[1] == doctest::Approx(-0.05));

  r.q0 = 0.3;
  r.q_e_sup = 100.0;
  st = evaluate(r, P);
  CHECK(st.violated == Component::q0);
  CHECK(st.omega == 1);

  r = quiet(10.0);
  r.q_minus_weighted = 0.21;
  r.outer_sup = 5.0;
  st = evaluate(r, P);
  CHECK(st.violated == Component::q_minus);
  CHECK(st.omega == 0);

  r = quiet(10.0);
  r.outer_sup = 1.5;
  st = evaluate(r, P);
  CHECK(st.violated == Component::outer);
  CHECK(st.outer_margin == doctest::Approx(-0.5));
}

TEST_CASE("make_record weights q_minus inside the window only") {
  ProblemParams P;
  ModeDecomposition d;
  d.s = 4.0;
  d.q0 = 0.01;
  d.y = {-5.0, -1.0, 0.0, 1.0, 3.9};
  d.q_minus = {100.0, 2.0, 0.5, -4.0, 0.0};
  d.q_e = {0.0, 0.0, 0.0, 0.0, -0.7};
  const auto r = make_record(d, 0.25, P);
  CHECK(r.q0 == 0.01);
  CHECK(r.q_minus_weighted == doctest::Approx(2.0));
  CHECK(r.q_e_sup == doctest::Approx(0.7));
  CHECK(r.outer_sup == 0.25);
  const auto st = check_VKA(d, P);
  CHECK(st.violated == Component::q_minus);
}

TEST_CASE("first_exit bisects the crossing of a linear ramp") {
  ProblemParams P;
  // q0(s) = 0.1 (s - 5): crosses A/s^2 where 0.1 (s - 5) s^2 = 20
  std::vector<TrapRecord> recs;
  for (int k = 0; k <= 40; ++k) {
    auto r = quiet(5.0 + 0.1 * k);
    r.q0 = 0.1 * (r.s - 5.0);
    recs.push_back(r);
  }
  double lo = 5.0, hi = 9.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (0.1 * (m - 5.0) * m * m < 20.0 ? lo : hi) = m;
  }
  const auto ex = first_exit(recs, P, 1e-6);
  CHECK(ex.exited);
  CHECK(ex.status.violated == Component::q0);
  CHECK(ex.status.omega == 1);
  // linear interpolation of a smooth curve over 0.1 in s
  CHECK(ex.s_star == doctest::Approx(lo).epsilon(1e-3));

  std::vector<TrapRecord> calm{quiet(5.0), quiet(6.0)};
  const auto none = first_exit(calm, P);
  CHECK_FALSE(none.exited);
  CHECK(none.s_star == 6.0);
  CHECK_THROWS(first_exit(std::vector<TrapRecord>{}, P));
}

TEST_CASE("transverse_check recovers the slope of a quadratic") {
  std::vector<TrapRecord> recs;
  const double s_star = 6.0;
  for (int k = 0; k < 9; ++k) {
    auto r = quiet(5.5 + 0.125 * k);
    const double x = r.s - s_star;
    r.q1 = -0.01 - 0.3 * x + 0.2 * x * x;
    recs.push_back(r);
  }
  const auto t = transverse_check(recs, s_star, Component::q1, -1);
  CHECK(t.derivative == doctest::Approx(-0.3).epsilon(1e-10));
  CHECK(t.satisfied);
  CHECK(t.inetrans == doctest::Approx(std::abs(-0.3 + 0.5 * 0.01) * 36.0).epsilon(1e-8));
  CHECK_FALSE(transverse_check(recs, s_star, Component::q1, 1).satisfied);
  CHECK_THROWS_AS(transverse_check(recs, s_star, Component::q2, 1), std::invalid_argument);
  recs.resize(4);
  CHECK_THROWS_AS(transverse_check(recs, s_star, Component::q1, 1), std::invalid_argument);
}

TEST_CASE("outer region supremum") {
  ProblemParams P;
  auto f = PeriodicField::sample(400, [](double th) { return std::abs(th) < 0.3 ? 50.0 : 0.1 * std::cos(th); });
  CHECK(outer_sup(f, P.eps0) == doctest::Approx(0.1 * std::cos(P.eps0 / 2.0)).epsilon(2e-2));
  CHECK(check_outer(f, P) == doctest::Approx(P.eta0 - outer_sup(f, P.eps0)));
}

TEST_CASE("improved bounds and exit record") {
  ProblemParams P;
  auto r = quiet(10.0);
  r.q_e_sup = 1.0;
  const auto m = improved_bounds(r, P);
  CHECK(m.q2 == doctest::Approx(4.0 * std::log(10.0) - 1e-3));
  CHECK(m.q_e == doctest::Approx(10.0 / std::sqrt(10.0) - 1.0));

  ExitResult ex;
  ex.exited = true;
  ex.s_star = 7.25;
  ex.status.violated = Component::q0;
  ex.status.omega = -1;
  std::ostringstream os;
  write_exit_record(os, 0.5, -0.25, ex);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j["violated"] == "q0");
  CHECK(j["omega"] == -1);
  CHECK(j["s_star"].get<double>() == 7.25);
  CHECK(j["margins_at_exit"].contains("outer"));
  CHECK(to_string(Component::q_minus) == "q_minus");
}
