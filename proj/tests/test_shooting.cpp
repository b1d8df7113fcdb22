#include "doctest.h"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "blowup/shooting.hpp"

using namespace blowup;

namespace {

ParamRect unit_rect() {
  ParamRect r;
  r.center = {0.0, 0.0};
  r.e0 = {1.0, 0.0};
  r.e1 = {0.0, 1.0};
  return r;
}

// Exit signature of an affine flow whose only fixed point is `root`.
SampleFn affine_flow(Vec2 root, double flip = 1.0) {
  return [root, flip](Vec2 d) {
    PhiSample s;
    s.d = d;
    const Vec2 v{2.0 * (d[0] - root[0]) + 0.5 * (d[1] - root[1]), flip * (d[1] - root[1]) - 0.3 * (d[0] - root[0])};
    const double n = std::max(std::abs(v[0]), std::abs(v[1]));
    s.phi = {v[0] / n, v[1] / n};
    s.s_star = 5.0 - std::log(n);
    s.violated = std::abs(v[0]) >= std::abs(v[1]) ? Component::q0 : Component::q1;
    return s;
  };
}

std::vector<Vec2> circle(int n, double r, bool clockwise = false) {
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) {
    const double a = (clockwise ? -1.0 : 1.0) * 2.0 * std::numbers::pi * k / n;
    out.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

}  // namespace

TEST_CASE("winding numbers of simple loops") {
  CHECK(winding_number(circle(12, 1.0)) == 1);
  CHECK(winding_number(circle(12, 1.0, true)) == -1);
  auto twice = circle(24, 2.0);
  for (auto& v : twice) {
    const double a = 2.0 * std::atan2(v[1], v[0]);
    v = {std::cos(a), std::sin(a)};
  }
  CHECK(winding_number(twice) == 2);
  auto shifted = circle(12, 1.0);
  for (auto& v : shifted) v[0] += 3.0;
  CHECK(winding_number(shifted) == 0);
  CHECK_THROWS_AS(winding_number(circle(8, 1e-9)), std::runtime_error);
}

TEST_CASE("degree of affine maps on a rectangle") {
  const auto r = unit_rect();
  CHECK(degree_on_boundary(r, [](Vec2 d) { return d; }, 64) == 1);
  CHECK(degree_on_boundary(r, [](Vec2 d) { return Vec2{d[0], -d[1]}; }, 64) == -1);
  CHECK(degree_on_boundary(r, [](Vec2 d) { return Vec2{d[0] + 5.0, d[1]}; }, 64) == 0);
  // orientation of the parallelogram is taken into account
  auto flipped = r;
  flipped.e1 = {0.0, -1.0};
  CHECK(degree_on_boundary(flipped, [](Vec2 d) { return d; }, 64) == 1);
}

TEST_CASE("ParamRect geometry and overlapping children") {
  ParamRect r;
  r.center = {1.0, -1.0};
  r.e0 = {2.0, 0.0};
  r.e1 = {0.5, 1.0};
  CHECK(r.point(1.0, 1.0)[0] == doctest::Approx(3.5));
  CHECK(r.point(-1.0, 0.0)[1] == doctest::Approx(-1.0));
  CHECK(r.half_widths()[0] == doctest::Approx(2.5));
  CHECK(r.half_widths()[1] == doctest::Approx(1.0));
  const auto c = r.child(1, 0);
  const double k = 1.0 - ParamRect::kChildOffset;
  CHECK(c.diameter() == doctest::Approx(k * r.diameter()));
  CHECK(c.center[0] == doctest::Approx(r.point(ParamRect::kChildOffset, -ParamRect::kChildOffset)[0]));
  // the midlines of the parent are interior to the children
  CHECK(c.point(-1.0, 1.0)[0] < r.center[0]);
}

TEST_CASE("search converges to the fixed point of a synthetic flow") {
  ProblemParams P;
  SearchOptions opt;
  opt.tol = 1e-6;
  opt.max_levels = 80;
  opt.threads = 2;
  const Vec2 root{0.3, -0.2};
  const auto res = search(unit_rect(), affine_flow(root), opt, P);
  CHECK_FALSE(res.degraded);
  CHECK_FALSE(res.trapped);
  CHECK(std::hypot(res.d_star[0] - root[0], res.d_star[1] - root[1]) < 1e-6);
  REQUIRE_FALSE(res.levels.empty());
  CHECK(res.levels.front().winding == 1);
  CHECK(res.boundary_exits.size() == 16u);

  // the same map with reversed orientation has degree -1 and the search gives up
  const auto bad = search(unit_rect(), affine_flow(root, -1.0), opt, P);
  CHECK(bad.levels.front().winding == -1);
  CHECK(bad.degraded);
}

TEST_CASE("search stops at a trapped sample") {
  ProblemParams P;
  SearchOptions opt;
  opt.s_max = 7.0;
  opt.threads = 1;
  auto fn = [](Vec2 d) {
    PhiSample s;
    s.d = d;
    s.trapped = std::abs(d[0]) < 0.5 && std::abs(d[1]) < 0.5;
    s.s_star = s.trapped ? 7.0 : 5.5;
    s.late = {1e-3 * d[0], 1e-3 * d[1]};
    s.phi = {d[0], d[1]};
    return s;
  };
  const auto res = search(unit_rect(), fn, opt, P);
  CHECK(res.trapped);
  CHECK(std::abs(res.d_star[0]) < 0.5);
  CHECK(std::abs(res.d_star[1]) < 0.5);
}

TEST_CASE("PhiSample signature and score") {
  ProblemParams P;
  PhiSample s;
  s.phi = {1.0, -0.4};
  s.s_star = 6.0;
  CHECK(s.signature()[1] == doctest::Approx(-0.4));
  CHECK(s.score(9.0, P) == 6.0);
  s.trapped = true;
  s.s_star = 9.0;
  s.late = {0.0, -3e-2};
  CHECK(s.signature()[1] == doctest::Approx(-1.0));
  CHECK(s.score(9.0, P) == doctest::Approx(10.0 - 3e-2 * 81.0 / P.A));
  s.valid = false;
  CHECK(std::isinf(s.score(9.0, P)));
}

TEST_CASE("parameter rectangle maps onto the trap square") {
  ProblemParams P;
  P.grid_n = 2048;
  const auto rect = init_rectangle(P);
  const double B = P.A / (P.s0 * P.s0);
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) {
      const auto d = rect.point(a, b);
      const auto m = initial_modes(d[0], d[1], P);
      CHECK(std::abs(m[0]) / B == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(std::abs(m[1]) / B == doctest::Approx(1.0).epsilon(1e-8));
    }
  CHECK(degree_on_boundary(rect, P, 32) == 1);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 3, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("random bumps and peak counting") {
  const auto a = random_bump(256, 11);
  const auto b = random_bump(256, 11);
  const auto c = random_bump(256, 12);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.sup_norm() == doctest::Approx(1.0));

  auto one = PeriodicField::sample(512, [](double th) { return std::exp(-50.0 * th * th); });
  CHECK(count_peaks(one) == 1);
  auto wrapped = PeriodicField::sample(512, [](double th) { return std::exp(-50.0 * (std::abs(th) - 3.1) * (std::abs(th) - 3.1)); });
  CHECK(count_peaks(wrapped) == 1);
  auto two = PeriodicField::sample(512, [](double th) { return std::exp(-50.0 * (th - 1) * (th - 1)) + std::exp(-50.0 * (th + 1) * (th + 1)); });
  CHECK(count_peaks(two) == 2);
}

TEST_CASE("resolved sup threshold") {
  ProblemParams P;
  const double u = resolved_sup_threshold(P);
  CHECK(u <= P.disc.blowup_threshold);
  const double tau = std::pow(P.kappa() / u, P.p - 1.0);
  const double h = 2.0 * std::numbers::pi / P.grid_n;
  if (u < P.disc.blowup_threshold)
    CHECK(std::sqrt(tau * std::abs(std::log(tau))) == doctest::Approx(P.disc.resolution_cells * h).epsilon(1e-6));
}
