#include "blowup/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "blowup/io.hpp"
#include "blowup/similarity.hpp"

namespace blowup {
namespace {

double rho(double y) { return std::exp(-0.25 * y * y) / std::sqrt(4.0 * std::numbers::pi); }

// Solves a tridiagonal system in place; lo/di/up are the sub-, main and super-diagonals.
void thomas(std::vector<double>& lo, std::vector<double>& di, std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

void check_regime(double s, double sigma) {
  if (!(sigma >= 1.0 && s >= sigma && s <= 2.0 * sigma))
    throw std::invalid_argument("kernel regime requires 1 <= sigma <= s <= 2 sigma");
}

}  // namespace

double Polynomial::operator()(double y) const {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) v = v * y + static_cast<double>(coeffs[k]);
  return v;
}

double Polynomial::derivative(double y, int order) const {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > static_cast<std::size_t>(order);) {
    double f = 1.0;
    for (int j = 0; j < order; ++j) f *= static_cast<double>(k - static_cast<std::size_t>(j));
    v = v * y + f * static_cast<double>(coeffs[k]);
  }
  return v;
}

Polynomial hermite_h(int m) {
  if (m < 0 || m > 20) throw std::invalid_argument("hermite_h supports 0 <= m <= 20");
  Polynomial p;
  p.coeffs.assign(static_cast<std::size_t>(m) + 1, 0);
  // m!/(n!(m-2n)!) built incrementally: c_{n+1} = -c_n (m-2n)(m-2n-1)/(n+1).
  std::int64_t c = 1;
  for (int n = 0; 2 * n <= m; ++n) {
    p.coeffs[static_cast<std::size_t>(m - 2 * n)] = c;
    c = -c * (m - 2 * n) * (m - 2 * n - 1) / (n + 1);
  }
  return p;
}

HermiteBasis::HermiteBasis(int max_m) {
  if (max_m < 0 || max_m > 20) throw std::invalid_argument("HermiteBasis supports 0 <= max_m <= 20");
  for (int m = 0; m <= max_m; ++m) polys_.push_back(hermite_h(m));
}

double HermiteBasis::value(int m, double y) const {
  if (m < 0 || m > max_m()) throw std::out_of_range("Hermite index out of range");
  double hm1 = 0.0, h = 1.0;
  for (int k = 0; k < m; ++k) {
    const double next = y * h - 2.0 * k * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

double HermiteBasis::norm2(int m) { return std::ldexp(std::tgamma(m + 1.0), m); }

namespace {

// Gauss-Hermite nodes x and weights w for e^{-x^2}, in extended precision.
std::pair<std::vector<long double>, std::vector<long double>> gauss_hermite_ld(int n) {
  if (n < 2) throw std::invalid_argument("Gauss-Hermite rule needs at least 2 nodes");
  using ld = long double;
  std::vector<ld> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const ld pim4 = std::pow(std::numbers::pi_v<ld>, -0.25L);
  // Orthonormal Hermite recurrence; returns p_n(z) and p_n'(z).
  auto eval = [&](ld z) {
    ld p1 = pim4, p2 = 0.0L;
    for (int j = 0; j < n; ++j) {
      const ld p3 = p2;
      p2 = p1;
      p1 = z * std::sqrt(2.0L / (j + 1)) * p2 - std::sqrt(static_cast<ld>(j) / (j + 1)) * p3;
    }
    return std::pair<ld, ld>{p1, std::sqrt(2.0L * n) * p2};
  };
  const int half = (n + 1) / 2;
  ld z = 0.0L;
  for (int i = 0; i < half; ++i) {
    if (i == 0) z = std::sqrt(2.0L * n + 1) - 1.85575L * std::pow(2.0L * n + 1, -1.0L / 6.0L);
    else if (i == 1) z -= 1.14L * std::pow(static_cast<ld>(n), 0.426L) / z;
    else if (i == 2) z = 1.86L * z - 0.86L * x[0];
    else if (i == 3) z = 1.91L * z - 0.91L * x[1];
    else z = 2.0L * z - x[static_cast<std::size_t>(i - 2)];
    for (int it = 0; it < 100; ++it) {
      const auto [p, pp] = eval(z);
      const ld dz = p / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-18L * std::max(1.0L, std::abs(z))) break;
    }
    const ld pp = eval(z).second;
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0L / (pp * pp);
  }
  return {x, w};
}

}  // namespace

WeightedQuadrature WeightedQuadrature::gauss_hermite(int n) {
  const auto [x, w] = gauss_hermite_ld(n);
  WeightedQuadrature q;
  // y = 2x maps e^{-x^2} dx / sqrt(pi) onto rho(y) dy.
  for (int i = n - 1; i >= 0; --i) {
    q.nodes.push_back(static_cast<double>(2.0L * x[static_cast<std::size_t>(i)]));
    q.weights.push_back(
        static_cast<double>(w[static_cast<std::size_t>(i)] / std::sqrt(std::numbers::pi_v<long double>)));
  }
  return q;
}

double hermite_gram(int i, int j, int n) {
  if (i < 0 || j < 0 || i + j >= 2 * n) throw std::invalid_argument("hermite_gram: rule not exact for this pair");
  const auto [x, w] = gauss_hermite_ld(n);
  auto h = [](int m, long double y) {
    long double a = 1.0L, b = y;
    if (m == 0) return a;
    for (int k = 1; k < m; ++k) {
      const long double c = y * b - 2.0L * k * a;
      a = b;
      b = c;
    }
    return b;
  };
  long double acc = 0.0L;
  for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * h(i, 2.0L * x[k]) * h(j, 2.0L * x[k]);
  return static_cast<double>(acc / std::sqrt(std::numbers::pi_v<long double>));
}

WeightedQuadrature WeightedQuadrature::trapezoid(std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("trapezoid rule needs at least two nodes");
  WeightedQuadrature q;
  const double dy = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double end = (i == 0 || i + 1 == grid.size()) ? 0.5 : 1.0;
    q.nodes.push_back(grid[i]);
    q.weights.push_back(end * dy * rho(grid[i]));
  }
  return q;
}

double inner_rho(const std::function<double(double)>& f, const std::function<double(double)>& g,
                 const WeightedQuadrature& quad) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < quad.size(); ++i)
    acc += static_cast<long double>(quad.weights[i]) * f(quad.nodes[i]) * g(quad.nodes[i]);
  return static_cast<double>(acc);
}

double inner_rho(std::span<const double> f, std::span<const double> g, const WeightedQuadrature& quad) {
  if (f.size() != quad.size() || g.size() != quad.size())
    throw std::invalid_argument("inner_rho: sample count does not match the quadrature");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < quad.size(); ++i) acc += static_cast<long double>(quad.weights[i]) * f[i] * g[i];
  return static_cast<double>(acc);
}

std::vector<double> apply_L(std::span<const double> f, std::span<const double> grid) {
  if (f.size() != grid.size()) throw std::invalid_argument("apply_L: size mismatch");
  const std::size_t n = f.size();
  const double dy = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  std::vector<double> d1(n), d2(n), out(n);
  uniform_derivatives(f, dy, d1, d2);
  for (std::size_t i = 0; i < n; ++i) out[i] = d2[i] - 0.5 * grid[i] * d1[i] + f[i];
  return out;
}

double apply_L(const Polynomial& poly, double y) {
  return poly.derivative(y, 2) - 0.5 * y * poly.derivative(y, 1) + poly(y);
}

std::vector<double> ModeDecomposition::reconstruct() const {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double yy = y[i];
    out[i] = q0 + q1 * yy + q2 * (yy * yy - 2.0) + q_minus[i] + q_e[i];
  }
  return out;
}

ModeDecomposition decompose(std::span<const double> q, std::span<const double> y, double s,
                            const ProblemParams& params) {
  if (q.size() != y.size()) throw std::invalid_argument("decompose: size mismatch");
  if (!(s > 0.0)) throw std::invalid_argument("decompose requires s > 0");
  const double support = 2.0 * params.K0 * std::sqrt(s);
  if (y.size() < 2 || y.front() > -support || y.back() < support)
    throw std::invalid_argument("decompose: grid does not cover |y| <= 2 K0 sqrt(s)");
  const auto quad = WeightedQuadrature::trapezoid(y);
  ModeDecomposition d;
  d.s = s;
  d.y.assign(y.begin(), y.end());
  d.chi1.resize(y.size());
  std::vector<double> inner(y.size());
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    d.chi1[i] = chi1(y[i], s, params.K0);
    inner[i] = d.chi1[i] * q[i];
    const double wq = quad.weights[i] * inner[i];
    m0 += wq;
    m1 += wq * y[i];
    m2 += wq * (y[i] * y[i] - 2.0);
  }
  d.q0 = m0;
  d.q1 = m1 / HermiteBasis::norm2(1);
  d.q2 = m2 / HermiteBasis::norm2(2);
  d.q_minus.resize(y.size());
  d.q_e.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double yy = y[i];
    d.q_minus[i] = inner[i] - (d.q0 + d.q1 * yy + d.q2 * (yy * yy - 2.0));
    d.q_e[i] = (1.0 - d.chi1[i]) * q[i];
  }
  return d;
}

ModeDecomposition decompose(const SimilarityFrame& frame, const ProblemParams& params) {
  return decompose(frame.q, frame.y, frame.s, params);
}

double mehler_kernel(double r, double y, double x) {
  if (!(r > 0.0)) throw std::invalid_argument("mehler_kernel requires r > 0");
  const double a = -std::expm1(-r);
  const double d = y * std::exp(-0.5 * r) - x;
  return std::exp(r) / std::sqrt(4.0 * std::numbers::pi * a) * std::exp(-d * d / (4.0 * a));
}

std::vector<double> KernelGrid::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = node(i);
  return out;
}

KernelGrid KernelGrid::for_regime(double s, const ProblemParams& params, double target_dy) {
  KernelGrid g;
  g.half_width = std::max(20.0, 4.0 * params.K0 * std::sqrt(s));
  g.n = 2 * static_cast<int>(std::ceil(g.half_width / target_dy)) + 1;
  return g;
}

std::vector<double> perturbed_semigroup_K(double s, double sigma, std::span<const double> g,
                                          const KernelGrid& grid, const ProblemParams& params,
                                          KernelPotential potential, int steps) {
  check_regime(s, sigma);
  if (static_cast<int>(g.size()) != grid.n) throw std::invalid_argument("perturbed_semigroup_K: size mismatch");
  if (steps < 1) throw std::invalid_argument("perturbed_semigroup_K: steps must be positive");
  std::vector<double> psi(g.begin(), g.end());
  if (s == sigma) return psi;
  const std::size_t n = psi.size();
  const double dy = grid.dy();
  const double dt = (s - sigma) / steps;
  const auto y = grid.nodes();
  psi.front() = psi.back() = 0.0;

  std::vector<double> lo(n), di(n), up(n), rhs(n), V(n, 0.0);
  for (int k = 0; k < steps; ++k) {
    const double tau_mid = sigma + (k + 0.5) * dt;
    if (potential == KernelPotential::Profile)
      for (std::size_t i = 0; i < n; ++i) V[i] = potential_V(y[i], tau_mid, params.p);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || i + 1 == n) {
        lo[i] = up[i] = 0.0;
        di[i] = 1.0;
        rhs[i] = 0.0;
        continue;
      }
      const double a_lo = 1.0 / (dy * dy) + 0.25 * y[i] / dy;
      const double a_up = 1.0 / (dy * dy) - 0.25 * y[i] / dy;
      const double a_di = -2.0 / (dy * dy) + 1.0 + V[i];
      const double Apsi = a_lo * psi[i - 1] + a_di * psi[i] + a_up * psi[i + 1];
      rhs[i] = psi[i] + 0.5 * dt * Apsi;
      lo[i] = -0.5 * dt * a_lo;
      up[i] = -0.5 * dt * a_up;
      di[i] = 1.0 - 0.5 * dt * a_di;
    }
    thomas(lo, di, up, rhs);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(rhs[i])) throw std::runtime_error("perturbed_semigroup_K: non-finite value (stiffness failure)");
    }
    psi.swap(rhs);
  }
  return psi;
}

double kernel_moment_check(int m, double s, double sigma, const KernelGrid& grid, const ProblemParams& params,
                           KernelPotential potential, double y_max) {
  if (m < 0 || m > 4) throw std::invalid_argument("kernel_moment_check supports 0 <= m <= 4");
  const auto y = grid.nodes();
  std::vector<double> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) g[i] = 1.0 + std::pow(std::abs(y[i]), m);
  const auto out = perturbed_semigroup_K(s, sigma, g, grid, params, potential);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) > y_max) continue;
    worst = std::max(worst, std::abs(out[i]) / (std::exp(s - sigma) * g[i]));
  }
  return worst;
}

double kernel_derivative_bound(double s, double sigma, double g_sup, double xg_sup) {
  const double r = s - sigma;
  if (!(r > 0.0)) throw std::invalid_argument("kernel_derivative_bound requires s > sigma");
  const double eh = std::exp(0.5 * r);
  return std::exp(r) * (g_sup / std::sqrt(-std::expm1(-r)) +
                        r / s * (1.0 + r) * ((1.0 + eh) * xg_sup + eh * g_sup));
}

double kernel_derivative_check(std::span<const double> g, double s, double sigma, const KernelGrid& grid,
                               const ProblemParams& params, KernelPotential potential, double y_max) {
  if (static_cast<int>(g.size()) != grid.n) throw std::invalid_argument("kernel_derivative_check: size mismatch");
  const auto y = grid.nodes();
  const std::size_t n = g.size();
  const double dy = grid.dy();
  double g_sup = 0.0, xg_sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g_sup = std::max(g_sup, std::abs(g[i]));
    xg_sup = std::max(xg_sup, std::abs(y[i] * g[i]));
  }
  if (g_sup == 0.0) return 0.0;
  std::vector<double> dg(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) dg[i] = (g[i + 1] - g[i - 1]) / (2.0 * dy);
  const auto out = perturbed_semigroup_K(s, sigma, dg, grid, params, potential);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(y[i]) <= y_max) sup = std::max(sup, std::abs(out[i]));
  return sup / kernel_derivative_bound(s, sigma, g_sup, xg_sup);
}

double kernel_pointwise_constant(std::span<const double> g, double s, double sigma, const KernelGrid& grid,
                                 const ProblemParams& params, double y_max, double floor) {
  const auto y = grid.nodes();
  const auto Kg = perturbed_semigroup_K(s, sigma, g, grid, params, KernelPotential::Profile);
  const double r = s - sigma;
  const double dy = grid.dy();
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) > y_max) continue;
    double bound = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) bound += mehler_kernel(r, y[i], y[j]) * std::abs(g[j]) * dy;
    if (bound < floor) continue;
    worst = std::max(worst, std::abs(Kg[i]) / bound);
  }
  return worst;
}

void write_decomposition_header(std::ostream& os) {
  CsvWriter(os).header({"s [1]", "q0 [1]", "q1 [1]", "q2 [1]", "sup_qminus_over_1_plus_y3 [1]", "sup_qe [1]"});
}

void write_decomposition_row(std::ostream& os, const ModeDecomposition& d, double K0) {
  const double window = 2.0 * K0 * std::sqrt(d.s);
  double qm = 0.0, qe = 0.0;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    const double ay = std::abs(d.y[i]);
    if (ay <= window) qm = std::max(qm, std::abs(d.q_minus[i]) / (1.0 + ay * ay * ay));
    qe = std::max(qe, std::abs(d.q_e[i]));
  }
  CsvWriter(os).row({d.s, d.q0, d.q1, d.q2, qm, qe});
}

}  // namespace blowup
