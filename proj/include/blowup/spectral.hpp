#pragma once

// Hermite modes of L = d_yy - y d_y / 2 + 1 in L^2_rho, rho = e^{-y^2/4}/sqrt(4 pi),
// the mode decomposition of q and the linear kernels e^{rL} and K(s, sigma).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "blowup/model.hpp"

namespace blowup {

struct SimilarityFrame;

/// Integer polynomial, coeffs[k] multiplies y^k.
struct Polynomial {
  std::vector<std::int64_t> coeffs;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator()(double y) const;
  double derivative(double y, int order = 1) const;
};

/// h_m(y) = sum_n m!/(n!(m-2n)!) (-1)^n y^{m-2n}, 0 <= m <= 20.
Polynomial hermite_h(int m);

class HermiteBasis {
 public:
  explicit HermiteBasis(int max_m = 20);
  int max_m() const { return static_cast<int>(polys_.size()) - 1; }
  const Polynomial& operator[](int m) const { return polys_.at(static_cast<std::size_t>(m)); }
  /// h_m(y) by the recurrence h_{m+1} = y h_m - 2m h_{m-1}.
  double value(int m, double y) const;
  /// <h_m, h_m>_rho = 2^m m!.
  static double norm2(int m);

 private:
  std::vector<Polynomial> polys_;
};

/// Nodes and weights for integrals against rho.
struct WeightedQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Gauss-Hermite rule rescaled to the weight rho (exact for polynomials of degree < 2n).
  static WeightedQuadrature gauss_hermite(int n = 128);
  /// Trapezoid rule on a uniform grid with rho folded into the weights.
  static WeightedQuadrature trapezoid(std::span<const double> uniform_grid);
  std::size_t size() const { return nodes.size(); }
};

/// <h_i, h_j>_rho by an n-point Gauss-Hermite rule evaluated in extended precision.
double hermite_gram(int i, int j, int n = 128);

double inner_rho(const std::function<double(double)>& f, const std::function<double(double)>& g,
                 const WeightedQuadrature& quad);
/// Inner product of two fields sampled on the quadrature nodes.
double inner_rho(std::span<const double> f, std::span<const double> g, const WeightedQuadrature& quad);

/// f'' - y f'/2 + f on a uniform grid (fourth-order differences).
std::vector<double> apply_L(std::span<const double> f, std::span<const double> uniform_grid);
/// L applied to a polynomial, exactly; returned as value at y.
double apply_L(const Polynomial& poly, double y);

struct ModeDecomposition {
  double s = 0.0;
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;
  std::vector<double> y;
  std::vector<double> chi1;
  std::vector<double> q_minus;
  std::vector<double> q_e;
  /// q rebuilt as q0 h0 + q1 h1 + q2 h2 + q_minus + q_e.
  std::vector<double> reconstruct() const;
};

/// q_m = <chi1 q, h_m>_rho / <h_m, h_m>_rho with the trapezoid rule on the uniform grid y;
/// q_minus = chi1 q - sum q_m h_m, q_e = (1 - chi1) q.
/// Throws std::invalid_argument when the grid does not cover |y| <= 2 K0 sqrt(s).
ModeDecomposition decompose(std::span<const double> q, std::span<const double> y, double s,
                            const ProblemParams& params);
ModeDecomposition decompose(const SimilarityFrame& frame, const ProblemParams& params);

/// e^{rL}(y, x) by Mehler's formula; rejects r <= 0.
double mehler_kernel(double r, double y, double x);

enum class KernelPotential {
  Zero,     ///< V = 0, K(s, sigma) = e^{(s - sigma) L}
  Profile,  ///< V = p phi^{p-1} - p/(p-1)
};

/// Uniform grid [-L, L] for the linear kernels.
struct KernelGrid {
  double half_width = 20.0;
  int n = 4001;
  double dy() const { return 2.0 * half_width / (n - 1); }
  double node(int i) const { return -half_width + dy() * i; }
  std::vector<double> nodes() const;
  /// Far field at max(20, 4 K0 sqrt(s)) with spacing close to `target_dy`.
  static KernelGrid for_regime(double s, const ProblemParams& params, double target_dy = 0.01);
};

/// psi(s - sigma) for d_tau psi = (L + V(., sigma + tau)) psi, psi(0) = g, psi = 0 at |y| = L.
/// Crank-Nicolson with dtau = (s - sigma)/steps, second-order differences in y.
/// Requires sigma <= s <= 2 sigma.
std::vector<double> perturbed_semigroup_K(double s, double sigma, std::span<const double> g,
                                          const KernelGrid& grid, const ProblemParams& params,
                                          KernelPotential potential = KernelPotential::Profile,
                                          int steps = 256);

/// max over |y| <= y_max of [K(s,sigma)(1+|x|^m)](y) / (e^{s-sigma}(1+|y|^m)).
double kernel_moment_check(int m, double s, double sigma, const KernelGrid& grid, const ProblemParams& params,
                           KernelPotential potential = KernelPotential::Profile, double y_max = 10.0);

/// Right-hand side of the derivative estimate with C = 1.
double kernel_derivative_bound(double s, double sigma, double g_sup, double xg_sup);

/// sup |K(s,sigma) d_x g| / kernel_derivative_bound over |y| <= y_max; g sampled on the grid.
/// d_x g is formed by summation by parts against the grid (centred differences).
double kernel_derivative_check(std::span<const double> g, double s, double sigma, const KernelGrid& grid,
                               const ProblemParams& params,
                               KernelPotential potential = KernelPotential::Profile, double y_max = 10.0);

/// Pointwise constant in |K g| <= C e^{(s-sigma)L}|g| over |y| <= y_max, with e^{rL}|g|
/// from Mehler's formula by quadrature on the grid. Points where the bound is below `floor` are skipped.
double kernel_pointwise_constant(std::span<const double> g, double s, double sigma, const KernelGrid& grid,
                                 const ProblemParams& params, double y_max = 10.0, double floor = 1e-8);

/// CSV header for decomposition series: s, q0, q1, q2, sup|q_minus/(1+|y|^3)|, sup|q_e|.
void write_decomposition_header(std::ostream& os);
void write_decomposition_row(std::ostream& os, const ModeDecomposition& d, double K0);

}  // namespace blowup
