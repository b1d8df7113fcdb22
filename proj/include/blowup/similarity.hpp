#pragma once

// Self-similar view y = theta/sqrt(T-t), s = -log(T-t), W = (T-t)^{1/(p-1)} u,
// and the terms of the equation satisfied by q = W chi - phi.

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "blowup/model.hpp"
#include "blowup/solver.hpp"

namespace blowup {

struct SimilarityFrame {
  double s = 0.0;
  double tau = 0.0;  ///< T - t
  double p = 3.0;
  double eps0 = 0.75;
  std::vector<double> y;
  std::vector<double> W;
  std::vector<double> w;
  std::vector<double> q;
  /// Field the frame was built from; W beyond the stored extent is read from it.
  std::shared_ptr<const PeriodicField> source;

  std::size_t size() const { return y.size(); }
  /// W at any y: cubic interpolation on the stored grid, the source field beyond it.
  double W_at(double y) const;
  /// q at any y, computed from W_at.
  double q_at(double y) const;
  /// Largest |y| covered by the stored grid.
  double extent() const { return y.empty() ? 0.0 : std::min(-y.front(), y.back()); }
};

/// Half-width of the stored y-grid: max(20, y_halfwidth_mult 2 K0 sqrt(s)), capped at pi e^{s/2}.
double frame_halfwidth(double s, const ProblemParams& params);

/// Frame on the image of the theta nodes (Delta y = Delta theta e^{s/2}); no interpolation.
SimilarityFrame to_similarity(const PeriodicField& field, double t, double T, const ProblemParams& params);
/// Frame on a caller-supplied increasing y-grid, with periodic cubic interpolation in theta.
SimilarityFrame to_similarity(const PeriodicField& field, double t, double T, const ProblemParams& params,
                              std::span<const double> y_grid);
/// Samples u = (T-t)^{-1/(p-1)} W(theta/sqrt(T-t)) back on an n-point theta grid.
PeriodicField from_similarity(const SimilarityFrame& frame, std::size_t n);

/// p phi^{p-1} - p/(p-1).
double potential_V(double y, double s, double p);
/// |phi+q|^{p-1}(phi+q) - phi^p - p phi^{p-1} q.
double nonlinear_B(double q, double phi, double p);

enum class RReading {
  PhiPower,          ///< + phi^p, consistent with the W equation
  PhiPowerMinusOne,  ///< + phi^{p-1}, the exponent as printed
};

/// d_yy phi - y d_y phi / 2 - phi/(p-1) + phi^p - d_s phi with closed-form derivatives.
double residual_R(double y, double s, double p, RReading reading = RReading::PhiPower);
/// sup over |y| <= ymax of |R(y,s)| on a uniform sample of `samples` points.
double residual_R_sup(double s, double p, RReading reading, double ymax, int samples = 4001);

struct QEquationTerms {
  std::vector<double> V, B, R, H, G, F;
  /// F from the expanded form W(d_s chi - d_yy chi + y d_y chi/2) - 2 d_y chi d_y W + |W|^{p-1} W (chi - chi^p).
  std::vector<double> F_direct;
};

QEquationTerms boundary_terms(const SimilarityFrame& frame, const ProblemParams& params);

/// Fourth-order first and second derivatives on a uniform grid, one-sided near the ends.
void uniform_derivatives(std::span<const double> f, double dy, std::span<double> d1, std::span<double> d2);

/// (L + V) q + B + R + F at the nodes of `frame`.
std::vector<double> q_equation_rhs(const SimilarityFrame& frame, const ProblemParams& params);

struct QResidual {
  double residual = 0.0;  ///< sup |d_s q - (L+V) q - B - R - F| over the core window
  double scale = 0.0;     ///< sup |d_s q| + sup |(L+V) q| over the same window
};

/// Residual of the q equation on |y| <= 2 K0 sqrt(s) for every interior frame, with
/// d_s q from a three-point difference in s at fixed y.
QResidual q_equation_residual(std::span<const SimilarityFrame> frames, const ProblemParams& params);

/// CSV rows y, W, w, q, V, B, R, F.
void write_frame_csv(std::ostream& os, const SimilarityFrame& frame, const ProblemParams& params);

}  // namespace blowup
