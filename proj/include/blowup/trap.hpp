#pragma once

// Membership in the shrinking set: the bounds on (q0, q1, q2, q_minus, q_e) and the
// outer-region bound on u, first exit and transverse crossing.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup/model.hpp"
#include "blowup/solver.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

enum class Component { none, q0, q1, q2, q_minus, q_e, outer };
std::string to_string(Component c);

/// Scalars of one frame that the trap bounds look at.
struct TrapRecord {
  double s = 0.0;
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;
  double q_minus_weighted = 0.0;  ///< sup over |y| <= 2 K0 sqrt(s) of |q_minus| / (1 + |y|^3)
  double q_e_sup = 0.0;
  double outer_sup = 0.0;         ///< sup over eps0/2 <= |theta| <= pi of |u|
};

TrapRecord make_record(const ModeDecomposition& dec, double outer_sup, const ProblemParams& params);

struct TrapBounds {
  double q01, q2, q_minus, q_e, outer;
};
/// A/s^2, A^2 log s/s^2, A/s^2 (weight 1+|y|^3 divided out), A/sqrt(s), eta0.
TrapBounds trap_bounds(double s, const ProblemParams& params);

struct TrapStatus {
  double s = 0.0;
  /// bound minus observed for q0, q1, q2, q_minus, q_e in that order.
  std::array<double, 5> margins{};
  double outer_margin = 0.0;
  bool inside = true;
  Component violated = Component::none;
  int omega = 0;  ///< sign of the violated q_m for m = 0, 1, 2; 0 otherwise
};

TrapStatus evaluate(const TrapRecord& r, const ProblemParams& params);

/// Margins of a decomposition; the outer constraint is reported at its bound eta0.
TrapStatus check_VKA(const ModeDecomposition& dec, const ProblemParams& params);

/// eta0 - sup over eps0/2 <= |theta| <= pi of |u|.
double check_outer(const PeriodicField& field, const ProblemParams& params);
double outer_sup(const PeriodicField& field, double eps0);

struct ExitResult {
  bool exited = false;   ///< false: still trapped at s_end
  double s_star = 0.0;   ///< exit time, or s_end for the sentinel
  TrapStatus status;
  std::size_t frame = 0; ///< first record outside the set (or the last record)
};

/// First frame where the set is left, refined by bisection on the linear interpolation
/// of the records until the bracket is at most ds_tol wide.
ExitResult first_exit(std::span<const TrapRecord> records, const ProblemParams& params, double ds_tol = 1e-3);

struct TransverseResult {
  double derivative = 0.0;  ///< dq_m/ds at s*
  bool satisfied = false;   ///< omega dq_m/ds > 0
  double inetrans = 0.0;    ///< |q_m' - (1 - m/2) q_m| s^2
};

/// Quadratic least-squares fit of q_m over the five records closest to s*.
/// Rejects fewer than five records or a component other than q0, q1.
TransverseResult transverse_check(std::span<const TrapRecord> records, double s_star, Component m, int omega);

/// Margins against the improved interior bounds: A^2 log s/s^2 - s^{-3} for q2 and
/// (A/2)/sqrt(s) for q_e.
struct ImprovedMargins {
  double q2, q_e;
};
ImprovedMargins improved_bounds(const TrapRecord& r, const ProblemParams& params);

/// One JSON line {d0, d1, s_star, violated, omega, margins_at_exit}.
void write_exit_record(std::ostream& os, double d0, double d1, const ExitResult& exit);

}  // namespace blowup
