#pragma once

// Two-parameter shooting on (d0, d1): the parameter rectangle, its degree, the
// rescaled exit map and the quadrisection search for a trapped trajectory.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "blowup/model.hpp"
#include "blowup/similarity.hpp"
#include "blowup/solver.hpp"
#include "blowup/trap.hpp"

namespace blowup {

using Vec2 = std::array<double, 2>;

/// Parallelogram {center + a e0 + b e1 : |a|, |b| <= 1} in (d0, d1).
struct ParamRect {
  Vec2 center{0.0, 0.0};
  Vec2 e0{1.0, 0.0};
  Vec2 e1{0.0, 1.0};
  /// (q0, q1)(s0) = M (d0, d1) + offset.
  std::array<std::array<double, 2>, 2> M{};
  Vec2 offset{0.0, 0.0};

  Vec2 point(double a, double b) const;
  /// Largest distance between two corners.
  double diameter() const;
  /// Local offset of a child's center. Children have half-width 1 - kChildOffset, so
  /// neighbours overlap and a point on a midline lies inside some child.
  static constexpr double kChildOffset = 0.375;
  /// Child quadrant (i, j) in {0,1}^2 in local coordinates.
  ParamRect child(int i, int j) const;
  /// Half-widths of the axis-aligned box containing the parallelogram.
  Vec2 half_widths() const;
};

/// Everything recorded along one trajectory.
struct TrajectoryRun {
  std::vector<TrapRecord> records;
  ExitResult exit;
  std::vector<SimilarityFrame> frames;  ///< filled when requested
  Trajectory trajectory;                ///< states at the frame times
  bool valid = true;
  std::string error;
};

struct RunOptions {
  double s_max = 0.0;
  /// Frames recorded after the exit (for the transverse check).
  int frames_after_exit = 3;
  /// Extra frames at s0 + j frame_ds/8, j = 1..n, so that exits at s0 can be fitted.
  int initial_dense_frames = 4;
  bool keep_frames = false;
  bool keep_states = false;
};

/// Integrates from the initial data of (d0, d1), decomposes every frame_ds in s and
/// stops a few frames after the first exit or at s_max.
TrajectoryRun run_trajectory(double d0, double d1, const ProblemParams& params, const RunOptions& opt);

/// (q0, q1) at s0 of the initial data of (d0, d1).
Vec2 initial_modes(double d0, double d1, const ProblemParams& params);

/// Fits the affine map from three probe corners and returns the preimage of [-A/s0^2, A/s0^2]^2.
/// Throws std::runtime_error when the fit is singular.
ParamRect init_rectangle(const ProblemParams& params, double probe = 0.5);

/// Winding number of a closed polygon around 0 from its angle increments.
/// Throws std::runtime_error when a vertex lies within `min_radius` of 0.
int winding_number(const std::vector<Vec2>& loop, double min_radius = 1e-6);

/// Winding number of d -> map(d) along the boundary of rect, sampled at n points.
int degree_on_boundary(const ParamRect& rect, const std::function<Vec2(Vec2)>& map, int n_samples);
/// Same with the map d -> (q0, q1)(s0) / (A/s0^2).
int degree_on_boundary(const ParamRect& rect, const ProblemParams& params, int n_samples);

struct PhiSample {
  Vec2 d{0.0, 0.0};
  double s_star = 0.0;
  Vec2 phi{0.0, 0.0};  ///< (s*^2 q0 / A, s*^2 q1 / A) at the exit
  Component violated = Component::none;
  int omega = 0;
  bool trapped = false;  ///< still inside at s_max
  bool valid = true;
  Vec2 late{0.0, 0.0};   ///< (q0, q1) at the last record
  std::optional<TransverseResult> transverse;

  /// Direction used for winding numbers: phi at an exit, the late (q0, q1) direction when trapped.
  /// A run that stops between frames while inside reports outer with phi from its last frame.
  Vec2 signature() const;
  /// Larger is better: s* for exits, s_max + 1 - |late|/bound for trapped samples.
  double score(double s_max, const ProblemParams& params) const;
};

PhiSample evaluate_phi(Vec2 d, const ProblemParams& params, double s_max);

using SampleFn = std::function<PhiSample(Vec2)>;

struct LevelReport {
  ParamRect rect;
  int winding = 0;
  std::array<int, 4> child_winding{};
  int chosen = -1;
  double best_score = 0.0;
  Vec2 best_d{0.0, 0.0};
  std::size_t evaluations = 0;
};

struct SearchResult {
  Vec2 d_star{0.0, 0.0};
  double s_star = 0.0;
  bool trapped = false;
  bool degraded = false;
  std::vector<LevelReport> levels;
  std::vector<PhiSample> boundary_exits;  ///< samples on the outer rectangle's boundary
};

struct SearchOptions {
  double s_max = 0.0;
  double tol = 1e-6;
  int max_levels = 40;
  /// Rounds of midpoint insertion along a boundary loop.
  int max_refinements = 5;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Quadrisection into overlapping children, keeping the first (fixed order) whose boundary
/// winds once under the exit signature. Stops at a sample trapped through s_max, at a
/// diameter below tol, or (degraded) when no child winds once.
SearchResult search(const ParamRect& rect, const SampleFn& sample, const SearchOptions& opt,
                    const ProblemParams& params);
SearchResult search(const ParamRect& rect, const ProblemParams& params, const SearchOptions& opt);

struct PolishStep {
  Vec2 d{0.0, 0.0};
  double s_trapped = 0.0;  ///< exit time, or the horizon when still inside
  double s_eval = 0.0;     ///< time at which (q0, q1) were matched
  double residual = 0.0;   ///< max(|q0|, |q1|) / (A/s_eval^2) before the step
};

struct PolishResult {
  Vec2 d{0.0, 0.0};
  double s_trapped = 0.0;
  bool trapped = false;  ///< inside through the horizon
  double residual = 0.0; ///< max(|q0|, |q1|) / (A/s^2) at the last frame
  std::vector<PolishStep> steps;
};

/// Newton steps on d -> (q0, q1)(s_c), with s_c the latest frame where both are within 0.2 A/s^2
/// before the exit, and the Jacobian
/// from two perturbed runs along the unstable directions scaled by e^{s_c-s0}, e^{(s_c-s0)/2}.
/// A step (halved up to three times) is kept if it lengthens the trapped interval or lowers the
/// residual at the last frame; iteration ends once trapped through the horizon with that residual
/// below 1e-2.
PolishResult polish(Vec2 d, const ParamRect& rect, const ProblemParams& params, double s_horizon,
                    int max_iterations = 10, unsigned threads = 0);

/// Evaluates fn(i) for i in [0, n) on a worker pool; results are stored by index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Smooth random periodic bump sum_{k=1..4} a_k cos k theta + b_k sin k theta with sup 1.
PeriodicField random_bump(std::size_t n, std::uint64_t seed);

struct PerturbationRow {
  double eps = 0.0;
  double T_est = 0.0;
  double theta_blowup = 0.0;
  double drift_T = 0.0;
  double drift_theta = 0.0;
  int peaks = 0;
  bool low_confidence = false;
};

/// Runs u0 + eps bump for each eps (0 first) to the resolved blow-up threshold.
std::vector<PerturbationRow> perturbation_experiment(Vec2 d_star, const ProblemParams& params,
                                                     const std::vector<double>& eps, std::uint64_t seed,
                                                     unsigned threads = 0);

/// Largest sup norm the grid resolves: kappa tau^{-1/(p-1)} where sqrt(tau |log tau|)
/// equals resolution_cells grid cells, capped by blowup_threshold.
double resolved_sup_threshold(const ProblemParams& params);

/// Number of separated clusters of nodes where |u| >= max|u| / 2.
int count_peaks(const PeriodicField& field);

}  // namespace blowup
