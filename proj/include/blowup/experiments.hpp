#pragma once

// Experiment runner: JSON configuration, the check suites and the experiments
// behind each CLI subcommand, and plot-script emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "blowup/model.hpp"
#include "blowup/shooting.hpp"

namespace blowup {

/// Bad or incomplete configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  SpectralChecks,
  KernelChecks,
  Simulate,
  Shoot,
  Profile,
  FinalProfile,
  Flatness,
  OuterBound,
  Perturb
};
std::string to_string(Experiment e);
/// Accepts the CLI spelling ("check-spectral", ...) and the config spelling ("spectral-checks", ...).
Experiment parse_experiment(const std::string& name);

struct RunConfig {
  ProblemParams params;
  Experiment experiment = Experiment::Simulate;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 0;

  /// Shooting
  double s_max_offset = 4.0;  ///< s_max = s0 + s_max_offset
  double search_tol = 1e-6;
  int max_levels = 40;
  /// Newton polish of the search result up to s0 + polish_offset; ignored unless above s_max_offset.
  double polish_offset = 6.0;
  /// Accepted parameters; read from <output_dir>/shoot.json when absent.
  std::optional<Vec2> d_star;

  /// Simulate: "shooting" uses d_star, "constant" uses constant_value everywhere.
  std::string initial = "shooting";
  double constant_value = 1.0;

  std::vector<double> perturb_eps{1e-2, 1e-3, 1e-4};
  std::vector<double> flatness_theta{0.16, 0.08, 0.04, 0.02};

  /// Unknown keys anywhere raise ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::string experiment;
  std::vector<Check> checks;
  std::vector<std::string> files;  ///< written outputs, relative to output_dir
  bool passed() const;
  void add(std::string name, double value, double threshold, bool ok, std::string detail = {});
  nlohmann::ordered_json to_json() const;
};

// Check suites; each fills a report without touching the filesystem.
/// Hermite orthogonality (i, j <= 8) and eigenfunction residuals (m <= 6).
Report spectral_suite();
/// Mehler mass, composition and eigen-action identities for r in {0.1, 1}.
Report mehler_suite();
/// Decay of sup|R(., s)| for s in {25, 100, 400, 1600} under both readings of R.
Report residual_suite(double p = 3.0);
/// reconstruct(decompose(q)) on random smooth fields.
Report decomposition_suite(const ProblemParams& params, std::uint64_t seed, int fields = 100);
/// Constant data c on a coarse grid: numeric blow-up time against 1/((p-1) c^{p-1}).
Report ode_suite(double c = 1.0, double p = 3.0);
/// Moment and derivative ratios of K(s, sigma) and their stability under grid doubling.
Report kernel_suite(const ProblemParams& params);

/// Frozen constants for the kernel ratios. For m = 3 the free semigroup alone reaches
/// 1 + 8/sqrt(pi) at y = 0 as s - sigma grows.
inline constexpr double kKernelMomentConstant0 = 1.1;
inline constexpr double kKernelMomentConstant3 = 5.6;
inline constexpr double kKernelDerivativeConstant = 1.0;

/// The simulation from the accepted parameters shared by the profile experiments.
struct DstarRun {
  Vec2 d{0.0, 0.0};
  double T = 0.0;
  Trajectory trajectory;  ///< states at every frame time and at the extra checkpoints
  std::vector<double> s_of_state;
};
/// A resolution stop doubles the grid by cubic interpolation and continues, at most
/// params.disc.regrid_levels times.
DstarRun simulate_dstar(Vec2 d, const ProblemParams& params, std::vector<double> extra_times = {});

/// E(s, R) = sup over |y| <= R sqrt(s) of |W(y,s) - f(y/sqrt(s))| for one state.
double profile_error(const PeriodicField& u, double t, double T, double R, const ProblemParams& params);

// Experiments: write their files below cfg.output_dir and return the report.
Report run_spectral_checks(const RunConfig& cfg);
Report run_kernel_checks(const RunConfig& cfg);
Report run_simulate(const RunConfig& cfg);
Report run_shoot(const RunConfig& cfg);
Report run_profile(const RunConfig& cfg);
Report run_final_profile(const RunConfig& cfg);
Report run_flatness(const RunConfig& cfg);
Report run_outer_bound(const RunConfig& cfg);
Report run_perturb(const RunConfig& cfg);
Report run_experiment(const RunConfig& cfg);

/// d_star from the config or from <output_dir>/shoot.json; ConfigError tells to run shoot first.
Vec2 resolve_d_star(const RunConfig& cfg);

struct PlotEmission {
  std::vector<std::string> scripts;  ///< written, relative to the directory
  std::vector<std::string> missing;  ///< CSVs that were not found
};
/// Writes one matplotlib script per CSV present among profile, final_profile, modes,
/// winding, flatness and outer_bound.
PlotEmission emit_plots(const std::filesystem::path& dir);

}  // namespace blowup
