#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "blowup/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  long long seed = -1;
  unsigned threads = 0;
  bool threads_set = false;
};

int run(const std::string& name, const Options& opt) {
  blowup::RunConfig cfg;
  try {
    if (!opt.config.empty()) cfg = blowup::RunConfig::load(opt.config);
    cfg.experiment = blowup::parse_experiment(name);
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.threads_set) cfg.threads = opt.threads;
  } catch (const blowup::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  blowup::Report rep;
  try {
    rep = blowup::run_experiment(cfg);
  } catch (const blowup::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  for (const auto& c : rep.checks)
    std::printf("%s  %-60s value=%.6g threshold=%.6g\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.threshold);
  for (const auto& f : rep.files) std::printf("wrote %s\n", (cfg.output_dir / f).string().c_str());

  const auto plots = blowup::emit_plots(cfg.output_dir);
  for (const auto& s : plots.scripts) std::printf("wrote %s\n", (cfg.output_dir / s).string().c_str());
  if (plots.scripts.empty()) std::cerr << "warning: no CSV found for plotting in " << cfg.output_dir << '\n';
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable single-point blow-up for u_t = u_thth + |u|^(p-1) u on the circle"};
  app.require_subcommand(1);
  Options opt;
  const char* names[] = {"check-spectral", "check-kernel", "simulate",    "shoot", "profile",
                         "final-profile",  "flatness",     "outer-bound", "perturb"};
  std::string chosen;
  for (const char* n : names) {
    auto* sub = app.add_subcommand(n, std::string("run the ") + n + " experiment");
    sub->add_option("--config", opt.config, "JSON configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "random seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", opt.threads, "worker threads (0: all cores)")
        ->each([&](const std::string&) { opt.threads_set = true; });
    sub->callback([&chosen, n] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(chosen, opt);
}
