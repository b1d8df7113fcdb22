// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/experiments.hpp"
#include "blowup/shooting.hpp"

using namespace blowup;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string summarize(const Report& r) {
  std::ostringstream os;
  for (const auto& c : r.checks) {
    if (os.tellp() > 0) os << "; ";
    os << (c.passed ? "" : "[fail] ") << c.name << " = " << c.value << " (limit " << c.threshold << ")";
  }
  return os.str();
}

Outcome from_reports(std::initializer_list<const Report*> reports) {
  Outcome o{true, {}};
  for (const auto* r : reports) {
    o.passed = o.passed && r->passed();
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += summarize(*r);
  }
  return o;
}

Report timed(const std::function<Report()>& fn, double limit, const std::string& label) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r = fn();
  const double sec = seconds_since(t0);
  r.add(label, sec, limit, sec <= limit);
  return r;
}

RunConfig config_for(Experiment e, const fs::path& dir) {
  RunConfig c;
  c.experiment = e;
  c.output_dir = dir;
  c.seed = 1;
  return c;
}

std::vector<Report> run_all(const fs::path& dir, std::vector<double>& seconds) {
  fs::remove_all(dir);
  std::vector<Report> out;
  for (auto e : {Experiment::SpectralChecks, Experiment::KernelChecks, Experiment::Shoot, Experiment::Simulate,
                 Experiment::Profile, Experiment::FinalProfile, Experiment::Flatness, Experiment::OuterBound,
                 Experiment::Perturb}) {
    const auto t0 = std::chrono::steady_clock::now();
    out.push_back(run_experiment(config_for(e, dir)));
    seconds.push_back(seconds_since(t0));
  }
  emit_plots(dir);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

using Snapshot = std::map<std::string, std::string>;

Snapshot snapshot(const fs::path& dir) {
  Snapshot out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (ext == ".csv" || ext == ".json") out[e.path().filename().string()] = slurp(e.path());
  }
  return out;
}

Outcome compare(const Snapshot& a, const Snapshot& b) {
  Outcome o;
  o.detail = std::to_string(a.size()) + " files compared";
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end()) o.detail += ", missing on rerun: " + name;
    else if (it->second != bytes) o.detail += ", differs: " + name;
  }
  if (b.size() != a.size()) o.detail += ", file sets differ";
  o.passed = !a.empty() && a == b;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path(ACCEPTANCE_DIR);
  const ProblemParams P;
  std::vector<std::pair<std::string, Outcome>> results;
  auto record = [&](std::string name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s  %2zu. %s | %s\n", o.passed ? "PASS" : "FAIL", results.size() + 1, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    results.emplace_back(std::move(name), o);
  };

  record("spectral suite", [] { const auto r = spectral_suite(); return from_reports({&r}); });
  record("Mehler suite", [] { const auto r = mehler_suite(); return from_reports({&r}); });
  record("residual decay", [&] { const auto r = residual_suite(P.p); return from_reports({&r}); });
  record("ODE exactness", [&] { const auto r = ode_suite(1.0, 3.0); return from_reports({&r}); });
  record("decomposition identity", [&] { const auto r = decomposition_suite(P, 1, 100); return from_reports({&r}); });
  record("degree check", [&] {
    const auto r = timed(
        [&] {
          Report rep;
          const auto rect = init_rectangle(P);
          const int d64 = degree_on_boundary(rect, P, 64);
          const int d128 = degree_on_boundary(rect, P, 128);
          rep.add("degree, 64 samples", d64, 1, d64 == 1);
          rep.add("degree, 128 samples", d128, 1, d128 == 1);
          return rep;
        },
        180.0, "runtime [s]");
    return from_reports({&r});
  });

  const fs::path first = root / "run";
  std::vector<double> sec_a;
  std::vector<Report> reps;
  try {
    reps = run_all(first, sec_a);
  } catch (const std::exception& e) {
    std::printf("experiment run failed: %s\n", e.what());
  }
  auto by_name = [&](Experiment e) -> const Report* {
    for (const auto& r : reps)
      if (r.experiment == to_string(e)) return &r;
    return nullptr;
  };
  auto seconds_of = [&](Experiment e) {
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (reps[i].experiment == to_string(e)) return sec_a[i];
    return 0.0;
  };
  auto experiment_outcome = [&](Experiment e, double limit, std::initializer_list<Experiment> extra_time = {}) {
    const auto* r = by_name(e);
    if (!r) return Outcome{false, "not run"};
    Report copy = *r;
    double sec = seconds_of(e);
    for (auto x : extra_time) sec += seconds_of(x);
    copy.add("runtime [s]", sec, limit, sec <= limit);
    return from_reports({&copy});
  };

  record("shooting", [&] { return experiment_outcome(Experiment::Shoot, 300.0, {Experiment::Profile, Experiment::OuterBound}); });
  record("profile convergence", [&] { return experiment_outcome(Experiment::Profile, 300.0, {Experiment::Shoot}); });
  record("final profile", [&] { return experiment_outcome(Experiment::FinalProfile, 60.0); });
  record("outer region", [&] { return experiment_outcome(Experiment::OuterBound, 300.0, {Experiment::Shoot}); });
  record("kernel bounds", [&] {
    const auto r = timed([&] { return kernel_suite(P); }, 120.0, "total runtime [s]");
    return from_reports({&r});
  });
  record("determinism", [&] {
    const auto before = snapshot(first);
    std::vector<double> sec_b;
    run_all(first, sec_b);
    return compare(before, snapshot(first));
  });

  int failed = 0;
  for (const auto& [name, o] : results) failed += o.passed ? 0 : 1;
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
