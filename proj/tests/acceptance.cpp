// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [WORKDIR] [--strict]
//
// WORKDIR receives the two output trees compared by the determinism check.
// The exit status is 0 once every criterion has been evaluated; with
// --strict it is 1 when any criterion fails.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "lamination/counterexamples.hpp"
#include "lamination/currents.hpp"
#include "lamination/estimates.hpp"
#include "lamination/experiments.hpp"
#include "lamination/smoothing.hpp"

using namespace lam;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;

// Pinned tolerances.
constexpr double kSchwarzSeconds = 10.0;
constexpr double kCorollarySeconds = 10.0;
constexpr double kSweepSeconds = 120.0;
constexpr double kWedgeSeconds = 60.0;
constexpr double kSupRatio = 0.7;
constexpr double kFitResidual = 0.2;
constexpr double kSmallestDeltaError = 0.05;
constexpr double kPlateauTol = 1e-12;
constexpr double kWedgeTol = 1e-8;
constexpr double kControlFloor = 1e-3;
constexpr double kReconTol = 0.02;
constexpr double kRateLo = 1.0, kRateHi = 3.0;
constexpr double kObstructionFloor = 0.98;
constexpr double kExponentTol = 0.05;
constexpr double kGradientTol = 1e-5;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<std::pair<std::string, LeafFamily>> builtins() {
  return {{"product", LeafFamily::product()},
          {"shear", LeafFamily::shear(0.5)},
          {"exp", LeafFamily::exp(0.2)},
          {"nonlinear", LeafFamily::nonlinear(0.05)}};
}

Outcome schwarz() {
  const Timer t;
  const BatteryResult r = schwarz_battery(100000, kSeed, workers());
  const double s = t.seconds();
  return {r.samples == 100000 && r.violations == 0 && s < kSchwarzSeconds,
          fmt::format("{} samples, {} violations, worst ratio {:.4f}, {:.2f} s", r.samples,
                      r.violations, r.worst_ratio, s)};
}

Outcome corollary() {
  Outcome o;
  const Timer t;
  for (const auto& [key, fam] : builtins()) {
    const BatteryResult r = corollary_battery(fam, 10000, kSeed, workers());
    o.pass = o.pass && r.violations == 0;
    o.detail += fmt::format("{}: {} checked / {} skipped / {} violations; ", key, r.samples,
                            r.skipped, r.violations);
  }
  const double s = t.seconds();
  o.pass = o.pass && s < kCorollarySeconds;
  o.detail += fmt::format("{:.2f} s", s);
  return o;
}

Outcome separation() {
  Outcome o;
  const std::vector<double> deltas{0.2, 0.1, 0.05};
  for (const auto& [key, fam] : builtins()) {
    const double t0 = compute_t0(fam, deltas, 2, 1.0);
    double worst = INFINITY;
    for (const double d : deltas) {
      const SeparationReport r = separation_check(fam, d, t0, 1.0);
      o.pass = o.pass && r.pass && r.min_ratio >= 1.0;
      worst = std::min(worst, r.min_ratio);
    }
    o.pass = o.pass && t0 <= t0_cap();
    o.detail += fmt::format("{}: t0 {:.4f}, min gap/delta^2 {:.3f}; ", key, t0, worst);
  }
  return o;
}

Outcome convergence() {
  Outcome o;
  const Timer t;
  const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  for (const auto& [key, fam] :
       std::vector<std::pair<std::string, LeafFamily>>{{"shear", LeafFamily::shear(0.5)},
                                                       {"exp", LeafFamily::exp(0.2)},
                                                       {"nonlinear", LeafFamily::nonlinear(0.05)}}) {
    SweepOptions opt;
    opt.t0 = compute_t0(fam, {0.2, 0.1, 0.05}, 2, 1.0);
    opt.samples = {20000, kSeed};
    const SweepResult r = convergence_sweep(fam, Target::RePi, deltas, opt);
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
      worst_ratio = std::max(worst_ratio, r.rows[i].report.sup_err / r.rows[i - 1].report.sup_err);
    const ErrorReport& last = r.rows.back().report;
    const bool ok = worst_ratio <= kSupRatio && r.fit_residual <= kFitResidual &&
                    last.sup_err < kSmallestDeltaError && last.leaf_c1_err() < kSmallestDeltaError;
    o.pass = o.pass && ok;
    o.detail += fmt::format(
        "{}: sup ratio {:.3f}, fit {:.3g}, fit residual {:.3f}, smallest-delta errors {:.3g}/{:.3g}{}; ",
        key, worst_ratio, r.fit, r.fit_residual, last.sup_err, last.leaf_c1_err(), ok ? "" : " [FAIL]");
  }
  const double s = t.seconds();
  o.pass = o.pass && s < kSweepSeconds;
  o.detail += fmt::format("{:.2f} s", s);
  return o;
}

Outcome plateaus() {
  double plateau = 0.0, interp = 0.0, unity = 0.0;
  const CounterRng rng(kSeed, 5);
  for (const auto& [key, fam] : builtins()) {
    const double t0 = compute_t0(fam, {0.2, 0.1, 0.05}, 2, 1.0);
    for (const double delta : {0.2, 0.1, 0.05, 0.025}) {
      const GridSpec grid{delta, t0, 1.0};
      const auto phi = target_function(fam, Target::Composite);
      const Approximant psi = bump_interpolant(fam, phi, grid);
      const int n = grid.index_bound();
      for (int i = 0; i < 2000; ++i) {
        CounterRng r = rng.at(i);
        const int j = static_cast<int>(std::floor(r.uniform(-n, n + 1)));
        const int k = static_cast<int>(std::floor(r.uniform(-n, n + 1)));
        if (!grid.in_range(j, k)) continue;
        const Complex z = r.in_disc(t0);
        const Complex w = fam.value(grid.point(j, k), z);
        plateau = std::max(plateau, std::abs(glue_heights(fam, grid, z, w) - j * delta));
        interp = std::max(interp, std::abs(psi.value(z, w) - phi.value(z, w)));
        const double s = r.uniform(-2.0, 2.0);
        double sum = 0.0;
        const int j0 = static_cast<int>(std::floor(s / delta));
        for (int m = j0 - 1; m <= j0 + 2; ++m) sum += BumpLambda{delta, m}.value(s);
        unity = std::max(unity, std::abs(sum - 1.0));
      }
    }
  }
  return {plateau <= kPlateauTol && interp <= kPlateauTol && unity <= kPlateauTol,
          fmt::format("max |h - j delta| {:.2g}, max |psi - phi| at grid leaves {:.2g}, "
                      "max |sum Lambda - 1| {:.2g}",
                      plateau, interp, unity)};
}

Outcome wedge_defects() {
  const Timer t;
  const auto forms = form01_battery(10, kSeed);
  double worst = 0.0, weakest = INFINITY;
  for (const auto& [key, fam] : builtins()) {
    const WedgeForm control = fam.kind() == FamilyKind::Product ? WedgeForm::Dz : WedgeForm::Dw;
    for (std::uint64_t k = 0; k < 10; ++k) {
      const DirectedCurrent T =
          random_current(fam, 5, kSeed * 1000 + k, Complex(0.7, -0.3), Complex(1.5, 0.3));
      for (const auto& phi : forms) {
        const Quadrature quad = Quadrature::for_disc(64, phi.support.center, phi.support.radius);
        worst = std::max(worst, wedge_defect(T, phi, fam, quad));
        weakest = std::min(weakest, wedge_defect(T, phi, fam, quad, control));
      }
    }
  }
  const double s = t.seconds();
  return {worst <= kWedgeTol && weakest > kControlFloor && s < kWedgeSeconds,
          fmt::format("400 pairings, max lambda defect {:.2g}, min control defect {:.3g}, {:.2f} s",
                      worst, weakest, s)};
}

std::vector<double> reconstruction_residuals(std::size_t n, std::uint64_t seed) {
  const auto fam = LeafFamily::shear(0.5);
  const DirectedCurrent T(fam, {{{-1.0, -1.0}, 1.0},
                                {{1.0, -1.0}, 0.5},
                                {{0.0, 0.1}, 2.0},
                                {{-1.0, 1.0}, 1.5},
                                {{1.1, 1.2}, 0.8}});
  const Quadrature quad = Quadrature::for_disc(64, 0.0, 0.56);
  const Disintegration dis = disintegrate(fam, riesz_samples(T, fam, n, seed));
  std::vector<double> out;
  for (const auto& row : reconstruct_and_compare(T, dis, form11_battery(5, kSeed), fam, quad))
    out.push_back(row.residual);
  return out;
}

Outcome reconstruction() {
  const auto primary = reconstruction_residuals(100000, kSeed);
  const double worst = *std::max_element(primary.begin(), primary.end());
  auto rms = [](std::size_t n) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 1; seed <= 16; ++seed)
      for (const double r : reconstruction_residuals(n, seed)) {
        acc += r * r;
        ++count;
      }
    return std::sqrt(acc / count);
  };
  const double coarse = rms(100000), fine = rms(400000);
  const double rate = coarse / fine;
  return {worst <= kReconTol && rate >= kRateLo && rate <= kRateHi,
          fmt::format("max residual {:.4f} at 1e5 samples; rms over 16 seeds {:.4f} -> {:.4f} "
                      "at 4e5, ratio {:.2f}",
                      worst, coarse, fine, rate)};
}

Outcome obstruction() {
  double weakest = INFINITY;
  std::string id;
  for (const auto& cand : obstruction_candidates()) {
    const ObstructionReport r = approx_obstruction(cand);
    if (r.combined < weakest) {
      weakest = r.combined;
      id = r.candidate_id;
    }
  }
  const WitnessReport w = non_directedness_witness(10.0, {1e-2, 1e-3, 1e-4, 1e-5});
  double axis_spread = 0.0;
  for (const auto& row : w.rows)
    axis_spread = std::max(axis_spread, std::abs(row.axis_pairing / w.rows[0].axis_pairing - 1.0));
  return {weakest >= kObstructionFloor && std::abs(w.exponent - 1.0 / 3.0) <= kExponentTol &&
              axis_spread <= 1e-10,
          fmt::format("{} candidates, min 2 eta + eps {:.4f} ({}); witness exponent {:.5f}; axis "
                      "spread {:.1g}",
                      obstruction_candidates().size(), weakest, id, w.exponent, axis_spread)};
}

double gradient_mismatch(const Approximant& psi, Complex z, Complex w) {
  constexpr double h = 1e-6;
  const Gradient g = psi.gradient(z, w);
  const std::array<std::pair<Complex, Complex>, 4> dirs{
      {{1.0, 0.0}, {Complex(0, 1), 0.0}, {0.0, 1.0}, {0.0, Complex(0, 1)}}};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto [dz, dw] = dirs[i];
    const double fd =
        (psi.value(z + h * dz, w + h * dw) - psi.value(z - h * dz, w - h * dw)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return worst;
}

Outcome gradients() {
  double worst = 0.0;
  int count = 0;
  const CounterRng rng(kSeed, 9);
  auto sweep = [&](const Approximant& psi, const LeafFamily& fam, Complex center, double radius) {
    for (int i = 0; i < 1000; ++i) {
      CounterRng r = rng.at(i);
      const Complex z = r.in_disc(radius, center);
      worst = std::max(worst, gradient_mismatch(psi, z, fam.value(r.in_disc(1.0), z)));
    }
    ++count;
  };
  for (const auto& [key, fam] : builtins()) {
    const double t0 = compute_t0(fam, {0.2, 0.1, 0.05}, 2, 1.0);
    for (const double delta : {0.1, 0.05}) {
      const GridSpec grid{delta, t0, 1.0};
      sweep(leaf_constant_approximant(fam, Target::RePi, grid), fam, 0.0, 0.95 * t0);
      sweep(leaf_constant_approximant(fam, Target::ImPi, grid), fam, 0.0, 0.95 * t0);
      sweep(bump_interpolant(fam, target_function(fam, Target::Composite), grid), fam, 0.0,
            0.95 * t0);
    }
  }
  const auto shear = LeafFamily::shear(0.5);
  const PatchResult patch =
      patched_approximant(shear, target_function(shear, Target::Composite), 0.05, 0.3, 0.15, 1.0);
  sweep(patch.approx, shear, 0.0, 0.3);
  return {worst <= kGradientTol,
          fmt::format("{} approximants x 1000 points, max relative mismatch {:.2g}", count, worst)};
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[e.path().filename().string()] = {std::istreambuf_iterator<char>(in),
                                           std::istreambuf_iterator<char>()};
  }
  return files;
}

Outcome determinism(const fs::path& workdir) {
  std::vector<std::map<std::string, std::string>> runs;
  for (const unsigned jobs : {1u, 4u}) {
    ExperimentConfig cfg = default_config();
    cfg.seed = kSeed;
    cfg.jobs = jobs;
    cfg.out = workdir / fmt::format("run_jobs{}", jobs);
    fs::remove_all(cfg.out);
    run_estimates(cfg);
    run_smoothing(cfg);
    run_currents(cfg);
    run_counterexample(cfg);
    runs.push_back(csv_files(cfg.out));
  }
  std::size_t differing = 0;
  for (const auto& [name, text] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != text) ++differing;
  }
  const bool same = differing == 0 && runs[0].size() == runs[1].size();
  return {same && !runs[0].empty(),
          fmt::format("{} CSV files, {} differ between --jobs 1 and --jobs 4", runs[0].size(),
                      differing)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path workdir = fs::temp_directory_path() / "lamination_acceptance";
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict")
      strict = true;
    else
      workdir = arg;
  }
  fs::create_directories(workdir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"schwarz log bound", schwarz},
      {"pair slope bound", corollary},
      {"delta^2 separation", separation},
      {"approximation convergence", convergence},
      {"exactness plateaus", plateaus},
      {"directed implies weakly directed", wedge_defects},
      {"disintegration roundtrip", reconstruction},
      {"counterexample obstruction", obstruction},
      {"gradient consistency", gradients},
      {"determinism", [&] { return determinism(workdir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    if (!o.pass) ++failed;
    fmt::print("{:>2} {:<34} {}  {}\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria pass\n", criteria.size() - failed, criteria.size());
  return strict && failed > 0 ? 1 : 0;
}
