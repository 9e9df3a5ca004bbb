// lamtool: runs the experiment suites and writes CSV tables plus a JSON
// manifest into the output directory.
//
//   lamtool estimates --config run.ini --seed 42 --out out
//   lamtool all --jobs 4
//
// Exit status is 0 exactly when every selected suite passes; configuration
// and runtime errors exit with 2.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "lamination/errors.hpp"
#include "lamination/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  unsigned jobs = 0;
};

int run(const std::string& which, const Options& opt) {
  lam::ExperimentConfig cfg = opt.config.empty() ? lam::default_config() : lam::load_config(opt.config);
  if (opt.seed_set) cfg.seed = opt.seed;
  if (!opt.out.empty()) cfg.out = opt.out;
  if (opt.jobs > 0) cfg.jobs = opt.jobs;

  using Runner = std::function<lam::SuiteResult(const lam::ExperimentConfig&)>;
  std::vector<Runner> runners;
  if (which == "estimates" || which == "all") runners.emplace_back(lam::run_estimates);
  if (which == "smooth" || which == "all") runners.emplace_back(lam::run_smoothing);
  if (which == "currents" || which == "all") runners.emplace_back(lam::run_currents);
  if (which == "counterexample" || which == "all") runners.emplace_back(lam::run_counterexample);

  std::vector<lam::SuiteResult> results;
  bool pass = true;
  for (const auto& r : runners) {
    results.push_back(r(cfg));
    const auto& res = results.back();
    for (const auto& m : res.messages) fmt::print("  {}\n", m);
    fmt::print("{}: {}\n", res.suite, res.pass ? "PASS" : "FAIL");
    pass = pass && res.pass;
    // Keep the manifest current even if a later suite throws.
    lam::write_manifest(cfg, {res});
  }
  fmt::print("manifest: {}\n", (cfg.out / "manifest.json").string());
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on laminations by holomorphic graphs"};
  app.require_subcommand(1);
  Options opt;
  std::string which;
  for (const char* name : {"estimates", "smooth", "currents", "counterexample", "all"}) {
    CLI::App* sub = app.add_subcommand(name, fmt::format("run the {} suite", name));
    if (std::string(name) == "all") sub->description("run every suite in order");
    sub->add_option("--config", opt.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed (overrides the config)")
        ->each([&opt](const std::string&) { opt.seed_set = true; });
    sub->add_option("--out", opt.out, "output directory (overrides the config)");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&which, name] { which = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return run(which, opt);
  } catch (const lam::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  }
  return 2;
}
