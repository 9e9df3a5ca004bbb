#pragma once

// Reproducible experiment suites driven by an INI configuration.  Every suite
// writes deterministic CSV files into the output directory and records
// itself in manifest.json there.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lamination/family.hpp"

namespace lam {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct FamilyEntry {
  std::string key;                 // section suffix, used in file names
  std::optional<LeafFamily> leaf;  // empty for the real cubic family
  bool is_cubic() const { return !leaf.has_value(); }
};

struct EstimatesConfig {
  std::size_t schwarz_samples = 100000;
  std::size_t corollary_samples = 10000;
  std::size_t delta0_samples = 20000;
  std::vector<double> separation_deltas{0.2, 0.1, 0.05};
  int N = 2;
};

struct SmoothingConfig {
  std::vector<double> delta_list{0.2, 0.1, 0.05, 0.025};
  std::vector<std::string> targets{"re_pi"};
  std::vector<Complex> centers{Complex{}};
  std::size_t samples = 20000;
};

struct CurrentsConfig {
  int quad_order = 64;
  std::size_t currents = 10;
  std::size_t atoms = 5;
  std::size_t forms = 10;
  std::size_t samples = 100000;
  std::size_t recon_forms = 5;
  int bins_per_axis = 8;
};

struct CounterexampleConfig {
  double mass_bound = 10.0;
  std::vector<double> eps_list{1e-2, 1e-3, 1e-4, 1e-5};
  double tol = 0.02;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::filesystem::path out = "out";
  std::vector<FamilyEntry> families;
  EstimatesConfig estimates;
  SmoothingConfig smoothing;
  CurrentsConfig currents;
  CounterexampleConfig counterexample;
};

// product, shear(0.5), exp(0.2), nonlinear(0.05) at R = 1 and the cubic
// family.
ExperimentConfig default_config();

// Sections [general], [family:NAME], [estimates], [smoothing], [currents],
// [counterexample]; keys absent from the file keep their defaults.  Family
// sections replace the default family list.  Throws ConfigError naming the
// offending line.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical text of every setting that affects results (not jobs or out).
std::string canonical_text(const ExperimentConfig& cfg);
// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct SuiteResult {
  std::string suite;
  bool pass = false;
  std::vector<std::string> artifacts;  // file names relative to the output directory
  std::vector<std::string> messages;   // human-readable summary lines
};

SuiteResult run_estimates(const ExperimentConfig& cfg);
// Throws ConfigError when grid_constants.csv from the estimates suite is
// missing or a delta is not below the certified delta0.
SuiteResult run_smoothing(const ExperimentConfig& cfg);
SuiteResult run_currents(const ExperimentConfig& cfg);
SuiteResult run_counterexample(const ExperimentConfig& cfg);

// Merges the results into manifest.json of the output directory.  Suites
// from a run with a different config hash are dropped; the artifact list is
// every file present in the directory.
void write_manifest(const ExperimentConfig& cfg, const std::vector<SuiteResult>& results);

}  // namespace lam
