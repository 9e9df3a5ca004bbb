#include "lamination/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "lamination/counterexamples.hpp"
#include "lamination/currents.hpp"
#include "lamination/errors.hpp"
#include "lamination/estimates.hpp"
#include "lamination/smoothing.hpp"

namespace lam {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

// Line numbers of section headers and keys, for diagnostics.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    for (int n = 1; std::getline(in, line); ++n) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') continue;
      if (t.front() == '[' && t.back() == ']') {
        section = t.substr(1, t.size() - 2);
        lines_[section] = n;
      } else if (const auto eq = t.find('='); eq != std::string::npos) {
        lines_[section + "\n" + trim(t.substr(0, eq))] = n;
      }
    }
  }

  int at(const std::string& section, const std::string& key = {}) const {
    const auto it = lines_.find(key.empty() ? section : section + "\n" + key);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  std::map<std::string, int> lines_;
};

using boost::property_tree::ptree;

class SectionReader {
 public:
  SectionReader(const ptree& tree, std::string section, const LineIndex& index, std::string source)
      : tree_(tree), section_(std::move(section)), index_(index), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(fmt::format("{}:{}: [{}] {}: {}", source_, index_.at(section_, key),
                                  section_, key, what));
  }

  void check_keys(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : tree_)
      if (!allowed.count(key)) fail(key, "unknown key");
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (auto v = tree_.get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  }

  void read(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  void read(const std::string& key, std::size_t& out, std::size_t min_value) const {
    if (auto v = raw(key)) {
      const double d = to_double(key, *v);
      if (d < 0.0 || d != std::floor(d)) fail(key, fmt::format("'{}' is not a nonnegative integer", *v));
      out = static_cast<std::size_t>(d);
    }
    if (out < min_value) fail(key, fmt::format("must be at least {}", min_value));
  }

  void read(const std::string& key, int& out, int min_value) const {
    std::size_t v = static_cast<std::size_t>(std::max(out, 0));
    read(key, v, static_cast<std::size_t>(min_value));
    out = static_cast<int>(v);
  }

  void read_list(const std::string& key, std::vector<double>& out) const {
    if (auto v = raw(key)) {
      out.clear();
      for (const auto& item : split(*v, ',')) out.push_back(to_double(key, item));
      if (out.empty()) fail(key, "empty list");
    }
  }

  void read_words(const std::string& key, std::vector<std::string>& out) const {
    if (auto v = raw(key)) {
      out = split(*v, ',');
      if (out.empty()) fail(key, "empty list");
    }
  }

  // "re im; re im; ..."
  void read_points(const std::string& key, std::vector<Complex>& out) const {
    if (auto v = raw(key)) {
      out.clear();
      for (const auto& item : split(*v, ';')) {
        std::istringstream in(item);
        std::string re, im, extra;
        in >> re >> im;
        if (re.empty() || im.empty() || (in >> extra))
          fail(key, fmt::format("'{}' is not a 're im' pair", item));
        out.emplace_back(to_double(key, re), to_double(key, im));
      }
      if (out.empty()) fail(key, "empty list");
    }
  }

  double to_double(const std::string& key, const std::string& text) const {
    try {
      std::size_t used = 0;
      const double d = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(d)) throw std::invalid_argument(text);
      return d;
    } catch (const std::exception&) {
      fail(key, fmt::format("'{}' is not a number", text));
    }
  }

 private:
  const ptree& tree_;
  std::string section_;
  const LineIndex& index_;
  std::string source_;
};

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << text;
}

fs::path prepare_out(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  return cfg.out;
}

const std::vector<Target>& all_targets() {
  static const std::vector<Target> t{Target::RePi, Target::ImPi, Target::Composite};
  return t;
}

Target target_from_name(const std::string& name) {
  for (const Target t : all_targets())
    if (name == target_name(t)) return t;
  throw ConfigError(fmt::format("unknown smoothing target '{}'", name));
}

// The fixed well-separated 5-atom current used by the disintegration suite.
DirectedCurrent five_atom_current(const LeafFamily& fam) {
  const double R = fam.radius();
  return DirectedCurrent(fam, {{Complex(-1.0, -1.0) * R, 1.0},
                               {Complex(1.0, -1.0) * R, 0.5},
                               {Complex(0.0, 0.1) * R, 2.0},
                               {Complex(-1.0, 1.0) * R, 1.5},
                               {Complex(1.1, 1.2) * R, 0.8}});
}

struct GridConstantsRow {
  double delta0 = 0.0;
  double t0 = 0.0;
};

std::map<std::string, GridConstantsRow> read_grid_constants(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(fmt::format(
        "grid constants {} not found: run the estimates suite first (lamtool estimates)",
        path.string()));
  std::map<std::string, GridConstantsRow> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto cols = split(line, ',');
    if (cols.size() < 3) continue;
    out[cols[0]] = {std::stod(cols[1]), std::stod(cols[2])};
  }
  return out;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.families = {{"product", LeafFamily::product()},
                  {"shear", LeafFamily::shear(0.5)},
                  {"exp", LeafFamily::exp(0.2)},
                  {"nonlinear", LeafFamily::nonlinear(0.05)},
                  {"cubic", std::nullopt}};
  return cfg;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const LineIndex index(text);
  ptree tree;
  try {
    std::istringstream ss(text);
    boost::property_tree::read_ini(ss, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", source, e.line(), e.message()));
  }

  ExperimentConfig cfg = default_config();
  std::vector<FamilyEntry> families;
  for (const auto& [name, section] : tree) {
    const SectionReader r(section, name, index, source);
    if (section.empty() && !section.data().empty())
      throw ConfigError(fmt::format("{}:{}: key '{}' outside any section", source,
                                    index.at("", name), name));
    if (name == "general") {
      r.check_keys({"seed", "jobs", "out"});
      std::size_t seed = cfg.seed, jobs = cfg.jobs;
      r.read("seed", seed, 0);
      r.read("jobs", jobs, 1);
      cfg.seed = seed;
      cfg.jobs = static_cast<unsigned>(jobs);
      if (auto out = r.raw("out")) cfg.out = *out;
    } else if (name.rfind("family:", 0) == 0) {
      r.check_keys({"kind", "a_re", "a_im", "lam_re", "lam_im", "eps", "R"});
      const std::string key = name.substr(7);
      if (key.empty()) r.fail("kind", "family section needs a name");
      Record rec;
      for (const auto& [k, v] : section) rec[k] = trim(v.data());
      if (rec["kind"] == "cubic") {
        families.push_back({key, std::nullopt});
        continue;
      }
      try {
        families.push_back({key, family_from_record(rec)});
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}:{}: [{}] {}", source, index.at(name), name, e.what()));
      }
    } else if (name == "estimates") {
      auto& e = cfg.estimates;
      r.check_keys({"schwarz_samples", "corollary_samples", "delta0_samples", "separation_deltas", "N"});
      r.read("schwarz_samples", e.schwarz_samples, 1);
      r.read("corollary_samples", e.corollary_samples, 1);
      r.read("delta0_samples", e.delta0_samples, 1);
      r.read_list("separation_deltas", e.separation_deltas);
      r.read("N", e.N, 2);
      if (!strictly_decreasing(e.separation_deltas)) r.fail("separation_deltas", "must be strictly decreasing");
      for (const double d : e.separation_deltas)
        if (!(d > 0.0 && d < 1.0)) r.fail("separation_deltas", "entries must lie in (0, 1)");
    } else if (name == "smoothing") {
      auto& s = cfg.smoothing;
      r.check_keys({"delta_list", "targets", "centers", "samples"});
      r.read_list("delta_list", s.delta_list);
      r.read_words("targets", s.targets);
      r.read_points("centers", s.centers);
      r.read("samples", s.samples, 1);
      if (!strictly_decreasing(s.delta_list)) r.fail("delta_list", "must be strictly decreasing");
      for (const double d : s.delta_list)
        if (!(d > 0.0 && d < 1.0)) r.fail("delta_list", "entries must lie in (0, 1)");
      for (const auto& t : s.targets) {
        try {
          target_from_name(t);
        } catch (const ConfigError& e) {
          r.fail("targets", e.what());
        }
      }
      for (const Complex c : s.centers)
        if (!(std::abs(c) < 0.5)) r.fail("centers", "chart centers must satisfy |p| < 1/2");
    } else if (name == "currents") {
      auto& c = cfg.currents;
      r.check_keys({"quad_order", "currents", "atoms", "forms", "samples", "recon_forms", "bins_per_axis"});
      r.read("quad_order", c.quad_order, 1);
      r.read("currents", c.currents, 0);
      r.read("atoms", c.atoms, 0);
      r.read("forms", c.forms, 1);
      r.read("samples", c.samples, 1);
      r.read("recon_forms", c.recon_forms, 1);
      r.read("bins_per_axis", c.bins_per_axis, 1);
      if (c.atoms > 10) r.fail("atoms", "at most 10 atoms per current");
    } else if (name == "counterexample") {
      auto& c = cfg.counterexample;
      r.check_keys({"mass_bound", "eps_list", "tol"});
      r.read("mass_bound", c.mass_bound);
      r.read_list("eps_list", c.eps_list);
      r.read("tol", c.tol);
      if (!(c.mass_bound > 0.0)) r.fail("mass_bound", "must be positive");
      if (c.eps_list.size() < 2 || !strictly_decreasing(c.eps_list) || !(c.eps_list.back() > 0.0))
        r.fail("eps_list", "needs at least two positive, strictly decreasing entries");
      if (!(c.tol >= 0.0 && c.tol < 1.0)) r.fail("tol", "must lie in [0, 1)");
    } else {
      throw ConfigError(fmt::format("{}:{}: unknown section [{}]", source, index.at(name), name));
    }
  }
  if (!families.empty()) cfg.families = std::move(families);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  return parse_config(in, path.string());
}

std::string canonical_text(const ExperimentConfig& cfg) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (const double d : v) s += num(d) + ",";
    return s;
  };
  std::string out = fmt::format("seed={}\n", cfg.seed);
  for (const auto& f : cfg.families) {
    out += "family:" + f.key;
    if (f.is_cubic()) {
      out += " kind=cubic\n";
      continue;
    }
    for (const auto& [k, v] : to_record(*f.leaf)) out += " " + k + "=" + v;
    out += "\n";
  }
  const auto& e = cfg.estimates;
  out += fmt::format("estimates {} {} {} {} {}\n", e.schwarz_samples, e.corollary_samples,
                     e.delta0_samples, list(e.separation_deltas), e.N);
  const auto& s = cfg.smoothing;
  out += fmt::format("smoothing {} {}", list(s.delta_list), s.samples);
  for (const auto& t : s.targets) out += " " + t;
  for (const Complex c : s.centers) out += " " + num(c.real()) + ":" + num(c.imag());
  const auto& c = cfg.currents;
  out += fmt::format("\ncurrents {} {} {} {} {} {} {}\n", c.quad_order, c.currents, c.atoms, c.forms,
                     c.samples, c.recon_forms, c.bins_per_axis);
  const auto& x = cfg.counterexample;
  out += fmt::format("counterexample {} {} {}\n", num(x.mass_bound), list(x.eps_list), num(x.tol));
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : canonical_text(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

SuiteResult run_estimates(const ExperimentConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const auto& e = cfg.estimates;
  SuiteResult res{"estimates", true, {}, {}};
  std::string csv = "check,family,parameter,samples,violations,skipped,statistic,pass\n";
  auto row = [&](const std::string& check, const std::string& fam, const std::string& param,
                 std::size_t samples, std::size_t violations, std::size_t skipped, double stat,
                 bool pass) {
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", check, fam, param, samples, violations, skipped,
                       num(stat), pass ? 1 : 0);
    res.pass = res.pass && pass;
  };

  const BatteryResult schwarz = schwarz_battery(e.schwarz_samples, cfg.seed, cfg.jobs);
  row("schwarz_log_bound", "-", "-", schwarz.samples, schwarz.violations, schwarz.skipped,
      schwarz.worst_ratio, schwarz.violations == 0);
  res.messages.push_back(fmt::format("schwarz: {} samples, {} violations", schwarz.samples,
                                     schwarz.violations));

  std::vector<double> deltas = e.separation_deltas;
  deltas.insert(deltas.end(), cfg.smoothing.delta_list.begin(), cfg.smoothing.delta_list.end());
  std::string constants = "family,delta0,t0,R,N\n";
  for (const auto& f : cfg.families) {
    if (f.is_cubic()) continue;
    const LeafFamily& fam = *f.leaf;
    const BatteryResult cor = corollary_battery(fam, e.corollary_samples, cfg.seed, cfg.jobs);
    row("pair_slope_bound", f.key, "-", cor.samples, cor.violations, cor.skipped, cor.worst_ratio,
        cor.violations == 0);
    const double delta0 = delta0_search(fam, fam.radius(), e.delta0_samples, cfg.seed);
    const double t0 = compute_t0(fam, deltas, e.N, fam.radius());
    row("delta0", f.key, "-", e.delta0_samples, 0, 0, delta0, true);
    row("t0", f.key, fmt::format("N={}", e.N), deltas.size(), 0, 0, t0, t0 <= t0_cap());
    for (const double d : e.separation_deltas) {
      const SeparationReport sep = separation_check(fam, d, t0, fam.radius());
      row("separation", f.key, fmt::format("delta={}", num(d)), 0, sep.pass ? 0 : 1, 0,
          sep.min_ratio, sep.pass);
    }
    constants += fmt::format("{},{},{},{},{}\n", f.key, num(delta0), num(t0), num(fam.radius()), e.N);
    res.messages.push_back(fmt::format("{}: delta0 = {}, t0 = {}, {} corollary violations", f.key,
                                       delta0, t0, cor.violations));
  }
  write_text(out / "estimates.csv", csv);
  write_text(out / "grid_constants.csv", constants);
  res.artifacts = {"estimates.csv", "grid_constants.csv"};
  return res;
}

SuiteResult run_smoothing(const ExperimentConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const auto& s = cfg.smoothing;
  SuiteResult res{"smooth", true, {}, {}};
  std::map<std::string, GridConstantsRow> constants;
  const bool needs_constants = std::any_of(cfg.families.begin(), cfg.families.end(),
                                           [](const FamilyEntry& f) { return !f.is_cubic(); });
  if (needs_constants) constants = read_grid_constants(out / "grid_constants.csv");

  for (const auto& f : cfg.families) {
    if (f.is_cubic()) {
      std::string csv = "candidate_id,eta,eps,combined,pass\n";
      ObstructionOptions opt;
      opt.tol = cfg.counterexample.tol;
      for (const double d : s.delta_list) {
        const ObstructionReport rep = approx_obstruction(naive_smoothing_candidate(d), opt);
        csv += fmt::format("{},{},{},{},{}\n", rep.candidate_id, num(rep.eta), num(rep.eps),
                           num(rep.combined), rep.pass ? 1 : 0);
        res.pass = res.pass && rep.pass;
      }
      const std::string name = fmt::format("obstruction_smoothing_{}.csv", f.key);
      write_text(out / name, csv);
      res.artifacts.push_back(name);
      res.messages.push_back(fmt::format("{}: no convergence claim, obstruction report written", f.key));
      continue;
    }
    const auto it = constants.find(f.key);
    if (it == constants.end())
      throw ConfigError(fmt::format("no certified grid constants for family '{}': run estimates first", f.key));
    const GridConstantsRow gc = it->second;
    if (!(s.delta_list.front() < gc.delta0))
      throw ConfigError(fmt::format("delta {} is not below the certified delta0 = {} of '{}'",
                                    s.delta_list.front(), gc.delta0, f.key));
    const LeafFamily& fam = *f.leaf;
    for (const auto& tname : s.targets) {
      const Target target = target_from_name(tname);
      for (std::size_t ci = 0; ci < s.centers.size(); ++ci) {
        SweepOptions opt;
        opt.t0 = gc.t0;
        opt.R = fam.radius();
        opt.center = s.centers[ci];
        opt.samples = {s.samples, cfg.seed};
        const SweepResult sweep = convergence_sweep(fam, target, s.delta_list, opt);
        const std::string stem = fmt::format("convergence_{}_{}{}", f.key, tname,
                                             ci == 0 ? std::string() : fmt::format("_c{}", ci));
        std::ostringstream body;
        sweep.write_csv(body);
        write_text(out / (stem + ".csv"), body.str());

        std::string plot = "log10_delta,log10_sup_err,log10_leaf_c1,log10_fit_pred\n";
        auto lg = [](double v) { return v > 0.0 ? num(std::log10(v)) : std::string(); };
        for (const auto& row : sweep.rows)
          plot += fmt::format("{},{},{},{}\n", lg(row.report.delta), lg(row.report.sup_err),
                              lg(row.report.leaf_c1_err()), lg(row.fit_pred));
        write_text(out / (stem + "_loglog.csv"), plot);
        res.artifacts.push_back(stem + ".csv");
        res.artifacts.push_back(stem + "_loglog.csv");

        bool ok = true;
        for (std::size_t i = 1; i < sweep.rows.size(); ++i)
          ok = ok && sweep.rows[i].report.sup_err <= 0.7 * sweep.rows[i - 1].report.sup_err;
        const ErrorReport& last = sweep.rows.back().report;
        ok = ok && last.sup_err < 0.05 && last.leaf_c1_err() < 0.05;
        if (target != Target::Composite) ok = ok && sweep.fit_residual <= 0.2;
        res.pass = res.pass && ok;
        res.messages.push_back(fmt::format("{} {}: fit {:.4g}, fit residual {:.3g}, smallest-delta sup {:.3g}{}",
                                           f.key, tname, sweep.fit, sweep.fit_residual, last.sup_err,
                                           ok ? "" : " [FAIL]"));
      }
    }
  }
  return res;
}

SuiteResult run_currents(const ExperimentConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const auto& c = cfg.currents;
  SuiteResult res{"currents", true, {}, {}};
  std::string wedge_csv = "family,current,form_id,one_form,defect,flag\n";
  std::string dis_csv = "family,bin_ix,bin_iy,alpha_re,alpha_im,mass\n";
  std::string rec_csv = "form_id,value_direct,value_reconstructed,residual\n";
  std::string closed_csv = "family,sigma,residual,expected,pass\n";

  const auto forms01 = form01_battery(c.forms, cfg.seed);
  const auto forms11 = form11_battery(c.recon_forms, cfg.seed);
  for (const auto& f : cfg.families) {
    if (f.is_cubic()) continue;
    const LeafFamily& fam = *f.leaf;
    const double R = fam.radius();
    // dw is leaf-adapted for the product family, so dz is its control there.
    const WedgeForm control = fam.kind() == FamilyKind::Product ? WedgeForm::Dz : WedgeForm::Dw;
    const char* control_name = control == WedgeForm::Dz ? "dz" : "dw";

    std::size_t worst_defect_rows = 0, weak_controls = 0;
    for (std::size_t k = 0; k < c.currents && c.atoms > 0; ++k) {
      const DirectedCurrent T =
          random_current(fam, c.atoms, cfg.seed * 1000 + k, Complex(0.7, -0.3) * R, Complex(1.5, 0.3) * R);
      for (const auto& phi : forms01) {
        const Quadrature quad = Quadrature::for_disc(c.quad_order, phi.support.center, phi.support.radius);
        const double d = wedge_defect(T, phi, fam, quad);
        const double neg = wedge_defect(T, phi, fam, quad, control);
        const bool zero = d <= 1e-8;
        const bool flagged = neg > 1e-3;
        if (!zero) ++worst_defect_rows;
        if (!flagged) ++weak_controls;
        wedge_csv += fmt::format("{},{},{},lambda,{},{}\n", f.key, k, phi.id, num(d), zero ? "zero" : "nonzero");
        wedge_csv += fmt::format("{},{},{},{},{},{}\n", f.key, k, phi.id, control_name, num(neg),
                                 flagged ? "nonzero" : "zero");
      }
    }
    res.pass = res.pass && worst_defect_rows == 0 && weak_controls == 0;
    res.messages.push_back(fmt::format("{}: {} nonzero lambda defects, {} unflagged {} controls", f.key,
                                       worst_defect_rows, weak_controls, control_name));

    const DirectedCurrent T = c.atoms > 0 ? five_atom_current(fam) : DirectedCurrent();
    Disintegration dis = uniform_disintegration(T, 0.0, 0.56);
    if (!T.empty()) {
      DisintegrationOptions opt;
      opt.bins_per_axis = c.bins_per_axis;
      opt.param_box = {Complex(-2.0, -2.0) * R, Complex(2.0, 2.0) * R};
      dis = disintegrate(fam, riesz_samples(T, fam, c.samples, cfg.seed), opt);
    }
    for (const Bin& b : dis.bins)
      dis_csv += fmt::format("{},{},{},{},{},{}\n", f.key, b.ix, b.iy, num(b.alpha.real()),
                             num(b.alpha.imag()), num(b.mass));
    const Quadrature quad = Quadrature::for_disc(c.quad_order, 0.0, 0.56);
    double worst = 0.0;
    for (const auto& row : reconstruct_and_compare(T, dis, forms11, fam, quad)) {
      rec_csv += fmt::format("{}/{},{},{},{}\n", f.key, row.form_id, num(row.direct.real()),
                             num(row.reconstructed.real()), num(row.residual));
      worst = std::max(worst, row.residual);
    }
    res.pass = res.pass && worst <= 0.02;
    res.messages.push_back(fmt::format("{}: worst reconstruction residual {:.3g}", f.key, worst));

    if (!T.empty()) {
      auto one = [](Complex) { return 1.0; };
      const double uniform = closedness_residual(uniform_disintegration(T, 0.0, 0.56), fam, forms01, one);
      const double tilted =
          closedness_residual(tilted_disintegration(T, 0.0, 0.56, 1.0), fam, forms01, one);
      closed_csv += fmt::format("{},uniform,{},zero,{}\n", f.key, num(uniform), uniform <= 1e-6 ? 1 : 0);
      closed_csv += fmt::format("{},tilted,{},nonzero,{}\n", f.key, num(tilted), tilted > 1e-3 ? 1 : 0);
      res.pass = res.pass && uniform <= 1e-6 && tilted > 1e-3;
    }
  }
  write_text(out / "wedge_defect.csv", wedge_csv);
  write_text(out / "disintegration.csv", dis_csv);
  write_text(out / "reconstruction.csv", rec_csv);
  write_text(out / "closedness.csv", closed_csv);
  res.artifacts = {"wedge_defect.csv", "disintegration.csv", "reconstruction.csv", "closedness.csv"};
  return res;
}

SuiteResult run_counterexample(const ExperimentConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const auto& c = cfg.counterexample;
  SuiteResult res{"counterexample", true, {}, {}};

  std::string obstruction = "candidate_id,eta,eps,combined,pass\n";
  ObstructionOptions opt;
  opt.tol = c.tol;
  std::size_t failed = 0;
  for (const auto& cand : obstruction_candidates()) {
    const ObstructionReport rep = approx_obstruction(cand, opt);
    obstruction += fmt::format("{},{},{},{},{}\n", rep.candidate_id, num(rep.eta), num(rep.eps),
                               num(rep.combined), rep.pass ? 1 : 0);
    if (!rep.pass) ++failed;
    if (!rep.warning.empty()) res.messages.push_back("warning: " + rep.warning);
  }
  res.pass = failed == 0;
  res.messages.push_back(fmt::format("obstruction: {} candidates below the bound", failed));

  const WitnessReport w = non_directedness_witness(c.mass_bound, c.eps_list);
  std::string witness = "epsilon,axis_pairing,leaf_pairing,exponent_fit\n";
  for (const auto& row : w.rows)
    witness += fmt::format("{},{},{},{}\n", num(row.epsilon), num(row.axis_pairing),
                           num(row.leaf_pairing), num(row.exponent_fit));
  const bool exponent_ok = std::abs(w.exponent - 1.0 / 3.0) <= 0.05;
  res.pass = res.pass && exponent_ok && w.axis_constant;
  res.messages.push_back(fmt::format("witness: exponent {:.4f}, mass bound {} contradicted below eps = {:.3g}",
                                     w.exponent, w.mass_bound, w.contradiction_epsilon));

  std::string checks = "check,value,pass\n";
  auto check = [&](const std::string& name, double value, bool pass) {
    checks += fmt::format("{},{},{}\n", name, num(value), pass ? 1 : 0);
    res.pass = res.pass && pass;
  };
  const TangencyReport tan = cubic_tangency_check({0.0, 0.37, -0.8, 1.5}, {Complex(1.0, 1.0), Complex(-0.3, 0.2)});
  check("tangency", std::max(tan.max_value, tan.max_slope), tan.pass);
  auto g = [](double x) { return 1.0 + x * x; };
  check("axis_lambda_defect", axis_weak_directedness(-1.0, 1.0, g), axis_weak_directedness(-1.0, 1.0, g) <= 1e-12);
  const double control = axis_weak_directedness(-1.0, 1.0, g, AxisForm::Dx);
  check("axis_dx_control", control, control > 1e-3);
  const double c3 = axis_weak_directedness_c3(0.5, [](Complex z) { return 1.0 + z * std::conj(z); });
  check("c3_axis_defect", c3, c3 <= 1e-10);
  const double roundtrip = curve3_roundtrip_error(10000, cfg.seed);
  check("c3_projection_roundtrip", roundtrip, roundtrip <= 1e-10);

  write_text(out / "obstruction.csv", obstruction);
  write_text(out / "witness.csv", witness);
  write_text(out / "counterexample_checks.csv", checks);
  res.artifacts = {"obstruction.csv", "witness.csv", "counterexample_checks.csv"};
  return res;
}

void write_manifest(const ExperimentConfig& cfg, const std::vector<SuiteResult>& results) {
  const fs::path out = prepare_out(cfg);
  const fs::path path = out / "manifest.json";
  const std::string hash = config_hash(cfg);
  nlohmann::json suites = nlohmann::json::object();
  if (std::ifstream in(path); in) {
    try {
      const nlohmann::json old = nlohmann::json::parse(in);
      if (old.value("config_hash", "") == hash && old.contains("suites")) suites = old["suites"];
    } catch (const nlohmann::json::exception&) {
      // Unreadable manifests are replaced.
    }
  }
  for (const auto& r : results) {
    nlohmann::json s;
    s["pass"] = r.pass;
    s["artifacts"] = r.artifacts;
    suites[r.suite] = s;
  }
  std::vector<std::string> files{"manifest.json"};
  for (const auto& entry : fs::directory_iterator(out))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
      files.push_back(entry.path().filename().string());
  std::sort(files.begin(), files.end());

  nlohmann::json m;
  m["config_hash"] = hash;
  m["version"] = kToolkitVersion;
  m["seed"] = cfg.seed;
  m["suites"] = suites;
  m["artifacts"] = files;
  write_text(path, m.dump(2) + "\n");
}

}  // namespace lam
