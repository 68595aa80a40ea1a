#include "grovercav/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "grovercav/cavity.hpp"
#include "grovercav/io.hpp"
#include "grovercav/planner.hpp"
#include "grovercav/protocol.hpp"
#include "grovercav/symspace.hpp"

namespace grovercav::cli {

namespace {

using nlohmann::json;

// gamma used when a sweep needs atomic loss switched off.
constexpr double kLosslessGamma = 1e-9;

struct Config {
  std::optional<int> n;
  std::optional<int> dicke;
  bool ghz = false;
  std::optional<int> k;
  std::optional<double> g;
  std::optional<double> kappa;
  std::optional<double> gamma;
  std::optional<double> delta;
  std::optional<double> sigma;
  bool herald = false;
  int jobs = 0;
  std::optional<std::string> out;
  std::optional<std::string> trajectory;
  std::optional<int> n_max;
  std::optional<std::string> axis;
  std::vector<double> values;
  std::optional<std::string> state;
  std::optional<double> phi;
  int n_beta = 61;
  int n_phi = 120;
};

struct Flags {
  Config cfg;
  std::optional<std::string> config_path;
  std::optional<std::string> values_text;
  bool ghz_flag = false;
  bool herald_flag = false;
  std::optional<int> jobs;
  std::optional<int> n_beta;
  std::optional<int> n_phi;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("cannot parse number '" + item + "' in list");
    }
  }
  return out;
}

template <typename T>
void take(const json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  static const std::set<std::string> known = {
      "n",     "dicke", "ghz",   "k",          "g",      "kappa", "gamma",
      "delta", "sigma", "herald", "jobs",      "out",    "trajectory",
      "n_max", "axis",  "values", "state",     "phi",    "n_beta", "n_phi"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw DomainError("config: unknown key '" + key + "'");
  }
  Config c;
  try {
    take(j, "n", c.n);
    take(j, "dicke", c.dicke);
    c.ghz = j.value("ghz", false);
    take(j, "k", c.k);
    take(j, "g", c.g);
    take(j, "kappa", c.kappa);
    take(j, "gamma", c.gamma);
    take(j, "delta", c.delta);
    take(j, "sigma", c.sigma);
    c.herald = j.value("herald", false);
    c.jobs = j.value("jobs", 0);
    take(j, "out", c.out);
    take(j, "trajectory", c.trajectory);
    take(j, "n_max", c.n_max);
    take(j, "axis", c.axis);
    if (j.contains("values")) c.values = j.at("values").get<std::vector<double>>();
    take(j, "state", c.state);
    take(j, "phi", c.phi);
    c.n_beta = j.value("n_beta", c.n_beta);
    c.n_phi = j.value("n_phi", c.n_phi);
  } catch (const json::exception& e) {
    throw DomainError("config " + path + ": " + e.what());
  }
  return c;
}

template <typename T>
void overlay(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

// Config file first, command-line flags on top.
Config resolve(const Flags& f) {
  Config c = f.config_path ? load_config(*f.config_path) : Config{};
  const Config& fl = f.cfg;
  overlay(c.n, fl.n);
  overlay(c.dicke, fl.dicke);
  overlay(c.k, fl.k);
  overlay(c.g, fl.g);
  overlay(c.kappa, fl.kappa);
  overlay(c.gamma, fl.gamma);
  overlay(c.delta, fl.delta);
  overlay(c.sigma, fl.sigma);
  overlay(c.out, fl.out);
  overlay(c.trajectory, fl.trajectory);
  overlay(c.n_max, fl.n_max);
  overlay(c.axis, fl.axis);
  overlay(c.state, fl.state);
  overlay(c.phi, fl.phi);
  if (f.ghz_flag) c.ghz = true;
  if (f.herald_flag) c.herald = true;
  if (f.jobs) c.jobs = *f.jobs;
  if (f.n_beta) c.n_beta = *f.n_beta;
  if (f.n_phi) c.n_phi = *f.n_phi;
  if (f.values_text) c.values = parse_list(*f.values_text);
  return c;
}

template <typename T>
T require(const std::optional<T>& v, const char* name) {
  if (!v) throw DomainError(std::string("missing required parameter --") + name);
  return *v;
}

int require_n(const Config& c) {
  const int n = require(c.n, "n");
  if (n < 1) throw DomainError("--n must be >= 1");
  return n;
}

Target require_target(const Config& c) {
  if (c.ghz && c.dicke) throw DomainError("choose one of --dicke and --ghz");
  if (c.ghz) return Target::ghz();
  return Target::dicke(require(c.dicke, "dicke"));
}

double require_sigma(const Config& c) {
  const double sigma = require(c.sigma, "sigma");
  if (!(sigma > 0.0)) throw DomainError("--sigma must be positive");
  return sigma;
}

// Writes via `body` to the --out file, or to `out` when no file is given.
template <typename Body>
void emit(const Config& c, std::ostream& out, Body&& body) {
  if (!c.out) {
    body(out);
    return;
  }
  std::ofstream file(*c.out);
  if (!file) throw std::ios_base::failure("cannot open output file " + *c.out);
  body(file);
  if (!file) throw std::ios_base::failure("write failed for " + *c.out);
}

void write_trajectory(const std::string& path, const RunResult& r) {
  std::ofstream file(path);
  if (!file) throw std::ios_base::failure("cannot open trajectory file " + path);
  file << "step,amplitude\n";
  for (std::size_t j = 0; j < r.amp_trajectory.size(); ++j) {
    file << j << ',' << format_double(r.amp_trajectory[j]) << '\n';
  }
}

// ---- commands -------------------------------------------------------------

void cmd_plan(const Config& c, std::ostream& out) {
  const int n = require_n(c);
  const ProtocolPlan p = plan(n, require_target(c), c.k);
  emit(c, out, [&](std::ostream& os) { os << to_json(p).dump(2) << '\n'; });
}

void cmd_contour(const Config& c, std::ostream& out) {
  const auto rows = contour_table(require(c.n_max, "n-max"), c.jobs);
  int max_k = 0;
  for (const auto& r : rows) max_k = std::max(max_k, r.k);
  emit(c, out, [&](std::ostream& os) { write_contour_csv(os, rows); });
  out << "max_k=" << max_k << '\n';
}

void cmd_run(const Config& c, std::ostream& out) {
  const int n = require_n(c);
  const Target target = require_target(c);
  json doc;
  RunResult for_trajectory;
  if (!c.g) {
    const ProtocolPlan p = plan(n, target, c.k);
    const RunResult r = run_ideal(p);
    doc = {{"mode", "ideal"}, {"plan", to_json(p)}, {"result", to_json(r)}};
    for_trajectory = r;
  } else {
    const double sigma = require_sigma(c);
    const CavityParams base = CavityParams::make(*c.g, require(c.kappa, "kappa"),
                                                 require(c.gamma, "gamma"),
                                                 c.delta.value_or(1.0));
    RunResult unheralded;
    RunResult heralded;
    if (c.delta) {
      const ProtocolPlan p = plan(n, target, c.k);
      unheralded = run_noisy(p, base, sigma, false);
      heralded = run_noisy(p, base, sigma, true);
    } else {
      unheralded = optimize(n, target, base, sigma, false);
      heralded = optimize(n, target, base, sigma, true);
    }
    doc = {{"mode", "noisy"},
           {"cooperativity", base.cooperativity()},
           {"unheralded", to_json(unheralded)},
           {"heralded", to_json(heralded)}};
    for_trajectory = c.herald ? heralded : unheralded;
  }
  emit(c, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (c.trajectory) write_trajectory(*c.trajectory, for_trajectory);
}

void cmd_sweep(const Config& c, std::ostream& out) {
  const std::string axis = require(c.axis, "axis");
  if (c.values.empty()) throw DomainError("missing required parameter --values");
  SweepTable table;
  if (axis == "C") {
    table = sweep_cooperativity(require_n(c), require_target(c), c.values, require_sigma(c),
                                c.herald, c.jobs);
  } else if (axis == "chi0") {
    table = sweep_chi0_probe(require_n(c), c.dicke.value_or(1), c.values, require_sigma(c),
                             c.herald, c.jobs);
  } else if (axis == "N") {
    std::vector<int> ns;
    for (double v : c.values) {
      if (v != std::floor(v) || v < 1) throw DomainError("N axis values must be integers");
      ns.push_back(int(v));
    }
    const CavityParams p = CavityParams::make(require(c.g, "g"), require(c.kappa, "kappa"),
                                              require(c.gamma, "gamma"), c.delta.value_or(1.0));
    table = sweep_qubits(require(c.dicke, "dicke"), ns, p, require_sigma(c), c.herald, c.jobs);
  } else if (axis == "sigma") {
    const double g = require(c.g, "g");
    const double kappa = require(c.kappa, "kappa");
    const int m = require(c.dicke, "dicke");
    const double delta =
        c.delta.value_or(optimal_detuning_guess(g, kappa, 1.0, m));
    const CavityParams p = CavityParams::make(g, kappa, kLosslessGamma, delta);
    table = sweep_sigma(require_n(c), m, p, c.values, c.jobs);
  } else {
    throw DomainError("unknown sweep axis '" + axis + "' (expected C, chi0, N or sigma)");
  }
  emit(c, out, [&](std::ostream& os) { write_sweep_csv(os, table); });
  const PowerFit fit = fit_exponent(table);
  out << "slope=" << format_double(fit.slope) << '\n';
  out << "r2=" << format_double(fit.r2) << '\n';
  if (axis == "N") {
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& r : table.results) {
      lo = std::min(lo, r.fidelity);
      hi = std::max(hi, r.fidelity);
    }
    out << "spread=" << format_double(hi - lo) << '\n';
  }
}

void cmd_qfunc(const Config& c, std::ostream& out) {
  const int n = require_n(c);
  const std::string kind = require(c.state, "state");
  std::optional<SymmetricState> state;
  if (kind == "dicke") {
    state = dicke(n, require(c.dicke, "dicke"));
  } else if (kind == "rotated-dicke") {
    state = apply_rotation(dicke(n, c.dicke.value_or(n / 2)), require(c.phi, "phi"));
  } else if (kind == "ghz") {
    state = ghz_state(n, 1);
  } else if (kind == "css") {
    state = css_state(n, require(c.phi, "phi"));
  } else {
    throw DomainError("unknown state '" + kind + "' (expected dicke, rotated-dicke, ghz, css)");
  }
  const QGrid grid = husimi_q(*state, c.n_beta, c.n_phi);
  emit(c, out, [&](std::ostream& os) { write_qgrid_csv(os, grid); });
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file (flags override it)");
  sub->add_option("--n", f.cfg.n, "number of qubits");
  sub->add_option("--dicke", f.cfg.dicke, "target Dicke index m");
  sub->add_flag("--ghz", f.ghz_flag, "target the GHZ state");
  sub->add_option("--k", f.cfg.k, "Grover step count override");
  sub->add_option("--g", f.cfg.g, "atom-cavity coupling");
  sub->add_option("--kappa", f.cfg.kappa, "cavity linewidth");
  sub->add_option("--gamma", f.cfg.gamma, "atomic linewidth");
  sub->add_option("--delta", f.cfg.delta, "atom-cavity detuning (optimized if absent)");
  sub->add_option("--sigma", f.cfg.sigma, "photon spectral width");
  sub->add_flag("--herald", f.herald_flag, "herald on the reflected photon");
  sub->add_option("--jobs", f.jobs, "worker threads (default: all cores)");
  sub->add_option("--out", f.cfg.out, "output file (default: stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grover-amplified Dicke/GHZ state preparation in cavity QED", "grovercav-cli"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* plan_cmd = app.add_subcommand("plan", "solve rotation angle and steps; emit JSON");
  CLI::App* contour_cmd = app.add_subcommand("contour", "minimal steps for all (N, m); CSV");
  CLI::App* run_cmd = app.add_subcommand("run", "simulate a plan ideally or with cavity noise");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep with exponent fit");
  CLI::App* qfunc_cmd = app.add_subcommand("qfunc", "Husimi Q-function grid; CSV");
  for (CLI::App* sub : {plan_cmd, contour_cmd, run_cmd, sweep_cmd, qfunc_cmd}) {
    add_common(sub, f);
  }
  contour_cmd->add_option("--n-max", f.cfg.n_max, "largest N in the table");
  run_cmd->add_option("--trajectory", f.cfg.trajectory, "per-step amplitude CSV");
  sweep_cmd->add_option("--axis", f.cfg.axis, "C, chi0, N or sigma");
  sweep_cmd->add_option("--values", f.values_text, "comma-separated axis values");
  qfunc_cmd->add_option("--state", f.cfg.state, "dicke, rotated-dicke, ghz or css");
  qfunc_cmd->add_option("--phi", f.cfg.phi, "rotation angle for css / rotated-dicke");
  qfunc_cmd->add_option("--n-beta", f.n_beta, "polar grid points");
  qfunc_cmd->add_option("--n-phi", f.n_phi, "azimuthal grid points");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    const Config c = resolve(f);
    if (plan_cmd->parsed()) cmd_plan(c, out);
    if (contour_cmd->parsed()) cmd_contour(c, out);
    if (run_cmd->parsed()) cmd_run(c, out);
    if (sweep_cmd->parsed()) cmd_sweep(c, out);
    if (qfunc_cmd->parsed()) cmd_qfunc(c, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace grovercav::cli
