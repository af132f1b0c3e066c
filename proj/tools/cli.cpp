#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tqsb/error.hpp"
#include "tqsb/io.hpp"
#include "tqsb/observables.hpp"
#include "tqsb/oracle_ed.hpp"
#include "tqsb/phase.hpp"
#include "tqsb/sweep.hpp"

#ifndef TQSB_GOLDEN_DIR
#define TQSB_GOLDEN_DIR "tests/golden"
#endif

namespace tqsb::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  ModelParams params;
  std::vector<double> s_list{1.0};
  std::string axis = "delta";
  std::optional<double> start;
  std::optional<double> stop;
  std::optional<int> count;
  std::string scale;
  std::string output;
  std::string format;
  std::string config_path;
  std::string method = "bracketed";
  QuadratureOpts quad;
  SolverOpts solver;
  bool chi = false;
  int modes = 4;
  double lambda = 2.0;
  std::vector<int> nmax{3, 4};
};

// Flag <-> config-file key, applied only when the flag was not given.
struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<void(const json&)> assign;
};

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help)
      : sub_(app.add_subcommand(name, help)) {
    add("--config", "", cfg_.config_path, "JSON file of defaults (flags win)");
    add("--output,-o", "output", cfg_.output, "write to this file instead of stdout");
  }

  template <class T>
  CLI::Option* add(const std::string& flag, const std::string& key, T& target,
                   const std::string& help) {
    CLI::Option* opt = sub_->add_option(flag, target, help);
    if (!key.empty()) {
      bindings_.push_back({key, opt, [&target](const json& j) { target = j.get<T>(); }});
    }
    return opt;
  }

  template <class T>
  CLI::Option* add(const std::string& flag, const std::string& key,
                   std::optional<T>& target, const std::string& help) {
    CLI::Option* opt = sub_->add_option(flag, target, help);
    bindings_.push_back({key, opt, [&target](const json& j) { target = j.get<T>(); }});
    return opt;
  }

  void add_model(bool with_alpha, bool single_s) {
    add("--delta", "delta", cfg_.params.delta, "tunneling Delta");
    add("--epsilon", "epsilon", cfg_.params.epsilon, "bias eps");
    add("--k", "k_ising", cfg_.params.k_ising, "direct Ising coupling K");
    add("--omega-c", "omega_c", cfg_.params.omega_c, "cutoff frequency");
    if (with_alpha) add("--alpha", "alpha", cfg_.params.alpha, "coupling alpha");
    if (single_s) {
      add("--s", "s", cfg_.params.s, "bath exponent s");
    } else {
      add("--s", "s", cfg_.s_list, "bath exponents")->delimiter(',');
    }
  }

  void add_numerics() {
    add("--rel-tol", "rel_tol", cfg_.quad.rel_tol, "quadrature relative tolerance");
    add("--abs-tol", "abs_tol", cfg_.quad.abs_tol, "quadrature absolute tolerance");
    add("--max-subdivisions", "max_subdivisions", cfg_.quad.max_subdivisions,
        "quadrature subdivision budget");
    add("--method", "method", cfg_.method, "bracketed | picard")
        ->check(CLI::IsMember({"bracketed", "picard"}));
    add("--max-iter", "max_iter", cfg_.solver.max_iter, "Picard iteration cap");
    add("--fp-tol", "fp_tol", cfg_.solver.fp_tol, "fixed-point tolerance");
    add("--damping", "damping", cfg_.solver.damping, "Picard damping");
  }

  void add_grid() {
    add("--start", "start", cfg_.start, "first grid value");
    add("--stop", "stop", cfg_.stop, "last grid value");
    add("--count", "count", cfg_.count, "number of grid points (>= 2)");
    add("--scale", "scale", cfg_.scale, "linear | log")
        ->check(CLI::IsMember({"linear", "log"}));
  }

  bool parsed() const { return sub_->parsed(); }
  CLI::App* app() { return sub_; }
  RunConfig& config() { return cfg_; }

  /// Fills unset flags from --config, then normalizes the numerics.
  void finish() {
    if (!cfg_.config_path.empty()) {
      std::ifstream in(cfg_.config_path);
      if (!in) throw Error(Errc::InvalidConfig, "cannot open " + cfg_.config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("config: ") + e.what());
      }
      if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
      for (const auto& b : bindings_) {
        if (b.option->count() > 0 || !j.contains(b.key)) continue;
        try {
          b.assign(j.at(b.key));
        } catch (const json::exception&) {
          throw Error(Errc::InvalidConfig, "config key '" + b.key + "' has the wrong type");
        }
      }
    }
    cfg_.solver.quad = cfg_.quad;
    cfg_.solver.method = cfg_.method == "picard" ? SolveMethod::Picard : SolveMethod::Bracketed;
    validate(cfg_.solver);
  }

 private:
  CLI::App* sub_;
  RunConfig cfg_;
  std::vector<Binding> bindings_;
};

std::vector<double> make_grid(const RunConfig& c, double start, double stop,
                              int count, const std::string& scale) {
  const double a = c.start.value_or(start);
  const double b = c.stop.value_or(stop);
  const int n = c.count.value_or(count);
  if (n < 2) throw Error(Errc::InvalidConfig, "count must be >= 2");
  const std::string& sc = c.scale.empty() ? scale : c.scale;
  return sc == "log" ? log_grid(a, b, n) : linear_grid(a, b, n);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

// ---- solve ---------------------------------------------------------------

std::string cmd_solve(const RunConfig& c) {
  std::vector<std::string> warnings;
  const ModelParams p = validate(c.params, &warnings);
  const SpectralEvaluator ev(continuum_bath(p), c.quad);
  const GroundStateReport r = ground_state(p, ev, c.solver, c.chi);

  json report = r;
  if (c.format == "csv") {
    CsvTable t;
    for (const auto& w : warnings) t.comments.push_back("warning: " + w);
    std::vector<std::string> row;
    for (auto it = report.begin(); it != report.end(); ++it) {
      if (it.value().is_array()) continue;
      t.header.push_back(it.key());
      if (it.value().is_number_float()) {
        row.push_back(format_double(it.value().get<double>()));
      } else if (it.value().is_null()) {
        row.push_back("");
      } else if (it.value().is_string()) {
        row.push_back(it.value().get<std::string>());
      } else {
        row.push_back(it.value().dump());
      }
    }
    t.rows.push_back(std::move(row));
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
  }
  json doc{{"params", p}, {"report", report}, {"warnings", warnings}};
  return doc.dump(2) + "\n";
}

// ---- phase ---------------------------------------------------------------

std::string cmd_phase(const RunConfig& c) {
  ScanAxis axis;
  std::vector<double> grid;
  if (c.axis == "delta") {
    axis = ScanAxis::Delta;
    grid = make_grid(c, 1e-3, 1.0, 13, "log");
  } else {
    axis = ScanAxis::K;
    grid = make_grid(c, -0.5, 0.5, 11, "linear");
  }
  ModelParams fixed = c.params;
  fixed.alpha = 0.0;
  CriticalSearchOpts opts;
  opts.solver = c.solver;
  const auto rows = scan_boundary(axis, grid, fixed, c.s_list, opts);

  CsvTable t;
  t.header = {"s", c.axis, "alpha_c", "residual", "asymptotic", "asymptote_alpha", "error"};
  for (const auto& r : rows) {
    t.rows.push_back({format_double(r.s), format_double(r.axis_value),
                      format_double(r.alpha_c), format_double(r.residual),
                      bool_str(r.asymptotic), format_double(r.asymptote_alpha),
                      r.error.value_or("")});
  }
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

// ---- entropy / corr --------------------------------------------------------

std::string cmd_alpha_curve(const RunConfig& c, bool entropy) {
  ModelParams base = c.params;
  base.alpha = 0.0;
  base = validate(base);
  CriticalSearchOpts cs;
  cs.solver = c.solver;
  const double ac = find_alpha_c(base.delta, base.k_ising, base.s, cs).alpha_c;
  const double limit = 1.1 * ac;

  CsvTable t;
  t.comments.push_back("alpha_c = " + format_double(ac));
  RunConfig clamped = c;
  if (clamped.stop && *clamped.stop > limit) {
    clamped.stop = limit;
    t.comments.push_back("clamped: validity window (alpha <= 1.1 alpha_c = " +
                         format_double(limit) + ")");
  }
  const auto grid = make_grid(clamped, 0.0, limit, 111, "linear");
  SolverOpts so = c.solver;
  so.alpha_c = ac;
  const auto points = alpha_sweep(base, grid, so);

  t.header = {"alpha", entropy ? "entropy" : "c12", "sz", "branch", "valid", "error"};
  for (const auto& pt : points) {
    if (pt.report) {
      const auto& r = *pt.report;
      t.rows.push_back({format_double(pt.alpha), format_double(entropy ? r.entropy : r.c12),
                        format_double(r.sz), std::string(to_string(r.branch)),
                        bool_str(r.validity.all()), ""});
    } else {
      t.rows.push_back({format_double(pt.alpha), "nan", "nan", "", "false", *pt.error});
    }
  }
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

// ---- exponents -------------------------------------------------------------

json fit_json(const ExponentFit& f) {
  return {{"value", f.value},         {"slope", f.slope},
          {"intercept", f.intercept}, {"r_squared", f.r_squared},
          {"window", f.window},       {"n_points", f.n_points},
          {"accepted", f.accepted()}};
}

std::string cmd_exponents(const RunConfig& c) {
  ModelParams p = c.params;
  p.alpha = 0.0;
  p = validate(p);
  const ExponentSuite e = exponent_suite(p.s, p.delta, p.k_ising);
  json doc{{"s", e.s},
           {"delta", e.delta},
           {"k_ising", e.k_ising},
           {"alpha_c", e.alpha_c},
           {"delta_c", e.delta_c},
           {"alpha_zeta", e.alpha_zeta},
           {"k_c", e.k_c},
           {"exponents",
            {{"delta", fit_json(e.delta_exp)},
             {"gamma", fit_json(e.gamma)},
             {"beta", fit_json(e.beta)},
             {"beta_prime", fit_json(e.beta_prime)},
             {"zeta", fit_json(e.zeta)}}}};
  return doc.dump(2) + "\n";
}

// ---- oracle ----------------------------------------------------------------

std::string cmd_oracle(const RunConfig& c) {
  const ModelParams p = validate(c.params);
  const DiscreteBath bath =
      log_discretize(ContinuumBath{p.alpha, p.s, p.omega_c}, c.lambda, c.modes);
  const GroundStateReport ansatz = ground_state(p, SpectralEvaluator(bath), c.solver);

  CsvTable t;
  t.comments.push_back("modes = " + std::to_string(c.modes) +
                       ", lambda = " + format_double(c.lambda));
  t.header = {"n_max", "e_exact", "e_ansatz", "difference", "sz_exact", "sx_exact",
              "sz_ansatz", "sx_ansatz", "change", "error"};
  std::optional<double> previous;
  std::vector<double> energies;
  for (const int n : c.nmax) {
    try {
      const EdResult r = exact_ground(p, bath, TruncationSpec{n, std::nullopt});
      const double change = previous ? r.energy - *previous : 0.0;
      previous = r.energy;
      energies.push_back(r.energy);
      t.rows.push_back({std::to_string(n), format_double(r.energy), format_double(ansatz.e_g),
                        format_double(ansatz.e_g - r.energy), format_double(r.sz),
                        format_double(r.sx), format_double(ansatz.sz), format_double(ansatz.sx),
                        format_double(change), ""});
    } catch (const Error& e) {
      t.rows.push_back({std::to_string(n), "nan", format_double(ansatz.e_g), "nan", "nan",
                        "nan", format_double(ansatz.sz), format_double(ansatz.sx), "nan",
                        e.what()});
    }
  }
  if (energies.size() >= 2) {
    const double last = energies.back() - energies[energies.size() - 2];
    t.comments.push_back(std::string("truncation converged: ") +
                         bool_str(std::abs(last) <= 1e-8));
  }
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

// ---- golden ----------------------------------------------------------------

struct GoldenCase {
  std::string file;
  std::vector<std::string> args;
};

std::vector<GoldenCase> golden_cases() {
  return {
      {"solve_ohmic.json",
       {"solve", "--s", "1", "--delta", "0.1", "--alpha", "0.1", "--epsilon", "1e-5", "--chi"}},
      {"solve_decoupled.json",
       {"solve", "--s", "1", "--delta", "0.1", "--alpha", "0", "--epsilon", "1e-5"}},
      {"phase_delta.csv",
       {"phase", "--axis", "delta", "--s", "0.5,1", "--k", "0", "--start", "0.01", "--stop",
        "0.1", "--count", "4"}},
      {"phase_k.csv",
       {"phase", "--axis", "k", "--s", "1", "--delta", "0.1", "--start", "-0.1", "--stop",
        "0.1", "--count", "5"}},
      {"entropy_subohmic.csv",
       {"entropy", "--s", "0.5", "--delta", "0.1", "--k", "0", "--epsilon", "1e-6", "--count",
        "23"}},
      {"corr_ohmic.csv",
       {"corr", "--s", "1", "--delta", "0.1", "--k", "0", "--epsilon", "1e-6", "--count", "23"}},
      {"exponents_s050.json", {"exponents", "--s", "0.5", "--delta", "0.1", "--k", "0"}},
      {"oracle_weak.csv",
       {"oracle", "--s", "1", "--alpha", "0.01", "--delta", "0.1", "--epsilon", "1e-5",
        "--modes", "4", "--nmax", "2,3"}},
  };
}

bool close(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  if (a == b) return true;
  return std::abs(a - b) <= 1e-12 + 1e-8 * std::max(std::abs(a), std::abs(b));
}

bool same_cell(const std::string& a, const std::string& b) {
  if (a == b) return true;
  try {
    return close(parse_double(a), parse_double(b));
  } catch (const Error&) {
    return false;
  }
}

bool same_json(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return close(a.get<double>(), b.get<double>());
  if (a.type() != b.type()) return false;
  if (a.is_object()) {
    if (a.size() != b.size()) return false;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key()) || !same_json(it.value(), b.at(it.key()))) return false;
    }
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!same_json(a[i], b[i])) return false;
    }
    return true;
  }
  return a == b;
}

bool same_output(const std::string& file, const std::string& got, const std::string& want) {
  if (file.ends_with(".json")) {
    return same_json(json::parse(got), json::parse(want));
  }
  std::istringstream gs(got);
  std::istringstream ws(want);
  const CsvTable g = read_csv(gs);
  const CsvTable w = read_csv(ws);
  if (g.header != w.header || g.rows.size() != w.rows.size() ||
      g.comments.size() != w.comments.size()) {
    return false;
  }
  for (std::size_t i = 0; i < g.comments.size(); ++i) {
    if (g.comments[i] != w.comments[i]) {
      // Comments may carry numbers ("alpha_c = ..."); compare the tail.
      const auto gp = g.comments[i].rfind(' ');
      const auto wp = w.comments[i].rfind(' ');
      if (gp == std::string::npos || wp == std::string::npos ||
          g.comments[i].substr(0, gp) != w.comments[i].substr(0, wp) ||
          !same_cell(g.comments[i].substr(gp + 1), w.comments[i].substr(wp + 1))) {
        return false;
      }
    }
  }
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    if (g.rows[r].size() != w.rows[r].size()) return false;
    for (std::size_t k = 0; k < g.rows[r].size(); ++k) {
      if (!same_cell(g.rows[r][k], w.rows[r][k])) return false;
    }
  }
  return true;
}

int run_golden(const std::string& dir, bool update, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  int failures = 0;
  for (const auto& gc : golden_cases()) {
    std::ostringstream produced;
    std::ostringstream diag;
    const int code = run(gc.args, produced, diag);
    const fs::path path = fs::path(dir) / gc.file;
    if (code != 0) {
      out << "FAIL " << gc.file << " (exit " << code << ": " << diag.str() << ")\n";
      ++failures;
      continue;
    }
    if (update) {
      std::ofstream(path) << produced.str();
      out << "WROTE " << gc.file << "\n";
      continue;
    }
    std::ifstream in(path);
    if (!in) {
      out << "FAIL " << gc.file << " (missing golden file)\n";
      ++failures;
      continue;
    }
    std::stringstream want;
    want << in.rdbuf();
    bool ok = false;
    try {
      ok = same_output(gc.file, produced.str(), want.str());
    } catch (const std::exception& e) {
      err << gc.file << ": " << e.what() << "\n";
    }
    out << (ok ? "PASS " : "FAIL ") << gc.file << "\n";
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case Errc::NotConverged:
    case Errc::QuadratureNotConverged:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground state and quantum criticality of two qubits in a common bath"};
  app.require_subcommand(0, 1);

  bool golden = false;
  bool update_golden = false;
  std::string golden_dir = TQSB_GOLDEN_DIR;
  app.add_flag("--golden", golden, "re-run the reference cases and diff against golden files");
  app.add_flag("--update-golden", update_golden, "rewrite the golden files");
  app.add_option("--golden-dir", golden_dir, "directory of golden files");

  Command solve(app, "solve", "single-point ground state (JSON report)");
  solve.add_model(true, true);
  solve.add_numerics();
  solve.add("--format", "format", solve.config().format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  solve.app()->add_flag("--chi", solve.config().chi, "also compute the susceptibility");

  Command phase(app, "phase", "critical coupling along the Delta or K axis (CSV)");
  phase.add_model(false, false);
  phase.add_numerics();
  phase.add_grid();
  phase.add("--axis", "axis", phase.config().axis, "delta | k")
      ->check(CLI::IsMember({"delta", "k"}));

  Command entropy(app, "entropy", "entanglement entropy against alpha (CSV)");
  entropy.add_model(false, true);
  entropy.add_numerics();
  entropy.add_grid();

  Command corr(app, "corr", "qubit-qubit correlation against alpha (CSV)");
  corr.add_model(false, true);
  corr.add_numerics();
  corr.add_grid();

  Command exponents(app, "exponents", "critical exponents by log-log fits (JSON)");
  exponents.add_model(false, true);

  Command oracle(app, "oracle", "exact diagonalization check on a discretized bath (CSV)");
  oracle.add_model(true, true);
  oracle.add_numerics();
  oracle.add("--modes", "modes", oracle.config().modes, "number of bath modes (<= 8)");
  oracle.add("--lambda", "lambda", oracle.config().lambda, "discretization base");
  oracle.add("--nmax", "nmax", oracle.config().nmax, "boson truncations")->delimiter(',');

  std::vector<const char*> argv{"tqsb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (golden || update_golden) return run_golden(golden_dir, update_golden, out, err);

  const std::pair<Command*, std::function<std::string(const RunConfig&)>> table[] = {
      {&solve, cmd_solve},
      {&phase, cmd_phase},
      {&entropy, [](const RunConfig& c) { return cmd_alpha_curve(c, true); }},
      {&corr, [](const RunConfig& c) { return cmd_alpha_curve(c, false); }},
      {&exponents, cmd_exponents},
      {&oracle, cmd_oracle},
  };
  for (auto& [cmd, fn] : table) {
    if (!cmd->parsed()) continue;
    try {
      cmd->finish();
      const std::string text = fn(cmd->config());
      const std::string& path = cmd->config().output;
      if (path.empty()) {
        out << text;
      } else {
        std::ofstream file(path);
        if (!file) throw Error(Errc::InvalidConfig, "cannot write " + path);
        file << text;
      }
      return 0;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return exit_code(e);
    }
  }
  err << app.help();
  return 1;
}

}  // namespace tqsb::cli
