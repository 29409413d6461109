#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wavebound/analysis.hpp"
#include "wavebound/bounds.hpp"
#include "wavebound/errors.hpp"
#include "wavebound/fdm_oracle.hpp"
#include "wavebound/modematch.hpp"
#include "wavebound/variational.hpp"

namespace wavebound::cli {

namespace {

using nlohmann::json;

constexpr const char* kCsvHeader = "# wavebound-csv v1\n";
constexpr const char* kVersion = "1.0.0";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// sweep and thresholds pick their own window ratios.
bool needs_lambda(const std::string& command) { return command != "sweep" && command != "thresholds"; }

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["model"] = to_string(c.model);
  j["d"] = c.d;
  if (needs_lambda(c.command)) j["lambda"] = c.resolved_lambda();
  j["modes"] = c.modes;
  j["scan_points"] = c.scan_points;
  if (c.command == "sweep" || c.command == "analyze") {
    j["lambda_lo"] = c.lambda_lo;
    j["lambda_hi"] = c.lambda_hi;
    j["step"] = c.step;
  }
  if (c.command == "field" || c.command == "oracle" || c.command == "analyze") j["branch"] = c.branch;
  if (c.command == "field") {
    j["nx"] = c.nx;
    j["ny"] = c.ny;
    j["x_halfwidth"] = c.x_halfwidth;
  }
  if (c.command == "oracle") {
    j["spacings"] = c.spacings;
    j["half_length"] = c.half_length;
  }
  if (c.command == "analyze") j["rho"] = c.rho;
  return j;
}

std::string json_document(const RunConfig& c, json results) {
  json doc;
  doc["config"] = config_json(c);
  doc["results"] = std::move(results);
  doc["provenance"] = {{"tool", "wavebound"}, {"version", kVersion}};
  return doc.dump(2) + "\n";
}

ScanOptions scan_options(const RunConfig& c) {
  ScanOptions o;
  o.grid_points = c.scan_points;
  return o;
}

void require_brackets(const Spectrum& s) {
  const BracketCheck check = check_brackets(s);
  if (check.ok) return;
  std::ostringstream os;
  os << "spectrum at lambda=" << num(s.geometry.lambda()) << " violates the bracketing bounds:";
  for (const auto& v : check.violations) os << "\n  " << v;
  throw InvariantViolation(os.str());
}

json spectrum_rows_json(const Spectrum& s) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.size(); ++i)
    rows.push_back({{"lambda", s.geometry.lambda()},
                    {"branch_index", i + 1},
                    {"eigenvalue_over_mu", s.eigenvalues[i]},
                    {"residual", s.residuals[i]},
                    {"stable", static_cast<bool>(s.stable[i])}});
  return rows;
}

void spectrum_rows_csv(std::ostream& os, const Spectrum& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    os << num(s.geometry.lambda()) << ',' << i + 1 << ',' << num(s.eigenvalues[i]) << ',' << num(s.residuals[i])
       << ',' << (s.stable[i] ? 1 : 0) << '\n';
}

constexpr const char* kSpectrumColumns = "lambda,branch_index,eigenvalue_over_mu,residual,stable\n";

std::string cmd_spectrum(const RunConfig& c) {
  const Spectrum s = scan_spectrum(c.model, c.geometry(), c.modes, scan_options(c));
  require_brackets(s);
  if (c.format == Format::Json) return json_document(c, {{"spectrum", spectrum_rows_json(s)}});
  std::ostringstream os;
  os << kCsvHeader << kSpectrumColumns;
  spectrum_rows_csv(os, s);
  return os.str();
}

std::string cmd_sweep(const RunConfig& c) {
  const std::vector<double> grid = lambda_grid(c.lambda_lo, c.lambda_hi, c.step);
  ScanOptions o = scan_options(c);
  SweepResult r = sweep(c.model, grid, c.modes, o, c.jobs);
  for (const auto& s : r.spectra) require_brackets(s);
  if (c.format == Format::Json) {
    json rows = json::array();
    for (const auto& s : r.spectra)
      for (auto& row : spectrum_rows_json(s)) rows.push_back(std::move(row));
    return json_document(c, {{"sweep", rows}});
  }
  std::ostringstream os;
  os << kCsvHeader << kSpectrumColumns;
  for (const auto& s : r.spectra) spectrum_rows_csv(os, s);
  return os.str();
}

EigenField branch_field(const RunConfig& c, Spectrum& spectrum_out) {
  spectrum_out = scan_spectrum(c.model, c.geometry(), c.modes, scan_options(c));
  require_brackets(spectrum_out);
  if (c.branch < 1 || static_cast<std::size_t>(c.branch) > spectrum_out.size()) {
    std::ostringstream os;
    os << "branch " << c.branch << " does not exist at lambda=" << num(c.resolved_lambda()) << " (model "
       << to_string(c.model) << " has " << spectrum_out.size() << " eigenvalue(s) below the threshold)";
    throw MissingBranch(os.str());
  }
  return eigenfield(spectrum_out, static_cast<std::size_t>(c.branch - 1));
}

std::string cmd_field(const RunConfig& c) {
  Spectrum s;
  const EigenField f = branch_field(c, s);
  const double lambda = c.resolved_lambda();
  const double halfwidth = c.x_halfwidth > 0.0 ? c.x_halfwidth : lambda + 3.0;
  std::vector<double> xs(c.nx), ys(c.ny);
  for (int i = 0; i < c.nx; ++i) xs[i] = -halfwidth + 2.0 * halfwidth * i / (c.nx - 1);
  for (int j = 0; j < c.ny; ++j) ys[j] = static_cast<double>(j) / (c.ny - 1);
  if (c.format == Format::Json) {
    json density = json::array();
    for (const double x : xs) {
      json column = json::array();
      for (const double y : ys) {
        const double v = f(x, y);
        column.push_back(v * v);
      }
      density.push_back(std::move(column));
    }
    return json_document(c, {{"branch", c.branch},
                             {"eigenvalue_over_mu", f.energy_over_mu()},
                             {"x", xs},
                             {"y", ys},
                             {"density", std::move(density)}});
  }
  std::ostringstream os;
  os << kCsvHeader << "x,y,density\n";
  for (const double x : xs)
    for (const double y : ys) {
      const double v = f(x, y);
      os << num(x) << ',' << num(y) << ',' << num(v * v) << '\n';
    }
  return os.str();
}

std::string cmd_bounds(const RunConfig& c) {
  const BracketReport r = bracket_report(c.resolved_lambda());
  if (c.format == Format::Json) {
    json windows = json::array();
    for (std::size_t m = 0; m < r.windows.size(); ++m)
      windows.push_back({{"m", m + 1},
                         {"lower", r.windows[m].lower},
                         {"upper", r.windows[m].upper},
                         {"vacuous", r.windows[m].vacuous}});
    return json_document(c, {{"lambda", r.lambda},
                             {"n_min", r.counts.n_min},
                             {"n_max", r.counts.n_max},
                             {"windows", std::move(windows)}});
  }
  std::ostringstream os;
  os << kCsvHeader << "lambda,n_min,n_max,m,window_lower,window_upper,vacuous\n";
  for (std::size_t m = 0; m < r.windows.size(); ++m)
    os << num(r.lambda) << ',' << r.counts.n_min << ',' << r.counts.n_max << ',' << m + 1 << ','
       << num(r.windows[m].lower) << ',' << num(r.windows[m].upper) << ',' << (r.windows[m].vacuous ? 1 : 0) << '\n';
  return os.str();
}

std::string cmd_thresholds(const RunConfig& c) {
  const LowerThreshold low = lambda1();
  const double upper = lambda2();
  // The lower bound is proven empty and the upper one proven occupied, so
  // the numerical emergence point is searched between them.
  const Emergence e = emergence_point(ModelKind::A, 1, low.lambda1, upper, c.modes, 1e-4, scan_options(c));
  const ThresholdReport r = threshold_report(e.lambda);
  if (c.format == Format::Json)
    return json_document(c, {{"lambda1", r.lambda1},
                             {"kappa0", r.kappa0},
                             {"lambda2", r.lambda2},
                             {"lambda0_numeric", r.lambda0_numeric},
                             {"ordering_ok", r.ordering_ok}});
  std::ostringstream os;
  os << kCsvHeader << "quantity,value\n"
     << "lambda1," << num(r.lambda1) << '\n'
     << "kappa0," << num(r.kappa0) << '\n'
     << "lambda2," << num(r.lambda2) << '\n'
     << "lambda0_numeric," << num(r.lambda0_numeric) << '\n'
     << "ordering_ok," << (r.ordering_ok ? 1 : 0) << '\n';
  return os.str();
}

std::string cmd_oracle(const RunConfig& c) {
  const Geometry g = c.geometry();
  std::vector<double> spacings;
  for (const double h : c.spacings) spacings.push_back(h * c.d);
  const double half_length = c.half_length > 0.0 ? c.half_length * c.d : default_half_length(g);
  const auto branch = static_cast<std::size_t>(c.branch - 1);
  const Spectrum s = scan_spectrum(c.model, g, c.modes, scan_options(c));
  require_brackets(s);
  if (branch >= s.size()) {
    std::ostringstream os;
    os << "branch " << c.branch << " does not exist at lambda=" << num(c.resolved_lambda());
    throw MissingBranch(os.str());
  }
  const Extrapolation x = extrapolate(c.model, g, spacings, half_length, branch);
  const double mm = s.eigenvalues[branch];
  if (c.format == Format::Json) {
    json grids = json::array();
    for (std::size_t i = 0; i < x.spacings.size(); ++i)
      grids.push_back({{"h_over_d", x.spacings[i] / c.d}, {"eigenvalue_over_mu", x.eigenvalues[i]}});
    return json_document(c, {{"grids", std::move(grids)},
                             {"extrapolated", x.estimate},
                             {"order", x.order},
                             {"modematch", mm},
                             {"difference", x.estimate - mm}});
  }
  std::ostringstream os;
  os << kCsvHeader << "kind,h_over_d,eigenvalue_over_mu,order\n";
  for (std::size_t i = 0; i < x.spacings.size(); ++i)
    os << "grid," << num(x.spacings[i] / c.d) << ',' << num(x.eigenvalues[i]) << ",\n";
  os << "richardson,0," << num(x.estimate) << ',' << num(x.order) << '\n';
  os << "modematch,0," << num(mm) << ",\n";
  return os.str();
}

std::string cmd_analyze(const RunConfig& c) {
  const double lambda = c.resolved_lambda();
  std::vector<double> grid;
  if (c.range_given) {
    grid = lambda_grid(c.lambda_lo, c.lambda_hi, c.step);
  } else {
    for (int i = 0; i < 5; ++i) grid.push_back(lambda * (1.0 + (c.rho - 1.0) * i / 4.0));
    if (c.rho == 1.0)
      for (int i = 0; i < 5; ++i) grid[i] = lambda * (1.0 + 0.1 * i);
  }
  const SweepResult r = sweep(c.model, grid, c.modes, scan_options(c), c.jobs);
  for (const auto& s : r.spectra) require_brackets(s);
  const MonotonicityReport mono = monotonicity_check(r);
  const ScalingReport scale = scaling_check_at(r, lambda, c.rho);

  Spectrum s;
  const EigenField f = branch_field(c, s);
  const auto radii = default_corner_radii();
  json corners = json::array();
  std::ostringstream corner_csv;
  for (const Corner& corner : switch_points(c.model, lambda)) {
    const CornerFit fit = corner_exponent(f, corner, radii);
    const char* wall = corner.wall == Wall::Bottom ? "bottom" : "top";
    corners.push_back({{"x", corner.x}, {"wall", wall}, {"exponent", fit.exponent}, {"fit_quality", fit.fit_quality}});
    corner_csv << "corner_exponent," << num(corner.x) << ',' << wall << ',' << num(fit.exponent) << ','
               << num(fit.fit_quality) << '\n';
  }
  if (c.format == Format::Json) {
    json violations = json::array();
    for (const auto& v : mono.violations)
      violations.push_back({{"branch", v.branch + 1}, {"index", v.index}, {"rise", v.rise}});
    return json_document(c, {{"monotonicity", {{"ok", mono.ok}, {"violations", std::move(violations)}}},
                             {"scaling",
                              {{"rho", c.rho},
                               {"ok", scale.ok},
                               {"worst_margin", scale.worst_margin},
                               {"violations", scale.violations}}},
                             {"corners", std::move(corners)}});
  }
  std::ostringstream os;
  os << kCsvHeader << "check,a,b,value,extra\n";
  os << "monotonicity,," << ',' << (mono.ok ? 1 : 0) << ',' << mono.violations.size() << '\n';
  os << "scaling," << num(lambda) << ',' << num(c.rho) << ',' << (scale.ok ? 1 : 0) << ','
     << num(scale.worst_margin) << '\n';
  os << corner_csv.str();
  return os.str();
}

void validate(const RunConfig& c) {
  if (c.lambda && c.delta) throw ConfigError("give only one of --lambda or --delta");
  if (!(c.d > 0.0)) throw ConfigError("--d must be positive");
  if (needs_lambda(c.command)) {
    if (!c.lambda && !c.delta) throw ConfigError("command '" + c.command + "' needs --lambda or --delta");
    if (!(c.resolved_lambda() > 0.0)) throw ConfigError("--lambda / --delta must be positive");
  }
  if (c.modes < kMinModes || c.modes > kMaxModes)
    throw ConfigError("--modes must lie in [" + std::to_string(kMinModes) + ", " + std::to_string(kMaxModes) + "]");
  if (c.scan_points < 10) throw ConfigError("--scan-points must be at least 10");
  if (c.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (c.command == "sweep" || c.range_given)
    if (!(c.lambda_lo > 0.0 && c.lambda_hi >= c.lambda_lo && c.step > 0.0))
      throw ConfigError("sweep range needs 0 < lambda-lo <= lambda-hi and step > 0");
  if (c.branch < 1) throw ConfigError("--branch is 1-based");
  if (c.nx < 2 || c.ny < 2) throw ConfigError("--nx and --ny must be at least 2");
  if (c.spacings.size() < 3) throw ConfigError("--spacings needs at least three values");
  if (!(c.rho >= 1.0)) throw ConfigError("--rho must be at least 1");
}

}  // namespace

double RunConfig::resolved_lambda() const {
  if (lambda) return *lambda;
  if (delta) return *delta / d;
  return 0.0;
}

Geometry RunConfig::geometry() const { return Geometry(d, resolved_lambda() * d); }

std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::ostream& out) {
  RunConfig c;
  CLI::App app{"Bound states of a planar waveguide with combined Dirichlet and Neumann walls", "wavebound"};
  app.allow_config_extras(false);
  app.set_config("--config", "", "Flat key=value configuration file; command-line flags take precedence");

  std::string model = "A";
  std::string format = "csv";
  double lambda = 0.0, delta = 0.0;
  app.add_option("command", c.command, "spectrum | sweep | field | bounds | thresholds | oracle | analyze")
      ->required()
      ->check(CLI::IsMember({"spectrum", "sweep", "field", "bounds", "thresholds", "oracle", "analyze"}));
  app.add_option("--model", model, "Boundary layout A or B")->check(CLI::IsMember({"A", "B", "a", "b"}));
  auto* lambda_opt = app.add_option("--lambda", lambda, "Window ratio delta / d");
  auto* delta_opt = app.add_option("--delta", delta, "Half window delta (with --d)");
  app.add_option("--d", c.d, "Strip width (default 1)");
  app.add_option("--modes", c.modes, "Modal truncation N (default 64)");
  app.add_option("--scan-points", c.scan_points, "Energy scan samples (default 400)");
  app.add_option("--out", c.out, "Output file (default standard output)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", c.jobs, "Concurrent lambda points in sweeps (default 1)");
  auto* lo_opt = app.add_option("--lambda-lo", c.lambda_lo, "Sweep start (default 0.05)");
  auto* hi_opt = app.add_option("--lambda-hi", c.lambda_hi, "Sweep end (default 3.0)");
  auto* step_opt = app.add_option("--step", c.step, "Sweep step (default 0.05)");
  app.add_option("--branch", c.branch, "Eigenvalue branch, 1-based (default 1)");
  app.add_option("--nx", c.nx, "Field grid points in x (default 201)");
  app.add_option("--ny", c.ny, "Field grid points in y (default 41)");
  app.add_option("--x-halfwidth", c.x_halfwidth, "Field window half width in units of d (default lambda + 3)");
  app.add_option("--spacings", c.spacings, "Oracle grid spacings in units of d, fixed ratio")->delimiter(',');
  app.add_option("--half-length", c.half_length, "Oracle truncation L in units of d (default lambda + 12)");
  app.add_option("--rho", c.rho, "Scaling factor for the analysis (default 1.5)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  try {
    c.model = parse_model(model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.format = format == "json" ? Format::Json : Format::Csv;
  if (lambda_opt->count() > 0) c.lambda = lambda;
  if (delta_opt->count() > 0) c.delta = delta;
  c.range_given = lo_opt->count() + hi_opt->count() + step_opt->count() > 0;
  validate(c);
  return c;
}

std::string execute(const RunConfig& c) {
  if (c.command == "spectrum") return cmd_spectrum(c);
  if (c.command == "sweep") return cmd_sweep(c);
  if (c.command == "field") return cmd_field(c);
  if (c.command == "bounds") return cmd_bounds(c);
  if (c.command == "thresholds") return cmd_thresholds(c);
  if (c.command == "oracle") return cmd_oracle(c);
  if (c.command == "analyze") return cmd_analyze(c);
  throw ConfigError("unknown command '" + c.command + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const std::optional<RunConfig> config = parse_arguments(args, out);
    if (!config) return kOk;
    const std::string document = execute(*config);
    if (config->out.empty()) {
      out << document;
    } else {
      std::ofstream file(config->out, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file " + config->out);
      file << document;
      if (!file) throw ConfigError("failed writing output file " + config->out);
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "wavebound: configuration error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::invalid_argument& e) {
    err << "wavebound: configuration error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const MissingBranch& e) {
    err << "wavebound: " << e.what() << '\n';
    return kMissingBranch;
  } catch (const InvariantViolation& e) {
    err << "wavebound: internal inconsistency: " << e.what() << '\n';
    return kInvariantViolation;
  } catch (const ConvergenceError& e) {
    err << "wavebound: did not converge: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::domain_error& e) {
    err << "wavebound: did not converge: " << e.what() << '\n';
    return kNonConvergence;
  }
}

}  // namespace wavebound::cli
