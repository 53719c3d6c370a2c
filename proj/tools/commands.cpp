#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "lizkit/checks.hpp"
#include "lizkit/errors.hpp"
#include "lizkit/green.hpp"
#include "lizkit/serialize.hpp"
#include "lizkit/solver.hpp"

namespace lizkit::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end == s.c_str() || *end != '\0' || !std::isfinite(v))
    throw Error(errc::kParseError, "cannot parse " + what + " \"" + s + "\"");
  return v;
}

bool parse_row(const std::string& line, std::vector<double>& row) {
  row.clear();
  for (std::string cell : split(line, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') return false;
    row.push_back(v);
  }
  return !row.empty();
}

/// Numeric rows of a CSV file; a non-numeric first line is taken as the header.
Eigen::MatrixXd read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::kInputNotFound, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> row;
  bool first = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const bool ok = parse_row(line, row);
    if (!ok && first) {
      first = false;
      continue;
    }
    first = false;
    if (!ok) throw Error(errc::kParseError, path + ":" + std::to_string(line_no) + ": non-numeric row");
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(errc::kParseError, path + ":" + std::to_string(line_no) + ": inconsistent column count");
    rows.push_back(row);
  }
  if (rows.empty()) throw Error(errc::kParseError, path + ": no data rows");
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  return out;
}

std::string location_header(int dim) {
  if (dim == 1) return "x";
  std::string h;
  for (int i = 1; i <= dim; ++i) h += (i > 1 ? ",x" : "x") + std::to_string(i);
  return h;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& header) {
    os_.precision(17);
    os_ << header << '\n';
  }
  template <typename... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << v, first = false), ...);
    os_ << '\n';
  }
  void cells(const Eigen::VectorXd& v, bool trailing_comma) {
    for (Eigen::Index i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << v[i];
    if (trailing_comma) os_ << ',';
  }
  std::ostream& stream() { return os_; }
  void save(const std::string& path) const {
    if (path.empty() || path == "-") {
      std::cout << os_.str();
      return;
    }
    std::ofstream out(path);
    if (!out) throw Error(errc::kInputNotFound, "cannot open " + path + " for writing");
    out << os_.str();
  }

 private:
  std::ostringstream os_;
};

Family make_family(const FamilyArgs& a) {
  if (a.family == "periodic") {
    PeriodicFamily f;
    f.alpha = a.alpha.value_or(f.alpha);
    f.period = a.period;
    f.order = a.order;
    return f;
  }
  if (a.family == "fraclap") {
    FracLapFamily f;
    f.alpha = a.alpha.value_or(f.alpha);
    f.dim = a.dim.value_or(f.dim);
    return f;
  }
  if (a.family == "ridge") {
    RidgeFamily f;
    f.m = a.m;
    f.dim = a.dim.value_or(f.dim);
    f.polynomial = a.polynomial;
    return f;
  }
  throw Error(errc::kInvalidArgument, "unknown family \"" + a.family + "\"");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::string sibling(const std::string& out, const std::string& explicit_path, const std::string& tag) {
  if (!explicit_path.empty()) return explicit_path;
  const std::size_t slash = out.find_last_of('/');
  const std::size_t dot = out.find_last_of('.');
  const std::string stem = (dot == std::string::npos || (slash != std::string::npos && dot < slash)) ? out : out.substr(0, dot);
  return stem + "." + tag + ".csv";
}

Eigen::MatrixXd grid_points(const std::string& spec, int dim) {
  std::vector<std::vector<double>> axes;
  for (const std::string& part : split(spec, ',')) {
    const std::vector<std::string> f = split(part, ':');
    if (f.size() != 3) throw Error(errc::kParseError, "grid axes are given as start:stop:count");
    const double a = parse_number(f[0], "grid start"), b = parse_number(f[1], "grid stop");
    const int n = static_cast<int>(parse_number(f[2], "grid count"));
    if (n < 1) throw Error(errc::kInvalidArgument, "grid count must be positive");
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    axes.push_back(axis);
  }
  if (axes.size() == 1)
    while (static_cast<int>(axes.size()) < dim) axes.push_back(axes.front());
  if (static_cast<int>(axes.size()) != dim) throw Error(errc::kSchemaMismatch, "grid has a different dimension than the model");
  Eigen::Index total = 1;
  for (const auto& ax : axes) total *= static_cast<Eigen::Index>(ax.size());
  Eigen::MatrixXd pts(total, dim);
  for (Eigen::Index r = 0; r < total; ++r) {
    Eigen::Index rem = r;
    for (int j = dim - 1; j >= 0; --j) {
      const Eigen::Index n = static_cast<Eigen::Index>(axes[j].size());
      pts(r, j) = axes[j][rem % n];
      rem /= n;
    }
  }
  return pts;
}

void write_diagnostics(const std::string& path, const FitResult& res) {
  CsvWriter csv("iter,objective,gap,n_atoms");
  for (const IterationRecord& r : res.trace) csv.row(r.iter, r.objective, r.gap, r.n_atoms);
  csv.save(path);
}

void write_residuals(const std::string& path, const FitProblem& problem, const FitResult& res) {
  CsvWriter csv(location_header(static_cast<int>(problem.x.cols())) + ",y,fitted,residual");
  for (Eigen::Index m = 0; m < problem.y.size(); ++m) {
    csv.cells(problem.x.row(m).transpose(), true);
    csv.row(problem.y[m], res.fitted[m], res.residuals[m]);
  }
  csv.save(path);
}

}  // namespace

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

std::uint64_t resolve_seed(std::uint64_t fallback) {
  const char* env = std::getenv("LIZKIT_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw Error(errc::kParseError, std::string("LIZKIT_SEED is not an unsigned integer: ") + env);
  return v;
}

int cmd_fit(const FitConfig& cfg) {
  FitProblem problem;
  problem.family = make_family(cfg.family);
  const int dim = family_dim(problem.family);

  std::vector<double> lambdas;
  for (const std::string& s : split(cfg.lambdas, ',')) lambdas.push_back(parse_number(s, "lambda"));
  if (lambdas.empty()) throw Error(errc::kInvalidArgument, "at least one lambda is required");
  for (double l : lambdas)
    if (!cfg.interpolate && !(l > 0.0)) throw Error(errc::kInvalidArgument, "lambda must be positive");
  if (!(cfg.rel_gap > 0.0)) throw Error(errc::kInvalidArgument, "rel-gap must be positive");
  if (cfg.loss == "huber")
    problem.loss = Loss::huber(cfg.delta);
  else if (cfg.loss != "quadratic")
    throw Error(errc::kInvalidArgument, "loss must be quadratic or huber");
  problem.interpolate = cfg.interpolate;
  if (cfg.out.empty()) throw Error(errc::kInvalidArgument, "--out is required");

  const Eigen::MatrixXd table = read_csv(cfg.data);
  if (table.cols() != dim + 1)
    throw Error(errc::kSchemaMismatch, "data rows must hold " + std::to_string(dim) + " location column(s) and y");
  problem.x = table.leftCols(dim);
  problem.y = table.col(dim);

  SolverOptions opt;
  opt.rel_gap = cfg.rel_gap;
  opt.max_iter = cfg.max_iter;
  opt.grid_jitter = cfg.grid_jitter;
  opt.seed = resolve_seed(cfg.seed);

  int code = kExitOk;
  const bool ladder = lambdas.size() > 1;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    problem.lambda = lambdas[i];
    const FitResult res = fit(problem, opt);
    const std::string suffix = ladder ? "." + std::to_string(i) : "";
    const std::string out = ladder ? with_suffix(cfg.out, suffix) : cfg.out;
    write_json(out, to_json(res.model));
    write_diagnostics(ladder ? with_suffix(sibling(cfg.out, cfg.diagnostics, "diagnostics"), suffix)
                             : sibling(cfg.out, cfg.diagnostics, "diagnostics"),
                      res);
    write_residuals(ladder ? with_suffix(sibling(cfg.out, cfg.residuals, "residuals"), suffix)
                           : sibling(cfg.out, cfg.residuals, "residuals"),
                    problem, res);
    std::cout << Json{{"model", out},
                      {"lambda", res.lambda},
                      {"status", status_name(res.status)},
                      {"objective", res.objective},
                      {"lower_bound", res.lower_bound},
                      {"atoms", atom_count(res.model)},
                      {"mnorm", mnorm_of_model(res.model)}}
                     .dump()
              << '\n';
    if (res.status == FitStatus::not_converged) {
      report_error(errc::kNotConverged, "lambda " + std::to_string(res.lambda) + ": duality gap above tolerance");
      code = kExitNotConverged;
    } else if (res.status == FitStatus::infeasible_interpolation) {
      report_error(errc::kInfeasibleInterpolation, "interpolation residual above tolerance");
      code = kExitNotConverged;
    }
  }
  return code;
}

int cmd_eval(const EvalConfig& cfg) {
  const Model model = model_from_json(read_json(cfg.model));
  const int dim = family_dim(model_family(model));
  Eigen::MatrixXd pts;
  if (!cfg.points.empty()) {
    const Eigen::MatrixXd table = read_csv(cfg.points);
    if (table.cols() < dim) throw Error(errc::kSchemaMismatch, "point rows have fewer columns than the model dimension");
    pts = table.leftCols(dim);
  } else {
    pts = grid_points(cfg.grid, dim);
  }
  const Eigen::VectorXd f = evaluate_points(model, pts);
  CsvWriter csv(location_header(dim) + ",f");
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    csv.cells(pts.row(i).transpose(), true);
    csv.row(f[i]);
  }
  csv.save(cfg.out);
  return kExitOk;
}

int cmd_verify(const VerifyConfig& cfg, const std::vector<std::string>& default_groups) {
  CheckOptions opt;
  opt.only = cfg.only.empty() ? default_groups : cfg.only;
  opt.tolerance_scale = cfg.tolerance_scale;
  opt.seed = resolve_seed(cfg.seed);
  const std::vector<CheckResult> results = run_checks(opt);
  CsvWriter csv("check,measured,tolerance,pass");
  int failed = 0;
  for (const CheckResult& r : results) {
    csv.row(r.group + "." + r.name, r.measured, r.tolerance, r.pass ? "true" : "false");
    failed += r.pass ? 0 : 1;
  }
  csv.save(cfg.out);
  if (failed > 0) {
    report_error("CheckFailed", std::to_string(failed) + " of " + std::to_string(results.size()) + " checks failed");
    return kExitInput;
  }
  return kExitOk;
}

int cmd_growth(const GrowthConfig& cfg) {
  if (!(cfg.r_min > 0.0) || !(cfg.r_max > cfg.r_min) || cfg.shells < 2 || cfg.directions < 1)
    throw Error(errc::kInvalidArgument, "need 0 < r-min < r-max, at least two shells and one direction");
  std::vector<double> radii;
  for (int i = 0; i < cfg.shells; ++i) radii.push_back(cfg.r_min * std::pow(cfg.r_max / cfg.r_min, i / (cfg.shells - 1.0)));

  CsvWriter csv("norm_x,ratio,bound_C");
  bool passed = false;
  double slope = 0.0;
  if (!cfg.model.empty()) {
    const Model model = model_from_json(read_json(cfg.model));
    const auto* ridge = std::get_if<RidgeModel>(&model);
    if (ridge == nullptr) throw Error(errc::kSchemaMismatch, "growth-check --model expects a ridge model");
    const ModelGrowthReport rep = ridge_growth_check(*ridge, radii, cfg.directions, cfg.slope_tolerance);
    for (const ModelGrowthSample& s : rep.samples) csv.row(s.norm_x, s.ratio, rep.bound_C);
    passed = rep.passed;
    slope = rep.slope;
  } else {
    MultiIndex k(cfg.dim, 0);
    if (!cfg.k.empty()) {
      const std::vector<std::string> parts = split(cfg.k, ',');
      if (static_cast<int>(parts.size()) != cfg.dim) throw Error(errc::kInvalidArgument, "--k needs one entry per dimension");
      for (int i = 0; i < cfg.dim; ++i) k[i] = static_cast<int>(parse_number(parts[i], "multi-index entry"));
    }
    const FracLaplaceKernel kern(cfg.alpha, cfg.dim, std::max(2, total_degree(k)));
    std::mt19937_64 rng(resolve_seed(0));
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXd> dirs;
    for (int j = 0; j < cfg.directions; ++j) {
      Eigen::VectorXd u(cfg.dim);
      if (cfg.dim == 1) {
        u[0] = j % 2 == 0 ? 1.0 : -1.0;
      } else if (cfg.dim == 2) {
        const double th = (j + 0.37) * 2.0 * M_PI / cfg.directions;
        u << std::cos(th), std::sin(th);
      } else {
        for (int i = 0; i < cfg.dim; ++i) u[i] = g(rng);
        u.normalize();
      }
      dirs.push_back(u);
    }
    std::vector<Eigen::VectorXd> samples;
    for (double r : radii)
      for (const Eigen::VectorXd& u : dirs) samples.push_back(r * u);
    const GrowthReport rep = verify_growth_bound(kern, k, samples, cfg.slope_tolerance);
    for (const GrowthSample& s : rep.samples) csv.row(s.norm_x, s.ratio, rep.bound_C);
    passed = rep.passed;
    slope = rep.slope;
  }
  csv.save(cfg.out);
  if (!passed) {
    report_error("CheckFailed", "growth ratio trend " + std::to_string(slope) + " exceeds the slope tolerance");
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace lizkit::cli
