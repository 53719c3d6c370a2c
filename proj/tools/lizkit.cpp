#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "commands.hpp"
#include "lizkit/checks.hpp"
#include "lizkit/errors.hpp"

using namespace lizkit::cli;

namespace {

void add_family_flags(CLI::App* cmd, FamilyArgs& f) {
  cmd->add_option("--family", f.family, "periodic | fraclap | ridge")
      ->check(CLI::IsMember({"periodic", "fraclap", "ridge"}));
  cmd->add_option("--alpha", f.alpha, "Order of the operator");
  cmd->add_option("--period", f.period, "Period (periodic family)");
  cmd->add_option("--order", f.order, "Fourier truncation (periodic family)");
  cmd->add_option("--m", f.m, "Ridge order (ridge family)");
  cmd->add_option("--dim", f.dim, "Dimension of the data locations");
  cmd->add_flag("--polynomial", f.polynomial, "Add the unpenalized polynomial part (ridge family)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse spline fitting with fractional, Green's kernel and ridge dictionaries"};
  app.require_subcommand(1);

  FitConfig fit_cfg;
  CLI::App* fit = app.add_subcommand("fit", "Fit a sparse spline to (location..., y) samples");
  add_family_flags(fit, fit_cfg.family);
  fit->add_option("--lambda", fit_cfg.lambdas, "Regularization weight, or a comma-separated ladder");
  fit->add_flag("--interpolate", fit_cfg.interpolate, "Fit the data exactly by continuation in lambda");
  fit->add_option("--loss", fit_cfg.loss, "quadratic | huber")->check(CLI::IsMember({"quadratic", "huber"}));
  fit->add_option("--delta", fit_cfg.delta, "Huber threshold");
  fit->add_option("--data", fit_cfg.data, "Input CSV")->required();
  fit->add_option("--out", fit_cfg.out, "Model JSON")->required();
  fit->add_option("--diagnostics", fit_cfg.diagnostics, "Iteration CSV");
  fit->add_option("--residuals", fit_cfg.residuals, "Residual CSV");
  fit->add_option("--rel-gap", fit_cfg.rel_gap, "Relative duality gap target");
  fit->add_option("--max-iter", fit_cfg.max_iter, "Exchange iterations per lambda");
  fit->add_option("--grid-jitter", fit_cfg.grid_jitter, "Seeded jitter of the candidate grid, in grid steps");
  fit->add_option("--seed", fit_cfg.seed, "Random seed (LIZKIT_SEED overrides)");

  EvalConfig eval_cfg;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on a grid or on given points");
  eval->add_option("--model", eval_cfg.model, "Model JSON")->required();
  eval->add_option("--points", eval_cfg.points, "CSV whose leading columns are locations");
  eval->add_option("--grid", eval_cfg.grid, "start:stop:count per axis, comma separated");
  eval->add_option("--out", eval_cfg.out, "Output CSV (default stdout)");

  VerifyConfig verify_cfg;
  CLI::App* verify = app.add_subcommand("verify", "Run the invariant checks");
  verify->add_option("--only", verify_cfg.only, "Check groups to run")->delimiter(',');
  verify->add_option("--tol-scale", verify_cfg.tolerance_scale, "Multiplier on every tolerance");
  verify->add_option("--out", verify_cfg.out, "Output CSV (default stdout)");
  verify->add_option("--seed", verify_cfg.seed, "Random seed (LIZKIT_SEED overrides)");

  VerifyConfig radon_cfg;
  CLI::App* radon_check = app.add_subcommand("radon-check", "Run the Radon-domain checks");
  radon_check->add_option("--tol-scale", radon_cfg.tolerance_scale, "Multiplier on every tolerance");
  radon_check->add_option("--out", radon_cfg.out, "Output CSV (default stdout)");

  GrowthConfig growth_cfg;
  CLI::App* growth = app.add_subcommand("growth-check", "Growth of a kernel derivative or of a ridge model");
  growth->add_option("--model", growth_cfg.model, "Ridge model JSON");
  growth->add_option("--alpha", growth_cfg.alpha, "Kernel order");
  growth->add_option("--dim", growth_cfg.dim, "Kernel dimension");
  growth->add_option("--k", growth_cfg.k, "Multi-index, comma separated");
  growth->add_option("--r-min", growth_cfg.r_min);
  growth->add_option("--r-max", growth_cfg.r_max);
  growth->add_option("--shells", growth_cfg.shells);
  growth->add_option("--directions", growth_cfg.directions);
  growth->add_option("--slope-tol", growth_cfg.slope_tolerance);
  growth->add_option("--out", growth_cfg.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("UsageError", e.what());
    return kExitInput;
  }

  try {
    if (*fit) return cmd_fit(fit_cfg);
    if (*eval) return cmd_eval(eval_cfg);
    if (*verify) return cmd_verify(verify_cfg);
    if (*radon_check) return cmd_verify(radon_cfg, lizkit::radon_check_groups());
    if (*growth) return cmd_growth(growth_cfg);
  } catch (const lizkit::Error& e) {
    report_error(e.kind(), e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return kExitInput;
  }
  return kExitInput;
}
