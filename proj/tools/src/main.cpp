#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "einmob/expr.hpp"
#include "einmob/metric.hpp"
#include "einmob/parse.hpp"

using namespace einmob;
using namespace einmob::cli;

namespace {

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--seed", opt.seed, "Seed for all sampling")->capture_default_str();
  cmd->add_option("--tol", opt.tol, "Residual tolerance")->capture_default_str();
  cmd->add_option("--trials", opt.trials, "Sample points per check")->capture_default_str();
}

int emit(const std::string& command, const std::function<Outcome()>& run) {
  int code = exit_ok;
  std::string message;
  try {
    Outcome out = run();
    if (out.text) {
      std::cout << *out.text;
    } else {
      std::cout << out.report.dump(2) << '\n';
    }
    if (out.exit_code == exit_failed) std::cerr << command << ": verification failed\n";
    return out.exit_code;
  } catch (const DegenerateMetricError& e) {
    code = exit_degenerate;
    message = e.what();
  } catch (const InputError& e) {
    code = exit_input;
    message = e.what();
  } catch (const ParseError& e) {
    code = exit_input;
    message = e.what();
  } catch (const std::invalid_argument& e) {
    code = exit_input;
    message = e.what();
  } catch (const std::exception& e) {
    code = exit_error;
    message = e.what();
  }
  std::cerr << command << ": " << message << '\n';
  std::cout << error_report(command, message, code).dump(2) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degree of mobility and projective structure of Einstein metrics"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string file_a;
  std::string file_b;
  std::optional<std::string> solution;
  MobilityArgs mob;
  int sign = 1;
  int dim = 5;
  std::string sig = "riemannian";
  std::string regime = "non-affine";
  int from = 3;
  int to = 15;
  GeodesicArgs geo;
  std::optional<std::string> emit_name;

  const char* source_help = "Metric file, or catalog:NAME";

  auto* check = app.add_subcommand("check", "Symmetry, signature, Einstein and constant-curvature report");
  check->add_option("file", file_a, source_help)->required();
  add_common(check, common);

  auto* verify = app.add_subcommand("verify", "Verify stored solutions of the main equation");
  verify->add_option("file", file_a, source_help)->required();
  verify->add_option("--solution", solution, "Solution name (default: all)");
  add_common(verify, common);

  auto* mobility = app.add_subcommand("mobility", "Dimension of parallel sections by two independent oracles");
  mobility->add_option("file", file_a, source_help)->required();
  mobility->add_option("--fiber", mob.fiber, "prolongation, sym2, oneform or vector")->capture_default_str();
  mobility->add_option("--order", mob.order, "Highest curvature derivative order")->capture_default_str();
  mobility->add_option("--samples", mob.samples, "Sample points for the kernel oracle")->capture_default_str();
  mobility->add_option("--loops", mob.loops, "Loops per coordinate plane for the transport oracle")
      ->capture_default_str();
  mobility->add_option("--rank-tol", mob.rank_tol, "Relative singular value cutoff")->capture_default_str();
  add_common(mobility, common);

  auto* cone_cmd = app.add_subcommand("cone", "Emit the metric cone sign*dr^2 + r^2 g");
  cone_cmd->add_option("file", file_a, source_help)->required();
  cone_cmd->add_option("--sign", sign, "Sign of dr^2")->check(CLI::IsMember({1, -1}))->capture_default_str();

  auto* product_cmd = app.add_subcommand("product", "Emit the product metric");
  product_cmd->add_option("first", file_a, source_help)->required();
  product_cmd->add_option("second", file_b, source_help)->required();

  auto* enumerate = app.add_subcommand("enumerate", "Admissible values for a dimension and signature class");
  enumerate->add_option("--dim", dim, "Dimension n >= 3")->required();
  enumerate->add_option("--signature", sig, "riemannian or lorentzian")->capture_default_str();
  enumerate->add_option("--regime", regime,
                        "non-affine, affine-nonzero-scal, affine-ricci-flat or projective-dims")
      ->capture_default_str();

  auto* figure1 = app.add_subcommand("figure1", "TSV plot data: n, value, lorentz_extra");
  figure1->add_option("--from", from, "First dimension")->capture_default_str();
  figure1->add_option("--to", to, "Last dimension")->capture_default_str();

  auto* geodesic = app.add_subcommand("geodesic-test", "Check that two metrics share unparametrized geodesics");
  geodesic->add_option("first", file_a, source_help)->required();
  geodesic->add_option("second", file_b, source_help)->required();
  geodesic->add_option("--seeds", geo.seeds, "Number of random geodesics")->capture_default_str();
  geodesic->add_option("--steps", geo.steps, "RK4 steps per geodesic")->capture_default_str();
  geodesic->add_option("--step", geo.step, "RK4 step size")->capture_default_str();
  geodesic->add_option("--minor-tol", geo.minor_tol, "Tolerance on 2x2 minors relative to scale")
      ->capture_default_str();
  add_common(geodesic, common);

  auto* catalog_cmd = app.add_subcommand("catalog", "List the catalog or emit one entry as a metric file");
  catalog_cmd->add_option("--emit", emit_name, "Entry to emit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_input;
  }

  if (*check) return emit("check", [&] { return cmd_check(load_metric(file_a), common); });
  if (*verify) return emit("verify", [&] { return cmd_verify(load_metric(file_a), solution, common); });
  if (*mobility) return emit("mobility", [&] { return cmd_mobility(load_metric(file_a), mob, common); });
  if (*cone_cmd) return emit("cone", [&] { return cmd_cone(load_metric(file_a), sign); });
  if (*product_cmd) return emit("product", [&] { return cmd_product(load_metric(file_a), load_metric(file_b)); });
  if (*enumerate) return emit("enumerate", [&] { return cmd_enumerate(dim, sig, regime); });
  if (*figure1) return emit("figure1", [&] { return cmd_figure1(from, to); });
  if (*geodesic) {
    return emit("geodesic-test",
                [&] { return cmd_geodesic_test(load_metric(file_a), load_metric(file_b), geo, common); });
  }
  if (*catalog_cmd) return emit("catalog", [&] { return cmd_catalog(emit_name); });
  return exit_input;
}
