#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mms/parallel.hpp"

using mms::cli::RunConfig;

namespace {

void common(CLI::App* sub, RunConfig& cfg, unsigned& threads) {
  sub->add_option("--in", cfg.in, "instance directory written by `example`");
  sub->add_option("--geometry", cfg.geometry, "segment|ball|cantor|composite|grid2d|line");
  sub->add_option("--size", cfg.size, "grid side (points per axis)");
  sub->add_option("--out", cfg.out, "output directory");
  sub->add_option("--seed", cfg.seed, "function-suite seed");
  sub->add_option("--threads", threads, "worker cap, 0 = all cores");
  sub->add_option("--eps", cfg.eps, "scale ratio");
  sub->add_option("--theta", cfg.theta, "codimension for the measure sequence");
  sub->add_option("--p", cfg.p, "integrability exponent");
  sub->add_option("--K", cfg.K, "sequence depth");
  sub->add_option("--J", cfg.J, "extension depth");
  sub->add_option("--functions", cfg.functions, "number of test functions");
  sub->add_option("--cantor-theta", cfg.cantor_theta);
  sub->add_option("--cantor-K", cfg.cantor_K);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace functionals, extensions and potentials on finite metric measure spaces"};
  app.require_subcommand(1);
  RunConfig cfg;
  unsigned threads = 1;

  auto* ex = app.add_subcommand("example", "write a named example geometry");
  common(ex, cfg, threads);

  auto* ev = app.add_subcommand("eval", "evaluate CN, BSN, BN and N over a function suite");
  common(ev, cfg, threads);
  ev->add_option("--c", cfg.c, "dilation, default 3/eps");
  ev->add_option("--sigma", cfg.sigma, "porosity");
  ev->add_option("--budget", cfg.budget, "exact-search candidate budget");
  ev->add_option("--delta-grid", cfg.delta_grid, "scales for the min over delta");
  ev->add_option("--suite", cfg.suite, "lipschitz|constant");

  auto* ve = app.add_subcommand("verify", "run the invariant suites");
  common(ve, cfg, threads);
  ve->add_option("--c", cfg.c, "dilation, default 3/eps");
  ve->add_option("--budget", cfg.budget, "exact-search candidate budget");
  ve->add_option("--R", cfg.R, "potential radius");
  ve->add_option("--fault", cfg.fault, "inject a fault: partition");

  auto* et = app.add_subcommand("extend", "extend a function suite off S");
  common(et, cfg, threads);

  auto* po = app.add_subcommand("potentials", "Riesz and Wolff fields, Hedberg-Wolff check");
  common(po, cfg, threads);
  po->add_option("--R", cfg.R, "potential radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : mms::cli::kInputError;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  mms::set_threads(threads);
  return mms::cli::run(cfg);
}
