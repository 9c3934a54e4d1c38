// superrad: reproduce figure/table data sets and take one-shot measurements.

#include <iostream>

#include "CLI11.hpp"
#include "harness/config.hpp"
#include "harness/runner.hpp"
#include "superrad/parallel.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kCapacity = 3, kIntegration = 4 };

template <class Fn>
int guarded(Fn&& fn) {
  using namespace superrad;
  try {
    fn();
    return kOk;
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n'
              << "hint: reduce the atom count (system.n_atoms, sweep.n_atoms or --n-atoms), lower system.n_fock, "
                 "or use a Dicke-family state so the symmetric sector applies\n";
    return kCapacity;
  } catch (const IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << '\n'
              << "hint: loosen integrator.rel_tol or lower integrator.max_step\n";
    return kIntegration;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace superrad;
  CLI::App app{"Superradiance and memory effects of atoms in a lossy cavity"};
  app.require_subcommand(1);
  unsigned jobs = default_jobs();
  app.add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "run an experiment config (cached by config hash)");
  std::string run_config;
  std::optional<std::string> out_dir;
  bool force = false, quiet = false;
  run->add_option("config", run_config, "experiment config file")->required();
  run->add_option("--out,-o", out_dir, "output root (default: $SUPERRAD_OUTPUT_ROOT, [experiment] output, results)");
  run->add_flag("--force,-f", force, "recompute even if cached results exist");
  run->add_flag("--quiet,-q", quiet, "suppress progress messages");
  run->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* val = app.add_subcommand("validate", "parse and validate a config, print its hash");
  std::string val_config;
  val->add_option("config", val_config, "experiment config file")->required();

  app.add_subcommand("list", "list experiment ids");

  auto* meas = app.add_subcommand("measure", "memory measure and radiation report for one state (JSON)");
  harness::MeasureRequest req;
  meas->add_option("--n-atoms,-n", req.n_atoms, "number of atoms")->check(CLI::PositiveNumber);
  meas->add_option("--state,-s", req.state,
                   "dicke:J,M | dephased:J,M,lambda | mixture:p... | factorized:ree,re[,im] | ground")
      ->required();
  meas->add_option("--gamma-over-g,-g", req.gamma_over_g, "cavity loss gamma/g")->check(CLI::NonNegativeNumber);
  meas->add_option("--window,-w", req.window, "window for tau10 + tau21, units 1/g");
  meas->add_option("--grid", req.grid_points, "grid points per axis")->check(CLI::Range(2, 1001));
  meas->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) {
    for (const auto& e : harness::experiment_catalog()) std::cout << e.id << "\t" << e.summary << '\n';
    return kOk;
  }
  if (app.got_subcommand("validate")) {
    return guarded([&] {
      const auto cfg = harness::ExperimentConfig::load(val_config);
      std::cout << cfg.id() << " " << cfg.hash() << '\n';
    });
  }
  if (app.got_subcommand("run")) {
    return guarded([&] {
      const auto cfg = harness::ExperimentConfig::load(run_config);
      harness::RunOptions opts;
      opts.out_root = harness::resolve_output_root(out_dir, cfg);
      opts.force = force;
      opts.jobs = jobs;
      opts.log = quiet ? nullptr : &std::cerr;
      const auto result = harness::run_experiment(cfg, opts);
      std::cout << (result.cache_hit ? "cached " : "wrote ") << result.dir.string() << '\n'
                << result.manifest["headline"].dump() << '\n';
    });
  }
  return guarded([&] {
    req.jobs = jobs;
    std::cout << harness::measure(req).dump() << '\n';
  });
}
