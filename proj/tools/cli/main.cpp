#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hydrolimit/errors.hpp"
#include "hydrolimit_io/pipelines.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int fail(int code, const std::string& type, const std::string& message) {
  std::cout << hydrolimit::io::error_record(type, message).dump(2) << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  hydrolimit::io::RunConfig cfg;
  CLI::App app{"Particle cascades, limit measures and weak-residual checks"};
  app.set_config("--config", "", "flat key = value configuration file");
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string scenario;
  app.add_option("--scenario", scenario, "ghost | reverse | transverse | layers | scatter | sweep");
  app.add_option("--N", cfg.N, "particle count (repeat or list for sweeps)")->delimiter(',');
  app.add_option("--horizon", cfg.horizon, "snapshot window half-width (layers: end time)");
  app.add_option("--snapshots", cfg.snapshots, "number of uniform snapshots");
  app.add_option("--bins", cfg.bins, "'default' or bins per unit length");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--kind", cfg.kind, "layers: two | three | both");
  app.add_option("--sigma", cfg.sigma, "scatter: interaction range");
  app.add_option("--alphas", cfg.alphas, "scatter: impact parameters on [0, sigma]");
  app.add_option("--speeds", cfg.speeds, "scatter: incoming speeds")->delimiter(',');
  app.add_option("--residual-snapshots", cfg.residual_snapshots, "sweep: snapshots for residuals");
  app.add_option("--threads", cfg.threads, "sweep parallelism (0: hardware; HYDROLIMIT_THREADS caps)");
  app.add_option("--tol.energy", cfg.tol.energy, "relative energy drift tolerance");
  app.add_option("--tol.momentum", cfg.tol.momentum, "momentum drift tolerance");
  app.add_option("--tol.velocity", cfg.tol.velocity, "terminal velocity tolerance");
  app.add_option("--tol.q-energy", cfg.tol.q_energy, "Q-subsystem energy tolerance");
  app.add_option("--tol.free-transport", cfg.tol.free_transport, "1-D free-transport tolerance");
  app.add_option("--tol.residual", cfg.tol.residual, "weak residual tolerance");
  app.add_option("--tol.fields", cfg.tol.fields, "binned field tolerance (0: 5/N)");

  for (const char* name : {"ghost", "reverse", "transverse", "layers", "scatter", "sweep"}) {
    app.add_subcommand(name, std::string("run the ") + name + " pipeline");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "ParseError", e.what());
  }

  const auto subs = app.get_subcommands();
  if (!subs.empty()) {
    if (!scenario.empty() && scenario != subs.front()->get_name()) {
      return fail(kExitConfig, "DomainError", "--scenario disagrees with the subcommand");
    }
    scenario = subs.front()->get_name();
  }
  if (!scenario.empty()) cfg.scenario = scenario;

  try {
    hydrolimit::io::validate(cfg);
    const auto summary = hydrolimit::io::run(cfg);
    std::cout << summary.dump(2) << std::endl;
  } catch (const hydrolimit::DomainError& e) {
    return fail(kExitConfig, "DomainError", e.what());
  } catch (const hydrolimit::UnsupportedCollision& e) {
    return fail(kExitRuntime, "UnsupportedCollision", e.what());
  } catch (const hydrolimit::ConstructionError& e) {
    return fail(kExitRuntime, "ConstructionError", e.what());
  } catch (const hydrolimit::NumericalError& e) {
    return fail(kExitRuntime, "NumericalError", e.what());
  } catch (const std::exception& e) {
    return fail(kExitRuntime, "Error", e.what());
  }
  return 0;
}
