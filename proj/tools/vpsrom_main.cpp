#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "selftest.hpp"
#include "vpsrom/config.hpp"
#include "vpsrom/orchestrator.hpp"

namespace {

int selftest()
{
  int failed = 0;
  for (const oracle::Check& c : oracle::run_oracle_suite()) {
    std::printf("%-4s %-10s %-60s %.3e (tol %.0e)\n", c.pass() ? "ok" : "FAIL", c.suite.c_str(),
                c.name.c_str(), c.value, c.tol);
    failed += !c.pass();
  }
  std::printf("%d oracle check(s) failed\n", failed);
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Reduced-order Vlasov-Poisson toolkit"};
  app.require_subcommand(1, 1);

  std::string config_path, benchmark, output;
  std::vector<std::string> overrides;
  int workers = 0;
  std::string log_level = "info";

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--benchmark", benchmark, "weak_landau | nonlinear_landau | two_stream");
    sub->add_option("--override", overrides, "key=value, repeatable")->take_all();
    sub->add_option("--workers", workers, "worker threads");
    sub->add_option("--output", output, "output directory");
    sub->add_option("--log-level", log_level, "trace | debug | info | warn | error");
  };
  CLI::App* full = app.add_subcommand("full", "full-order PIC batch");
  CLI::App* rom = app.add_subcommand("rom", "dynamical reduced model");
  CLI::App* compare = app.add_subcommand("compare", "both, plus error diagnostics");
  app.add_subcommand("selftest", "oracle suites of every module");
  for (CLI::App* s : {full, rom, compare}) add_run_flags(s);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (app.got_subcommand("selftest")) return selftest();

  try {
    nlohmann::json j;
    if (!config_path.empty()) {
      j = vpsrom::to_json(vpsrom::load_config(config_path));
    } else {
      vpsrom::BenchmarkKind kind = vpsrom::benchmark_from_string(
          benchmark.empty() ? std::string("weak_landau") : benchmark);
      j = vpsrom::to_json(vpsrom::default_config(kind));
    }
    if (!config_path.empty() && !benchmark.empty())
      spdlog::warn("--benchmark ignored because --config was given");
    for (const std::string& o : overrides) vpsrom::apply_override(j, o);
    vpsrom::RunConfig cfg = vpsrom::config_from_json(j);
    cfg.mode = vpsrom::mode_from_string(app.get_subcommands().front()->get_name());
    if (workers > 0) cfg.workers = workers;
    if (!output.empty()) cfg.output_dir = output;
    cfg.validate();

    spdlog::info("{} run of {}: N={} Nx={} p={} n={} dt={} t_final={}", vpsrom::to_string(cfg.mode),
                 vpsrom::to_string(cfg.spec.kind), cfg.spec.N, cfg.spec.Nx, cfg.spec.p, cfg.spec.n,
                 cfg.spec.dt, cfg.spec.t_final);
    vpsrom::RunReport report = vpsrom::run(cfg);
    vpsrom::serialize(report, cfg, cfg.output_dir);
    spdlog::info("results written to {}", cfg.output_dir);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
