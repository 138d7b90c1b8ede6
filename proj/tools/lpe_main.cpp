// lpe: experiment runner and verification suite.
//
//   lpe run <config.json>
//   lpe verify [--seed S] [--fault-inject]
//   lpe sweep --eps 0:-8 --seed S [--out DIR]
//
// Exit codes: 0 all gates pass, 1 a gate failed, 2 invalid config or arguments.
// LPE_THREADS sets the worker count.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "lpe/error.hpp"
#include "lpe/experiment.hpp"
#include "lpe/hash.hpp"
#include "lpe/parallel.hpp"

namespace {

void print_gates(const std::vector<lpe::GateResult>& gates) {
  for (const auto& g : gates)
    std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << "  " << g.detail << '\n';
}

int finish(const lpe::ExperimentResult& res) {
  print_gates(res.gates);
  std::cout << res.artifacts.size() << " artifacts + MANIFEST.json\n";
  if (res.passed()) return 0;
  std::cerr << "gate failed: " << res.failing_gate() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Littlewood-Paley toolkit for the damped compressible Euler system"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  run->add_option("config", config_path, "config file")->required();

  std::uint64_t seed = 1;
  bool fault = false;
  auto* verify = app.add_subcommand("verify", "run every acceptance gate at desk-scale defaults");
  verify->add_option("--seed", seed, "ensemble seed");
  verify->add_flag("--fault-inject", fault, "corrupt one basis block before the reconstruction gate");

  std::string eps_range = "0:-8";
  std::string out_dir = "out/sweep";
  auto* sweep = app.add_subcommand("sweep", "product-law sweep over eps = 2^a ... 2^b");
  sweep->add_option("--eps", eps_range, "exponent range a:b");
  sweep->add_option("--seed", seed, "ensemble seed");
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::cerr << "threads: " << lpe::thread_count() << '\n';
  try {
    if (*run) {
      const auto cfg = lpe::load_config(config_path);
      return finish(lpe::run_experiment(cfg));
    }
    if (*verify) {
      const auto summary = lpe::verify_all({seed, fault}, [](const lpe::GateResult& g) {
        std::fprintf(stderr, "%-40s %s %8.2f s\n", g.name.c_str(), g.passed ? "PASS" : "FAIL", g.seconds);
      });
      std::cout << summary.table();
      return summary.passed() ? 0 : 1;
    }
    if (*sweep) {
      auto cfg = lpe::default_config(lpe::ExperimentKind::product_law_sweep);
      cfg.seed = seed;
      cfg.product_law.eps = lpe::parse_eps_range(eps_range);
      cfg.output_dir = out_dir;
      lpe::ArtifactSink sink(out_dir, lpe::config_hash(cfg));
      return finish(lpe::run_experiment(cfg, sink));
    }
  } catch (const lpe::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
