#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpe/diagnostics.hpp"
#include "lpe/inequality_lab.hpp"
#include "lpe/trajectory.hpp"

namespace lpe {

enum class ExperimentKind {
  verify_basis,
  verify_bony,
  product_law_sweep,
  linear_exactness,
  simulate,
  apriori_sweep,
  darcy_sweep,
};

std::string kind_name(ExperimentKind kind);

struct GridConfig {
  int d = 1;
  int N = 1024;
  double M = 16.0;
  double cutoff = 2.0 / 3.0;
  Grid make() const { return Grid(d, N, M, cutoff); }
};

struct EnsembleSection {
  std::size_t count = 50;
  SpectralProfile profile;
  double amplitude = 1.0;
};

struct ProductLawSection {
  std::vector<double> s1{0.125, 0.25, 0.375};
  std::vector<double> p{1.0, 1.5};
  int k = 2;
  std::vector<double> eps;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::verify_basis;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  /// Corrupts one basis block before the reconstruction gate.
  bool fault_inject = false;
  GridConfig grid;
  EnsembleSection ensemble;
  ProductLawSection product_law;
  EulerParams euler;
  InitialDataSpec initial;
  SimulationConfig simulation;
  /// In sweeps, a positive value sets dt_start = dt_start_eps * eps for every run.
  double dt_start_eps = 0.0;
  std::vector<double> snapshot_times;
  std::vector<double> sweep_eps;
  LyapunovParams lyapunov;

  /// Ensemble configuration implied by the grid, ensemble section and seed.
  EnsembleConfig ensemble_config() const;
};

/// Defaults for a kind; parsing overlays the file on top of these.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses and validates a JSON config. Errors are ConfigError with messages of the
/// form "<source>:<line>: <what>". Unknown keys are rejected at every level.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

/// Normalized form with every default filled in (output_dir excluded).
nlohmann::json to_json(const ExperimentConfig& cfg);
/// Hash of the normalized form; embedded in every artifact.
std::string config_hash(const ExperimentConfig& cfg);

/// eps = 2^e for e from `first` down to `last` (inclusive), e.g. "0:-8".
std::vector<double> parse_eps_range(const std::string& spec);

}  // namespace lpe
