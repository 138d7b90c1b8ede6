#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpe/config.hpp"

namespace lpe {

struct GateResult {
  std::string name;
  bool passed = false;
  /// Measured values; deterministic for a fixed config.
  std::string detail;
  /// Wall time, reported on stderr only.
  double seconds = 0.0;
};

/// Writes artifacts into one directory and records them for the manifest. JSON artifacts
/// get a "config_hash" member, CSV artifacts a leading "# config_hash=" line, and
/// snapshot files carry the hash in their name. A disabled sink writes nothing.
class ArtifactSink {
 public:
  ArtifactSink() = default;
  ArtifactSink(std::string dir, std::string hash);

  bool enabled() const noexcept { return enabled_; }
  const std::string& hash() const noexcept { return hash_; }

  void json(const std::string& name, nlohmann::json body);
  void csv(const std::string& name, const std::string& body);
  void snapshot(const std::string& stem, const SpectralField& f);
  /// MANIFEST.json listing every artifact written so far.
  void manifest(const std::string& kind, const std::vector<GateResult>& gates);
  const std::vector<std::string>& files() const noexcept { return files_; }

 private:
  void write(const std::string& name, const std::string& bytes);
  bool enabled_ = false;
  std::string dir_;
  std::string hash_;
  std::vector<std::string> files_;
};

struct ExperimentResult {
  std::vector<GateResult> gates;
  std::vector<std::string> artifacts;
  bool passed() const;
  /// First failing gate, empty when all pass.
  std::string failing_gate() const;
};

/// Runs the gates of one experiment kind and writes its artifacts.
ExperimentResult run_experiment(const ExperimentConfig& cfg, ArtifactSink& sink);
/// Same, writing into cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct VerifyOptions {
  std::uint64_t seed = 1;
  bool fault_inject = false;
};

struct VerifySummary {
  std::vector<GateResult> gates;
  bool passed() const;
  /// Fixed-width pass/fail table; identical bytes for identical options.
  std::string table() const;
};

/// Every acceptance gate at desk-scale defaults.
VerifySummary verify_all(const VerifyOptions& options, const std::function<void(const GateResult&)>& progress = {});

/// Product-law sweep over an eps list; one gate per (s1, p) cell.
ExperimentResult sweep_experiment(const std::vector<double>& eps, std::uint64_t seed, ArtifactSink& sink);

}  // namespace lpe
