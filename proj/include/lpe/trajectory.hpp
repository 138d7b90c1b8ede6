#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lpe/besov.hpp"
#include "lpe/euler.hpp"
#include "lpe/inequality_lab.hpp"
#include "lpe/littlewood_paley.hpp"

namespace lpe {

struct SimulationConfig {
  double t_final = 1.0;
  /// Fixed step, or the step cap once the start ramp has grown to it.
  double dt = 1e-3;
  /// A positive value starts the run at this step and grows it by `ramp` per step up to `dt`.
  double dt_start = 0.0;
  double ramp = 1.05;
  CflPolicy cfl;
  /// Shrink steps to the CFL bound instead of refusing them.
  bool adaptive_cfl = false;
  std::size_t max_samples = 10000;
  bool keep_states = false;
  /// Integrability exponent of the low-frequency norms.
  double p = 1.0;
  /// When set, a regime violation writes `<dump_prefix>.n.lpsf` and `.v.lpsf` before rethrowing.
  std::string dump_prefix;
};

/// Step sizes the simulator takes for a configuration when the CFL bound never binds.
std::vector<double> step_schedule(const SimulationConfig& cfg);
/// Times at which states are recorded: 0, every stride-th scheduled step, and t_final.
std::vector<double> sample_times(const SimulationConfig& cfg);

/// Per-sample block norms of n, v and z = v/eps + grad n, in L^p and L^2.
class TrajectoryLedger {
 public:
  TrajectoryLedger(std::shared_ptr<const LPBasis> basis, EulerParams params, double p, std::string fingerprint = {});

  void record(const EulerState& state, bool keep_state);

  const LPBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const LPBasis> basis_ptr() const noexcept { return basis_; }
  const EulerParams& params() const noexcept { return params_; }
  double p() const noexcept { return p_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  void set_fingerprint(std::string f) { fingerprint_ = std::move(f); }

  std::size_t samples() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const ChemLernerAccumulator& n_p() const noexcept { return n_p_; }
  const ChemLernerAccumulator& n_2() const noexcept { return n_2_; }
  const ChemLernerAccumulator& v_p() const noexcept { return v_p_; }
  const ChemLernerAccumulator& v_2() const noexcept { return v_2_; }
  const ChemLernerAccumulator& z_p() const noexcept { return z_p_; }
  const std::vector<EulerState>& states() const noexcept { return states_; }
  bool has_states() const noexcept { return !states_.empty() && states_.size() == times_.size(); }

  /// ||n||_2^2 + ||v||_2^2, ||n||_inf and mean(n) per sample.
  const std::vector<double>& energy() const noexcept { return energy_; }
  const std::vector<double>& n_sup() const noexcept { return n_sup_; }
  const std::vector<double>& n_mean() const noexcept { return n_mean_; }

  /// Long CSV: t,j,field,p,block_norm.
  std::string to_csv() const;

 private:
  std::shared_ptr<const LPBasis> basis_;
  EulerParams params_;
  double p_;
  std::string fingerprint_;
  std::vector<double> times_;
  ChemLernerAccumulator n_p_, n_2_, v_p_, v_2_, z_p_;
  std::vector<EulerState> states_;
  std::vector<double> energy_;
  std::vector<double> n_sup_;
  std::vector<double> n_mean_;
};

using StateObserver = std::function<void(const EulerState&)>;

/// Integrates from `initial` to cfg.t_final, recording at most cfg.max_samples samples
/// (initial and final state always included). With adaptive_cfl a step that would exceed
/// the CFL bound is shortened, and the state is recorded at the first step reaching each
/// planned sample time. The observer sees every recorded state.
TrajectoryLedger simulate(const EulerState& initial, const SimulationConfig& cfg,
                          std::shared_ptr<const LPBasis> basis, const StateObserver& observer = {});

enum class VelocityKind { ensemble, darcy, zero };

/// Seeded small data: n from ensemble member 0, v from members 1..d (or v = -eps grad n for
/// `darcy`), jointly scaled so the hypothesis norm at eps_ref equals delta_fraction * delta1.
struct InitialDataSpec {
  std::uint64_t seed = 1;
  SpectralProfile profile{ProfileKind::band, 0.0, 3.46, 0.02};
  double delta1 = 0.1;
  double delta_fraction = 0.5;
  VelocityKind velocity = VelocityKind::ensemble;
  /// ||v0||_2 / ||n0||_2 before scaling, for ensemble velocities.
  double velocity_weight = 1.0;
  /// eps at which the data are normalized; <= 0 uses the run's eps.
  double eps_ref = 0.0;
};

/// ||(n, v)||^l_{B^{d/p}_{p,1}} + eps ||(n, v)||^h_{B^{d/2+1}_{2,1}} at J = J_eps.
double hypothesis_norm(const LPBasis& basis, const SpectralField& n, const SpectralField& v, double eps, int k,
                       double p);

EulerState make_initial_data(const LPBasis& basis, const EulerParams& params, const InitialDataSpec& spec, double p);

/// Largest relative defect over interior samples of the block-j enthalpy identity
///   d/dt Delta_j n - eps Lap Delta_j n + eps div Delta_j z + Delta_j(v.grad n) + Delta_j(G(n) div v) = 0
/// with the time derivative taken by three-point differences. Requires stored states.
double reformulation_residual(const TrajectoryLedger& traj, int j);

}  // namespace lpe
