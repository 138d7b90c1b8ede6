#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpe/trajectory.hpp"

namespace lpe {

struct LyapunovParams {
  double c_tilde = 0.5;
  int k = 2;
  /// Weight of the gradient term ||(grad Delta_j n, grad Delta_j v)||^2 on the left of the balance.
  double kappa = 1.0;
  /// Throws ConfigError unless c_tilde 2^-k < 1.
  void validate() const;
};

struct LyapunovValue {
  /// eps L_j^2 = 2^{2j} eps ||(Delta_j n, Delta_j v)||^2 + 2 c_tilde int Delta_j v . grad Delta_j n.
  double value = 0.0;
  /// value / (2^{2j} eps ||(Delta_j n, Delta_j v)||^2).
  double ratio = 1.0;
};

/// Requires j >= J_eps. nullopt for an empty block.
std::optional<LyapunovValue> lyapunov_block(const LPBasis& basis, const EulerState& state, int j,
                                            const LyapunovParams& params);

struct BalanceReport {
  int j = 0;
  std::vector<double> t;
  /// 1/2 d/dt (eps L_j^2) + kappa ||(grad Delta_j n, grad Delta_j v)||^2.
  std::vector<double> lhs;
  /// eps ||(d_t G, grad G, grad v)||_inf L_j^2 + L_j eps sum_i 2^j ||R_j^i||_2.
  std::vector<double> rhs;
  /// Magnitude of the two left-hand terms, for relative comparisons.
  std::vector<double> scale;
  double c_hat = 0.0;
  /// Largest lhs / scale (nonpositive for pure dissipation).
  double max_relative_lhs = 0.0;
  bool violation = false;
};

/// Three-point time differences on the stored states; endpoints are excluded.
BalanceReport dissipation_balance(const TrajectoryLedger& traj, int j, const LyapunovParams& params);

inline constexpr std::array<const char*, 7> kXtComponentNames = {
    "low_sup_nv",      // ||(n, v)||^l in L~inf(B^{d/p}_{p,1})
    "eps_l1_low_n",    // eps ||n||^l in L~1(B^{d/p+2}_{p,1})
    "l1_low_v",        // ||v||^l in L~1(B^{d/p+1}_{p,1})
    "eps_m12_l2_v",    // eps^{-1/2} ||v|| in L~2(B^{d/p}_{p,1})
    "eps_sup_high_nv", // eps ||(n, v)||^h in L~inf(B^{d/2+1}_{2,1})
    "l1_high_nv",      // ||(n, v)||^h in L~1(B^{d/2+1}_{2,1})
    "l1_z",            // ||v/eps + grad n|| in L~1(B^{d/p}_{p,1})
};

struct XtResult {
  std::array<double, 7> components{};
  double total = 0.0;
  double time = 0.0;
  bool degenerate = false;
  /// Fewer than three resolved blocks on one side of the threshold.
  bool rejected = false;
  bool truncated = false;
  double quadrature_error = 0.0;
};

/// X(T) over the first `upto` samples (all when 0); a single sample gives X(0).
XtResult xt_functional(const TrajectoryLedger& traj, std::size_t upto = 0);

struct AprioriReport {
  std::vector<double> T;
  std::vector<double> X;
  std::vector<double> c_hat;
  double x0 = 0.0;
  double c_max = 0.0;
  bool degenerate = false;
};

/// C(T) = X(T) / (X(0) + X(T)^2) at the sample times closest below each entry of t_grid.
AprioriReport apriori_constant(const TrajectoryLedger& traj, const std::vector<double>& t_grid);

/// Evenly spaced grid of `count` times over (0, T_final] plus a geometric head near 0.
std::vector<double> default_t_grid(const TrajectoryLedger& traj, std::size_t count = 48);

struct DarcyReport {
  std::vector<double> t;
  /// ||z(t)||_{B^{d/p}_{p,1}}.
  std::vector<double> defect;
  double l1 = 0.0;
  double quadrature_error = 0.0;
};

DarcyReport darcy_defect(const TrajectoryLedger& traj);

/// ||(n, v)||^h_{B^{d/2+1}_{2,1}} per sample.
std::vector<double> high_band_series(const TrajectoryLedger& traj);
/// ||Delta_j n||_{L^p} per sample.
std::vector<double> low_block_series(const TrajectoryLedger& traj, int j);

/// Least-squares rate r in y ~ exp(-r t) over samples with t in [t0, t1] and y > floor.
std::optional<double> fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t0,
                                     double t1, double floor = 0.0);

/// Minimum and maximum Lyapunov equivalence ratio over the stored states, for j >= J_eps.
struct RatioRange {
  double min = 1.0;
  double max = 1.0;
  std::size_t evaluations = 0;
};
RatioRange lyapunov_ratio_range(const TrajectoryLedger& traj, const LyapunovParams& params);

nlohmann::json to_json(const XtResult& x);
nlohmann::json diagnostics_report(const TrajectoryLedger& traj, const AprioriReport& apriori,
                                  const DarcyReport& darcy);
/// CSV t,X,c_hat.
std::string apriori_csv(const AprioriReport& r);
/// CSV t,defect.
std::string darcy_csv(const DarcyReport& r);

}  // namespace lpe
