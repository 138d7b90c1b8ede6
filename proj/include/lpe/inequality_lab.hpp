#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpe/littlewood_paley.hpp"

namespace lpe {

enum class ProfileKind { flat, power, band };

/// Per-block amplitude law. `power` makes ||Delta_j f||_2 scale like 2^{-j exponent};
/// `flat` is exponent 0; `band` keeps only modes with |log2|xi| - j| <= width.
struct SpectralProfile {
  ProfileKind kind = ProfileKind::flat;
  double exponent = 0.0;
  double j = 0.0;
  double width = 0.125;
};

struct EnsembleConfig {
  std::uint64_t seed = 1;
  std::size_t count = 1;
  SpectralProfile profile;
  int d = 1;
  int N = 1024;
  double M = 16.0;
  double cutoff = 2.0 / 3.0;
  /// L^2 norm of every generated field.
  double amplitude = 1.0;

  Grid grid() const { return Grid(d, N, M, cutoff); }
};

/// Deterministic mean-free real fields; amplitudes follow the profile, phases are iid uniform.
std::vector<SpectralField> generate_ensemble(const EnsembleConfig& cfg);
/// Field `index` of the ensemble, generated on its own.
SpectralField ensemble_member(const EnsembleConfig& cfg, const Grid& grid, std::size_t index);

/// Block norms of a, b and ab that every ratio of the product law is assembled from.
struct PairNorms {
  std::vector<double> exponents;
  /// ab_p[e], b_p[e]: block norms at exponents[e]; b_2, a_2: L^2 block norms.
  std::vector<std::vector<double>> ab_p;
  std::vector<std::vector<double>> b_p;
  std::vector<double> b_2;
  std::vector<double> a_2;
};

PairNorms pair_norms(const LPBasis& basis, const SpectralField& a, const SpectralField& b,
                     const std::vector<double>& exponents);

struct ProductLawSample {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Throws ConfigError unless 0 < s1 < d/2, 1 <= p < 2 and J_eps lies in [j_min + 2, j_max - 2].
void check_product_law_params(const LPBasis& basis, double s1, double p, double eps, int k);

/// ||ab||^l_{B^{s1}_{p,1}} / [(||b||^l_{B^{s1}_{p,1}} + 2^{(s1 - d/p) J} ||b||^h_{B^{d/2}_{2,1}}) ||a||_{B^{d/2}_{2,1}}].
/// nullopt when the denominator vanishes (sample discarded).
std::optional<ProductLawSample> product_law_ratio(const LPBasis& basis, const SpectralField& a,
                                                  const SpectralField& b, double s1, double p, double eps, int k);
std::optional<ProductLawSample> product_law_ratio(const LPBasis& basis, const PairNorms& norms, double s1, double p,
                                                  double eps, int k);

struct ConstantReport {
  std::string lemma = "product_law";
  double s1 = 0.0;
  double p = 1.0;
  double eps = 1.0;
  int k = 2;
  int d = 1;
  int threshold = 0;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> ratio;
  double c_emp = 0.0;
  double mean_ratio = 0.0;
  std::size_t count = 0;
  std::size_t discarded = 0;
  /// Index of the sample attaining c_emp.
  std::size_t argmax = 0;
  std::string saturating_term;
  std::string profile;
  std::string bump_fingerprint;
  std::string grid_fingerprint;
};

nlohmann::json to_json(const ConstantReport& r);

struct SweepResult {
  std::vector<ConstantReport> reports;
  /// max_eps C_emp / min_eps C_emp over the retained eps.
  double uniformity = 1.0;
  std::vector<double> skipped_eps;
};

/// Pairs (a_i, b_i) are members 2i and 2i+1 of the ensemble described by cfg, each of
/// count cfg.count. The same pairs are reused for every eps.
SweepResult epsilon_sweep(const EnsembleConfig& cfg, double s1, double p, int k, const std::vector<double>& eps_list);

/// Several (s1, p) cells over one ensemble; block norms are computed once per pair.
std::vector<SweepResult> epsilon_sweep_grid(const EnsembleConfig& cfg, const std::vector<double>& s1_list,
                                            const std::vector<double>& p_list, int k,
                                            const std::vector<double>& eps_list);

/// CSV eps,C_emp,mean_ratio,saturating_term.
std::string sweep_csv(const SweepResult& s);

struct SubtermReport {
  ProductLawSample whole;
  /// Ratios of ||T_a b||^l, ||T_b a||^l, ||R[a,b]||^l (all in B^{s1}_{p,1}) against the same
  /// right-hand side as the full law.
  double tab = 0.0;
  double tba = 0.0;
  double rem = 0.0;
  /// sum_{j' <= J-2} sum_{j <= J-2, |j-j'| <= 4} 2^{s1 j'} ||[Delta_j, S_{j'-1} a] Delta_j' b||_p
  /// over ||a||_{B^{d/2}_{2,1}} ||b||^l_{B^{s1}_{p,1}}.
  std::optional<double> window_low;
  /// Same sum over J-2 <= j' <= J+2, against 2^{(s1 - d/p) J} ||b||^h_{B^{d/2}_{2,1}} ||a||^h_{B^{d/2}_{2,1}}.
  std::optional<double> window_mid;
  double window_low_sum = 0.0;
  double window_mid_sum = 0.0;
  std::string saturating;
};

std::optional<SubtermReport> subterm_report(const LPBasis& basis, const SpectralField& a, const SpectralField& b,
                                            double s1, double p, double eps, int k);

nlohmann::json to_json(const SubtermReport& r);

std::string profile_name(const SpectralProfile& p);
/// "flat", "power" or "band".
std::string profile_kind_name(ProfileKind kind);
std::string grid_fingerprint(const Grid& g);

}  // namespace lpe
