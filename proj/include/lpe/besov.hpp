#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpe/littlewood_paley.hpp"

namespace lpe {

enum class Band { all, low, high };

/// Threshold between low and high frequencies: J = -floor(log2 eps) + k.
int frequency_threshold(double eps, int k);

/// Selects sum_{j in band} 2^{js} ||Delta_j f||_{L^p}; low is j <= J-1, high is j >= J.
struct HybridNormSpec {
  double s = 0.0;
  double p = 2.0;
  Band band = Band::all;
  int threshold = 0;
};

struct NormResult {
  double value = 0.0;
  /// Edge blocks (annulus only partly on the lattice) carry part of the sum.
  bool truncated = false;
  /// Threshold outside [j_min + 2, j_max - 2].
  bool degenerate = false;
};

/// Per-block L^p norms ||Delta_j f||_p for every stored block, indexed by j - j_lo.
/// p = 2 is evaluated through Parseval; other exponents by physical quadrature.
std::vector<double> block_norms(const LPBasis& basis, const SpectralField& f, double p);
/// Same for several exponents at once (one inverse transform per block).
std::vector<std::vector<double>> block_norms(const LPBasis& basis, const SpectralField& f,
                                             const std::vector<double>& exponents);

bool threshold_degenerate(const LPBasis& basis, int threshold);

/// Weighted dyadic sum over a band from precomputed block norms.
NormResult hybrid_sum(const LPBasis& basis, const std::vector<double>& norms, double s, Band band,
                      int threshold);

NormResult besov_seminorm(const LPBasis& basis, const SpectralField& f, const HybridNormSpec& spec);

/// ||f||^{h,J}_{B^s} / (2^{-sigma0 J} ||f||^{h,J}_{B^{s+sigma0}}); nullopt when the high band is empty.
std::optional<double> hl_shift_check(const LPBasis& basis, const SpectralField& f, double s, double sigma0,
                                     int threshold);
/// Low-band counterpart: ||f||^{l,J}_{B^s} / (2^{sigma0 J} ||f||^{l,J}_{B^{s-sigma0}}).
std::optional<double> hl_shift_check_low(const LPBasis& basis, const SpectralField& f, double s, double sigma0,
                                         int threshold);

/// ||f||_{B^{d/2}_{2,1}} / ||f||_{B^{d/p}_{p,1}}; nullopt for an empty field.
std::optional<double> embedding_ratio(const LPBasis& basis, const SpectralField& f, double p);

/// Per-block, per-time record of ||Delta_j f(t)||_{L^p} for Chemin-Lerner norms.
class ChemLernerAccumulator {
 public:
  ChemLernerAccumulator() = default;
  ChemLernerAccumulator(int j_lo, int j_hi, double p);

  /// Appends one time sample; times must be strictly increasing.
  void append(double t, std::vector<double> norms);

  int j_lo() const noexcept { return j_lo_; }
  int j_hi() const noexcept { return j_hi_; }
  double p() const noexcept { return p_; }
  std::size_t samples() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& row(std::size_t k) const { return rows_.at(k); }
  double norm(std::size_t k, int j) const;

  /// CSV with columns t,j,p,block_norm.
  std::string to_csv() const;

 private:
  int j_lo_ = 0;
  int j_hi_ = -1;
  double p_ = 2.0;
  std::vector<double> times_;
  std::vector<std::vector<double>> rows_;
};

struct CLNormResult {
  double value = 0.0;
  /// Richardson estimate |I(full) - I(every other sample)| / 3 for r < inf.
  double quadrature_error = 0.0;
  bool truncated = false;
  bool degenerate = false;
};

/// sum_j 2^{js} (int_0^T ||Delta_j f||^r dt)^{1/r} over the band (r = inf: per-block time sup).
/// Uses the first `upto` samples (all when upto = 0). Trapezoidal quadrature.
CLNormResult cl_norm(const ChemLernerAccumulator& acc, const LPBasis& basis, const HybridNormSpec& spec,
                     double r, std::size_t upto = 0);

nlohmann::json to_json(const HybridNormSpec& spec);
nlohmann::json norm_report(const HybridNormSpec& spec, const CLNormResult& result, double r);

}  // namespace lpe
