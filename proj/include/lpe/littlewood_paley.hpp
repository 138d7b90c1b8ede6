#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpe/grid.hpp"

namespace lpe {

/// Raw radial bump: 1 on [1, 2], smooth transitions on [3/4, 1] and [2, 8/3], 0 elsewhere.
double lp_bump(double r);
/// Bump renormalized by its dyadic sum, so that sum_{j in Z} lp_phi0(2^-j r) = 1 for r > 0.
double lp_phi0(double r);

enum class ProjectionKind { block, lowpass };

/// Dyadic partition of unity on a lattice.
///
/// `j_min()`/`j_max()` bound the fully resolved blocks:
///   j_min = ceil(log2(1/M)), j_max = floor(log2(cutoff * N / (2M))).
/// The basis also stores the two edge blocks j_min - 1 and j_max + 1, whose annuli
/// are only partly on the lattice; with them the stored multipliers sum to exactly 1
/// at every nonzero kept frequency.
class LPBasis {
 public:
  explicit LPBasis(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  int j_lo() const noexcept { return j_min_ - 1; }
  int j_hi() const noexcept { return j_max_ + 1; }
  int block_count() const noexcept { return j_hi() - j_lo() + 1; }
  bool stored(int j) const noexcept { return j >= j_lo() && j <= j_hi(); }
  bool edge(int j) const noexcept { return j == j_lo() || j == j_hi(); }

  /// Multiplier of block j over the lattice; all zeros outside the stored range.
  const std::vector<double>& phi(int j) const;
  /// Low-pass multiplier S_j = sum_{j_lo <= j' <= j-1} phi_j'.
  const std::vector<double>& chi(int j) const;

  /// Copy with block j scaled by `factor` (fault injection for the verification suite).
  LPBasis with_fault(int j, double factor) const;

  std::uint64_t checksum(int j) const;
  /// Fingerprint of the bump profile; identical for every grid.
  static std::string bump_fingerprint();

 private:
  Grid grid_;
  int j_min_;
  int j_max_;
  std::vector<std::vector<double>> phi_;
  std::vector<std::vector<double>> chi_;
  std::vector<double> zeros_;
};

SpectralField block_project(const LPBasis& basis, const SpectralField& f, int j,
                            ProjectionKind kind = ProjectionKind::block);

/// All stored blocks of f, indexed by j - j_lo.
std::vector<SpectralField> all_blocks(const LPBasis& basis, const SpectralField& f);

/// ||grad Delta_j f||_p / (2^j ||Delta_j f||_p); nullopt for an empty block.
std::optional<double> bernstein_ratio(const LPBasis& basis, const SpectralField& f, int j, double p);

/// Relative L2 defect ||sum_j Delta_j f - (f - mean)|| / ||f||.
double reconstruction_defect(const LPBasis& basis, const SpectralField& f);

/// Debug manifest: {j_min, j_max, j_lo, j_hi, annulus, bump, checksums}.
nlohmann::json basis_manifest(const LPBasis& basis);

}  // namespace lpe
