#pragma once

#include <map>

#include "lpe/euler.hpp"
#include "lpe/littlewood_paley.hpp"

namespace lpe {

/// ab = T_a b + T_b a + R[a, b] over the stored blocks.
struct BonyParts {
  SpectralField Tab;
  SpectralField Tba;
  SpectralField R;
  /// ||Tab + Tba + R - (a - mean a)(b - mean b)||_2 / ||(a - mean a)(b - mean b)||_2.
  double residual = 0.0;
  /// Set when either input carried a nonzero mean (it is removed first).
  bool mean_removed = false;
};

/// T_a b = sum_j' S_{j'-1} a Delta_j' b, R = sum_{|j'-j''|<=1} Delta_j'' a Delta_j' b.
/// Both inputs must be scalar. Each part is truncated once, after the block sum.
BonyParts bony_decompose(const LPBasis& basis, const SpectralField& a, const SpectralField& b);

/// Delta_j(S_{jp-1} a Delta_jp b) - S_{jp-1} a Delta_j Delta_jp b.
SpectralField commutator_block(const LPBasis& basis, const SpectralField& a, const SpectralField& b, int j,
                               int jp);

/// For every offset j - j', the largest ||Delta_j(S_{j'-1} a Delta_j' b)||_2 relative to
/// ||S_{j'-1} a Delta_j' b||_2 over all stored j'. Exposes the localization window.
std::map<int, double> localization_profile(const LPBasis& basis, const SpectralField& a, const SpectralField& b);

struct TransportCommutators {
  SpectralField R1;
  SpectralField R2;
  SpectralField R3;
};

/// R1 = -Delta_j(v.grad n) + v.grad Delta_j n
/// R2 = -Delta_j(G(n) div v) + G(n) div Delta_j v
/// R3 = -Delta_j(v.grad v) + v.grad Delta_j v
TransportCommutators transport_commutators(const LPBasis& basis, const EulerState& state, int j);

/// Pointwise G(n) of the state, truncated.
SpectralField g_of_n(const EulerState& state);

}  // namespace lpe
