#include "lpe/paraproduct.hpp"

#include <algorithm>

#include "lpe/error.hpp"
#include "lpe/spectral.hpp"

namespace lpe {

namespace {

SpectralField physical_product_to_spectral(const Grid& g, const std::vector<double>& values) {
  PhysicalField p(g, 1);
  std::copy(values.begin(), values.end(), p.component(0).begin());
  return truncate(to_spectral(p));
}

std::vector<double> physical_block(const LPBasis& basis, const SpectralField& f, int j) {
  const auto phys = to_physical(block_project(basis, f, j));
  return {phys.component(0).begin(), phys.component(0).end()};
}

bool all_zero(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

}  // namespace

BonyParts bony_decompose(const LPBasis& basis, const SpectralField& a_in, const SpectralField& b_in) {
  require_same_grid(basis.grid(), a_in.grid(), "bony_decompose");
  require_same_grid(a_in.grid(), b_in.grid(), "bony_decompose");
  if (!a_in.is_scalar() || !b_in.is_scalar()) throw ConfigError("bony_decompose: scalar inputs expected");
  const Grid& g = a_in.grid();
  const std::size_t n = g.size();

  BonyParts parts{SpectralField(g, 1), SpectralField(g, 1), SpectralField(g, 1)};
  parts.mean_removed = mean(a_in) != Complex{0.0, 0.0} || mean(b_in) != Complex{0.0, 0.0};
  const SpectralField a = remove_mean(a_in);
  const SpectralField b = remove_mean(b_in);

  const int count = basis.block_count();
  std::vector<std::vector<double>> da(static_cast<std::size_t>(count));
  std::vector<std::vector<double>> db(static_cast<std::size_t>(count));
  for (int q = 0; q < count; ++q) {
    da[static_cast<std::size_t>(q)] = physical_block(basis, a, basis.j_lo() + q);
    db[static_cast<std::size_t>(q)] = physical_block(basis, b, basis.j_lo() + q);
  }

  std::vector<double> tab(n, 0.0);
  std::vector<double> tba(n, 0.0);
  std::vector<double> rem(n, 0.0);
  // Running low-pass sums S_{j'-1} a and S_{j'-1} b accumulate blocks strictly below j' - 1.
  std::vector<double> sa(n, 0.0);
  std::vector<double> sb(n, 0.0);
  for (int q = 0; q < count; ++q) {
    const auto& aq = da[static_cast<std::size_t>(q)];
    const auto& bq = db[static_cast<std::size_t>(q)];
    if (q >= 2) {
      const auto& a2 = da[static_cast<std::size_t>(q - 2)];
      const auto& b2 = db[static_cast<std::size_t>(q - 2)];
      for (std::size_t i = 0; i < n; ++i) {
        sa[i] += a2[i];
        sb[i] += b2[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      tab[i] += sa[i] * bq[i];
      tba[i] += sb[i] * aq[i];
    }
    for (int o = -1; o <= 1; ++o) {
      const int q2 = q + o;
      if (q2 < 0 || q2 >= count) continue;
      const auto& a2 = da[static_cast<std::size_t>(q2)];
      if (all_zero(a2) || all_zero(bq)) continue;
      for (std::size_t i = 0; i < n; ++i) rem[i] += a2[i] * bq[i];
    }
  }
  parts.Tab = physical_product_to_spectral(g, tab);
  parts.Tba = physical_product_to_spectral(g, tba);
  parts.R = physical_product_to_spectral(g, rem);

  const SpectralField whole = dealiased_product(a, b);
  const double ref = parseval_l2(whole);
  const SpectralField sum = parts.Tab + parts.Tba + parts.R;
  const double defect = parseval_l2(sum - whole);
  parts.residual = ref > 0.0 ? defect / ref : defect;
  return parts;
}

SpectralField commutator_block(const LPBasis& basis, const SpectralField& a, const SpectralField& b, int j,
                               int jp) {
  require_same_grid(a.grid(), b.grid(), "commutator_block");
  const SpectralField low = block_project(basis, a, jp - 1, ProjectionKind::lowpass);
  const SpectralField bj = block_project(basis, b, jp);
  const SpectralField first = block_project(basis, dealiased_product(low, bj), j);
  const SpectralField second = dealiased_product(low, block_project(basis, bj, j));
  return first - second;
}

std::map<int, double> localization_profile(const LPBasis& basis, const SpectralField& a, const SpectralField& b) {
  std::map<int, double> out;
  for (int jp = basis.j_lo(); jp <= basis.j_hi(); ++jp) {
    const SpectralField low = block_project(basis, a, jp - 1, ProjectionKind::lowpass);
    const SpectralField prod = dealiased_product(low, block_project(basis, b, jp));
    const double ref = parseval_l2(prod);
    if (ref == 0.0) continue;
    for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) {
      const double v = parseval_l2(block_project(basis, prod, j)) / ref;
      auto& slot = out[j - jp];
      slot = std::max(slot, v);
    }
  }
  return out;
}

SpectralField g_of_n(const EulerState& state) {
  PhysicalField pn = to_physical(state.n);
  for (auto& x : pn.component(0)) x = state.params.law.g(x);
  return truncate(to_spectral(pn));
}

TransportCommutators transport_commutators(const LPBasis& basis, const EulerState& state, int j) {
  const SpectralField& n = state.n;
  const SpectralField& v = state.v;
  const SpectralField nj = block_project(basis, n, j);
  const SpectralField vj = block_project(basis, v, j);
  const SpectralField gn = g_of_n(state);

  TransportCommutators out{SpectralField(n.grid(), 1), SpectralField(n.grid(), 1), SpectralField(v.grid(), v.components())};
  out.R1 = dealiased_advection(v, nj) - block_project(basis, dealiased_advection(v, n), j);
  out.R2 = dealiased_product(gn, divergence(vj)) - block_project(basis, dealiased_product(gn, divergence(v)), j);
  out.R3 = dealiased_advection(v, vj) - block_project(basis, dealiased_advection(v, v), j);
  return out;
}

}  // namespace lpe
