#include <doctest.h>

#include <cmath>

#include "lpe/paraproduct.hpp"
#include "lpe/spectral.hpp"
#include "oracles.hpp"

using namespace lpe;

namespace {

bool all_zero(const SpectralField& f) {
  for (const auto& c : f.data())
    if (c != Complex{}) return false;
  return true;
}

// T_a b assembled block by block from the projections, independent of the library loop.
SpectralField paraproduct_oracle(const LPBasis& basis, const SpectralField& a, const SpectralField& b) {
  const Grid& g = a.grid();
  SpectralField sum(g, 1);
  for (int jp = basis.j_lo(); jp <= basis.j_hi(); ++jp) {
    SpectralField low(g, 1);
    for (int i = basis.j_lo(); i <= jp - 2; ++i) low += block_project(basis, a, i);
    sum += dealiased_product(low, block_project(basis, b, jp));
  }
  return sum;
}

}  // namespace

TEST_CASE("bony decomposition") {
  const Grid g(1, 256, 4.0);
  const LPBasis basis(g);
  const auto fields = generate_ensemble(oracle::ensemble_on(g, 10));

  SUBCASE("zero factor") {
    const auto parts = bony_decompose(basis, SpectralField(g, 1), fields[0]);
    CHECK(all_zero(parts.Tab));
    CHECK(all_zero(parts.Tba));
    CHECK(all_zero(parts.R));
  }
  SUBCASE("random pairs recombine") {
    for (std::size_t i = 0; i + 1 < fields.size(); i += 2) {
      const auto parts = bony_decompose(basis, fields[i], fields[i + 1]);
      CHECK(parts.residual <= 1e-10);
      CHECK(oracle::rel_diff(parts.Tab.data(), paraproduct_oracle(basis, fields[i], fields[i + 1]).data()) <= 1e-12);
      const auto direct = oracle::convolve_1d(fields[i], fields[i + 1]);
      const auto sum = parts.Tab + parts.Tba + parts.R;
      CHECK(oracle::rel_diff(sum.data(), direct) <= 1e-12);
    }
  }
  SUBCASE("disjoint scales") {
    const auto a = block_project(basis, fields[0], basis.j_min());
    const auto b = block_project(basis, fields[1], basis.j_max());
    const auto parts = bony_decompose(basis, a, b);
    CHECK(all_zero(parts.Tba));
    CHECK(all_zero(parts.R));
    CHECK(oracle::rel_diff(parts.Tab.data(), dealiased_product(a, b).data()) <= 1e-13);
  }
  SUBCASE("mean is removed") {
    auto a = fields[0];
    a.component(0)[0] = 1.0;
    CHECK(bony_decompose(basis, a, fields[1]).mean_removed);
  }
}

TEST_CASE("commutators") {
  const Grid g(1, 256, 4.0);
  const LPBasis basis(g);
  const auto fields = generate_ensemble(oracle::ensemble_on(g, 4));
  const auto one = sample_field(g, 1, [](std::span<const double>, int) { return 1.0; });
  CHECK(parseval_l2(commutator_block(basis, one, fields[1], 1, 1)) <= 1e-15);
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j)
    for (int jp = basis.j_lo(); jp <= basis.j_hi(); ++jp)
      if (std::abs(j - jp) >= 6) CHECK(parseval_l2(commutator_block(basis, fields[0], fields[1], j, jp)) <= 1e-12);

  const auto profile = localization_profile(basis, fields[0], fields[1]);
  for (const auto& [offset, ratio] : profile)
    if (offset <= -5 || offset >= 3) CHECK(ratio <= 1e-12);
  CHECK(profile.at(0) > 0.1);
}

TEST_CASE("transport commutators") {
  const Grid g(1, 256, 4.0);
  const LPBasis basis(g);
  const auto fields = generate_ensemble(oracle::ensemble_on(g, 2));
  EulerParams params;
  SpectralField n = 0.1 * fields[0];
  const EulerState no_velocity(0.0, n, SpectralField(g, 1), params);
  const auto r = transport_commutators(basis, no_velocity, 1);
  CHECK(parseval_l2(r.R1) == 0.0);
  CHECK(parseval_l2(r.R3) == 0.0);
  const EulerState no_density(0.0, SpectralField(g, 1), 0.1 * fields[1], params);
  CHECK(parseval_l2(transport_commutators(basis, no_density, 1).R2) == 0.0);
  CHECK(parseval_l2(g_of_n(no_velocity) - n) <= 1e-15);
}
