#include <doctest.h>

#include <cmath>

#include "lpe/besov.hpp"
#include "lpe/littlewood_paley.hpp"
#include "lpe/spectral.hpp"
#include "oracles.hpp"

using namespace lpe;

namespace {

SpectralField mode_at(const Grid& g, int m) {
  SpectralField f(g, 1);
  f.component(0)[static_cast<std::size_t>(m)] = 0.5;
  f.component(0)[static_cast<std::size_t>(g.points() - m)] = 0.5;
  return f;
}

}  // namespace

TEST_CASE("bump profile") {
  CHECK(lp_bump(0.5) == 0.0);
  CHECK(lp_bump(1.5) == 1.0);
  CHECK(lp_bump(3.0) == 0.0);
  for (double r = 0.3; r < 40.0; r *= 1.137) {
    double sum = 0.0;
    for (int j = -8; j <= 8; ++j) sum += lp_phi0(std::ldexp(r, -j));
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("block range on the default grid") {
  const LPBasis basis(Grid(1, 1024, 16.0));
  CHECK(basis.j_min() == -4);
  CHECK(basis.j_max() == 4);
  CHECK(basis.j_lo() == -5);
  CHECK(basis.j_hi() == 5);
  CHECK(basis.block_count() == 11);
}

TEST_CASE("partition of unity and dilation") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!g.kept()[i]) continue;
    double sum = 0.0;
    for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) sum += basis.phi(j)[i];
    CHECK(std::abs(sum - 1.0) <= 1e-14);
  }
  // |xi| = 3 * 2^j with xi = m / 16: m = 48 gives xi = 3 (j = 0), m = 96 gives 6 (j = 1).
  CHECK(basis.phi(1)[96] == doctest::Approx(basis.phi(0)[48]).epsilon(1e-15));
  CHECK(basis.phi(0)[48] == doctest::Approx(lp_phi0(3.0)).epsilon(1e-15));
  CHECK(basis.phi(-1)[24] == doctest::Approx(lp_phi0(3.0)).epsilon(1e-15));
}

TEST_CASE("block projection support") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  // |xi| = 2^j0 with j0 = 1: m = 32.
  const auto f = mode_at(g, 32);
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j)
    if (std::abs(j - 1) >= 2) CHECK(parseval_l2(block_project(basis, f, j)) == 0.0);
  const auto low = block_project(basis, oracle::random_field(g, 300, 1), basis.j_lo(), ProjectionKind::lowpass);
  CHECK(parseval_l2(low) == 0.0);
}

TEST_CASE("reconstruction") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  auto f = oracle::random_field(g, 341, 9);
  f.component(0)[0] = 0.7;
  CHECK(reconstruction_defect(basis, f) <= 1e-12);
  SpectralField sum(g, 1);
  for (const auto& b : all_blocks(basis, f)) sum += b;
  CHECK(std::abs(sum.component(0)[0]) == 0.0);

  const auto faulty = basis.with_fault(0, 1.1);
  CHECK(reconstruction_defect(faulty, f) > 1e-3);
  CHECK(faulty.checksum(0) != basis.checksum(0));
  CHECK(faulty.checksum(1) == basis.checksum(1));
}

TEST_CASE("bernstein ratio") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  CHECK(*bernstein_ratio(basis, mode_at(g, 32), 1, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_FALSE(bernstein_ratio(basis, SpectralField(g, 1), 1, 2.0).has_value());

  const auto fields = generate_ensemble(oracle::ensemble_on(g, 100));
  double worst = 0.0;
  double spread = 1.0;
  for (const auto& f : fields)
    for (int j = basis.j_min(); j <= basis.j_max(); ++j) {
      const auto r2 = bernstein_ratio(basis, f, j, 2.0);
      const auto r1 = bernstein_ratio(basis, f, j, 1.0);
      if (!r2 || !r1) continue;
      worst = std::max(worst, *r2);
      spread = std::max({spread, *r2 / *r1, *r1 / *r2});
    }
  CHECK(worst <= 8.0 / 3.0 + 0.05);
  CHECK(spread <= 4.0);
}

TEST_CASE("basis manifest") {
  const LPBasis basis(Grid(1, 256, 4.0));
  const auto m = basis_manifest(basis);
  CHECK(m["j_min"] == basis.j_min());
  CHECK(m["j_max"] == basis.j_max());
  CHECK(m["bump"] == LPBasis::bump_fingerprint());
  CHECK(LPBasis::bump_fingerprint() == LPBasis(Grid(2, 128, 8.0)).bump_fingerprint());
}
