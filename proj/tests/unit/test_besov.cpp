#include <doctest.h>

#include <cmath>

#include "lpe/besov.hpp"
#include "lpe/error.hpp"
#include "lpe/inequality_lab.hpp"
#include "lpe/spectral.hpp"
#include "oracles.hpp"

using namespace lpe;

namespace {

// cos(xi x) with xi = m / M.
SpectralField cosine(const Grid& g, int m) {
  SpectralField f(g, 1);
  f.component(0)[static_cast<std::size_t>(m)] = 0.5;
  f.component(0)[static_cast<std::size_t>(g.points() - m)] = 0.5;
  return f;
}

// m with m / M = 1.41 * 2^j rounded; inside the band where block j alone is nonzero.
int pure_mode(const Grid& g, int j) { return static_cast<int>(std::lround(1.41 * std::ldexp(g.scale(), j))); }

}  // namespace

TEST_CASE("frequency threshold") {
  CHECK(frequency_threshold(1.0, 2) == 2);
  CHECK(frequency_threshold(0.1, 2) == 6);
  CHECK(frequency_threshold(0.25, 0) == 2);
  CHECK(frequency_threshold(0.3, 1) == 3);
}

TEST_CASE("single block norms") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  const double L = 2.0 * std::numbers::pi * 16.0;
  const int j0 = 1;
  const auto f = cosine(g, pure_mode(g, j0));
  const auto n2 = block_norms(basis, f, 2.0);
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) {
    const double expect = j == j0 ? std::sqrt(L / 2.0) : 0.0;
    CHECK(n2[static_cast<std::size_t>(j - basis.j_lo())] == doctest::Approx(expect).epsilon(1e-13));
  }
  // int |cos| over whole periods = 2 L / pi.
  const auto n1 = block_norms(basis, f, 1.0);
  CHECK(n1[static_cast<std::size_t>(j0 - basis.j_lo())] == doctest::Approx(2.0 * L / std::numbers::pi).epsilon(1e-3));

  const double s = 0.75;
  const auto all = besov_seminorm(basis, f, {s, 2.0, Band::all, 0});
  CHECK(all.value == doctest::Approx(std::exp2(j0 * s) * std::sqrt(L / 2.0)).epsilon(1e-13));
  CHECK(besov_seminorm(basis, SpectralField(g, 1), {s, 2.0, Band::all, 0}).value == 0.0);
}

TEST_CASE("three neighbour blocks") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  // |xi| = 2^j0 exactly: blocks j0 - 1 and j0 both nonzero.
  const int j0 = 1;
  const auto f = cosine(g, 32);
  const double s = 0.5;
  const auto norms = block_norms(basis, f, 2.0);
  double direct = 0.0;
  for (int j = j0 - 1; j <= j0 + 1; ++j)
    direct += std::exp2(j * s) * norms[static_cast<std::size_t>(j - basis.j_lo())];
  const double fn = parseval_l2(f);
  const auto v = besov_seminorm(basis, f, {s, 2.0, Band::all, 0}).value;
  CHECK(v == doctest::Approx(direct).epsilon(1e-14));
  CHECK(v <= 3.0 * std::exp2((j0 + 1) * s) * fn);
  CHECK(v >= 0.5 * std::exp2((j0 - 1) * s) * fn);
}

TEST_CASE("low plus high is all") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  const auto f = generate_ensemble(oracle::ensemble_on(g, 1))[0];
  for (double p : {1.0, 1.5, 2.0}) {
    const auto norms = block_norms(basis, f, p);
    for (int J = basis.j_min() + 2; J <= basis.j_max() - 2; ++J) {
      const double lo = hybrid_sum(basis, norms, 1.0 / p, Band::low, J).value;
      const double hi = hybrid_sum(basis, norms, 1.0 / p, Band::high, J).value;
      const double all = hybrid_sum(basis, norms, 1.0 / p, Band::all, J).value;
      CHECK(std::abs(lo + hi - all) <= 1e-14 * all);
    }
  }
  CHECK(hybrid_sum(basis, block_norms(basis, f, 2.0), 0.5, Band::low, basis.j_max()).degenerate);
  const auto multi = block_norms(basis, f, std::vector<double>{1.0, 2.0});
  const auto single = block_norms(basis, f, 1.0);
  for (std::size_t i = 0; i < single.size(); ++i) CHECK(multi[0][i] == doctest::Approx(single[i]).epsilon(1e-14));
}

TEST_CASE("high-low shift") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  const int J = 0;
  CHECK(*hl_shift_check(basis, cosine(g, pure_mode(g, J)), 0.5, 1.0, J) == doctest::Approx(1.0).epsilon(1e-13));
  // A block three octaves above J: ratio 2^{-3 sigma0}.
  CHECK(*hl_shift_check(basis, cosine(g, pure_mode(g, J + 3)), 0.5, 1.0, J) ==
        doctest::Approx(std::exp2(-3.0)).epsilon(1e-13));
  CHECK(*hl_shift_check_low(basis, cosine(g, pure_mode(g, J - 2)), 0.5, 2.0, J) ==
        doctest::Approx(std::exp2(-4.0)).epsilon(1e-13));
  CHECK_FALSE(hl_shift_check(basis, cosine(g, pure_mode(g, J - 2)), 0.5, 1.0, J).has_value());
  for (const auto& f : generate_ensemble(oracle::ensemble_on(g, 10)))
    for (double sigma0 : {0.5, 1.0, 2.0}) CHECK(*hl_shift_check(basis, f, 0.5, sigma0, J) <= 1.0 + 1e-13);
}

TEST_CASE("embedding ratio") {
  const Grid g(1, 1024, 16.0);
  const LPBasis basis(g);
  const auto f = generate_ensemble(oracle::ensemble_on(g, 1))[0];
  CHECK(*embedding_ratio(basis, f, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  const int j = 1;
  const auto c = cosine(g, pure_mode(g, j));
  const auto n1 = block_norms(basis, c, 1.0)[static_cast<std::size_t>(j - basis.j_lo())];
  const auto n2 = block_norms(basis, c, 2.0)[static_cast<std::size_t>(j - basis.j_lo())];
  CHECK(*embedding_ratio(basis, c, 1.0) == doctest::Approx(n2 / n1 * std::exp2(j * (0.5 - 1.0))).epsilon(1e-13));
  CHECK_FALSE(embedding_ratio(basis, SpectralField(g, 1), 1.0).has_value());
}

TEST_CASE("Chemin-Lerner norms") {
  const Grid g(1, 256, 4.0);
  const LPBasis basis(g);
  const int n = basis.block_count();
  const int j = 1;
  const double s = 0.5;
  const HybridNormSpec spec{s, 2.0, Band::all, 0};

  SUBCASE("constant in time") {
    ChemLernerAccumulator acc(basis.j_lo(), basis.j_hi(), 2.0);
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    row[static_cast<std::size_t>(j - basis.j_lo())] = 3.0;
    for (int k = 0; k <= 10; ++k) acc.append(0.2 * k, row);
    CHECK(cl_norm(acc, basis, spec, 1.0).value == doctest::Approx(2.0 * 3.0 * std::exp2(j * s)).epsilon(1e-14));
    CHECK(cl_norm(acc, basis, spec, INFINITY).value == doctest::Approx(3.0 * std::exp2(j * s)).epsilon(1e-14));
  }
  SUBCASE("exponential decay, second order") {
    const double T = 2.0;
    double prev_err = 0.0;
    for (int steps : {16, 32, 64}) {
      ChemLernerAccumulator acc(basis.j_lo(), basis.j_hi(), 2.0);
      for (int k = 0; k <= steps; ++k) {
        std::vector<double> row(static_cast<std::size_t>(n), 0.0);
        const double t = T * k / steps;
        row[static_cast<std::size_t>(j - basis.j_lo())] = std::exp(-t);
        acc.append(t, row);
      }
      const auto r = cl_norm(acc, basis, spec, 1.0);
      const double exact = (1.0 - std::exp(-T)) * std::exp2(j * s);
      const double err = std::abs(r.value - exact);
      CHECK(r.quadrature_error == doctest::Approx(err).epsilon(0.05));
      if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.02));
      prev_err = err;
    }
  }
  SUBCASE("times must increase") {
    ChemLernerAccumulator acc(basis.j_lo(), basis.j_hi(), 2.0);
    acc.append(0.0, std::vector<double>(static_cast<std::size_t>(n), 0.0));
    CHECK_THROWS(acc.append(0.0, std::vector<double>(static_cast<std::size_t>(n), 0.0)));
  }
}
