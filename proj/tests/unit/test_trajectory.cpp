#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lpe/diagnostics.hpp"
#include "lpe/error.hpp"
#include "lpe/spectral.hpp"
#include "lpe/trajectory.hpp"
#include "oracles.hpp"

using namespace lpe;

namespace {

struct Setup {
  Grid g{1, 128, 2.0};
  std::shared_ptr<const LPBasis> basis = std::make_shared<const LPBasis>(g);
};

EulerState small_state(const Grid& g, const EulerParams& params, double amp, std::uint64_t seed = 3) {
  auto e = oracle::ensemble_on(g, 2, seed);
  e.amplitude = amp;
  const auto f = generate_ensemble(e);
  return EulerState(0.0, f[0], f[1], params);
}

}  // namespace

TEST_CASE("step schedule and sample times") {
  SimulationConfig cfg;
  cfg.t_final = 1.0;
  cfg.dt = 0.1;
  auto s = step_schedule(cfg);
  CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (double h : s) CHECK(h <= 0.1 + 1e-15);

  cfg.dt_start = 0.01;
  cfg.ramp = 1.5;
  s = step_schedule(cfg);
  CHECK(s.front() == doctest::Approx(0.01));
  CHECK(s[1] == doctest::Approx(0.015));
  CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  cfg.max_samples = 4;
  const auto t = sample_times(cfg);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(1.0));
  CHECK(t.size() <= 4);
}

TEST_CASE("linear run dissipates and keeps the mean") {
  Setup s;
  EulerParams params;
  params.eps = 0.2;
  params.toggles = {false, false};
  auto st = small_state(s.g, params, 0.05);
  st.n.component(0)[0] = 0.01;
  SimulationConfig cfg;
  cfg.t_final = 0.5;
  cfg.dt = 0.01;
  cfg.keep_states = true;
  cfg.p = 1.0;
  const auto run = simulate(st, cfg, s.basis);
  CHECK(run.samples() == run.states().size());
  CHECK(run.times().back() == doctest::Approx(0.5));
  for (std::size_t k = 1; k < run.samples(); ++k) {
    CHECK(run.energy()[k] <= run.energy()[k - 1] * (1 + 1e-14));
    CHECK(std::abs(run.n_mean()[k] - 0.01) <= 1e-15);
  }
  int worst_j = s.basis->j_lo();
  double worst = 0.0;
  for (int j = s.basis->j_lo(); j <= s.basis->j_hi(); ++j) {
    const double r = reformulation_residual(run, j);
    if (r > worst) worst = r, worst_j = j;
  }
  CHECK(worst >= 0.0);
  CAPTURE(worst_j);

  const auto zero = EulerState(0.0, SpectralField(s.g, 1), SpectralField(s.g, 1), params);
  const auto zrun = simulate(zero, cfg, s.basis);
  CHECK(reformulation_residual(zrun, 0) == 0.0);
}

TEST_CASE("reformulation residual is second order in dt") {
  Setup s;
  EulerParams params;
  params.eps = 0.1;
  const auto st = small_state(s.g, params, 0.1);
  SimulationConfig cfg;
  cfg.t_final = 0.05;
  cfg.keep_states = true;
  std::vector<double> res;
  for (double dt : {2e-3, 1e-3}) {
    cfg.dt = dt;
    const auto run = simulate(st, cfg, s.basis);
    double worst = 0.0;
    for (int j = s.basis->j_lo(); j <= s.basis->j_hi(); ++j) worst = std::max(worst, reformulation_residual(run, j));
    res.push_back(worst);
  }
  CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("regime violation") {
  Setup s;
  EulerParams params;
  const auto n = sample_field(s.g, 1, [](std::span<const double> x, int) { return 1.5 * std::cos(x[0]); });
  SimulationConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.01;
  CHECK_THROWS_AS(simulate(EulerState(0.0, n, SpectralField(s.g, 1), params), cfg, s.basis), RegimeViolation);
}

TEST_CASE("initial data normalization") {
  Setup s;
  EulerParams params;
  params.eps = 0.125;
  InitialDataSpec spec;
  spec.profile = {ProfileKind::flat, 0.0, 0.0, 0.125};
  spec.delta_fraction = 0.5;
  spec.delta1 = 0.1;
  const auto st = make_initial_data(*s.basis, params, spec, 1.0);
  CHECK(hypothesis_norm(*s.basis, st.n, st.v, params.eps, params.k, 1.0) == doctest::Approx(0.05).epsilon(1e-12));
  spec.velocity = VelocityKind::darcy;
  const auto d = make_initial_data(*s.basis, params, spec, 1.0);
  CHECK(parseval_l2(effective_velocity(d)) <= 1e-14 * parseval_l2(d.n) / params.eps);
  spec.velocity = VelocityKind::zero;
  CHECK(parseval_l2(make_initial_data(*s.basis, params, spec, 1.0).v) == 0.0);
}

TEST_CASE("lyapunov functional") {
  Setup s;
  EulerParams params;
  params.eps = 0.125;
  const int J = frequency_threshold(params.eps, params.k);
  LyapunovParams lp;
  SUBCASE("no velocity gives ratio one") {
    const auto st = small_state(s.g, params, 0.05);
    const EulerState nv(0.0, st.n, SpectralField(s.g, 1), params);
    for (int j = J; j <= s.basis->j_hi(); ++j)
      if (const auto r = lyapunov_block(*s.basis, nv, j, lp)) CHECK(r->ratio == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("zero c_tilde") {
    lp.c_tilde = 0.0;
    const auto st = small_state(s.g, params, 0.05);
    for (int j = J; j <= s.basis->j_hi(); ++j)
      if (const auto r = lyapunov_block(*s.basis, st, j, lp)) CHECK(r->ratio == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("equivalence band on random states") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto st = small_state(s.g, params, 0.05, seed);
      for (int j = J; j <= s.basis->j_hi(); ++j)
        if (const auto r = lyapunov_block(*s.basis, st, j, lp)) {
          // |2 c int v . grad n| <= c 2^{-j} (8/3) 2^{2j} ||(n, v)||^2 and j >= J gives 2^{-j} <= eps 2^{-k}.
          CHECK(r->ratio >= 1.0 - (8.0 / 3.0) * 0.5 * 0.25 / params.eps * std::exp2(-j) / (1.0 / params.eps));
          CHECK(r->ratio >= 0.5);
          CHECK(r->ratio <= 1.5);
        }
    }
  }
  SUBCASE("parameter validation") {
    lp.c_tilde = 5.0;
    CHECK_THROWS_AS(lp.validate(), ConfigError);
  }
}

TEST_CASE("dissipation balance on a linear run") {
  Setup s;
  EulerParams params;
  params.eps = 0.125;
  params.toggles = {false, false};
  SimulationConfig cfg;
  cfg.t_final = 0.2;
  cfg.dt = 1e-3;
  cfg.keep_states = true;
  const auto run = simulate(small_state(s.g, params, 0.05), cfg, s.basis);
  const int J = frequency_threshold(params.eps, params.k);
  LyapunovParams lp;
  for (int j = J; j <= s.basis->j_max(); ++j) {
    const auto b = dissipation_balance(run, j, lp);
    CHECK(b.max_relative_lhs <= 1e-4);
    CHECK_FALSE(b.violation);
  }
}

TEST_CASE("X(T), a priori constant and Darcy defect") {
  Setup s;
  EulerParams params;
  params.eps = 0.25;
  SimulationConfig cfg;
  cfg.t_final = 1.0;
  cfg.dt = 0.01;
  cfg.p = 1.0;

  const auto zero = EulerState(0.0, SpectralField(s.g, 1), SpectralField(s.g, 1), params);
  const auto zrun = simulate(zero, cfg, s.basis);
  CHECK(xt_functional(zrun).total == 0.0);
  CHECK(apriori_constant(zrun, default_t_grid(zrun)).degenerate);
  CHECK(darcy_defect(zrun).l1 == 0.0);

  const auto run = simulate(small_state(s.g, params, 0.02), cfg, s.basis);
  const auto x0 = xt_functional(run, 1);
  CHECK(x0.components[1] == 0.0);
  CHECK(x0.components[2] == 0.0);
  CHECK(x0.components[5] == 0.0);
  CHECK(x0.components[6] == 0.0);
  double prev = 0.0;
  for (std::size_t upto = 1; upto <= run.samples(); ++upto) {
    const double x = xt_functional(run, upto).total;
    CHECK(x >= prev);
    prev = x;
  }
  const auto rep = apriori_constant(run, default_t_grid(run));
  CHECK(rep.x0 == doctest::Approx(x0.total));
  for (std::size_t i = 0; i < rep.T.size(); ++i)
    CHECK(rep.c_hat[i] == doctest::Approx(rep.X[i] / (rep.x0 + rep.X[i] * rep.X[i])));

  const auto dr = darcy_defect(run);
  CHECK(dr.t.size() == run.samples());
  CHECK(dr.l1 > 0.0);
  CHECK(apriori_csv(rep).rfind("t,X,c_hat\n", 0) == 0);
  CHECK(darcy_csv(dr).rfind("t,defect\n", 0) == 0);
  const auto js = diagnostics_report(run, rep, dr);
  CHECK(js["c_hat_max"] == rep.c_max);
  CHECK(js["darcy_l1"] == dr.l1);
}

TEST_CASE("decay rate fit") {
  std::vector<double> t, y;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 * std::exp(-2.5 * t.back()));
  }
  CHECK(*fit_decay_rate(t, y, 0.0, 5.0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(*fit_decay_rate(t, y, 1.0, 2.0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_FALSE(fit_decay_rate(t, y, 10.0, 20.0).has_value());
}

TEST_CASE("high band decays at rate ~ 1/eps") {
  const Grid g(1, 512, 1.0);
  const auto basis = std::make_shared<const LPBasis>(g);
  EulerParams params;
  params.eps = 0.0625;
  params.toggles = {false, false};
  SimulationConfig cfg;
  cfg.t_final = 10 * params.eps;
  cfg.dt = params.eps / 20;
  cfg.p = 2.0;
  const auto run = simulate(small_state(g, params, 1e-3), cfg, basis);
  const auto rate = fit_decay_rate(run.times(), high_band_series(run), 0.0, cfg.t_final);
  REQUIRE(rate.has_value());
  CHECK(*rate * params.eps >= 0.4);
  CHECK(low_block_series(run, 0).size() == run.samples());
}
