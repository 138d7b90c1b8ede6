#include "lpe/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "lpe/error.hpp"
#include "lpe/hash.hpp"
#include "lpe/paraproduct.hpp"
#include "lpe/parallel.hpp"
#include "lpe/snapshot.hpp"
#include "lpe/spectral.hpp"

namespace lpe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fix(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

GateResult make_gate(std::string name, bool passed, std::string detail, Clock::time_point t0) {
  return GateResult{std::move(name), passed, std::move(detail), seconds_since(t0)};
}

double max_ratio(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

SpectralField with_mean(SpectralField f, double m) {
  for (int c = 0; c < f.components(); ++c) f.component(c)[0] = Complex{m, 0.0};
  return f;
}

/// Field whose spectrum lies in (1.36, 1.47) 2^j, where only block j is nonzero.
SpectralField single_block_field(const Grid& g, int j, std::uint64_t seed) {
  EnsembleConfig e;
  e.seed = seed;
  e.count = 1;
  e.d = g.dim();
  e.N = g.points();
  e.M = g.scale();
  e.cutoff = g.dealias_cutoff();
  e.profile = {ProfileKind::band, 0.0, j + std::log2(1.415), 0.05};
  return ensemble_member(e, g, 0);
}

// ---------------------------------------------------------------------------
// littlewood_paley / besov

GateResult gate_reconstruction(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  const Grid g = cfg.grid.make();
  LPBasis basis(g);
  if (cfg.fault_inject) basis = basis.with_fault((basis.j_min() + basis.j_max()) / 2, 1.0 + 1e-6);
  const auto fields = generate_ensemble(cfg.ensemble_config());
  double worst = 0.0;
  std::ostringstream csv;
  csv.precision(17);
  csv << "index,defect\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const double d = reconstruction_defect(basis, with_mean(fields[i], 0.25));
    worst = std::max(worst, d);
    csv << i << ',' << d << '\n';
  }
  const double elapsed = seconds_since(t0);
  sink.csv("reconstruction.csv", csv.str());
  sink.json("basis_manifest.json", basis_manifest(basis));
  auto gate = make_gate("lp_reconstruction", worst <= 1e-12 && elapsed < 5.0,
                        "fields=" + std::to_string(fields.size()) + " max_defect=" + sci(worst), t0);
  return gate;
}

GateResult gate_hl_shift(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  const Grid g = cfg.grid.make();
  const LPBasis basis(g);
  const auto fields = generate_ensemble(cfg.ensemble_config());
  const double d = g.dim();
  double worst = 0.0;
  std::size_t checks = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (double sigma0 : {0.5, 1.0, 2.0}) {
    double worst_sigma = 0.0;
    for (int J = basis.j_min() + 2; J <= basis.j_max() - 2; ++J)
      for (const auto& f : fields)
        for (double s : {d / 2.0, d / 2.0 + 1.0}) {
          if (const auto r = hl_shift_check(basis, f, s, sigma0, J)) worst_sigma = std::max(worst_sigma, *r), ++checks;
          if (const auto r = hl_shift_check_low(basis, f, s, sigma0, J)) worst_sigma = std::max(worst_sigma, *r), ++checks;
        }
    rows.push_back({{"sigma0", sigma0}, {"max_ratio", worst_sigma}});
    worst = std::max(worst, worst_sigma);
  }
  double equality = 0.0;
  for (int J = basis.j_min() + 2; J <= basis.j_max() - 2; ++J) {
    const auto f = single_block_field(g, J, cfg.seed);
    for (double sigma0 : {0.5, 1.0, 2.0})
      if (const auto r = hl_shift_check(basis, f, d / 2.0, sigma0, J)) equality = std::max(equality, std::abs(*r - 1.0));
  }
  sink.json("hl_shift.json", {{"per_sigma0", rows}, {"checks", checks}, {"equality_defect", equality}});
  const bool ok = worst <= 1.0 + 1e-13 && equality <= 1e-13 && checks > 0;
  return make_gate("hl_shift", ok,
                   "checks=" + std::to_string(checks) + " max_ratio=" + fix(worst) + " equality_defect=" + sci(equality),
                   t0);
}

// ---------------------------------------------------------------------------
// paraproduct / inequality_lab

GateResult gate_bony(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  const Grid g = cfg.grid.make();
  const LPBasis basis(g);
  auto ens = cfg.ensemble_config();
  ens.count = 2 * cfg.ensemble.count;
  const auto fields = generate_ensemble(ens);
  std::vector<double> residual(cfg.ensemble.count);
  parallel_for(cfg.ensemble.count,
               [&](std::size_t i) { residual[i] = bony_decompose(basis, fields[2 * i], fields[2 * i + 1]).residual; });
  const double worst = *std::max_element(residual.begin(), residual.end());

  const auto a = block_project(basis, fields[0], basis.j_min());
  const auto b = block_project(basis, fields[1], basis.j_max());
  const auto parts = bony_decompose(basis, a, b);
  auto zero = [](const SpectralField& f) {
    return std::all_of(f.data().begin(), f.data().end(), [](const Complex& c) { return c == Complex{0.0, 0.0}; });
  };
  const bool disjoint = zero(parts.Tba) && zero(parts.R);
  std::ostringstream csv;
  csv.precision(17);
  csv << "pair,residual\n";
  for (std::size_t i = 0; i < residual.size(); ++i) csv << i << ',' << residual[i] << '\n';
  sink.csv("bony_residual.csv", csv.str());
  sink.json("bony_disjoint.json", {{"Tba_zero", zero(parts.Tba)}, {"R_zero", zero(parts.R)}, {"residual", parts.residual}});
  return make_gate("bony_exactness", worst <= 1e-10 && disjoint,
                   "pairs=" + std::to_string(residual.size()) + " max_residual=" + sci(worst) +
                       " disjoint_zero=" + (disjoint ? "yes" : "no"),
                   t0);
}

std::vector<GateResult> product_law_gates(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  const auto& pl = cfg.product_law;
  const auto sweeps = epsilon_sweep_grid(cfg.ensemble_config(), pl.s1, pl.p, pl.k, pl.eps);
  const double elapsed = seconds_since(t0);
  std::vector<GateResult> gates;
  nlohmann::json summary = nlohmann::json::array();
  std::size_t cell = 0;
  for (double s1 : pl.s1)
    for (double p : pl.p) {
      const auto& sw = sweeps[cell++];
      char tag[64];
      std::snprintf(tag, sizeof tag, "s1=%.4g_p=%.4g", s1, p);
      nlohmann::json reports = nlohmann::json::array();
      for (const auto& r : sw.reports) reports.push_back(to_json(r));
      sink.json(std::string("constants_") + tag + ".json", {{"s1", s1}, {"p", p}, {"reports", reports}});
      sink.csv(std::string("sweep_") + tag + ".csv", sweep_csv(sw));
      summary.push_back({{"s1", s1}, {"p", p}, {"uniformity", sw.uniformity}, {"skipped_eps", sw.skipped_eps}});
      const bool ok = sw.uniformity <= 10.0 && !sw.reports.empty() && elapsed < 180.0;
      gates.push_back(make_gate(std::string("product_law_uniformity[") + tag + "]", ok,
                                "eps=" + std::to_string(sw.reports.size()) + " max/min=" + fix(sw.uniformity), t0));
    }
  sink.json("product_law_summary.json", {{"cells", summary}});
  return gates;
}

// ---------------------------------------------------------------------------
// euler_system

GateResult gate_eigenvalues(ArtifactSink& sink) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t degenerate = 0;
  for (int a = 0; a < 50; ++a) {
    const double eps = std::exp2(-8.0 + 8.0 * a / 49.0);
    for (int b = 0; b < 50; ++b) {
      const double r = b == 49 ? 1.0 / (2.0 * eps) : std::pow(10.0, -2.0 + 5.0 * b / 48.0);
      const auto roots = symbol_eigenvalues(r, eps);
      degenerate += roots.degenerate ? 1 : 0;
      for (const Complex l : {roots.plus, roots.minus}) {
        const double scale = std::max({std::norm(l), std::abs(l) / eps, r * r});
        worst = std::max(worst, std::abs(l * l + l / eps + r * r) / scale);
      }
    }
  }
  const auto ref = symbol_eigenvalues(1.0, 0.1);
  const double pair = std::max(std::abs(ref.plus - Complex{-0.1010205, 0.0}), std::abs(ref.minus - Complex{-9.8989795, 0.0}));
  sink.json("symbol_eigenvalues.json", {{"max_relative_residual", worst}, {"degenerate_points", degenerate},
                                        {"reference_pair_error", pair}});
  return make_gate("symbol_eigenvalues", worst <= 1e-12 && pair <= 1e-6 && degenerate > 0,
                   "grid=50x50 max_residual=" + sci(worst) + " pair_error=" + sci(pair), t0);
}

GateResult gate_linear_exactness(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  const Grid g = cfg.grid.make();
  auto ens = cfg.ensemble_config();
  ens.count = static_cast<std::size_t>(g.dim()) + 1;
  ens.amplitude = 1e-3;
  const auto members = generate_ensemble(ens);
  SpectralField n0 = with_mean(members[0], 1e-4);
  SpectralField v0(g, g.dim());
  for (int a = 0; a < g.dim(); ++a)
    std::copy(members[static_cast<std::size_t>(a) + 1].component(0).begin(),
              members[static_cast<std::size_t>(a) + 1].component(0).end(), v0.component(a).begin());
  v0 = with_mean(std::move(v0), 2e-4);
  const double T = cfg.simulation.t_final;
  const auto steps = static_cast<std::size_t>(std::ceil(T / cfg.simulation.dt - 1e-9));
  const double dt = T / static_cast<double>(steps);

  std::vector<double> errors(cfg.sweep_eps.size());
  parallel_for(cfg.sweep_eps.size(), [&](std::size_t e) {
    const double eps = cfg.sweep_eps[e];
    EulerParams params = cfg.euler;
    params.eps = eps;
    params.toggles = {false, false};
    EulerState s(0.0, n0, v0, params);
    LawsonStepper stepper(cfg.simulation.cfl);
    for (std::size_t k = 0; k < steps; ++k) s = stepper.step(s, dt);
    const auto r = g.xi_abs();
    std::map<double, std::array<std::complex<long double>, 4>> memo;
    const long double decay = std::exp(-static_cast<long double>(T) / eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.kept()[i]) continue;
      double err = 0.0;
      double mag = std::abs(n0.component(0)[i]);
      if (r[i] == 0.0) {
        err = std::abs(s.n.component(0)[i] - n0.component(0)[i]);
        for (int a = 0; a < g.dim(); ++a) {
          const std::complex<long double> ref = decay * std::complex<long double>(v0.component(a)[i]);
          err += std::abs(std::complex<long double>(s.v.component(a)[i]) - ref);
          mag += std::abs(v0.component(a)[i]);
        }
      } else {
        auto it = memo.find(r[i]);
        if (it == memo.end()) it = memo.emplace(r[i], reference_propagator(r[i], eps, T)).first;
        const auto& m = it->second;
        std::complex<long double> w0 = 0.0L, w1 = 0.0L;
        for (int a = 0; a < g.dim(); ++a) {
          w0 += static_cast<long double>(g.unit_xi(a)[i]) * std::complex<long double>(v0.component(a)[i]);
          w1 += static_cast<long double>(g.unit_xi(a)[i]) * std::complex<long double>(s.v.component(a)[i]);
        }
        const std::complex<long double> nz(n0.component(0)[i]);
        const auto n_ref = m[0] * nz + m[1] * w0;
        const auto w_ref = m[2] * nz + m[3] * w0;
        err = static_cast<double>(std::abs(std::complex<long double>(s.n.component(0)[i]) - n_ref) + std::abs(w1 - w_ref));
        mag += static_cast<double>(std::abs(w0));
        for (int a = 0; a < g.dim(); ++a) {
          const long double u = g.unit_xi(a)[i];
          const auto perp0 = std::complex<long double>(v0.component(a)[i]) - u * w0;
          const auto perp1 = std::complex<long double>(s.v.component(a)[i]) - u * w1;
          err += static_cast<double>(std::abs(perp1 - decay * perp0));
        }
      }
      if (mag > 0.0) worst = std::max(worst, err / mag);
    }
    errors[e] = worst;
  });
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t e = 0; e < errors.size(); ++e) rows.push_back({{"eps", cfg.sweep_eps[e]}, {"max_relative_error", errors[e]}});
  sink.json("linear_exactness.json", {{"t", T}, {"dt", dt}, {"per_eps", rows}});
  const double worst = *std::max_element(errors.begin(), errors.end());
  return make_gate("linear_exactness", worst <= 1e-10,
                   "eps=" + std::to_string(errors.size()) + " t=" + fix(T) + " max_error=" + sci(worst), t0);
}

/// Shell data at |xi| ~ 2^j placed on the slow eigenvector.
EulerState shell_state(const Grid& g, const EulerParams& params, double j, double amplitude, std::uint64_t seed) {
  EnsembleConfig e;
  e.seed = seed;
  e.count = 1;
  e.d = g.dim();
  e.N = g.points();
  e.M = g.scale();
  e.cutoff = g.dealias_cutoff();
  e.profile = {ProfileKind::band, 0.0, j, 0.02};
  e.amplitude = amplitude;
  const auto n = ensemble_member(e, g, 0);
  return EulerState(0.0, n, slow_mode_velocity(n, params.eps), params);
}

std::vector<GateResult> decay_gates(const ExperimentConfig& cfg, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  const Grid g = cfg.grid.make();
  const auto basis = std::make_shared<const LPBasis>(g);
  std::vector<double> eps_list;
  for (double e : cfg.sweep_eps)
    if (e <= 0.25) eps_list.push_back(e);
  if (eps_list.empty()) return {};
  const std::size_t count = eps_list.size();
  std::vector<double> high(count, 0.0), low(count, 0.0), low_target(count, 0.0);
  std::vector<int> low_j(count, 0);

  auto ens = cfg.ensemble_config();
  ens.count = static_cast<std::size_t>(g.dim()) + 1;
  ens.profile = {ProfileKind::flat, 0.0, 0.0, 0.125};
  ens.amplitude = 1e-3;
  const auto members = generate_ensemble(ens);

  parallel_for(count, [&](std::size_t e) {
    const double eps = eps_list[e];
    EulerParams params = cfg.euler;
    params.eps = eps;
    params.toggles = {false, false};
    SimulationConfig sim;
    sim.cfl = cfg.simulation.cfl;
    sim.p = 2.0;
    sim.t_final = 10.0 * eps;
    sim.dt = eps / 20.0;

    SpectralField v(g, g.dim());
    for (int a = 0; a < g.dim(); ++a)
      std::copy(members[static_cast<std::size_t>(a) + 1].component(0).begin(),
                members[static_cast<std::size_t>(a) + 1].component(0).end(), v.component(a).begin());
    const auto hi_run = simulate(EulerState(0.0, members[0], v, params), sim, basis);
    const auto series = high_band_series(hi_run);
    high[e] = fit_decay_rate(hi_run.times(), series, 0.0, sim.t_final, 0.0).value_or(0.0);

    const int J = frequency_threshold(eps, params.k);
    const int j = std::max(basis->j_min(), J - 5);
    const double r = std::exp2(j);
    low_j[e] = j;
    low_target[e] = eps * r * r;
    sim.t_final = 2.0 / low_target[e];
    sim.dt = sim.t_final / 200.0;
    const auto lo_run = simulate(shell_state(g, params, j, 1e-3, cfg.seed), sim, basis);
    low[e] = fit_decay_rate(lo_run.times(), low_block_series(lo_run, j), 0.1 * sim.t_final, sim.t_final, 0.0)
                 .value_or(0.0);
  });
  bool high_ok = true, low_ok = true;
  double worst_high = std::numeric_limits<double>::infinity(), worst_low = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t e = 0; e < count; ++e) {
    const double h = high[e] * eps_list[e];
    const double dev = std::abs(low[e] / low_target[e] - 1.0);
    high_ok = high_ok && h >= 0.4;
    low_ok = low_ok && dev <= 0.25;
    worst_high = std::min(worst_high, h);
    worst_low = std::max(worst_low, dev);
    rows.push_back({{"eps", eps_list[e]}, {"high_rate_times_eps", h}, {"low_block", low_j[e]},
                    {"low_rate", low[e]}, {"eps_4j", low_target[e]}});
  }
  sink.json("decay_fits.json", {{"per_eps", rows}});
  return {make_gate("high_band_decay", high_ok, "min_rate*eps=" + fix(worst_high), t0),
          make_gate("low_block_decay", low_ok, "max_rel_dev=" + fix(worst_low), t0)};
}

// ---------------------------------------------------------------------------
// simulate

/// Largest block residual over blocks whose peak L2 norm is at least 1e-6 of the largest block's.
double max_residual(const TrajectoryLedger& traj) {
  const auto& acc = traj.n_2();
  std::vector<double> peak(static_cast<std::size_t>(acc.j_hi() - acc.j_lo() + 1), 0.0);
  for (std::size_t k = 0; k < acc.samples(); ++k)
    for (std::size_t i = 0; i < peak.size(); ++i) peak[i] = std::max(peak[i], acc.row(k)[i]);
  const double top = *std::max_element(peak.begin(), peak.end());
  double worst = 0.0;
  for (int j = acc.j_lo(); j <= acc.j_hi(); ++j)
    if (peak[static_cast<std::size_t>(j - acc.j_lo())] >= 1e-6 * top)
      worst = std::max(worst, reformulation_residual(traj, j));
  return worst;
}

double state_distance(const EulerState& a, const EulerState& b) {
  return parseval_l2(a.n - b.n) + parseval_l2(a.v - b.v);
}

std::vector<GateResult> simulation_gates(const ExperimentConfig& cfg, ArtifactSink& sink) {
  std::vector<GateResult> gates;
  const Grid g = cfg.grid.make();
  const auto basis = std::make_shared<const LPBasis>(g);
  const EulerParams params = cfg.euler;
  InitialDataSpec spec = cfg.initial;
  spec.seed = cfg.seed;
  const EulerState initial = make_initial_data(*basis, params, spec, cfg.simulation.p);

  // Main run.
  auto t0 = Clock::now();
  SimulationConfig sim = cfg.simulation;
  if (cfg.dt_start_eps > 0.0) sim.dt_start = cfg.dt_start_eps * params.eps;
  std::vector<double> pending = cfg.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snapshot = 0;
  const std::string hash8 = sink.hash().substr(0, 8);
  std::optional<TrajectoryLedger> run;
  bool regime_ok = true;
  std::string regime_detail = "n_sup<1 throughout";
  try {
    run.emplace(simulate(initial, sim, basis, [&](const EulerState& s) {
      while (next_snapshot < pending.size() && s.t >= pending[next_snapshot] - 1e-12) {
        char stem[64];
        std::snprintf(stem, sizeof stem, "snapshot_t%.6f", pending[next_snapshot]);
        sink.snapshot(std::string(stem) + "_n", s.n);
        sink.snapshot(std::string(stem) + "_v", s.v);
        ++next_snapshot;
      }
    }));
  } catch (const RegimeViolation& e) {
    regime_ok = false;
    regime_detail = std::string("regime violation at t=") + fix(e.time());
  }
  gates.push_back(make_gate("regime", regime_ok, regime_detail, t0));
  if (!run) return gates;
  run->set_fingerprint(sink.hash());
  sink.csv("trajectory.csv", run->to_csv());
  const auto apriori = apriori_constant(*run, default_t_grid(*run));
  const auto darcy = darcy_defect(*run);
  sink.json("diagnostics.json", diagnostics_report(*run, apriori, darcy));

  const bool conserves = params.toggles.linear_only() || (params.law.kind() == LawKind::quadratic);
  if (conserves) {
    t0 = Clock::now();
    double drift = 0.0;
    for (std::size_t k = 1; k < run->samples(); ++k)
      drift = std::max(drift, std::abs(run->n_mean()[k] - run->n_mean()[0]) / run->times()[k]);
    gates.push_back(make_gate("mean_conservation", drift <= 1e-10, "drift_per_unit_time=" + sci(drift), t0));
  }
  if (params.toggles.linear_only()) {
    t0 = Clock::now();
    double rise = 0.0;
    const auto& en = run->energy();
    for (std::size_t k = 1; k < en.size(); ++k) rise = std::max(rise, (en[k] - en[k - 1]) / std::max(en[0], 1e-300));
    gates.push_back(make_gate("energy_dissipation", rise <= 1e-12, "max_relative_rise=" + sci(rise), t0));
  }
  if (run->has_states()) {
    t0 = Clock::now();
    LyapunovParams lp = cfg.lyapunov;
    lp.k = params.k;
    const auto rr = lyapunov_ratio_range(*run, lp);
    gates.push_back(make_gate("lyapunov_equivalence", rr.evaluations > 0 && rr.min >= 0.5 && rr.max <= 1.5,
                              "evaluations=" + std::to_string(rr.evaluations) + " range=[" + fix(rr.min) + "," +
                                  fix(rr.max) + "]",
                              t0));
  }

  // Richardson triplet on the configured data.
  t0 = Clock::now();
  {
    const double T = std::min(1.0, cfg.simulation.t_final);
    std::vector<EulerState> ends;
    for (int level = 0; level < 3; ++level) {
      const double target = 4.0 * cfg.simulation.dt / std::exp2(level);
      const auto steps = static_cast<std::size_t>(std::ceil(T / target - 1e-9));
      const double dt = T / static_cast<double>(steps);
      LawsonStepper stepper(cfg.simulation.cfl);
      EulerState s = initial;
      for (std::size_t k = 0; k < steps; ++k) s = stepper.step(s, dt);
      ends.push_back(s);
    }
    const double e1 = state_distance(ends[0], ends[1]);
    const double e2 = state_distance(ends[1], ends[2]);
    const double order = e2 > 0.0 ? std::log2(e1 / e2) : 0.0;
    sink.json("temporal_order.json", {{"dt", 4.0 * cfg.simulation.dt}, {"T", T}, {"e1", e1}, {"e2", e2}, {"order", order}});
    gates.push_back(make_gate("temporal_order", order >= 3.0, "order=" + fix(order) + " e2=" + sci(e2), t0));
  }

  // Block identity residual.
  t0 = Clock::now();
  {
    SimulationConfig rs;
    rs.cfl = cfg.simulation.cfl;
    rs.keep_states = true;
    rs.t_final = 0.05;
    rs.p = cfg.simulation.p;
    EulerParams lin = params;
    lin.toggles = {false, false};
    const double r_slow = std::floor(std::sqrt(0.125 / params.eps) * g.scale()) / g.scale();
    const double j_slow = std::log2(std::max(r_slow, 1.0 / g.scale()));
    rs.dt = 1e-3;
    const double linear = max_residual(simulate(shell_state(g, lin, j_slow, 1e-3, cfg.seed), rs, basis));
    double coarse = 0.0, fine = 0.0;
    rs.dt = 2e-3;
    coarse = max_residual(simulate(initial, rs, basis));
    rs.dt = 1e-3;
    fine = max_residual(simulate(initial, rs, basis));
    const double ratio = fine > 0.0 ? coarse / fine : 0.0;
    sink.json("reformulation_residual.json",
              {{"linear_residual", linear}, {"linear_shell_radius", std::exp2(j_slow)}, {"nonlinear_dt", {2e-3, 1e-3}},
               {"nonlinear_residual", {coarse, fine}}, {"ratio", ratio}});
    gates.push_back(make_gate("reformulation_residual", linear <= 1e-8 && ratio >= 3.4 && ratio <= 4.6,
                              "linear=" + sci(linear) + " nonlinear_ratio=" + fix(ratio), t0));
  }
  return gates;
}

// ---------------------------------------------------------------------------
// a priori / Darcy sweeps

struct SweepRuns {
  std::vector<double> eps;
  std::vector<std::optional<TrajectoryLedger>> runs;
  std::vector<std::string> failures;
};

SweepRuns simulation_sweep(const ExperimentConfig& cfg) {
  const Grid g = cfg.grid.make();
  const auto basis = std::make_shared<const LPBasis>(g);
  SweepRuns out;
  out.eps = cfg.sweep_eps;
  out.runs.resize(out.eps.size());
  out.failures.resize(out.eps.size());
  InitialDataSpec spec = cfg.initial;
  spec.seed = cfg.seed;
  if (spec.eps_ref <= 0.0) spec.eps_ref = out.eps.front();
  parallel_for(out.eps.size(), [&](std::size_t e) {
    EulerParams params = cfg.euler;
    params.eps = out.eps[e];
    SimulationConfig sim = cfg.simulation;
    sim.keep_states = false;
    if (cfg.dt_start_eps > 0.0) sim.dt_start = cfg.dt_start_eps * params.eps;
    try {
      out.runs[e].emplace(simulate(make_initial_data(*basis, params, spec, sim.p), sim, basis));
    } catch (const RegimeViolation& v) {
      out.failures[e] = std::string("regime violation at t=") + fix(v.time());
    }
  });
  return out;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eps_2^%d", static_cast<int>(std::lround(std::log2(eps))));
  return buf;
}

std::vector<GateResult> apriori_gates(const SweepRuns& sw, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  std::vector<double> c_max;
  bool bounded = true, complete = true;
  double worst_growth = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t e = 0; e < sw.eps.size(); ++e) {
    if (!sw.runs[e]) {
      complete = false;
      rows.push_back({{"eps", sw.eps[e]}, {"failure", sw.failures[e]}});
      continue;
    }
    auto& run = *sw.runs[e];
    const auto rep = apriori_constant(run, default_t_grid(run));
    const auto xt = xt_functional(run);
    double early = rep.x0, late = 0.0;
    for (std::size_t i = 0; i < rep.T.size(); ++i) {
      if (rep.T[i] <= 1.0) early = std::max(early, rep.X[i]);
      late = std::max(late, rep.X[i]);
    }
    const double growth = early > 0.0 ? late / early : std::numeric_limits<double>::infinity();
    worst_growth = std::max(worst_growth, growth);
    bounded = bounded && growth <= 2.0 && !xt.rejected && !rep.degenerate;
    c_max.push_back(rep.c_max);
    sink.csv("apriori_" + eps_tag(sw.eps[e]) + ".csv", apriori_csv(rep));
    sink.json("diagnostics_" + eps_tag(sw.eps[e]) + ".json", diagnostics_report(run, rep, darcy_defect(run)));
    rows.push_back({{"eps", sw.eps[e]},
                    {"c_hat_max", rep.c_max},
                    {"x0", rep.x0},
                    {"x_final", xt.total},
                    {"x_max_T_le_1", early},
                    {"growth", growth},
                    {"rejected", xt.rejected}});
  }
  const double spread = c_max.empty() ? std::numeric_limits<double>::infinity() : max_ratio(c_max);
  sink.json("apriori_summary.json", {{"per_eps", rows}, {"c_hat_spread", spread}, {"max_growth", worst_growth}});
  return {make_gate("apriori_uniformity", complete && spread <= 4.0, "max/min C_hat=" + fix(spread), t0),
          make_gate("apriori_no_blowup", complete && bounded, "max X(T)/max_{T<=1} X=" + fix(worst_growth), t0)};
}

std::vector<GateResult> darcy_gates(const ExperimentConfig& cfg, const SweepRuns& sw, ArtifactSink& sink) {
  const auto t0 = Clock::now();
  std::vector<double> l1;
  bool complete = true;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t e = 0; e < sw.eps.size(); ++e) {
    if (!sw.runs[e]) {
      complete = false;
      rows.push_back({{"eps", sw.eps[e]}, {"failure", sw.failures[e]}});
      continue;
    }
    const auto rep = darcy_defect(*sw.runs[e]);
    l1.push_back(rep.l1);
    sink.csv("darcy_" + eps_tag(sw.eps[e]) + ".csv", darcy_csv(rep));
    rows.push_back({{"eps", sw.eps[e]}, {"l1", rep.l1}, {"quadrature_error", rep.quadrature_error}});
  }
  const double spread = l1.empty() ? std::numeric_limits<double>::infinity() : max_ratio(l1);

  // Exact Darcy data: z(0) = 0 up to rounding.
  const Grid g = cfg.grid.make();
  const LPBasis basis(g);
  InitialDataSpec spec = cfg.initial;
  spec.seed = cfg.seed;
  spec.velocity = VelocityKind::darcy;
  double start = 0.0;
  for (double eps : sw.eps) {
    EulerParams params = cfg.euler;
    params.eps = eps;
    const auto s = make_initial_data(basis, params, spec, cfg.simulation.p);
    const auto z = effective_velocity(s);
    start = std::max(start, hybrid_sum(basis, block_norms(basis, z, cfg.simulation.p), g.dim() / cfg.simulation.p,
                                       Band::all, 0)
                                .value);
  }
  sink.json("darcy_summary.json", {{"per_eps", rows}, {"l1_spread", spread}, {"exact_darcy_start_defect", start}});
  return {make_gate("darcy_uniformity", complete && spread <= 4.0, "max/min L1(z)=" + fix(spread), t0),
          make_gate("darcy_exact_start", start <= 1e-12, "defect=" + sci(start), t0)};
}

GateResult gate_smoke_2d(std::uint64_t seed) {
  const auto t0 = Clock::now();
  const Grid g(2, 256, 8.0, 2.0 / 3.0);
  const auto basis = std::make_shared<const LPBasis>(g);
  EulerParams params;
  params.eps = 0.5;
  InitialDataSpec spec;
  spec.seed = seed;
  spec.profile = {ProfileKind::band, 0.0, 0.0, 0.1};
  SimulationConfig sim;
  sim.cfl.wave_speed = 0.0;
  sim.t_final = 0.25;
  sim.dt = 1.0 / 64.0;
  try {
    const auto run = simulate(make_initial_data(*basis, params, spec, 1.0), sim, basis);
    double drift = 0.0;
    for (std::size_t k = 1; k < run.samples(); ++k)
      drift = std::max(drift, std::abs(run.n_mean()[k] - run.n_mean()[0]) / run.times()[k]);
    return make_gate("smoke_2d", drift <= 1e-10, "samples=" + std::to_string(run.samples()) + " mean_drift=" + sci(drift), t0);
  } catch (const RegimeViolation&) {
    return make_gate("smoke_2d", false, "regime violation", t0);
  }
}

std::string prefix_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output_dir: cannot create '" + dir + "': " + ec.message());
  return dir;
}

}  // namespace

// ---------------------------------------------------------------------------

ArtifactSink::ArtifactSink(std::string dir, std::string hash)
    : enabled_(true), dir_(prefix_dir(dir)), hash_(std::move(hash)) {}

void ArtifactSink::write(const std::string& name, const std::string& bytes) {
  if (!enabled_) return;
  const auto path = std::filesystem::path(dir_) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write artifact " + path.string());
  out << bytes;
  files_.push_back(name);
}

void ArtifactSink::json(const std::string& name, nlohmann::json body) {
  if (!enabled_) return;
  body["config_hash"] = hash_;
  write(name, body.dump(2) + "\n");
}

void ArtifactSink::csv(const std::string& name, const std::string& body) {
  if (!enabled_) return;
  write(name, "# config_hash=" + hash_ + "\n" + body);
}

void ArtifactSink::snapshot(const std::string& stem, const SpectralField& f) {
  if (!enabled_) return;
  std::ostringstream os;
  write_snapshot(os, f);
  write(stem + "." + hash_.substr(0, 8) + ".lpsf", os.str());
}

void ArtifactSink::manifest(const std::string& kind, const std::vector<GateResult>& gates) {
  if (!enabled_) return;
  nlohmann::json art = nlohmann::json::array();
  for (const auto& f : files_) art.push_back({{"file", f}, {"config_hash", hash_}});
  nlohmann::json gj = nlohmann::json::array();
  for (const auto& g : gates) gj.push_back({{"gate", g.name}, {"passed", g.passed}, {"detail", g.detail}});
  const nlohmann::json body = {{"experiment", kind}, {"config_hash", hash_}, {"artifacts", art}, {"gates", gj}};
  const auto path = std::filesystem::path(dir_) / "MANIFEST.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << body.dump(2) << "\n";
}

bool ExperimentResult::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

std::string ExperimentResult::failing_gate() const {
  for (const auto& g : gates)
    if (!g.passed) return g.name;
  return {};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, ArtifactSink& sink) {
  sink.json("config.json", to_json(cfg));
  ExperimentResult res;
  auto add = [&](std::vector<GateResult> g) { res.gates.insert(res.gates.end(), g.begin(), g.end()); };
  switch (cfg.kind) {
    case ExperimentKind::verify_basis:
      res.gates.push_back(gate_reconstruction(cfg, sink));
      res.gates.push_back(gate_hl_shift(cfg, sink));
      break;
    case ExperimentKind::verify_bony:
      res.gates.push_back(gate_bony(cfg, sink));
      break;
    case ExperimentKind::product_law_sweep:
      add(product_law_gates(cfg, sink));
      break;
    case ExperimentKind::linear_exactness:
      res.gates.push_back(gate_eigenvalues(sink));
      res.gates.push_back(gate_linear_exactness(cfg, sink));
      add(decay_gates(cfg, sink));
      break;
    case ExperimentKind::simulate:
      add(simulation_gates(cfg, sink));
      break;
    case ExperimentKind::apriori_sweep:
      add(apriori_gates(simulation_sweep(cfg), sink));
      break;
    case ExperimentKind::darcy_sweep:
      add(darcy_gates(cfg, simulation_sweep(cfg), sink));
      break;
  }
  sink.manifest(kind_name(cfg.kind), res.gates);
  res.artifacts = sink.files();
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ArtifactSink sink(cfg.output_dir, config_hash(cfg));
  return run_experiment(cfg, sink);
}

ExperimentResult sweep_experiment(const std::vector<double>& eps, std::uint64_t seed, ArtifactSink& sink) {
  ExperimentConfig cfg = default_config(ExperimentKind::product_law_sweep);
  cfg.seed = seed;
  cfg.product_law.eps = eps;
  return run_experiment(cfg, sink);
}

bool VerifySummary::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

std::string VerifySummary::table() const {
  std::size_t width = 4;
  for (const auto& g : gates) width = std::max(width, g.name.size());
  std::ostringstream os;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c) {
    os << a << std::string(width - a.size() + 2, ' ') << b << std::string(b.size() < 6 ? 6 - b.size() : 0, ' ') << c
       << '\n';
  };
  row("gate", "result", "  detail");
  for (const auto& g : gates) row(g.name, g.passed ? "PASS" : "FAIL", "  " + g.detail);
  std::size_t failed = 0;
  for (const auto& g : gates) failed += g.passed ? 0 : 1;
  os << (failed == 0 ? "all " + std::to_string(gates.size()) + " gates passed"
                     : std::to_string(failed) + " of " + std::to_string(gates.size()) + " gates failed")
     << '\n';
  return os.str();
}

VerifySummary verify_all(const VerifyOptions& options, const std::function<void(const GateResult&)>& progress) {
  const auto start = Clock::now();
  VerifySummary summary;
  ArtifactSink off;
  auto push = [&](GateResult g) {
    if (progress) progress(g);
    summary.gates.push_back(std::move(g));
  };
  auto cfg_for = [&](ExperimentKind kind) {
    auto c = default_config(kind);
    c.seed = options.seed;
    return c;
  };

  auto basis_cfg = cfg_for(ExperimentKind::verify_basis);
  auto faulty = basis_cfg;
  faulty.fault_inject = options.fault_inject;
  push(gate_reconstruction(faulty, off));
  push(gate_hl_shift(basis_cfg, off));
  push(gate_bony(cfg_for(ExperimentKind::verify_bony), off));
  for (auto& g : product_law_gates(cfg_for(ExperimentKind::product_law_sweep), off)) push(std::move(g));
  push(gate_eigenvalues(off));
  const auto lin = cfg_for(ExperimentKind::linear_exactness);
  push(gate_linear_exactness(lin, off));
  for (auto& g : simulation_gates(cfg_for(ExperimentKind::simulate), off)) push(std::move(g));
  push(gate_smoke_2d(options.seed));
  for (auto& g : decay_gates(lin, off)) push(std::move(g));
  const auto sweep_cfg = cfg_for(ExperimentKind::apriori_sweep);
  const auto runs = simulation_sweep(sweep_cfg);
  for (auto& g : apriori_gates(runs, off)) push(std::move(g));
  for (auto& g : darcy_gates(sweep_cfg, runs, off)) push(std::move(g));

  // Repeat a basis and Bony gate; their details must match the first pass exactly.
  const auto t0 = Clock::now();
  const bool same = gate_hl_shift(basis_cfg, off).detail == summary.gates[1].detail &&
                    gate_bony(cfg_for(ExperimentKind::verify_bony), off).detail == summary.gates[2].detail;
  const double total = seconds_since(start);
  push(make_gate("determinism", same && total <= 600.0, std::string("repeat_identical=") + (same ? "yes" : "no"), t0));
  return summary;
}

}  // namespace lpe
