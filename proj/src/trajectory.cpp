#include "lpe/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lpe/error.hpp"
#include "lpe/paraproduct.hpp"
#include "lpe/snapshot.hpp"
#include "lpe/spectral.hpp"

namespace lpe {

std::vector<double> step_schedule(const SimulationConfig& cfg) {
  if (!(cfg.t_final >= 0.0)) throw ConfigError("simulation: t_final must be >= 0");
  if (!(cfg.dt > 0.0)) throw ConfigError("simulation: dt must be positive");
  std::vector<double> out;
  if (cfg.t_final == 0.0) return out;
  if (!(cfg.dt_start > 0.0) || cfg.dt_start >= cfg.dt) {
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_final / cfg.dt - 1e-9)));
    out.assign(steps, cfg.t_final / static_cast<double>(steps));
    return out;
  }
  if (!(cfg.ramp > 1.0)) throw ConfigError("simulation: ramp must exceed 1");
  double t = 0.0;
  double h = cfg.dt_start;
  while (cfg.t_final - t > 1e-12 * cfg.t_final) {
    const double rest = cfg.t_final - t;
    double take = h;
    if (rest <= take) take = rest;
    else if (rest < 2.0 * take) take = 0.5 * rest;
    out.push_back(take);
    t += take;
    h = std::min(cfg.dt, h * cfg.ramp);
  }
  return out;
}

TrajectoryLedger::TrajectoryLedger(std::shared_ptr<const LPBasis> basis, EulerParams params, double p,
                                   std::string fingerprint)
    : basis_(std::move(basis)), params_(params), p_(p), fingerprint_(std::move(fingerprint)) {
  if (!basis_) throw ConfigError("ledger: basis required");
  if (!(p_ >= 1.0)) throw DomainError("ledger: p must be >= 1");
  const int lo = basis_->j_lo();
  const int hi = basis_->j_hi();
  n_p_ = ChemLernerAccumulator(lo, hi, p_);
  n_2_ = ChemLernerAccumulator(lo, hi, 2.0);
  v_p_ = ChemLernerAccumulator(lo, hi, p_);
  v_2_ = ChemLernerAccumulator(lo, hi, 2.0);
  z_p_ = ChemLernerAccumulator(lo, hi, p_);
}

void TrajectoryLedger::record(const EulerState& s, bool keep_state) {
  const std::vector<double> ex = p_ == 2.0 ? std::vector<double>{2.0} : std::vector<double>{p_, 2.0};
  auto nb = block_norms(*basis_, s.n, ex);
  auto vb = block_norms(*basis_, s.v, ex);
  auto zb = block_norms(*basis_, effective_velocity(s), p_);
  const double t = s.t;
  n_p_.append(t, nb.front());
  n_2_.append(t, nb.back());
  v_p_.append(t, vb.front());
  v_2_.append(t, vb.back());
  z_p_.append(t, std::move(zb));
  times_.push_back(t);
  const double en = parseval_l2(s.n);
  const double ev = parseval_l2(s.v);
  energy_.push_back(en * en + ev * ev);
  n_sup_.push_back(sup_norm(s.n));
  n_mean_.push_back(mean(s.n).real());
  if (keep_state) states_.push_back(s);
}

std::string TrajectoryLedger::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,j,field,p,block_norm\n";
  const struct {
    const char* name;
    const ChemLernerAccumulator* acc;
  } cols[] = {{"n", &n_p_}, {"n", &n_2_}, {"v", &v_p_}, {"v", &v_2_}, {"z", &z_p_}};
  for (std::size_t k = 0; k < times_.size(); ++k)
    for (const auto& c : cols) {
      if (c.acc == &n_2_ && p_ == 2.0) continue;
      if (c.acc == &v_2_ && p_ == 2.0) continue;
      for (int j = c.acc->j_lo(); j <= c.acc->j_hi(); ++j)
        os << times_[k] << ',' << j << ',' << c.name << ',' << c.acc->p() << ',' << c.acc->norm(k, j) << '\n';
    }
  return os.str();
}

std::vector<double> sample_times(const SimulationConfig& cfg) {
  const auto schedule = step_schedule(cfg);
  if (cfg.max_samples < 2) throw ConfigError("simulation: max_samples must be >= 2");
  const std::size_t slots = cfg.max_samples - 2;
  const std::size_t stride =
      slots == 0 ? schedule.size() + 1 : std::max<std::size_t>(1, (schedule.size() + slots - 1) / slots);
  std::vector<double> out{0.0};
  double t = 0.0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    t += schedule[k];
    const bool last = k + 1 == schedule.size();
    if (last) out.push_back(cfg.t_final);
    else if ((k + 1) % stride == 0) out.push_back(t);
  }
  return out;
}

TrajectoryLedger simulate(const EulerState& initial, const SimulationConfig& cfg,
                          std::shared_ptr<const LPBasis> basis, const StateObserver& observer) {
  require_same_grid(basis->grid(), initial.grid(), "simulate");
  const auto schedule = step_schedule(cfg);
  const auto planned = sample_times(cfg);

  TrajectoryLedger ledger(basis, initial.params, cfg.p);
  EulerState state = initial;
  state.n = truncate(state.n);
  state.v = truncate(state.v);
  state.t = 0.0;
  auto keep = [&](const EulerState& s) {
    ledger.record(s, cfg.keep_states);
    if (observer) observer(s);
  };
  keep(state);

  LawsonStepper stepper(cfg.cfl);
  try {
    if (!cfg.adaptive_cfl) {
      for (std::size_t k = 0; k < schedule.size(); ++k) {
        state = stepper.step(state, schedule[k]);
        if (k + 1 == schedule.size()) state.t = cfg.t_final;
        if (ledger.times().back() < state.t) {
          const std::size_t next = ledger.samples();
          if (next < planned.size() && state.t >= planned[next] * (1.0 - 1e-12)) keep(state);
        }
      }
    } else {
      const double tol = 1e-12 * cfg.t_final;
      const double dt_cap = cfg.dt;
      double h = cfg.dt_start > 0.0 && cfg.dt_start < dt_cap ? cfg.dt_start : dt_cap;
      std::size_t next = 1;
      while (cfg.t_final - state.t > tol) {
        const double rest = cfg.t_final - state.t;
        double take = std::min(h, cfl_limit(state, cfg.cfl));
        if (rest <= take) take = rest;
        else if (rest < 2.0 * take) take = 0.5 * rest;
        state = stepper.step_unchecked(state, take);
        if (cfg.t_final - state.t <= tol) state.t = cfg.t_final;
        if (next < planned.size() && state.t >= planned[next] - tol) {
          keep(state);
          while (next < planned.size() && planned[next] <= state.t + tol) ++next;
        }
        h = std::min(dt_cap, h * cfg.ramp);
      }
      if (ledger.times().back() < state.t) keep(state);
    }
  } catch (const RegimeViolation&) {
    if (!cfg.dump_prefix.empty()) {
      write_snapshot(cfg.dump_prefix + ".n.lpsf", state.n);
      write_snapshot(cfg.dump_prefix + ".v.lpsf", state.v);
    }
    throw;
  }
  return ledger;
}

double reformulation_residual(const TrajectoryLedger& traj, int j) {
  if (!traj.has_states()) throw DataError("reformulation_residual: ledger has no stored states");
  const auto& st = traj.states();
  if (st.size() < 3) throw DataError("reformulation_residual: need at least 3 stored states");
  const LPBasis& basis = traj.basis();
  const double eps = traj.params().eps;
  const auto& tg = traj.params().toggles;

  std::vector<SpectralField> blocks;
  blocks.reserve(st.size());
  for (const auto& s : st) blocks.push_back(block_project(basis, s.n, j));

  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < st.size(); ++k) {
    const double h1 = st[k].t - st[k - 1].t;
    const double h2 = st[k + 1].t - st[k].t;
    SpectralField dt_term = (-h2 / (h1 * (h1 + h2))) * blocks[k - 1];
    dt_term += ((h2 - h1) / (h1 * h2)) * blocks[k];
    dt_term += (h1 / (h2 * (h1 + h2))) * blocks[k + 1];

    const EulerState& s = st[k];
    std::vector<SpectralField> terms;
    terms.push_back(std::move(dt_term));
    terms.push_back((-eps) * laplacian(blocks[k]));
    terms.push_back(eps * divergence(block_project(basis, effective_velocity(s), j)));
    if (tg.advection) terms.push_back(block_project(basis, dealiased_advection(s.v, s.n), j));
    if (tg.g_term) terms.push_back(block_project(basis, dealiased_product(g_of_n(s), divergence(s.v)), j));

    double scale = 0.0;
    SpectralField sum(s.grid(), 1);
    for (const auto& t : terms) {
      scale = std::max(scale, parseval_l2(t));
      sum += t;
    }
    if (scale == 0.0) continue;
    worst = std::max(worst, parseval_l2(sum) / scale);
  }
  return worst;
}

double hypothesis_norm(const LPBasis& basis, const SpectralField& n, const SpectralField& v, double eps, int k,
                       double p) {
  const int J = frequency_threshold(eps, k);
  const double d = basis.grid().dim();
  const auto np = block_norms(basis, n, p);
  const auto vp = block_norms(basis, v, p);
  const auto n2 = block_norms(basis, n, 2.0);
  const auto v2 = block_norms(basis, v, 2.0);
  double low = 0.0;
  double high = 0.0;
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) {
    const auto i = static_cast<std::size_t>(j - basis.j_lo());
    if (j < J) low += std::exp2(j * d / p) * (np[i] + vp[i]);
    else high += std::exp2(j * (d / 2.0 + 1.0)) * (n2[i] + v2[i]);
  }
  return low + eps * high;
}

EulerState make_initial_data(const LPBasis& basis, const EulerParams& params, const InitialDataSpec& spec, double p) {
  const Grid& g = basis.grid();
  EnsembleConfig ens;
  ens.seed = spec.seed;
  ens.count = static_cast<std::size_t>(g.dim()) + 1;
  ens.profile = spec.profile;
  ens.d = g.dim();
  ens.N = g.points();
  ens.M = g.scale();
  ens.cutoff = g.dealias_cutoff();
  SpectralField n = ensemble_member(ens, g, 0);
  SpectralField v(g, g.dim());
  if (spec.velocity == VelocityKind::ensemble) {
    for (int a = 0; a < g.dim(); ++a) {
      const auto c = spec.velocity_weight * ensemble_member(ens, g, static_cast<std::size_t>(a) + 1);
      std::copy(c.component(0).begin(), c.component(0).end(), v.component(a).begin());
    }
  } else if (spec.velocity == VelocityKind::darcy) {
    v = -params.eps * gradient(n);
  }
  const double eps_ref = spec.eps_ref > 0.0 ? spec.eps_ref : params.eps;
  const double norm = hypothesis_norm(basis, n, v, eps_ref, params.k, p);
  if (!(norm > 0.0)) throw DataError("initial data: zero hypothesis norm");
  const double scale = spec.delta_fraction * spec.delta1 / norm;
  n *= scale;
  v *= scale;
  if (spec.velocity == VelocityKind::darcy) v = -params.eps * gradient(n);
  return EulerState(0.0, truncate(std::move(n)), truncate(std::move(v)), params);
}

}  // namespace lpe
