#include "lpe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lpe/error.hpp"
#include "lpe/paraproduct.hpp"
#include "lpe/spectral.hpp"

namespace lpe {

namespace {

double gradient_energy(const SpectralField& f) {
  const auto r = f.grid().xi_abs();
  double acc = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto v = f.component(c);
    for (std::size_t i = 0; i < v.size(); ++i) acc += r[i] * r[i] * std::norm(v[i]);
  }
  return acc * f.grid().volume();
}

/// int v . grad n dx through the coefficients.
double cross_term(const SpectralField& v, const SpectralField& n) {
  const Grid& g = n.grid();
  const auto nn = n.component(0);
  double acc = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const auto xi = g.xi(a);
    const auto va = v.component(a);
    for (std::size_t i = 0; i < nn.size(); ++i) {
      const Complex dn(-xi[i] * nn[i].imag(), xi[i] * nn[i].real());
      acc += (std::conj(va[i]) * dn).real();
    }
  }
  return acc * g.volume();
}

double three_point(double h1, double h2, double a, double b, double c) {
  return (-h2 / (h1 * (h1 + h2))) * a + ((h2 - h1) / (h1 * h2)) * b + (h1 / (h2 * (h1 + h2))) * c;
}

int ledger_threshold(const TrajectoryLedger& traj) {
  return frequency_threshold(traj.params().eps, traj.params().k);
}

}  // namespace

void LyapunovParams::validate() const {
  if (!(c_tilde >= 0.0)) throw ConfigError("lyapunov: c_tilde must be >= 0");
  if (!(c_tilde * std::ldexp(1.0, -k) < 1.0)) throw ConfigError("lyapunov: requires c_tilde * 2^-k < 1");
  if (!(kappa >= 0.0)) throw ConfigError("lyapunov: kappa must be >= 0");
}

std::optional<LyapunovValue> lyapunov_block(const LPBasis& basis, const EulerState& state, int j,
                                            const LyapunovParams& params) {
  params.validate();
  const double eps = state.params.eps;
  const int J = frequency_threshold(eps, params.k);
  if (j < J) throw DomainError("lyapunov_block: j must be >= J_eps = " + std::to_string(J));
  const SpectralField nj = block_project(basis, state.n, j);
  const SpectralField vj = block_project(basis, state.v, j);
  const double en = parseval_l2(nj);
  const double ev = parseval_l2(vj);
  const double energy = std::ldexp(1.0, 2 * j) * eps * (en * en + ev * ev);
  if (energy == 0.0) return std::nullopt;
  LyapunovValue out;
  out.value = energy + 2.0 * params.c_tilde * cross_term(vj, nj);
  out.ratio = out.value / energy;
  return out;
}

BalanceReport dissipation_balance(const TrajectoryLedger& traj, int j, const LyapunovParams& params) {
  params.validate();
  if (!traj.has_states()) throw DataError("dissipation_balance: ledger has no stored states");
  const auto& st = traj.states();
  if (st.size() < 3) throw DataError("dissipation_balance: need at least 3 stored states");
  const LPBasis& basis = traj.basis();
  const double eps = traj.params().eps;
  const auto& tg = traj.params().toggles;
  const auto& law = traj.params().law;

  std::vector<double> value(st.size(), 0.0);
  for (std::size_t k = 0; k < st.size(); ++k) {
    const SpectralField nj = block_project(basis, st[k].n, j);
    const SpectralField vj = block_project(basis, st[k].v, j);
    const double en = parseval_l2(nj);
    const double ev = parseval_l2(vj);
    value[k] = std::ldexp(1.0, 2 * j) * eps * (en * en + ev * ev) + 2.0 * params.c_tilde * cross_term(vj, nj);
  }

  BalanceReport rep;
  rep.j = j;
  rep.max_relative_lhs = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < st.size(); ++k) {
    const EulerState& s = st[k];
    const double h1 = s.t - st[k - 1].t;
    const double h2 = st[k + 1].t - s.t;
    const double ddt = 0.5 * three_point(h1, h2, value[k - 1], value[k], value[k + 1]);
    const SpectralField nj = block_project(basis, s.n, j);
    const SpectralField vj = block_project(basis, s.v, j);
    const double grad = gradient_energy(nj) + gradient_energy(vj);
    const double lhs = ddt + params.kappa * grad;
    const double scale = std::abs(ddt) + params.kappa * grad;

    double sup = 0.0;
    for (int a = 0; a < s.grid().dim(); ++a) sup = std::max(sup, sup_norm(derivative(s.v, a)));
    if (tg.g_term) {
      const double dg = law.dg(0.0);
      SpectralField dtn = (-1.0) * divergence(s.v);
      dtn += nonlinear_rhs(s).dn;
      sup = std::max(sup, std::abs(dg) * sup_norm(dtn));
      sup = std::max(sup, std::abs(dg) * sup_norm(gradient(s.n)));
    }
    const auto rc = transport_commutators(basis, s, j);
    double rsum = 0.0;
    if (tg.advection) rsum += parseval_l2(rc.R1) + parseval_l2(rc.R3);
    if (tg.g_term) rsum += parseval_l2(rc.R2);
    const double l2 = std::max(value[k], 0.0) / eps;
    const double rhs = eps * sup * l2 + std::sqrt(l2) * eps * std::ldexp(rsum, j);

    rep.t.push_back(s.t);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.scale.push_back(scale);
    if (scale > 0.0) rep.max_relative_lhs = std::max(rep.max_relative_lhs, lhs / scale);
    if (rhs > 0.0) rep.c_hat = std::max(rep.c_hat, std::max(lhs, 0.0) / rhs);
    else if (lhs > 1e-6 * scale) rep.violation = true;
  }
  if (!std::isfinite(rep.max_relative_lhs)) rep.max_relative_lhs = 0.0;
  return rep;
}

XtResult xt_functional(const TrajectoryLedger& traj, std::size_t upto) {
  const LPBasis& basis = traj.basis();
  const std::size_t n = upto == 0 ? traj.samples() : std::min(upto, traj.samples());
  if (n == 0) throw DataError("xt_functional: empty ledger");
  const double eps = traj.params().eps;
  const int J = ledger_threshold(traj);
  const double d = basis.grid().dim();
  const double p = traj.p();
  const double inf = std::numeric_limits<double>::infinity();

  XtResult x;
  x.time = traj.times()[n - 1];
  x.degenerate = threshold_degenerate(basis, J);
  x.rejected = J - basis.j_min() < 3 || basis.j_max() - J + 1 < 3;

  auto take = [&](const ChemLernerAccumulator& acc, double s, Band band, double r) {
    if (!std::isinf(r) && n < 2) return 0.0;
    const HybridNormSpec spec{s, acc.p(), band, J};
    const auto res = cl_norm(acc, basis, spec, r, n);
    x.truncated = x.truncated || res.truncated;
    x.quadrature_error += res.quadrature_error;
    return res.value;
  };

  auto& c = x.components;
  c[0] = take(traj.n_p(), d / p, Band::low, inf) + take(traj.v_p(), d / p, Band::low, inf);
  c[1] = eps * take(traj.n_p(), d / p + 2.0, Band::low, 1.0);
  c[2] = take(traj.v_p(), d / p + 1.0, Band::low, 1.0);
  c[3] = take(traj.v_p(), d / p, Band::all, 2.0) / std::sqrt(eps);
  c[4] = eps * (take(traj.n_2(), d / 2.0 + 1.0, Band::high, inf) + take(traj.v_2(), d / 2.0 + 1.0, Band::high, inf));
  c[5] = take(traj.n_2(), d / 2.0 + 1.0, Band::high, 1.0) + take(traj.v_2(), d / 2.0 + 1.0, Band::high, 1.0);
  c[6] = take(traj.z_p(), d / p, Band::all, 1.0);
  for (double v : c) x.total += v;
  return x;
}

AprioriReport apriori_constant(const TrajectoryLedger& traj, const std::vector<double>& t_grid) {
  AprioriReport rep;
  rep.x0 = xt_functional(traj, 1).total;
  rep.degenerate = rep.x0 == 0.0;
  const auto& times = traj.times();
  for (double T : t_grid) {
    const auto upto = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), T * (1.0 + 1e-12)) - times.begin());
    if (upto == 0) continue;
    const double X = xt_functional(traj, upto).total;
    rep.T.push_back(times[upto - 1]);
    rep.X.push_back(X);
    const double c = rep.degenerate ? 0.0 : X / (rep.x0 + X * X);
    rep.c_hat.push_back(c);
    rep.c_max = std::max(rep.c_max, c);
  }
  return rep;
}

std::vector<double> default_t_grid(const TrajectoryLedger& traj, std::size_t count) {
  std::vector<double> out;
  const auto& t = traj.times();
  if (t.size() < 2 || count == 0) return out;
  const double T = t.back();
  const double head = std::max(t[1], T * 1e-4);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(head * std::pow(T / head, f));
  }
  return out;
}

DarcyReport darcy_defect(const TrajectoryLedger& traj) {
  const LPBasis& basis = traj.basis();
  const double s = basis.grid().dim() / traj.p();
  DarcyReport rep;
  rep.t = traj.times();
  for (std::size_t k = 0; k < traj.samples(); ++k)
    rep.defect.push_back(hybrid_sum(basis, traj.z_p().row(k), s, Band::all, 0).value);
  if (traj.samples() >= 2) {
    const auto res = cl_norm(traj.z_p(), basis, HybridNormSpec{s, traj.p(), Band::all, 0}, 1.0);
    rep.l1 = res.value;
    rep.quadrature_error = res.quadrature_error;
  }
  return rep;
}

std::vector<double> high_band_series(const TrajectoryLedger& traj) {
  const LPBasis& basis = traj.basis();
  const int J = ledger_threshold(traj);
  const double s = basis.grid().dim() / 2.0 + 1.0;
  std::vector<double> out;
  for (std::size_t k = 0; k < traj.samples(); ++k)
    out.push_back(hybrid_sum(basis, traj.n_2().row(k), s, Band::high, J).value +
                  hybrid_sum(basis, traj.v_2().row(k), s, Band::high, J).value);
  return out;
}

std::vector<double> low_block_series(const TrajectoryLedger& traj, int j) {
  std::vector<double> out;
  for (std::size_t k = 0; k < traj.samples(); ++k) out.push_back(traj.n_p().norm(k, j));
  return out;
}

std::optional<double> fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t0,
                                     double t1, double floor) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < std::min(t.size(), y.size()); ++i) {
    if (t[i] < t0 || t[i] > t1 || !(y[i] > floor)) continue;
    const double ly = std::log(y[i]);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++m;
  }
  if (m < 2) return std::nullopt;
  const double den = static_cast<double>(m) * sxx - sx * sx;
  if (den <= 0.0) return std::nullopt;
  return -(static_cast<double>(m) * sxy - sx * sy) / den;
}

RatioRange lyapunov_ratio_range(const TrajectoryLedger& traj, const LyapunovParams& params) {
  if (!traj.has_states()) throw DataError("lyapunov_ratio_range: ledger has no stored states");
  const LPBasis& basis = traj.basis();
  const int J = frequency_threshold(traj.params().eps, params.k);
  RatioRange rr;
  rr.min = std::numeric_limits<double>::infinity();
  rr.max = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.states())
    for (int j = std::max(J, basis.j_lo()); j <= basis.j_hi(); ++j) {
      const auto v = lyapunov_block(basis, s, j, params);
      if (!v) continue;
      rr.min = std::min(rr.min, v->ratio);
      rr.max = std::max(rr.max, v->ratio);
      ++rr.evaluations;
    }
  if (rr.evaluations == 0) rr.min = rr.max = 1.0;
  return rr;
}

nlohmann::json to_json(const XtResult& x) {
  nlohmann::json j;
  nlohmann::json comps;
  for (std::size_t i = 0; i < x.components.size(); ++i) comps[kXtComponentNames[i]] = x.components[i];
  j["T"] = x.time;
  j["components"] = comps;
  j["total"] = x.total;
  j["degenerate"] = x.degenerate;
  j["rejected"] = x.rejected;
  j["truncation_flag"] = x.truncated;
  j["quadrature_error"] = x.quadrature_error;
  return j;
}

nlohmann::json diagnostics_report(const TrajectoryLedger& traj, const AprioriReport& apriori,
                                  const DarcyReport& darcy) {
  nlohmann::json j;
  j["run_fingerprint"] = traj.fingerprint();
  j["bump"] = LPBasis::bump_fingerprint();
  j["samples"] = traj.samples();
  j["x"] = to_json(xt_functional(traj));
  j["x0"] = to_json(xt_functional(traj, 1));
  nlohmann::json grid = nlohmann::json::array();
  for (std::size_t i = 0; i < apriori.T.size(); ++i)
    grid.push_back({{"T", apriori.T[i]}, {"X", apriori.X[i]}, {"c_hat", apriori.c_hat[i]}});
  j["c_hat_grid"] = grid;
  j["c_hat_max"] = apriori.c_max;
  j["c_hat_degenerate"] = apriori.degenerate;
  j["darcy_l1"] = darcy.l1;
  j["darcy_quadrature_error"] = darcy.quadrature_error;
  if (traj.has_states()) {
    const auto rr = lyapunov_ratio_range(traj, LyapunovParams{0.5, traj.params().k, 1.0});
    j["lyapunov_ratio"] = {{"min", rr.min}, {"max", rr.max}, {"evaluations", rr.evaluations}};
  }
  const auto hb = high_band_series(traj);
  const double eps = traj.params().eps;
  if (const auto rate = fit_decay_rate(traj.times(), hb, 0.0, 20.0 * eps, 1e-14 * hb.front()))
    j["decay_fits"]["high_band_rate_times_eps"] = *rate * eps;
  return j;
}

std::string apriori_csv(const AprioriReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t,X,c_hat\n";
  for (std::size_t i = 0; i < r.T.size(); ++i) os << r.T[i] << ',' << r.X[i] << ',' << r.c_hat[i] << '\n';
  return os.str();
}

std::string darcy_csv(const DarcyReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t,defect\n";
  for (std::size_t i = 0; i < r.t.size(); ++i) os << r.t[i] << ',' << r.defect[i] << '\n';
  return os.str();
}

}  // namespace lpe
