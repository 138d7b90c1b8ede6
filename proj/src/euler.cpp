#include "lpe/euler.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lpe/error.hpp"
#include "lpe/spectral.hpp"

namespace lpe {

PressureLaw PressureLaw::gamma_law(double gamma) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw ConfigError("pressure law: gamma must be >= 1");
  return PressureLaw(LawKind::gamma, gamma);
}

std::string PressureLaw::name() const {
  switch (kind_) {
    case LawKind::linear: return "linear";
    case LawKind::quadratic: return "quadratic";
    case LawKind::gamma: {
      std::ostringstream os;
      os.precision(17);
      os << "gamma(" << gamma_ << ")";
      return os.str();
    }
  }
  return "unknown";
}

double PressureLaw::pressure(double rho) const {
  if (!(rho > 0.0)) throw DomainError("pressure: rho must be positive");
  switch (kind_) {
    case LawKind::linear: return rho;
    case LawKind::quadratic: return 0.5 * rho * rho;
    case LawKind::gamma: return std::pow(rho, gamma_) / gamma_;
  }
  return 0.0;
}

double PressureLaw::dpressure(double rho) const {
  if (!(rho > 0.0)) throw DomainError("pressure: rho must be positive");
  switch (kind_) {
    case LawKind::linear: return 1.0;
    case LawKind::quadratic: return rho;
    case LawKind::gamma: return std::pow(rho, gamma_ - 1.0);
  }
  return 0.0;
}

double PressureLaw::enthalpy(double rho) const {
  if (!(rho > 0.0)) throw DomainError("enthalpy: rho must be positive");
  switch (kind_) {
    case LawKind::linear: return std::log(rho);
    case LawKind::quadratic: return rho - 1.0;
    case LawKind::gamma:
      if (gamma_ == 1.0) return std::log(rho);
      return std::expm1((gamma_ - 1.0) * std::log(rho)) / (gamma_ - 1.0);
  }
  return 0.0;
}

double PressureLaw::density(double n) const {
  switch (kind_) {
    case LawKind::linear: return std::exp(n);
    case LawKind::quadratic:
      if (!(n > -1.0)) throw DomainError("density: enthalpy below vacuum");
      return 1.0 + n;
    case LawKind::gamma: {
      if (gamma_ == 1.0) return std::exp(n);
      const double base = 1.0 + (gamma_ - 1.0) * n;
      if (!(base > 0.0)) throw DomainError("density: enthalpy below vacuum");
      return std::exp(std::log1p((gamma_ - 1.0) * n) / (gamma_ - 1.0));
    }
  }
  return 0.0;
}

double PressureLaw::g(double n) const {
  switch (kind_) {
    case LawKind::linear: return 0.0;
    case LawKind::quadratic: return n;
    case LawKind::gamma: return (gamma_ - 1.0) * n;
  }
  return 0.0;
}

double PressureLaw::dg(double) const {
  switch (kind_) {
    case LawKind::linear: return 0.0;
    case LawKind::quadratic: return 1.0;
    case LawKind::gamma: return gamma_ - 1.0;
  }
  return 0.0;
}

EnthalpyMaps enthalpy_from_pressure(const PressureLaw& law) {
  return {[law](double rho) { return law.enthalpy(rho); }, [law](double n) { return law.g(n); }};
}

EulerState::EulerState(double time, SpectralField n0, SpectralField v0, EulerParams p)
    : t(time), n(std::move(n0)), v(std::move(v0)), params(p) {
  require_same_grid(n.grid(), v.grid(), "euler state");
  if (!n.is_scalar()) throw ConfigError("euler state: n must be scalar");
  if (v.components() != v.grid().dim()) throw ConfigError("euler state: v must have d components");
  if (!(params.eps > 0.0)) throw ConfigError("euler state: eps must be positive");
}

Tendency nonlinear_rhs(const EulerState& state) {
  const Grid& g = state.grid();
  const int d = g.dim();
  const std::size_t size = g.size();
  const auto& tg = state.params.toggles;

  const PhysicalField pn = to_physical(state.n);
  const auto nv = pn.component(0);
  double n_sup = 0.0;
  for (double x : nv) n_sup = std::max(n_sup, std::abs(x));
  if (!(n_sup < 1.0)) {
    std::ostringstream os;
    os << "euler: ||n||_inf = " << n_sup << " >= 1 at t = " << state.t;
    throw RegimeViolation(os.str(), state.t, n_sup);
  }

  Tendency out{SpectralField(g, 1), SpectralField(g, d)};
  if (tg.linear_only()) return out;

  const PhysicalField pv = to_physical(state.v);
  PhysicalField dn(g, 1);
  PhysicalField dv(g, d);
  auto dnv = dn.component(0);

  if (tg.g_term) {
    const PhysicalField div = to_physical(divergence(state.v));
    const auto dd = div.component(0);
    const auto& law = state.params.law;
    for (std::size_t i = 0; i < size; ++i) dnv[i] -= law.g(nv[i]) * dd[i];
  }
  if (tg.advection) {
    for (int a = 0; a < d; ++a) {
      const auto va = pv.component(a);
      const PhysicalField dna = to_physical(derivative(state.n, a));
      const auto x = dna.component(0);
      for (std::size_t i = 0; i < size; ++i) dnv[i] -= va[i] * x[i];
      const PhysicalField dva = to_physical(derivative(state.v, a));
      for (int c = 0; c < d; ++c) {
        auto o = dv.component(c);
        const auto y = dva.component(c);
        for (std::size_t i = 0; i < size; ++i) o[i] -= va[i] * y[i];
      }
    }
  }
  out.dn = truncate(to_spectral(dn));
  out.dv = truncate(to_spectral(dv));
  return out;
}

SymbolRoots symbol_eigenvalues(double r, double eps) {
  if (!(eps > 0.0)) throw DomainError("symbol: eps must be positive");
  SymbolRoots roots;
  roots.transverse = -1.0 / eps;
  const double disc = 1.0 - 4.0 * eps * eps * r * r;
  roots.degenerate = std::abs(disc) < 1e-8;
  if (disc >= 0.0) {
    const double minus = -(1.0 + std::sqrt(disc)) / (2.0 * eps);
    roots.minus = minus;
    // Product of the roots is r^2; avoids cancellation in the slow root.
    roots.plus = (r * r) / minus;
  } else {
    const double im = std::sqrt(-disc) / (2.0 * eps);
    roots.plus = Complex(-1.0 / (2.0 * eps), im);
    roots.minus = Complex(-1.0 / (2.0 * eps), -im);
  }
  return roots;
}

std::array<double, 3> linear_propagator(double r, double eps, double t) {
  if (!(eps > 0.0)) throw DomainError("propagator: eps must be positive");
  const double half = 1.0 / (2.0 * eps);
  const double delta2 = half * half - r * r;
  // ec = exp(mu t) cosh(delta t), es = exp(mu t) sinh(delta t) / delta, mu = -1/(2 eps).
  // Near the double root the series in (delta t)^2 is used; its leading term is the Jordan limit.
  double ec = 0.0;
  double es = 0.0;
  {
    const double delta = std::sqrt(std::abs(delta2));
    const double x = delta * t;
    if (x < 1e-3) {
      const double x2 = delta2 >= 0.0 ? x * x : -x * x;
      const double damp = std::exp(-half * t);
      ec = damp * (1.0 + x2 / 2.0 + x2 * x2 / 24.0);
      es = damp * t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
    } else if (delta2 > 0.0) {
      const double e_plus = std::exp(-(r * r) / (half + delta) * t);
      const double e_minus = std::exp(-(half + delta) * t);
      ec = 0.5 * (e_plus + e_minus);
      es = (e_plus - e_minus) / (2.0 * delta);
    } else {
      const double damp = std::exp(-half * t);
      ec = damp * std::cos(x);
      es = damp * std::sin(x) / delta;
    }
  }
  return {ec + half * es, ec - half * es, r * es};
}

std::array<std::complex<long double>, 4> reference_propagator(double r, double eps, double t) {
  using C = std::complex<long double>;
  using Mat = std::array<C, 4>;
  auto mul = [](const Mat& x, const Mat& y) {
    return Mat{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
               x[2] * y[1] + x[3] * y[3]};
  };
  const long double rt = static_cast<long double>(r) * t;
  const long double dt = static_cast<long double>(t) / eps;
  const long double norm = std::abs(rt) + std::abs(dt);
  int squarings = 0;
  long double scale = 1.0L;
  while (norm * scale > 0.25L) {
    scale *= 0.5L;
    ++squarings;
  }
  const Mat a{C(0), C(0, -rt * scale), C(0, -rt * scale), C(-dt * scale)};
  Mat sum{C(1), C(0), C(0), C(1)};
  Mat term = sum;
  for (int k = 1; k <= 30; ++k) {
    term = mul(term, a);
    for (auto& x : term) x /= static_cast<long double>(k);
    for (int e = 0; e < 4; ++e) sum[e] += term[e];
  }
  for (int s = 0; s < squarings; ++s) sum = mul(sum, sum);
  return sum;
}

LinearPropagator::LinearPropagator(const Grid& grid, double eps, double tau)
    : grid_(grid), eps_(eps), tau_(tau), transverse_(std::exp(-tau / eps)) {
  const auto r = grid.xi_abs();
  const std::size_t n = grid.size();
  a_.resize(n);
  b_.resize(n);
  c_.resize(n);
  std::map<double, std::array<double, 3>> memo;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = memo.find(r[i]);
    if (it == memo.end()) it = memo.emplace(r[i], linear_propagator(r[i], eps, tau)).first;
    a_[i] = it->second[0];
    b_[i] = it->second[1];
    c_[i] = it->second[2];
  }
}

void LinearPropagator::apply(SpectralField& n, SpectralField& v) const {
  require_same_grid(grid_, n.grid(), "propagator");
  const int d = grid_.dim();
  auto nn = n.component(0);
  const std::size_t size = grid_.size();
  for (std::size_t i = 0; i < size; ++i) {
    Complex w{0.0, 0.0};
    for (int a = 0; a < d; ++a) w += grid_.unit_xi(a)[i] * v.component(a)[i];
    const Complex ic_n = Complex(0.0, c_[i]) * nn[i];
    const Complex ic_w = Complex(0.0, c_[i]) * w;
    const Complex n_new = a_[i] * nn[i] - ic_w;
    const Complex w_new = b_[i] * w - ic_n;
    nn[i] = n_new;
    if (d == 1) {
      const double u = grid_.unit_xi(0)[i];
      auto vv = v.component(0);
      vv[i] = u == 0.0 ? transverse_ * vv[i] : u * w_new;
      continue;
    }
    for (int a = 0; a < d; ++a) {
      const double u = grid_.unit_xi(a)[i];
      auto va = v.component(a);
      va[i] = u * w_new + transverse_ * (va[i] - u * w);
    }
  }
}

EulerState linear_evolve(const EulerState& state, double t) {
  EulerState out = state;
  LinearPropagator(state.grid(), state.params.eps, t).apply(out.n, out.v);
  out.t = state.t + t;
  return out;
}

double cfl_limit(const EulerState& state, const CflPolicy& policy) {
  const double speed = policy.wave_speed + sup_norm(state.v);
  if (speed <= 0.0) return std::numeric_limits<double>::infinity();
  return policy.c_cfl * state.grid().spacing() / speed;
}

std::shared_ptr<const LinearPropagator> LawsonStepper::propagator(const Grid& grid, double eps, double tau) {
  const auto key = std::make_pair(eps, tau);
  auto it = cache_.find(key);
  if (it != cache_.end() && it->second->grid() == grid) return it->second;
  if (cache_.size() > 64) cache_.clear();
  auto p = std::make_shared<const LinearPropagator>(grid, eps, tau);
  cache_[key] = p;
  return p;
}

namespace {

struct Pair {
  SpectralField n;
  SpectralField v;
};

void axpy(Pair& y, double a, const Tendency& x) {
  auto yn = y.n.data();
  const auto xn = x.dn.data();
  for (std::size_t i = 0; i < yn.size(); ++i) yn[i] += a * xn[i];
  auto yv = y.v.data();
  const auto xv = x.dv.data();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += a * xv[i];
}

Tendency rhs_at(const EulerState& base, const Pair& u, double t) {
  EulerState s(t, u.n, u.v, base.params);
  return nonlinear_rhs(s);
}

void propagate(const LinearPropagator& p, Tendency& k) { p.apply(k.dn, k.dv); }

}  // namespace

EulerState LawsonStepper::step(const EulerState& state, double dt) {
  const double limit = cfl_limit(state, policy_);
  if (dt > limit) {
    std::ostringstream os;
    os << "euler: dt = " << dt << " exceeds the CFL bound " << limit;
    throw CflViolation(os.str(), limit);
  }
  return step_unchecked(state, dt);
}

EulerState LawsonStepper::step_unchecked(const EulerState& state, double dt) {
  if (!(dt > 0.0)) throw ConfigError("euler: dt must be positive");
  const Grid& g = state.grid();
  const double eps = state.params.eps;
  const auto full_ptr = propagator(g, eps, dt);
  const auto half_ptr = propagator(g, eps, 0.5 * dt);
  const auto& full = *full_ptr;
  const auto& half = *half_ptr;

  if (state.params.toggles.linear_only()) {
    nonlinear_rhs(state);  // regime check
    EulerState out = state;
    full.apply(out.n, out.v);
    out.t = state.t + dt;
    return out;
  }

  const double t0 = state.t;
  Pair u0{state.n, state.v};

  Tendency k1 = nonlinear_rhs(state);

  Pair u2 = u0;
  axpy(u2, 0.5 * dt, k1);
  half.apply(u2.n, u2.v);
  Tendency k2 = rhs_at(state, u2, t0 + 0.5 * dt);

  Pair u0h = u0;
  half.apply(u0h.n, u0h.v);
  Pair u3 = u0h;
  axpy(u3, 0.5 * dt, k2);
  Tendency k3 = rhs_at(state, u3, t0 + 0.5 * dt);

  Pair u4 = u0h;
  half.apply(u4.n, u4.v);
  Tendency k3h = k3;
  propagate(half, k3h);
  axpy(u4, dt, k3h);
  Tendency k4 = rhs_at(state, u4, t0 + dt);

  // u1 = E u0 + dt/6 (E k1 + 2 E_half (k2 + k3) + k4)
  Tendency mid{k2.dn + k3.dn, k2.dv + k3.dv};
  propagate(half, mid);
  Pair out{u0.n, u0.v};
  axpy(out, dt / 6.0, k1);
  full.apply(out.n, out.v);
  axpy(out, dt / 3.0, mid);
  axpy(out, dt / 6.0, k4);
  return EulerState(t0 + dt, std::move(out.n), std::move(out.v), state.params);
}

EulerState step(const EulerState& state, double dt, const CflPolicy& policy) {
  LawsonStepper stepper(policy);
  return stepper.step(state, dt);
}

SpectralField effective_velocity(const EulerState& state) {
  SpectralField z = gradient(state.n);
  const auto v = state.v.data();
  auto zd = z.data();
  const double inv = 1.0 / state.params.eps;
  for (std::size_t i = 0; i < zd.size(); ++i) zd[i] += inv * v[i];
  return z;
}

SpectralField slow_mode_velocity(const SpectralField& n, double eps) {
  if (!n.is_scalar()) throw ConfigError("slow_mode_velocity: n must be scalar");
  const Grid& g = n.grid();
  SpectralField v(g, g.dim());
  const auto r = g.xi_abs();
  const auto nyq = g.nyquist();
  const auto nn = n.component(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (r[i] == 0.0 || nyq[i]) continue;
    const Complex lp = symbol_eigenvalues(r[i], eps).plus;
    if (lp.imag() != 0.0) continue;
    // lambda n = -i r w  =>  w = i lambda n / r
    const Complex w = Complex(0.0, lp.real() / r[i]) * nn[i];
    for (int a = 0; a < g.dim(); ++a) v.component(a)[i] = g.unit_xi(a)[i] * w;
  }
  return v;
}

}  // namespace lpe
