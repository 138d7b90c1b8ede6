#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "lpe/grid.hpp"

namespace lpe {

enum class LawKind { linear, quadratic, gamma };

/// Barotropic pressure law normalized so that rho_bar = P'(rho_bar) = 1.
///   linear:    P = rho
///   quadratic: P = rho^2 / 2
///   gamma:     P = rho^gamma / gamma
class PressureLaw {
 public:
  static PressureLaw linear() { return PressureLaw(LawKind::linear, 1.0); }
  static PressureLaw quadratic() { return PressureLaw(LawKind::quadratic, 2.0); }
  static PressureLaw gamma_law(double gamma);

  LawKind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }
  std::string name() const;

  double pressure(double rho) const;
  double dpressure(double rho) const;
  /// n(rho) = int_1^rho P'(s)/s ds.
  double enthalpy(double rho) const;
  /// Inverse of enthalpy().
  double density(double n) const;
  /// G(n) = P'(rho(n)) - 1.
  double g(double n) const;
  /// G'(n).
  double dg(double n) const;

  bool operator==(const PressureLaw& o) const noexcept { return kind_ == o.kind_ && gamma_ == o.gamma_; }

 private:
  PressureLaw(LawKind kind, double gamma) : kind_(kind), gamma_(gamma) {}
  LawKind kind_;
  double gamma_;
};

struct EnthalpyMaps {
  std::function<double(double)> n_of_rho;
  std::function<double(double)> G;
};

EnthalpyMaps enthalpy_from_pressure(const PressureLaw& law);

struct Toggles {
  bool advection = true;
  bool g_term = true;
  bool linear_only() const noexcept { return !advection && !g_term; }
};

struct EulerParams {
  double eps = 0.1;
  int k = 2;
  PressureLaw law = PressureLaw::quadratic();
  Toggles toggles;
};

/// (n, v) at time t. n is scalar, v has d components; both are dealiased.
struct EulerState {
  double t = 0.0;
  SpectralField n;
  SpectralField v;
  EulerParams params;

  EulerState(double time, SpectralField n0, SpectralField v0, EulerParams p);
  const Grid& grid() const noexcept { return n.grid(); }
};

struct Tendency {
  SpectralField dn;
  SpectralField dv;
};

/// Nonlinear part of the tendency: dn = -v.grad n - G(n) div v, dv = -v.grad v.
/// Throws RegimeViolation when ||n||_inf >= 1.
Tendency nonlinear_rhs(const EulerState& state);

struct SymbolRoots {
  Complex plus;
  Complex minus;
  double transverse = 0.0;
  bool degenerate = false;
};

/// Roots of lambda^2 + lambda/eps + |xi|^2 = 0 and the transverse rate -1/eps.
SymbolRoots symbol_eigenvalues(double xi_abs, double eps);

/// exp(t A) for A = [[0, -i r], [-i r, -1/eps]] acting on (n_hat, xi_hat . v_hat).
/// Entries are returned as {a, b, c}: exp(tA) = [[a, -i c], [-i c, b]].
std::array<double, 3> linear_propagator(double r, double eps, double t);

/// exp(tA) in row-major order {00, 01, 10, 11}, by scaling and squaring of the Taylor
/// series in long double. Independent of linear_propagator; used for cross-checks.
std::array<std::complex<long double>, 4> reference_propagator(double r, double eps, double t);

/// Per-frequency exact flow of the linear part over a fixed time step.
class LinearPropagator {
 public:
  LinearPropagator(const Grid& grid, double eps, double tau);
  void apply(SpectralField& n, SpectralField& v) const;
  double tau() const noexcept { return tau_; }
  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  double eps_;
  double tau_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  double transverse_;
};

/// Applies the exact linear flow over time t to (n, v).
EulerState linear_evolve(const EulerState& state, double t);

struct CflPolicy {
  double c_cfl = 0.5;
  /// Characteristic speed added to ||v||_inf; 0 limits the step by transport alone.
  double wave_speed = 1.0;
};

/// c_cfl * dx / (wave_speed + ||v||_inf).
double cfl_limit(const EulerState& state, const CflPolicy& policy);

/// Lawson-RK4 integrator on top of the exact linear propagator.
class LawsonStepper {
 public:
  explicit LawsonStepper(CflPolicy policy = {}) : policy_(policy) {}

  /// One step of size dt. Throws CflViolation if dt exceeds the CFL bound.
  EulerState step(const EulerState& state, double dt);
  /// Same, without the CFL check.
  EulerState step_unchecked(const EulerState& state, double dt);

  const CflPolicy& policy() const noexcept { return policy_; }

 private:
  std::shared_ptr<const LinearPropagator> propagator(const Grid& grid, double eps, double tau);
  CflPolicy policy_;
  std::map<std::pair<double, double>, std::shared_ptr<const LinearPropagator>> cache_;
};

EulerState step(const EulerState& state, double dt, const CflPolicy& policy = {});

/// z = v / eps + grad n.
SpectralField effective_velocity(const EulerState& state);

/// Velocity placing every mode of n on the slow linear eigenvector (lambda_plus).
/// Modes with complex roots (2 eps |xi| > 1) get zero velocity. The result is
/// close to the Darcy balance -eps grad n when eps |xi| is small.
SpectralField slow_mode_velocity(const SpectralField& n, double eps);

}  // namespace lpe
