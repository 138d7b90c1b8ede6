#include "lpe/besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <fftw3.h>

#include "detail/grid_cache.hpp"
#include "lpe/error.hpp"
#include "lpe/spectral.hpp"
#include "lpe/warnings.hpp"

namespace lpe {

namespace {

void warn_if_mean(const SpectralField& f) {
  double m2 = 0.0;
  for (int c = 0; c < f.components(); ++c) m2 += std::norm(mean(f, c));
  const double l2 = parseval_l2(f);
  if (std::sqrt(m2 * f.grid().volume()) > 1e-10 * l2 && l2 > 0.0)
    warn("besov: field has a nonzero mean; homogeneous semi-norms ignore it");
}

bool in_band(int j, Band band, int threshold) {
  switch (band) {
    case Band::all: return true;
    case Band::low: return j <= threshold - 1;
    case Band::high: return j >= threshold;
  }
  return false;
}

double time_integral(const std::vector<double>& t, const std::vector<double>& y, std::size_t n, double r,
                     bool coarse) {
  // Trapezoid of y^r over the first n samples; `coarse` keeps every other sample plus the last.
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; k += coarse ? 2 : 1) idx.push_back(k);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  double acc = 0.0;
  for (std::size_t q = 1; q < idx.size(); ++q) {
    const double a = std::pow(y[idx[q - 1]], r);
    const double b = std::pow(y[idx[q]], r);
    acc += 0.5 * (t[idx[q]] - t[idx[q - 1]]) * (a + b);
  }
  return acc;
}

}  // namespace

int frequency_threshold(double eps, int k) {
  if (!(eps > 0.0)) throw DomainError("threshold: eps must be positive");
  return -static_cast<int>(std::floor(std::log2(eps))) + k;
}

std::vector<std::vector<double>> block_norms(const LPBasis& basis, const SpectralField& f,
                                             const std::vector<double>& exponents) {
  require_same_grid(basis.grid(), f.grid(), "block_norms");
  const Grid& g = f.grid();
  const std::size_t n = g.size();
  std::vector<std::vector<double>> out(exponents.size(),
                                       std::vector<double>(static_cast<std::size_t>(basis.block_count()), 0.0));
  const bool need_physical =
      std::any_of(exponents.begin(), exponents.end(), [](double p) { return p != 2.0; });

  std::vector<Complex> coeffs(n);
  std::vector<Complex> values(n);
  PhysicalField phys(g, f.components());
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) {
    const auto& phi = basis.phi(j);
    const std::size_t b = static_cast<std::size_t>(j - basis.j_lo());
    double l2sq = 0.0;
    bool empty = true;
    for (int c = 0; c < f.components(); ++c) {
      const auto in = f.component(c);
      for (std::size_t i = 0; i < n; ++i) {
        coeffs[i] = phi[i] * in[i];
        l2sq += std::norm(coeffs[i]);
      }
      if (l2sq > 0.0) empty = false;
      if (need_physical && l2sq > 0.0) {
        g.cache().execute(coeffs.data(), values.data(), FFTW_BACKWARD);
        auto pc = phys.component(c);
        for (std::size_t i = 0; i < n; ++i) pc[i] = values[i].real();
      }
    }
    if (empty) continue;
    for (std::size_t e = 0; e < exponents.size(); ++e)
      out[e][b] = exponents[e] == 2.0 ? std::sqrt(l2sq * g.volume()) : lp_norm(phys, exponents[e]);
  }
  return out;
}

std::vector<double> block_norms(const LPBasis& basis, const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("block_norms: exponent must satisfy p >= 1");
  return std::move(block_norms(basis, f, std::vector<double>{p}).front());
}

bool threshold_degenerate(const LPBasis& basis, int threshold) {
  return threshold < basis.j_min() + 2 || threshold > basis.j_max() - 2;
}

NormResult hybrid_sum(const LPBasis& basis, const std::vector<double>& norms, double s, Band band,
                      int threshold) {
  NormResult res;
  res.degenerate = band != Band::all && threshold_degenerate(basis, threshold);
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) {
    if (!in_band(j, band, threshold)) continue;
    const double x = norms[static_cast<std::size_t>(j - basis.j_lo())];
    if (x == 0.0) continue;
    res.value += std::exp2(j * s) * x;
    if (basis.edge(j)) res.truncated = true;
  }
  return res;
}

NormResult besov_seminorm(const LPBasis& basis, const SpectralField& f, const HybridNormSpec& spec) {
  warn_if_mean(f);
  const auto norms = block_norms(basis, f, spec.p);
  auto res = hybrid_sum(basis, norms, spec.s, spec.band, spec.threshold);
  if (res.degenerate) {
    std::ostringstream os;
    os << "besov: threshold J = " << spec.threshold << " outside [" << basis.j_min() + 2 << ", "
       << basis.j_max() - 2 << "]";
    warn(os.str());
  }
  return res;
}

std::optional<double> hl_shift_check(const LPBasis& basis, const SpectralField& f, double s, double sigma0,
                                     int threshold) {
  if (!(sigma0 > 0.0)) throw DomainError("hl_shift_check: sigma0 must be positive");
  const auto norms = block_norms(basis, f, 2.0);
  // Denominator written as sum 2^{js} 2^{sigma0 (j - J)} x_j; each term dominates its numerator term.
  double num = 0.0;
  double den = 0.0;
  for (int j = std::max(threshold, basis.j_lo()); j <= basis.j_hi(); ++j) {
    const double x = norms[static_cast<std::size_t>(j - basis.j_lo())];
    const double term = std::exp2(j * s) * x;
    num += term;
    den += term * std::exp2(sigma0 * (j - threshold));
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::optional<double> hl_shift_check_low(const LPBasis& basis, const SpectralField& f, double s,
                                         double sigma0, int threshold) {
  if (!(sigma0 > 0.0)) throw DomainError("hl_shift_check_low: sigma0 must be positive");
  const auto norms = block_norms(basis, f, 2.0);
  double num = 0.0;
  double den = 0.0;
  for (int j = basis.j_lo(); j <= std::min(threshold - 1, basis.j_hi()); ++j) {
    const double x = norms[static_cast<std::size_t>(j - basis.j_lo())];
    const double term = std::exp2(j * s) * x;
    num += term;
    den += term * std::exp2(sigma0 * (threshold - j));
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::optional<double> embedding_ratio(const LPBasis& basis, const SpectralField& f, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("embedding_ratio: requires 1 <= p <= 2");
  const int d = f.grid().dim();
  const auto norms = block_norms(basis, f, std::vector<double>{2.0, p});
  const double top = hybrid_sum(basis, norms[0], d / 2.0, Band::all, 0).value;
  const double bottom = hybrid_sum(basis, norms[1], d / p, Band::all, 0).value;
  if (bottom == 0.0) return std::nullopt;
  return top / bottom;
}

// ---------------------------------------------------------------------------

ChemLernerAccumulator::ChemLernerAccumulator(int j_lo, int j_hi, double p) : j_lo_(j_lo), j_hi_(j_hi), p_(p) {}

void ChemLernerAccumulator::append(double t, std::vector<double> norms) {
  if (!times_.empty() && !(t > times_.back())) throw DataError("cl accumulator: time samples must increase");
  if (static_cast<int>(norms.size()) != j_hi_ - j_lo_ + 1) throw DataError("cl accumulator: wrong block count");
  times_.push_back(t);
  rows_.push_back(std::move(norms));
}

double ChemLernerAccumulator::norm(std::size_t k, int j) const {
  if (j < j_lo_ || j > j_hi_) return 0.0;
  return rows_.at(k)[static_cast<std::size_t>(j - j_lo_)];
}

std::string ChemLernerAccumulator::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,j,p,block_norm\n";
  for (std::size_t k = 0; k < times_.size(); ++k)
    for (int j = j_lo_; j <= j_hi_; ++j) os << times_[k] << ',' << j << ',' << p_ << ',' << norm(k, j) << '\n';
  return os.str();
}

CLNormResult cl_norm(const ChemLernerAccumulator& acc, const LPBasis& basis, const HybridNormSpec& spec,
                     double r, std::size_t upto) {
  const std::size_t n = upto == 0 ? acc.samples() : std::min(upto, acc.samples());
  if (!(r >= 1.0)) throw DomainError("cl_norm: time exponent must satisfy r >= 1");
  const bool sup = std::isinf(r);
  if (n == 0 || (!sup && n < 2)) throw DataError("cl_norm: need at least 2 time samples for r < inf");
  const auto& t = acc.times();
  for (std::size_t k = 1; k < n; ++k)
    if (!(t[k] > t[k - 1])) throw DataError("cl_norm: nonmonotone time grid");

  CLNormResult res;
  res.degenerate = spec.band != Band::all && threshold_degenerate(basis, spec.threshold);
  double coarse_value = 0.0;
  std::vector<double> series(n);
  for (int j = acc.j_lo(); j <= acc.j_hi(); ++j) {
    if (!in_band(j, spec.band, spec.threshold)) continue;
    for (std::size_t k = 0; k < n; ++k) series[k] = acc.norm(k, j);
    double block = 0.0;
    double block_coarse = 0.0;
    if (sup) {
      block = *std::max_element(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(n));
      block_coarse = block;
    } else {
      block = std::pow(time_integral(t, series, n, r, false), 1.0 / r);
      block_coarse = n >= 3 ? std::pow(time_integral(t, series, n, r, true), 1.0 / r) : block;
    }
    if (block == 0.0) continue;
    const double w = std::exp2(j * spec.s);
    res.value += w * block;
    coarse_value += w * block_coarse;
    if (basis.edge(j)) res.truncated = true;
  }
  res.quadrature_error = std::abs(res.value - coarse_value) / 3.0;
  return res;
}

nlohmann::json to_json(const HybridNormSpec& spec) {
  const char* band = spec.band == Band::all ? "all" : spec.band == Band::low ? "low" : "high";
  return {{"s", spec.s}, {"p", spec.p}, {"band", band}, {"threshold", spec.threshold}};
}

nlohmann::json norm_report(const HybridNormSpec& spec, const CLNormResult& result, double r) {
  nlohmann::json j;
  j["spec"] = to_json(spec);
  j["r"] = std::isinf(r) ? nlohmann::json("inf") : nlohmann::json(r);
  j["value"] = result.value;
  j["truncation_flag"] = result.truncated;
  j["degenerate"] = result.degenerate;
  j["quadrature_error"] = result.quadrature_error;
  return j;
}

}  // namespace lpe
