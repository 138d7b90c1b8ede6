#include "lpe/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "lpe/besov.hpp"
#include "lpe/error.hpp"
#include "lpe/hash.hpp"
#include "lpe/paraproduct.hpp"
#include "lpe/parallel.hpp"
#include "lpe/spectral.hpp"
#include "lpe/warnings.hpp"

namespace lpe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double profile_amplitude(const SpectralProfile& p, double r, int d) {
  switch (p.kind) {
    case ProfileKind::flat: return std::pow(r, -0.5 * d);
    case ProfileKind::power: return std::pow(r, -(p.exponent + 0.5 * d));
    case ProfileKind::band: return std::abs(std::log2(r) - p.j) <= p.width ? 1.0 : 0.0;
  }
  return 0.0;
}

std::size_t exponent_index(const PairNorms& n, double p) {
  for (std::size_t e = 0; e < n.exponents.size(); ++e)
    if (n.exponents[e] == p) return e;
  throw ConfigError("product law: exponent not precomputed");
}

struct Cell {
  double s1;
  double p;
};

struct PartNorms {
  std::vector<std::vector<double>> tab, tba, rem;
};

std::string choose_saturating(double tab, double tba, double rem) {
  if (tab >= tba && tab >= rem) return "T_a b";
  if (tba >= rem) return "T_b a";
  return "R[a,b]";
}

}  // namespace

std::string profile_name(const SpectralProfile& p) {
  std::ostringstream os;
  os.precision(17);
  switch (p.kind) {
    case ProfileKind::flat: os << "flat"; break;
    case ProfileKind::power: os << "power(" << p.exponent << ")"; break;
    case ProfileKind::band: os << "band(" << p.j << "," << p.width << ")"; break;
  }
  return os.str();
}

std::string grid_fingerprint(const Grid& g) {
  std::ostringstream os;
  os.precision(17);
  os << "d=" << g.dim() << ";N=" << g.points() << ";M=" << g.scale() << ";cutoff=" << g.dealias_cutoff();
  return "grid-" + hex64(Fnv1a().add(os.str()).value());
}

SpectralField ensemble_member(const EnsembleConfig& cfg, const Grid& grid, std::size_t index) {
  std::mt19937_64 rng(splitmix64(cfg.seed) ^ splitmix64(0x5eedull + index));
  SpectralField f(grid, 1);
  auto c = f.component(0);
  const auto r = grid.xi_abs();
  const auto kept = grid.kept();
  const auto mirror = grid.mirror();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!kept[i] || r[i] == 0.0 || mirror[i] <= i) continue;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double amp = profile_amplitude(cfg.profile, r[i], grid.dim());
    if (amp == 0.0) continue;
    const Complex z = std::polar(amp, 2.0 * std::numbers::pi * u);
    c[i] = z;
    c[mirror[i]] = std::conj(z);
  }
  const double l2 = parseval_l2(f);
  if (l2 > 0.0) f *= cfg.amplitude / l2;
  return f;
}

std::vector<SpectralField> generate_ensemble(const EnsembleConfig& cfg) {
  std::vector<SpectralField> out;
  if (cfg.count == 0) return out;
  const Grid grid = cfg.grid();
  out.reserve(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) out.push_back(ensemble_member(cfg, grid, i));
  return out;
}

PairNorms pair_norms(const LPBasis& basis, const SpectralField& a, const SpectralField& b,
                     const std::vector<double>& exponents) {
  PairNorms n;
  n.exponents = exponents;
  const SpectralField ab = dealiased_product(a, b);
  n.ab_p = block_norms(basis, ab, exponents);
  std::vector<double> with2 = exponents;
  with2.push_back(2.0);
  auto bn = block_norms(basis, b, with2);
  n.b_2 = bn.back();
  bn.pop_back();
  n.b_p = std::move(bn);
  n.a_2 = block_norms(basis, a, 2.0);
  return n;
}

void check_product_law_params(const LPBasis& basis, double s1, double p, double eps, int k) {
  const int d = basis.grid().dim();
  if (!(s1 > 0.0 && s1 < 0.5 * d)) throw ConfigError("product law: requires 0 < s1 < d/2");
  if (!(p >= 1.0 && p < 2.0)) throw ConfigError("product law: requires 1 <= p < 2");
  const int J = frequency_threshold(eps, k);
  if (threshold_degenerate(basis, J))
    throw ConfigError("product law: J = " + std::to_string(J) + " outside [" + std::to_string(basis.j_min() + 2) +
                      ", " + std::to_string(basis.j_max() - 2) + "]");
}

std::optional<ProductLawSample> product_law_ratio(const LPBasis& basis, const PairNorms& norms, double s1, double p,
                                                  double eps, int k) {
  check_product_law_params(basis, s1, p, eps, k);
  const std::size_t e = exponent_index(norms, p);
  const int J = frequency_threshold(eps, k);
  const double d = basis.grid().dim();
  ProductLawSample s;
  s.lhs = hybrid_sum(basis, norms.ab_p[e], s1, Band::low, J).value;
  const double b_low = hybrid_sum(basis, norms.b_p[e], s1, Band::low, J).value;
  const double b_high = hybrid_sum(basis, norms.b_2, d / 2.0, Band::high, J).value;
  const double a_all = hybrid_sum(basis, norms.a_2, d / 2.0, Band::all, J).value;
  s.rhs = (b_low + std::exp2((s1 - d / p) * J) * b_high) * a_all;
  if (!(s.rhs > 0.0)) return std::nullopt;
  s.ratio = s.lhs / s.rhs;
  return s;
}

std::optional<ProductLawSample> product_law_ratio(const LPBasis& basis, const SpectralField& a,
                                                  const SpectralField& b, double s1, double p, double eps, int k) {
  check_product_law_params(basis, s1, p, eps, k);
  return product_law_ratio(basis, pair_norms(basis, a, b, {p}), s1, p, eps, k);
}

nlohmann::json to_json(const ConstantReport& r) {
  nlohmann::json j;
  j["lemma"] = r.lemma;
  j["parameters"] = {{"s1", r.s1}, {"p", r.p}, {"eps", r.eps}, {"k", r.k}, {"d", r.d}, {"J", r.threshold}};
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["ratio"] = r.ratio;
  j["C_emp"] = r.c_emp;
  j["mean_ratio"] = r.mean_ratio;
  j["count"] = r.count;
  j["discarded"] = r.discarded;
  j["argmax"] = r.argmax;
  j["saturating_term"] = r.saturating_term;
  j["profile"] = r.profile;
  j["bump_fingerprint"] = r.bump_fingerprint;
  j["grid_fingerprint"] = r.grid_fingerprint;
  return j;
}

std::vector<SweepResult> epsilon_sweep_grid(const EnsembleConfig& cfg, const std::vector<double>& s1_list,
                                            const std::vector<double>& p_list, int k,
                                            const std::vector<double>& eps_list) {
  const Grid grid = cfg.grid();
  const LPBasis basis(grid);
  const int d = grid.dim();
  for (double s1 : s1_list)
    if (!(s1 > 0.0 && s1 < 0.5 * d)) throw ConfigError("product law: requires 0 < s1 < d/2");
  for (double p : p_list)
    if (!(p >= 1.0 && p < 2.0)) throw ConfigError("product law: requires 1 <= p < 2");

  std::vector<double> eps_ok;
  std::vector<double> skipped;
  for (double eps : eps_list) {
    const int J = frequency_threshold(eps, k);
    if (threshold_degenerate(basis, J)) {
      warn("epsilon_sweep: skipping eps = " + std::to_string(eps) + " (J = " + std::to_string(J) +
           " outside the resolved range)");
      skipped.push_back(eps);
    } else {
      eps_ok.push_back(eps);
    }
  }

  const std::size_t count = cfg.count;
  std::vector<PairNorms> norms(count);
  parallel_for(count, [&](std::size_t i) {
    const SpectralField a = ensemble_member(cfg, grid, 2 * i);
    const SpectralField b = ensemble_member(cfg, grid, 2 * i + 1);
    norms[i] = pair_norms(basis, a, b, p_list);
  });

  std::map<std::size_t, PartNorms> parts_cache;
  auto parts_for = [&](std::size_t i) -> const PartNorms& {
    auto it = parts_cache.find(i);
    if (it != parts_cache.end()) return it->second;
    const SpectralField a = ensemble_member(cfg, grid, 2 * i);
    const SpectralField b = ensemble_member(cfg, grid, 2 * i + 1);
    const BonyParts bp = bony_decompose(basis, a, b);
    PartNorms pn{block_norms(basis, bp.Tab, p_list), block_norms(basis, bp.Tba, p_list),
                 block_norms(basis, bp.R, p_list)};
    return parts_cache.emplace(i, std::move(pn)).first->second;
  };

  std::vector<SweepResult> out;
  for (double s1 : s1_list)
    for (std::size_t e = 0; e < p_list.size(); ++e) {
      const double p = p_list[e];
      SweepResult sweep;
      sweep.skipped_eps = skipped;
      double cmax = 0.0;
      double cmin = std::numeric_limits<double>::infinity();
      for (double eps : eps_ok) {
        ConstantReport rep;
        rep.s1 = s1;
        rep.p = p;
        rep.eps = eps;
        rep.k = k;
        rep.d = d;
        rep.threshold = frequency_threshold(eps, k);
        rep.count = count;
        rep.profile = profile_name(cfg.profile);
        rep.bump_fingerprint = LPBasis::bump_fingerprint();
        rep.grid_fingerprint = grid_fingerprint(grid);
        double sum = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
          const auto smp = product_law_ratio(basis, norms[i], s1, p, eps, k);
          if (!smp) {
            ++rep.discarded;
            continue;
          }
          if (smp->ratio > rep.c_emp || rep.ratio.empty()) {
            rep.c_emp = std::max(rep.c_emp, smp->ratio);
            rep.argmax = i;
          }
          rep.lhs.push_back(smp->lhs);
          rep.rhs.push_back(smp->rhs);
          rep.ratio.push_back(smp->ratio);
          sum += smp->ratio;
        }
        if (static_cast<double>(rep.discarded) > 0.05 * static_cast<double>(count) || rep.ratio.empty()) {
          std::ostringstream os;
          os << "product law: " << rep.discarded << " of " << count << " samples discarded at eps = " << eps
             << " (cap 5%)";
          throw DataError(os.str());
        }
        rep.mean_ratio = sum / static_cast<double>(rep.ratio.size());
        const PartNorms& pn = parts_for(rep.argmax);
        const double denom = rep.rhs[std::find(rep.ratio.begin(), rep.ratio.end(), rep.c_emp) - rep.ratio.begin()];
        const int J = rep.threshold;
        rep.saturating_term = choose_saturating(hybrid_sum(basis, pn.tab[e], s1, Band::low, J).value / denom,
                                                hybrid_sum(basis, pn.tba[e], s1, Band::low, J).value / denom,
                                                hybrid_sum(basis, pn.rem[e], s1, Band::low, J).value / denom);
        cmax = std::max(cmax, rep.c_emp);
        cmin = std::min(cmin, rep.c_emp);
        sweep.reports.push_back(std::move(rep));
      }
      sweep.uniformity = sweep.reports.empty() || cmin == 0.0 ? 1.0 : cmax / cmin;
      if (sweep.reports.empty()) sweep.uniformity = 1.0;
      out.push_back(std::move(sweep));
    }
  return out;
}

SweepResult epsilon_sweep(const EnsembleConfig& cfg, double s1, double p, int k, const std::vector<double>& eps_list) {
  return std::move(epsilon_sweep_grid(cfg, {s1}, {p}, k, eps_list).front());
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,C_emp,mean_ratio,saturating_term\n";
  for (const auto& r : s.reports) os << r.eps << ',' << r.c_emp << ',' << r.mean_ratio << ',' << r.saturating_term << '\n';
  return os.str();
}

std::optional<SubtermReport> subterm_report(const LPBasis& basis, const SpectralField& a, const SpectralField& b,
                                            double s1, double p, double eps, int k) {
  check_product_law_params(basis, s1, p, eps, k);
  const auto whole = product_law_ratio(basis, a, b, s1, p, eps, k);
  if (!whole) return std::nullopt;
  const int J = frequency_threshold(eps, k);
  const double d = basis.grid().dim();

  SubtermReport rep;
  rep.whole = *whole;
  const BonyParts parts = bony_decompose(basis, a, b);
  auto low_norm = [&](const SpectralField& f) {
    return hybrid_sum(basis, block_norms(basis, f, p), s1, Band::low, J).value;
  };
  rep.tab = low_norm(parts.Tab) / whole->rhs;
  rep.tba = low_norm(parts.Tba) / whole->rhs;
  rep.rem = low_norm(parts.R) / whole->rhs;
  rep.saturating = choose_saturating(rep.tab, rep.tba, rep.rem);

  const auto a2 = block_norms(basis, a, 2.0);
  const auto b2 = block_norms(basis, b, 2.0);
  const double a_all = hybrid_sum(basis, a2, d / 2.0, Band::all, J).value;
  const double a_high = hybrid_sum(basis, a2, d / 2.0, Band::high, J).value;
  const double b_high = hybrid_sum(basis, b2, d / 2.0, Band::high, J).value;
  const double b_low = hybrid_sum(basis, block_norms(basis, b, p), s1, Band::low, J).value;

  auto window = [&](int jp_lo, int jp_hi) {
    double acc = 0.0;
    for (int jp = std::max(jp_lo, basis.j_lo()); jp <= std::min(jp_hi, basis.j_hi()); ++jp)
      for (int j = std::max(jp - 4, basis.j_lo()); j <= std::min({jp + 4, J - 2, basis.j_hi()}); ++j) {
        const SpectralField c = commutator_block(basis, a, b, j, jp);
        acc += std::exp2(s1 * jp) * lp_norm(c, p);
      }
    return acc;
  };
  rep.window_low_sum = window(basis.j_lo(), J - 2);
  rep.window_mid_sum = window(J - 2, J + 2);
  const double low_den = a_all * b_low;
  if (low_den > 0.0) rep.window_low = rep.window_low_sum / low_den;
  const double mid_den = std::exp2((s1 - d / p) * J) * b_high * a_high;
  if (mid_den > 0.0) rep.window_mid = rep.window_mid_sum / mid_den;
  return rep;
}

nlohmann::json to_json(const SubtermReport& r) {
  nlohmann::json j;
  j["whole"] = {{"lhs", r.whole.lhs}, {"rhs", r.whole.rhs}, {"ratio", r.whole.ratio}};
  j["T_a b"] = r.tab;
  j["T_b a"] = r.tba;
  j["R[a,b]"] = r.rem;
  j["window_low"] = r.window_low ? nlohmann::json(*r.window_low) : nlohmann::json(nullptr);
  j["window_mid"] = r.window_mid ? nlohmann::json(*r.window_mid) : nlohmann::json(nullptr);
  j["window_low_sum"] = r.window_low_sum;
  j["window_mid_sum"] = r.window_mid_sum;
  j["saturating_term"] = r.saturating;
  return j;
}

std::string profile_kind_name(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::flat: return "flat";
    case ProfileKind::power: return "power";
    case ProfileKind::band: return "band";
  }
  return "flat";
}

}  // namespace lpe
