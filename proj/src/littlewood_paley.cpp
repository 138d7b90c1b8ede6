#include "lpe/littlewood_paley.hpp"

#include <cmath>

#include "lpe/error.hpp"
#include "lpe/hash.hpp"
#include "lpe/spectral.hpp"

namespace lpe {

namespace {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

constexpr double kInner = 0.75;
constexpr double kOuter = 8.0 / 3.0;

}  // namespace

double lp_bump(double r) {
  return smooth_step((kOuter - r) / (kOuter - 2.0)) * smooth_step((r - kInner) / (1.0 - kInner));
}

double lp_phi0(double r) {
  if (!(r > 0.0)) return 0.0;
  const double top = lp_bump(r);
  if (top == 0.0) return 0.0;
  // Summing the same scaled arguments in the same order makes
  // lp_phi0(2^j r) == lp_phi0(r) bit for bit; ldexp is exact.
  const int base = std::ilogb(r);
  double sum = 0.0;
  for (int jp = base - 3; jp <= base + 3; ++jp) sum += lp_bump(std::ldexp(r, -jp));
  return top / sum;
}

LPBasis::LPBasis(const Grid& grid) : grid_(grid) {
  j_min_ = static_cast<int>(std::ceil(std::log2(1.0 / grid.scale()) - 1e-12));
  j_max_ = static_cast<int>(
      std::floor(std::log2(grid.dealias_cutoff() * grid.points() / (2.0 * grid.scale())) + 1e-12));
  if (j_max_ - j_min_ + 1 < 6)
    throw ConfigError("littlewood_paley: fewer than 6 resolved blocks (j_min = " + std::to_string(j_min_) +
                      ", j_max = " + std::to_string(j_max_) + ")");

  const auto r = grid.xi_abs();
  const std::size_t n = grid.size();
  zeros_.assign(n, 0.0);
  phi_.assign(static_cast<std::size_t>(block_count()), std::vector<double>(n, 0.0));
  for (int j = j_lo(); j <= j_hi(); ++j) {
    auto& ph = phi_[static_cast<std::size_t>(j - j_lo())];
    for (std::size_t i = 0; i < n; ++i) ph[i] = lp_phi0(std::ldexp(r[i], -j));
  }
  chi_.assign(static_cast<std::size_t>(block_count() + 1), std::vector<double>(n, 0.0));
  for (int b = 1; b <= block_count(); ++b) {
    auto& cur = chi_[static_cast<std::size_t>(b)];
    const auto& prev = chi_[static_cast<std::size_t>(b - 1)];
    const auto& ph = phi_[static_cast<std::size_t>(b - 1)];
    for (std::size_t i = 0; i < n; ++i) cur[i] = prev[i] + ph[i];
  }

  const auto kept = grid.kept();
  const auto& total = chi_.back();
  for (std::size_t i = 0; i < n; ++i) {
    if (!kept[i] || r[i] == 0.0) continue;
    if (std::abs(total[i] - 1.0) > 1e-14)
      throw ConfigError("littlewood_paley: stored blocks do not cover |xi| = " + std::to_string(r[i]) +
                        " (partition sum " + std::to_string(total[i]) + ")");
  }
}

const std::vector<double>& LPBasis::phi(int j) const {
  if (!stored(j)) return zeros_;
  return phi_[static_cast<std::size_t>(j - j_lo())];
}

const std::vector<double>& LPBasis::chi(int j) const {
  if (j <= j_lo()) return chi_.front();
  if (j >= j_hi() + 1) return chi_.back();
  return chi_[static_cast<std::size_t>(j - j_lo())];
}

LPBasis LPBasis::with_fault(int j, double factor) const {
  LPBasis copy = *this;
  if (!stored(j)) return copy;
  for (auto& x : copy.phi_[static_cast<std::size_t>(j - j_lo())]) x *= factor;
  return copy;
}

std::uint64_t LPBasis::checksum(int j) const {
  return Fnv1a().add_values(std::span<const double>(phi(j))).value();
}

std::string LPBasis::bump_fingerprint() {
  Fnv1a h;
  h.add("smoothstep-annulus[3/4,1,2,8/3]/dyadic-renormalized;");
  for (int i = 1; i <= 64; ++i) {
    const double v = lp_phi0(0.5 + i / 16.0);
    h.add_values(std::span<const double>(&v, 1));
  }
  return "lp-bump-" + hex64(h.value());
}

SpectralField block_project(const LPBasis& basis, const SpectralField& f, int j, ProjectionKind kind) {
  require_same_grid(basis.grid(), f.grid(), "block_project");
  SpectralField out(f.grid(), f.components());
  if (kind == ProjectionKind::block && !basis.stored(j)) return out;
  const auto& mult = kind == ProjectionKind::block ? basis.phi(j) : basis.chi(j);
  for (int c = 0; c < f.components(); ++c) {
    const auto in = f.component(c);
    auto o = out.component(c);
    for (std::size_t i = 0; i < in.size(); ++i) o[i] = mult[i] * in[i];
  }
  return out;
}

std::vector<SpectralField> all_blocks(const LPBasis& basis, const SpectralField& f) {
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(basis.block_count()));
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) out.push_back(block_project(basis, f, j));
  return out;
}

std::optional<double> bernstein_ratio(const LPBasis& basis, const SpectralField& f, int j, double p) {
  const auto block = block_project(basis, f, j);
  const double base = lp_norm(block, p);
  if (base == 0.0) return std::nullopt;
  const double grad = lp_norm(gradient(block), p);
  return grad / (std::ldexp(1.0, j) * base);
}

double reconstruction_defect(const LPBasis& basis, const SpectralField& f) {
  SpectralField sum(f.grid(), f.components());
  for (int j = basis.j_lo(); j <= basis.j_hi(); ++j) sum += block_project(basis, f, j);
  const SpectralField target = remove_mean(f);
  const double ref = parseval_l2(f);
  if (ref == 0.0) return parseval_l2(sum);
  return parseval_l2(sum - target) / ref;
}

nlohmann::json basis_manifest(const LPBasis& basis) {
  nlohmann::json j;
  j["j_min"] = basis.j_min();
  j["j_max"] = basis.j_max();
  j["j_lo"] = basis.j_lo();
  j["j_hi"] = basis.j_hi();
  j["annulus"] = {kInner, kOuter};
  j["plateau"] = {1.0, 2.0};
  j["bump"] = LPBasis::bump_fingerprint();
  nlohmann::json sums = nlohmann::json::array();
  for (int b = basis.j_lo(); b <= basis.j_hi(); ++b)
    sums.push_back({{"j", b}, {"checksum", hex64(basis.checksum(b))}});
  j["blocks"] = sums;
  return j;
}

}  // namespace lpe
