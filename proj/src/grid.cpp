#include "lpe/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "detail/grid_cache.hpp"
#include "lpe/error.hpp"

namespace lpe {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int dim, int points, double scale, double dealias_cutoff)
    : d_(dim), n_(points), m_(scale), cutoff_(dealias_cutoff) {
  if (d_ < 1 || d_ > 3) throw ConfigError("grid: dimension must be 1, 2 or 3");
  if (!is_power_of_two(n_) || n_ < 8) throw ConfigError("grid: N must be a power of two >= 8");
  if (!(m_ >= 1.0) || !std::isfinite(m_)) throw ConfigError("grid: domain scale M must be >= 1");
  if (!(cutoff_ > 0.0 && cutoff_ <= 1.0)) throw ConfigError("grid: dealias cutoff must lie in (0, 1]");
  size_ = 1;
  for (int a = 0; a < d_; ++a) size_ *= static_cast<std::size_t>(n_);
  kept_mode_ = static_cast<int>(std::floor(cutoff_ * n_ / 2.0));
  if (kept_mode_ >= n_ / 2) kept_mode_ = n_ / 2 - 1;
  cache_ = detail::GridCache::get(d_, n_, m_, kept_mode_);
}

double Grid::spacing() const noexcept { return 2.0 * std::numbers::pi * m_ / n_; }

double Grid::cell_volume() const noexcept { return std::pow(spacing(), d_); }

double Grid::volume() const noexcept { return std::pow(2.0 * std::numbers::pi * m_, d_); }

int Grid::mode(std::size_t index, int axis) const noexcept {
  std::size_t stride = 1;
  for (int a = d_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(n_);
  const int i = static_cast<int>((index / stride) % static_cast<std::size_t>(n_));
  return i < n_ / 2 ? i : i - n_;
}

std::size_t Grid::index_of(std::span<const int> modes) const {
  if (static_cast<int>(modes.size()) != d_) throw ConfigError("grid: mode vector has wrong dimension");
  std::size_t index = 0;
  for (int a = 0; a < d_; ++a) {
    const int m = modes[static_cast<std::size_t>(a)];
    if (m < -n_ / 2 || m >= n_ / 2) throw ConfigError("grid: mode outside the lattice");
    index = index * static_cast<std::size_t>(n_) + static_cast<std::size_t>(m < 0 ? m + n_ : m);
  }
  return index;
}

std::span<const double> Grid::xi_abs() const noexcept { return cache_->xi_abs; }
std::span<const double> Grid::xi(int axis) const noexcept { return cache_->xi[static_cast<std::size_t>(axis)]; }
std::span<const double> Grid::unit_xi(int axis) const noexcept {
  return cache_->unit_xi[static_cast<std::size_t>(axis)];
}
std::span<const unsigned char> Grid::kept() const noexcept { return cache_->kept; }
std::span<const unsigned char> Grid::nyquist() const noexcept { return cache_->nyquist; }
std::span<const std::size_t> Grid::mirror() const noexcept { return cache_->mirror; }

bool Grid::operator==(const Grid& other) const noexcept {
  return d_ == other.d_ && n_ == other.n_ && m_ == other.m_ && cutoff_ == other.cutoff_;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (a != b) {
    std::ostringstream os;
    os << where << ": grid mismatch";
    throw ConfigError(os.str());
  }
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(Grid grid, int components)
    : grid_(std::move(grid)), components_(components) {
  if (components_ != 1 && components_ != grid_.dim())
    throw ConfigError("field: components must be 1 or d");
  coeffs_.assign(grid_.size() * static_cast<std::size_t>(components_), Complex{0.0, 0.0});
}

std::span<Complex> SpectralField::component(int c) {
  return std::span<Complex>(coeffs_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

std::span<const Complex> SpectralField::component(int c) const {
  return std::span<const Complex>(coeffs_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "field +=");
  if (components_ != other.components_) throw ConfigError("field +=: component mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "field -=");
  if (components_ != other.components_) throw ConfigError("field -=: component mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

bool SpectralField::operator==(const SpectralField& other) const {
  return grid_ == other.grid_ && components_ == other.components_ && coeffs_ == other.coeffs_;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double factor, SpectralField f) { return f *= factor; }

PhysicalField::PhysicalField(Grid grid, int components)
    : grid_(std::move(grid)), components_(components) {
  if (components_ != 1 && components_ != grid_.dim())
    throw ConfigError("field: components must be 1 or d");
  values_.assign(grid_.size() * static_cast<std::size_t>(components_), 0.0);
}

std::span<double> PhysicalField::component(int c) {
  return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

std::span<const double> PhysicalField::component(int c) const {
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

}  // namespace lpe
