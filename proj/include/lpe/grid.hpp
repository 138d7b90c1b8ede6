#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace lpe {

using Complex = std::complex<double>;

namespace detail {
struct GridCache;
}

/// Periodic lattice on the torus [0, 2*pi*M)^d with N points per axis.
///
/// Frequencies are xi = m / M for m in [-N/2, N/2)^d. Coefficient storage is
/// row-major over the FFT-native index i in [0, N) per axis (axis 0 slowest),
/// where m = i for i < N/2 and m = i - N otherwise.
class Grid {
 public:
  Grid(int dim, int points, double scale, double dealias_cutoff = 2.0 / 3.0);

  int dim() const noexcept { return d_; }
  int points() const noexcept { return n_; }
  double scale() const noexcept { return m_; }
  double dealias_cutoff() const noexcept { return cutoff_; }

  std::size_t size() const noexcept { return size_; }
  /// Largest |m_i| kept by the dealiasing truncation: floor(cutoff * N / 2).
  int max_kept_mode() const noexcept { return kept_mode_; }
  double spacing() const noexcept;
  double cell_volume() const noexcept;
  double volume() const noexcept;

  int mode(std::size_t index, int axis) const noexcept;
  std::size_t index_of(std::span<const int> modes) const;

  std::span<const double> xi_abs() const noexcept;
  /// Component `axis` of xi (= m_axis / M).
  std::span<const double> xi(int axis) const noexcept;
  /// Component `axis` of xi / |xi|; zero at the origin.
  std::span<const double> unit_xi(int axis) const noexcept;
  /// 1 for lattice points kept by the dealiasing truncation.
  std::span<const unsigned char> kept() const noexcept;
  /// 1 where some axis sits at the unpaired Nyquist index m = -N/2.
  std::span<const unsigned char> nyquist() const noexcept;
  /// Index of -m for every lattice index (Nyquist entries map to themselves).
  std::span<const std::size_t> mirror() const noexcept;

  bool operator==(const Grid& other) const noexcept;
  bool operator!=(const Grid& other) const noexcept { return !(*this == other); }

  const detail::GridCache& cache() const noexcept { return *cache_; }

 private:
  int d_;
  int n_;
  double m_;
  double cutoff_;
  std::size_t size_;
  int kept_mode_;
  std::shared_ptr<const detail::GridCache> cache_;
};

/// Scalar (1 component) or vector (d components) field stored as Fourier coefficients.
class SpectralField {
 public:
  SpectralField(Grid grid, int components);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  bool is_scalar() const noexcept { return components_ == 1; }

  std::span<Complex> component(int c);
  std::span<const Complex> component(int c) const;
  std::span<Complex> data() noexcept { return coeffs_; }
  std::span<const Complex> data() const noexcept { return coeffs_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double factor);

  bool operator==(const SpectralField& other) const;

 private:
  Grid grid_;
  int components_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double factor, SpectralField f);

/// Real-valued samples f(x_i) on the physical lattice, same layout as the coefficients.
class PhysicalField {
 public:
  PhysicalField(Grid grid, int components);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }

  std::span<double> component(int c);
  std::span<const double> component(int c) const;
  std::span<double> data() noexcept { return values_; }
  std::span<const double> data() const noexcept { return values_; }

 private:
  Grid grid_;
  int components_;
  std::vector<double> values_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace lpe
