#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include <fftw3.h>

namespace lpe::detail {

/// Immutable per-lattice tables plus the FFTW plans used by every transform.
/// Shared between all Grid values with identical parameters.
struct GridCache {
  GridCache(int d, int n, double m, int kept_mode);
  ~GridCache();
  GridCache(const GridCache&) = delete;
  GridCache& operator=(const GridCache&) = delete;

  static std::shared_ptr<const GridCache> get(int d, int n, double m, int kept_mode);

  /// Unnormalized c2c transform; sign is FFTW_FORWARD or FFTW_BACKWARD. Thread-safe.
  void execute(const std::complex<double>* in, std::complex<double>* out, int sign) const;

  std::size_t size = 0;
  std::vector<double> xi_abs;
  std::array<std::vector<double>, 3> xi;
  std::array<std::vector<double>, 3> unit_xi;
  std::vector<unsigned char> kept;
  std::vector<unsigned char> nyquist;
  std::vector<std::size_t> mirror;

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace lpe::detail
