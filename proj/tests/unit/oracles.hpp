#pragma once

// Brute-force references shared by the unit tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <algorithm>
#include <vector>

#include "lpe/grid.hpp"
#include "lpe/inequality_lab.hpp"

namespace oracle {

using lpe::Complex;

/// Coefficient array of the product of two 1-d fields by direct convolution, then truncated.
inline std::vector<Complex> convolve_1d(const lpe::SpectralField& a, const lpe::SpectralField& b) {
  const auto& g = a.grid();
  const int N = g.points();
  const int kmax = g.max_kept_mode();
  std::vector<Complex> out(g.size(), Complex{});
  auto idx = [N](int m) { return static_cast<std::size_t>(m >= 0 ? m : m + N); };
  for (int p = -N / 2; p < N / 2; ++p)
    for (int q = -N / 2; q < N / 2; ++q) {
      const int m = p + q;
      if (std::abs(m) > kmax) continue;
      out[idx(m)] += a.component(0)[idx(p)] * b.component(0)[idx(q)];
    }
  return out;
}

/// max |x_i - y_i| / max |y_i|.
inline double rel_diff(std::span<const Complex> x, std::span<const Complex> y) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num = std::max(num, std::abs(x[i] - y[i]));
    den = std::max(den, std::abs(y[i]));
  }
  return den > 0.0 ? num / den : num;
}

/// Real field with random coefficients on modes |m| <= kmax (1-d only).
inline lpe::SpectralField random_field(const lpe::Grid& g, int kmax, unsigned seed) {
  lpe::SpectralField f(g, 1);
  unsigned s = seed * 2654435761u + 1u;
  auto next = [&s] {
    s = s * 1664525u + 1013904223u;
    return (s >> 8) / double(1u << 24) - 0.5;
  };
  const int N = g.points();
  for (int m = 1; m <= kmax; ++m) {
    const Complex c{next(), next()};
    f.component(0)[static_cast<std::size_t>(m)] = c;
    f.component(0)[static_cast<std::size_t>(N - m)] = std::conj(c);
  }
  return f;
}

inline lpe::EnsembleConfig ensemble_on(const lpe::Grid& g, std::size_t count, std::uint64_t seed = 7) {
  lpe::EnsembleConfig e;
  e.seed = seed;
  e.count = count;
  e.d = g.dim();
  e.N = g.points();
  e.M = g.scale();
  e.cutoff = g.dealias_cutoff();
  return e;
}

}  // namespace oracle
