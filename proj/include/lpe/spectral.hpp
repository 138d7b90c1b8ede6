#pragma once

#include <functional>
#include <span>

#include "lpe/grid.hpp"

namespace lpe {

// Transform convention: to_spectral includes the 1/N^d factor, so
//   f(x) = sum_m fhat_m exp(i m.x / M)
// and Parseval reads  int |f|^2 dx = (2 pi M)^d sum_m |fhat_m|^2.
inline constexpr unsigned kConventionTag = 0x4E31u;  // "forward carries 1/N^d"

PhysicalField to_physical(const SpectralField& f);
SpectralField to_spectral(const PhysicalField& f);
SpectralField transform_roundtrip(const SpectralField& f);

/// Multiplies every component by i * xi_axis. The unpaired Nyquist modes are zeroed.
SpectralField derivative(const SpectralField& f, int axis);
SpectralField gradient(const SpectralField& scalar);
SpectralField divergence(const SpectralField& vector);
SpectralField laplacian(const SpectralField& f);

/// Zeroes every coefficient with some |m_i| > cutoff * N / 2.
SpectralField truncate(SpectralField f);

/// Pointwise product followed by truncation. `a` is scalar; `b` is scalar or vector.
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b);
/// sum_i u_i w_i for two vector fields, truncated.
SpectralField dealiased_dot(const SpectralField& u, const SpectralField& w);
/// (v . grad) f for vector v and scalar-or-vector f, truncated.
SpectralField dealiased_advection(const SpectralField& v, const SpectralField& f);

/// Quadrature norm (sum |f(x_i)|^p dx)^(1/p); vector fields use the pointwise Euclidean modulus.
double lp_norm(const PhysicalField& f, double p);
double lp_norm(const SpectralField& f, double p);
/// L2 norm from the coefficients through Parseval.
double parseval_l2(const SpectralField& f);
/// Largest pointwise modulus.
double sup_norm(const SpectralField& f);

Complex mean(const SpectralField& f, int component = 0);
SpectralField remove_mean(SpectralField f);
/// max_m |fhat_m - conj(fhat_{-m})| / max_m |fhat_m| (0 for the zero field).
double hermitian_defect(const SpectralField& f);
/// True when every coefficient outside the dealiasing box is exactly zero.
bool is_truncated(const SpectralField& f);

/// Extracts component `c` as a scalar field.
SpectralField component_field(const SpectralField& f, int c);
/// Packs scalar fields into one vector field.
SpectralField stack_components(std::span<const SpectralField> parts);

/// Samples a function of the physical coordinate on the lattice and transforms it.
SpectralField sample_field(const Grid& grid, int components,
                           const std::function<double(std::span<const double> x, int component)>& fn);

}  // namespace lpe
