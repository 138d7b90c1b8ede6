#include "lpe/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fftw3.h>

#include "detail/grid_cache.hpp"
#include "lpe/error.hpp"

namespace lpe {

namespace {

void forward_component(const Grid& g, std::span<const double> values, std::span<Complex> out) {
  std::vector<Complex> in(values.begin(), values.end());
  g.cache().execute(in.data(), out.data(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out) c *= scale;
}

void backward_component(const Grid& g, std::span<const Complex> coeffs, std::span<double> out) {
  std::vector<Complex> tmp(g.size());
  g.cache().execute(coeffs.data(), tmp.data(), FFTW_BACKWARD);
  for (std::size_t i = 0; i < tmp.size(); ++i) out[i] = tmp[i].real();
}

void apply_truncation(SpectralField& f) {
  const auto kept = f.grid().kept();
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (!kept[i]) comp[i] = Complex{0.0, 0.0};
  }
}

void require_vector(const SpectralField& f, const char* where) {
  if (f.components() != f.grid().dim()) throw ConfigError(std::string(where) + ": expected a vector field");
}

void require_scalar(const SpectralField& f, const char* where) {
  if (!f.is_scalar()) throw ConfigError(std::string(where) + ": expected a scalar field");
}

}  // namespace

PhysicalField to_physical(const SpectralField& f) {
  PhysicalField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) backward_component(f.grid(), f.component(c), out.component(c));
  return out;
}

SpectralField to_spectral(const PhysicalField& f) {
  SpectralField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) forward_component(f.grid(), f.component(c), out.component(c));
  return out;
}

SpectralField transform_roundtrip(const SpectralField& f) { return to_spectral(to_physical(f)); }

SpectralField derivative(const SpectralField& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw ConfigError("derivative: axis out of range");
  SpectralField out(g, f.components());
  const auto xi = g.xi(axis);
  const auto nyq = g.nyquist();
  for (int c = 0; c < f.components(); ++c) {
    const auto in = f.component(c);
    auto o = out.component(c);
    for (std::size_t i = 0; i < in.size(); ++i)
      o[i] = nyq[i] ? Complex{0.0, 0.0} : Complex{-xi[i] * in[i].imag(), xi[i] * in[i].real()};
  }
  return out;
}

SpectralField gradient(const SpectralField& scalar) {
  require_scalar(scalar, "gradient");
  const Grid& g = scalar.grid();
  SpectralField out(g, g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    const auto da = derivative(scalar, a);
    std::copy(da.component(0).begin(), da.component(0).end(), out.component(a).begin());
  }
  return out;
}

SpectralField divergence(const SpectralField& vector) {
  require_vector(vector, "divergence");
  const Grid& g = vector.grid();
  SpectralField out(g, 1);
  auto o = out.component(0);
  const auto nyq = g.nyquist();
  for (int a = 0; a < g.dim(); ++a) {
    const auto xi = g.xi(a);
    const auto in = vector.component(a);
    for (std::size_t i = 0; i < in.size(); ++i)
      if (!nyq[i]) o[i] += Complex{-xi[i] * in[i].imag(), xi[i] * in[i].real()};
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g, f.components());
  const auto r = g.xi_abs();
  const auto nyq = g.nyquist();
  for (int c = 0; c < f.components(); ++c) {
    const auto in = f.component(c);
    auto o = out.component(c);
    for (std::size_t i = 0; i < in.size(); ++i) o[i] = nyq[i] ? Complex{0.0, 0.0} : -(r[i] * r[i]) * in[i];
  }
  return out;
}

SpectralField truncate(SpectralField f) {
  apply_truncation(f);
  return f;
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid(), "dealiased_product");
  require_scalar(a, "dealiased_product");
  const auto pa = to_physical(a);
  auto pb = to_physical(b);
  const auto av = pa.component(0);
  for (int c = 0; c < pb.components(); ++c) {
    auto bc = pb.component(c);
    for (std::size_t i = 0; i < bc.size(); ++i) bc[i] *= av[i];
  }
  return truncate(to_spectral(pb));
}

SpectralField dealiased_dot(const SpectralField& u, const SpectralField& w) {
  require_same_grid(u.grid(), w.grid(), "dealiased_dot");
  require_vector(u, "dealiased_dot");
  require_vector(w, "dealiased_dot");
  const auto pu = to_physical(u);
  const auto pw = to_physical(w);
  PhysicalField out(u.grid(), 1);
  auto o = out.component(0);
  for (int c = 0; c < u.components(); ++c) {
    const auto uc = pu.component(c);
    const auto wc = pw.component(c);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += uc[i] * wc[i];
  }
  return truncate(to_spectral(out));
}

SpectralField dealiased_advection(const SpectralField& v, const SpectralField& f) {
  require_same_grid(v.grid(), f.grid(), "dealiased_advection");
  require_vector(v, "dealiased_advection");
  const Grid& g = v.grid();
  const auto pv = to_physical(v);
  PhysicalField out(g, f.components());
  for (int a = 0; a < g.dim(); ++a) {
    const auto pd = to_physical(derivative(f, a));
    const auto va = pv.component(a);
    for (int c = 0; c < f.components(); ++c) {
      auto o = out.component(c);
      const auto dc = pd.component(c);
      for (std::size_t i = 0; i < o.size(); ++i) o[i] += va[i] * dc[i];
    }
  }
  return truncate(to_spectral(out));
}

double lp_norm(const PhysicalField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: exponent must satisfy p >= 1");
  const std::size_t n = f.grid().size();
  if (std::isinf(p)) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double m2 = 0.0;
      for (int c = 0; c < f.components(); ++c) m2 += f.component(c)[i] * f.component(c)[i];
      best = std::max(best, std::sqrt(m2));
    }
    return best;
  }
  double acc = 0.0;
  if (f.components() == 1) {
    const auto v = f.component(0);
    if (p == 2.0) {
      for (double x : v) acc += x * x;
    } else if (p == 1.0) {
      for (double x : v) acc += std::abs(x);
    } else {
      for (double x : v) acc += std::pow(std::abs(x), p);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double m2 = 0.0;
      for (int c = 0; c < f.components(); ++c) m2 += f.component(c)[i] * f.component(c)[i];
      acc += (p == 2.0) ? m2 : std::pow(m2, 0.5 * p);
    }
  }
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

double lp_norm(const SpectralField& f, double p) { return lp_norm(to_physical(f), p); }

double parseval_l2(const SpectralField& f) {
  double acc = 0.0;
  for (const auto& c : f.data()) acc += std::norm(c);
  return std::sqrt(acc * f.grid().volume());
}

double sup_norm(const SpectralField& f) { return lp_norm(to_physical(f), std::numeric_limits<double>::infinity()); }

Complex mean(const SpectralField& f, int component) { return f.component(component)[0]; }

SpectralField remove_mean(SpectralField f) {
  for (int c = 0; c < f.components(); ++c) f.component(c)[0] = Complex{0.0, 0.0};
  return f;
}

double hermitian_defect(const SpectralField& f) {
  const auto mirror = f.grid().mirror();
  const auto nyq = f.grid().nyquist();
  double defect = 0.0;
  double scale = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto v = f.component(c);
    for (std::size_t i = 0; i < v.size(); ++i) {
      scale = std::max(scale, std::abs(v[i]));
      // An unpaired Nyquist coefficient of a real field must itself be real.
      const Complex partner = nyq[i] ? v[i] : v[mirror[i]];
      defect = std::max(defect, std::abs(v[i] - std::conj(partner)));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

bool is_truncated(const SpectralField& f) {
  const auto kept = f.grid().kept();
  for (int c = 0; c < f.components(); ++c) {
    const auto v = f.component(c);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!kept[i] && v[i] != Complex{0.0, 0.0}) return false;
  }
  return true;
}

SpectralField component_field(const SpectralField& f, int c) {
  if (c < 0 || c >= f.components()) throw ConfigError("component_field: index out of range");
  SpectralField out(f.grid(), 1);
  std::copy(f.component(c).begin(), f.component(c).end(), out.component(0).begin());
  return out;
}

SpectralField stack_components(std::span<const SpectralField> parts) {
  if (parts.empty()) throw ConfigError("stack_components: no parts");
  const Grid& g = parts.front().grid();
  if (static_cast<int>(parts.size()) != g.dim()) throw ConfigError("stack_components: need d parts");
  SpectralField out(g, g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    const auto& p = parts[static_cast<std::size_t>(a)];
    require_same_grid(g, p.grid(), "stack_components");
    require_scalar(p, "stack_components");
    std::copy(p.component(0).begin(), p.component(0).end(), out.component(a).begin());
  }
  return out;
}

SpectralField sample_field(const Grid& grid, int components,
                           const std::function<double(std::span<const double>, int)>& fn) {
  PhysicalField phys(grid, components);
  const double h = grid.spacing();
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const std::size_t n = static_cast<std::size_t>(grid.points());
  for (std::size_t lin = 0; lin < grid.size(); ++lin) {
    std::size_t rem = lin;
    for (int a = grid.dim() - 1; a >= 0; --a) {
      x[static_cast<std::size_t>(a)] = h * static_cast<double>(rem % n);
      rem /= n;
    }
    for (int c = 0; c < components; ++c)
      phys.component(c)[lin] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())), c);
  }
  return to_spectral(phys);
}

}  // namespace lpe
