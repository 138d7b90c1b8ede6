#include "detail/grid_cache.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace lpe::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

GridCache::GridCache(int d, int n, double m, int kept_mode) {
  size = 1;
  for (int a = 0; a < d; ++a) size *= static_cast<std::size_t>(n);
  xi_abs.assign(size, 0.0);
  kept.assign(size, 1);
  nyquist.assign(size, 0);
  mirror.assign(size, 0);
  for (int a = 0; a < d; ++a) {
    xi[static_cast<std::size_t>(a)].assign(size, 0.0);
    unit_xi[static_cast<std::size_t>(a)].assign(size, 0.0);
  }

  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t lin = 0; lin < size; ++lin) {
    std::size_t rem = lin;
    for (int a = d - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
    }
    double r2 = 0.0;
    std::size_t mirrored = 0;
    for (int a = 0; a < d; ++a) {
      const int i = idx[static_cast<std::size_t>(a)];
      const int mode = i < n / 2 ? i : i - n;
      const double x = mode / m;
      xi[static_cast<std::size_t>(a)][lin] = x;
      r2 += x * x;
      if (std::abs(mode) > kept_mode) kept[lin] = 0;
      if (mode == -n / 2) nyquist[lin] = 1;
      const int mi = (mode == -n / 2) ? i : (n - i) % n;
      mirrored = mirrored * static_cast<std::size_t>(n) + static_cast<std::size_t>(mi);
    }
    mirror[lin] = mirrored;
    xi_abs[lin] = std::sqrt(r2);
    if (r2 > 0.0) {
      for (int a = 0; a < d; ++a)
        unit_xi[static_cast<std::size_t>(a)][lin] = xi[static_cast<std::size_t>(a)][lin] / xi_abs[lin];
    }
  }

  std::array<int, 3> dims{n, n, n};
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* in = fftw_alloc_complex(size);
  auto* out = fftw_alloc_complex(size);
  forward_ = fftw_plan_dft(d, dims.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  backward_ = fftw_plan_dft(d, dims.data(), in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
}

GridCache::~GridCache() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
}

void GridCache::execute(const std::complex<double>* in, std::complex<double>* out, int sign) const {
  // fftw_execute_dft never writes to `in` for out-of-place plans.
  auto* fin = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in));
  auto* fout = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(sign == FFTW_FORWARD ? forward_ : backward_, fin, fout);
}

std::shared_ptr<const GridCache> GridCache::get(int d, int n, double m, int kept_mode) {
  using Key = std::tuple<int, int, double, int>;
  static std::mutex registry_mutex;
  static std::map<Key, std::weak_ptr<const GridCache>> registry;
  std::lock_guard<std::mutex> lock(registry_mutex);
  const Key key{d, n, m, kept_mode};
  if (auto it = registry.find(key); it != registry.end()) {
    if (auto alive = it->second.lock()) return alive;
  }
  auto fresh = std::make_shared<const GridCache>(d, n, m, kept_mode);
  registry[key] = fresh;
  return fresh;
}

}  // namespace lpe::detail
