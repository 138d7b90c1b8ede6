#include "lpe/snapshot.hpp"

#include <array>
#include <bit>
#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "lpe/error.hpp"
#include "lpe/spectral.hpp"

namespace lpe {

namespace {

constexpr std::array<char, 4> kMagic{'L', 'P', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw DataError("snapshot: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

// Maps the centered (ascending-m) position to the FFT-native storage index.
std::vector<std::size_t> centered_order(const Grid& g) {
  const std::size_t n = static_cast<std::size_t>(g.points());
  std::vector<std::size_t> order(g.size());
  for (std::size_t pos = 0; pos < g.size(); ++pos) {
    std::size_t rem = pos;
    std::size_t index = 0;
    std::size_t stride = 1;
    for (int a = g.dim() - 1; a >= 0; --a) {
      const std::size_t centered = rem % n;
      rem /= n;
      const std::size_t native = (centered + n / 2) % n;  // m = centered - N/2
      index += native * stride;
      stride *= n;
    }
    order[pos] = index;
  }
  return order;
}

}  // namespace

void write_snapshot(std::ostream& os, const SpectralField& f) {
  const Grid& g = f.grid();
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, kConventionTag);
  put<std::int32_t>(os, g.dim());
  put<std::int32_t>(os, g.points());
  put<double>(os, g.scale());
  put<double>(os, g.dealias_cutoff());
  put<std::int32_t>(os, f.components());
  const auto order = centered_order(g);
  for (int c = 0; c < f.components(); ++c) {
    const auto v = f.component(c);
    for (std::size_t idx : order) {
      put<float>(os, static_cast<float>(v[idx].real()));
      put<float>(os, static_cast<float>(v[idx].imag()));
    }
  }
  if (!os) throw DataError("snapshot: write failed");
}

void write_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("snapshot: cannot open " + path);
  write_snapshot(os, f);
}

SpectralField read_snapshot(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw DataError("snapshot: bad magic");
  if (get<std::uint32_t>(is) != kVersion) throw DataError("snapshot: unsupported version");
  if (get<std::uint32_t>(is) != kConventionTag) throw DataError("snapshot: transform convention tag mismatch");
  const int d = get<std::int32_t>(is);
  const int n = get<std::int32_t>(is);
  const double m = get<double>(is);
  const double cutoff = get<double>(is);
  const int components = get<std::int32_t>(is);
  Grid g(d, n, m, cutoff);
  SpectralField f(g, components);
  const auto order = centered_order(g);
  for (int c = 0; c < components; ++c) {
    auto v = f.component(c);
    for (std::size_t idx : order) {
      const float re = get<float>(is);
      const float im = get<float>(is);
      v[idx] = Complex{re, im};
    }
  }
  return f;
}

SpectralField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("snapshot: cannot open " + path);
  return read_snapshot(is);
}

}  // namespace lpe
