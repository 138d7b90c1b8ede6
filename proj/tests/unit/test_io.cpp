#include <doctest.h>

#include <cstring>
#include <sstream>

#include "lpe/error.hpp"
#include "lpe/hash.hpp"
#include "lpe/inequality_lab.hpp"
#include "lpe/parallel.hpp"
#include "lpe/snapshot.hpp"
#include "oracles.hpp"

using namespace lpe;

TEST_CASE("fnv1a reference values") {
  CHECK(Fnv1a().value() == 0xcbf29ce484222325ull);
  CHECK(Fnv1a().add("a").value() == 0xaf63dc4c8601ec8cull);
  CHECK(Fnv1a().add("foobar").value() == 0x85944171f73967e8ull);
  CHECK(hex64(0xabcull) == "0000000000000abc");
}

TEST_CASE("snapshot roundtrip") {
  const Grid g(2, 16, 2.0);
  const auto f = generate_ensemble(oracle::ensemble_on(g, 1))[0];
  std::stringstream ss;
  write_snapshot(ss, f);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "LPSF");
  CHECK(bytes.size() == 4 + 4 + 4 + 4 + 4 + 8 + 8 + 4 + g.size() * 8);
  const auto back = read_snapshot(ss);
  CHECK(back.grid() == g);
  CHECK(oracle::rel_diff(back.data(), f.data()) <= 1e-6);

  std::stringstream bad("XXXX0000");
  CHECK_THROWS_AS(read_snapshot(bad), DataError);
  std::stringstream cut(bytes.substr(0, 40));
  CHECK_THROWS_AS(read_snapshot(cut), DataError);
}

TEST_CASE("snapshot frequency order") {
  // First stored coefficient is m = -N/2, the one after m = -N/2 + 1.
  const Grid g(1, 8, 1.0);
  SpectralField f(g, 1);
  f.component(0)[4] = Complex{2.0, 0.0};  // m = -4
  f.component(0)[5] = Complex{3.0, 0.0};  // m = -3
  std::stringstream ss;
  write_snapshot(ss, f);
  const std::string bytes = ss.str();
  const std::size_t header = bytes.size() - 8 * 8;
  float first = 0.0f, second = 0.0f;
  std::memcpy(&first, bytes.data() + header, 4);
  std::memcpy(&second, bytes.data() + header + 8, 4);
  CHECK(first == 2.0f);
  CHECK(second == 3.0f);
}

TEST_CASE("parallel_for writes by index") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw DataError("boom");
                  }),
                  DataError);
  CHECK(thread_count() >= 1);
}
