#include <doctest.h>

#include <cmath>
#include <string>

#include "lpe/config.hpp"
#include "lpe/error.hpp"

using namespace lpe;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal configs take the kind defaults") {
  const auto c = parse_config(R"({"experiment": "verify-basis"})");
  CHECK(c.kind == ExperimentKind::verify_basis);
  CHECK(c.grid.N == 1024);
  CHECK(c.grid.M == 16.0);
  CHECK(c.ensemble.count == 50);
  const auto p = parse_config(R"({"experiment": "product-law-sweep"})");
  CHECK(p.product_law.eps.size() == 9);
  CHECK(p.product_law.p == std::vector<double>{1.0, 1.5});
  CHECK(p.ensemble.count == 100);
  for (const char* k : {"verify-basis", "verify-bony", "product-law-sweep", "linear-exactness", "simulate",
                        "apriori-sweep", "darcy-sweep"}) {
    const auto cfg = parse_config(std::string(R"({"experiment": ")") + k + "\"}");
    CHECK(kind_name(cfg.kind) == k);
  }
}

TEST_CASE("overrides") {
  const auto c = parse_config(R"({
    "experiment": "simulate",
    "seed": 9,
    "grid": {"N": 256, "M": 2},
    "euler": {"eps": 0.05, "law": "gamma", "gamma": 1.4, "toggles": {"advection": false}},
    "simulation": {"T_final": 0.5, "dt": 0.01, "p": 1.5}
  })");
  CHECK(c.seed == 9);
  CHECK(c.grid.N == 256);
  CHECK(c.euler.eps == 0.05);
  CHECK(c.euler.law.kind() == LawKind::gamma);
  CHECK(c.euler.law.gamma() == 1.4);
  CHECK_FALSE(c.euler.toggles.advection);
  CHECK(c.euler.toggles.g_term);
  CHECK(c.simulation.t_final == 0.5);
  CHECK(c.simulation.p == 1.5);
}

TEST_CASE("rejections carry the line") {
  CHECK(error_of("") == "cfg.json:1: config is empty");
  CHECK(error_of("  \n\n ").find("config is empty") != std::string::npos);
  CHECK(error_of("{\"seed\": 1}").find("experiment") != std::string::npos);
  CHECK(error_of("{\n\"experiment\": \"nope\"\n}").rfind("cfg.json:2:", 0) == 0);
  const auto unknown = error_of("{\n  \"experiment\": \"verify-basis\",\n  \"grid\": {\n    \"bogus\": 3\n  }\n}");
  CHECK(unknown.rfind("cfg.json:4: grid.bogus", 0) == 0);
  const auto p = error_of("{\n \"experiment\": \"product-law-sweep\",\n \"product_law\": {\"p\": 2.5}\n}");
  CHECK(p.rfind("cfg.json:3: product_law.p", 0) == 0);
  CHECK(error_of(R"({"experiment": "verify-basis", "grid": {"N": 1000}})").find("power of two") != std::string::npos);
  CHECK(error_of(R"({"experiment": "product-law-sweep", "product_law": {"s1": [0.6]}})").find("s1") !=
        std::string::npos);
  CHECK(error_of(R"({"experiment": "simulate", "lyapunov": {"c_tilde": 8}})").find("c_tilde") != std::string::npos);
  CHECK(error_of(R"({"experiment": "simulate", "seed": "x"})").find("integer") != std::string::npos);
  CHECK(error_of("{\"experiment\": ").find("malformed JSON") != std::string::npos);
  CHECK(error_of("[1, 2]").find("object") != std::string::npos);
}

TEST_CASE("hash") {
  const auto a = parse_config(R"({"experiment": "verify-basis", "output_dir": "x"})");
  const auto b = parse_config(R"({"experiment": "verify-basis", "output_dir": "y", "seed": 1})");
  const auto c = parse_config(R"({"experiment": "verify-basis", "seed": 2})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
  // The normalized form parses back to the same config.
  auto dumped = to_json(a);
  CHECK(config_hash(parse_config(dumped.dump())) == config_hash(a));
}

TEST_CASE("eps ranges") {
  const auto e = parse_eps_range("0:-8");
  REQUIRE(e.size() == 9);
  CHECK(e.front() == 1.0);
  CHECK(e.back() == std::ldexp(1.0, -8));
  CHECK(parse_eps_range("-2:-2") == std::vector<double>{0.25});
  CHECK_THROWS_AS(parse_eps_range("abc"), ConfigError);
  CHECK_THROWS_AS(parse_eps_range("1"), ConfigError);
  const auto c = parse_config(R"({"experiment": "product-law-sweep", "product_law": {"eps": "-1:-3"}})");
  CHECK(c.product_law.eps == std::vector<double>{0.5, 0.25, 0.125});
}
