#include "lpe/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lpe/error.hpp"
#include "lpe/hash.hpp"

namespace lpe {

namespace {

using nlohmann::json;
using Path = std::vector<std::string>;

const std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::verify_basis, "verify-basis"},
    {ExperimentKind::verify_bony, "verify-bony"},
    {ExperimentKind::product_law_sweep, "product-law-sweep"},
    {ExperimentKind::linear_exactness, "linear-exactness"},
    {ExperimentKind::simulate, "simulate"},
    {ExperimentKind::apriori_sweep, "apriori-sweep"},
    {ExperimentKind::darcy_sweep, "darcy-sweep"},
};

std::vector<double> dyadic(int first, int last) {
  std::vector<double> out;
  for (int e = first; e >= last; --e) out.push_back(std::exp2(e));
  return out;
}

std::string join(const Path& path) {
  std::string out;
  for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
  return out;
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const Path& path, const std::string& what) const {
    std::ostringstream os;
    os << source_ << ":" << line_of(path) << ": " << (path.empty() ? "" : join(path) + ": ") << what;
    throw ConfigError(os.str());
  }

  [[noreturn]] void fail_at_byte(std::size_t byte, const std::string& what) const {
    const std::size_t end = std::min(byte, text_.size());
    const auto line = 1 + std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(end), '\n');
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + what);
  }

  void keys(const json& obj, const Path& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, _] : obj.items()) {
      if (!ok.count(k)) {
        Path p = path;
        p.push_back(k);
        fail(p, "unknown key");
      }
    }
  }

  double number(const json& obj, const Path& path, const char* key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(sub(path, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(sub(path, key), "must be finite");
    return x;
  }

  long long integer(const json& obj, const Path& path, const char* key, long long fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(sub(path, key), "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const json& obj, const Path& path, const char* key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(sub(path, key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& obj, const Path& path, const char* key, const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(sub(path, key), "expected a string");
    return v.get<std::string>();
  }

  /// A number, an array of numbers, or (when allow_range) a dyadic range string "a:b".
  std::vector<double> numbers(const json& obj, const Path& path, const char* key, std::vector<double> fallback,
                              bool allow_range = false) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (allow_range && v.is_string()) {
      try {
        return parse_eps_range(v.get<std::string>());
      } catch (const ConfigError& e) {
        fail(sub(path, key), e.what());
      }
    }
    if (!v.is_array() || v.empty()) fail(sub(path, key), "expected a nonempty list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(sub(path, key), "expected a nonempty list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  static Path sub(const Path& path, const std::string& key) {
    Path p = path;
    p.push_back(key);
    return p;
  }

 private:
  std::size_t line_of(const Path& path) const {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& key : path) {
      const auto at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      pos = at;
      found = true;
    }
    if (!found) return 1;
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }

  const std::string& text_;
  std::string source_;
};

SpectralProfile read_profile(const Reader& r, const json& obj, const Path& path, SpectralProfile p) {
  r.keys(obj, path, {"kind", "exponent", "j", "width"});
  const std::string kind = r.string(obj, path, "kind", profile_kind_name(p.kind));
  if (kind == "flat") p.kind = ProfileKind::flat;
  else if (kind == "power") p.kind = ProfileKind::power;
  else if (kind == "band") p.kind = ProfileKind::band;
  else r.fail(Reader::sub(path, "kind"), "expected flat, power or band");
  p.exponent = r.number(obj, path, "exponent", p.exponent);
  p.j = r.number(obj, path, "j", p.j);
  p.width = r.number(obj, path, "width", p.width);
  if (!(p.width > 0.0)) r.fail(Reader::sub(path, "width"), "must be positive");
  return p;
}

void positive(const Reader& r, const Path& path, const char* key, double x) {
  if (!(x > 0.0)) r.fail(Reader::sub(path, key), "must be positive");
}

json profile_json(const SpectralProfile& p) {
  return {{"kind", profile_kind_name(p.kind)}, {"exponent", p.exponent}, {"j", p.j}, {"width", p.width}};
}

std::string law_name(const PressureLaw& law) {
  switch (law.kind()) {
    case LawKind::linear: return "linear";
    case LawKind::quadratic: return "quadratic";
    case LawKind::gamma: return "gamma";
  }
  return "quadratic";
}

std::string velocity_name(VelocityKind v) {
  switch (v) {
    case VelocityKind::ensemble: return "ensemble";
    case VelocityKind::darcy: return "darcy";
    case VelocityKind::zero: return "zero";
  }
  return "ensemble";
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "unknown";
}

EnsembleConfig ExperimentConfig::ensemble_config() const {
  EnsembleConfig e;
  e.seed = seed;
  e.count = ensemble.count;
  e.profile = ensemble.profile;
  e.amplitude = ensemble.amplitude;
  e.d = grid.d;
  e.N = grid.N;
  e.M = grid.M;
  e.cutoff = grid.cutoff;
  return e;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.output_dir = "out/" + kind_name(kind);
  c.simulation.cfl.wave_speed = 0.0;
  switch (kind) {
    case ExperimentKind::verify_basis:
    case ExperimentKind::verify_bony:
      break;
    case ExperimentKind::product_law_sweep:
      c.grid = {1, 65536, 4.0, 2.0 / 3.0};
      c.ensemble.count = 100;
      c.ensemble.profile = {ProfileKind::power, 0.5, 0.0, 0.125};
      c.product_law.eps = dyadic(0, -8);
      break;
    case ExperimentKind::linear_exactness:
      c.grid = {1, 16384, 1.0, 2.0 / 3.0};
      c.ensemble.count = 1;
      c.euler.toggles = {false, false};
      c.simulation.t_final = 1.0;
      c.simulation.dt = 1.0 / 32.0;
      c.sweep_eps = dyadic(0, -8);
      break;
    case ExperimentKind::simulate:
      c.grid = {1, 1024, 1.0, 2.0 / 3.0};
      c.euler.eps = 0.1;
      c.initial.profile = {ProfileKind::band, 0.0, std::log2(3.0), 0.02};
      c.initial.delta_fraction = 1.0;
      c.simulation.t_final = 1.0;
      c.simulation.dt = 1.0 / 64.0;
      c.simulation.keep_states = true;
      c.snapshot_times = {0.0, 1.0};
      break;
    case ExperimentKind::apriori_sweep:
    case ExperimentKind::darcy_sweep:
      c.grid = {1, 16384, 1.0, 2.0 / 3.0};
      c.initial.profile = {ProfileKind::band, 0.0, std::log2(6.0), 0.02};
      c.initial.eps_ref = 0.25;
      c.simulation.t_final = 50.0;
      c.simulation.dt = 0.1;
      c.simulation.ramp = 1.05;
      c.simulation.adaptive_cfl = true;
      c.simulation.max_samples = 1500;
      c.dt_start_eps = 1.0 / 16.0;
      c.sweep_eps = dyadic(-2, -8);
      break;
  }
  return c;
}

std::vector<double> parse_eps_range(const std::string& spec) {
  const auto colon = spec.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(spec);
    std::size_t used = 0;
    const int first = std::stoi(spec.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(spec);
    const std::string tail = spec.substr(colon + 1);
    const int last = std::stoi(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(spec);
    if (last > first) throw std::invalid_argument(spec);
    return dyadic(first, last);
  } catch (const std::logic_error&) {
    throw ConfigError("eps range must look like 0:-8 (exponents of 2, descending)");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  Reader r(text, source);
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
    r.fail({}, "config is empty");
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    r.fail_at_byte(e.byte == 0 ? 0 : e.byte - 1, std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) r.fail({}, "top level must be an object");
  r.keys(root, {}, {"experiment", "seed", "output_dir", "fault_inject", "grid", "ensemble", "product_law", "euler",
                    "initial_data", "simulation", "sweep", "lyapunov"});
  if (!root.contains("experiment")) r.fail({}, "missing key 'experiment'");
  const std::string name = r.string(root, {}, "experiment", "");
  const ExperimentKind* kind = nullptr;
  for (const auto& entry : kKinds)
    if (name == entry.second) kind = &entry.first;
  if (!kind) r.fail({"experiment"}, "unknown experiment kind '" + name + "'");

  ExperimentConfig c = default_config(*kind);
  const long long seed = r.integer(root, {}, "seed", 1);
  if (seed < 0) r.fail({"seed"}, "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.output_dir = r.string(root, {}, "output_dir", c.output_dir);
  c.fault_inject = r.boolean(root, {}, "fault_inject", c.fault_inject);

  if (root.contains("grid")) {
    const Path p{"grid"};
    const auto& g = root.at("grid");
    r.keys(g, p, {"d", "N", "M", "dealias_cutoff"});
    c.grid.d = static_cast<int>(r.integer(g, p, "d", c.grid.d));
    c.grid.N = static_cast<int>(r.integer(g, p, "N", c.grid.N));
    c.grid.M = r.number(g, p, "M", c.grid.M);
    c.grid.cutoff = r.number(g, p, "dealias_cutoff", c.grid.cutoff);
    if (c.grid.d < 1 || c.grid.d > 3) r.fail(Reader::sub(p, "d"), "must be 1, 2 or 3");
    if (c.grid.N < 8 || (c.grid.N & (c.grid.N - 1)) != 0) r.fail(Reader::sub(p, "N"), "must be a power of two >= 8");
    if (!(c.grid.M >= 1.0)) r.fail(Reader::sub(p, "M"), "must be >= 1");
    if (!(c.grid.cutoff > 0.0 && c.grid.cutoff <= 1.0)) r.fail(Reader::sub(p, "dealias_cutoff"), "must lie in (0, 1]");
  }

  if (root.contains("ensemble")) {
    const Path p{"ensemble"};
    const auto& e = root.at("ensemble");
    r.keys(e, p, {"count", "amplitude", "profile"});
    const long long count = r.integer(e, p, "count", static_cast<long long>(c.ensemble.count));
    if (count < 1) r.fail(Reader::sub(p, "count"), "must be >= 1");
    c.ensemble.count = static_cast<std::size_t>(count);
    c.ensemble.amplitude = r.number(e, p, "amplitude", c.ensemble.amplitude);
    positive(r, p, "amplitude", c.ensemble.amplitude);
    if (e.contains("profile")) c.ensemble.profile = read_profile(r, e.at("profile"), Reader::sub(p, "profile"), c.ensemble.profile);
  }

  const double d = c.grid.d;
  c.product_law.s1 = {d / 8.0, d / 4.0, 3.0 * d / 8.0};
  if (root.contains("product_law")) {
    const Path p{"product_law"};
    const auto& q = root.at("product_law");
    r.keys(q, p, {"s1", "p", "k", "eps"});
    c.product_law.s1 = r.numbers(q, p, "s1", c.product_law.s1);
    c.product_law.p = r.numbers(q, p, "p", c.product_law.p);
    c.product_law.k = static_cast<int>(r.integer(q, p, "k", c.product_law.k));
    c.product_law.eps = r.numbers(q, p, "eps", c.product_law.eps, true);
    for (double s : c.product_law.s1)
      if (!(s > 0.0 && s < d / 2.0)) r.fail(Reader::sub(p, "s1"), "each s1 must satisfy 0 < s1 < d/2");
    for (double x : c.product_law.p)
      if (!(x >= 1.0 && x < 2.0)) r.fail(Reader::sub(p, "p"), "each p must satisfy 1 <= p < 2");
    for (double e : c.product_law.eps)
      if (!(e > 0.0)) r.fail(Reader::sub(p, "eps"), "each eps must be positive");
  }

  if (root.contains("euler")) {
    const Path p{"euler"};
    const auto& e = root.at("euler");
    r.keys(e, p, {"eps", "k", "law", "gamma", "toggles"});
    c.euler.eps = r.number(e, p, "eps", c.euler.eps);
    positive(r, p, "eps", c.euler.eps);
    c.euler.k = static_cast<int>(r.integer(e, p, "k", c.euler.k));
    const std::string law = r.string(e, p, "law", law_name(c.euler.law));
    const double gamma = r.number(e, p, "gamma", c.euler.law.kind() == LawKind::gamma ? c.euler.law.gamma() : 1.4);
    if (law == "linear") c.euler.law = PressureLaw::linear();
    else if (law == "quadratic") c.euler.law = PressureLaw::quadratic();
    else if (law == "gamma") {
      if (!(gamma >= 1.0)) r.fail(Reader::sub(p, "gamma"), "must be >= 1");
      c.euler.law = PressureLaw::gamma_law(gamma);
    } else r.fail(Reader::sub(p, "law"), "expected linear, quadratic or gamma");
    if (e.contains("toggles")) {
      const Path t = Reader::sub(p, "toggles");
      const auto& tg = e.at("toggles");
      r.keys(tg, t, {"advection", "G_term"});
      c.euler.toggles.advection = r.boolean(tg, t, "advection", c.euler.toggles.advection);
      c.euler.toggles.g_term = r.boolean(tg, t, "G_term", c.euler.toggles.g_term);
    }
  }

  if (root.contains("initial_data")) {
    const Path p{"initial_data"};
    const auto& e = root.at("initial_data");
    r.keys(e, p, {"delta1", "delta_fraction", "velocity", "velocity_weight", "eps_ref", "profile"});
    c.initial.delta1 = r.number(e, p, "delta1", c.initial.delta1);
    positive(r, p, "delta1", c.initial.delta1);
    c.initial.delta_fraction = r.number(e, p, "delta_fraction", c.initial.delta_fraction);
    positive(r, p, "delta_fraction", c.initial.delta_fraction);
    const std::string v = r.string(e, p, "velocity", velocity_name(c.initial.velocity));
    if (v == "ensemble") c.initial.velocity = VelocityKind::ensemble;
    else if (v == "darcy") c.initial.velocity = VelocityKind::darcy;
    else if (v == "zero") c.initial.velocity = VelocityKind::zero;
    else r.fail(Reader::sub(p, "velocity"), "expected ensemble, darcy or zero");
    c.initial.velocity_weight = r.number(e, p, "velocity_weight", c.initial.velocity_weight);
    if (!(c.initial.velocity_weight >= 0.0)) r.fail(Reader::sub(p, "velocity_weight"), "must be nonnegative");
    c.initial.eps_ref = r.number(e, p, "eps_ref", c.initial.eps_ref);
    if (e.contains("profile")) c.initial.profile = read_profile(r, e.at("profile"), Reader::sub(p, "profile"), c.initial.profile);
  }

  if (root.contains("simulation")) {
    const Path p{"simulation"};
    const auto& s = root.at("simulation");
    r.keys(s, p, {"T_final", "dt", "dt_start", "dt_start_eps", "ramp", "c_cfl", "wave_speed", "adaptive_cfl",
                  "max_samples", "p", "keep_states", "snapshot_times"});
    auto& sim = c.simulation;
    sim.t_final = r.number(s, p, "T_final", sim.t_final);
    positive(r, p, "T_final", sim.t_final);
    sim.dt = r.number(s, p, "dt", sim.dt);
    positive(r, p, "dt", sim.dt);
    sim.dt_start = r.number(s, p, "dt_start", sim.dt_start);
    if (sim.dt_start < 0.0) r.fail(Reader::sub(p, "dt_start"), "must be nonnegative");
    c.dt_start_eps = r.number(s, p, "dt_start_eps", c.dt_start_eps);
    if (c.dt_start_eps < 0.0) r.fail(Reader::sub(p, "dt_start_eps"), "must be nonnegative");
    sim.ramp = r.number(s, p, "ramp", sim.ramp);
    if (!(sim.ramp >= 1.0)) r.fail(Reader::sub(p, "ramp"), "must be >= 1");
    sim.cfl.c_cfl = r.number(s, p, "c_cfl", sim.cfl.c_cfl);
    if (!(sim.cfl.c_cfl > 0.0 && sim.cfl.c_cfl <= 1.0)) r.fail(Reader::sub(p, "c_cfl"), "must lie in (0, 1]");
    sim.cfl.wave_speed = r.number(s, p, "wave_speed", sim.cfl.wave_speed);
    if (sim.cfl.wave_speed < 0.0) r.fail(Reader::sub(p, "wave_speed"), "must be nonnegative");
    sim.adaptive_cfl = r.boolean(s, p, "adaptive_cfl", sim.adaptive_cfl);
    const long long ms = r.integer(s, p, "max_samples", static_cast<long long>(sim.max_samples));
    if (ms < 3 || ms > 10000) r.fail(Reader::sub(p, "max_samples"), "must lie in [3, 10000]");
    sim.max_samples = static_cast<std::size_t>(ms);
    sim.p = r.number(s, p, "p", sim.p);
    if (!(sim.p >= 1.0 && sim.p < 2.0)) r.fail(Reader::sub(p, "p"), "must satisfy 1 <= p < 2");
    sim.keep_states = r.boolean(s, p, "keep_states", sim.keep_states);
    if (s.contains("snapshot_times")) c.snapshot_times = r.numbers(s, p, "snapshot_times", c.snapshot_times);
    else if (!c.snapshot_times.empty()) c.snapshot_times = {0.0, sim.t_final};
    for (double t : c.snapshot_times)
      if (!(t >= 0.0 && t <= sim.t_final)) r.fail(Reader::sub(p, "snapshot_times"), "times must lie in [0, T_final]");
  }

  if (root.contains("sweep")) {
    const Path p{"sweep"};
    const auto& s = root.at("sweep");
    r.keys(s, p, {"eps"});
    c.sweep_eps = r.numbers(s, p, "eps", c.sweep_eps, true);
    for (double e : c.sweep_eps)
      if (!(e > 0.0)) r.fail(Reader::sub(p, "eps"), "each eps must be positive");
  }

  if (root.contains("lyapunov")) {
    const Path p{"lyapunov"};
    const auto& l = root.at("lyapunov");
    r.keys(l, p, {"c_tilde", "kappa"});
    c.lyapunov.c_tilde = r.number(l, p, "c_tilde", c.lyapunov.c_tilde);
    c.lyapunov.kappa = r.number(l, p, "kappa", c.lyapunov.kappa);
    if (c.lyapunov.c_tilde < 0.0) r.fail(Reader::sub(p, "c_tilde"), "must be nonnegative");
    positive(r, p, "kappa", c.lyapunov.kappa);
  }
  c.lyapunov.k = c.euler.k;
  if (!(c.lyapunov.c_tilde * std::exp2(-c.lyapunov.k) < 1.0))
    r.fail({"lyapunov", "c_tilde"}, "c_tilde * 2^-k must be < 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ":1: cannot open config file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path);
}

json to_json(const ExperimentConfig& c) {
  const auto& sim = c.simulation;
  json euler = {{"eps", c.euler.eps},
                {"k", c.euler.k},
                {"law", law_name(c.euler.law)},
                {"toggles", {{"advection", c.euler.toggles.advection}, {"G_term", c.euler.toggles.g_term}}}};
  if (c.euler.law.kind() == LawKind::gamma) euler["gamma"] = c.euler.law.gamma();
  nlohmann::json out = {
      {"experiment", kind_name(c.kind)},
      {"seed", c.seed},
      {"fault_inject", c.fault_inject},
      {"grid", {{"d", c.grid.d}, {"N", c.grid.N}, {"M", c.grid.M}, {"dealias_cutoff", c.grid.cutoff}}},
      {"ensemble",
       {{"count", c.ensemble.count}, {"amplitude", c.ensemble.amplitude}, {"profile", profile_json(c.ensemble.profile)}}},
      {"product_law",
       {{"s1", c.product_law.s1}, {"p", c.product_law.p}, {"k", c.product_law.k}, {"eps", c.product_law.eps}}},
      {"euler", euler},
      {"initial_data",
       {{"delta1", c.initial.delta1},
        {"delta_fraction", c.initial.delta_fraction},
        {"velocity", velocity_name(c.initial.velocity)},
        {"velocity_weight", c.initial.velocity_weight},
        {"eps_ref", c.initial.eps_ref},
        {"profile", profile_json(c.initial.profile)}}},
      {"simulation",
       {{"T_final", sim.t_final},
        {"dt", sim.dt},
        {"dt_start", sim.dt_start},
        {"dt_start_eps", c.dt_start_eps},
        {"ramp", sim.ramp},
        {"c_cfl", sim.cfl.c_cfl},
        {"wave_speed", sim.cfl.wave_speed},
        {"adaptive_cfl", sim.adaptive_cfl},
        {"max_samples", sim.max_samples},
        {"p", sim.p},
        {"keep_states", sim.keep_states},
        {"snapshot_times", c.snapshot_times}}},
      {"sweep", {{"eps", c.sweep_eps}}},
      {"lyapunov", {{"c_tilde", c.lyapunov.c_tilde}, {"kappa", c.lyapunov.kappa}}},
  };
  // Empty lists mean "not used by this kind"; leaving them out keeps the form parseable.
  if (c.product_law.eps.empty()) out["product_law"].erase("eps");
  if (c.snapshot_times.empty()) out["simulation"].erase("snapshot_times");
  if (c.sweep_eps.empty()) out.erase("sweep");
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  Fnv1a h;
  h.add(to_json(cfg).dump());
  return hex64(h.value());
}

}  // namespace lpe
