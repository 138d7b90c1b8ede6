#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lpe/besov.hpp"
#include "lpe/config.hpp"
#include "lpe/diagnostics.hpp"
#include "lpe/error.hpp"
#include "lpe/experiment.hpp"
#include "lpe/inequality_lab.hpp"
#include "lpe/paraproduct.hpp"
#include "lpe/spectral.hpp"
#include "lpe/trajectory.hpp"

namespace py = pybind11;
using namespace lpe;

namespace {

/// Coefficients as a (components, N, ..., N) complex array in FFT-native order.
py::array_t<Complex> coefficients(const SpectralField& f) {
  std::vector<py::ssize_t> shape{f.components()};
  for (int a = 0; a < f.grid().dim(); ++a) shape.push_back(f.grid().points());
  py::array_t<Complex> out(shape);
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

SpectralField from_coefficients(const Grid& g, py::array_t<Complex, py::array::c_style | py::array::forcecast> a) {
  const auto total = static_cast<std::size_t>(a.size());
  if (total % g.size() != 0) throw ConfigError("coefficient array size does not match the grid");
  SpectralField f(g, static_cast<int>(total / g.size()));
  std::copy(a.data(), a.data() + total, f.data().begin());
  return f;
}

py::array_t<double> samples(const SpectralField& f) {
  const auto u = to_physical(f);
  std::vector<py::ssize_t> shape{f.components()};
  for (int a = 0; a < f.grid().dim(); ++a) shape.push_back(f.grid().points());
  py::array_t<double> out(shape);
  std::copy(u.data().begin(), u.data().end(), out.mutable_data());
  return out;
}

SpectralField from_samples(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  const auto total = static_cast<std::size_t>(a.size());
  if (total % g.size() != 0) throw ConfigError("sample array size does not match the grid");
  PhysicalField u(g, static_cast<int>(total / g.size()));
  std::copy(a.data(), a.data() + total, u.data().begin());
  return to_spectral(u);
}

py::dict gate_dict(const GateResult& g) {
  py::dict d;
  d["name"] = g.name;
  d["passed"] = g.passed;
  d["detail"] = g.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Littlewood-Paley toolkit for the damped compressible Euler system";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<RegimeViolation>(m, "RegimeViolation", PyExc_RuntimeError);
  py::register_exception<CflViolation>(m, "CflViolation", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, double, double>(), py::arg("d"), py::arg("N"), py::arg("M"),
           py::arg("dealias_cutoff") = 2.0 / 3.0)
      .def_property_readonly("d", &Grid::dim)
      .def_property_readonly("N", &Grid::points)
      .def_property_readonly("M", &Grid::scale)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("max_kept_mode", &Grid::max_kept_mode)
      .def("xi_abs", [](const Grid& g) {
        const auto x = g.xi_abs();
        return py::array_t<double>(static_cast<py::ssize_t>(x.size()), x.data());
      });

  py::class_<SpectralField>(m, "SpectralField")
      .def(py::init<Grid, int>(), py::arg("grid"), py::arg("components") = 1)
      .def_property_readonly("grid", &SpectralField::grid)
      .def_property_readonly("components", &SpectralField::components)
      .def("coefficients", &coefficients)
      .def("samples", &samples)
      .def_static("from_coefficients", &from_coefficients)
      .def_static("from_samples", &from_samples)
      .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
      .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; })
      .def("__rmul__", [](const SpectralField& a, double s) { return s * a; })
      .def("__mul__", [](const SpectralField& a, double s) { return s * a; });

  m.def("dealiased_product", &dealiased_product);
  m.def("lp_norm", py::overload_cast<const SpectralField&, double>(&lp_norm));
  m.def("parseval_l2", &parseval_l2);
  m.def("gradient", &gradient);
  m.def("divergence", &divergence);

  py::enum_<ProfileKind>(m, "ProfileKind")
      .value("flat", ProfileKind::flat)
      .value("power", ProfileKind::power)
      .value("band", ProfileKind::band);
  m.def(
      "generate_ensemble",
      [](const Grid& g, std::size_t count, std::uint64_t seed, ProfileKind kind, double exponent, double j,
         double width, double amplitude) {
        EnsembleConfig e;
        e.seed = seed;
        e.count = count;
        e.d = g.dim();
        e.N = g.points();
        e.M = g.scale();
        e.cutoff = g.dealias_cutoff();
        e.profile = {kind, exponent, j, width};
        e.amplitude = amplitude;
        return generate_ensemble(e);
      },
      py::arg("grid"), py::arg("count"), py::arg("seed") = 1, py::arg("profile") = ProfileKind::flat,
      py::arg("exponent") = 0.0, py::arg("j") = 0.0, py::arg("width") = 0.125, py::arg("amplitude") = 1.0);

  py::class_<LPBasis>(m, "LPBasis")
      .def(py::init<const Grid&>())
      .def_property_readonly("j_min", &LPBasis::j_min)
      .def_property_readonly("j_max", &LPBasis::j_max)
      .def_property_readonly("j_lo", &LPBasis::j_lo)
      .def_property_readonly("j_hi", &LPBasis::j_hi)
      .def("with_fault", &LPBasis::with_fault);
  m.def("block_project",
        [](const LPBasis& b, const SpectralField& f, int j, bool lowpass) {
          return block_project(b, f, j, lowpass ? ProjectionKind::lowpass : ProjectionKind::block);
        },
        py::arg("basis"), py::arg("f"), py::arg("j"), py::arg("lowpass") = false);
  m.def("reconstruction_defect", &reconstruction_defect);
  m.def("basis_manifest", [](const LPBasis& b) { return basis_manifest(b).dump(); });

  py::enum_<Band>(m, "Band").value("all", Band::all).value("low", Band::low).value("high", Band::high);
  m.def("frequency_threshold", &frequency_threshold, py::arg("eps"), py::arg("k"));
  m.def("block_norms", py::overload_cast<const LPBasis&, const SpectralField&, double>(&block_norms));
  m.def(
      "besov_seminorm",
      [](const LPBasis& b, const SpectralField& f, double s, double p, Band band, int threshold) {
        return besov_seminorm(b, f, {s, p, band, threshold}).value;
      },
      py::arg("basis"), py::arg("f"), py::arg("s"), py::arg("p"), py::arg("band") = Band::all,
      py::arg("threshold") = 0);
  m.def("hl_shift_check", &hl_shift_check, py::arg("basis"), py::arg("f"), py::arg("s"), py::arg("sigma0"),
        py::arg("threshold"));

  m.def("bony_decompose", [](const LPBasis& b, const SpectralField& x, const SpectralField& y) {
    auto parts = bony_decompose(b, x, y);
    py::dict d;
    d["Tab"] = parts.Tab;
    d["Tba"] = parts.Tba;
    d["R"] = parts.R;
    d["residual"] = parts.residual;
    return d;
  });
  m.def("product_law_ratio",
        py::overload_cast<const LPBasis&, const SpectralField&, const SpectralField&, double, double, double, int>(
            &product_law_ratio),
        py::arg("basis"), py::arg("a"), py::arg("b"), py::arg("s1"), py::arg("p"), py::arg("eps"), py::arg("k"));
  py::class_<ProductLawSample>(m, "ProductLawSample")
      .def_readonly("lhs", &ProductLawSample::lhs)
      .def_readonly("rhs", &ProductLawSample::rhs)
      .def_readonly("ratio", &ProductLawSample::ratio);

  m.def("symbol_eigenvalues", [](double r, double eps) {
    const auto s = symbol_eigenvalues(r, eps);
    return py::make_tuple(s.plus, s.minus, s.degenerate);
  });
  m.def("linear_propagator", &linear_propagator, py::arg("r"), py::arg("eps"), py::arg("t"));

  m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); });
  m.def("normalized_config", [](const std::string& text) { return to_json(parse_config(text)).dump(); });
  m.def(
      "run_experiment",
      [](const std::string& text, const std::string& output_dir) {
        auto cfg = parse_config(text);
        cfg.output_dir = output_dir;
        py::gil_scoped_release release;
        const auto res = run_experiment(cfg);
        py::gil_scoped_acquire acquire;
        py::list gates;
        for (const auto& g : res.gates) gates.append(gate_dict(g));
        py::dict out;
        out["passed"] = res.passed();
        out["gates"] = gates;
        out["artifacts"] = res.artifacts;
        return out;
      },
      py::arg("config_json"), py::arg("output_dir"));
}
