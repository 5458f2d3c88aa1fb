#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srmc/coding.hpp"
#include "srmc/error.hpp"
#include "srmc/harness.hpp"
#include "srmc/io.hpp"
#include "srmc/moments.hpp"
#include "srmc/quantization.hpp"
#include "srmc/sensing.hpp"
#include "srmc/tailbounds.hpp"

namespace py = pybind11;
using namespace srmc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
    Array a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    auto r = a.mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<py::ssize_t>(i)) = v[i];
    return a;
}

Array to_array(const Eigen::MatrixXd& m) {
    Array a({m.rows(), m.cols()});
    auto r = a.mutable_unchecked<2>();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return a;
}

SensingSpec make_spec(const std::string& mode, std::size_t n, std::size_t m, const std::string& transform,
                      std::uint64_t seed, bool with_replacement) {
    SensingSpec s;
    s.mode = parse_mode(mode);
    if (s.mode != Mode::rc) s.transform = TransformOp::parse(transform, n);
    s.n = n;
    s.m = m;
    s.seed = seed;
    s.selection = with_replacement ? Selection::with_replacement : Selection::without_replacement;
    s.validate();
    return s;
}

CodingConfig config_from(const py::object& cfg) {
    if (cfg.is_none()) return {};
    const std::string text = py::module_::import("json").attr("dumps")(cfg).cast<std::string>();
    return io::config_from_json(nlohmann::json::parse(text));
}

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_srmc, m) {
    m.doc() = "Structurally random matrix sensing, measurement statistics and coding";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<TransformOp>(m, "Transform")
        .def(py::init([](const std::string& name, std::size_t n) { return TransformOp::parse(name, n); }),
             py::arg("name"), py::arg("n"))
        .def_property_readonly("n", &TransformOp::order)
        .def_property_readonly("name", &TransformOp::name)
        .def("forward", [](const TransformOp& t, const Array& v) { return to_array(t.apply_forward(to_vec(v))); })
        .def("adjoint", [](const TransformOp& t, const Array& v) { return to_array(t.apply_adjoint(to_vec(v))); })
        .def("dense", [](const TransformOp& t) { return to_array(t.dense()); })
        .def("__repr__", [](const TransformOp& t) { return "Transform('" + t.name() + "', " + std::to_string(t.order()) + ")"; });

    py::class_<SensingSpec>(m, "SensingSpec")
        .def(py::init(&make_spec), py::arg("mode"), py::arg("n"), py::arg("m"), py::arg("transform") = "wht",
             py::arg("seed") = 0, py::arg("with_replacement") = false)
        .def_static("from_json", [](const std::string& s) { return io::spec_from_json(nlohmann::json::parse(s)); })
        .def("to_json", [](const SensingSpec& s) { return io::to_json(s).dump(); })
        .def_property_readonly("mode", [](const SensingSpec& s) { return to_string(s.mode); })
        .def_readonly("n", &SensingSpec::n)
        .def_readonly("m", &SensingSpec::m)
        .def_readonly("seed", &SensingSpec::seed);

    m.def(
        "measure",
        [](const SensingSpec& spec, const Array& x, std::optional<std::uint64_t> seed) {
            const SensingDraw d = draw(spec, seed.value_or(spec.seed));
            const auto z = mixture_vector(spec, d, Signal(to_vec(x)));
            return py::make_tuple(to_array(select(z, d.selection)), d.selection, to_array(z));
        },
        py::arg("spec"), py::arg("x"), py::arg("seed") = py::none(),
        "Returns (y, selection, z); selection indices are 1-based.");

    m.def(
        "moments",
        [](const SensingSpec& spec, const Array& x, const std::vector<std::size_t>& probe) {
            const MixtureMoments mm = moments_for(spec, Signal(to_vec(x)));
            py::dict d;
            d["mu_y"] = mm.measurement_mean();
            d["sigma_y2"] = mm.measurement_var();
            d["mean"] = to_array(std::vector<double>(mm.mean_vector(probe).data(),
                                                     mm.mean_vector(probe).data() + probe.size()));
            d["cov"] = to_array(mm.covariance(probe));
            return d;
        },
        py::arg("spec"), py::arg("x"), py::arg("probe"), "Closed-form mean and covariance on 1-based probe indices.");

    m.def("circular_autocorrelation", [](const Array& x) { return to_array(circular_autocorrelation(Signal(to_vec(x)))); });
    m.def("count_distinct_components", &count_distinct_components);

    m.def("xi", &xi);
    m.def("lr_bound", &lr_bound, py::arg("t"));
    m.def("rc_bound", &rc_bound, py::arg("t"), py::arg("tau"));
    m.def("gr_bound", &gr_bound, py::arg("t"), py::arg("tau"), py::arg("n"));
    m.def("tau_rc", [](const Array& x) { return tau_rc(Signal(to_vec(x))); });
    m.def(
        "invert_bound",
        [](const std::string& mode, double delta, double tau, std::size_t n) {
            return invert_bound(TailBoundParams{parse_mode(mode), n, tau}.fn(), delta);
        },
        py::arg("mode"), py::arg("delta"), py::arg("tau") = 0.0, py::arg("n") = 0,
        "Smallest t with bound(t) <= delta.");

    py::class_<QuantizerSpec>(m, "Quantizer")
        .def_readonly("levels", &QuantizerSpec::levels)
        .def_readonly("lo", &QuantizerSpec::lo)
        .def_readonly("hi", &QuantizerSpec::hi)
        .def_readonly("step", &QuantizerSpec::step)
        .def_readonly("boundaries", &QuantizerSpec::boundaries)
        .def_readonly("reproductions", &QuantizerSpec::reproductions)
        .def_readonly("converged", &QuantizerSpec::converged)
        .def("quantize", [](const QuantizerSpec& q, double v) { return quantize(q, v); })
        .def("dequantize", [](const QuantizerSpec& q, std::size_t c) { return dequantize(q, c); })
        .def("probabilities", [](const QuantizerSpec& q, double mean, double sigma) { return codeword_probs(q, {mean, sigma}); })
        .def("distortion", [](const QuantizerSpec& q, double mean, double sigma) { return distortion(q, {mean, sigma}); });

    m.def("uniform_quantizer", [](double mean, double sigma, std::size_t levels, double t_star) {
        return design_uniform_t({mean, sigma}, levels, t_star);
    }, py::arg("mean"), py::arg("sigma"), py::arg("levels"), py::arg("t_star"));
    m.def("lloyd_max_quantizer", [](double mean, double sigma, std::size_t levels, double tol) {
        return design_lloyd_max({mean, sigma}, levels, tol);
    }, py::arg("mean"), py::arg("sigma"), py::arg("levels"), py::arg("tol") = 1e-9);
    m.def("entropy", [](const std::vector<double>& p) { return entropy(p); });

    m.def(
        "encode",
        [](const Array& x, const SensingSpec& spec, const py::object& cfg) {
            const EncodeResult r = encode(Signal(to_vec(x)), spec, config_from(cfg));
            py::dict d;
            d["bytes"] = py::bytes(reinterpret_cast<const char*>(r.bytes.data()), r.bytes.size());
            d["y"] = to_array(r.y);
            d["yhat"] = to_array(r.yhat);
            d["saturated"] = r.saturated;
            d["selection"] = r.selection;
            d["header_bits"] = r.header_bits;
            d["payload_bits"] = r.payload_bits;
            d["total_bits"] = r.total_bits;
            d["model_entropy_bits"] = r.model_entropy_bits;
            return d;
        },
        py::arg("x"), py::arg("spec"), py::arg("config") = py::none(),
        "config takes the same keys as the CLI coding config JSON.");

    m.def("decode", [](const py::bytes& b) {
        const std::string s = b;
        const DecodeResult r = decode(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
        py::dict d;
        d["yhat"] = to_array(r.yhat);
        d["saturated"] = r.saturated;
        d["selection"] = r.selection;
        d["side_info"] = json_to_py(io::to_json(r.side));
        return d;
    });

    m.def("synth_signal", [](const std::string& name, std::size_t n, std::size_t d, double rho, std::size_t k,
                             std::size_t width, double value, const std::string& basis, std::uint64_t seed) {
        SynthParams p{d, rho, k, width, value, basis, seed};
        return to_array(synth_signal(name, n, p).vec());
    }, py::arg("name"), py::arg("n"), py::arg("d") = 4, py::arg("rho") = 0.95, py::arg("k") = 8, py::arg("width") = 0,
       py::arg("value") = 1.0, py::arg("basis") = "wht", py::arg("seed") = 1);

    m.def("replacement_ratio", &replacement_ratio, py::arg("n"), py::arg("m"));
    m.def("qq", [](const SensingSpec& spec, const Array& x, std::size_t seeds, std::uint64_t base_seed) {
        ExperimentConfig cfg;
        cfg.spec = spec;
        cfg.signal = Signal(to_vec(x));
        cfg.trials = seeds;
        cfg.base_seed = base_seed;
        const QqResult r = qq_data(cfg);
        return py::make_tuple(to_array(r.normal_quantiles), to_array(r.sample_quantiles), r.correlation);
    }, py::arg("spec"), py::arg("x"), py::arg("seeds") = 8, py::arg("base_seed") = 1);
}
