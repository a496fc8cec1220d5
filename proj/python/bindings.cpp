#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>

#include "sparse_harmonics/config.hpp"
#include "sparse_harmonics/harness.hpp"

namespace py = pybind11;
using namespace sh;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Domain domain_for(std::size_t n, double left, double length) {
    if (n < 2 || !std::has_single_bit(n)) throw InputError("sample count must be a power of two, got " + std::to_string(n));
    return Domain::make(left, length, std::countr_zero(n));
}

GridFunction to_grid(const Array& a, double left, double length) {
    if (a.ndim() != 1) throw InputError("expected a one-dimensional array");
    const auto n = static_cast<std::size_t>(a.size());
    return GridFunction(domain_for(n, left, length), std::vector<double>(a.data(), a.data() + n));
}

std::vector<GridFunction> to_grids(const std::vector<Array>& as, double left, double length) {
    std::vector<GridFunction> out;
    for (const auto& a : as) out.push_back(to_grid(a, left, length));
    return out;
}

Array to_array(const GridFunction& f) {
    Array out(static_cast<py::ssize_t>(f.size()));
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

std::string reports_json(const std::vector<VerificationReport>& rs) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rs) j.push_back(r.to_json());
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_sparse_harmonics, m) {
    m.doc() = "native core of sparse_harmonics";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "make_weight", [](const std::string& spec, int L, double left, double length) { return to_array(make_weight(spec, Domain::make(left, length, L))); },
        py::arg("spec"), py::arg("L"), py::arg("left") = 0.0, py::arg("length") = 1.0);
    m.def(
        "make_function",
        [](const std::string& spec, int L, double left, double length) { return to_array(make_function(spec, Domain::make(left, length, L))); },
        py::arg("spec"), py::arg("L"), py::arg("left") = 0.0, py::arg("length") = 1.0);
    m.def(
        "make_symbol", [](const std::string& spec, int L, double left, double length) { return to_array(make_symbol(spec, Domain::make(left, length, L))); },
        py::arg("spec"), py::arg("L"), py::arg("left") = 0.0, py::arg("length") = 1.0);

    m.def("a1_constant", [](const Array& w) { return a1_constant(to_grid(w, 0, 1)); }, py::arg("w"));
    m.def("ap_constant", [](const Array& w, double p) { return ap_constant(to_grid(w, 0, 1), p); }, py::arg("w"), py::arg("p"));
    m.def(
        "multi_ap_constant", [](const std::vector<Array>& ws, const std::vector<double>& ps) { return multi_ap_constant(to_grids(ws, 0, 1), ps); },
        py::arg("ws"), py::arg("ps"));
    m.def(
        "ainfty_constants",
        [](const Array& w) {
            const AInfty a = ainfty_constants(to_grid(w, 0, 1));
            return py::make_tuple(a.fujii_wilson, a.weak);
        },
        py::arg("w"));
    m.def(
        "reverse_holder_check",
        [](const Array& w, double tau_n) {
            DimensionalConstants dc;
            dc.tau_n = tau_n;
            const auto r = reverse_holder_check(to_grid(w, 0, 1), dc);
            py::dict d;
            d["r"] = r.r;
            d["weak"] = r.weak;
            d["worst_ratio"] = r.worst_ratio;
            d["cubes"] = r.cubes;
            d["violations"] = r.violations;
            d["worst_cube"] = py::make_tuple(r.worst.start, r.worst.end());
            return d;
        },
        py::arg("w"), py::arg("tau_n") = 2.0);
    m.def(
        "k0_p0",
        [](double t, double a1_u, double at_v, int mm) {
            const K0P0 k = k0_p0(t, a1_u, at_v, mm);
            return py::make_tuple(k.p0, k.p0_prime, k.K0);
        },
        py::arg("t"), py::arg("a1_u"), py::arg("at_v"), py::arg("m"));

    m.def(
        "hilbert_transform",
        [](const Array& f, double left, double length, int pv) { return to_array(hilbert_transform(to_grid(f, left, length), pv)); },
        py::arg("f"), py::arg("left") = 0.0, py::arg("length") = 1.0, py::arg("pv_cutoff") = 1);
    m.def(
        "calderon_apply",
        [](const std::vector<Array>& f, double left, double length) { return to_array(calderon_apply(to_grids(f, left, length))); },
        py::arg("f"), py::arg("left") = 0.0, py::arg("length") = 1.0);
    m.def(
        "stein_square_function",
        [](const Array& f, double alpha, double left, double length) { return to_array(stein_square_function(to_grid(f, left, length), alpha)); },
        py::arg("f"), py::arg("alpha"), py::arg("left") = 0.0, py::arg("length") = 1.0);
    m.def(
        "commutator",
        [](const std::string& op, const std::vector<Array>& b, const std::vector<Array>& f, double left, double length) {
            return to_array(evaluate(CommutatorSpec{make_operator(op), to_grids(b, left, length)}, to_grids(f, left, length)));
        },
        py::arg("op"), py::arg("b"), py::arg("f"), py::arg("left") = 0.0, py::arg("length") = 1.0);
    m.def("bmo_norm", [](const Array& b) { return bmo_norm(to_grid(b, 0, 1)); }, py::arg("b"));

    m.def(
        "lorentz_weak",
        [](const Array& f, double p, std::optional<Array> w) {
            const GridFunction g = to_grid(f, 0, 1);
            if (!w) return lorentz_weak(g, p);
            const GridFunction wg = to_grid(*w, 0, 1);
            return lorentz_weak(g, p, Measure::weighted(wg));
        },
        py::arg("f"), py::arg("p"), py::arg("w") = py::none());
    m.def(
        "lorentz_one",
        [](const Array& f, double p, std::optional<Array> w) {
            const GridFunction g = to_grid(f, 0, 1);
            if (!w) return lorentz_one(g, p);
            const GridFunction wg = to_grid(*w, 0, 1);
            return lorentz_one(g, p, Measure::weighted(wg));
        },
        py::arg("f"), py::arg("p"), py::arg("w") = py::none());
    m.def(
        "fit_exponent",
        [](const std::vector<double>& t, const std::vector<double>& phi, double lo, double hi) {
            const ExponentFit f = fit_exponent(t, phi, lo, hi);
            py::dict d;
            d["c"] = f.c;
            d["alpha"] = f.alpha;
            d["p"] = f.p;
            d["r2"] = f.r2;
            d["points"] = f.points;
            d["degenerate"] = f.degenerate;
            return d;
        },
        py::arg("t"), py::arg("phi"), py::arg("lo") = 1e-4, py::arg("hi") = 0.5);

    m.def(
        "_sharpness",
        [](int L, const std::string& symbol) {
            SharpnessOptions o;
            o.L = L;
            o.symbol = symbol;
            py::gil_scoped_release nogil;
            return sharpness_experiment(o).report.to_json().dump();
        },
        py::arg("L") = 14, py::arg("symbol") = "log");
    m.def(
        "_run_config",
        [](const std::string& text) {
            const ExperimentConfig cfg = ExperimentConfig::parse(text);
            RunOutcome out;
            {
                py::gil_scoped_release nogil;
                out = run_experiment(cfg);
            }
            return py::make_tuple(out.exit_code, reports_json(out.reports), out.constants_csv);
        },
        py::arg("text"));
    m.def(
        "constants_csv",
        [](const std::vector<std::string>& bank, int L, const std::vector<double>& ps) {
            return constants_csv(constants_table(bank, Domain::make(0, 1, L), ps));
        },
        py::arg("bank"), py::arg("L"), py::arg("ps") = std::vector<double>{1.5, 2.0, 3.0});
}
