#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cvoodg/cli.hpp"
#include "cvoodg/quadrature.hpp"
#include "cvoodg/serialize.hpp"
#include "cvoodg/state_bounds.hpp"
#include "cvoodg/suites.hpp"

namespace py = pybind11;
using namespace cvoodg;

namespace {

// Reports cross the boundary as the same JSON the CLI writes.
py::object as_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_cvoodg, m) {
    m.doc() = "Out-of-distribution bounds for learned continuous-variable channels";

    py::register_exception<quad::QuadratureError>(m, "QuadratureError", PyExc_ArithmeticError);

    py::class_<BoundCurve>(m, "BoundCurve")
        .def("__call__", &BoundCurve::operator(), py::arg("nbar"))
        .def("__call__",
             [](const BoundCurve& c, const std::vector<double>& nbar) {
                 std::vector<double> out;
                 out.reserve(nbar.size());
                 for (double n : nbar) out.push_back(c(n));
                 return out;
             })
        .def("combined", &BoundCurve::combined, py::arg("nbar"))
        .def_property_readonly("tag", [](const BoundCurve& c) { return to_string(c.tag()); })
        .def_property_readonly("eps0", [](const BoundCurve& c) { return c.guarantee().eps0; })
        .def_property_readonly("tau", [](const BoundCurve& c) { return c.guarantee().tau; })
        .def_property_readonly("concavified", &BoundCurve::concavified)
        .def("__repr__", [](const BoundCurve& c) {
            std::ostringstream s;
            s << "BoundCurve(" << to_string(c.tag()) << ", eps0=" << c.guarantee().eps0 << ", tau=" << c.guarantee().tau
              << ")";
            return s.str();
        });

    m.def(
        "curve",
        [](const std::string& cls, double eps0, double tau) {
            const InDistributionGuarantee g{eps0, tau};
            g.validate();
            return make_curve(parse_class_tag(cls), g);
        },
        py::arg("cls"), py::arg("eps0"), py::arg("tau") = 1.0);

    m.def(
        "concave_hull",
        [](const BoundCurve& c, double grid_max, int points) {
            return concave_hull(c, grid_max, points, HullMode::certified);
        },
        py::arg("curve"), py::arg("grid_max") = 100.0, py::arg("points") = 401);

    m.def(
        "extend",
        [](const BoundCurve& c, const std::string& state) { return as_python(io::to_json(extend(c, cli::parse_state(state)))); },
        py::arg("curve"), py::arg("state"), "Bound for a state spec such as 'fock:2' or 'spat:1'.");

    m.def(
        "extend_fock_matrix",
        [](const BoundCurve& c, const Eigen::MatrixXcd& rho, int M_max) {
            return as_python(io::to_json(known_fock_bound(c, FockMatrix(rho), M_max)));
        },
        py::arg("curve"), py::arg("rho"), py::arg("M_max") = 60);

    m.def(
        "trace_distance",
        [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return trace_distance(FockMatrix(a), FockMatrix(b)); },
        py::arg("rho"), py::arg("sigma"));

    m.def("suite_names", &oracle::suite_names);
    m.def(
        "run_suite",
        [](const std::string& suite, const std::string& pair_class, double eps0, double tau, std::uint64_t seed) {
            oracle::SuiteOptions o;
            o.pair_class = oracle::parse_pair_class(pair_class);
            o.guarantee = {eps0, tau};
            o.seed = seed;
            oracle::VerificationReport r;
            {
                py::gil_scoped_release release;
                r = oracle::run_suite(suite, o);
            }
            return as_python(io::to_json(r));
        },
        py::arg("suite"), py::arg("pair_class") = "phase_rotation", py::arg("eps0") = 0.1, py::arg("tau") = 1.0,
        py::arg("seed") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the cv-oodg command line in-process; returns (exit_code, stdout, stderr).");
}
