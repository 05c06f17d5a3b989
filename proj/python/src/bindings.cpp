// Python bindings. Functions work on coefficient arrays; the basis object
// carries the spectrum and eigenfunction samples.

#include "fraclap/cli_io.hpp"
#include "fraclap/error.hpp"
#include "fraclap/linear_solver.hpp"
#include "fraclap/spectral_calculus.hpp"
#include "fraclap/variational_solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace fraclap;

namespace {

struct PyDomain {
    std::shared_ptr<const Domain> ptr;
};

struct PyBasis {
    BasisPtr ptr;
};

FractionalPolynomial to_poly(const std::vector<std::pair<double, double>>& terms) {
    std::vector<PolyTerm> t;
    for (const auto& [a, b] : terms) t.push_back({a, b});
    return FractionalPolynomial(t);
}

SpectralFunction to_function(const PyBasis& b, const Eigen::VectorXd& coeffs) { return {b.ptr, coeffs}; }

Eigen::MatrixXd node_matrix(const Domain& d) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(d.node_count()), static_cast<Eigen::Index>(d.dimension()));
    for (std::size_t q = 0; q < d.node_count(); ++q)
        for (std::size_t i = 0; i < d.dimension(); ++i)
            m(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i)) = d.node(q)[i];
    return m;
}

py::dict minimize_dict(const MinimizeReport& r) {
    py::dict out;
    out["coefficients"] = r.solution.coeffs();
    out["energy"] = r.energy;
    out["gradient_norm"] = r.gradient_norm;
    out["euler_lagrange_residual"] = r.euler_lagrange_residual;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    out["status"] = r.status;
    out["coercivity_margin"] = r.coercivity_margin;
    out["energy_log"] = r.energy_log;
    out["warnings"] = r.warnings;
    return out;
}

} // namespace

PYBIND11_MODULE(_fraclap, m) {
    m.doc() = "Spectral Galerkin solver for bipolynomial fractional Dirichlet-Laplace problems";
    m.attr("__version__") = artifact_version;

    static py::handle error_type = py::exception<Error>(m, "FraclapError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
            inst.attr("kind") = e.kind();
            inst.attr("pointer") = e.pointer();
            PyErr_SetObject(error_type.ptr(), inst.ptr());
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
            inst.attr("kind") = e.kind();
            inst.attr("pointer") = py::none();
            PyErr_SetObject(error_type.ptr(), inst.ptr());
        }
    });

    py::class_<PyDomain>(m, "Domain")
        .def_property_readonly("kind", [](const PyDomain& d) {
            return d.ptr->kind() == DomainKind::box ? "box" : "polygon2d";
        })
        .def_property_readonly("dimension", [](const PyDomain& d) { return d.ptr->dimension(); })
        .def_property_readonly("node_count", [](const PyDomain& d) { return d.ptr->node_count(); })
        .def_property_readonly("nodes", [](const PyDomain& d) { return node_matrix(*d.ptr); })
        .def_property_readonly("weights", [](const PyDomain& d) {
            return std::vector<double>(d.ptr->weights().begin(), d.ptr->weights().end());
        })
        .def_property_readonly("measure", [](const PyDomain& d) { return d.ptr->measure(); })
        .def_property_readonly("is_convex", [](const PyDomain& d) { return d.ptr->is_convex(); })
        .def("integrate", [](const PyDomain& d, const std::vector<double>& f) { return integrate(*d.ptr, f); });

    m.def("make_box", [](const std::vector<double>& lengths, std::size_t n) {
        return PyDomain{std::make_shared<const Domain>(make_box(lengths, n))};
    }, py::arg("lengths"), py::arg("nodes_per_axis") = default_nodes_per_axis);
    m.def("make_polygon2d", [](const std::vector<std::pair<double, double>>& vertices, double h) {
        std::vector<Point2> v;
        for (const auto& [x, y] : vertices) v.push_back({x, y});
        return PyDomain{std::make_shared<const Domain>(make_polygon2d(v, h))};
    }, py::arg("vertices"), py::arg("h"));

    py::class_<PyBasis>(m, "SpectralBasis")
        .def_property_readonly("size", [](const PyBasis& b) { return b.ptr->size(); })
        .def_property_readonly("source", [](const PyBasis& b) { return to_string(b.ptr->source()); })
        .def_property_readonly("eigenvalues", [](const PyBasis& b) { return b.ptr->eigenvalues(); })
        .def_property_readonly("values", [](const PyBasis& b) { return b.ptr->values(); })
        .def_property_readonly("modes", [](const PyBasis& b) { return b.ptr->modes(); })
        .def_property_readonly("residuals", [](const PyBasis& b) { return b.ptr->residuals(); })
        .def_property_readonly("warnings", [](const PyBasis& b) { return b.ptr->warnings(); })
        .def("gram", [](const PyBasis& b) { return b.ptr->gram(); })
        .def("synthesize", [](const PyBasis& b, const Eigen::VectorXd& c) { return synthesize(to_function(b, c)); })
        .def("project", [](const PyBasis& b, const std::vector<double>& samples) {
            return project(b.ptr, samples).coeffs();
        });

    m.def("analytic_box_basis", [](const PyDomain& d, std::size_t J) { return PyBasis{analytic_box_basis(d.ptr, J)}; },
          py::arg("domain"), py::arg("J"));
    m.def("discrete_basis", [](const PyDomain& d, std::size_t J, double tolerance, std::uint64_t seed) {
        DiscreteEigenOptions opt;
        opt.tolerance = tolerance;
        opt.seed = seed;
        return PyBasis{discrete_basis(d.ptr, J, opt)};
    }, py::arg("domain"), py::arg("J"), py::arg("tolerance") = 1e-8, py::arg("seed") = DiscreteEigenOptions{}.seed);
    m.def("synthetic_basis", [](std::vector<double> eigenvalues) {
        return PyBasis{SpectralBasis::synthetic(std::move(eigenvalues))};
    }, py::arg("eigenvalues"));

    m.def("eval_poly", [](const std::vector<std::pair<double, double>>& w, double lambda) {
        return eval_poly(to_poly(w), lambda);
    }, py::arg("w"), py::arg("lam"));
    m.def("apply_power", [](const PyBasis& b, const Eigen::VectorXd& c, double beta) {
        return apply_power(to_function(b, c), beta).coeffs();
    }, py::arg("basis"), py::arg("coefficients"), py::arg("beta"));
    m.def("apply_poly", [](const PyBasis& b, const Eigen::VectorXd& c, const std::vector<std::pair<double, double>>& w) {
        return apply_poly(to_function(b, c), to_poly(w)).coeffs();
    }, py::arg("basis"), py::arg("coefficients"), py::arg("w"));
    m.def("m_beta", [](const PyBasis& b, double beta) { return m_beta(*b.ptr, beta); }, py::arg("basis"),
          py::arg("beta"));
    m.def("norm_beta", [](const PyBasis& b, const Eigen::VectorXd& c, double beta) {
        return norm_beta(to_function(b, c), beta);
    }, py::arg("basis"), py::arg("coefficients"), py::arg("beta"));
    m.def("norm_tilde", [](const PyBasis& b, const Eigen::VectorXd& c, double beta) {
        return norm_tilde(to_function(b, c), beta);
    }, py::arg("basis"), py::arg("coefficients"), py::arg("beta"));

    m.def("solve_linear", [](const PyBasis& b, const Eigen::VectorXd& g, const std::vector<std::pair<double, double>>& w) {
        const auto r = solve_linear(to_function(b, g), to_poly(w));
        py::dict out;
        out["coefficients"] = r.solution.coeffs();
        out["strong_residual"] = r.strong_residual;
        out["weak_residual_max"] = r.weak_residual_max;
        out["solution_norm"] = r.solution_norm;
        out["inverse_bound"] = r.inverse_bound;
        out["inverse_bound_holds"] = r.inverse_bound_holds;
        out["equivalent"] = r.equivalent;
        return out;
    }, py::arg("basis"), py::arg("g"), py::arg("w"));

    m.def("minimize_builtin", [](const PyBasis& b, const std::vector<std::pair<double, double>>& w, double A,
                                 double bconst, std::size_t starts, std::uint64_t seed) {
        const auto nl = builtin_example_nonlinearity(A, bconst, b.ptr->domain().dimension());
        const auto runs = multi_start(nl, to_poly(w), b.ptr, MinimizeOptions{}, starts, seed);
        py::list out;
        for (const auto& r : runs) out.append(minimize_dict(r));
        return out;
    }, py::arg("basis"), py::arg("w"), py::arg("A") = 0.5, py::arg("b") = 0.1, py::arg("multi_start") = 1,
       py::arg("seed") = 0);

    m.def("minimize_linear", [](const PyBasis& b, const std::vector<std::pair<double, double>>& w,
                                std::vector<double> g_samples) {
        return minimize_dict(minimize(linear_nonlinearity(std::move(g_samples)), to_poly(w), b.ptr));
    }, py::arg("basis"), py::arg("w"), py::arg("g_samples"));

    m.def("run_config", [](const std::string& text, const std::string& kind, const std::filesystem::path& base_dir) {
        const auto k = problem_kind_from_string(kind);
        if (!k) throw InvalidArgument("unknown problem kind '" + kind + "'");
        RunContext ctx;
        ctx.base_dir = base_dir;
        const auto bundle = run(parse_config(text), *k, ctx);
        py::dict out;
        py::dict files;
        for (const auto& [name, contents] : bundle.files) files[py::str(name)] = py::bytes(contents);
        out["files"] = files;
        out["report"] = bundle.report.dump();
        out["exit_code"] = bundle.exit_code;
        return out;
    }, py::arg("config"), py::arg("kind"), py::arg("base_dir") = ".");
}
