#include "glduality/cli.hpp"
#include "glduality/duality.hpp"
#include "glduality/outer_iteration.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

namespace py = pybind11;
using namespace glduality;

namespace {

BoxGrid scalar_grid(int dim, int cells) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    return BoxGrid::dirichlet_interior(dim, 0.0, 1.0, cells);
}

RealScalarField wrap(const BoxGrid &g, const VectorXd &v, const char *what) {
    if (v.size() != g.size()) throw std::invalid_argument(std::string(what) + " has the wrong length");
    return {g, v};
}

py::dict certificate_dict(const DualCertificate &c) {
    py::dict d;
    d["v1"] = c.v1;
    d["v0"] = c.v0;
    d["K"] = c.K;
    d["primal"] = c.primal;
    d["dual"] = c.dual;
    d["gap"] = c.gap;
    d["primal_residual"] = c.primal_residual;
    d["stationarity_v1"] = c.stationarity_v1;
    d["stationarity_v0"] = c.stationarity_v0;
    d["multiplier_agreement"] = c.multiplier_agreement;
    d["e_box"] = c.e_box;
    d["a_plus"] = c.a_plus;
    d["b_plus"] = c.b_plus;
    d["dual_bound"] = c.dual_bound;
    d["amplitude_ok"] = c.amplitude_ok;
    d["min_second_variation"] = c.min_second_variation;
    d["min_dual_hessian"] = c.min_dual_hessian;
    d["min_dual_hessian_full"] = c.min_dual_hessian_full;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ginzburg-Landau solver and duality certificates";

    py::register_exception<CertificateError>(m, "CertificateError", PyExc_RuntimeError);

    py::enum_<MagneticNormalization>(m, "MagneticNormalization")
        .value("Coupling", MagneticNormalization::Coupling)
        .value("Gaussian", MagneticNormalization::Gaussian);

    py::class_<GLParams>(m, "GLParams")
        .def(py::init<>())
        .def_readwrite("gamma", &GLParams::gamma)
        .def_readwrite("alpha", &GLParams::alpha)
        .def_readwrite("beta", &GLParams::beta)
        .def_readwrite("rho", &GLParams::rho)
        .def_readwrite("K0", &GLParams::K0)
        .def_readwrite("magnetic", &GLParams::magnetic)
        .def_readwrite("K", &GLParams::K)
        .def_readwrite("K2", &GLParams::K2)
        .def_readwrite("line_shift", &GLParams::line_shift)
        .def_readwrite("line_axis", &GLParams::line_axis)
        .def_readwrite("linear_tol", &GLParams::linear_tol)
        .def_readwrite("max_krylov", &GLParams::max_krylov)
        .def_readwrite("outer_tol", &GLParams::outer_tol)
        .def_readwrite("max_outer", &GLParams::max_outer)
        .def_readwrite("damping", &GLParams::damping)
        .def("validate", &GLParams::validate, py::arg("certificate") = false)
        .def("satisfies_dual_bound", &GLParams::satisfies_dual_bound);

    m.def("select_K", &select_K, py::arg("alpha"), py::arg("K2"));
    m.def("amplitude_bound", &amplitude_bound, py::arg("sup_phi"), py::arg("beta"));
    m.def("bump_envelope", &cli::bump_envelope, py::arg("x"), py::arg("y"), py::arg("z"));
    m.def(
        "double_well_conjugate",
        [](double s, double alpha, double beta, double K) {
            const auto c = double_well_conjugate(s, alpha, beta, K);
            return py::make_tuple(c.value, c.argmax);
        },
        py::arg("s"), py::arg("alpha"), py::arg("beta"), py::arg("K"));

    m.def(
        "scalar_nodes",
        [](int cells, int dim) {
            const BoxGrid g = scalar_grid(dim, cells);
            Eigen::MatrixXd x(g.size(), dim);
            for (int q = 0; q < g.size(); ++q)
                for (int a = 0; a < dim; ++a) x(q, a) = g.position(q)[a];
            return x;
        },
        py::arg("cells"), py::arg("dim") = 1, "Node coordinates of the scalar grid, x fastest.");
    m.def(
        "scalar_energy",
        [](const VectorXd &u, const VectorXd &f, const GLParams &p, int cells, int dim) {
            const BoxGrid g = scalar_grid(dim, cells);
            return scalar_energy(wrap(g, u, "u"), wrap(g, f, "f"), p);
        },
        py::arg("u"), py::arg("f"), py::arg("params"), py::arg("cells"), py::arg("dim") = 1);
    m.def(
        "solve_scalar",
        [](const VectorXd &f, const GLParams &p, int cells, int dim, int starts, std::uint64_t seed) {
            const BoxGrid g = scalar_grid(dim, cells);
            const auto runs = multistart_scalar(wrap(g, f, "f"), p, starts, seed);
            py::list out;
            for (const auto &r : runs) {
                py::dict d;
                d["u"] = r.u.values;
                d["energy"] = r.energy;
                d["residual"] = r.residual;
                d["iterations"] = r.iterations;
                out.append(d);
            }
            return out;
        },
        py::arg("f"), py::arg("params"), py::arg("cells"), py::arg("dim") = 1, py::arg("starts") = 4,
        py::arg("seed") = 1, "Converged Newton runs sorted by energy.");
    m.def(
        "certify_scalar",
        [](const VectorXd &u, const VectorXd &f, const GLParams &p, int cells, int dim, double tol) {
            const BoxGrid g = scalar_grid(dim, cells);
            return certificate_dict(certify_scalar(wrap(g, u, "u"), wrap(g, f, "f"), p, tol));
        },
        py::arg("u"), py::arg("f"), py::arg("params"), py::arg("cells"), py::arg("dim") = 1,
        py::arg("residual_tol") = 1e-9);

    m.def(
        "solve_gl",
        [](int inner_cells, int outer_cells, double B0, const GLParams &p, const std::string &envelope,
           bool certify) {
            GLDomain domain(NestedGrid::centered(inner_cells, outer_cells));
            const auto field = cli::builtin_envelope(cli::parse_envelope(envelope), domain.outer(), B0);
            OuterResult r;
            {
                py::gil_scoped_release release;
                r = run_outer(domain, default_start(domain, p), field, p);
            }
            py::dict d;
            const auto &n = domain.omega().nodes();
            d["shape"] = py::make_tuple(n[0], n[1], n[2]);
            const auto &n1 = domain.outer().nodes();
            d["outer_shape"] = py::make_tuple(n1[0], n1[1], n1[2]);
            d["phi"] = r.fields.phi.values;
            d["A"] = r.fields.A.stacked();
            d["termination"] = to_string(r.report.reason);
            d["iterations"] = r.report.iterations();
            std::vector<double> energies;
            for (const auto &rec : r.report.records) energies.push_back(rec.energy);
            d["energies"] = energies;
            if (certify) {
                GLParams q = p;
                q.K2 = amplitude_bound(std::sqrt(r.fields.phi.modulus_squared().maxCoeff()), p.beta);
                q.K = select_K(p.alpha, q.K2);
                d["certificate"] = certificate_dict(certify_gl(domain, r.fields.phi, r.fields.A, field, q));
            }
            return d;
        },
        py::arg("inner_cells"), py::arg("outer_cells"), py::arg("B0"), py::arg("params"),
        py::arg("envelope") = "paper-envelope", py::arg("certify") = false,
        "Outer iteration from the uniform state; arrays are flat with x fastest.");

    m.def(
        "run_config",
        [](const std::string &text, const std::string &command, const std::string &out) {
            cli::RunConfig c = cli::parse_config(text);
            const auto cmd = cli::parse_command(command);
            if (!cmd) throw std::invalid_argument("unknown command '" + command + "'");
            c.command = *cmd;
            if (!out.empty()) c.out = out;
            std::ostringstream summary;
            const int code = cli::run_command(c, summary);
            return py::make_tuple(code, summary.str());
        },
        py::arg("text"), py::arg("command"), py::arg("out") = "",
        "Runs a command from INI text; returns (exit status, summary).");
}
