#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "llgblow/evolve.hpp"
#include "llgblow/geometry.hpp"
#include "llgblow/linops.hpp"
#include "llgblow/nonlocal.hpp"
#include "llgblow/reduced.hpp"
#include "llgblow/spectral.hpp"
#include "llgblow/verify.hpp"

namespace py = pybind11;
using namespace llgblow;

PYBIND11_MODULE(_llgblow, m) {
    m.doc() = "numerical toolkit for equivariant LLG bubble dynamics and type-II blow-up";

    py::register_exception<domain_error>(m, "DomainError");
    py::register_exception<convergence_error>(m, "ConvergenceError");

    py::class_<PhysParams>(m, "PhysParams")
        .def(py::init<double, double>(), py::arg("a"), py::arg("b"))
        .def_readonly("a", &PhysParams::a)
        .def_readonly("b", &PhysParams::b)
        .def("__repr__", [](const PhysParams& p) {
            return "PhysParams(a=" + std::to_string(p.a) + ", b=" + std::to_string(p.b) + ")";
        });

    py::class_<BubbleParams>(m, "BubbleParams")
        .def(py::init<double, double, Vec2>(), py::arg("lam"), py::arg("gamma"), py::arg("xi"))
        .def_readwrite("lam", &BubbleParams::lambda)
        .def_readwrite("gamma", &BubbleParams::gamma)
        .def_readwrite("xi", &BubbleParams::xi);

    // geometry
    m.def("profile_w", [](double rho) {
        const auto p = geometry::profile_w(rho);
        return py::make_tuple(p.w, p.w_rho, p.sin_w, p.cos_w);
    }, py::arg("rho"));
    m.def("bubble_frame", [](const Vec2& y) {
        const auto f = geometry::bubble_frame(y);
        py::dict d;
        d["W"] = f.W;
        d["E1"] = f.E1;
        d["E2"] = f.E2;
        d["w"] = f.w;
        d["w_rho"] = f.w_rho;
        d["grad_sq"] = f.grad_sq;
        return d;
    }, py::arg("y"));
    m.def("rotate_z", &geometry::rotate_z, py::arg("gamma"), py::arg("v"));
    m.def("bubble_field", &geometry::bubble_field, py::arg("params"), py::arg("x"));
    m.def("ustar_sum", &geometry::ustar_sum, py::arg("bubbles"), py::arg("x"),
          py::arg("strict") = false);
    m.def("corrector_A", &geometry::corrector_A, py::arg("ustar"), py::arg("phi"));
    m.def("assemble_u", &geometry::assemble_u, py::arg("bubbles"), py::arg("phi"), py::arg("x"));

    // linops
    m.def("vector_kernel", &linops::vector_kernel, py::arg("p"), py::arg("q"), py::arg("y"));
    m.def("potential_V", &linops::potential_V, py::arg("k"), py::arg("rho"));
    m.def("scalar_kernel", [](int k, double rho, int which, int deriv) {
        const auto pair = linops::scalar_kernels(k);
        if (which == 1) return deriv ? pair.z1_prime(rho) : pair.z1(rho);
        return deriv ? pair.z2_prime(rho) : pair.z2(rho);
    }, py::arg("k"), py::arg("rho"), py::arg("which") = 1, py::arg("deriv") = 0);
    m.def("kernel_wronskian", [](int k, double rho) {
        return linops::scalar_kernels(k).wronskian(rho);
    }, py::arg("k"), py::arg("rho"));

    // nonlocal
    py::class_<nonlocal::ParamHistory>(m, "ParamHistory")
        .def_static("rate_ansatz", &nonlocal::ParamHistory::rate_ansatz, py::arg("T"),
                    py::arg("gamma0") = 0.0, py::arg("xi") = Vec2{0.0, 0.0})
        .def_static("load_csv", &nonlocal::ParamHistory::load_csv, py::arg("path"))
        .def_static("from_samples",
                    [](std::vector<double> t, std::vector<complexd> p, std::vector<Vec2> xi) {
                        return nonlocal::ParamHistory(std::move(t), std::move(p), std::move(xi));
                    })
        .def("p", &nonlocal::ParamHistory::p)
        .def("pdot", &nonlocal::ParamHistory::pdot)
        .def("xi", &nonlocal::ParamHistory::xi)
        .def("xidot", &nonlocal::ParamHistory::xidot)
        .def_property_readonly("t_min", &nonlocal::ParamHistory::t_min)
        .def_property_readonly("t_max", &nonlocal::ParamHistory::t_max);

    m.def("kernel_K0", &nonlocal::kernel_K0, py::arg("zeta"), py::arg("pp"), py::arg("order") = 0);
    m.def("profile_q0", &nonlocal::profile_q0, py::arg("xi"), py::arg("pp"));
    m.def("phi0_eval", [](double z, double t, const nonlocal::ParamHistory& h, const PhysParams& pp) {
        const auto s = nonlocal::phi0_eval(z, t, h, pp);
        py::dict d;
        d["Phi0"] = s.Phi0;
        d["dz"] = s.dz;
        d["dzz"] = s.dzz;
        return d;
    }, py::arg("z"), py::arg("t"), py::arg("history"), py::arg("pp"));
    m.def("phi0_star_field", &nonlocal::phi0_star_field, py::arg("x"), py::arg("t"),
          py::arg("history"), py::arg("pp"));
    m.def("residual_Sj", &nonlocal::residual_Sj, py::arg("x"), py::arg("t"), py::arg("history"),
          py::arg("pp"), py::arg("h_rel") = 1e-4);

    // spectral
    py::class_<spectral::SpectralProblem>(m, "SpectralProblem")
        .def(py::init<>())
        .def_readwrite("k", &spectral::SpectralProblem::k)
        .def_readwrite("R", &spectral::SpectralProblem::R)
        .def_readwrite("n", &spectral::SpectralProblem::n);
    m.def("principal_eigenvalue", [](int k, double R) {
        spectral::SpectralProblem prob;
        prob.k = k;
        prob.R = R;
        const auto e = spectral::principal_eigenvalue(prob);
        py::dict d;
        d["lambda_min"] = e.lambda_min;
        d["residual"] = e.residual;
        d["iterations"] = e.iterations;
        return d;
    }, py::arg("k"), py::arg("R"));
    m.def("heat_kernel_gamma", &spectral::heat_kernel_gamma, py::arg("d"), py::arg("x"),
          py::arg("t"), py::arg("pp"));
    m.def("distorted_eigenfunction", [](double xi, const std::vector<double>& rho) {
        return spectral::distorted_eigenfunction(xi, rho).values;
    }, py::arg("xi"), py::arg("rho"));

    // reduced
    m.def("moment_table", [](double tol) {
        py::list rows;
        for (const auto& r : reduced::moment_table(tol))
            rows.append(py::make_tuple(r.name, r.computed, r.expected));
        return rows;
    }, py::arg("tol") = 1e-10);
    m.def("b0_apply", &reduced::b0_apply, py::arg("history"), py::arg("t"), py::arg("lambda_t"));
    m.def("p0_value", &reduced::p0_value, py::arg("T"), py::arg("kappa"), py::arg("t"));
    m.def("p0_dot", &reduced::p0_dot, py::arg("T"), py::arg("kappa"), py::arg("t"));

    py::class_<reduced::GluingParams>(m, "GluingParams")
        .def(py::init([](double Theta, double beta, double sigma0, double delta0, double nu, double l,
                         double alpha, double alpha0) {
                 return reduced::GluingParams{Theta, beta, sigma0, delta0, nu, l, alpha, alpha0};
             }),
             py::arg("Theta"), py::arg("beta"), py::arg("sigma0"), py::arg("delta0"), py::arg("nu"),
             py::arg("l"), py::arg("alpha"), py::arg("alpha0"))
        .def_readwrite("Theta", &reduced::GluingParams::Theta)
        .def_readwrite("beta", &reduced::GluingParams::beta)
        .def_readwrite("sigma0", &reduced::GluingParams::sigma0)
        .def_readwrite("delta0", &reduced::GluingParams::delta0)
        .def_readwrite("nu", &reduced::GluingParams::nu)
        .def_readwrite("l", &reduced::GluingParams::l)
        .def_readwrite("alpha", &reduced::GluingParams::alpha)
        .def_readwrite("alpha0", &reduced::GluingParams::alpha0)
        .def_property_readonly("m", &reduced::GluingParams::m);
    m.def("param_feasible", [](const reduced::GluingParams& g) {
        const auto r = reduced::param_feasible(g);
        return py::make_tuple(r.feasible, r.violations);
    }, py::arg("params"));
    m.def("sample_solution_box", &reduced::sample_solution_box, py::arg("u"));

    // evolve
    py::class_<evolve::SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("pp", &evolve::SimConfig::pp)
        .def_readwrite("r_outer", &evolve::SimConfig::r_outer)
        .def_readwrite("n_nodes", &evolve::SimConfig::n_nodes)
        .def_readwrite("cfl", &evolve::SimConfig::cfl)
        .def_readwrite("renormalize", &evolve::SimConfig::renormalize)
        .def_readwrite("t_max", &evolve::SimConfig::t_max)
        .def_readwrite("lambda_stop", &evolve::SimConfig::lambda_stop)
        .def_readwrite("diag_stride", &evolve::SimConfig::diag_stride);
    py::class_<evolve::SimState>(m, "SimState")
        .def_readonly("t", &evolve::SimState::t)
        .def_readonly("r", &evolve::SimState::r)
        .def_readonly("v", &evolve::SimState::v)
        .def_readonly("steps", &evolve::SimState::steps);
    m.def("initial_twisted_bubble", &evolve::initial_twisted_bubble, py::arg("cfg"),
          py::arg("lambda0"), py::arg("twist"), py::arg("interior_delta") = 0.0);
    m.def("initial_bubble", &evolve::initial_bubble, py::arg("cfg"), py::arg("lam"));
    m.def("step", &evolve::step, py::arg("state"), py::arg("cfg"));
    m.def("energy", &evolve::energy, py::arg("state"));
    m.def("lambda_estimate", &evolve::lambda_estimate, py::arg("state"));
    m.def("run_and_fit", [](const evolve::SimConfig& cfg, const evolve::SimState& st) {
        const auto d = evolve::run_and_fit(cfg, st);
        py::dict out;
        py::list samples;
        for (const auto& s : d.samples)
            samples.append(py::make_tuple(s.t, s.lambda_est, s.energy, s.max_grad));
        out["samples"] = samples;
        out["blew_up"] = d.blew_up;
        if (d.fit) {
            out["T_est"] = d.fit->T_est;
            out["exponent"] = d.fit->exponent;
            out["prefactor"] = d.fit->prefactor;
        }
        return out;
    }, py::arg("cfg"), py::arg("state"));

    m.def("verify", [](unsigned seed) {
        const auto r = verify::run_all(seed);
        return py::make_tuple(r.failures, r.text);
    }, py::arg("seed") = 1);
}
