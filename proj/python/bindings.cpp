#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "rou/errors.hpp"
#include "rou/estimate.hpp"
#include "rou/model.hpp"
#include "rou/simulate.hpp"
#include "rou/specfun.hpp"
#include "rou/spectral.hpp"

namespace py = pybind11;
using namespace rou;

PYBIND11_MODULE(_rou_gmm, m) {
    m.doc() = "Generalized-moment estimation for the reflected Ornstein-Uhlenbeck process";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);

    m.def("hermite", &specfun::hermite, py::arg("nu"), py::arg("x"));

    py::class_<ROUParams>(m, "ROUParams")
        .def(py::init([](double kappa, double theta, double sigma) { return ROUParams{kappa, theta, sigma}; }),
             py::arg("kappa") = 1.0, py::arg("theta") = 1.0, py::arg("sigma") = 0.5)
        .def_readwrite("kappa", &ROUParams::kappa)
        .def_readwrite("theta", &ROUParams::theta)
        .def_readwrite("sigma", &ROUParams::sigma)
        .def("__repr__", [](const ROUParams& p) {
            return "ROUParams(kappa=" + std::to_string(p.kappa) + ", theta=" + std::to_string(p.theta) +
                   ", sigma=" + std::to_string(p.sigma) + ")";
        });

    m.def("to_uv", [](const ROUParams& p) {
        const ReparamUV q = to_uv(p);
        return py::make_tuple(q.u, q.v, q.sigma);
    });
    m.def("from_uv", [](double u, double v, double sigma) { return from_uv(ReparamUV{u, v, sigma}); }, py::arg("u"),
          py::arg("v"), py::arg("sigma"));
    m.def("g1", &g1, py::arg("u"), py::arg("v"));
    m.def("g2", &g2, py::arg("u"), py::arg("v"));
    m.def("invariant_density", py::overload_cast<double, double, double>(&invariant_density), py::arg("u"),
          py::arg("v"), py::arg("x"));

    py::class_<UVSolution>(m, "UVSolution")
        .def_readonly("u", &UVSolution::u)
        .def_readonly("v", &UVSolution::v)
        .def_readonly("iterations", &UVSolution::iterations)
        .def_readonly("residual", &UVSolution::residual);
    m.def("solve_uv", &solve_uv, py::arg("m1"), py::arg("m2"));

    py::class_<SpectralBasis>(m, "SpectralBasis")
        .def_static("build", [](double u, double v, int truncation) {
            SpectralOptions opts;
            opts.truncation = truncation;
            return SpectralBasis::build(u, v, opts);
        }, py::arg("u"), py::arg("v"), py::arg("truncation") = 12)
        .def_property_readonly("u", &SpectralBasis::u)
        .def_property_readonly("v", &SpectralBasis::v)
        .def_property_readonly("size", &SpectralBasis::size)
        .def_property_readonly("lambdas_tilde", [](const SpectralBasis& b) {
            return std::vector<double>(b.lambdas_tilde().begin(), b.lambdas_tilde().end());
        })
        .def_property_readonly("orders", [](const SpectralBasis& b) {
            return std::vector<double>(b.orders().begin(), b.orders().end());
        })
        .def("g3", [](const SpectralBasis& b, double sigma, double h) { return g3(b, sigma, h); }, py::arg("sigma"),
             py::arg("h"))
        .def("dg3_dsigma2", [](const SpectralBasis& b, double sigma, double h) { return dg3_dsigma2(b, sigma, h); },
             py::arg("sigma"), py::arg("h"))
        .def("transition_density",
             [](const SpectralBasis& b, double sigma, double h, double x, double y) {
                 return transition_density(b, sigma, h, x, y);
             },
             py::arg("sigma"), py::arg("h"), py::arg("x"), py::arg("y"));

    m.def("simulate_path",
          [](const ROUParams& p, std::size_t n, double h, int substeps, std::uint64_t seed, std::optional<double> x0) {
              SimConfig cfg;
              cfg.n = n;
              cfg.h = h;
              cfg.substeps = substeps;
              cfg.seed = seed;
              cfg.x0 = x0;
              py::gil_scoped_release release;
              return simulate_path(p, cfg).values;
          },
          py::arg("params"), py::arg("n"), py::arg("h") = 0.5, py::arg("substeps") = 200, py::arg("seed") = 1,
          py::arg("x0") = py::none());

    py::class_<EstimationResult>(m, "EstimationResult")
        .def_readonly("theta_hat", &EstimationResult::theta_hat)
        .def_readonly("kappa_hat", &EstimationResult::kappa_hat)
        .def_readonly("sigma_hat", &EstimationResult::sigma_hat)
        .def_readonly("u_hat", &EstimationResult::u_hat)
        .def_readonly("v_hat", &EstimationResult::v_hat)
        .def_readonly("sigma_c_hat", &EstimationResult::sigma_c_hat)
        .def_readonly("residual_uv", &EstimationResult::residual_uv)
        .def_readonly("residual_sigma", &EstimationResult::residual_sigma)
        .def_readonly("truncation_tail", &EstimationResult::truncation_tail)
        .def_readonly("sigma_at_boundary", &EstimationResult::sigma_at_boundary);
    m.def("estimate_all",
          [](const std::vector<double>& values, double h, double sigma_lo, double sigma_hi, int truncation) {
              py::gil_scoped_release release;
              return estimate_all(values, h, SigmaInterval{sigma_lo, sigma_hi}, truncation);
          },
          py::arg("values"), py::arg("h") = 0.5, py::arg("sigma_lo") = 0.05, py::arg("sigma_hi") = 5.0,
          py::arg("truncation") = 12);
    m.def("sigma_c", [](const std::vector<double>& values, double h) { return sigma_c(values, h); },
          py::arg("values"), py::arg("h") = 0.5);
}
