#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shadowcorr/bivariate.hpp"
#include "shadowcorr/errors.hpp"
#include "shadowcorr/gaussian.hpp"
#include "shadowcorr/mapping.hpp"
#include "shadowcorr/montecarlo.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace shadowcorr;

namespace {

ShadowingCorrelation corr(double r) { return ShadowingCorrelation(r); }

SimConfig make_config(std::uint64_t n_samples, std::uint64_t seed, const std::string& method,
                      std::uint64_t batch_count, unsigned threads) {
    SimConfig config;
    config.n_samples = n_samples;
    config.seed = seed;
    config.method = parse_sim_method(method);
    config.batch_count = batch_count;
    config.threads = threads;
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Shadowing cross-correlation to failure-event correlation for dual links";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
    py::register_exception<UnattainableCorrelationError>(m, "UnattainableCorrelationError",
                                                         PyExc_ValueError);
    py::register_exception<InsufficientEventsError>(m, "InsufficientEventsError",
                                                    PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("normal_pdf", &normal_pdf, py::arg("x"));
    m.def("q_function", &q_function, py::arg("x"), "P(Z > x) for a standard normal Z.");
    m.def("q_inverse", &q_inverse, py::arg("p"));

    py::enum_<OrthantMethod>(m, "OrthantMethod")
        .value("single_integral", OrthantMethod::single_integral)
        .value("second_method", OrthantMethod::second_method)
        .value("closed_form_degenerate", OrthantMethod::closed_form_degenerate);

    py::class_<OrthantProbability>(m, "OrthantProbability")
        .def_readonly("value", &OrthantProbability::value)
        .def_readonly("method", &OrthantProbability::method)
        .def_readonly("abs_error_bound", &OrthantProbability::abs_error_bound);

    m.def("upper_tail", [](double b1, double b2, double r) { return upper_tail(b1, b2, corr(r)); },
          py::arg("b1"), py::arg("b2"), py::arg("rho_h"));
    m.def("upper_tail_single_integral",
          [](double b1, double b2, double r) { return upper_tail_single_integral(b1, b2, corr(r)); },
          py::arg("b1"), py::arg("b2"), py::arg("rho_h"));
    m.def("upper_tail_second_method",
          [](double b1, double b2, double r) { return upper_tail_second_method(b1, b2, corr(r)); },
          py::arg("b1"), py::arg("b2"), py::arg("rho_h"));

    py::class_<LinkBudget>(m, "LinkBudget")
        .def(py::init([](double p_t, double p_l, double p_th, double sigma) {
                 return LinkBudget{p_t, p_l, p_th, sigma};
             }),
             py::arg("p_t_dbm"), py::arg("p_l_db"), py::arg("p_th_dbm"), py::arg("sigma_db"))
        .def_readwrite("p_t_dbm", &LinkBudget::p_t_dbm)
        .def_readwrite("p_l_db", &LinkBudget::p_l_db)
        .def_readwrite("p_th_dbm", &LinkBudget::p_th_dbm)
        .def_readwrite("sigma_db", &LinkBudget::sigma_db);

    py::class_<LinkReliability>(m, "LinkReliability")
        .def_readonly("beta", &LinkReliability::beta)
        .def_readonly("epsilon", &LinkReliability::epsilon)
        .def_readonly("reliability", &LinkReliability::reliability);

    py::class_<CorrelationResult>(m, "CorrelationResult")
        .def_readonly("rho", &CorrelationResult::rho)
        .def_readonly("joint_failure", &CorrelationResult::joint_failure)
        .def_readonly("sigma_ind1", &CorrelationResult::sigma_ind1)
        .def_readonly("sigma_ind2", &CorrelationResult::sigma_ind2);

    m.def("normalized_margin", &normalized_margin, py::arg("budget"));
    m.def("link_reliability", &link_reliability, py::arg("beta"));
    m.def("link_from_epsilon", &link_from_epsilon, py::arg("epsilon"));
    m.def("indicator_sigma", &indicator_sigma, py::arg("epsilon"));

    m.def(
        "event_correlation",
        [](double eps1, double eps2, double r) {
            return event_correlation(DualLinkScenario::from_epsilons(eps1, eps2, corr(r)));
        },
        py::arg("eps1"), py::arg("eps2"), py::arg("rho_h"));
    m.def(
        "event_correlation_beta",
        [](double b1, double b2, double r) {
            return event_correlation(DualLinkScenario::from_betas(b1, b2, corr(r)));
        },
        py::arg("beta1"), py::arg("beta2"), py::arg("rho_h"));
    m.def(
        "invert_correlation",
        [](double rho, double eps1, double eps2) { return invert_correlation(rho, eps1, eps2).value(); },
        py::arg("rho"), py::arg("eps1"), py::arg("eps2"));
    m.def(
        "dual_failure_probability",
        [](double eps1, double eps2, double r) {
            return dual_failure_probability(DualLinkScenario::from_epsilons(eps1, eps2, corr(r)));
        },
        py::arg("eps1"), py::arg("eps2"), py::arg("rho_h"));
    m.def("max_event_correlation", &max_event_correlation, py::arg("eps1"), py::arg("eps2"));
    m.def("table_one", [] {
        std::vector<std::pair<double, double>> rows;
        for (const TableRow& row : table_one()) rows.emplace_back(row.rho_h, row.rho);
        return rows;
    });

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("estimate", &McEstimate::estimate)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("n_samples", &McEstimate::n_samples)
        .def_property_readonly("method", [](const McEstimate& e) { return std::string(to_string(e.method)); });

    m.def(
        "estimate_joint_failure",
        [](double b1, double b2, double r, std::uint64_t n, std::uint64_t seed,
           const std::string& method, std::uint64_t batches, unsigned threads) {
            const SimConfig config = make_config(n, seed, method, batches, threads);
            py::gil_scoped_release release;
            return estimate_joint_failure(b1, b2, corr(r), config);
        },
        py::arg("b1"), py::arg("b2"), py::arg("rho_h"), py::arg("n_samples") = 1'000'000,
        py::arg("seed") = 1, py::arg("method") = "plain", py::arg("batch_count") = 64,
        py::arg("threads") = 0);
    m.def(
        "estimate_event_correlation",
        [](double b1, double b2, double r, std::uint64_t n, std::uint64_t seed,
           std::uint64_t batches, unsigned threads) {
            const SimConfig config = make_config(n, seed, "plain", batches, threads);
            py::gil_scoped_release release;
            return estimate_event_correlation(b1, b2, corr(r), config);
        },
        py::arg("b1"), py::arg("b2"), py::arg("rho_h"), py::arg("n_samples") = 1'000'000,
        py::arg("seed") = 1, py::arg("batch_count") = 64, py::arg("threads") = 0);

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
