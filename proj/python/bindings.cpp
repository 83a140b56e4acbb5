#include <cmath>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmlab/config.hpp"
#include "pmlab/cone_pde.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/experiments.hpp"
#include "pmlab/hitting.hpp"
#include "pmlab/isaacs.hpp"
#include "pmlab/nonlinear_expectation.hpp"
#include "pmlab/parallel.hpp"

namespace py = pybind11;
using namespace pmlab;

namespace {

SampledPath make_path(std::vector<double> times, std::vector<double> values, int dim) {
    if (times.empty()) throw DimensionError("path: no knots");
    const double t0 = times.front(), t1 = times.back();
    return SampledPath(dim, t0, t1, std::move(times), std::move(values));
}

// params is a YAML (or JSON) mapping with the same keys as the CLI config tables
std::string run_experiment(const std::string& name, const std::string& params, std::uint64_t seed) {
    const auto cfg = parse_config("params: " + (params.empty() ? std::string("{}") : params), "<python>");
    const auto& s = cfg.params;
    Json j;
    py::gil_scoped_release release;
    if (name == "cone_example") {
        j = cone_example(read_cone_params(s));
    } else if (name == "markov_restart") {
        auto p = read_restart_params(s);
        p.seed = seed;
        j = markov_restart_suite(p);
    } else if (name == "regularity") {
        auto p = read_regularity_params(s);
        p.seed = seed;
        j = hitting_regularity(p);
    } else if (name == "tails") {
        auto p = read_tail_params(s);
        p.seed = seed;
        j = hitting_tails(p);
    } else if (name == "oracle_equivalence") {
        auto p = read_oracle_params(s);
        p.seed = seed;
        j = oracle_equivalence(p);
    } else if (name == "nonlinear_1d") {
        auto p = read_nonlin_params(s);
        p.seed = seed;
        j = nonlinear_1d(p);
    } else if (name == "cascade") {
        auto p = read_cascade_params(s);
        p.seed = seed;
        j = cascade_heat(p);
    } else if (name == "comparison") {
        auto p = read_comparison_params(s);
        p.seed = seed;
        j = cascade_comparison(p);
    } else if (name == "shjb") {
        auto p = read_shjb_params(s);
        p.seed = seed;
        j = shjb_checks(p);
    } else if (name == "isaacs") {
        auto p = read_isaacs_params(s);
        p.seed = seed;
        j = isaacs_checks(p);
    } else {
        throw ConfigurationError("unknown experiment '" + name + "'");
    }
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pmlab core";

    py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    m.def("set_workers", &set_worker_count, py::arg("n"));
    m.def("workers", &worker_count);

    m.def(
        "hit_cone",
        [](std::vector<double> times, std::vector<double> values, int dim, double t, std::vector<double> x,
           double R, double L1, double T) {
            const auto path = make_path(std::move(times), std::move(values), dim);
            const auto r = hit_cone(path, t, x, R, L1, T);
            return py::make_tuple(r.time, r.kind == HitKind::lateral ? "lateral" : "terminal", r.location);
        },
        py::arg("times"), py::arg("values"), py::arg("dim"), py::arg("t"), py::arg("x"), py::arg("R"),
        py::arg("L1"), py::arg("T"));

    m.def(
        "hitting_sequence",
        [](std::vector<double> times, std::vector<double> values, int dim, double epsilon, double L1) {
            const auto path = make_path(std::move(times), std::move(values), dim);
            const auto pi = hitting_sequence(path, epsilon, L1);
            std::vector<double> hits;
            for (const auto& p : pi.points) hits.push_back(p.time);
            return py::make_tuple(hits, pi.terminal);
        },
        py::arg("times"), py::arg("values"), py::arg("dim"), py::arg("epsilon"), py::arg("L1"));

    m.def(
        "markov_restart_check",
        [](std::vector<double> times, std::vector<double> values, int dim, double t, std::vector<double> x,
           double R, double L1, double T, double tau) {
            const auto path = make_path(std::move(times), std::move(values), dim);
            return markov_restart_check(path, t, x, ConeSpec{path.t_start(), R, L1, T}, tau);
        },
        py::arg("times"), py::arg("values"), py::arg("dim"), py::arg("t"), py::arg("x"), py::arg("R"),
        py::arg("L1"), py::arg("T"), py::arg("tau"));

    // Value at the apex of a 1-d cone for boundary data h(s, x).
    m.def(
        "cone_apex",
        [](const std::function<double(double, double)>& h, double epsilon, double L1, double dx,
           const std::string& generator, double L) {
            Generator g;
            if (generator == "zero") g = zero_generator();
            else if (generator == "heat") g = heat_generator();
            else if (generator == "upper") g = make_upper_bounding(L, 0.0);
            else if (generator == "lower") g = make_lower_bounding(L, 0.0);
            else throw ConfigurationError("cone_apex: generator must be zero, heat, upper or lower");
            const ConeSpec spec{0.0, epsilon, L1, 1.0};
            const BoundaryData b = [&](double s, const Vec& x) { return h(s, x(0)); };
            return solve_cone(g, ConeGrid::make(spec, 1, dx, g), b, false).apex();
        },
        py::arg("h"), py::arg("epsilon"), py::arg("L1"), py::arg("dx"), py::arg("generator") = "zero",
        py::arg("L") = 1.0);

    m.def(
        "hjb_oracle_1d",
        [](const std::function<double(double)>& terminal, double L, double T, double lo, double hi,
           std::size_t nodes, std::size_t steps) {
            const Grid1d grid{lo, hi, nodes};
            if (steps == 0) {
                const double dx = grid.step();
                steps = std::size_t(std::ceil(T / (dx * dx / (L * (2.0 + dx)))));
            }
            return hjb_oracle_1d(terminal, L, T, grid, steps);
        },
        py::arg("terminal"), py::arg("L"), py::arg("T"), py::arg("lo") = -6.0, py::arg("hi") = 6.0,
        py::arg("nodes") = 601, py::arg("steps") = 0);

    m.def(
        "isaacs_gap",
        [](std::vector<std::vector<double>> payoff, double sigma, std::size_t points, std::uint64_t seed) {
            const auto game = matrix_game(std::move(payoff), sigma, 1.0);
            return isaacs_condition_check(game, random_isaacs_points(points, 1.0, seed)).max_gap;
        },
        py::arg("payoff"), py::arg("sigma") = 1.0, py::arg("points") = 32, py::arg("seed") = 1);

    m.def("run_experiment", &run_experiment, py::arg("name"), py::arg("params") = "", py::arg("seed") = 1);
}
