#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "unireg/ase.hpp"
#include "unireg/harness.hpp"
#include "unireg/regulator.hpp"
#include "unireg/trajectory.hpp"
#include "unireg/tuners.hpp"

namespace py = pybind11;
using namespace unireg;

namespace {

using PyCost = std::function<double(std::vector<double>)>;

CostOracle wrap(const PyCost& fn) {
    return CostOracle([fn](std::span<const double> p) {
        return fn(std::vector<double>(p.begin(), p.end()));
    });
}

/// Column arrays for one episode log.
py::dict log_columns(const EpisodeLog& log) {
    const auto n = static_cast<py::ssize_t>(log.size());
    py::array_t<std::int64_t> k(n);
    py::array_t<double> t(n), r(n), x(n), u(n), e(n), K(n), N(n);
    auto kk = k.mutable_unchecked<1>();
    auto tt = t.mutable_unchecked<1>(), rr = r.mutable_unchecked<1>(), xx = x.mutable_unchecked<1>();
    auto uu = u.mutable_unchecked<1>(), ee = e.mutable_unchecked<1>();
    auto KK = K.mutable_unchecked<1>(), NN = N.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < n; ++i) {
        const auto& rec = log.records[static_cast<std::size_t>(i)];
        kk(i) = rec.k;
        tt(i) = rec.t;
        rr(i) = rec.r;
        xx(i) = rec.x;
        uu(i) = rec.u;
        ee(i) = rec.e;
        KK(i) = rec.K;
        NN(i) = rec.N;
    }
    py::dict out;
    out["episode"] = log.episode;
    out["k"] = k;
    out["t"] = t;
    out["r"] = r;
    out["x"] = x;
    out["u"] = u;
    out["e"] = e;
    out["K"] = K;
    out["N"] = N;
    return out;
}

TrajectorySpec make_trajectory(const std::string& kind, double period, double sample_period,
                               double amplitude, std::uint64_t seed, bool normalized,
                               std::vector<double> samples) {
    const auto parsed = parse_trajectory_kind(kind);
    if (!parsed) {
        throw std::invalid_argument("unknown trajectory kind '" + kind + "'");
    }
    switch (*parsed) {
        case TrajectoryKind::Rectangular:
            return TrajectorySpec::rectangular(period, sample_period, amplitude);
        case TrajectoryKind::Versine:
            return TrajectorySpec::versine(period, sample_period, amplitude, normalized);
        case TrajectoryKind::RandomSteps:
            return TrajectorySpec::random_steps(period, sample_period, amplitude, seed);
        case TrajectoryKind::RandomVersine:
            return TrajectorySpec::random_versine(period, sample_period, amplitude, seed, normalized);
        case TrajectoryKind::Arbitrary:
            return TrajectorySpec::arbitrary(std::move(samples), sample_period);
    }
    throw std::invalid_argument("unknown trajectory kind");
}

}  // namespace

PYBIND11_MODULE(_unireg, m) {
    m.doc() = "Unidirectional regulator simulation and gain tuning";

    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
    py::register_exception<IterationLimitError>(m, "IterationLimitError", PyExc_RuntimeError);

    py::class_<PlantParams>(m, "PlantParams")
        .def(py::init([](double a, double b, double c, double f, double T) {
                 PlantParams p{a, b, c, f, T};
                 p.validate();
                 return p;
             }),
             py::arg("a") = 0.98195, py::arg("b") = 0.00042345, py::arg("c") = 1.0,
             py::arg("f") = 0.98195, py::arg("T") = 0.1)
        .def_readwrite("a", &PlantParams::a)
        .def_readwrite("b", &PlantParams::b)
        .def_readwrite("c", &PlantParams::c)
        .def_readwrite("f", &PlantParams::f)
        .def_readwrite("T", &PlantParams::T);

    py::class_<RegulatorGains>(m, "RegulatorGains")
        .def(py::init([](double K, double N) {
                 RegulatorGains g{K, N};
                 g.validate();
                 return g;
             }),
             py::arg("K") = 0.0, py::arg("N") = 0.0)
        .def_readwrite("K", &RegulatorGains::K)
        .def_readwrite("N", &RegulatorGains::N)
        .def("__repr__", [](const RegulatorGains& g) {
            return "RegulatorGains(K=" + std::to_string(g.K) + ", N=" + std::to_string(g.N) + ")";
        });

    m.def("plant_step",
          [](const PlantParams& p, double x, double u) { return plant_step(p, {x, 0}, u).x; },
          py::arg("params"), py::arg("x"), py::arg("u"));
    m.def("control_output", &control_output, py::arg("gains"), py::arg("error"),
          py::arg("reference"));
    m.def("feedforward_offset", &feedforward_offset, py::arg("params"));
    m.def(
        "stability_check",
        [](const PlantParams& p, const RegulatorGains& g) {
            const auto v = stability_check(p, g);
            py::dict out;
            out["contraction"] = v.contraction;
            out["feedback_bound"] = v.feedback_bound;
            out["ordering"] = v.ordering;
            out["contraction_factor"] = v.contraction_factor;
            out["k_limit"] = v.k_limit;
            out["pass"] = v.pass();
            return out;
        },
        py::arg("params"), py::arg("gains"));

    py::class_<TrajectorySpec>(m, "Trajectory")
        .def(py::init(&make_trajectory), py::arg("kind"), py::arg("period") = 100.0,
             py::arg("sample_period") = 0.1, py::arg("amplitude") = 1.0, py::arg("seed") = 0,
             py::arg("normalized") = false, py::arg("samples") = std::vector<double>{})
        .def_property_readonly("kind",
                               [](const TrajectorySpec& s) { return std::string(to_string(s.kind())); })
        .def("__call__", &TrajectorySpec::operator(), py::arg("k"))
        .def(
            "samples",
            [](const TrajectorySpec& s, std::int64_t steps) {
                py::array_t<double> out(steps);
                auto view = out.mutable_unchecked<1>();
                for (std::int64_t k = 0; k < steps; ++k) {
                    view(k) = s(k);
                }
                return out;
            },
            py::arg("steps"))
        .def_property_readonly("default_length", &TrajectorySpec::default_episode_length);

    m.def(
        "golden_section_1d",
        [](const PyCost& fn, double lo, double hi, double tolerance) {
            auto oracle = wrap(fn);
            return golden_section_1d(oracle, {{lo, hi}, tolerance});
        },
        py::arg("cost"), py::arg("lo"), py::arg("hi"), py::arg("tolerance"));
    m.def(
        "golden_section_2d",
        [](const PyCost& fn, std::pair<double, double> x_range, std::pair<double, double> y_range,
           double tolerance) {
            auto oracle = wrap(fn);
            return golden_section_2d(oracle, {{{x_range.first, x_range.second}, tolerance},
                                              {{y_range.first, y_range.second}, tolerance}});
        },
        py::arg("cost"), py::arg("x_range"), py::arg("y_range"), py::arg("tolerance"));
    m.def(
        "shc_minimize",
        [](const PyCost& fn, std::vector<double> start, double step, double threshold,
           std::uint64_t seed) {
            auto oracle = wrap(fn);
            Rng rng(seed);
            HillClimbConfig cfg;
            cfg.step = step;
            cfg.threshold = threshold;
            return shc_offline_minimize(oracle, start, cfg, rng);
        },
        py::arg("cost"), py::arg("start"), py::arg("step"), py::arg("threshold") = 0.0,
        py::arg("seed") = 0);

    m.def(
        "run_session",
        [](const std::string& method, const PlantParams& plant, const TrajectorySpec& trajectory,
           const RegulatorGains& gains, int episodes, std::uint64_t seed, double alpha,
           double rho) {
            const auto parsed = parse_tuning_method(method);
            if (!parsed) {
                throw std::invalid_argument("unknown method '" + method + "'");
            }
            SessionConfig cfg;
            cfg.method = *parsed;
            cfg.plant = plant;
            cfg.trajectory = trajectory;
            cfg.initial_gains = gains;
            cfg.episodes = episodes;
            cfg.seed = seed;
            cfg.alpha = alpha;
            cfg.ase.rho = rho;
            SessionResult res;
            {
                py::gil_scoped_release release;
                res = run_adaptive_session(cfg);
            }
            py::dict out;
            py::list logs;
            for (const auto& log : res.logs) {
                logs.append(log_columns(log));
            }
            out["logs"] = logs;
            out["episode_costs"] = res.episode_costs;
            out["final_gains"] = res.logs.empty() ? gains : res.logs.back().final_gains;
            out["mean_abs_error"] = res.metrics.mean_abs_error;
            out["rms_error"] = res.metrics.rms_error;
            out["max_u"] = res.metrics.max_u;
            out["mean_u"] = res.metrics.mean_u;
            out["converged_from"] = res.metrics.episodes_to_convergence;
            out["tuner_updates"] = res.tuner_updates;
            out["oracle_evaluations"] = res.oracle_evaluations;
            out["abort_reason"] = res.abort_reason;
            return out;
        },
        py::arg("method") = "shc-ase", py::arg("plant") = PlantParams{},
        py::arg("trajectory") = TrajectorySpec::rectangular(100.0, 0.1),
        py::arg("gains") = RegulatorGains{}, py::arg("episodes") = 10, py::arg("seed") = 0,
        py::arg("alpha") = 1e-3, py::arg("rho") = AseConfig{}.rho);
}
