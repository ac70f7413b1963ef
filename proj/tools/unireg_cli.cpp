// unireg command-line tool: simulate, tune, traj, compare.
//
// Exit codes: 0 success, 1 divergence abort, 2 configuration error.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unireg/csv.hpp"
#include "unireg/harness.hpp"
#include "unireg/svg.hpp"

namespace {

using namespace unireg;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDivergence = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    PlantParams plant;
    double drift_a = 0.0;
    double drift_b = 0.0;
    double x0 = 0.0;

    std::string trajectory = "rectangular";
    double period = 100.0;
    double amplitude = 1.0;
    bool normalized = false;
    std::optional<std::uint64_t> traj_seed;
    std::string traj_file;
    std::int64_t steps = 0;

    std::string method = "shc-ase";
    double K = 0.0;
    double N = 0.0;
    int episodes = 10;
    std::int64_t episode_length = 0;
    double alpha = 1e-3;
    double output_limit = 1000.0;
    std::uint64_t seed = 0;
    double divergence_factor = 1e6;
    bool abort_on_unstable = false;

    AseConfig ase;
    std::string omega = "mean-diff";

    double shc_step = 10.0;
    double shc_threshold = 0.0;
    double shc_draw_lo = 0.0;
    double shc_draw_hi = 1.0;

    double gss_k_lo = 0.0;
    double gss_k_hi = 600.0;
    double gss_offset_lo = 0.0;
    double gss_offset_hi = 600.0;
    double gss_tolerance = 1.0;

    std::string out;
    std::string svg;
    std::string out_dir;
    bool sequential = false;
    bool quiet = false;
};

using Target = std::variant<double*, int*, std::int64_t*, std::uint64_t*, bool*,
                            std::string*, std::optional<std::uint64_t>*>;

struct Field {
    const char* name;
    Target target;
    const char* help;
};

enum Group : unsigned { kPlant = 1, kTrajectory = 2, kSession = 4, kTuner = 8 };

struct FieldGroup {
    unsigned group;
    std::vector<Field> fields;
};

/// Every setting reachable from the command line; the same names are the
/// keys accepted in a JSON config file.
std::vector<FieldGroup> field_table(Options& o) {
    return {
        {kPlant,
         {{"a", &o.plant.a, "driven-branch state coefficient"},
          {"b", &o.plant.b, "input gain"},
          {"c", &o.plant.c, "output gain"},
          {"f", &o.plant.f, "dissipation coefficient"},
          {"T", &o.plant.T, "sampling period [s]"},
          {"drift-a", &o.drift_a, "per-step ramp on a"},
          {"drift-b", &o.drift_b, "per-step ramp on b"},
          {"x0", &o.x0, "initial state"}}},
        {kTrajectory,
         {{"trajectory", &o.trajectory,
           "rectangular | versine | random-steps | random-versine | arbitrary"},
          {"period", &o.period, "trajectory period tau [s]"},
          {"amplitude", &o.amplitude, "trajectory amplitude"},
          {"normalized", &o.normalized, "halve the versine so its peak equals the amplitude"},
          {"traj-seed", &o.traj_seed, "seed of the random trajectories (default: derived)"},
          {"traj-file", &o.traj_file, "sample file for the arbitrary trajectory"}}},
        {kSession,
         {{"K", &o.K, "initial feedback gain"},
          {"N", &o.N, "initial feedforward gain"},
          {"episodes", &o.episodes, "episode count"},
          {"episode-length", &o.episode_length, "steps per episode (0: one period)"},
          {"alpha", &o.alpha, "control-effort weight in the tuner cost"},
          {"output-limit", &o.output_limit, "regulator output limit for feasibility"},
          {"seed", &o.seed, "master seed"},
          {"divergence-factor", &o.divergence_factor, "abort when |x| exceeds this times max |r|"},
          {"abort-on-unstable", &o.abort_on_unstable, "abort when gains leave |a - bK| < 1"},
          {"out", &o.out, "CSV output path (default stdout)"},
          {"svg", &o.svg, "optional SVG plot path"},
          {"quiet", &o.quiet, "suppress the summary on stderr"}}},
        {kTuner,
         {{"method", &o.method, "gss | gss2d | shc | shc-ase"},
          {"beta1", &o.ase.beta1, "N decrease step (all errors negative)"},
          {"beta2", &o.ase.beta2, "K decrease step (some error negative)"},
          {"beta3", &o.ase.beta3, "K decrease step (peak ratio)"},
          {"beta4", &o.ase.beta4, "K increase step"},
          {"beta5", &o.ase.beta5, "N increase step"},
          {"gamma", &o.ase.gamma, "peak-to-mean control ratio bound"},
          {"epsilon", &o.ase.epsilon, "error threshold"},
          {"rho", &o.ase.rho, "priority weight on the uniform draw"},
          {"capacity", &o.ase.capacity, "buffer capacity in samples"},
          {"omega", &o.omega, "mean-diff | max-diff"},
          {"shc-step", &o.shc_step, "hill-climbing neighbor step"},
          {"shc-threshold", &o.shc_threshold, "hill-climbing improvement threshold"},
          {"shc-draw-lo", &o.shc_draw_lo, "lower bound of the step multiplier draw"},
          {"shc-draw-hi", &o.shc_draw_hi, "upper bound of the step multiplier draw"},
          {"gss-k-lo", &o.gss_k_lo, "golden-section K range, low"},
          {"gss-k-hi", &o.gss_k_hi, "golden-section K range, high"},
          {"gss-offset-lo", &o.gss_offset_lo, "golden-section N - K range, low"},
          {"gss-offset-hi", &o.gss_offset_hi, "golden-section N - K range, high"},
          {"gss-tolerance", &o.gss_tolerance, "golden-section bracket tolerance"}}},
    };
}

void assign_json(const std::string& key, const json& value, Target target) {
    try {
        std::visit(
            [&](auto* ptr) {
                using T = std::remove_pointer_t<decltype(ptr)>;
                if constexpr (std::is_same_v<T, std::optional<std::uint64_t>>) {
                    *ptr = value.get<std::uint64_t>();
                } else {
                    *ptr = value.get<T>();
                }
            },
            target);
    } catch (const json::exception& err) {
        throw ConfigError("config key '" + key + "': " + err.what());
    }
}

void load_json_config(const std::string& path, Options& o) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& err) {
        throw ConfigError("config file " + path + ": " + err.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config file " + path + " must hold a JSON object");
    }
    auto table = field_table(o);
    for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (auto& group : table) {
            for (auto& field : group.fields) {
                if (key == field.name) {
                    assign_json(key, value, field.target);
                    known = true;
                }
            }
        }
        if (!known) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

/// The config file must be read before the flags bind, so it is located by
/// scanning argv directly.
std::optional<std::string> find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            return std::string(argv[i + 1]);
        }
        if (arg.rfind("--config=", 0) == 0) {
            return arg.substr(9);
        }
    }
    return std::nullopt;
}

void register_fields(CLI::App& app, Options& o, unsigned groups) {
    for (auto& group : field_table(o)) {
        if ((group.group & groups) == 0) {
            continue;
        }
        for (auto& field : group.fields) {
            const std::string flag = "--" + std::string(field.name);
            std::visit(
                [&](auto* ptr) {
                    using T = std::remove_pointer_t<decltype(ptr)>;
                    if constexpr (std::is_same_v<T, bool>) {
                        app.add_flag(flag, *ptr, field.help);
                    } else {
                        app.add_option(flag, *ptr, field.help);
                    }
                },
                field.target);
        }
    }
    app.add_option("--config", "JSON file supplying defaults; flags override it")->type_name("PATH");
}

double parse_number(const std::string& token, const std::string& path) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size()) {
        throw ConfigError("trajectory file " + path + ": bad number '" + token + "'");
    }
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream row(line);
    while (std::getline(row, item, ',')) {
        std::istringstream trim(item);
        std::string token;
        trim >> token;
        out.push_back(token);
    }
    return out;
}

/// Reads either bare numbers (one per line) or a CSV with a header that
/// contains an `r` column, as written by `unireg traj`.
std::vector<double> read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open trajectory file " + path);
    }
    std::vector<double> samples;
    std::string line;
    std::optional<std::size_t> column;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto fields = split_fields(line);
        if (first) {
            first = false;
            const bool header = std::any_of(fields.begin(), fields.end(), [](const std::string& s) {
                char* end = nullptr;
                std::strtod(s.c_str(), &end);
                return s.empty() || *end != '\0';
            });
            if (header) {
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    if (fields[i] == "r") column = i;
                }
                if (!column) {
                    throw ConfigError("trajectory file " + path + ": header lacks an r column");
                }
                continue;
            }
        }
        const std::size_t index = column.value_or(fields.size() - 1);
        if (index >= fields.size()) {
            throw ConfigError("trajectory file " + path + ": short row '" + line + "'");
        }
        samples.push_back(parse_number(fields[index], path));
    }
    if (samples.empty()) {
        throw ConfigError("trajectory file " + path + " holds no samples");
    }
    return samples;
}

TrajectorySpec build_trajectory(const Options& o) {
    const auto kind = parse_trajectory_kind(o.trajectory);
    if (!kind) {
        throw ConfigError("unknown trajectory '" + o.trajectory + "'");
    }
    const std::uint64_t seed = o.traj_seed.value_or(derive_seed(o.seed, 3));
    switch (*kind) {
        case TrajectoryKind::Rectangular:
            return TrajectorySpec::rectangular(o.period, o.plant.T, o.amplitude);
        case TrajectoryKind::Versine:
            return TrajectorySpec::versine(o.period, o.plant.T, o.amplitude, o.normalized);
        case TrajectoryKind::RandomSteps:
            return TrajectorySpec::random_steps(o.period, o.plant.T, o.amplitude, seed);
        case TrajectoryKind::RandomVersine:
            return TrajectorySpec::random_versine(o.period, o.plant.T, o.amplitude, seed,
                                                  o.normalized);
        case TrajectoryKind::Arbitrary:
            if (o.traj_file.empty()) {
                throw ConfigError("the arbitrary trajectory needs --traj-file");
            }
            return TrajectorySpec::arbitrary(read_samples(o.traj_file), o.plant.T);
    }
    throw ConfigError("unhandled trajectory kind");
}

SessionConfig build_session(const Options& o, TuningMethod method) {
    SessionConfig cfg;
    cfg.plant = o.plant;
    cfg.drift = {o.drift_a, o.drift_b, o.drift_a != 0.0 || o.drift_b != 0.0};
    cfg.initial_state = o.x0;
    cfg.trajectory = build_trajectory(o);
    cfg.method = method;
    cfg.initial_gains = {o.K, o.N};
    cfg.episodes = o.episodes;
    cfg.episode_length = o.episode_length;
    cfg.alpha = o.alpha;
    cfg.output_limit = o.output_limit;
    cfg.seed = o.seed;
    cfg.ase = o.ase;
    const auto variant = parse_omega_variant(o.omega);
    if (!variant) {
        throw ConfigError("unknown omega variant '" + o.omega + "'");
    }
    cfg.ase.omega_variant = *variant;
    cfg.shc = {o.shc_step, {o.shc_draw_lo, o.shc_draw_hi}, o.shc_threshold,
               kHillClimbMaxIterations};
    cfg.gss_box = {{{o.gss_k_lo, o.gss_k_hi}, o.gss_tolerance},
                   {{o.gss_offset_lo, o.gss_offset_hi}, o.gss_tolerance}};
    cfg.divergence_factor = o.divergence_factor;
    cfg.abort_on_unstable = o.abort_on_unstable;
    cfg.validate();
    return cfg;
}

/// Runs `write` against the named file, or stdout for "" and "-".
template <typename Fn>
void with_output(const std::string& path, Fn write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open output file " + path);
    }
    write(out);
}

void print_summary(std::ostream& err, TuningMethod method, const SessionResult& result) {
    const auto& m = result.metrics;
    err << "method=" << to_string(method) << " episodes=" << result.logs.size();
    if (!result.logs.empty()) {
        const auto& g = result.logs.back().final_gains;
        err << " K=" << format_number(g.K) << " N=" << format_number(g.N);
    }
    err << " mae=" << m.mean_abs_error << " rmse=" << m.rms_error << " max_u=" << m.max_u
        << " mean_u=" << m.mean_u << " converged_from=";
    if (m.episodes_to_convergence) {
        err << *m.episodes_to_convergence;
    } else {
        err << "none";
    }
    err << " updates=" << result.tuner_updates << " evaluations=" << result.oracle_evaluations
        << " unstable_episodes=" << result.unstable_episodes << '\n';
    if (result.aborted()) {
        err << "aborted: " << *result.abort_reason << '\n';
    }
}

int run_session(const Options& o, TuningMethod method) {
    const SessionConfig cfg = build_session(o, method);
    const SessionResult result = run_adaptive_session(cfg);
    const bool with_ase = method == TuningMethod::ShcAse;
    with_output(o.out, [&](std::ostream& out) { write_session_csv(out, result.logs, with_ase); });
    if (!o.svg.empty()) {
        with_output(o.svg, [&](std::ostream& out) {
            write_session_svg(out, result.logs, "unireg " + std::string(to_string(method)));
        });
    }
    if (!o.quiet || result.aborted()) {
        print_summary(std::cerr, method, result);
    }
    return result.aborted() ? kExitDivergence : kExitOk;
}

int run_traj(const Options& o) {
    const TrajectorySpec traj = build_trajectory(o);
    const std::int64_t steps = o.steps > 0 ? o.steps : traj.default_episode_length();
    with_output(o.out, [&](std::ostream& out) { write_trajectory_csv(out, traj, steps); });
    return kExitOk;
}

constexpr std::array<TuningMethod, 5> kCompared = {TuningMethod::Fixed, TuningMethod::Gss,
                                                    TuningMethod::Gss2d, TuningMethod::Shc,
                                                    TuningMethod::ShcAse};

int run_compare(const Options& o) {
    std::vector<SessionConfig> configs;
    for (std::size_t i = 0; i < kCompared.size(); ++i) {
        Options local = o;
        local.seed = derive_seed(o.seed, 10 + i);
        // Every method sees the same reference signal.
        local.traj_seed = o.traj_seed.value_or(derive_seed(o.seed, 3));
        configs.push_back(build_session(local, kCompared[i]));
    }

    std::vector<SessionResult> results;
    if (o.sequential) {
        for (const auto& cfg : configs) {
            results.push_back(run_adaptive_session(cfg));
        }
    } else {
        std::vector<std::future<SessionResult>> pending;
        for (const auto& cfg : configs) {
            pending.push_back(std::async(std::launch::async,
                                         [&cfg] { return run_adaptive_session(cfg); }));
        }
        for (auto& f : pending) {
            results.push_back(f.get());
        }
    }

    bool any_abort = false;
    with_output(o.out, [&](std::ostream& out) {
        out << "method,seed,final_K,final_N,mae,rmse,max_u,mean_u,converged_from,last_J,"
               "updates,evaluations,aborted\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& res = results[i];
            const auto& m = res.metrics;
            const RegulatorGains g = res.logs.empty() ? RegulatorGains{} : res.logs.back().final_gains;
            out << to_string(kCompared[i]) << ',' << configs[i].seed << ',' << format_number(g.K)
                << ',' << format_number(g.N) << ',' << format_number(m.mean_abs_error) << ','
                << format_number(m.rms_error) << ',' << format_number(m.max_u) << ','
                << format_number(m.mean_u) << ','
                << (m.episodes_to_convergence ? std::to_string(*m.episodes_to_convergence) : "")
                << ',' << (res.episode_costs.empty() ? "" : format_number(res.episode_costs.back()))
                << ',' << res.tuner_updates << ',' << res.oracle_evaluations << ','
                << (res.aborted() ? 1 : 0) << '\n';
            any_abort = any_abort || res.aborted();
        }
    });
    if (!o.out_dir.empty()) {
        for (std::size_t i = 0; i < results.size(); ++i) {
            const std::string path = o.out_dir + "/" + std::string(to_string(kCompared[i])) + ".csv";
            with_output(path, [&](std::ostream& out) {
                write_session_csv(out, results[i].logs, kCompared[i] == TuningMethod::ShcAse);
            });
        }
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].aborted()) {
            std::cerr << to_string(kCompared[i]) << " aborted: " << *results[i].abort_reason << '\n';
        }
    }
    return any_abort ? kExitDivergence : kExitOk;
}

int run(int argc, char** argv) {
    Options o;
    if (auto path = find_config_path(argc, argv)) {
        load_json_config(*path, o);
    }

    CLI::App app{"Unidirectional regulator simulation and gain tuning"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "run fixed gains over all episodes");
    register_fields(*simulate, o, kPlant | kTrajectory | kSession);

    auto* tune = app.add_subcommand("tune", "adapt the gains with one tuning method");
    register_fields(*tune, o, kPlant | kTrajectory | kSession | kTuner);

    auto* traj = app.add_subcommand("traj", "emit a reference trajectory as k,t,r");
    register_fields(*traj, o, kPlant | kTrajectory);
    traj->add_option("--steps", o.steps, "sample count (default: one period)");
    traj->add_option("--out", o.out, "CSV output path (default stdout)");

    auto* compare = app.add_subcommand("compare", "run every method on the same scenario");
    register_fields(*compare, o, kPlant | kTrajectory | kSession | kTuner);
    compare->add_option("--out-dir", o.out_dir, "directory for per-method step CSVs");
    compare->add_flag("--sequential", o.sequential, "run the methods one after another");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (simulate->parsed()) {
        return run_session(o, TuningMethod::Fixed);
    }
    if (tune->parsed()) {
        const auto method = parse_tuning_method(o.method);
        if (!method || *method == TuningMethod::Fixed) {
            throw ConfigError("unknown tuning method '" + o.method + "'");
        }
        return run_session(o, *method);
    }
    if (traj->parsed()) {
        return run_traj(o);
    }
    return run_compare(o);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const DivergenceError& err) {
        std::cerr << "divergence: " << err.what() << '\n';
        return kExitDivergence;
    }
}
