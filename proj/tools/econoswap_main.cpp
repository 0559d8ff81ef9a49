#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "econoswap/analysis.hpp"
#include "econoswap/engine.hpp"
#include "econoswap/io.hpp"
#include "econoswap/svg.hpp"

namespace {

using namespace econoswap;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_io = 2;
constexpr int exit_numerical = 3;

/// Worker-pool width: ECONOSWAP_THREADS caps it, absent means hardware
/// parallelism. Throws std::invalid_argument on an unparseable value.
unsigned resolve_threads() {
    const char* env = std::getenv("ECONOSWAP_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long value = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || value > 1'000'000)
        throw std::invalid_argument(
            std::string("ECONOSWAP_THREADS: not a thread count: '") + env +
            "'");
    return value == 0 ? 1u : static_cast<unsigned>(value);
}

std::pair<double, double> parse_window(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument(
            "--window: expected LO:HI, got '" + text + "'");
    char* end = nullptr;
    const std::string lo_text = text.substr(0, colon);
    const std::string hi_text = text.substr(colon + 1);
    const double lo = std::strtod(lo_text.c_str(), &end);
    if (end == lo_text.c_str() || *end != '\0')
        throw std::invalid_argument(
            "--window: bad lower bound '" + lo_text + "'");
    const double hi = std::strtod(hi_text.c_str(), &end);
    if (end == hi_text.c_str() || *end != '\0')
        throw std::invalid_argument(
            "--window: bad upper bound '" + hi_text + "'");
    if (!(lo >= 0.0) || !(hi > lo))
        throw std::invalid_argument(
            "--window: need 0 <= LO < HI, got '" + text + "'");
    return {lo, hi};
}

/// Flags shared by run and sweep.
struct SimFlags {
    std::size_t agents = 10000;
    double w0 = 1000.0;
    std::uint32_t iterations = 500;
    std::uint64_t seed = 0;
    std::uint32_t realizations = 10;
    std::string out;
    std::string rule;
    double beta = 0.0;
    bool beta_given = false;
    double wlimit = 0.0;
    bool wlimit_given = false;
    double inject_amount = 0.0;
    std::uint32_t inject_period = 0;
    bool inject_amount_given = false;
    bool inject_period_given = false;
};

void add_sim_flags(CLI::App* cmd, SimFlags& flags, bool rule_required) {
    cmd->add_option("--agents", flags.agents, "Number of agents")
        ->capture_default_str();
    cmd->add_option("--w0", flags.w0, "Initial wealth per agent")
        ->capture_default_str();
    cmd->add_option("--iterations", flags.iterations,
                    "Iterations (full pairing passes)")
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "Master seed for the ensemble")
        ->capture_default_str();
    cmd->add_option("--realizations", flags.realizations,
                    "Independent realizations to pool")
        ->capture_default_str();
    cmd->add_option("--out", flags.out, "Output file path")->required();
    auto* rule = cmd->add_option(
        "--rule", flags.rule, "Pairing rule: random|nonmutual|mutual|mixed");
    if (rule_required) rule->required();
    cmd->add_option("--beta", flags.beta,
                    "Relative transaction range for class rules")
        ->each([&flags](const std::string&) { flags.beta_given = true; });
    cmd->add_option("--wlimit", flags.wlimit,
                    "Mixed-rule wealth threshold")
        ->each([&flags](const std::string&) { flags.wlimit_given = true; });
    cmd->add_option("--inject-amount", flags.inject_amount,
                    "Open economy: wealth added to every agent")
        ->each([&flags](const std::string&) {
            flags.inject_amount_given = true;
        });
    cmd->add_option("--inject-period", flags.inject_period,
                    "Open economy: iterations between injections")
        ->each([&flags](const std::string&) {
            flags.inject_period_given = true;
        });
}

/// Builds and validates the simulation config; throws
/// std::invalid_argument (a usage error) naming the offending flag.
SimulationConfig build_config(const SimFlags& flags) {
    SimulationConfig config;
    config.n_agents = flags.agents;
    config.initial_wealth = flags.w0;
    config.iterations = flags.iterations;
    config.master_seed = flags.seed;
    config.realizations = flags.realizations;

    const RuleKind kind = [&] {
        try {
            return io::rule_kind_from_name(flags.rule);
        } catch (const io::IoError&) {
            throw std::invalid_argument(
                "--rule: expected random|nonmutual|mutual|mixed, got '" +
                flags.rule + "'");
        }
    }();
    switch (kind) {
        case RuleKind::Random:
            config.rule = PairingRule::random();
            if (flags.beta_given)
                throw std::invalid_argument(
                    "--beta: not applicable to the random rule");
            break;
        case RuleKind::NonMutualClass:
        case RuleKind::MutualClass:
            if (!flags.beta_given)
                throw std::invalid_argument(
                    "--beta: required for class rules (must be > 0)");
            config.rule = kind == RuleKind::NonMutualClass
                              ? PairingRule::non_mutual_class(flags.beta)
                              : PairingRule::mutual_class(flags.beta);
            break;
        case RuleKind::Mixed:
            if (!flags.beta_given)
                throw std::invalid_argument(
                    "--beta: required for the mixed rule (must be > 0)");
            if (!flags.wlimit_given)
                throw std::invalid_argument(
                    "--wlimit: required for the mixed rule (must be > 0)");
            config.rule = PairingRule::mixed(flags.beta, flags.wlimit);
            break;
    }
    if (flags.wlimit_given && kind != RuleKind::Mixed)
        throw std::invalid_argument(
            "--wlimit: only applicable to the mixed rule");

    if (flags.inject_amount_given != flags.inject_period_given)
        throw std::invalid_argument(
            "--inject-amount and --inject-period must be given together");
    if (flags.inject_amount_given) {
        OpenEconomyPolicy policy;
        policy.amount = flags.inject_amount;
        policy.period = flags.inject_period;
        config.open_policy = policy;
    }

    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(e.what()) +
                                    " (check --beta/--wlimit/--agents)");
    }
    if (config.rule.out_of_studied_range())
        std::fprintf(stderr,
                     "warning: beta %g is outside the studied range (0, 1]\n",
                     config.rule.beta);
    return config;
}

nlohmann::json manifest_json(const SimulationConfig& config,
                             const std::vector<std::string>& outputs,
                             double duration_seconds, double drift) {
    nlohmann::json j;
    j["format_version"] = io::format_version;
    j["kind"] = "run_manifest";
    j["config"] = io::config_to_json(config);
    j["outputs"] = outputs;
    j["duration_seconds"] = duration_seconds;
    j["conservation_drift"] = drift;
    return j;
}

int cmd_run(const SimFlags& flags) {
    SimulationConfig config;
    unsigned threads = 0;
    try {
        config = build_config(flags);
        threads = resolve_threads();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    }

    const auto start = std::chrono::steady_clock::now();
    const SimulationResult result = run_simulation(config, threads);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();

    int exit_code = exit_ok;
    for (const auto& r : result.realizations) {
        if (!r.ok()) {
            std::fprintf(stderr, "realization %u failed: %s\n", r.index,
                         r.error.c_str());
            exit_code = exit_numerical;
        }
    }

    const double drift = result.conservation_drift();
    try {
        io::write_json_file(flags.out, io::result_to_json(result));
        io::write_json_file(
            flags.out + ".manifest.json",
            manifest_json(config, {flags.out}, duration, drift));
    } catch (const io::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_io;
    }

    std::string rule_text = io::rule_kind_name(config.rule.kind);
    if (config.rule.uses_beta())
        rule_text += " beta=" + std::to_string(config.rule.beta);
    if (config.rule.kind == RuleKind::Mixed)
        rule_text += " wlimit=" + std::to_string(config.rule.w_limit);
    std::printf("rule=%s drift=%.3e runtime=%.2fs\n", rule_text.c_str(),
                drift, duration);
    return exit_code;
}

struct SweepFlags {
    SimFlags sim;
    double beta_from = 0.1;
    double beta_to = 1.0;
    double beta_step = 0.1;
    std::string binning = "linear";
    std::size_t bins = 100;
    double threshold = 0.95;
};

int cmd_sweep(const SweepFlags& flags) {
    SimulationConfig base_config;
    unsigned threads = 0;
    std::vector<double> grid;
    BinScheme scheme = BinScheme::Linear;
    try {
        SimFlags point_flags = flags.sim;
        if (point_flags.rule == "random")
            throw std::invalid_argument(
                "--rule: sweep needs a beta-dependent rule "
                "(nonmutual|mutual|mixed)");
        if (!point_flags.beta_given) {
            point_flags.beta = flags.beta_from;
            point_flags.beta_given = true;
        }
        base_config = build_config(point_flags);
        threads = resolve_threads();

        if (!(flags.beta_step > 0.0))
            throw std::invalid_argument("--beta-step: must be > 0");
        if (!(flags.beta_from > 0.0))
            throw std::invalid_argument("--beta-from: must be > 0");
        if (flags.beta_to < flags.beta_from)
            throw std::invalid_argument(
                "--beta-to: must be >= --beta-from");
        for (double b = flags.beta_from;
             b <= flags.beta_to + 0.5 * flags.beta_step;
             b += flags.beta_step) {
            // Snap to 9 decimals so grid points print as 0.3, not
            // 0.30000000000000004.
            grid.push_back(std::round(b * 1e9) / 1e9);
        }
        try {
            scheme = io::binning_from_name(flags.binning);
        } catch (const io::IoError&) {
            throw std::invalid_argument(
                "--binning: expected linear|log, got '" + flags.binning +
                "'");
        }
        if (flags.bins == 0)
            throw std::invalid_argument("--bins: must be >= 1");
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    }

    const auto start = std::chrono::steady_clock::now();
    SweepResult sweep;
    nlohmann::json entries = nlohmann::json::array();
    int exit_code = exit_ok;
    double max_drift = 0.0;

    for (std::size_t k = 0; k < grid.size(); ++k) {
        SimulationConfig config = base_config;
        config.rule.beta = grid[k];
        // Each grid point gets its own seed stream, derived from the
        // master seed and the point index, so points are independent and
        // insensitive to grid order.
        config.master_seed =
            derive_seed(base_config.master_seed, 1'000'000 + k);

        const SimulationResult result = run_simulation(config, threads);
        max_drift = std::max(max_drift, result.conservation_drift());

        std::string error;
        for (const auto& r : result.realizations)
            if (!r.ok()) error = r.error;
        Classification classification;
        if (error.empty()) {
            try {
                const std::vector<double> pooled =
                    pooled_final_wealth(result);
                const Distribution dist =
                    build_histogram(pooled, scheme, flags.bins);
                classification = classify(dist, flags.threshold);
            } catch (const std::exception& e) {
                error = e.what();
            }
        }

        nlohmann::json entry;
        entry["beta"] = grid[k];
        entry["seed"] = config.master_seed;
        if (error.empty()) {
            sweep.entries.push_back(SweepEntry{grid[k], classification});
            entry["verdict"] = io::verdict_name(classification.verdict);
            entry["exponential_fit"] =
                io::fit_to_json(classification.exponential_fit);
            entry["power_law_fit"] =
                io::fit_to_json(classification.power_law_fit);
            std::printf("beta=%.3g verdict=%s r2_exp=%.4f r2_pow=%.4f\n",
                        grid[k],
                        io::verdict_name(classification.verdict).c_str(),
                        classification.exponential_fit.r_squared,
                        classification.power_law_fit.r_squared);
        } else {
            entry["error"] = error;
            std::fprintf(stderr, "beta=%.3g failed: %s\n", grid[k],
                         error.c_str());
            exit_code = exit_numerical;
        }
        entries.push_back(std::move(entry));
    }

    try {
        sweep.transition_beta = sweep.entries.empty()
                                    ? std::nullopt
                                    : find_transition(sweep);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "analysis error: %s\n", e.what());
        return exit_numerical;
    }
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();

    nlohmann::json j;
    j["format_version"] = io::format_version;
    j["kind"] = "sweep_result";
    j["config"] = io::config_to_json(base_config);
    j["config"]["beta_grid"] = grid;
    j["binning"] = io::binning_name(scheme);
    j["bins"] = flags.bins;
    j["threshold"] = flags.threshold;
    j["entries"] = std::move(entries);
    if (sweep.transition_beta)
        j["transition_beta"] = *sweep.transition_beta;
    else
        j["transition_beta"] = nullptr;

    try {
        io::write_json_file(flags.sim.out, j);
        io::write_json_file(
            flags.sim.out + ".manifest.json",
            manifest_json(base_config, {flags.sim.out}, duration,
                          max_drift));
    } catch (const io::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_io;
    }

    if (sweep.transition_beta)
        std::printf("transition_beta=%.3g runtime=%.2fs\n",
                    *sweep.transition_beta, duration);
    else
        std::printf("transition_beta=none runtime=%.2fs\n", duration);
    return exit_code;
}

struct AnalyzeFlags {
    std::string in;
    std::string out;
    std::string binning = "linear";
    std::size_t bins = 0;  // 0: scheme default (linear 100, log 40)
    std::string window;
    double breakpoint = 0.0;
    bool breakpoint_given = false;
    double threshold = 0.95;
    std::string ccdf;
};

int cmd_analyze(const AnalyzeFlags& flags) {
    BinScheme scheme = BinScheme::Linear;
    std::optional<std::pair<double, double>> window;
    std::size_t bins = 0;
    try {
        try {
            scheme = io::binning_from_name(flags.binning);
        } catch (const io::IoError&) {
            throw std::invalid_argument(
                "--binning: expected linear|log, got '" + flags.binning +
                "'");
        }
        bins = flags.bins != 0
                   ? flags.bins
                   : (scheme == BinScheme::Linear ? 100u : 40u);
        if (!flags.window.empty()) window = parse_window(flags.window);
        if (flags.breakpoint_given && !(flags.breakpoint > 0.0))
            throw std::invalid_argument("--breakpoint: must be > 0");
        if (!(flags.threshold > 0.0 && flags.threshold <= 1.0))
            throw std::invalid_argument("--threshold: must be in (0, 1]");
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    }

    SimulationResult result;
    try {
        result = io::load_result_file(flags.in);
    } catch (const io::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_io;
    }

    std::string csv_path = flags.out;
    if (csv_path.size() >= 5 &&
        csv_path.compare(csv_path.size() - 5, 5, ".json") == 0)
        csv_path.replace(csv_path.size() - 5, 5, ".csv");
    else
        csv_path += ".csv";

    nlohmann::json j;
    try {
        const std::vector<double> pooled = pooled_final_wealth(result);
        if (pooled.empty())
            throw std::invalid_argument(
                "no successful realizations to analyze");
        const Distribution dist = build_histogram(pooled, scheme, bins);

        FitOptions fit_options;
        fit_options.window = window;
        Classification classification;
        classification.threshold = flags.threshold;
        classification.exponential_fit =
            fit_exponential(dist, fit_options);
        classification.power_law_fit = fit_power_law(dist, fit_options);
        const double r2_exp = classification.exponential_fit.r_squared;
        const double r2_pow = classification.power_law_fit.r_squared;
        if (r2_exp >= r2_pow)
            classification.verdict = r2_exp >= flags.threshold
                                         ? Verdict::Exponential
                                         : Verdict::Indeterminate;
        else
            classification.verdict = r2_pow >= flags.threshold
                                         ? Verdict::PowerLaw
                                         : Verdict::Indeterminate;

        j["format_version"] = io::format_version;
        j["kind"] = "analysis";
        j["source"] = flags.in;
        j["binning"] = io::binning_name(scheme);
        j["bins"] = bins;
        j["threshold"] = flags.threshold;
        if (window)
            j["window"] = {window->first, window->second};
        else
            j["window"] = nullptr;
        j["n_samples"] = dist.n_samples;
        j["zero_mass"] = dist.zero_mass;
        j["distribution_csv"] = csv_path;
        j["classification"] = io::classification_to_json(classification);

        if (flags.breakpoint_given) {
            SplitFitOptions split_options;
            split_options.window = window;
            const SplitFitResult split =
                split_fit(dist, flags.breakpoint, flags.threshold,
                          split_options);
            nlohmann::json js;
            js["breakpoint"] = flags.breakpoint;
            js["body"] = io::fit_to_json(split.body);
            js["tail"] = io::fit_to_json(split.tail);
            js["verdict"] =
                io::verdict_name(split.classification.verdict);
            j["split"] = std::move(js);
            std::printf("verdict=%s split=%s\n",
                        io::verdict_name(classification.verdict).c_str(),
                        io::verdict_name(split.classification.verdict)
                            .c_str());
        } else {
            j["split"] = nullptr;
            std::printf("verdict=%s\n",
                        io::verdict_name(classification.verdict).c_str());
        }

        if (!flags.ccdf.empty()) j["ccdf_csv"] = flags.ccdf;

        try {
            io::write_text_file(csv_path, io::distribution_to_csv(dist));
            if (!flags.ccdf.empty())
                io::write_text_file(flags.ccdf,
                                    io::ccdf_to_csv(ccdf_points(pooled)));
            io::write_json_file(flags.out, j);
        } catch (const io::IoError& e) {
            std::fprintf(stderr, "io error: %s\n", e.what());
            return exit_io;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "analysis error: %s\n", e.what());
        return exit_numerical;
    }
    return exit_ok;
}

struct PlotFlags {
    std::string in;
    std::string out;
    std::string mode;
    std::string window;
    std::string title;
};

int cmd_plot(const PlotFlags& flags) {
    PlotMode mode = PlotMode::Semilog;
    std::optional<std::pair<double, double>> window;
    try {
        if (flags.mode == "semilog")
            mode = PlotMode::Semilog;
        else if (flags.mode == "loglog")
            mode = PlotMode::LogLog;
        else
            throw std::invalid_argument(
                "--mode: expected semilog|loglog, got '" + flags.mode +
                "'");
        if (!flags.window.empty()) window = parse_window(flags.window);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    }

    Distribution dist;
    try {
        dist = io::distribution_from_csv(io::read_text_file(flags.in),
                                         flags.in);
    } catch (const io::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_io;
    }

    try {
        FitOptions fit_options;
        fit_options.window = window;
        const FitResult fit = mode == PlotMode::Semilog
                                  ? fit_exponential(dist, fit_options)
                                  : fit_power_law(dist, fit_options);
        const std::string title =
            !flags.title.empty()
                ? flags.title
                : (mode == PlotMode::Semilog ? "wealth distribution, semilog"
                                             : "wealth distribution, log-log");
        const std::string svg = render_plot(dist, fit, mode, title);
        try {
            io::write_text_file(flags.out, svg);
        } catch (const io::IoError& e) {
            std::fprintf(stderr, "io error: %s\n", e.what());
            return exit_io;
        }
        std::printf("plot=%s exponent=%.6g r2=%.4f\n", flags.out.c_str(),
                    fit.exponent, fit.r_squared);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "plot error: %s\n", e.what());
        return exit_numerical;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "econoswap: kinetic wealth-exchange simulator and analyzer"};
    app.require_subcommand(1);

    SimFlags run_flags;
    auto* run = app.add_subcommand(
        "run", "Run one simulation ensemble and write a result file");
    add_sim_flags(run, run_flags, true);

    SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand(
        "sweep", "Classify distributions across a beta grid");
    add_sim_flags(sweep, sweep_flags.sim, true);
    sweep->add_option("--beta-from", sweep_flags.beta_from,
                      "First beta of the grid")
        ->capture_default_str();
    sweep->add_option("--beta-to", sweep_flags.beta_to,
                      "Last beta of the grid")
        ->capture_default_str();
    sweep->add_option("--beta-step", sweep_flags.beta_step, "Grid step")
        ->capture_default_str();
    sweep->add_option("--binning", sweep_flags.binning,
                      "Histogram scheme for classification: linear|log")
        ->capture_default_str();
    sweep->add_option("--bins", sweep_flags.bins, "Histogram bin count")
        ->capture_default_str();
    sweep->add_option("--threshold", sweep_flags.threshold,
                      "R-squared acceptance threshold")
        ->capture_default_str();

    AnalyzeFlags analyze_flags;
    auto* analyze = app.add_subcommand(
        "analyze", "Bin, fit, and classify a stored result file");
    analyze->add_option("--in", analyze_flags.in, "Simulation result file")
        ->required();
    analyze->add_option("--out", analyze_flags.out,
                        "Analysis JSON output path (CSV written beside it)")
        ->required();
    analyze->add_option("--binning", analyze_flags.binning,
                        "Histogram scheme: linear|log")
        ->capture_default_str();
    analyze->add_option("--bins", analyze_flags.bins,
                        "Bin count (default: 100 linear, 40 log)");
    analyze->add_option("--window", analyze_flags.window,
                        "Fit window LO:HI on bin centers");
    analyze->add_option("--breakpoint", analyze_flags.breakpoint,
                        "Two-regime split point (enables split fit)")
        ->each([&analyze_flags](const std::string&) {
            analyze_flags.breakpoint_given = true;
        });
    analyze->add_option("--threshold", analyze_flags.threshold,
                        "R-squared acceptance threshold")
        ->capture_default_str();
    analyze->add_option("--ccdf", analyze_flags.ccdf,
                        "Also write the CCDF to this CSV path");

    PlotFlags plot_flags;
    auto* plot = app.add_subcommand(
        "plot", "Render a distribution CSV as a self-contained SVG");
    plot->add_option("--in", plot_flags.in, "Distribution CSV")->required();
    plot->add_option("--out", plot_flags.out, "SVG output path")->required();
    plot->add_option("--mode", plot_flags.mode, "Axes: semilog|loglog")
        ->required();
    plot->add_option("--window", plot_flags.window,
                     "Fit window LO:HI on bin centers");
    plot->add_option("--title", plot_flags.title, "Plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*analyze) return cmd_analyze(analyze_flags);
    if (*plot) return cmd_plot(plot_flags);
    return exit_usage;
}
