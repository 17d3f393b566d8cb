// cli.hpp — command-line front end, kept in a header so the tests can drive
// it in-process as well as through the built binary.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <entbound/entbound.hpp>

namespace entbound::cli {

/// Validation error tied to one flag (exit code 1).
class FlagError : public std::runtime_error {
public:
    FlagError(std::string flag, const std::string& what) : std::runtime_error(what), flag_(std::move(flag)) {}
    const std::string& flag() const noexcept { return flag_; }

private:
    std::string flag_;
};

namespace detail {

inline std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

template <class T>
T env_cap(const char* name, T fallback) {
    const char* raw = std::getenv(name);
    if (!raw || !*raw) return fallback;
    try {
        const auto v = parse_unsigned(raw, name);
        if (v < 1) throw Error(ErrorKind::BadConfig, "must be >= 1");
        return static_cast<T>(v);
    } catch (const Error&) {
        throw FlagError(name, std::string(name) + " must be a positive integer, got '" + raw + "'");
    }
}

inline Limits limits_from_env() {
    Limits l;
    l.max_states = env_cap("ENTBOUND_MAX_STATES", l.max_states);
    l.max_composites = env_cap("ENTBOUND_MAX_COMPOSITES", l.max_composites);
    l.max_k_unique = env_cap("ENTBOUND_MAX_K_UNIQUE", l.max_k_unique);
    l.max_k_repeated = env_cap("ENTBOUND_MAX_K_REPEATED", l.max_k_repeated);
    return l;
}

// Rethrows library validation errors as errors on the given flag.
template <class Fn>
auto on_flag(const std::string& flag, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NumericFailure) throw;
        throw FlagError(flag, e.what());
    }
}

inline void check_shape_flags(std::size_t n, std::size_t m) {
    if (n < 1) throw FlagError("--n", "N must be >= 1");
    if (m < 1 || m > n) throw FlagError("--m", "M must satisfy 1 <= M <= N (N=" + std::to_string(n) + ")");
}

inline SortedDistribution read_distribution(const std::string& path, const Limits& limits) {
    return on_flag("--dist", [&] { return make_distribution(read_weights_file(path), limits); });
}

inline TransformMode mode_flag(const std::string& text) {
    return on_flag("--mode", [&] { return parse_transform_mode(text); });
}

}  // namespace detail

struct Globals {
    std::uint64_t seed = 42;
    std::size_t threads = default_threads();
    double tolerance = kDefaultTolerance;
    std::string format;  // empty: the subcommand's default
    std::string out;
};

/// Runs the CLI; returns the process exit code. Results go to `out` (or the
/// --out file), diagnostics and sweep summaries to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"entbound: entropy-based bounds on the error and merit probability of selecting the M most likely "
                 "objects out of N"};
    app.name("entbound");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Seed for every random stream (default 42)");
    app.add_option("--threads", g.threads, "Worker threads (default: logical cores)")->check(CLI::PositiveNumber);
    app.add_option("--tolerance", g.tolerance, "Numerical tolerance epsilon (default 1e-9)")
        ->check(CLI::Range(1e-15, 1e-3));
    app.add_option("--format", g.format, "Output format: json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", g.out, "Write the result to FILE instead of stdout");

    // bounds
    auto* bounds_cmd = app.add_subcommand(
        "bounds",
        "Error/merit probability bounds from entropy: maximum-entropy inversion (lower), Omega minimum-entropy "
        "bound (upper), tight numeric inversion, and the unique/repeated transforms for k > 1");
    std::size_t b_n = 0, b_m = 0, b_k = 1, b_grid = 4096;
    double b_h = 0.0;
    std::string b_mode, b_dist;
    bool b_no_tight = false, b_flawed = false;
    auto* b_n_opt = bounds_cmd->add_option("--n", b_n, "Number of objects N");
    bounds_cmd->add_option("--m", b_m, "Selected set size M")->required();
    auto* b_h_opt = bounds_cmd->add_option("--entropy", b_h, "Entropy H in bits");
    bounds_cmd->add_option("--k", b_k, "Performance requirement k (needs --dist when k > 1)");
    bounds_cmd->add_option("--mode", b_mode, "Transform for k > 1: unique or repeated");
    auto* b_dist_opt = bounds_cmd->add_option("--dist", b_dist, "Distribution file; H (and H') computed from it");
    bounds_cmd->add_option("--grid", b_grid, "Grid size for the tight upper bound (default 4096)");
    bounds_cmd->add_flag("--no-tight", b_no_tight, "Skip the tight numeric bounds");
    bounds_cmd->add_flag("--compare-flawed", b_flawed, "Also report the uncorrected minimum-entropy lower bound");
    b_h_opt->excludes(b_dist_opt);

    // extrema
    auto* extrema_cmd = app.add_subcommand(
        "extrema", "Maximum- or minimum-entropy distribution for (N, M, pi): block-uniform maximizer, or the "
                   "candidate-set minimizer (staircase for M = 1)");
    std::size_t e_n = 0, e_m = 0;
    double e_pi = 0.0;
    std::string e_which = "max";
    extrema_cmd->add_option("--n", e_n, "Number of objects N")->required();
    extrema_cmd->add_option("--m", e_m, "Selected set size M")->required();
    extrema_cmd->add_option("--pi", e_pi, "Error probability pi")->required();
    extrema_cmd->add_option("--which", e_which, "max or min (default max)")->check(CLI::IsMember({"max", "min"}));

    // curve
    auto* curve_cmd = app.add_subcommand(
        "curve", "Piecewise-concave entropy curve over the repeated probability p_hat, with the minimum-entropy "
                 "candidate set marked as junctions");
    std::size_t c_n = 0, c_m = 0, c_samples = 200;
    double c_pi = 0.0;
    curve_cmd->add_option("--n", c_n, "Number of objects N")->required();
    curve_cmd->add_option("--m", c_m, "Selected set size M (>= 2)")->required();
    curve_cmd->add_option("--pi", c_pi, "Error probability pi")->required();
    curve_cmd->add_option("--samples", c_samples, "Uniform samples across the p_hat interval (default 200)");

    // transform
    auto* transform_cmd = app.add_subcommand(
        "transform", "Composite system for performance requirement k: unique (sampling without replacement) or "
                     "repeated (independent draws) transform");
    std::string t_dist, t_mode;
    std::size_t t_m = 0, t_k = 0;
    transform_cmd->add_option("--dist", t_dist, "Distribution file")->required();
    transform_cmd->add_option("--m", t_m, "Selected set size M")->required();
    transform_cmd->add_option("--k", t_k, "Performance requirement k")->required();
    transform_cmd->add_option("--mode", t_mode, "unique or repeated")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Monte Carlo verification that observed error probabilities fall inside the entropy bounds");
    std::string s_config, s_summary;
    bool s_preset = false, s_no_tight = false;
    std::optional<std::size_t> s_scenarios;
    auto* s_config_opt = sweep_cmd->add_option("--config", s_config, "Sweep config file (key=value)");
    auto* s_preset_opt = sweep_cmd->add_flag("--paper-figs", s_preset,
                                            "Built-in preset: eight (N, M) shapes from the published verification "
                                            "plots, 100 scenarios each");
    sweep_cmd->add_option("--summary", s_summary, "Write the summary JSON to FILE (default: stderr)");
    sweep_cmd->add_option("--scenarios", s_scenarios, "Override scenarios per shape");
    sweep_cmd->add_flag("--no-tight", s_no_tight, "Skip the tight numeric bounds");
    s_config_opt->excludes(s_preset_opt);

    // scenario
    auto* scenario_cmd = app.add_subcommand(
        "scenario", "Cache prefetch (single page, multi-page, multi-user) or channel scheduling report with bounds "
                    "and a Monte Carlo estimate");
    std::string sc_config;
    std::optional<std::uint64_t> sc_trials;
    scenario_cmd->add_option("--config", sc_config, "Scenario config file (key=value)")->required();
    scenario_cmd->add_option("--trials", sc_trials, "Override the number of Monte Carlo trials");

    // oracle-check
    auto* oracle_cmd = app.add_subcommand(
        "oracle-check", "Independent checks: randomized polytope search against the exact minimum entropy and the "
                        "Omega bound, or total enumeration against the transforms");
    bool o_min = false, o_transform = false;
    std::size_t o_n = 0, o_m = 1, o_k = 2, o_restarts = 100, o_iters = 5000, o_trials = 100;
    double o_pi = 0.0;
    auto* o_min_opt = oracle_cmd->add_flag("--min-entropy", o_min, "Check the minimum entropy at (N, M, pi)");
    auto* o_tr_opt = oracle_cmd->add_flag("--transform", o_transform, "Check the transforms at (N, k), N <= 6, k <= 3");
    oracle_cmd->add_option("--n", o_n, "Number of objects N")->required();
    oracle_cmd->add_option("--m", o_m, "Selected set size M (--min-entropy)");
    oracle_cmd->add_option("--pi", o_pi, "Error probability pi (--min-entropy)");
    oracle_cmd->add_option("--k", o_k, "Performance requirement k (--transform)");
    oracle_cmd->add_option("--restarts", o_restarts, "Random restarts (--min-entropy, default 100)");
    oracle_cmd->add_option("--iters", o_iters, "Iterations per restart (--min-entropy, default 5000)");
    oracle_cmd->add_option("--trials", o_trials, "Random distributions (--transform, default 100)");
    o_min_opt->excludes(o_tr_opt);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "entbound: error: " << detail::one_line(e.what()) << '\n';
        return 1;
    }

    auto default_format = [&](const char* fallback) { return g.format.empty() ? std::string(fallback) : g.format; };
    std::ostringstream result;

    try {
        const Limits limits = detail::limits_from_env();
        const double tol = g.tolerance;

        if (*bounds_cmd) {
            BoundOptions opt;
            opt.tight = !b_no_tight;
            opt.tight_grid = b_grid;
            opt.compare_flawed = b_flawed;
            opt.tol = tol;
            opt.limits = limits;
            if (b_grid < 2) throw FlagError("--grid", "grid must be >= 2");
            if (b_k < 1) throw FlagError("--k", "k must be >= 1");
            BoundReport rep;
            std::optional<double> observed_pi;
            if (!b_dist.empty()) {
                const auto d = detail::read_distribution(b_dist, limits);
                if (b_n_opt->count() && b_n != d.size()) {
                    throw FlagError("--n", "N=" + std::to_string(b_n) + " does not match the " +
                                               std::to_string(d.size()) + " entries of --dist");
                }
                detail::check_shape_flags(d.size(), b_m);
                if (b_k > b_m) throw FlagError("--k", "k must satisfy 1 <= k <= M");
                if (b_k == 1) {
                    rep = bound_report(d.size(), b_m, entropy(d), opt);
                    observed_pi = tail_probability(d, b_m);
                } else {
                    if (b_mode.empty()) throw FlagError("--mode", "--mode unique|repeated is required when k > 1");
                    const auto mode = detail::mode_flag(b_mode);
                    const auto sys = detail::on_flag("--k", [&] { return transform(d, b_m, b_k, mode, limits, tol); });
                    rep = bound_report(sys.n_prime, sys.m_prime, entropy(sys.dist), opt);
                    rep.k = b_k;
                    rep.mode = mode == TransformMode::unique ? BoundMode::unique : BoundMode::repeated;
                    observed_pi = sys.optimal_error();
                }
            } else {
                if (!b_n_opt->count()) throw FlagError("--n", "--n is required without --dist");
                if (!b_h_opt->count()) throw FlagError("--entropy", "--entropy is required without --dist");
                detail::check_shape_flags(b_n, b_m);
                if (b_k != 1) throw FlagError("--k", "k > 1 needs --dist to build the composite system");
                rep = detail::on_flag("--entropy", [&] { return bound_report(b_n, b_m, b_h, opt); });
            }
            if (default_format("json") == "json") {
                auto j = to_json(rep);
                if (observed_pi) j["observed_pi"] = *observed_pi;
                result << j.dump(2) << '\n';
            } else {
                result << "n,m,k,mode,entropy_bits,pi_lb_analytic,pi_ub_analytic,pi_lb_tight,pi_ub_tight,psi_lb,psi_ub"
                       << (observed_pi ? ",observed_pi" : "") << '\n';
                result << rep.n << ',' << rep.m << ',' << rep.k << ',' << to_string(rep.mode) << ','
                       << format_number(rep.entropy_bits) << ',' << format_number(rep.pi_lb_analytic) << ','
                       << format_number(rep.pi_ub_analytic) << ',' << format_number(rep.pi_lb_tight) << ','
                       << format_number(rep.pi_ub_tight) << ',' << format_number(rep.psi_lb) << ','
                       << format_number(rep.psi_ub);
                if (observed_pi) result << ',' << format_number(*observed_pi);
                result << '\n';
            }
        } else if (*extrema_cmd) {
            detail::check_shape_flags(e_n, e_m);
            if (e_n > limits.max_states) throw FlagError("--n", "N exceeds the state cap " + std::to_string(limits.max_states));
            const auto shape = detail::on_flag("--pi", [&] { return SystemShape::make(e_n, e_m, e_pi, tol); });
            nlohmann::json j = {{"which", e_which}, {"n", e_n}, {"m", e_m}, {"pi", shape.pi()}};
            std::vector<double> probs;
            if (e_which == "max") {
                const auto d = max_entropy_distribution(shape);
                probs = d.probs();
                j["entropy_bits"] = entropy(d);
                j["closed_form_bits"] = max_entropy(shape);
            } else {
                const auto r = min_entropy(shape, tol);
                probs = r.argmin().probs();
                j["entropy_bits"] = r.min_entropy_bits;
                j["y"] = r.y;
                j["p_hat"] = r.candidates[r.argmin_index].p_hat;
                nlohmann::json cands = nlohmann::json::array();
                for (const auto& c : r.candidates) cands.push_back({{"p_hat", c.p_hat}, {"entropy_bits", c.entropy_bits}});
                j["candidates"] = cands;
                if (shape.m() < shape.n()) j["omega_bound_bits"] = entropy_lower_bound_omega(shape);
            }
            j["distribution"] = probs;
            if (default_format("json") == "json") {
                result << j.dump(2) << '\n';
            } else {
                result << "index,probability\n";
                for (std::size_t i = 0; i < probs.size(); ++i) result << i << ',' << format_number(probs[i]) << '\n';
            }
        } else if (*curve_cmd) {
            detail::check_shape_flags(c_n, c_m);
            if (c_m < 2) throw FlagError("--m", "the curve needs M >= 2 (M = 1 has a single staircase point)");
            if (c_samples < 2) throw FlagError("--samples", "samples must be >= 2");
            const auto shape = detail::on_flag("--pi", [&] { return SystemShape::make(c_n, c_m, c_pi, tol); });
            const auto samples = detail::on_flag("--pi", [&] { return piecewise_curve(shape, c_samples, tol); });
            if (default_format("csv") == "csv") {
                result << "p_hat,entropy_bits,segment_index,is_junction\n";
                for (const auto& s : samples) {
                    result << format_number(s.p_hat) << ',' << format_number(s.entropy_bits) << ',' << s.segment_index
                           << ',' << (s.is_junction ? 1 : 0) << '\n';
                }
            } else {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& s : samples) {
                    arr.push_back({{"p_hat", s.p_hat}, {"entropy_bits", s.entropy_bits},
                                   {"segment_index", s.segment_index}, {"is_junction", s.is_junction}});
                }
                result << nlohmann::json{{"n", c_n}, {"m", c_m}, {"pi", shape.pi()}, {"samples", arr}}.dump(2) << '\n';
            }
        } else if (*transform_cmd) {
            const auto d = detail::read_distribution(t_dist, limits);
            detail::check_shape_flags(d.size(), t_m);
            if (t_k < 1 || t_k > t_m) throw FlagError("--k", "k must satisfy 1 <= k <= M");
            const auto mode = detail::mode_flag(t_mode);
            const auto sys = detail::on_flag("--k", [&] { return transform(d, t_m, t_k, mode, limits, tol); });
            nlohmann::json header = {{"n_prime", sys.n_prime}, {"m_prime", sys.m_prime}, {"mode", to_string(mode)},
                                     {"k", t_k}, {"entropy_bits", entropy(sys.dist)}};
            auto ids_text = [](const Composite& c) {
                std::string s;
                for (std::size_t i = 0; i < c.ids.size(); ++i) s += (i ? "+" : "") + std::to_string(c.ids[i]);
                return s;
            };
            if (default_format("csv") == "csv") {
                result << "# " << header.dump() << '\n';
                result << "composite_ids,probability,in_selected_set\n";
                for (const auto& c : sys.composites) {
                    result << ids_text(c) << ',' << format_number(c.probability) << ',' << (c.in_selected ? 1 : 0) << '\n';
                }
            } else {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& c : sys.composites) {
                    arr.push_back({{"ids", c.ids}, {"probability", c.probability}, {"in_selected_set", c.in_selected}});
                }
                header["composites"] = arr;
                result << header.dump(2) << '\n';
            }
        } else if (*sweep_cmd) {
            if (!s_preset && s_config.empty()) throw FlagError("--config", "give --config FILE or --paper-figs");
            SweepConfig cfg;
            if (s_preset) {
                cfg = reference_sweep_config(g.seed);
            } else {
                cfg = detail::on_flag("--config", [&] { return parse_sweep_config(read_text_file(s_config)); });
                if (seed_opt->count()) cfg.seed = g.seed;
            }
            if (s_scenarios) {
                if (*s_scenarios < 1) throw FlagError("--scenarios", "scenarios must be >= 1");
                cfg.scenarios_per_shape = *s_scenarios;
            }
            if (s_no_tight) cfg.tight = false;
            cfg.tol = tol;
            const auto res = run_sweep(cfg, g.threads);
            if (default_format("csv") == "csv") {
                write_sweep_csv(result, res.records);
            } else {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& r : res.records) arr.push_back(to_json(r));
                result << arr.dump(2) << '\n';
            }
            const std::string summary = to_json(res.summary).dump(2) + "\n";
            if (s_summary.empty()) {
                err << summary;
            } else {
                std::ofstream f(s_summary, std::ios::binary);
                if (!f) throw FlagError("--summary", "cannot write " + s_summary);
                f << summary;
            }
        } else if (*scenario_cmd) {
            if (default_format("json") != "json") throw FlagError("--format", "scenario reports are JSON only");
            auto cfg = detail::on_flag("--config", [&] {
                return parse_scenario_config(read_text_file(sc_config), std::filesystem::path(sc_config).parent_path());
            });
            if (seed_opt->count()) cfg.seed = g.seed;
            if (sc_trials) cfg.trials = *sc_trials;
            cfg.tol = tol;
            cfg.limits = limits;
            const auto rep = detail::on_flag("--config", [&] { return run_scenario(cfg, g.threads); });
            result << to_json(rep).dump(2) << '\n';
        } else if (*oracle_cmd) {
            if (default_format("json") != "json") throw FlagError("--format", "oracle-check reports are JSON only");
            if (!o_min && !o_transform) throw FlagError("--min-entropy", "give --min-entropy or --transform");
            CounterRng rng(stream_key(g.seed, {0x0c}));
            bool ok = true;
            nlohmann::json j;
            if (o_min) {
                detail::check_shape_flags(o_n, o_m);
                if (o_n > 64) throw FlagError("--n", "the polytope oracle is limited to N <= 64");
                const auto shape = detail::on_flag("--pi", [&] { return SystemShape::make(o_n, o_m, o_pi, tol); });
                const double exact = min_entropy(shape, tol).min_entropy_bits;
                const double oracle = oracle_min_entropy(shape, o_restarts, o_iters, rng);
                const double omega = shape.m() < shape.n() && shape.pi() > 0.0 ? entropy_lower_bound_omega(shape) : 0.0;
                ok = exact <= oracle + tol && exact >= omega - tol;
                j = {{"check", "min_entropy"}, {"n", o_n}, {"m", o_m}, {"pi", shape.pi()}, {"exact_bits", exact},
                     {"oracle_bits", oracle}, {"omega_bound_bits", omega}, {"ok", ok}};
            } else {
                const auto rep = detail::on_flag("--n", [&] { return oracle_transform_check(o_n, o_k, o_trials, rng); });
                ok = rep.max_dev_unique <= 1e-12 && rep.max_dev_repeated <= 1e-12;
                j = to_json(rep);
                j["check"] = "transform";
                j["ok"] = ok;
            }
            result << j.dump(2) << '\n';
            if (!ok) {
                err << "entbound: error: oracle check failed\n";
                if (g.out.empty()) out << result.str();
                return 2;
            }
        }
    } catch (const FlagError& e) {
        err << "entbound: error: " << e.flag() << ": " << detail::one_line(e.what()) << '\n';
        return 1;
    } catch (const Error& e) {
        err << "entbound: error: " << detail::one_line(e.what()) << '\n';
        return e.kind() == ErrorKind::NumericFailure ? 2 : 1;
    } catch (const std::exception& e) {
        err << "entbound: error: internal: " << detail::one_line(e.what()) << '\n';
        return 2;
    }

    if (g.out.empty()) {
        out << result.str();
    } else {
        std::ofstream f(g.out, std::ios::binary);
        if (!f) {
            err << "entbound: error: --out: cannot write " << g.out << '\n';
            return 1;
        }
        f << result.str();
    }
    return 0;
}

}  // namespace entbound::cli
