// oracle.hpp
//
// Independent checks of the analytic results: a randomized search for the
// minimum entropy over the feasible polytope, total enumeration of ordered
// tuples for the transforms, and the Monte Carlo sweep that compares
// observed error probabilities with the bounds.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "config.hpp"
#include "core.hpp"
#include "extrema.hpp"
#include "format.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "transform.hpp"

namespace entbound {

enum class SamplerFamily { dirichlet_symmetric, spiky };

struct Sampler {
    SamplerFamily family = SamplerFamily::dirichlet_symmetric;
    double alpha = 1.0;

    static Sampler dirichlet(double alpha) { return {SamplerFamily::dirichlet_symmetric, alpha}; }
    static Sampler spiky(double alpha = 0.2) { return {SamplerFamily::spiky, alpha}; }
};

inline std::string to_string(const Sampler& s) {
    return std::string(s.family == SamplerFamily::spiky ? "spiky" : "dirichlet") + ":" + format_number(s.alpha);
}

/// "dirichlet:1" or "spiky:0.2" (alpha defaults to 1 and 0.2).
inline Sampler parse_sampler(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::optional<double> alpha;
    if (colon != std::string::npos) {
        try {
            std::size_t used = 0;
            alpha = std::stod(text.substr(colon + 1), &used);
            if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error(ErrorKind::BadConfig, "sampler alpha is not a number: " + text);
        }
    }
    Sampler s;
    if (name == "dirichlet") {
        s = Sampler::dirichlet(alpha.value_or(1.0));
    } else if (name == "spiky") {
        s = Sampler::spiky(alpha.value_or(0.2));
        if (s.alpha >= 1.0) throw Error(ErrorKind::BadConfig, "spiky sampler needs alpha < 1");
    } else {
        throw Error(ErrorKind::BadConfig, "unknown sampler '" + name + "' (expected dirichlet or spiky)");
    }
    if (!(s.alpha > 0.0) || !std::isfinite(s.alpha)) throw Error(ErrorKind::BadConfig, "sampler alpha must be > 0");
    return s;
}

/// Symmetric Dirichlet draw over N objects, sorted descending.
inline SortedDistribution sample_distribution(std::size_t n, const Sampler& sampler, CounterRng& rng) {
    if (n < 1) throw Error(ErrorKind::BadM, "N must be >= 1");
    std::vector<double> w(n);
    for (auto& x : w) x = rng.gamma(sampler.alpha);
    // Gamma variates for tiny alpha can underflow; fall back to one spike.
    if (!(detail::stable_sum(w) > 0.0)) w[rng.below(n)] = 1.0;
    return make_distribution(w);
}

/// Random point of the feasible polytope for the shape: sorted Dirichlet
/// blocks pulled toward the maximum-entropy point just far enough to keep the
/// head minimum above the tail maximum.
inline SortedDistribution sample_feasible(const SystemShape& shape, CounterRng& rng) {
    const std::size_t n = shape.n();
    const std::size_t m = shape.m();
    // log-uniform concentration in [0.05, 5] spans spiky to flat blocks.
    const double alpha = std::exp(std::log(0.05) + rng.uniform() * std::log(100.0));
    auto block = [&](std::size_t len, double mass) {
        std::vector<double> b(len);
        for (auto& x : b) x = rng.gamma(alpha);
        const double total = detail::stable_sum(b);
        for (auto& x : b) x = total > 0.0 ? x / total * mass : mass / static_cast<double>(len);
        std::sort(b.begin(), b.end(), std::greater<>());
        return b;
    };
    auto head = block(m, 1.0 - shape.pi());
    std::vector<double> tail = n > m ? block(n - m, shape.pi()) : std::vector<double>{};

    const double mean_gap = shape.head_mean() - shape.tail_mean();
    const double overlap = tail.empty() ? 0.0 : tail.front() - head.back();
    double lambda_max = 1.0;
    if (overlap > 0.0) lambda_max = mean_gap / (mean_gap + overlap);
    const double lambda = rng.uniform() * lambda_max;

    std::vector<double> p(n);
    for (std::size_t i = 0; i < m; ++i) p[i] = lambda * head[i] + (1.0 - lambda) * shape.head_mean();
    for (std::size_t i = m; i < n; ++i) p[i] = lambda * tail[i - m] + (1.0 - lambda) * shape.tail_mean();
    for (std::size_t i = 1; i < n; ++i) p[i] = std::min(p[i], p[i - 1]);  // rounding only
    return SortedDistribution::from_sorted(std::move(p), {}, 1e-9);
}

namespace detail {

// Local search state for the polytope oracle, kept as the differences
// d[k] = p[k] - p[k+1] >= 0 (d[N-1] = p[N-1]); head/tail masses are then two
// linear equalities in d.
struct PolytopeWalker {
    std::size_t n;
    std::size_t m;
    std::vector<double> p;

    double entropy_now() const { return entropy(p); }

    // Transfer move: shift mass from a smaller entry to a larger one in
    // the same block, up to the nearest ordering constraint.
    bool transfer_move(CounterRng& rng) {
        const bool use_head = n == m || (m >= 2 && rng.below(2) == 0) || n - m < 2;
        const std::size_t lo = use_head ? 0 : m;
        const std::size_t hi = use_head ? m : n;
        if (hi - lo < 2) return false;
        std::size_t i = lo + rng.below(hi - lo);
        std::size_t j = lo + rng.below(hi - lo);
        if (i == j) return false;
        if (i > j) std::swap(i, j);
        while (i > lo && p[i - 1] == p[i]) --i;
        while (j + 1 < hi && p[j + 1] == p[j]) ++j;
        if (i >= j) return false;
        double room = p[j];
        if (i > 0) room = std::min(room, p[i - 1] - p[i]);
        if (j + 1 < n) room = std::min(room, p[j] - p[j + 1]);
        if (!(room > 0.0)) return false;
        const double delta = rng.below(2) == 0 ? room : room * rng.uniform();
        p[i] += delta;
        p[j] -= delta;
        return true;
    }

    // Edge move in difference space: pick three differences, move along the
    // direction that keeps both block masses fixed until one difference hits
    // zero, and keep the lower-entropy end. Entropy is concave along the
    // line, so the better end is never worse than the start.
    bool pivot_move(CounterRng& rng) {
        if (n < 3) return false;
        std::vector<double> d(n);
        for (std::size_t k = 0; k + 1 < n; ++k) d[k] = p[k] - p[k + 1];
        d[n - 1] = p[n - 1];
        std::size_t idx[3];
        idx[0] = rng.below(n);
        do idx[1] = rng.below(n); while (idx[1] == idx[0]);
        do idx[2] = rng.below(n); while (idx[2] == idx[0] || idx[2] == idx[1]);
        // Difference k raises the first k+1 entries: head weight min(k+1, M),
        // tail weight max(0, k+1-M).
        double a[3];
        double b[3];
        for (int t = 0; t < 3; ++t) {
            const double len = static_cast<double>(idx[t] + 1);
            a[t] = std::min(len, static_cast<double>(m));
            b[t] = std::max(0.0, len - static_cast<double>(m));
        }
        const double v[3] = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
        if (std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]) == 0.0) return false;
        double t_lo = -std::numeric_limits<double>::infinity();
        double t_hi = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 3; ++t) {
            if (v[t] > 0.0) t_lo = std::max(t_lo, -d[idx[t]] / v[t]);
            if (v[t] < 0.0) t_hi = std::min(t_hi, -d[idx[t]] / v[t]);
        }
        if (!(t_hi > t_lo) || !std::isfinite(t_lo) || !std::isfinite(t_hi)) return false;

        auto rebuild = [&](double step) {
            std::vector<double> dd = d;
            for (int t = 0; t < 3; ++t) dd[idx[t]] = std::max(0.0, d[idx[t]] + step * v[t]);
            std::vector<double> q(n);
            double acc = 0.0;
            for (std::size_t k = n; k > 0; --k) {
                acc += dd[k - 1];
                q[k - 1] = acc;
            }
            return q;
        };
        auto q_lo = rebuild(t_lo);
        auto q_hi = rebuild(t_hi);
        const double h_lo = entropy(q_lo);
        const double h_hi = entropy(q_hi);
        auto& best = h_lo <= h_hi ? q_lo : q_hi;
        if (std::min(h_lo, h_hi) > entropy_now()) return false;
        p = std::move(best);
        return true;
    }
};

}  // namespace detail

/// Best entropy found by a randomized multi-restart descent over the feasible
/// polytope. Never below the true minimum; intended for N up to ~32.
inline double oracle_min_entropy(const SystemShape& shape, std::size_t restarts, std::size_t iters, CounterRng& rng) {
    if (shape.m() == shape.n() || shape.pi() <= 0.0) return 0.0;  // point mass is feasible
    double best = std::numeric_limits<double>::infinity();
    const std::size_t patience = std::max<std::size_t>(50, 20 * shape.n());
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        detail::PolytopeWalker walker{shape.n(), shape.m(), sample_feasible(shape, rng).probs()};
        double current = walker.entropy_now();
        std::size_t stale = 0;
        for (std::size_t it = 0; it < iters && stale < patience; ++it) {
            const bool moved = rng.below(2) == 0 ? walker.transfer_move(rng) : walker.pivot_move(rng);
            const double h = moved ? walker.entropy_now() : current;
            if (h < current - 1e-15) {
                current = h;
                stale = 0;
            } else {
                ++stale;
            }
        }
        best = std::min(best, current);
    }
    return best;
}

struct TransformCheckReport {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t trials = 0;
    double max_dev_unique = 0.0;
    double max_dev_repeated = 0.0;
};

/// Compares both transforms with total enumeration of ordered k-tuples on
/// random distributions. N <= 6 and k <= 3.
inline TransformCheckReport oracle_transform_check(std::size_t n, std::size_t k, std::size_t trials, CounterRng& rng) {
    if (n > 6 || k > 3) throw Error(ErrorKind::TooLarge, "transform oracle needs N <= 6 and k <= 3");
    if (n < 1 || k < 1 || k > n) throw Error(ErrorKind::BadK, "transform oracle needs 1 <= k <= N");
    TransformCheckReport rep{n, k, trials, 0.0, 0.0};
    for (std::size_t t = 0; t < trials; ++t) {
        const auto d = sample_distribution(n, t % 2 == 0 ? Sampler::dirichlet(1.0) : Sampler::spiky(0.2), rng);
        const auto p = d.in_input_order();

        std::map<std::vector<std::size_t>, double> unique_ref;
        std::map<std::vector<std::size_t>, double> repeated_ref;
        std::vector<std::size_t> tuple(k, 0);
        std::size_t total = 1;
        for (std::size_t i = 0; i < k; ++i) total *= n;
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            for (std::size_t i = 0; i < k; ++i) {
                tuple[i] = c % n;
                c /= n;
            }
            auto key = tuple;
            std::sort(key.begin(), key.end());

            double with = 1.0;
            for (std::size_t id : tuple) with *= p[id];
            repeated_ref[key] += with;

            if (std::adjacent_find(key.begin(), key.end()) != key.end()) continue;
            double without = 1.0;
            for (std::size_t i = 0; i < k; ++i) {
                double remaining = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (std::find(tuple.begin(), tuple.begin() + static_cast<std::ptrdiff_t>(i), j) ==
                        tuple.begin() + static_cast<std::ptrdiff_t>(i)) {
                        remaining += p[j];
                    }
                }
                without *= p[tuple[i]] > 0.0 ? p[tuple[i]] / remaining : 0.0;
            }
            unique_ref[key] += without;
        }

        const auto u = transform_unique(d, n, k);
        for (const auto& c : u.composites) {
            rep.max_dev_unique = std::max(rep.max_dev_unique, std::abs(c.probability - unique_ref.at(c.ids)));
        }
        const auto r = transform_repeated(d, n, k);
        for (const auto& c : r.composites) {
            rep.max_dev_repeated = std::max(rep.max_dev_repeated, std::abs(c.probability - repeated_ref.at(c.ids)));
        }
        if (u.composites.size() != unique_ref.size() || r.composites.size() != repeated_ref.size()) {
            rep.max_dev_unique = std::max(rep.max_dev_unique, 1.0);
        }
    }
    return rep;
}

inline nlohmann::json to_json(const TransformCheckReport& r) {
    return {{"n", r.n}, {"k", r.k}, {"trials", r.trials},
            {"max_dev_unique", r.max_dev_unique}, {"max_dev_repeated", r.max_dev_repeated}};
}

// ---------------------------------------------------------------------------
// Sweep harness

struct SweepShape {
    std::size_t n = 0;
    std::size_t m = 0;
};

struct SweepConfig {
    std::vector<SweepShape> shapes;
    std::size_t scenarios_per_shape = 100;
    std::uint64_t seed = 42;
    std::vector<Sampler> samplers{Sampler::dirichlet(1.0), Sampler::spiky(0.2)};
    bool tight = true;
    std::size_t tight_grid = 4096;
    double tol = kDefaultTolerance;

    void validate() const {
        if (shapes.empty()) throw Error(ErrorKind::BadConfig, "sweep needs at least one shape");
        if (scenarios_per_shape < 1) throw Error(ErrorKind::BadConfig, "scenarios per shape must be >= 1");
        if (samplers.empty()) throw Error(ErrorKind::BadConfig, "sweep needs at least one sampler");
        for (const auto& s : shapes) check_m(s.n, s.m);
    }
};

/// The eight (N, M) configurations of the published verification plots, 100
/// scenarios each, alternating flat and spiky Dirichlet draws.
inline SweepConfig reference_sweep_config(std::uint64_t seed = 42) {
    SweepConfig c;
    c.shapes = {{20, 6}, {30, 20}, {50, 15}, {100, 60}, {200, 40}, {500, 300}, {1000, 400}, {1500, 1000}};
    c.scenarios_per_shape = 100;
    c.seed = seed;
    return c;
}

/// Sweep config file: `shapes=20x6,30x20`, `scenarios=100`, `seed=42`,
/// `samplers=dirichlet:1,spiky:0.2`, `tight=true`, `grid=4096`.
inline SweepConfig parse_sweep_config(std::string_view text) {
    SweepConfig c;
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "shapes") {
            c.shapes.clear();
            for (const auto& item : split_list(value)) {
                const auto x = item.find('x');
                if (x == std::string::npos) throw Error(ErrorKind::BadConfig, "shape '" + item + "' is not NxM");
                c.shapes.push_back({static_cast<std::size_t>(parse_unsigned(item.substr(0, x), "shapes")),
                                    static_cast<std::size_t>(parse_unsigned(item.substr(x + 1), "shapes"))});
            }
        } else if (key == "scenarios") {
            c.scenarios_per_shape = static_cast<std::size_t>(parse_unsigned(value, key));
        } else if (key == "seed") {
            c.seed = parse_unsigned(value, key);
        } else if (key == "samplers") {
            c.samplers.clear();
            for (const auto& item : split_list(value)) c.samplers.push_back(parse_sampler(item));
        } else if (key == "tight") {
            if (value != "true" && value != "false") throw Error(ErrorKind::BadConfig, "tight must be true or false");
            c.tight = value == "true";
        } else if (key == "grid") {
            c.tight_grid = static_cast<std::size_t>(parse_unsigned(value, key));
            if (c.tight_grid < 2) throw Error(ErrorKind::BadConfig, "grid must be >= 2");
        } else {
            throw Error(ErrorKind::BadConfig, "unknown sweep config key '" + key + "'");
        }
    }
    try {
        c.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::BadConfig, e.what());
    }
    return c;
}

struct SweepRecord {
    std::size_t scenario_id = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    double entropy_bits = 0.0;
    double pi_observed = 0.0;
    double pi_lb_analytic = 0.0;
    double pi_ub_analytic = 0.0;
    double pi_lb_tight = 0.0;
    double pi_ub_tight = 0.0;
    bool violation = false;
    std::string error;  // empty unless this row failed numerically
};

struct GapStats {
    std::size_t count = 0;
    double mean_gap = 0.0;
    double median_gap = 0.0;
    double mean_tight_gap = 0.0;
    double median_tight_gap = 0.0;
};

struct ShapeGapStats {
    std::size_t n = 0;
    std::size_t m = 0;
    bool m_at_least_half = false;
    GapStats stats;
};

struct SweepSummary {
    std::size_t total = 0;
    std::size_t violations = 0;
    std::size_t failures = 0;
    std::vector<ShapeGapStats> per_shape;
    GapStats m_at_least_half;
    GapStats m_below_half;
    double seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    SweepSummary summary;
};

namespace detail {

inline GapStats gap_stats(std::vector<double> gaps, std::vector<double> tight_gaps) {
    GapStats s;
    s.count = gaps.size();
    if (gaps.empty()) return s;
    auto median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    s.mean_gap = stable_sum(gaps) / static_cast<double>(gaps.size());
    s.median_gap = median(gaps);
    if (!tight_gaps.empty()) {
        s.mean_tight_gap = stable_sum(tight_gaps) / static_cast<double>(tight_gaps.size());
        s.median_tight_gap = median(tight_gaps);
    }
    return s;
}

inline SweepRecord evaluate_scenario(const SweepConfig& cfg, std::size_t shape_index, std::size_t scenario,
                                     const MinEntropyProfile* profile) {
    const auto& shape = cfg.shapes[shape_index];
    SweepRecord rec;
    rec.scenario_id = scenario;
    rec.n = shape.n;
    rec.m = shape.m;
    try {
        CounterRng rng(stream_key(cfg.seed, {shape_index, scenario}));
        const auto d = sample_distribution(shape.n, cfg.samplers[scenario % cfg.samplers.size()], rng);
        rec.entropy_bits = entropy(d);
        rec.pi_observed = tail_probability(d, shape.m);
        BoundOptions opt;
        opt.tight = cfg.tight;
        opt.tight_grid = cfg.tight_grid;
        opt.tol = cfg.tol;
        const auto r = bound_report(shape.n, shape.m, rec.entropy_bits, opt, profile);
        rec.pi_lb_analytic = r.pi_lb_analytic;
        rec.pi_ub_analytic = r.pi_ub_analytic;
        rec.pi_lb_tight = r.pi_lb_tight;
        rec.pi_ub_tight = r.pi_ub_tight;
        rec.violation = rec.pi_observed < rec.pi_lb_analytic - cfg.tol || rec.pi_observed > rec.pi_ub_analytic + cfg.tol;
    } catch (const std::exception& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.entropy_bits = rec.pi_observed = rec.pi_lb_analytic = rec.pi_ub_analytic = nan;
        rec.pi_lb_tight = rec.pi_ub_tight = nan;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace detail

/// Samples `scenarios_per_shape` distributions per shape and checks the
/// observed tail mass against the bounds at the observed entropy. Numerical
/// failures are recorded in the row and never stop the sweep.
inline SweepResult run_sweep(const SweepConfig& cfg, std::size_t threads = 1) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t per = cfg.scenarios_per_shape;

    std::vector<std::optional<MinEntropyProfile>> profiles(cfg.shapes.size());
    if (cfg.tight) {
        parallel_for(cfg.shapes.size(), threads, [&](std::size_t s) {
            profiles[s].emplace(cfg.shapes[s].n, cfg.shapes[s].m, cfg.tight_grid, cfg.tol);
        });
    }

    SweepResult out;
    out.records.resize(cfg.shapes.size() * per);
    parallel_for(out.records.size(), threads, [&](std::size_t idx) {
        const std::size_t s = idx / per;
        out.records[idx] = detail::evaluate_scenario(cfg, s, idx % per, profiles[s] ? &*profiles[s] : nullptr);
    });

    auto& sum = out.summary;
    sum.total = out.records.size();
    std::vector<double> hi_gaps, hi_tight, lo_gaps, lo_tight;
    for (std::size_t s = 0; s < cfg.shapes.size(); ++s) {
        std::vector<double> gaps, tight;
        for (std::size_t i = 0; i < per; ++i) {
            const auto& r = out.records[s * per + i];
            if (!r.error.empty()) {
                ++sum.failures;
                continue;
            }
            if (r.violation) ++sum.violations;
            gaps.push_back(r.pi_ub_analytic - r.pi_lb_analytic);
            if (cfg.tight) tight.push_back(r.pi_ub_tight - r.pi_lb_tight);
        }
        const bool at_least_half = 2 * cfg.shapes[s].m >= cfg.shapes[s].n;
        auto& g = at_least_half ? hi_gaps : lo_gaps;
        auto& gt = at_least_half ? hi_tight : lo_tight;
        g.insert(g.end(), gaps.begin(), gaps.end());
        gt.insert(gt.end(), tight.begin(), tight.end());
        sum.per_shape.push_back({cfg.shapes[s].n, cfg.shapes[s].m, at_least_half, detail::gap_stats(gaps, tight)});
    }
    sum.m_at_least_half = detail::gap_stats(hi_gaps, hi_tight);
    sum.m_below_half = detail::gap_stats(lo_gaps, lo_tight);
    sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

inline constexpr const char* kSweepCsvHeader =
    "scenario_id,n,m,entropy_bits,pi_observed,pi_lb_analytic,pi_ub_analytic,pi_lb_tight,pi_ub_tight,violation";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    os << kSweepCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.scenario_id << ',' << r.n << ',' << r.m << ',' << format_number(r.entropy_bits) << ','
           << format_number(r.pi_observed) << ',' << format_number(r.pi_lb_analytic) << ','
           << format_number(r.pi_ub_analytic) << ',' << format_number(r.pi_lb_tight) << ','
           << format_number(r.pi_ub_tight) << ',' << (r.violation ? 1 : 0) << '\n';
    }
}

inline nlohmann::json to_json(const GapStats& g) {
    return {{"count", g.count},
            {"mean_gap", g.mean_gap},
            {"median_gap", g.median_gap},
            {"mean_tight_gap", g.mean_tight_gap},
            {"median_tight_gap", g.median_tight_gap}};
}

/// Summary JSON. Wall-clock time is left out so the output stays
/// reproducible.
inline nlohmann::json to_json(const SweepSummary& s) {
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& p : s.per_shape) {
        auto j = to_json(p.stats);
        j["n"] = p.n;
        j["m"] = p.m;
        j["regime"] = p.m_at_least_half ? "m_ge_half_n" : "m_lt_half_n";
        shapes.push_back(std::move(j));
    }
    return {{"total", s.total},
            {"violations", s.violations},
            {"failures", s.failures},
            {"gap_stats", {{"m_ge_half_n", to_json(s.m_at_least_half)},
                           {"m_lt_half_n", to_json(s.m_below_half)},
                           {"per_shape", shapes}}}};
}

inline nlohmann::json to_json(const SweepRecord& r) {
    using detail::number_or_null;
    nlohmann::json j = {{"scenario_id", r.scenario_id},
                        {"n", r.n},
                        {"m", r.m},
                        {"entropy_bits", number_or_null(r.entropy_bits)},
                        {"pi_observed", number_or_null(r.pi_observed)},
                        {"pi_lb_analytic", number_or_null(r.pi_lb_analytic)},
                        {"pi_ub_analytic", number_or_null(r.pi_ub_analytic)},
                        {"pi_lb_tight", number_or_null(r.pi_lb_tight)},
                        {"pi_ub_tight", number_or_null(r.pi_ub_tight)},
                        {"violation", r.violation}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

}  // namespace entbound
