// scenarios.hpp
//
// Application wrappers: proxy cache prefetch (one page, several pages per
// user, several independent users) and opportunistic channel scheduling.
// Each produces a bound report for the (possibly transformed) system plus a
// seeded Monte Carlo estimate of the miss or merit rate.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "config.hpp"
#include "core.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "transform.hpp"

namespace entbound {

enum class ScenarioKind { cache_single, cache_multipage, cache_multiuser, scheduling };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::cache_single: return "cache_single";
        case ScenarioKind::cache_multipage: return "cache_multipage";
        case ScenarioKind::cache_multiuser: return "cache_multiuser";
        case ScenarioKind::scheduling: return "scheduling";
    }
    return "cache_single";
}

inline ScenarioKind parse_scenario_kind(const std::string& s) {
    if (s == "cache_single") return ScenarioKind::cache_single;
    if (s == "cache_multipage") return ScenarioKind::cache_multipage;
    if (s == "cache_multiuser") return ScenarioKind::cache_multiuser;
    if (s == "scheduling") return ScenarioKind::scheduling;
    throw Error(ErrorKind::BadConfig,
                "kind must be cache_single, cache_multipage, cache_multiuser or scheduling, got '" + s + "'");
}

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::cache_single;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 1;
    std::optional<double> zipf_s;         // popularity p_i ∝ i^(-s)
    std::vector<double> weights;          // explicit goodness scores, used when zipf_s is unset
    std::uint64_t trials = 0;
    std::uint64_t seed = 42;
    std::string threshold_note;           // annotation only
    double tol = kDefaultTolerance;
    Limits limits{};

    bool is_cache() const { return kind != ScenarioKind::scheduling; }

    void validate() const {
        if (zipf_s) {
            if (!(*zipf_s > 0.0)) throw Error(ErrorKind::BadConfig, "zipf_s must be > 0");
            if (!weights.empty()) throw Error(ErrorKind::BadConfig, "give either zipf_s or weights, not both");
        } else if (weights.empty()) {
            throw Error(ErrorKind::BadConfig, "popularity missing: set zipf_s or weights/weights_file");
        } else if (weights.size() != n) {
            throw Error(ErrorKind::BadConfig, "n=" + std::to_string(n) + " but " + std::to_string(weights.size()) +
                                                  " weights were given");
        }
        if (n < 1) throw Error(ErrorKind::BadConfig, "n must be >= 1");
        if (m < 1 || m > n) throw Error(ErrorKind::BadConfig, "m must satisfy 1 <= m <= n");
        if (k < 1 || k > m) throw Error(ErrorKind::BadConfig, "k must satisfy 1 <= k <= m");
        if (kind == ScenarioKind::cache_single && k != 1) throw Error(ErrorKind::BadConfig, "cache_single needs k=1");
        if (kind == ScenarioKind::scheduling && k != m) throw Error(ErrorKind::BadConfig, "scheduling needs k=m");
    }
};

/// Normalized Zipf popularity over ranks 1..N.
inline std::vector<double> zipf_weights(std::size_t n, double s) {
    if (!(s > 0.0)) throw Error(ErrorKind::BadConfig, "zipf_s must be > 0");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -s);
    const double total = detail::stable_sum(w);
    for (auto& x : w) x /= total;
    return w;
}

/// Parses the flat config format. `weights_file` is resolved relative to
/// `base_dir`; `weights=0.5,0.3,0.2` gives the scores inline. When `n` is
/// omitted it is taken from the weights; when `k` is omitted it defaults to
/// 1, or to `m` for scheduling.
inline ScenarioConfig parse_scenario_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
    ScenarioConfig c;
    std::optional<std::size_t> n, k;
    bool have_kind = false, have_m = false;
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "kind") {
            c.kind = parse_scenario_kind(value);
            have_kind = true;
        } else if (key == "n") {
            n = static_cast<std::size_t>(parse_unsigned(value, key));
        } else if (key == "m") {
            c.m = static_cast<std::size_t>(parse_unsigned(value, key));
            have_m = true;
        } else if (key == "k") {
            k = static_cast<std::size_t>(parse_unsigned(value, key));
        } else if (key == "zipf_s") {
            c.zipf_s = parse_real(value, key);
        } else if (key == "weights_file") {
            std::filesystem::path p(value);
            if (p.is_relative()) p = base_dir / p;
            try {
                c.weights = read_weights_file(p.string());
            } catch (const Error& e) {
                throw Error(ErrorKind::BadConfig, std::string("weights_file: ") + e.what());
            }
        } else if (key == "weights") {
            for (const auto& item : split_list(value)) c.weights.push_back(parse_real(item, key));
        } else if (key == "trials") {
            c.trials = parse_unsigned(value, key);
        } else if (key == "seed") {
            c.seed = parse_unsigned(value, key);
        } else if (key == "threshold_note") {
            c.threshold_note = value;
        } else {
            throw Error(ErrorKind::BadConfig, "unknown scenario config key '" + key + "'");
        }
    }
    if (!have_kind) throw Error(ErrorKind::BadConfig, "kind is required");
    if (!have_m) throw Error(ErrorKind::BadConfig, "m is required");
    if (n) {
        c.n = *n;
    } else if (!c.weights.empty()) {
        c.n = c.weights.size();
    } else {
        throw Error(ErrorKind::BadConfig, "n is required with zipf_s");
    }
    c.k = k.value_or(c.kind == ScenarioKind::scheduling ? c.m : 1);
    c.validate();
    return c;
}

struct ScenarioReport {
    ScenarioConfig config;
    BoundReport bounds;              // for the transformed system (N', M', H')
    bool merit = false;              // rates below are ψ when true, π otherwise
    double exact_rate = 0.0;         // deterministic rate of the selected originals
    double optimal_rate = 0.0;       // rate of the top-M' composites, the bounded quantity
    std::optional<double> empirical_rate;
    std::optional<double> empirical_complement;
    bool within_bounds = false;
    bool selection_mismatch = false; // composites of the selected originals are not the top M'
    std::vector<std::size_t> selected_ids;
};

namespace detail {

// Draws sorted positions from a distribution by inverse CDF.
class PositionSampler {
public:
    explicit PositionSampler(const SortedDistribution& d) : cdf_(d.size()) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < d.size(); ++i) {
            acc.add(d[i]);
            cdf_[i] = acc.value();
        }
    }

    std::size_t draw(CounterRng& rng) const {
        const double u = rng.uniform() * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        if (i >= cdf_.size()) i = cdf_.size() - 1;
        while (i > 0 && mass(i) <= 0.0) --i;  // never land on a zero-mass entry
        return i;
    }

    /// Draws `count` distinct positions; rejection on repeats, which stays
    /// cheap because count <= M and the caps keep M small for these modes.
    std::vector<std::size_t> draw_distinct(std::size_t count, CounterRng& rng) const {
        std::vector<std::size_t> picked;
        picked.reserve(count);
        std::size_t attempts = 0;
        while (picked.size() < count) {
            const std::size_t i = draw(rng);
            if (std::find(picked.begin(), picked.end(), i) == picked.end()) {
                picked.push_back(i);
                attempts = 0;
            } else if (++attempts > 10'000) {
                picked.push_back(draw_remaining(picked, rng));
                attempts = 0;
            }
        }
        return picked;
    }

private:
    double mass(std::size_t i) const { return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1]; }

    std::size_t draw_remaining(const std::vector<std::size_t>& picked, CounterRng& rng) const {
        CompensatedSum rest;
        for (std::size_t i = 0; i < cdf_.size(); ++i) {
            if (std::find(picked.begin(), picked.end(), i) == picked.end()) rest.add(mass(i));
        }
        double u = rng.uniform() * rest.value();
        std::size_t last = 0;
        for (std::size_t i = 0; i < cdf_.size(); ++i) {
            if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
            last = i;
            u -= mass(i);
            if (u < 0.0 && mass(i) > 0.0) return i;
        }
        return last;
    }

    std::vector<double> cdf_;
};

}  // namespace detail

/// Runs the scenario: builds p, transforms for k > 1, reports bounds and the
/// exact, optimal and empirical rates.
inline ScenarioReport run_scenario(const ScenarioConfig& cfg, std::size_t threads = 1) {
    cfg.validate();
    ScenarioReport rep;
    rep.config = cfg;
    rep.merit = !cfg.is_cache();

    const auto d = make_distribution(cfg.zipf_s ? zipf_weights(cfg.n, *cfg.zipf_s) : cfg.weights, cfg.limits);
    rep.selected_ids.assign(d.original_index().begin(), d.original_index().begin() + static_cast<std::ptrdiff_t>(cfg.m));

    const TransformMode mode = cfg.kind == ScenarioKind::cache_multiuser ? TransformMode::repeated : TransformMode::unique;
    const auto sys = cfg.k == 1 ? detail::identity_transform(d, cfg.m, mode)
                                : transform(d, cfg.m, cfg.k, mode, cfg.limits, cfg.tol);

    BoundOptions opt;
    opt.tol = cfg.tol;
    opt.limits = cfg.limits;
    // The tight grid costs O(grid * N'); skip it for very large composite systems.
    opt.tight = sys.n_prime <= 100'000;
    rep.bounds = bound_report(sys.n_prime, sys.m_prime, entropy(sys.dist), opt);
    rep.bounds.k = cfg.k;
    rep.bounds.mode = cfg.k == 1 && cfg.kind == ScenarioKind::cache_single
                          ? BoundMode::direct
                          : (mode == TransformMode::unique ? BoundMode::unique : BoundMode::repeated);

    const double exact_pi = sys.selected_error();
    const double optimal_pi = sys.optimal_error();
    rep.exact_rate = rep.merit ? 1.0 - exact_pi : exact_pi;
    rep.optimal_rate = rep.merit ? 1.0 - optimal_pi : optimal_pi;
    rep.selection_mismatch = sys.selection_mismatch(cfg.tol);
    rep.within_bounds = optimal_pi >= rep.bounds.pi_lb_analytic - cfg.tol &&
                        optimal_pi <= rep.bounds.pi_ub_analytic + cfg.tol;

    if (cfg.trials > 0) {
        const detail::PositionSampler sampler(d);
        const bool without_replacement = mode == TransformMode::unique;
        std::vector<unsigned char> hit(cfg.trials, 0);
        parallel_for(cfg.trials, threads, [&](std::size_t t) {
            CounterRng rng(stream_key(cfg.seed, {static_cast<std::uint64_t>(t)}));
            bool all_selected = true;
            if (without_replacement && cfg.k > 1) {
                for (std::size_t pos : sampler.draw_distinct(cfg.k, rng)) all_selected = all_selected && pos < cfg.m;
            } else {
                for (std::size_t j = 0; j < cfg.k; ++j) all_selected = sampler.draw(rng) < cfg.m && all_selected;
            }
            hit[t] = all_selected ? 1 : 0;
        });
        std::uint64_t hits = 0;
        for (unsigned char h : hit) hits += h;
        const double hit_rate = static_cast<double>(hits) / static_cast<double>(cfg.trials);
        const double miss_rate = static_cast<double>(cfg.trials - hits) / static_cast<double>(cfg.trials);
        rep.empirical_rate = rep.merit ? hit_rate : miss_rate;
        rep.empirical_complement = rep.merit ? miss_rate : hit_rate;
    }
    return rep;
}

inline nlohmann::json to_json(const ScenarioReport& r) {
    auto j = to_json(r.bounds);
    j["kind"] = to_string(r.config.kind);
    j["objects"] = {{"n", r.config.n}, {"m", r.config.m}};
    j["metric"] = r.merit ? "psi" : "pi";
    j["exact_rate"] = r.exact_rate;
    j["optimal_rate"] = r.optimal_rate;
    j["empirical_rate"] = r.empirical_rate ? nlohmann::json(*r.empirical_rate) : nlohmann::json();
    j["empirical_complement"] = r.empirical_complement ? nlohmann::json(*r.empirical_complement) : nlohmann::json();
    j["trials"] = r.config.trials;
    j["seed"] = r.config.seed;
    j["within_bounds"] = r.within_bounds;
    j["selection_mismatch"] = r.selection_mismatch;
    j["selected_ids"] = r.selected_ids;
    if (!r.config.threshold_note.empty()) j["threshold_note"] = r.config.threshold_note;
    return j;
}

}  // namespace entbound
