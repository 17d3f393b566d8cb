// bounds.hpp
//
// Bounds on the optimal strategy's error probability pi and merit
// probability psi = 1 - pi, given only the entropy H of the object
// distribution.
//
// Analytic bounds come from relaxing the exact entropy extrema:
//   lower: H <= H_max(pi) <= 1 + log2 M + pi log2(N/M - 1), valid for M < N/2.
//   upper: H >= H_min(pi) >= min(Omega(pi)), rearranged for pi.
// Tight bounds invert the exact extrema numerically instead.
//
// Erratum kept for reference: the printed Omega entries read
//   ((N-j) pi/(N-M-j+1)) log2((N-M)/(N(N-M-j+1))),
// which is negative. The relaxation that produces them bounds
// -log2 p_hat from below by log2(N(N-M-j+1)/(N-M)), so that is the
// orientation used here; it is also the one matching the denominators of the
// pi upper bound.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "extrema.hpp"
#include "transform.hpp"

namespace entbound {

inline void check_entropy(std::size_t n, double h, double tol = kDefaultTolerance) {
    if (!std::isfinite(h) || h < -tol || h > std::log2(static_cast<double>(n)) + tol) {
        throw Error(ErrorKind::BadEntropy, "H=" + std::to_string(h) + " outside [0, log2 N=" +
                                               std::to_string(std::log2(static_cast<double>(n))) + "]");
    }
}

/// Lower bound on the minimum entropy for the shape: the smallest entry of
/// Omega, clamped at 0.
inline double entropy_lower_bound_omega(const SystemShape& shape) {
    const double pi = shape.pi();
    if (pi <= 0.0 || shape.m() == shape.n()) return 0.0;
    const double n = static_cast<double>(shape.n());
    const double m = static_cast<double>(shape.m());
    const std::size_t y = candidate_count_y(shape);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= y; ++j) {
        const double slots = n - m - static_cast<double>(j) + 1.0;
        const double entry = (n - static_cast<double>(j)) * pi / slots * std::log2(n * slots / (n - m));
        best = std::min(best, entry);
    }
    if (shape.m() >= 2) {
        best = std::min(best, (n - static_cast<double>(y)) * (1.0 - pi) / m * std::log2(m));
    }
    if (!std::isfinite(best)) return 0.0;
    return std::max(0.0, best);
}

/// The original lower bound on pi without the M < N/2 restriction. Only
/// meaningful for comparison; nullopt where its denominator vanishes.
inline std::optional<double> flawed_pi_lower_bound(std::size_t n, std::size_t m, double h) {
    check_m(n, m);
    const double denom = std::log2(static_cast<double>(n) / static_cast<double>(m) - 1.0);
    if (!std::isfinite(denom) || denom == 0.0) return std::nullopt;
    return (h - 1.0 - std::log2(static_cast<double>(m))) / denom;
}

/// Unclamped lower-bound formula (0 when M >= N/2).
inline double pi_lower_bound_raw(std::size_t n, std::size_t m, double h) {
    check_m(n, m);
    if (2 * m >= n) return 0.0;
    const double md = static_cast<double>(m);
    return (h - 1.0 - std::log2(md)) / std::log2(static_cast<double>(n - m) / md);
}

inline double pi_lower_bound(std::size_t n, std::size_t m, double h, double tol = kDefaultTolerance) {
    check_m(n, m);
    check_entropy(n, h, tol);
    return std::clamp(pi_lower_bound_raw(n, m, h), 0.0, max_feasible_pi(n, m));
}

/// Unclamped upper-bound formula: max over j = 1..N-M of
/// H (N-M-j+1) / ((N-j) log2(N (N-M-j+1)/(N-M))), and 1 - H/log2 M when M >= 2.
inline double pi_upper_bound_raw(std::size_t n, std::size_t m, double h) {
    check_m(n, m);
    if (m == n) return 0.0;
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t slots = 1; slots <= n - m; ++slots) {
        const double r = static_cast<double>(slots);
        best = std::max(best, h * r / ((md + r - 1.0) * std::log2(nd * r / (nd - md))));
    }
    if (m >= 2) best = std::max(best, 1.0 - h / std::log2(md));
    return best;
}

inline double pi_upper_bound(std::size_t n, std::size_t m, double h, double tol = kDefaultTolerance) {
    check_m(n, m);
    check_entropy(n, h, tol);
    // Zero entropy means a point mass on the top object.
    if (h <= tol || m == n) return 0.0;
    const double lo = pi_lower_bound(n, m, h, tol);
    return std::clamp(pi_upper_bound_raw(n, m, h), lo, max_feasible_pi(n, m));
}

/// Smallest pi whose maximum entropy reaches H (bisection on the increasing
/// closed form).
inline double invert_max_entropy(std::size_t n, std::size_t m, double h, double tol = kDefaultTolerance) {
    check_m(n, m);
    check_entropy(n, h, tol);
    const double hi_pi = max_feasible_pi(n, m);
    if (h <= std::log2(static_cast<double>(m))) return 0.0;
    if (h >= std::log2(static_cast<double>(n)) - tol) return hi_pi;
    double lo = 0.0;
    double hi = hi_pi;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (max_entropy(SystemShape::make(n, m, mid, tol)) < h) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Minimum entropy sampled on a pi grid for one (N, M), reusable across
/// entropies. The upper inversion takes the largest grid point whose minimum
/// entropy does not exceed H and refines inside the next cell. H_min is not
/// known to be monotone in pi, so this is tight only up to grid resolution.
class MinEntropyProfile {
public:
    MinEntropyProfile(std::size_t n, std::size_t m, std::size_t grid = 4096, double tol = kDefaultTolerance)
        : n_(n), m_(m), tol_(tol), pi_max_(max_feasible_pi(n, m)) {
        if (grid < 2) throw Error(ErrorKind::BadConfig, "tight-bound grid needs at least 2 points");
        pis_.resize(grid);
        h_min_.resize(grid);
        for (std::size_t g = 0; g < grid; ++g) {
            pis_[g] = g + 1 == grid ? pi_max_ : pi_max_ * static_cast<double>(g) / static_cast<double>(grid - 1);
            h_min_[g] = eval(pis_[g]);
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }

    double upper(double h) const {
        check_entropy(n_, h, tol_);
        if (m_ == n_ || h <= tol_) return 0.0;
        std::size_t g = pis_.size();
        while (g > 0 && h_min_[g - 1] > h + tol_) --g;
        if (g == 0) return 0.0;
        if (g == pis_.size()) return pi_max_;
        double lo = pis_[g - 1];
        double hi = pis_[g];
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (eval(mid) <= h) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return lo;
    }

private:
    double eval(double pi) const { return min_entropy_bits(SystemShape::make(n_, m_, pi, tol_), tol_); }

    std::size_t n_;
    std::size_t m_;
    double tol_;
    double pi_max_;
    std::vector<double> pis_;
    std::vector<double> h_min_;
};

struct PiInterval {
    double lower = 0.0;
    double upper = 0.0;
};

inline PiInterval pi_bounds_tight(const MinEntropyProfile& profile, double h, double tol = kDefaultTolerance) {
    const std::size_t n = profile.n();
    const std::size_t m = profile.m();
    check_entropy(n, h, tol);
    if (h <= tol) return {0.0, 0.0};
    if (h >= std::log2(static_cast<double>(n)) - tol) return {max_feasible_pi(n, m), max_feasible_pi(n, m)};
    const double lower = invert_max_entropy(n, m, h, tol);
    return {lower, std::max(lower, profile.upper(h))};
}

inline PiInterval pi_bounds_tight(std::size_t n, std::size_t m, double h, std::size_t grid = 4096,
                                  double tol = kDefaultTolerance) {
    check_m(n, m);
    check_entropy(n, h, tol);
    return pi_bounds_tight(MinEntropyProfile(n, m, grid, tol), h, tol);
}

/// Bounds on the merit probability for k = 1: complements of the opposite pi
/// bounds, clamped to [M/N, 1].
inline PiInterval merit_bounds_k1(std::size_t n, std::size_t m, double h, double tol = kDefaultTolerance) {
    const double floor = static_cast<double>(m) / static_cast<double>(n);
    return {std::clamp(1.0 - pi_upper_bound(n, m, h, tol), floor, 1.0),
            std::clamp(1.0 - pi_lower_bound(n, m, h, tol), floor, 1.0)};
}

/// Closed form of the merit upper bound for M < N/2:
/// (log2(N-M) - H + 1) / log2(N/M - 1).
inline double merit_upper_closed_form(std::size_t n, std::size_t m, double h) {
    const double md = static_cast<double>(m);
    return (std::log2(static_cast<double>(n - m)) - h + 1.0) / std::log2(static_cast<double>(n - m) / md);
}

enum class BoundMode { direct, unique, repeated };

inline const char* to_string(BoundMode mode) {
    switch (mode) {
        case BoundMode::direct: return "direct";
        case BoundMode::unique: return "unique";
        case BoundMode::repeated: return "repeated";
    }
    return "direct";
}

struct BoundOptions {
    bool tight = true;
    std::size_t tight_grid = 4096;
    bool compare_flawed = false;
    double tol = kDefaultTolerance;
    Limits limits{};
};

struct BoundReport {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 1;
    BoundMode mode = BoundMode::direct;
    double entropy_bits = 0.0;
    double pi_lb_analytic = 0.0;
    double pi_ub_analytic = 0.0;
    double pi_lb_tight = std::numeric_limits<double>::quiet_NaN();
    double pi_ub_tight = std::numeric_limits<double>::quiet_NaN();
    double pi_lb_raw = 0.0;
    double pi_ub_raw = 0.0;
    double psi_lb = 0.0;
    double psi_ub = 0.0;
    std::vector<std::string> clamped;
    std::optional<double> flawed_pi_lb;
    bool compare_flawed = false;
};

/// Full report for a system of N objects with M selected and entropy H.
inline BoundReport bound_report(std::size_t n, std::size_t m, double h, const BoundOptions& opt = {},
                                const MinEntropyProfile* profile = nullptr) {
    check_m(n, m);
    check_entropy(n, h, opt.tol);
    h = std::clamp(h, 0.0, std::log2(static_cast<double>(n)));

    BoundReport r;
    r.n = n;
    r.m = m;
    r.entropy_bits = h;
    r.pi_lb_raw = pi_lower_bound_raw(n, m, h);
    r.pi_ub_raw = pi_upper_bound_raw(n, m, h);
    r.pi_lb_analytic = pi_lower_bound(n, m, h, opt.tol);
    r.pi_ub_analytic = pi_upper_bound(n, m, h, opt.tol);

    const double cap = max_feasible_pi(n, m);
    if (r.pi_lb_raw < 0.0) r.clamped.emplace_back("pi_lb_floor");
    if (r.pi_lb_raw > cap) r.clamped.emplace_back("pi_lb_ceiling");
    if (h <= opt.tol && m < n) r.clamped.emplace_back("pi_ub_zero_entropy");
    if (r.pi_ub_raw > cap && !(h <= opt.tol)) r.clamped.emplace_back("pi_ub_ceiling");
    if (r.pi_ub_raw < r.pi_lb_analytic) r.clamped.emplace_back("pi_ub_floor");

    const auto merit = merit_bounds_k1(n, m, h, opt.tol);
    r.psi_lb = merit.lower;
    r.psi_ub = merit.upper;

    if (opt.tight) {
        const auto t = profile ? pi_bounds_tight(*profile, h, opt.tol)
                               : pi_bounds_tight(n, m, h, opt.tight_grid, opt.tol);
        r.pi_lb_tight = t.lower;
        r.pi_ub_tight = t.upper;
    }
    if (opt.compare_flawed) {
        r.compare_flawed = true;
        r.flawed_pi_lb = flawed_pi_lower_bound(n, m, h);
    }
    return r;
}

/// Bounds for performance requirement k: transform to composites, then apply
/// the single-object bounds to (N', M', H').
inline BoundReport bounds_for_k(const SortedDistribution& d, std::size_t m, std::size_t k, TransformMode mode,
                                const BoundOptions& opt = {}) {
    const auto sys = transform(d, m, k, mode, opt.limits, opt.tol);
    auto r = bound_report(sys.n_prime, sys.m_prime, entropy(sys.dist), opt);
    r.k = k;
    r.mode = mode == TransformMode::unique ? BoundMode::unique : BoundMode::repeated;
    return r;
}

namespace detail {
inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }
}  // namespace detail

inline nlohmann::json to_json(const BoundReport& r) {
    nlohmann::json j;
    j["n"] = r.n;
    j["m"] = r.m;
    j["k"] = r.k;
    j["mode"] = to_string(r.mode);
    j["entropy_bits"] = r.entropy_bits;
    j["pi"] = {{"lb_analytic", r.pi_lb_analytic},
               {"ub_analytic", r.pi_ub_analytic},
               {"lb_tight", detail::number_or_null(r.pi_lb_tight)},
               {"ub_tight", detail::number_or_null(r.pi_ub_tight)},
               {"lb_raw", detail::number_or_null(r.pi_lb_raw)},
               {"ub_raw", detail::number_or_null(r.pi_ub_raw)}};
    j["psi"] = {{"lb", r.psi_lb}, {"ub", r.psi_ub}};
    j["clamped"] = r.clamped;
    if (r.compare_flawed) {
        j["compare_flawed"] = {{"pi_lb", r.flawed_pi_lb ? nlohmann::json(*r.flawed_pi_lb) : nlohmann::json()}};
    }
    return j;
}

}  // namespace entbound
