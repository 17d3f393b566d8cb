// extrema.hpp
//
// Maximum- and minimum-entropy distributions over sorted vectors whose first
// M entries carry mass 1-pi and whose last N-M entries carry mass pi.
//
// The minimum is found by a discrete search: the minimizer repeats one value
// p_hat at the end of the head and the start of the tail, and p_hat must be
// one of the non-differentiable points pi/(N-M-j+1) of the entropy curve or
// the right end (1-pi)/M of the admissible interval.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"

namespace entbound {

namespace detail {

// Rounds t to the nearest integer when it is within relative 1e-9 of one.
inline double snap_integer(double t) {
    const double r = std::round(t);
    if (std::abs(t - r) <= 1e-9 * std::max(1.0, std::abs(t))) return r;
    return t;
}

// `mass` spread greedily into slots of size `cap`: `full` copies of cap
// followed by `remainder` in [0, cap).
struct TailFill {
    std::size_t full = 0;
    double remainder = 0.0;
};

inline TailFill fill_tail(double mass, double cap, std::size_t slots, double tol) {
    TailFill out;
    if (slots == 0 || mass <= 0.0) return out;
    if (cap <= 0.0) {
        out.remainder = mass;
        return out;
    }
    const double ratio = snap_integer(mass / cap);
    double full = std::floor(ratio);
    full = std::clamp(full, 0.0, static_cast<double>(slots));
    out.full = static_cast<std::size_t>(full);
    double r = mass - full * cap;
    // Guards are relative to the slot size so drift from the division never
    // creates or drops a slot.
    if (r <= tol * cap) r = 0.0;
    if (r >= cap - tol * cap && out.full < slots) {
        ++out.full;
        r = 0.0;
    }
    out.remainder = std::clamp(r, 0.0, cap);
    return out;
}

}  // namespace detail

/// The uniform-within-blocks distribution: M copies of (1-pi)/M, then N-M
/// copies of pi/(N-M).
inline SortedDistribution max_entropy_distribution(const SystemShape& shape) {
    std::vector<double> probs(shape.n());
    std::fill(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(shape.m()), shape.head_mean());
    std::fill(probs.begin() + static_cast<std::ptrdiff_t>(shape.m()), probs.end(), shape.tail_mean());
    return SortedDistribution::from_sorted(std::move(probs));
}

/// Closed form (1-pi) log2(M/(1-pi)) + pi log2((N-M)/pi).
inline double max_entropy(const SystemShape& shape) {
    const double pi = shape.pi();
    double h = 0.0;
    if (1.0 - pi > kZeroMass) h += (1.0 - pi) * std::log2(static_cast<double>(shape.m()) / (1.0 - pi));
    if (pi > kZeroMass && shape.n() > shape.m()) {
        h += pi * std::log2(static_cast<double>(shape.n() - shape.m()) / pi);
    }
    return std::max(0.0, h);
}

/// Minimum-entropy distribution for a single selected slot: as many copies of
/// 1-pi as fit, then the leftover, then zeros.
inline SortedDistribution min_entropy_m1(std::size_t n, double pi, double tol = kDefaultTolerance) {
    const SystemShape shape = SystemShape::make(n, 1, pi, tol);
    const double top = 1.0 - shape.pi();
    std::vector<double> probs(n, 0.0);
    probs[0] = top;
    const auto fill = detail::fill_tail(shape.pi(), top, n - 1, tol);
    for (std::size_t i = 0; i < fill.full; ++i) probs[1 + i] = top;
    if (fill.full < n - 1) probs[1 + fill.full] = fill.remainder;
    return SortedDistribution::from_sorted(std::move(probs), {}, tol);
}

/// Number of interior candidates, ceil((N-M-N pi)/(1-pi)) clamped to [0, N-M].
inline std::size_t candidate_count_y(const SystemShape& shape) {
    const double n = static_cast<double>(shape.n());
    const double m = static_cast<double>(shape.m());
    const double pi = shape.pi();
    const double t = detail::snap_integer((n - m - n * pi) / (1.0 - pi));
    const double y = std::clamp(std::ceil(t), 0.0, n - m);
    return static_cast<std::size_t>(y);
}

/// Ascending list of the p_hat values at which the minimum can occur.
inline std::vector<double> candidate_set(const SystemShape& shape, double tol = kDefaultTolerance) {
    if (shape.m() < 2) throw Error(ErrorKind::BadM, "candidate set needs M >= 2 (M=1 uses the staircase minimum)");
    if (shape.m() == shape.n() || shape.pi() <= 0.0) {
        throw Error(ErrorKind::Infeasible, "candidate set needs 0 < pi (pi=0 has a point-mass minimum)");
    }
    const double pi = shape.pi();
    const double lo = shape.tail_mean();
    const double hi = shape.head_mean();
    const std::size_t y = candidate_count_y(shape);
    const std::size_t tail_slots = shape.n() - shape.m();

    std::vector<double> out;
    out.reserve(y + 1);
    for (std::size_t j = 1; j <= y; ++j) {
        out.push_back(std::clamp(pi / static_cast<double>(tail_slots - j + 1), lo, hi));
    }
    out.push_back(hi);
    if (y == 0) out.back() = std::min(lo, hi);

    std::vector<double> unique;
    unique.reserve(out.size());
    for (double v : out) {
        if (unique.empty() || std::abs(v - unique.back()) > tol) unique.push_back(v);
    }
    return unique;
}

namespace detail {

inline void check_p_hat(const SystemShape& shape, double p_hat, double tol) {
    const double lo = shape.m() == shape.n() ? 0.0 : shape.tail_mean();
    const double hi = shape.head_mean();
    if (!std::isfinite(p_hat) || p_hat < lo - tol || p_hat > hi + tol) {
        throw Error(ErrorKind::BadPHat, "p_hat=" + std::to_string(p_hat) + " outside [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
    }
}

// Entropy of the assembled candidate without materializing it.
inline double candidate_entropy_closed_form(const SystemShape& shape, double p_hat, double tol) {
    const double head_first = std::max(0.0, (1.0 - shape.pi()) - static_cast<double>(shape.m() - 1) * p_hat);
    const auto fill = fill_tail(shape.pi(), p_hat, shape.n() - shape.m(), tol);
    return entropy_term(head_first) + static_cast<double>(shape.m() - 1 + fill.full) * entropy_term(p_hat) +
           entropy_term(fill.remainder);
}

}  // namespace detail

/// Head [(1-pi)-(M-1)p_hat, p_hat x (M-1)] followed by the tail
/// [p_hat x floor(pi/p_hat), pi mod p_hat, 0, ...].
inline SortedDistribution assemble_min_candidate(const SystemShape& shape, double p_hat,
                                                 double tol = kDefaultTolerance) {
    detail::check_p_hat(shape, p_hat, tol);
    p_hat = std::clamp(p_hat, shape.m() == shape.n() ? 0.0 : shape.tail_mean(), shape.head_mean());
    const std::size_t n = shape.n();
    const std::size_t m = shape.m();
    std::vector<double> probs(n, 0.0);
    probs[0] = std::max(0.0, (1.0 - shape.pi()) - static_cast<double>(m - 1) * p_hat);
    for (std::size_t i = 1; i < m; ++i) probs[i] = p_hat;
    const auto fill = detail::fill_tail(shape.pi(), p_hat, n - m, tol);
    for (std::size_t i = 0; i < fill.full; ++i) probs[m + i] = p_hat;
    if (m + fill.full < n) probs[m + fill.full] = fill.remainder;
    return SortedDistribution::from_sorted(std::move(probs), {}, tol);
}

struct MinEntropyCandidate {
    double p_hat = 0.0;
    double entropy_bits = 0.0;
    SortedDistribution distribution;
};

struct MinEntropyResult {
    SystemShape shape;
    std::size_t y = 0;
    std::vector<MinEntropyCandidate> candidates;
    std::size_t argmin_index = 0;
    double min_entropy_bits = 0.0;

    const SortedDistribution& argmin() const { return candidates.at(argmin_index).distribution; }
};

/// Exact minimum entropy over all feasible sorted distributions with the given
/// head/tail split.
inline MinEntropyResult min_entropy(const SystemShape& shape, double tol = kDefaultTolerance) {
    MinEntropyResult result{shape, 0, {}, 0, 0.0};
    const std::size_t n = shape.n();

    if (shape.pi() <= 0.0) {
        std::vector<double> point(n, 0.0);
        point[0] = 1.0;
        result.candidates.push_back({0.0, 0.0, SortedDistribution::from_sorted(std::move(point))});
        return result;
    }
    if (shape.m() == 1) {
        auto d = min_entropy_m1(n, shape.pi(), tol);
        const double h = entropy(d);
        result.y = candidate_count_y(shape);
        result.candidates.push_back({1.0 - shape.pi(), h, std::move(d)});
        result.min_entropy_bits = h;
        return result;
    }

    result.y = candidate_count_y(shape);
    for (double p_hat : candidate_set(shape, tol)) {
        auto d = assemble_min_candidate(shape, p_hat, tol);
        const double h = entropy(d);
        result.candidates.push_back({p_hat, h, std::move(d)});
    }
    // Lowest index wins ties.
    for (std::size_t i = 1; i < result.candidates.size(); ++i) {
        if (result.candidates[i].entropy_bits < result.candidates[result.argmin_index].entropy_bits) {
            result.argmin_index = i;
        }
    }
    result.min_entropy_bits = result.candidates[result.argmin_index].entropy_bits;
    return result;
}

/// Same value as min_entropy(shape).min_entropy_bits in O(N-M) time and O(1)
/// memory; used where the minimum is evaluated many times.
inline double min_entropy_bits(const SystemShape& shape, double tol = kDefaultTolerance) {
    const double pi = shape.pi();
    if (pi <= 0.0) return 0.0;
    if (shape.m() == 1) return detail::candidate_entropy_closed_form(shape, 1.0 - pi, tol);

    const double lo = shape.tail_mean();
    const double hi = shape.head_mean();
    const std::size_t y = candidate_count_y(shape);
    const std::size_t tail_slots = shape.n() - shape.m();
    double best = detail::candidate_entropy_closed_form(shape, y == 0 ? std::min(lo, hi) : hi, tol);
    for (std::size_t j = 1; j <= y; ++j) {
        const double p_hat = std::clamp(pi / static_cast<double>(tail_slots - j + 1), lo, hi);
        best = std::min(best, detail::candidate_entropy_closed_form(shape, p_hat, tol));
    }
    return best;
}

struct CurveSample {
    double p_hat = 0.0;
    double entropy_bits = 0.0;
    std::size_t segment_index = 0;
    bool is_junction = false;
};

/// Branch of the piecewise entropy curve containing p_hat: 0 at the left end,
/// i on (pi/(N-M-i+1), pi/(N-M-i)].
inline std::size_t curve_segment(const SystemShape& shape, double p_hat, double tol = kDefaultTolerance) {
    const auto fill = detail::fill_tail(shape.pi(), p_hat, shape.n() - shape.m(), tol);
    return (shape.n() - shape.m()) - fill.full;
}

/// Samples H(p_hat) uniformly over [pi/(N-M), (1-pi)/M] and adds a junction
/// row for every candidate point that no sample already hits. Rows are
/// sorted by p_hat.
inline std::vector<CurveSample> piecewise_curve(const SystemShape& shape, std::size_t samples,
                                                double tol = kDefaultTolerance) {
    if (samples < 2) throw Error(ErrorKind::BadConfig, "curve needs at least 2 samples");
    const auto candidates = candidate_set(shape, tol);  // validates M >= 2, pi > 0
    const double lo = shape.tail_mean();
    const double hi = shape.head_mean();

    auto sample_at = [&](double p_hat, bool junction) {
        const auto d = assemble_min_candidate(shape, p_hat, tol);
        return CurveSample{p_hat, entropy(d), curve_segment(shape, p_hat, tol), junction};
    };

    std::vector<CurveSample> rows;
    rows.reserve(samples + candidates.size());
    std::vector<bool> hit(candidates.size(), false);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
        const double p_hat = i + 1 == samples ? hi : lo + t * (hi - lo);
        bool junction = false;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (!hit[c] && std::abs(candidates[c] - p_hat) <= tol) {
                hit[c] = true;
                junction = true;
                break;
            }
        }
        rows.push_back(sample_at(p_hat, junction));
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (!hit[c]) rows.push_back(sample_at(candidates[c], true));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CurveSample& a, const CurveSample& b) { return a.p_hat < b.p_hat; });
    return rows;
}

}  // namespace entbound
