// transform.hpp
//
// Turns an N-object system with performance requirement k into a 1-object
// system whose objects are k-subsets (unique) or k-multisets (repeated) of
// the originals.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace entbound {

enum class TransformMode { unique, repeated };

inline const char* to_string(TransformMode mode) { return mode == TransformMode::unique ? "unique" : "repeated"; }

inline TransformMode parse_transform_mode(const std::string& s) {
    if (s == "unique") return TransformMode::unique;
    if (s == "repeated") return TransformMode::repeated;
    throw Error(ErrorKind::BadConfig, "mode must be 'unique' or 'repeated', got '" + s + "'");
}

/// C(n, k), or nullopt when it does not fit in 64 bits.
inline std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        r = r * (n - i) / (i + 1);
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    }
    return static_cast<std::uint64_t>(r);
}

/// Multiset coefficient C(n+k-1, k).
inline std::optional<std::uint64_t> multichoose(std::uint64_t n, std::uint64_t k) {
    if (n == 0) return k == 0 ? 1 : 0;
    return binomial(n + k - 1, k);
}

struct Composite {
    std::vector<std::size_t> ids;  // original object ids, non-decreasing
    double probability = 0.0;
    bool in_selected = false;  // every member lies in the top-M originals
};

struct TransformedSystem {
    std::size_t n_prime = 0;
    std::size_t m_prime = 0;
    SortedDistribution dist;
    TransformMode mode = TransformMode::unique;
    std::size_t k = 1;
    std::vector<Composite> composites;  // composites[i] sits at sorted position i of dist

    /// Mass outside the composites built from the selected originals.
    double selected_error() const {
        detail::CompensatedSum acc;
        for (auto it = composites.rbegin(); it != composites.rend(); ++it) {
            if (!it->in_selected) acc.add(it->probability);
        }
        return std::clamp(acc.value(), 0.0, 1.0);
    }

    /// Mass outside the M' most probable composites.
    double optimal_error() const { return tail_probability(dist, m_prime); }

    bool selection_mismatch(double tol = kDefaultTolerance) const {
        return std::abs(selected_error() - optimal_error()) > tol;
    }
};

namespace detail {

inline void check_transform_args(const SortedDistribution& d, std::size_t m, std::size_t k) {
    check_m(d.size(), m);
    if (k < 1 || k > m) {
        throw Error(ErrorKind::BadK, "k=" + std::to_string(k) + " outside [1, M=" + std::to_string(m) + "]");
    }
}

inline void check_composite_count(std::optional<std::uint64_t> count, const Limits& limits, const char* what) {
    if (!count || *count > limits.max_composites) {
        throw Error(ErrorKind::TooLarge, std::string(what) + " has " + (count ? std::to_string(*count) : "> 2^64") +
                                             " composites, above the cap of " + std::to_string(limits.max_composites));
    }
}

// Sorts composites by probability (descending, ties by member ids) and
// wraps them into a TransformedSystem.
inline TransformedSystem finish_transform(std::vector<Composite> raw, std::size_t m_prime, TransformMode mode,
                                          std::size_t k, double tol) {
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (raw[a].probability != raw[b].probability) return raw[a].probability > raw[b].probability;
        return raw[a].ids < raw[b].ids;
    });
    std::vector<Composite> sorted;
    std::vector<double> probs;
    sorted.reserve(raw.size());
    probs.reserve(raw.size());
    for (std::size_t i : order) {
        probs.push_back(raw[i].probability);
        sorted.push_back(std::move(raw[i]));
    }
    const std::size_t n_prime = sorted.size();
    return TransformedSystem{n_prime, m_prime, SortedDistribution::from_sorted(std::move(probs), std::move(order), tol),
                             mode, k, std::move(sorted)};
}

inline TransformedSystem identity_transform(const SortedDistribution& d, std::size_t m, TransformMode mode) {
    std::vector<Composite> comps(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) comps[i] = Composite{{d.original_index()[i]}, d[i], i < m};
    return TransformedSystem{d.size(), m, d, mode, 1, std::move(comps)};
}

inline std::vector<std::size_t> member_ids(const SortedDistribution& d, const std::vector<std::size_t>& positions) {
    std::vector<std::size_t> ids(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) ids[i] = d.original_index()[positions[i]];
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace detail

/// Probability that sequential draws without replacement produce exactly the
/// given ordered tuple of object ids.
inline double sequential_probability(const SortedDistribution& d, const std::vector<std::size_t>& ordered_ids,
                                     double tol = kDefaultTolerance) {
    if (ordered_ids.size() > d.size()) throw Error(ErrorKind::BadK, "tuple longer than the number of objects");
    std::vector<bool> picked(d.size(), false);
    for (std::size_t id : ordered_ids) {
        if (id >= d.size()) throw Error(ErrorKind::InvalidEntry, "object id " + std::to_string(id) + " out of range");
        if (picked[id]) throw Error(ErrorKind::DuplicateId, "object id " + std::to_string(id) + " repeats in the tuple");
        picked[id] = true;
    }
    const auto by_id = d.in_input_order();
    std::fill(picked.begin(), picked.end(), false);
    double prob = 1.0;
    for (std::size_t id : ordered_ids) {
        detail::CompensatedSum remaining;
        for (std::size_t j = 0; j < by_id.size(); ++j) {
            if (!picked[j]) remaining.add(by_id[j]);
        }
        const double numerator = by_id[id];
        if (numerator > 0.0 && remaining.value() <= tol) {
            throw Error(ErrorKind::ZeroDenominator, "remaining mass vanished before object " + std::to_string(id));
        }
        prob *= numerator > 0.0 ? numerator / remaining.value() : 0.0;
        picked[id] = true;
    }
    return prob;
}

/// k-subsets; each subset's probability sums the sequential probabilities of
/// its k! orderings, computed by a DP over sub-masks.
inline TransformedSystem transform_unique(const SortedDistribution& d, std::size_t m, std::size_t k,
                                          const Limits& limits = {}, double tol = kDefaultTolerance) {
    detail::check_transform_args(d, m, k);
    if (k > static_cast<std::size_t>(limits.max_k_unique)) {
        throw Error(ErrorKind::TooLarge, "k=" + std::to_string(k) + " above the unique-mode cap " +
                                             std::to_string(limits.max_k_unique));
    }
    const std::size_t n = d.size();
    detail::check_composite_count(binomial(n, k), limits, "unique transform");
    if (k == 1) return detail::identity_transform(d, m, TransformMode::unique);

    // suffix[i] = mass of sorted positions >= i, accumulated smallest first.
    std::vector<double> suffix(n + 1, 0.0);
    {
        detail::CompensatedSum acc;
        for (std::size_t i = n; i > 0; --i) {
            acc.add(d[i - 1]);
            suffix[i - 1] = acc.value();
        }
    }
    auto gap_mass = [&](std::size_t a, std::size_t b) { return a < b ? std::max(0.0, suffix[a] - suffix[b]) : 0.0; };

    const std::size_t full = std::size_t{1} << k;
    std::vector<double> ways(full);
    std::vector<double> denom(full);
    std::vector<double> q(k);
    std::vector<std::size_t> pos(k);
    std::iota(pos.begin(), pos.end(), std::size_t{0});

    std::vector<Composite> raw;
    raw.reserve(*binomial(n, k));
    std::size_t m_prime = 0;
    while (true) {
        double outside = gap_mass(0, pos[0]) + gap_mass(pos[k - 1] + 1, n);
        for (std::size_t i = 0; i + 1 < k; ++i) outside += gap_mass(pos[i] + 1, pos[i + 1]);
        for (std::size_t i = 0; i < k; ++i) q[i] = d[pos[i]];

        for (std::size_t mask = 0; mask < full; ++mask) {
            double rest = outside;
            for (std::size_t i = 0; i < k; ++i) {
                if (!(mask >> i & 1U)) rest += q[i];
            }
            denom[mask] = rest;
        }
        std::fill(ways.begin(), ways.end(), 0.0);
        ways[0] = 1.0;
        for (std::size_t mask = 0; mask + 1 < full; ++mask) {
            if (ways[mask] == 0.0) continue;
            for (std::size_t i = 0; i < k; ++i) {
                if ((mask >> i & 1U) || q[i] <= 0.0) continue;
                ways[mask | (std::size_t{1} << i)] += ways[mask] * (q[i] / denom[mask]);
            }
        }
        const bool selected = pos[k - 1] < m;
        m_prime += selected ? 1 : 0;
        raw.push_back(Composite{detail::member_ids(d, pos), ways[full - 1], selected});

        // Next k-combination of sorted positions in lexicographic order.
        std::size_t i = k;
        while (i > 0 && pos[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++pos[i - 1];
        for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
    return detail::finish_transform(std::move(raw), m_prime, TransformMode::unique, k, tol);
}

/// k-multisets; probability is the multinomial coefficient times the product
/// of member probabilities.
inline TransformedSystem transform_repeated(const SortedDistribution& d, std::size_t m, std::size_t k,
                                            const Limits& limits = {}, double tol = kDefaultTolerance) {
    detail::check_transform_args(d, m, k);
    if (k > static_cast<std::size_t>(limits.max_k_repeated)) {
        throw Error(ErrorKind::TooLarge, "k=" + std::to_string(k) + " above the repeated-mode cap " +
                                             std::to_string(limits.max_k_repeated));
    }
    const std::size_t n = d.size();
    detail::check_composite_count(multichoose(n, k), limits, "repeated transform");
    if (k == 1) return detail::identity_transform(d, m, TransformMode::repeated);

    std::vector<double> factorial(k + 1, 1.0);
    for (std::size_t i = 1; i <= k; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

    std::vector<std::size_t> pos(k, 0);
    std::vector<Composite> raw;
    raw.reserve(*multichoose(n, k));
    std::size_t m_prime = 0;
    while (true) {
        double coeff = factorial[k];
        double prod = 1.0;
        std::size_t run = 1;
        for (std::size_t i = 0; i < k; ++i) {
            prod *= d[pos[i]];
            if (i + 1 < k && pos[i + 1] == pos[i]) {
                ++run;
            } else {
                coeff /= factorial[run];
                run = 1;
            }
        }
        const bool selected = pos[k - 1] < m;
        m_prime += selected ? 1 : 0;
        raw.push_back(Composite{detail::member_ids(d, pos), coeff * prod, selected});

        // Next non-decreasing k-tuple.
        std::size_t i = k;
        while (i > 0 && pos[i - 1] == n - 1) --i;
        if (i == 0) break;
        const std::size_t v = pos[i - 1] + 1;
        for (std::size_t j = i - 1; j < k; ++j) pos[j] = v;
    }
    return detail::finish_transform(std::move(raw), m_prime, TransformMode::repeated, k, tol);
}

inline TransformedSystem transform(const SortedDistribution& d, std::size_t m, std::size_t k, TransformMode mode,
                                   const Limits& limits = {}, double tol = kDefaultTolerance) {
    return mode == TransformMode::unique ? transform_unique(d, m, k, limits, tol)
                                         : transform_repeated(d, m, k, limits, tol);
}

}  // namespace entbound
