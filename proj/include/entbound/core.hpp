// core.hpp
//
// Validated probability distributions, base-2 entropy, and the head/tail
// feasibility geometry shared by every other module.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <locale>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace entbound {

inline constexpr double kDefaultTolerance = 1e-9;

// Entries at or below this value are exact zeros for entropy purposes.
inline constexpr double kZeroMass = 1e-15;

enum class ErrorKind {
    AllZero,
    InvalidEntry,
    BadM,
    BadK,
    Infeasible,
    BadPHat,
    BadEntropy,
    TooLarge,
    DuplicateId,
    ZeroDenominator,
    BadConfig,
    NumericFailure,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::AllZero: return "AllZero";
        case ErrorKind::InvalidEntry: return "InvalidEntry";
        case ErrorKind::BadM: return "BadM";
        case ErrorKind::BadK: return "BadK";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::BadPHat: return "BadPHat";
        case ErrorKind::BadEntropy: return "BadEntropy";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::DuplicateId: return "DuplicateId";
        case ErrorKind::ZeroDenominator: return "ZeroDenominator";
        case ErrorKind::BadConfig: return "BadConfig";
        case ErrorKind::NumericFailure: return "NumericFailure";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Size caps; every field can be raised by the caller (the CLI reads them
// from the environment).
struct Limits {
    std::size_t max_states = 10'000'000;
    std::size_t max_composites = 2'000'000;
    int max_k_unique = 8;
    int max_k_repeated = 12;
};

namespace detail {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <class Range>
double stable_sum(const Range& values) {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

}  // namespace detail

/// -x log2 x with the 0 log 0 = 0 convention.
inline double entropy_term(double x) {
    if (x <= kZeroMass) return 0.0;
    return -x * std::log2(x);
}

/// Probability vector sorted non-increasing, with the permutation back to the
/// caller's object ids. Immutable once built.
class SortedDistribution {
public:
    /// Takes an already sorted vector. `original_index[i]` is the object id of
    /// sorted position i; an empty permutation means identity.
    static SortedDistribution from_sorted(std::vector<double> probs,
                                          std::vector<std::size_t> original_index = {},
                                          double tol = kDefaultTolerance) {
        if (probs.empty()) throw Error(ErrorKind::InvalidEntry, "distribution must have at least one entry");
        if (original_index.empty()) {
            original_index.resize(probs.size());
            std::iota(original_index.begin(), original_index.end(), std::size_t{0});
        }
        if (original_index.size() != probs.size()) {
            throw Error(ErrorKind::InvalidEntry, "permutation length does not match distribution length");
        }
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (!std::isfinite(probs[i]) || probs[i] < -tol) {
                throw Error(ErrorKind::InvalidEntry, "entry " + std::to_string(i) + " is negative or not finite");
            }
            if (probs[i] < 0.0) probs[i] = 0.0;
            if (i > 0 && probs[i] > probs[i - 1] + tol) {
                throw Error(ErrorKind::InvalidEntry, "entries are not sorted non-increasing at position " + std::to_string(i));
            }
        }
        const double total = detail::stable_sum(probs);
        if (std::abs(total - 1.0) > tol) {
            throw Error(ErrorKind::InvalidEntry, "entries sum to " + std::to_string(total) + ", expected 1");
        }
        std::vector<bool> seen(probs.size(), false);
        for (std::size_t id : original_index) {
            if (id >= probs.size() || seen[id]) throw Error(ErrorKind::InvalidEntry, "permutation is not a bijection");
            seen[id] = true;
        }
        return SortedDistribution(std::move(probs), std::move(original_index));
    }

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    const std::vector<std::size_t>& original_index() const noexcept { return original_index_; }

    /// Probability of an object by its input id.
    double prob_of_id(std::size_t id) const {
        if (id >= probs_.size()) throw Error(ErrorKind::InvalidEntry, "object id " + std::to_string(id) + " out of range");
        return probs_[inverse_[id]];
    }

    /// Probabilities in the caller's original object order.
    std::vector<double> in_input_order() const {
        std::vector<double> out(probs_.size());
        for (std::size_t i = 0; i < probs_.size(); ++i) out[original_index_[i]] = probs_[i];
        return out;
    }

private:
    SortedDistribution(std::vector<double> probs, std::vector<std::size_t> index)
        : probs_(std::move(probs)), original_index_(std::move(index)), inverse_(probs_.size()) {
        for (std::size_t i = 0; i < probs_.size(); ++i) inverse_[original_index_[i]] = i;
    }

    std::vector<double> probs_;
    std::vector<std::size_t> original_index_;
    std::vector<std::size_t> inverse_;
};

/// Normalizes raw non-negative scores q into p = q / sum(q) and sorts them
/// descending. Ties keep input order.
inline SortedDistribution make_distribution(const std::vector<double>& raw,
                                            const Limits& limits = {}) {
    if (raw.empty()) throw Error(ErrorKind::AllZero, "no entries");
    if (raw.size() > limits.max_states) {
        throw Error(ErrorKind::TooLarge, "N=" + std::to_string(raw.size()) + " exceeds the state cap " +
                                             std::to_string(limits.max_states));
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]) || raw[i] < 0.0) {
            throw Error(ErrorKind::InvalidEntry, "entry " + std::to_string(i) + " is negative or not finite");
        }
    }
    const double total = detail::stable_sum(raw);
    if (!(total > 0.0)) throw Error(ErrorKind::AllZero, "no positive mass");

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });

    std::vector<double> probs(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) probs[i] = raw[order[i]] / total;
    return SortedDistribution::from_sorted(std::move(probs), std::move(order));
}

/// Base-2 Shannon entropy in bits.
inline double entropy(const std::vector<double>& probs) {
    detail::CompensatedSum acc;
    for (double p : probs) acc.add(entropy_term(p));
    return std::max(0.0, acc.value());
}

inline double entropy(const SortedDistribution& d) { return entropy(d.probs()); }

inline void check_m(std::size_t n, std::size_t m) {
    if (n < 1) throw Error(ErrorKind::BadM, "N must be >= 1");
    if (m < 1 || m > n) {
        throw Error(ErrorKind::BadM, "M=" + std::to_string(m) + " outside [1, N=" + std::to_string(n) + "]");
    }
}

/// Mass of the last N-M sorted entries, i.e. the optimal strategy's error
/// probability when one object must be hit.
inline double tail_probability(const SortedDistribution& d, std::size_t m) {
    check_m(d.size(), m);
    // Summed smallest-first.
    detail::CompensatedSum acc;
    for (std::size_t i = d.size(); i > m; --i) acc.add(d[i - 1]);
    return std::clamp(acc.value(), 0.0, 1.0);
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

/// Largest achievable tail mass for N states and M selected: (N-M)/N.
inline double max_feasible_pi(std::size_t n, std::size_t m) {
    check_m(n, m);
    return static_cast<double>(n - m) / static_cast<double>(n);
}

inline Interval feasible_pi_range(std::size_t n, std::size_t m) { return {0.0, max_feasible_pi(n, m)}; }

/// (N, M, pi) with the mean condition (1-pi)/M >= pi/(N-M) enforced.
class SystemShape {
public:
    /// Values of pi within `tol` outside [0, (N-M)/N] are snapped onto the
    /// boundary; anything further out is Infeasible.
    static SystemShape make(std::size_t n, std::size_t m, double pi, double tol = kDefaultTolerance) {
        check_m(n, m);
        if (!std::isfinite(pi)) throw Error(ErrorKind::Infeasible, "pi is not finite");
        const double hi = max_feasible_pi(n, m);
        if (pi < -tol || pi > hi + tol) {
            throw Error(ErrorKind::Infeasible, "pi=" + std::to_string(pi) + " outside feasible range [0, " +
                                                   std::to_string(hi) + "] for N=" + std::to_string(n) +
                                                   ", M=" + std::to_string(m));
        }
        return SystemShape(n, m, std::clamp(pi, 0.0, hi));
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }
    double pi() const noexcept { return pi_; }

    double head_mean() const noexcept { return (1.0 - pi_) / static_cast<double>(m_); }
    // Capped at head_mean(): at the feasibility boundary the two agree up to
    // rounding, and the cap keeps [tail_mean, head_mean] a valid interval.
    double tail_mean() const noexcept {
        return m_ == n_ ? 0.0 : std::min(pi_ / static_cast<double>(n_ - m_), head_mean());
    }
    bool at_boundary(double tol = kDefaultTolerance) const {
        return pi_ >= max_feasible_pi(n_, m_) - tol;
    }

private:
    SystemShape(std::size_t n, std::size_t m, double pi) : n_(n), m_(m), pi_(pi) {}

    std::size_t n_;
    std::size_t m_;
    double pi_;
};

/// Parses a distribution file: either a JSON array of numbers, a JSON object
/// with a "distribution" array, or one number per line with `#` comments.
inline std::vector<double> parse_weights(std::string_view text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && (text[first] == '[' || text[first] == '{')) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::InvalidEntry, std::string("malformed JSON weights: ") + e.what());
        }
        if (j.is_object()) {
            if (!j.contains("distribution")) throw Error(ErrorKind::InvalidEntry, "JSON object has no \"distribution\" array");
            j = j.at("distribution");
        }
        if (!j.is_array()) throw Error(ErrorKind::InvalidEntry, "JSON weights must be an array");
        std::vector<double> out;
        out.reserve(j.size());
        for (const auto& v : j) {
            if (!v.is_number()) throw Error(ErrorKind::InvalidEntry, "JSON weights must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<double> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        std::string token;
        if (!(ls >> token)) continue;
        std::istringstream ts(token);
        ts.imbue(std::locale::classic());
        double v = 0.0;
        if (!(ts >> v) || !ts.eof()) {
            throw Error(ErrorKind::InvalidEntry, "line " + std::to_string(line_no) + ": not a number: " + token);
        }
        std::string extra;
        if (ls >> extra) throw Error(ErrorKind::InvalidEntry, "line " + std::to_string(line_no) + ": more than one value");
        out.push_back(v);
    }
    return out;
}

inline std::vector<double> read_weights_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidEntry, "cannot open distribution file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_weights(buf.str());
}

}  // namespace entbound
