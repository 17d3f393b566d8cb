#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <entbound/bounds.hpp>
#include <entbound/extrema.hpp>
#include <entbound/oracle.hpp>
#include <entbound/random.hpp>

#include "support/reference.hpp"

using namespace entbound;

namespace {

void expect_probs(const SortedDistribution& d, const std::vector<double>& want, double tol = 1e-12) {
    ASSERT_EQ(d.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(d[i], want[i], tol) << "entry " << i;
}

// Head/tail masses and ordering hold for a candidate of `shape`.
void expect_feasible(const SortedDistribution& d, const SystemShape& shape, double tol = 1e-9) {
    ASSERT_EQ(d.size(), shape.n());
    double head = 0.0;
    for (std::size_t i = 0; i < shape.m(); ++i) head += d[i];
    EXPECT_NEAR(head, 1.0 - shape.pi(), tol);
    EXPECT_NEAR(tail_probability(d, shape.m()), shape.pi(), tol);
    for (std::size_t i = 1; i < d.size(); ++i) EXPECT_LE(d[i], d[i - 1] + tol);
}

}  // namespace

TEST(MaxEntropy, Distributions) {
    expect_probs(max_entropy_distribution(SystemShape::make(4, 2, 0.5)), {0.25, 0.25, 0.25, 0.25});
    expect_probs(max_entropy_distribution(SystemShape::make(5, 2, 0.4)), {0.3, 0.3, 0.4 / 3, 0.4 / 3, 0.4 / 3});
    expect_probs(max_entropy_distribution(SystemShape::make(3, 3, 0.0)), {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

TEST(MaxEntropy, ClosedFormValues) {
    EXPECT_NEAR(max_entropy(SystemShape::make(4, 2, 0.5)), 2.0, 1e-12);
    // 40-digit reference: 3.692878689342...
    EXPECT_NEAR(max_entropy(SystemShape::make(15, 5, 0.4)), 3.6928786893420, 1e-10);
    EXPECT_NEAR(max_entropy(SystemShape::make(10, 3, 0.0)), std::log2(3.0), 1e-12);
    EXPECT_THROW(max_entropy(SystemShape::make(4, 2, 0.7)), Error);
}

TEST(MaxEntropy, DominatesRandomDistributionsOfTheSameShape) {
    CounterRng rng(21);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = 2 + rng.below(30);
        const std::size_t m = 1 + rng.below(n - 1);
        const auto d = sample_distribution(n, Sampler::dirichlet(t % 2 ? 1.0 : 0.2), rng);
        const auto shape = SystemShape::make(n, m, tail_probability(d, m));
        EXPECT_LE(entropy(d), max_entropy(shape) + 1e-9);
        EXPECT_NEAR(entropy(max_entropy_distribution(shape)), max_entropy(shape), 1e-10);
    }
}

TEST(MinEntropyM1, Staircase) {
    expect_probs(min_entropy_m1(3, 0.3), {0.7, 0.3, 0.0});
    expect_probs(min_entropy_m1(4, 0.6), {0.4, 0.4, 0.2, 0.0});
    expect_probs(min_entropy_m1(2, 0.5), {0.5, 0.5});
    expect_probs(min_entropy_m1(4, 0.75), {0.25, 0.25, 0.25, 0.25});
    expect_probs(min_entropy_m1(5, 0.0), {1.0, 0.0, 0.0, 0.0, 0.0});
    EXPECT_THROW(min_entropy_m1(3, 0.7), Error);
}

TEST(CandidateSet, Examples) {
    const auto c = candidate_set(SystemShape::make(15, 5, 0.4));
    const std::vector<double> want{0.04, 0.4 / 9, 0.05, 0.4 / 7, 0.4 / 6, 0.08, 0.1, 0.12};
    ASSERT_EQ(c.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(c[i], want[i], 1e-12);
    EXPECT_EQ(candidate_count_y(SystemShape::make(15, 5, 0.4)), 7u);

    const auto b = candidate_set(SystemShape::make(4, 2, 0.5));
    ASSERT_EQ(b.size(), 1u);
    EXPECT_NEAR(b[0], 0.25, 1e-12);

    const auto s = candidate_set(SystemShape::make(6, 2, 0.5));
    ASSERT_EQ(s.size(), 3u);
    EXPECT_NEAR(s[0], 0.125, 1e-12);
    EXPECT_NEAR(s[1], 1.0 / 6, 1e-12);
    EXPECT_NEAR(s[2], 0.25, 1e-12);
}

TEST(CandidateSet, Errors) {
    try {
        candidate_set(SystemShape::make(5, 1, 0.3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BadM);
    }
    try {
        candidate_set(SystemShape::make(5, 2, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
    }
}

TEST(CandidateSet, AllInsideIntervalAndAscending) {
    for (std::size_t n = 3; n <= 25; ++n) {
        for (std::size_t m = 2; m < n; ++m) {
            for (int g = 1; g <= 20; ++g) {
                const auto shape = SystemShape::make(n, m, max_feasible_pi(n, m) * g / 20.0);
                const auto c = candidate_set(shape);
                ASSERT_FALSE(c.empty());
                for (std::size_t i = 0; i < c.size(); ++i) {
                    EXPECT_GE(c[i], shape.tail_mean() - 1e-12);
                    EXPECT_LE(c[i], shape.head_mean() + 1e-12);
                    if (i) {
                        EXPECT_GT(c[i], c[i - 1]);
                    }
                }
            }
        }
    }
}

TEST(AssembleCandidate, Examples) {
    const auto a = assemble_min_candidate(SystemShape::make(15, 5, 0.4), 0.1);
    expect_probs(a, {0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0, 0, 0, 0, 0, 0});
    // extended-precision reference: 3.121928094887362
    EXPECT_NEAR(entropy(a), 3.1219280948873624, 1e-12);

    expect_probs(assemble_min_candidate(SystemShape::make(4, 2, 0.5), 0.25), {0.25, 0.25, 0.25, 0.25});
    expect_probs(assemble_min_candidate(SystemShape::make(6, 2, 0.5), 0.25), {0.25, 0.25, 0.25, 0.25, 0, 0});
    EXPECT_THROW(assemble_min_candidate(SystemShape::make(15, 5, 0.4), 0.2), Error);
    EXPECT_THROW(assemble_min_candidate(SystemShape::make(15, 5, 0.4), 0.03), Error);
}

TEST(AssembleCandidate, CandidatesAreFeasibleAndMatchTheirRecordedEntropy) {
    for (std::size_t n = 3; n <= 30; ++n) {
        for (std::size_t m = 2; m < n; ++m) {
            for (int g = 1; g <= 10; ++g) {
                const auto shape = SystemShape::make(n, m, max_feasible_pi(n, m) * g / 10.0);
                const auto r = min_entropy(shape);
                for (const auto& c : r.candidates) {
                    expect_feasible(c.distribution, shape);
                    EXPECT_NEAR(entropy(c.distribution), c.entropy_bits, 1e-12);
                }
                EXPECT_NEAR(min_entropy_bits(shape), r.min_entropy_bits, 1e-9);
            }
        }
    }
}

TEST(AssembleCandidate, M1ReproducesStaircase) {
    for (std::size_t n = 2; n <= 12; ++n) {
        for (int g = 1; g <= 20; ++g) {
            const double pi = max_feasible_pi(n, 1) * g / 20.0;
            const auto shape = SystemShape::make(n, 1, pi);
            const auto a = assemble_min_candidate(shape, 1.0 - pi);
            const auto s = min_entropy_m1(n, pi);
            for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], s[i], 1e-12);
        }
    }
}

TEST(MinEntropy, Examples) {
    EXPECT_NEAR(min_entropy(SystemShape::make(3, 1, 0.3)).min_entropy_bits, 0.8812908992306927, 1e-12);
    EXPECT_NEAR(min_entropy(SystemShape::make(4, 2, 0.5)).min_entropy_bits, 2.0, 1e-12);

    const auto shape = SystemShape::make(15, 5, 0.4);
    const auto r = min_entropy(shape);
    EXPECT_EQ(r.candidates.size(), 8u);
    EXPECT_EQ(r.y, 7u);
    EXPECT_LE(r.min_entropy_bits, 3.1219280948873624 + 1e-12);
    EXPECT_GE(r.min_entropy_bits, entropy_lower_bound_omega(shape) - 1e-9);
    // argmin sits at 0.4/9 for this shape
    EXPECT_NEAR(r.candidates[r.argmin_index].p_hat, 0.4 / 9, 1e-12);
    EXPECT_NEAR(r.min_entropy_bits, 3.1205059239868276, 1e-12);

    const auto zero = min_entropy(SystemShape::make(6, 3, 0.0));
    EXPECT_EQ(zero.min_entropy_bits, 0.0);
    EXPECT_EQ(zero.argmin()[0], 1.0);
}

TEST(MinEntropy, MatchesExactVertexEnumeration) {
    for (std::size_t n = 2; n <= 10; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            for (int g = 0; g <= 30; ++g) {
                const double pi = max_feasible_pi(n, m) * g / 30.0;
                const auto shape = SystemShape::make(n, m, pi);
                const double want = static_cast<double>(ref::min_entropy_vertices(n, m, pi));
                EXPECT_NEAR(min_entropy(shape).min_entropy_bits, want, 1e-9) << n << ' ' << m << ' ' << pi;
            }
        }
    }
}

TEST(MinEntropy, MergedTailNeverWorseThanSplitHeadTail) {
    // Head at p' and tail at p'' < p' is dominated by the candidate at p''.
    CounterRng rng(9);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 4 + rng.below(20);
        const std::size_t m = 2 + rng.below(n - 3);
        const auto shape = SystemShape::make(n, m, max_feasible_pi(n, m) * (0.05 + 0.9 * rng.uniform()));
        const double lo = shape.tail_mean();
        const double hi = shape.head_mean();
        const double p2 = lo + (hi - lo) * rng.uniform();
        const double p1 = p2 + (hi - p2) * rng.uniform();
        std::vector<double> p;
        p.push_back((1.0 - shape.pi()) - static_cast<double>(m - 1) * p1);
        for (std::size_t i = 1; i < m; ++i) p.push_back(p1);
        const auto merged = assemble_min_candidate(shape, p2);
        std::vector<double> tail(merged.probs().begin() + static_cast<std::ptrdiff_t>(m), merged.probs().end());
        p.insert(p.end(), tail.begin(), tail.end());
        EXPECT_GE(entropy(p), entropy(merged) - 1e-12);
    }
}

TEST(Curve, FifteenFiveFourTenths) {
    const auto shape = SystemShape::make(15, 5, 0.4);
    const auto samples = piecewise_curve(shape, 200);
    std::vector<double> junctions;
    for (const auto& s : samples) {
        if (s.is_junction) junctions.push_back(s.p_hat);
        EXPECT_NEAR(s.entropy_bits, entropy(assemble_min_candidate(shape, s.p_hat)), 1e-12);
        EXPECT_EQ(s.segment_index, curve_segment(shape, s.p_hat));
    }
    const std::vector<double> want{0.04, 0.4 / 9, 0.05, 0.4 / 7, 0.4 / 6, 0.08, 0.1, 0.12};
    ASSERT_EQ(junctions.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(junctions[i], want[i], 1e-9);
    for (std::size_t i = 1; i < samples.size(); ++i) EXPECT_GE(samples[i].p_hat, samples[i - 1].p_hat);
}

TEST(Curve, JunctionTailEntropyIsMinusPiLogPHat) {
    const auto shape = SystemShape::make(15, 5, 0.4);
    const auto cands = candidate_set(shape);
    for (std::size_t i = 0; i + 1 < cands.size(); ++i) {  // interior tail candidates
        const auto d = assemble_min_candidate(shape, cands[i]);
        std::vector<double> tail(d.probs().begin() + 5, d.probs().end());
        EXPECT_NEAR(entropy(tail), -0.4 * std::log2(cands[i]), 1e-9);
    }
}

TEST(Curve, ConcaveInsideEachSegment) {
    const auto shape = SystemShape::make(15, 5, 0.4);
    const auto s = piecewise_curve(shape, 400);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i - 1].segment_index != s[i].segment_index || s[i].segment_index != s[i + 1].segment_index) continue;
        if (s[i].is_junction || s[i - 1].is_junction || s[i + 1].is_junction) continue;
        const double w = (s[i].p_hat - s[i - 1].p_hat) / (s[i + 1].p_hat - s[i - 1].p_hat);
        const double chord = (1 - w) * s[i - 1].entropy_bits + w * s[i + 1].entropy_bits;
        EXPECT_GE(s[i].entropy_bits, chord - 1e-12);
    }
}

TEST(Curve, LeftEndpointHasUniformTail) {
    const auto shape = SystemShape::make(12, 4, 0.3);
    const auto s = piecewise_curve(shape, 10);
    const double p = shape.tail_mean();
    const double head = 1.0 - shape.pi() - 3 * p;
    const double want = -8 * p * std::log2(p) - 3 * p * std::log2(p) - head * std::log2(head);
    EXPECT_NEAR(s.front().p_hat, p, 1e-15);
    EXPECT_NEAR(s.front().entropy_bits, want, 1e-12);
}

TEST(Curve, DegenerateIntervalAndErrors) {
    const auto s = piecewise_curve(SystemShape::make(4, 2, 0.5), 2);
    ASSERT_GE(s.size(), 2u);
    EXPECT_EQ(s.front().entropy_bits, s.back().entropy_bits);
    EXPECT_THROW(piecewise_curve(SystemShape::make(4, 1, 0.5), 10), Error);
}

TEST(MinEntropy, BoundaryStaircaseMatchesGeneralAssembly) {
    // pi/(N-M) can round one ulp above (1-pi)/M at the boundary.
    for (std::size_t n = 2; n <= 12; ++n) {
        const auto shape = SystemShape::make(n, 1, max_feasible_pi(n, 1));
        EXPECT_LE(shape.tail_mean(), shape.head_mean());
        EXPECT_EQ(min_entropy_m1(n, shape.pi()).probs(), assemble_min_candidate(shape, 1.0 - shape.pi()).probs());
    }
}
