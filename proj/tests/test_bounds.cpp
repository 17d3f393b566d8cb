#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <entbound/bounds.hpp>
#include <entbound/oracle.hpp>

#include "support/reference.hpp"

using namespace entbound;

TEST(OmegaBound, BelowExactMinimum) {
    const auto shape = SystemShape::make(15, 5, 0.4);
    EXPECT_LE(entropy_lower_bound_omega(shape), min_entropy(shape).min_entropy_bits + 1e-9);
    EXPECT_LE(entropy_lower_bound_omega(SystemShape::make(4, 2, 0.5)), 2.0 + 1e-12);
    EXPECT_LT(entropy_lower_bound_omega(SystemShape::make(15, 5, 1e-9)), 1e-6);
    EXPECT_EQ(entropy_lower_bound_omega(SystemShape::make(15, 5, 0.0)), 0.0);
}

TEST(OmegaBound, SandwichOnGrid) {
    for (std::size_t n = 2; n <= 40; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            for (int g = 1; g <= 25; ++g) {
                const auto shape = SystemShape::make(n, m, max_feasible_pi(n, m) * g / 25.0);
                const double omega = entropy_lower_bound_omega(shape);
                EXPECT_GE(omega, 0.0);
                EXPECT_LE(omega, min_entropy_bits(shape) + 1e-9) << n << ' ' << m << ' ' << shape.pi();
            }
        }
    }
}

TEST(PiLowerBound, Examples) {
    // extended-precision reference: (4 - 1 - log2 6) / log2(14/6) = 0.339528855083...
    EXPECT_NEAR(pi_lower_bound(20, 6, 4.0), 0.3395288550832811, 1e-12);
    EXPECT_EQ(pi_lower_bound(30, 20, 4.5), 0.0);
    EXPECT_EQ(pi_lower_bound(20, 6, 1.0), 0.0);
    EXPECT_THROW(pi_lower_bound(20, 6, 4.33), Error);
    EXPECT_THROW(pi_lower_bound(20, 21, 1.0), Error);
}

TEST(PiLowerBound, MonotoneInEntropy) {
    for (std::size_t n : {10u, 20u, 50u}) {
        for (std::size_t m = 1; 2 * m < n; ++m) {
            double prev = 0.0;
            for (int g = 0; g <= 100; ++g) {
                const double h = std::log2(static_cast<double>(n)) * g / 100.0;
                const double lb = pi_lower_bound(n, m, h);
                EXPECT_GE(lb, prev - 1e-15);
                prev = lb;
            }
        }
    }
}

TEST(PiLowerBound, FlawedVariantOnlyOnRequest) {
    EXPECT_NEAR(*flawed_pi_lower_bound(30, 20, 4.5), (4.5 - 1 - std::log2(20.0)) / std::log2(0.5), 1e-12);
    EXPECT_FALSE(flawed_pi_lower_bound(4, 2, 1.0).has_value());
    BoundOptions opt;
    opt.compare_flawed = true;
    opt.tight = false;
    const auto j = to_json(bound_report(30, 20, 4.5, opt));
    EXPECT_TRUE(j.contains("compare_flawed"));
    EXPECT_FALSE(to_json(bound_report(30, 20, 4.5, BoundOptions{false})).contains("compare_flawed"));
}

TEST(PiUpperBound, Examples) {
    EXPECT_EQ(pi_upper_bound(20, 6, 0.0), 0.0);
    EXPECT_NEAR(pi_upper_bound_raw(20, 6, 0.0), 1.0, 1e-15);  // the 1 - H/log2 M entry
    const double ub = pi_upper_bound(20, 6, 4.0);
    EXPECT_GE(ub, 0.3395288550832811);
    EXPECT_LE(ub, 0.7);
    EXPECT_NEAR(pi_upper_bound(2, 1, 1.0), 0.5, 1e-12);
    EXPECT_EQ(pi_upper_bound(5, 5, 1.0), 0.0);
}

TEST(PiBounds, HoldForMinAndMaxEntropyExtremes) {
    // The extremal distributions are the hardest inputs for both bounds.
    for (std::size_t n = 2; n <= 30; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            for (int g = 0; g <= 20; ++g) {
                const auto shape = SystemShape::make(n, m, max_feasible_pi(n, m) * g / 20.0);
                for (double h : {min_entropy_bits(shape), max_entropy(shape)}) {
                    h = std::min(h, std::log2(static_cast<double>(n)));
                    EXPECT_GE(shape.pi(), pi_lower_bound(n, m, h) - 1e-9) << n << ' ' << m << ' ' << shape.pi();
                    EXPECT_LE(shape.pi(), pi_upper_bound(n, m, h) + 1e-9) << n << ' ' << m << ' ' << shape.pi();
                }
            }
        }
    }
}

TEST(PiBounds, HoldForRandomDistributions) {
    CounterRng rng(99);
    for (int t = 0; t < 5000; ++t) {
        const std::size_t n = 2 + rng.below(60);
        const std::size_t m = 1 + rng.below(n - 1);
        const auto d = sample_distribution(n, Sampler::dirichlet(t % 3 == 0 ? 0.1 : 1.0), rng);
        const double h = entropy(d);
        const double pi = tail_probability(d, m);
        EXPECT_GE(pi, pi_lower_bound(n, m, h) - 1e-9);
        EXPECT_LE(pi, pi_upper_bound(n, m, h) + 1e-9);
    }
}

TEST(TightBounds, Examples) {
    const auto b = pi_bounds_tight(4, 2, 2.0);
    EXPECT_DOUBLE_EQ(b.lower, 0.5);
    EXPECT_DOUBLE_EQ(b.upper, 0.5);
    const auto z = pi_bounds_tight(9, 4, 0.0);
    EXPECT_EQ(z.lower, 0.0);
    EXPECT_EQ(z.upper, 0.0);

    const double h = entropy(std::vector<double>{0.7, 0.3});
    // Binary system: the only distributions with this entropy have pi = 0.3.
    EXPECT_NEAR(pi_bounds_tight(2, 1, h).lower, 0.3, 1e-9);
    // Three states: the root of h(pi) + pi = H, 0.18672371300525 (40-digit reference).
    const auto three = pi_bounds_tight(3, 1, h);
    EXPECT_NEAR(three.lower, 0.18672371300525, 1e-9);
    EXPECT_LE(three.lower, 0.3);
    EXPECT_GE(three.upper, 0.3 - 1e-9);  // [0.7, 0.3, 0] is a witness
}

TEST(TightBounds, NestedInsideAnalytic) {
    for (std::size_t n : {5u, 12u, 20u, 33u}) {
        for (std::size_t m = 1; m < n; m += 2) {
            const MinEntropyProfile profile(n, m, 512);
            for (int g = 0; g <= 40; ++g) {
                const double h = std::log2(static_cast<double>(n)) * g / 40.0;
                const auto t = pi_bounds_tight(profile, h);
                EXPECT_LE(pi_lower_bound(n, m, h), t.lower + 1e-9) << n << ' ' << m << ' ' << h;
                EXPECT_LE(t.lower, t.upper + 1e-12);
                EXPECT_LE(t.upper, pi_upper_bound(n, m, h) + 1e-9) << n << ' ' << m << ' ' << h;
            }
        }
    }
}

TEST(TightBounds, ContainEveryObservedPi) {
    CounterRng rng(123);
    for (std::size_t n : {6u, 20u}) {
        for (std::size_t m = 1; m < n; ++m) {
            const MinEntropyProfile profile(n, m, 1024);
            for (int t = 0; t < 40; ++t) {
                const auto d = sample_distribution(n, Sampler::dirichlet(t % 2 ? 1.0 : 0.2), rng);
                const auto b = pi_bounds_tight(profile, entropy(d));
                const double pi = tail_probability(d, m);
                EXPECT_GE(pi, b.lower - 1e-9);
                EXPECT_LE(pi, b.upper + 1e-9);
            }
        }
    }
}

TEST(TightBounds, CollapseAtMaximumEntropy) {
    for (std::size_t n = 2; n <= 20; ++n) {
        for (std::size_t m = 1; m <= n; ++m) {
            const auto b = pi_bounds_tight(n, m, std::log2(static_cast<double>(n)), 64);
            EXPECT_DOUBLE_EQ(b.lower, max_feasible_pi(n, m));
            EXPECT_DOUBLE_EQ(b.upper, max_feasible_pi(n, m));
        }
    }
}

TEST(MeritBounds, Examples) {
    const auto a = merit_bounds_k1(20, 6, 4.0);
    EXPECT_NEAR(a.upper, 1.0 - 0.3395288550832811, 1e-12);
    const auto b = merit_bounds_k1(4, 2, 2.0);
    EXPECT_DOUBLE_EQ(b.lower, 0.5);
    EXPECT_DOUBLE_EQ(b.upper, 1.0);  // analytic lower pi bound is 0 when M >= N/2
    const auto c = merit_bounds_k1(7, 7, 1.3);
    EXPECT_EQ(c.lower, 1.0);
    EXPECT_EQ(c.upper, 1.0);
}

TEST(MeritBounds, UpperMatchesClosedFormBelowHalf) {
    for (std::size_t n : {10u, 40u}) {
        for (std::size_t m = 1; 2 * m < n; ++m) {
            for (int g = 0; g <= 50; ++g) {
                const double h = std::log2(static_cast<double>(n)) * g / 50.0;
                const double raw = pi_lower_bound_raw(n, m, h);
                if (raw < 0.0 || raw > max_feasible_pi(n, m)) continue;  // clamped region
                EXPECT_NEAR(merit_bounds_k1(n, m, h).upper, merit_upper_closed_form(n, m, h), 1e-9);
            }
        }
    }
}

TEST(BoundReport, ComplementsAndClampFlags) {
    const auto r = bound_report(20, 6, 4.0);
    EXPECT_NEAR(r.psi_lb, 1.0 - r.pi_ub_analytic, 1e-12);
    EXPECT_NEAR(r.psi_ub, 1.0 - r.pi_lb_analytic, 1e-12);
    EXPECT_LE(r.pi_lb_analytic, r.pi_lb_tight + 1e-9);
    EXPECT_LE(r.pi_ub_tight, r.pi_ub_analytic + 1e-9);
    EXPECT_EQ(r.clamped, std::vector<std::string>{"pi_ub_ceiling"});

    const auto zero = bound_report(20, 6, 0.0);
    EXPECT_NE(std::find(zero.clamped.begin(), zero.clamped.end(), "pi_ub_zero_entropy"), zero.clamped.end());
    EXPECT_NE(std::find(zero.clamped.begin(), zero.clamped.end(), "pi_lb_floor"), zero.clamped.end());

    const auto j = to_json(r);
    for (const char* key : {"n", "m", "k", "mode", "entropy_bits", "pi", "psi", "clamped"}) EXPECT_TRUE(j.contains(key));
    for (const char* key : {"lb_analytic", "ub_analytic", "lb_tight", "ub_tight", "lb_raw", "ub_raw"}) {
        EXPECT_TRUE(j["pi"].contains(key));
    }
    EXPECT_TRUE(to_json(bound_report(20, 6, 4.0, BoundOptions{false}))["pi"]["lb_tight"].is_null());
}

TEST(BoundsForK, KEqualsOneMatchesDirect) {
    const auto d = make_distribution({5, 4, 3, 2, 1, 1});
    BoundOptions opt;
    opt.tight = false;
    const auto direct = bound_report(6, 2, entropy(d), opt);
    for (auto mode : {TransformMode::unique, TransformMode::repeated}) {
        const auto r = bounds_for_k(d, 2, 1, mode, opt);
        EXPECT_EQ(r.n, 6u);
        EXPECT_DOUBLE_EQ(r.pi_lb_analytic, direct.pi_lb_analytic);
        EXPECT_DOUBLE_EQ(r.pi_ub_analytic, direct.pi_ub_analytic);
    }
}

TEST(BoundsForK, UniformExamples) {
    BoundOptions opt;
    opt.tight = false;
    const auto u = bounds_for_k(make_distribution(std::vector<double>(5, 1.0)), 3, 2, TransformMode::unique, opt);
    EXPECT_EQ(u.n, 10u);
    EXPECT_EQ(u.m, 3u);
    EXPECT_NEAR(u.entropy_bits, std::log2(10.0), 1e-12);
    EXPECT_EQ(u.mode, BoundMode::unique);
    EXPECT_DOUBLE_EQ(u.pi_lb_analytic, pi_lower_bound(10, 3, u.entropy_bits));

    const auto r = bounds_for_k(make_distribution(std::vector<double>(3, 1.0)), 2, 2, TransformMode::repeated, opt);
    EXPECT_EQ(r.n, 6u);
    EXPECT_EQ(r.m, 3u);
    EXPECT_NEAR(r.entropy_bits, static_cast<double>(ref::entropy({2.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9})),
                1e-12);
}
