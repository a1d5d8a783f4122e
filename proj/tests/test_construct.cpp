#include "flatlink/construct.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace flatlink;
using flatlink::testing::random_invertible;

namespace {

bool upper_triangular_support(const Pattern& p) {
    for (std::size_t i = 0; i < p.N; ++i)
        for (std::size_t j = 0; j < p.N; ++j)
            if ((p.matrix[i][j] != 0) != (i <= j)) return false;
    return true;
}

Pattern with_matrix(Pattern p, std::vector<std::vector<int>> m) {
    p.matrix = std::move(m);
    p.N = p.matrix.size();
    return p;
}

std::vector<double> unit(const std::vector<double>& v) {
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    std::vector<double> out;
    for (double x : v) out.push_back(x / n);
    return out;
}

}  // namespace

TEST(Synthesize, SinglePair) {
    auto p = synthesize_pattern(1, 2);
    ASSERT_EQ(p.matrix.size(), 1u);
    EXPECT_EQ(std::abs(p.matrix[0][0]), 1);
    ASSERT_TRUE(p.cells[0][0].link.has_value());
    EXPECT_TRUE(p.cells[0][0].link->linked());
}

TEST(Synthesize, TwoByTwoOnTheLine) {
    auto p = synthesize_pattern(2, 2);
    EXPECT_EQ(p.matrix[1][0], 0);
    EXPECT_EQ(std::abs(p.matrix[0][0]), 1);
    EXPECT_EQ(std::abs(p.matrix[0][1]), 1);
    EXPECT_EQ(std::abs(p.matrix[1][1]), 1);
}

TEST(Synthesize, FourInThreeSpace) {
    auto p = synthesize_pattern(4, 3);
    EXPECT_TRUE(upper_triangular_support(p));
    EXPECT_EQ(pattern_rank(p), 4u);
}

TEST(Synthesize, EveryCellCertified) {
    for (std::size_t m = 2; m <= 4; ++m)
        for (std::size_t n = 1; n <= 5; ++n) {
            auto p = synthesize_pattern(n, m);
            EXPECT_TRUE(upper_triangular_support(p)) << n << " " << m;
            EXPECT_EQ(pattern_rank(p), n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& c = p.cells[i][j];
                    ASSERT_TRUE(c.link.has_value());
                    EXPECT_EQ(c.link->linked(), c.oracle == IntersectionKind::TransversePoint);
                    EXPECT_EQ(c.point.has_value(), c.oracle == IntersectionKind::TransversePoint);
                    if (c.point) {
                        EXPECT_TRUE(in_flat(p.flats[i], *c.point));
                        EXPECT_TRUE(in_subspace(p.subspaces[j], *c.point));
                    }
                }
        }
}

TEST(Synthesize, CoarseParametersAreRefined) {
    auto p = synthesize_pattern(6, 3, Rat(64), Rat(64));
    EXPECT_GT(p.attempts, 1u);
    EXPECT_LT(p.thinness, Rat(64));
    EXPECT_EQ(p.thinness / p.rotation, Rat(1));
    EXPECT_TRUE(upper_triangular_support(p));
}

TEST(Synthesize, BudgetExhausted) {
    EXPECT_THROW(synthesize_pattern(6, 3, Rat(64), Rat(64), 1), BudgetExhausted);
    EXPECT_THROW(synthesize_pattern(2, 2, Rat(1, 4), Rat(1, 8), 0), BudgetExhausted);
}

TEST(Synthesize, RejectsBadArguments) {
    EXPECT_THROW(synthesize_pattern(0, 2), std::invalid_argument);
    EXPECT_THROW(synthesize_pattern(2, 1), std::invalid_argument);
    EXPECT_THROW(synthesize_pattern(2, 2, Rat(0)), std::invalid_argument);
}

TEST(Synthesize, ConjugationKeepsSupport) {
    std::mt19937_64 rng(31);
    for (std::size_t m = 2; m <= 4; ++m) {
        auto p = synthesize_pattern(3, m);
        auto c = conjugate_pattern(random_invertible(rng, m), p);
        EXPECT_TRUE(upper_triangular_support(c));
        EXPECT_TRUE(pattern_is_certified(c));
    }
}

TEST(PatternRank, Examples) {
    auto p4 = synthesize_pattern(4, 3);
    EXPECT_EQ(pattern_rank(p4), 4u);
    EXPECT_EQ(pattern_rank(synthesize_pattern(2, 2)), 2u);
    EXPECT_EQ(pattern_rank(with_matrix(p4, std::vector<std::vector<int>>(4, std::vector<int>(4, 0)))), 0u);
    EXPECT_EQ(pattern_rank(with_matrix(p4, {{1, 1}, {1, 1}})), 1u);
}

TEST(Stability, IdenticalAndFlipped) {
    auto p = synthesize_pattern(3, 3);
    EXPECT_TRUE(certify_pattern_stability(p, p));
    auto flipped = p;
    flipped.matrix[0][2] = -flipped.matrix[0][2];
    EXPECT_FALSE(certify_pattern_stability(p, flipped));
    auto vanished = p;
    vanished.matrix[1][1] = 0;
    EXPECT_FALSE(certify_pattern_stability(p, vanished));
}

TEST(Stability, RescaledRepresentatives) {
    auto p = synthesize_pattern(3, 3);
    std::vector<FlatX> flats;
    std::vector<SubspaceY> ys;
    for (const auto& x : p.flats) flats.push_back(flat_from_tau(x.tau * Rat(7, 3)));
    for (const auto& y : p.subspaces) {
        std::vector<Rat> l = y.line.rat(), phi = y.plane.rat();
        for (auto& v : l) v *= -5;
        for (auto& v : phi) v *= Rat(2, 9);
        ys.push_back(subspace_from_pair(LinePlanePair{ProjPoint(l), ProjHyperplane(phi)}));
    }
    auto q = build_pattern(p.frames, flats, ys);
    EXPECT_TRUE(certify_pattern_stability(p, q));
}

TEST(BestRational, Convergents) {
    EXPECT_EQ(best_rational(0.5, 1), Rat(0));
    EXPECT_EQ(best_rational(0.5, 2), Rat(1, 2));
    EXPECT_EQ(best_rational(M_PI, 7), Rat(22, 7));
    EXPECT_EQ(best_rational(M_PI, 113), Rat(355, 113));
    EXPECT_EQ(best_rational(-M_PI, 113), Rat(-355, 113));
    EXPECT_EQ(best_rational(3.0, 1), Rat(3));
    EXPECT_EQ(best_rational(std::sqrt(2.0), 100), Rat(140, 99));
    EXPECT_THROW(best_rational(1.0, 0), std::invalid_argument);
    EXPECT_THROW(best_rational(std::nan(""), 5), std::invalid_argument);
}

TEST(BestRational, NoCloserFractionWithSmallerDenominator) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 200; ++t) {
        double x = u(rng);
        const long q = 1 + static_cast<long>(rng() % 40);
        Rat r = best_rational(x, q);
        EXPECT_LE(r.get_den(), q);
        Rat err = abs(r - Rat(x));
        for (long d = 1; d <= q; ++d) {
            Int n(std::floor(x * static_cast<double>(d)));
            for (Int k = n - 1; k <= n + 2; ++k) EXPECT_LE(err, abs(Rat(k, d) - Rat(x)));
        }
    }
}

TEST(RationalizeTau, RecoversIntegerExample) {
    QMatrix t{{2, 1}, {1, 1}};
    auto r = rationalize_tau(float_eigenframe(t), 1, true);
    EXPECT_EQ(r.tau, t);
    EXPECT_EQ(r.base, t);
    EXPECT_EQ(char_poly(r.tau), QPoly({1, -3, 1}));
    EXPECT_EQ(r.irred.verdict, IrredVerdict::Irreducible);
    EXPECT_EQ(r.sturm_count, 2u);
    EXPECT_TRUE(r.unit_determinant);
    EXPECT_LT(r.frame_distance, Rat(1, 1000000));
}

TEST(RationalizeTau, StandardAxesCannotBeHitExactly) {
    for (long q : {1L, 10L, 1000L}) {
        auto r = rationalize_tau({{1, 0}, {0, 1}}, q, true);
        EXPECT_GT(r.frame_distance, Rat(0));
        EXPECT_EQ(r.irred.verdict, IrredVerdict::Irreducible);
        for (const auto& v : kernel_basis(r.tau - QMatrix::identity(2) * r.tau(0, 0))) {
            EXPECT_FALSE(v(1, 0) == 0) << r.tau;
        }
    }
}

TEST(RationalizeTau, SmallIrreducibleCubicExists) {
    bool found = false;
    for (const auto& e : detail::base_pool(3, true, kDefaultPoolSize)) {
        EXPECT_EQ(e.cert.verdict, IrredVerdict::Irreducible);
        EXPECT_EQ(sturm_distinct_real_roots(char_poly(e.tau0)), 3u);
        bool small = true;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) small = small && abs(e.tau0(i, j)) <= 3;
        found = found || small;
    }
    EXPECT_TRUE(found);
}

TEST(RationalizeTau, PoolOrderedBySize) {
    for (std::size_t m = 2; m <= 4; ++m) {
        const auto& pool = detail::base_pool(m, true, kDefaultPoolSize);
        ASSERT_EQ(pool.size(), kDefaultPoolSize);
        for (std::size_t k = 1; k < pool.size(); ++k)
            EXPECT_LE((pool[k - 1].tau0 * pool[k - 1].tau0).trace(), (pool[k].tau0 * pool[k].tau0).trace());
    }
}

TEST(RationalizeTau, ExactInvariantsOnRandomFrames) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (std::size_t m = 2; m <= 4; ++m)
        for (int t = 0; t < 6; ++t) {
            FloatFrame f(m, std::vector<double>(m));
            for (auto& v : f)
                for (auto& x : v) x = nd(rng);
            auto r = rationalize_tau(f, 1000, true);
            EXPECT_EQ(r.tau, r.g * r.base * inverse_or_throw(r.g));
            EXPECT_EQ(char_poly(r.tau), char_poly(r.base));
            EXPECT_EQ(r.sturm_count, m);
            EXPECT_EQ(r.irred.verdict, IrredVerdict::Irreducible);
            EXPECT_TRUE(r.base.is_symmetric());
            EXPECT_TRUE(r.base.is_integral());
        }
}

TEST(RationalizeTau, DistanceShrinksWithDenominator) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> nd;
    for (std::size_t m = 2; m <= 3; ++m)
        for (int t = 0; t < 4; ++t) {
            FloatFrame f(m, std::vector<double>(m));
            for (auto& v : f)
                for (auto& x : v) x = nd(rng);
            Rat prev = 2;
            for (long q : {1L, 10L, 100L, 1000L, 10000L}) {
                auto r = rationalize_tau(f, q, true);
                EXPECT_LE(r.frame_distance, prev) << "m=" << m << " q=" << q;
                prev = r.frame_distance;
            }
            EXPECT_LT(prev, Rat(1, 10000));
        }
}

TEST(RationalizeTau, HintFixesBase) {
    QMatrix hint{{2, 1, 0}, {1, 1, 1}, {0, 1, -1}};
    FloatFrame f{{1, 0.2, 0.1}, {0.3, 1, -0.2}, {0.1, 0.4, 1}};
    auto r = rationalize_tau(f, 100, false, hint);
    EXPECT_EQ(r.base, hint);
    EXPECT_EQ(r.tau, r.g * hint * inverse_or_throw(r.g));
    EXPECT_THROW(rationalize_tau(f, 100, false, QMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}), std::domain_error);
}

TEST(RationalizeTau, RejectsDegenerateTargets) {
    EXPECT_THROW(rationalize_tau({{1, 0}, {2, 0}}, 10, true), std::invalid_argument);
    EXPECT_THROW(rationalize_tau({{1, 0}, {0, 0}}, 10, true), std::invalid_argument);
    EXPECT_THROW(rationalize_tau({{1}}, 10, true), std::invalid_argument);
}

TEST(RationalizePair, Examples) {
    auto swap = rationalize_pair({1, 1}, {1, 1}, 10);
    EXPECT_EQ(swap.rho, (QMatrix{{0, 1}, {1, 0}}));
    auto d = rationalize_pair({1, 0, 0}, {1, 0, 0}, 10);
    EXPECT_EQ(d.rho, QMatrix::diagonal(std::vector<Rat>{1, -1, -1}));
    EXPECT_THROW(rationalize_pair({1, 1}, {1, -1}, 10), GeneralPositionError);
    EXPECT_THROW(rationalize_pair({0, 0}, {1, 0}, 10), std::invalid_argument);
}

TEST(RationalizePair, IrrationalLineSnapsWithinBound) {
    auto r = rationalize_pair({1, std::sqrt(2.0)}, {1, 0}, 100);
    auto l = r.pair.line.rat();
    ASSERT_NE(l[0], 0);
    Rat slope = l[1] / l[0];
    EXPECT_LE(slope.get_den(), 100);
    EXPECT_LT(std::abs(slope.get_d() - std::sqrt(2.0)), 0.01);
    EXPECT_EQ(r.rho * r.rho, QMatrix::identity(2));
}

TEST(RationalizePair, IsAnInvolutionFixingTheLine) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    for (std::size_t m = 2; m <= 5; ++m)
        for (int t = 0; t < 10; ++t) {
            std::vector<double> l(m), phi(m);
            for (auto& x : l) x = nd(rng);
            for (auto& x : phi) x = nd(rng);
            auto r = rationalize_pair(l, phi, 50);
            EXPECT_EQ(r.rho * r.rho, QMatrix::identity(m));
            auto lv = r.pair.line.rat();
            EXPECT_EQ(r.rho * QMatrix::column(lv), QMatrix::column(lv));
            EXPECT_EQ(r.rho.trace(), Rat(2 - static_cast<long>(m)));
            auto lu = unit(l);
            std::vector<double> snapped;
            for (const auto& x : lv) snapped.push_back(x.get_d());
            snapped = unit(snapped);
            double dp = 0;
            for (std::size_t k = 0; k < m; ++k) dp += lu[k] * snapped[k];
            EXPECT_GT(std::abs(dp), 0.99);
        }
}

TEST(RationalizePattern, SurvivesSnapping) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 12; ++t) {
        const std::size_t n = 1 + rng() % 4, m = 2 + rng() % 3;
        auto p = conjugate_pattern(random_invertible(rng, m), synthesize_pattern(n, m));
        auto r = rationalize_pattern(p);
        ASSERT_TRUE(r.stable) << "N=" << n << " m=" << m;
        EXPECT_EQ(r.pattern.matrix, p.matrix);
        ASSERT_EQ(r.taus.size(), n);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(r.taus[i].irred.verdict, IrredVerdict::Irreducible);
            EXPECT_EQ(r.taus[i].sturm_count, m);
            EXPECT_EQ(r.pattern.flats[i].tau, r.taus[i].tau);
            EXPECT_EQ(r.pattern.flats[i].orientation, SymOrientation::Matched);
        }
    }
}
