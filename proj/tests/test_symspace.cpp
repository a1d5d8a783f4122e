#include "flatlink/symspace.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

using namespace flatlink;
using flatlink::testing::random_matrix;
using flatlink::testing::random_rat;
using flatlink::testing::random_vector;
using flatlink::testing::random_invertible;
using flatlink::testing::random_oracle_instance;
using flatlink::testing::tau_from_frame;

namespace {

QMatrix diag(std::initializer_list<Rat> d) { return QMatrix::diagonal(std::vector<Rat>(d)); }

}  // namespace

TEST(SymCoords, RoundTrip) {
    QMatrix z{{1, 2, 3}, {2, 4, 5}, {3, 5, 6}};
    EXPECT_EQ(sym_coords(z), (std::vector<Rat>{1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(from_sym_coords(sym_coords(z), 3), z);
}

TEST(PositiveDefinite, Sylvester) {
    EXPECT_TRUE(is_positive_definite(QMatrix{{2, 1}, {1, 1}}));
    EXPECT_FALSE(is_positive_definite(QMatrix{{1, 2}, {2, 1}}));
    EXPECT_FALSE(is_positive_definite(QMatrix{{1, 0}, {0, 0}}));
    EXPECT_FALSE(is_positive_definite(QMatrix{{1, 1}, {0, 1}}));
    EXPECT_THROW(SPDPoint(QMatrix{{-1, 0}, {0, 1}}), std::domain_error);
}

TEST(PositiveDefinite, AgreesWithEigenvalues) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 300; ++t) {
        QMatrix a = random_matrix(rng, 3, 3, 5, 2);
        QMatrix s = a + a.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(flatlink::testing::to_eigen(s));
        double lo = es.eigenvalues().minCoeff();
        if (std::abs(lo) < 1e-9) continue;
        EXPECT_EQ(is_positive_definite(s), lo > 0);
    }
}

TEST(FlatFromTau, Examples) {
    auto x = flat_from_tau(diag({2, Rat(1, 2)}));
    ASSERT_EQ(x.basis.size(), 2u);
    EXPECT_EQ(x.basis[0], diag({1, 0}));
    EXPECT_EQ(x.basis[1], diag({0, 1}));

    QMatrix tau{{2, 1}, {1, 1}};
    auto y = flat_from_tau(tau);
    QMatrix expected = detail::sym_columns({QMatrix::identity(2), tau});
    EXPECT_TRUE(subspace_equal(detail::sym_columns(y.basis), expected));

    EXPECT_THROW(flat_from_tau(QMatrix::identity(3)), std::domain_error);
    EXPECT_THROW(flat_from_tau(QMatrix{{1, 1}, {1, 1}}), std::domain_error);
    EXPECT_THROW(flat_from_tau(QMatrix{{0, -1}, {1, 0}}), std::domain_error);
}

TEST(FlatFromTau, DimensionAndEquivariance) {
    std::mt19937_64 rng(4);
    for (std::size_t m = 2; m <= 5; ++m)
        for (int t = 0; t < 10; ++t) {
            QMatrix tau = tau_from_frame(random_invertible(rng, m), rng);
            auto x = flat_from_tau(tau);
            EXPECT_EQ(x.basis.size(), m);
            for (const auto& b : x.basis) EXPECT_TRUE(in_flat(x, b));
            QMatrix g = random_invertible(rng, m, 4);
            auto gx = flat_from_tau(g * tau * inverse_or_throw(g));
            for (const auto& b : x.basis) EXPECT_TRUE(in_flat(gx, g * b * g.transpose()));
        }
}

TEST(SubspaceFromRho, Examples) {
    auto y = subspace_from_rho(QMatrix{{0, 1}, {1, 0}});
    EXPECT_EQ(y.line, ProjPoint({1, 1}));
    EXPECT_EQ(y.plane, ProjHyperplane({1, 1}));
    EXPECT_EQ(y.basis.size(), 2u);

    auto y3 = subspace_from_rho(diag({1, -1, -1}));
    EXPECT_EQ(y3.line, ProjPoint({1, 0, 0}));
    EXPECT_EQ(y3.plane, ProjHyperplane({1, 0, 0}));
    EXPECT_EQ(y3.basis.size(), 4u);

    EXPECT_THROW(subspace_from_rho(QMatrix::identity(2)), std::domain_error);
    EXPECT_THROW(subspace_from_rho(diag({1, 1, -1})), std::domain_error);
    EXPECT_THROW(subspace_from_rho(QMatrix{{1, 1}, {0, -1}} * Rat(2)), std::domain_error);
}

TEST(SubspaceFromRho, PairRoundTrip) {
    std::mt19937_64 rng(6);
    for (std::size_t m = 2; m <= 6; ++m)
        for (int t = 0; t < 10; ++t) {
            std::vector<Rat> l = random_vector(rng, m, 6, 3), phi = random_vector(rng, m, 6, 3);
            if (dot(l, phi) == 0 || std::all_of(l.begin(), l.end(), [](const Rat& x) { return x == 0; })) continue;
            LinePlanePair lp{ProjPoint(l), ProjHyperplane(phi)};
            auto y = subspace_from_pair(lp);
            EXPECT_EQ(y.line, lp.line);
            EXPECT_EQ(y.plane, lp.plane);
            EXPECT_EQ(y.basis.size(), 1 + m * (m - 1) / 2);
        }
}

TEST(DimensionBookkeeping, Complementary) {
    for (std::size_t m = 2; m <= 8; ++m) EXPECT_EQ((m - 1) + m * (m - 1) / 2, sym_dim(m) - 1);
}

TEST(Intersect, Examples) {
    auto x = flat_from_tau(diag({2, Rat(1, 2)}));
    auto r = intersect(x, subspace_from_rho(QMatrix{{0, 1}, {1, 0}}));
    ASSERT_EQ(r.kind, IntersectionKind::TransversePoint);
    EXPECT_EQ(r.kernel_dim, 1u);
    EXPECT_EQ(r.point->Z, QMatrix::identity(2));
    EXPECT_EQ(r.sign, 1);
    EXPECT_FALSE(r.det_normalized);

    auto y = subspace_from_pair(LinePlanePair(ProjPoint{1, 1}, ProjHyperplane{2, -1}));
    auto e = intersect(x, y);
    EXPECT_EQ(e.kind, IntersectionKind::Empty);
    EXPECT_EQ(e.kernel_dim, 1u);
    auto sys = vstack(detail::flat_system(x.tau), detail::involution_system(y.rho));
    EXPECT_TRUE(mat_vec(sys, sym_coords(diag({-1, 2}))) == std::vector<Rat>(sys.rows()));
    // diag(-1, 2) is the inverse of diag(2, -1) up to scale: L and ker P are
    // orthogonal for the dual form.
    QMatrix w = inverse_or_throw(diag({-1, 2}));
    EXPECT_EQ(dot(mat_vec(w, std::vector<Rat>{1, 1}), std::vector<Rat>{1, 2}), 0);

    auto d = intersect(flat_from_tau(diag({1, 2, Rat(1, 2)})), subspace_from_rho(diag({1, -1, -1})));
    EXPECT_EQ(d.kind, IntersectionKind::Degenerate);
    EXPECT_EQ(d.kernel_dim, 3u);
}

TEST(Intersect, OracleMatchesLinkDecision) {
    std::mt19937_64 rng(31);
    for (std::size_t m = 2; m <= 5; ++m) {
        int linked = 0;
        for (int t = 0; t < 60; ++t) {
            auto inst = random_oracle_instance(rng, m, t % 2 == 0);
            auto r = intersect(flat_from_tau(inst.tau), subspace_from_pair(inst.lp));
            bool l = link_decision(inst.arr, inst.lp).linked();
            linked += l;
            ASSERT_NE(r.kind, IntersectionKind::Degenerate);
            EXPECT_EQ(r.kind == IntersectionKind::TransversePoint, l) << "m=" << m;
            if (r.point) {
                auto x = flat_from_tau(inst.tau);
                auto y = subspace_from_pair(inst.lp);
                EXPECT_TRUE(in_flat(x, r.point->Z));
                EXPECT_TRUE(in_subspace(y, r.point->Z));
            }
        }
        EXPECT_GE(linked, 30) << "m=" << m;
        EXPECT_LT(linked, 60) << "m=" << m;
    }
}

TEST(IntersectionSign, SwapFlips) {
    auto x = flat_from_tau(diag({2, Rat(1, 2)}));
    auto y = subspace_from_rho(QMatrix{{0, 1}, {1, 0}});
    SPDPoint z(QMatrix::identity(2));
    int s = intersection_sign(x, y, z);
    std::swap(x.basis[0], x.basis[1]);
    EXPECT_EQ(intersection_sign(x, y, z), -s);

    std::mt19937_64 rng(32);
    for (std::size_t m = 3; m <= 4; ++m) {
        int done = 0;
        while (done < 5) {
            auto inst = random_oracle_instance(rng, m, true);
            auto fx = flat_from_tau(inst.tau);
            auto fy = subspace_from_pair(inst.lp);
            auto r = intersect(fx, fy);
            if (!r.point) continue;
            std::swap(fx.basis[0], fx.basis[m - 1]);
            EXPECT_EQ(intersection_sign(fx, fy, *r.point), -*r.sign);
            std::swap(fy.basis[0], fy.basis[1]);
            EXPECT_EQ(intersection_sign(fx, fy, *r.point), *r.sign);
            ++done;
        }
    }
}

TEST(IntersectionSign, ScaleInvariant) {
    auto x = flat_from_tau(diag({2, Rat(1, 2)}));
    auto y = subspace_from_rho(QMatrix{{0, 1}, {1, 0}});
    EXPECT_EQ(intersection_sign(x, y, SPDPoint(QMatrix::identity(2) * Rat(7, 3))), 1);
}

TEST(IntersectionSign, Naturality) {
    std::mt19937_64 rng(33);
    for (std::size_t m = 2; m <= 4; ++m) {
        int done = 0;
        while (done < 8) {
            auto inst = random_oracle_instance(rng, m, true);
            auto fx = flat_from_tau(inst.tau);
            auto fy = subspace_from_pair(inst.lp);
            auto r = intersect(fx, fy);
            if (!r.point) continue;
            QMatrix g = random_invertible(rng, m, 4);
            int dg = sign(det(g));
            int expected = *r.sign * ((m + 1) % 2 == 1 ? dg : 1);
            EXPECT_EQ(intersection_sign(transport(g, fx), transport(g, fy), apply_isometry(g, *r.point)), expected);
            ++done;
        }
    }
}

TEST(IntersectionSign, CentralizerOfRho) {
    std::mt19937_64 rng(34);
    int preserved = 0;
    for (std::size_t m = 2; m <= 4; ++m) {
        int done = 0;
        while (done < 10) {
            auto inst = random_oracle_instance(rng, m, true);
            auto fx = flat_from_tau(inst.tau);
            auto fy = subspace_from_pair(inst.lp);
            auto r = intersect(fx, fy);
            if (!r.point) continue;
            // a = E diag(lambda, A') E^{-1} with E = [L | basis of P] commutes with rho.
            std::vector<std::vector<Rat>> ecols{inst.lp.line.rat()};
            for (const auto& k : kernel_basis(QMatrix::row(inst.lp.plane.rat()))) ecols.push_back(k.col(0));
            QMatrix e = QMatrix::from_columns(ecols);
            QMatrix blk(m, m);
            Rat lambda = random_rat(rng, 5, 3);
            if (lambda == 0) lambda = 1;
            blk(0, 0) = lambda;
            QMatrix ap = random_invertible(rng, m - 1, 4);
            for (std::size_t i = 1; i < m; ++i)
                for (std::size_t j = 1; j < m; ++j) blk(i, j) = ap(i - 1, j - 1);
            QMatrix a = e * blk * inverse_or_throw(e);
            ASSERT_EQ(a * fy.rho, fy.rho * a);
            int ambient = (m + 1) % 2 == 1 ? sign(det(a)) : 1;
            int oy = pushforward_orientation(a, fy, fy);
            int s = intersection_sign(transport(a, fx), fy, apply_isometry(a, *r.point));
            EXPECT_EQ(s, *r.sign * ambient * oy);
            if (ambient * oy > 0) {
                EXPECT_EQ(s, *r.sign);
                ++preserved;
            }
            ++done;
        }
    }
    EXPECT_GT(preserved, 0);
}

TEST(ApplyIsometry, Examples) {
    SPDPoint z(diag({1, 2, 3}));
    EXPECT_EQ(apply_isometry(QMatrix::identity(3), z).Z, z.Z);
    QMatrix perm{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
    EXPECT_EQ(apply_isometry(perm, z).Z, diag({2, 3, 1}));
    EXPECT_THROW(apply_isometry(QMatrix{{1, 1}, {1, 1}}, SPDPoint(QMatrix::identity(2))), std::domain_error);
    std::mt19937_64 rng(35);
    for (int t = 0; t < 50; ++t) {
        QMatrix g = random_invertible(rng, 3);
        auto w = apply_isometry(g, z);
        EXPECT_TRUE(w.Z.is_symmetric());
        EXPECT_TRUE(is_positive_definite(w.Z));
    }
}
