// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "flatlink/boundary.hpp"
#include "flatlink/congruence.hpp"
#include "flatlink/construct.hpp"

#include "instances.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace flatlink;
using namespace flatlink::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << o.detail.str() << std::fixed
              << std::setprecision(2) << seconds_since(t0) << " s)" << std::endl;
    if (!o.pass) ++failures;
}

/// General-position instance with every coordinate a rational of numerator
/// in [-10, 10] and denominator at most 10.
OracleInstance small_instance(std::mt19937_64& rng, std::size_t m, bool force_linked) {
    for (;;) {
        try {
            QMatrix f = random_matrix(rng, m, m, 10, 10);
            if (det(f) == 0) continue;
            std::vector<ProjPoint> pts;
            for (std::size_t j = 0; j < m; ++j) pts.emplace_back(f.col(j));
            Arrangement arr(pts);
            ProjPoint line(random_vector(rng, m, 10, 10));
            std::vector<Rat> phi = random_vector(rng, m, 10, 10);
            LinePlanePair lp(line, ProjHyperplane(phi));
            if (!in_general_position(arr, lp)) continue;
            if (force_linked && !link_decision(arr, lp).linked()) continue;
            return {arr, lp, tau_from_frame(arr.frame(), rng)};
        } catch (const std::exception&) {
        }
    }
}

QMatrix in_rho_centralizer(std::mt19937_64& rng, const QMatrix& rho) {
    QMatrix m = random_matrix(rng, rho.rows(), rho.cols(), 5, 3);
    return (m + rho * m * rho) * Rat(1, 2);
}

QMatrix in_tau_centralizer(std::mt19937_64& rng, const QMatrix& tau) {
    QMatrix acc = QMatrix::identity(tau.rows()) * random_rat(rng, 5, 3);
    QMatrix pw = QMatrix::identity(tau.rows());
    for (std::size_t k = 1; k < tau.rows(); ++k) {
        pw = pw * tau;
        acc = acc + pw * random_rat(rng, 5, 3);
    }
    return acc;
}

QMatrix hyperplane_subspace(const ProjHyperplane& h) {
    auto ker = kernel_basis(QMatrix::row(h.rat()));
    QMatrix s(h.rep.size(), 0);
    for (const auto& v : ker) s = hstack(s, v);
    return canonical_span(s);
}

std::vector<double> ascending_doubles(const QPoly& p) {
    std::vector<double> out;
    for (const auto& c : p.coeffs()) out.push_back(Rat(c).get_d());
    return out;
}

}  // namespace

int main() {
    criterion("oracle_equivalence", [](Outcome& o) {
        auto t0 = Clock::now();
        std::mt19937_64 rng(1001);
        std::size_t total = 0, linked = 0;
        for (std::size_t m = 2; m <= 5; ++m)
            for (int t = 0; t < 500; ++t) {
                auto inst = small_instance(rng, m, t % 2 == 0);
                bool link = link_decision(inst.arr, inst.lp).linked();
                auto r = intersect(flat_from_tau(inst.tau), subspace_from_pair(inst.lp));
                o.require(r.kind != IntersectionKind::Degenerate, "degenerate intersection at m=" + std::to_string(m));
                o.require(link == (r.kind == IntersectionKind::TransversePoint),
                          "disagreement at m=" + std::to_string(m) + " instance " + std::to_string(t));
                linked += link;
                ++total;
            }
        o.require(linked > 0 && linked < total, "both verdicts must occur");
        o.require(seconds_since(t0) < 60, "runtime over 60 s");
        o.detail << total << " instances, " << linked << " linked; ";
    });

    criterion("pattern_full_rank", [](Outcome& o) {
        for (auto [n, m] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 2}, {4, 3}, {8, 3}, {4, 4}}) {
            auto t0 = Clock::now();
            Pattern p = synthesize_pattern(n, m);
            const std::string tag = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
            o.require(pattern_is_certified(p), "uncertified " + tag);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) o.require((p.matrix[i][j] != 0) == (i <= j), "support " + tag);
            o.require(pattern_rank(p) == n, "rank " + tag);
            double s = seconds_since(t0);
            o.require(s < 120, "runtime " + tag);
            o.detail << tag << " " << std::setprecision(2) << std::fixed << s << " s; ";
        }
    });

    criterion("two_point_boundary", [](Outcome& o) {
        std::mt19937_64 rng(1003);
        for (int t = 0; t < 100; ++t) {
            auto inst = small_instance(rng, 3, t % 2 == 0);
            auto [lprime, q] = common_flags(inst.arr, inst.lp);
            std::vector<QMatrix> a{QMatrix::column(inst.arr[0].rat()),
                                   QMatrix::from_columns({inst.arr[1].rat(), inst.arr[2].rat()})};
            std::vector<QMatrix> b{QMatrix::column(inst.lp.line.rat()), hyperplane_subspace(inst.lp.plane)};
            auto found = common_associated_subspaces(a, b);
            QMatrix l_sub = canonical_span(QMatrix::column(lprime.rat()));
            QMatrix q_sub = hyperplane_subspace(q);
            bool ok = found.size() == 2 && std::find(found.begin(), found.end(), l_sub) != found.end() &&
                      std::find(found.begin(), found.end(), q_sub) != found.end();
            o.require(ok, "instance " + std::to_string(t));
        }
        o.detail << "100 instances; ";
    });

    criterion("associated_iff_preserved", [](Outcome& o) {
        std::mt19937_64 rng(1004);
        std::size_t flags = 0, preserved = 0;
        for (std::size_t m = 3; m <= 4; ++m)
            for (int cls = 0; cls < 3; ++cls) {
                std::vector<std::size_t> dims{1, m - 1};
                if (cls == 1) dims = {2, m - 2};
                if (cls == 2) dims = std::vector<std::size_t>(m, 1);
                for (int t = 0; t < 500; ++t) {
                    QMatrix g = random_invertible(rng, m, 4);
                    std::vector<QMatrix> parts;
                    std::vector<Rat> d;
                    std::size_t off = 0;
                    for (std::size_t i = 0; i < dims.size(); ++i) {
                        QMatrix u(m, dims[i]);
                        for (std::size_t k = 0; k < dims[i]; ++k) {
                            for (std::size_t r = 0; r < m; ++r) u(r, k) = g(r, off + k);
                            d.push_back(Rat(static_cast<long>(i) + 2));
                        }
                        off += dims[i];
                        parts.push_back(u);
                    }
                    QMatrix tau = g * QMatrix::diagonal(d) * inverse_or_throw(g);
                    std::vector<QMatrix> subs;
                    QMatrix acc(m, 0);
                    for (int guard = 0; guard < 50 && span_dim(acc) + 1 < m; ++guard) {
                        const QMatrix& u = parts[rng() % parts.size()];
                        QMatrix v = u * random_matrix(rng, u.cols(), 1, 4, 2);
                        if (t % 2 == 0) v = v + random_matrix(rng, m, 1, 1, 3) * Rat(static_cast<long>(rng() % 2));
                        if (v.is_zero() || subspace_contains(acc, v)) continue;
                        acc = hstack(acc, v);
                        subs.push_back(acc);
                    }
                    Flag f(m, subs);
                    bool p = flag_preserved_by(tau, f);
                    o.require(p == flag_associated(f, parts), "counterexample at m=" + std::to_string(m));
                    preserved += p;
                    ++flags;
                }
            }
        o.require(preserved > 0 && preserved < flags, "both verdicts must occur");
        o.detail << flags << " flags, " << preserved << " preserved; ";
    });

    criterion("rationalization", [](Outcome& o) {
        std::mt19937_64 rng(1005);
        std::size_t taus = 0;
        std::vector<QPoly> polys;
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 1 + rng() % 4, m = 2 + rng() % 3;
            Pattern p = conjugate_pattern(random_invertible(rng, m), synthesize_pattern(n, m));
            o.require(pattern_is_certified(p), "unsynthesized pattern " + std::to_string(t));
            auto r = rationalize_pattern(p);
            o.require(r.stable && r.pattern.matrix == p.matrix, "unstable pattern " + std::to_string(t));
            for (const auto& rt : r.taus) {
                o.require(rt.irred.verdict == IrredVerdict::Irreducible, "tau not certified irreducible");
                o.require(rt.sturm_count == m, "Sturm count differs from m");
                if (polys.size() < 100) polys.push_back(char_poly(rt.tau));
                ++taus;
            }
        }
        // Clustered and complex spectra alongside the emitted taus.
        while (polys.size() < 200) {
            const std::size_t m = 2 + rng() % 4;
            QMatrix a = random_matrix(rng, m, m, 4, 1);
            if (polys.size() % 2 == 0) a = a + a.transpose();
            if (polys.size() % 3 == 0) a = a * a;
            polys.push_back(char_poly(a));
        }
        std::size_t compared = 0;
        for (std::size_t k = 0; k < 200; ++k) {
            o.require(sturm_distinct_real_roots(polys[k]) == float_distinct_real_roots(ascending_doubles(polys[k]), 1e-8),
                      "Sturm and eigensolver disagree on instance " + std::to_string(k));
            ++compared;
        }
        o.detail << "100 patterns, " << taus << " taus, " << compared << " Sturm comparisons; ";
    });

    criterion("ptoq_solver", [](Outcome& o) {
        std::mt19937_64 rng(1006);
        std::size_t solved = 0;
        while (solved < 200) {
            const std::size_t m = 2 + solved % 3;
            auto inst = random_oracle_instance(rng, m);
            QMatrix rho = involution_from_pair(inst.lp);
            QMatrix a = in_rho_centralizer(rng, rho), b = in_tau_centralizer(rng, inst.tau);
            if (det(a) == 0 || det(b) == 0) continue;
            QMatrix gamma = a * b;
            auto r = ptoq_solve(gamma, inst.tau, rho);
            o.require(r.solved(), "round trip unsolved at m=" + std::to_string(m));
            if (r.solved()) {
                const auto& d = *r.decomposition;
                o.require(d.a * d.b == gamma, "a b != gamma");
                o.require(d.a * rho == rho * d.a, "a does not commute with rho");
                o.require(d.b * inst.tau == inst.tau * d.b, "b does not commute with tau");
                o.require(verify_decomposition(d, gamma, inst.tau, rho), "verify_decomposition rejects");
            }
            ++solved;
        }
        // Both centralizers are block diagonal for diagonal tau and rho, so a
        // gamma with an off-block entry lies outside their product; conjugating
        // all three by g keeps that property.
        std::size_t rejected = 0, undecided = 0;
        for (int t = 0; t < 50; ++t) {
            const std::size_t m = 2 + t % 3;
            std::vector<Rat> ev, sv(m, Rat(-1));
            for (std::size_t i = 0; i < m; ++i) ev.push_back(Rat(static_cast<long>(i) + 1));
            sv[0] = 1;
            QMatrix gamma;
            for (;;) {
                gamma = random_matrix(rng, m, m, 5, 1);
                gamma(0, 1 + rng() % (m - 1)) = 1 + static_cast<long>(rng() % 4);
                if (det(gamma) != 0) break;
            }
            QMatrix g = random_invertible(rng, m, 4), gi = inverse_or_throw(g);
            QMatrix tau = g * QMatrix::diagonal(ev) * gi, rho = g * QMatrix::diagonal(sv) * gi;
            auto r = ptoq_solve(g * gamma * gi, tau, rho);
            o.require(!r.decomposition.has_value(), "decomposition returned for a non-member");
            o.require(r.status == PtoqStatus::NoSolution || r.status == PtoqStatus::Undecided, "non-member solved");
            rejected += r.status == PtoqStatus::NoSolution;
            undecided += r.status == PtoqStatus::Undecided;
        }
        o.detail << solved << " round trips, " << rejected << " NoSolution, " << undecided << " Undecided; ";
    });

    criterion("same_sign_descent", [](Outcome& o) {
        auto t0 = Clock::now();
        const QMatrix tau{{2, 1}, {1, 1}}, swap{{0, 1}, {1, 0}}, not_linked{{1, 0}, {2, -1}};
        auto r = find_same_sign_level(tau, swap, 5, 30);
        o.require(!r.hits.empty() && r.identity_hit, "running example has no identity hit");
        o.require(r.all_same_sign && all_same_sign(r.hits), "mixed signs");
        auto d = find_same_sign_level(tau, not_linked, 5, 30);
        o.require(d.hits.empty(), "NotLinked pair has hits");
        o.require(seconds_since(t0) < 300, "runtime over 5 min");
        o.detail << "level 5^" << r.level.n << ", " << r.hits.size() << " hits";
        if (!r.hits.empty()) o.detail << ", sign " << r.hits.front().sign;
        o.detail << "; ";
    });

    criterion("sphere_dimensions", [](Outcome& o) {
        for (std::size_t m = 1; m <= 8; ++m)
            o.require(sphere_dim({{m}}) == static_cast<long>(m * (m + 1) / 2) - 2, "m=" + std::to_string(m));
        o.require(sphere_dim({{1}}) == -1, "S(R) must be empty");
        o.detail << "m = 1..8; ";
    });

    return failures == 0 ? 0 : 1;
}
