#pragma once

// Random frames, line-plane pairs and regular elements for property tests.

#include "flatlink/symspace.hpp"

#include "test_util.hpp"

namespace flatlink::testing {

inline QMatrix random_invertible(std::mt19937_64& rng, std::size_t m, int bound = 6) {
    for (;;) {
        QMatrix g = random_matrix(rng, m, m, bound, 3);
        if (det(g) != 0) return g;
    }
}

/// F diag(d) F^{-1} with distinct nonzero rational d.
inline QMatrix tau_from_frame(const QMatrix& f, std::mt19937_64& rng) {
    const std::size_t m = f.rows();
    std::vector<Rat> d;
    std::set<Rat> used;
    while (d.size() < m) {
        Rat x = random_rat(rng, 9, 3);
        if (x == 0 || used.count(x)) continue;
        used.insert(x);
        d.push_back(x);
    }
    return f * QMatrix::diagonal(d) * inverse_or_throw(f);
}

struct OracleInstance {
    Arrangement arr;
    LinePlanePair lp;
    QMatrix tau;
};

/// General-position instance. With `force_linked` the hyperplane is chosen
/// positive on the simplex containing L; otherwise it is uniform-ish random.
inline OracleInstance random_oracle_instance(std::mt19937_64& rng, std::size_t m, bool force_linked = false) {
    for (;;) {
        try {
            QMatrix f = random_invertible(rng, m);
            std::vector<ProjPoint> pts;
            for (std::size_t j = 0; j < m; ++j) pts.emplace_back(f.col(j));
            Arrangement arr(pts);
            ProjPoint line(random_vector(rng, m, 6, 3));
            std::vector<Rat> phi = random_vector(rng, m, 6, 3);
            if (force_linked) {
                auto sigma = simplex_of(arr, line);
                QMatrix finv = inverse_or_throw(arr.frame());
                std::fill(phi.begin(), phi.end(), Rat(0));
                for (std::size_t j = 0; j < m; ++j) {
                    Rat w = make_rat(1 + static_cast<long>(rng() % 9), 1 + static_cast<long>(rng() % 4));
                    for (std::size_t k = 0; k < m; ++k) phi[k] += w * sigma.signs[j] * finv(j, k);
                }
            }
            LinePlanePair lp(line, ProjHyperplane(phi));
            if (!in_general_position(arr, lp)) continue;
            return {arr, lp, tau_from_frame(arr.frame(), rng)};
        } catch (const std::exception&) {
        }
    }
}

}  // namespace flatlink::testing
