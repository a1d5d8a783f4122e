#pragma once

// Certified intersection patterns of flats X_i and subspaces Y_j, and rational
// approximation of real frames and line-hyperplane pairs.

#include "flatlink/irreducible.hpp"
#include "flatlink/parallel.hpp"
#include "flatlink/symspace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace flatlink {

class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CellWitness {
    std::optional<LinkResult> link;  // present when the flat has a rational frame
    IntersectionKind oracle = IntersectionKind::Empty;
    std::optional<int> sign;
    std::optional<QMatrix> point;
};

/// N flats against N subspaces. matrix[i][j] is the sign of X_i n Y_j, or 0
/// when they are disjoint.
struct Pattern {
    std::size_t N = 0;
    std::size_t m = 0;
    std::vector<std::optional<Arrangement>> frames;
    std::vector<FlatX> flats;
    std::vector<SubspaceY> subspaces;
    std::vector<std::vector<int>> matrix;
    std::vector<std::vector<CellWitness>> cells;
    Rat thinness = 0;
    Rat rotation = 0;
    std::size_t attempts = 0;
};

/// Computes every cell of the pattern from its flats and subspaces.
inline Pattern build_pattern(std::vector<std::optional<Arrangement>> frames, std::vector<FlatX> flats,
                             std::vector<SubspaceY> subspaces) {
    if (flats.empty() || flats.size() != subspaces.size() || frames.size() != flats.size())
        throw std::invalid_argument("build_pattern: need N flats, N frames and N subspaces");
    Pattern p;
    p.N = flats.size();
    p.m = flats.front().m();
    p.frames = std::move(frames);
    p.flats = std::move(flats);
    p.subspaces = std::move(subspaces);
    p.matrix.assign(p.N, std::vector<int>(p.N, 0));
    p.cells.assign(p.N, std::vector<CellWitness>(p.N));
    parallel_for(p.N * p.N, [&](std::size_t k) {
        const std::size_t i = k / p.N, j = k % p.N;
        CellWitness& c = p.cells[i][j];
        if (p.frames[i] && in_general_position(*p.frames[i], p.subspaces[j].pair()))
            c.link = link_decision(*p.frames[i], p.subspaces[j].pair());
        auto r = intersect(p.flats[i], p.subspaces[j]);
        c.oracle = r.kind;
        c.sign = r.sign;
        if (r.point) c.point = r.point->Z;
        p.matrix[i][j] = r.sign.value_or(0);
    });
    return p;
}

inline std::size_t pattern_rank(const Pattern& p) {
    if (p.N == 0) return 0;
    QMatrix a(p.N, p.N);
    for (std::size_t i = 0; i < p.N; ++i)
        for (std::size_t j = 0; j < p.N; ++j) a(i, j) = p.matrix[i][j];
    return rank(a);
}

/// Every cell is non-degenerate, the linking criterion (where available)
/// agrees with the oracle, and matrix[i][j] != 0 exactly when i <= j.
inline bool pattern_is_certified(const Pattern& p) {
    for (std::size_t i = 0; i < p.N; ++i)
        for (std::size_t j = 0; j < p.N; ++j) {
            const CellWitness& c = p.cells[i][j];
            if (c.oracle == IntersectionKind::Degenerate) return false;
            const bool meets = c.oracle == IntersectionKind::TransversePoint;
            if (c.link && c.link->linked() != meets) return false;
            if (meets != (i <= j)) return false;
        }
    return pattern_rank(p) == p.N;
}

/// Cellwise equality of the sign matrices.
inline bool certify_pattern_stability(const Pattern& p, const Pattern& snapped) {
    return p.N == snapped.N && p.m == snapped.m && p.matrix == snapped.matrix;
}

namespace detail {

/// Vertices of a regular-ish (m-2)-simplex in R^{m-2} centred at the origin:
/// e_1 .. e_{m-2} and 0, minus their centroid.
inline std::vector<std::vector<Rat>> centred_simplex(std::size_t dim) {
    std::vector<std::vector<Rat>> v;
    for (std::size_t k = 0; k <= dim; ++k) {
        std::vector<Rat> p(dim);
        if (k < dim) p[k] = 1;
        for (auto& x : p) x -= Rat(1, static_cast<long>(dim) + 1);
        v.push_back(std::move(p));
    }
    return v;
}

/// tau with eigenlines the columns of f and eigenvalues m, m-1, .., 1.
inline QMatrix tau_for_frame(const QMatrix& f) {
    const std::size_t m = f.rows();
    std::vector<Rat> d;
    for (std::size_t k = 0; k < m; ++k) d.push_back(Rat(static_cast<long>(m - k)));
    return f * QMatrix::diagonal(d) * inverse_or_throw(f);
}

/// One attempt of the staircase configuration in the affine chart
/// (u, w_1 .. w_{m-2}, 1): X_i has apex u = -1 and a thin base simplex at
/// u = N - i, L_j sits on the axis at u = N - j - 1/2 and P_j is the plane
/// u = -2 tilted by rotation * (j + 1) along w . (1, 1/2, 1/3, ..).
inline std::optional<Pattern> staircase_attempt(std::size_t N, std::size_t m, const Rat& thin, const Rat& rot) {
    const std::size_t wdim = m - 2;
    auto simplex = centred_simplex(wdim);
    std::vector<std::optional<Arrangement>> frames;
    std::vector<FlatX> flats;
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<ProjPoint> pts;
        std::vector<Rat> apex(m);
        apex[0] = -1;
        apex[m - 1] = 1;
        pts.emplace_back(apex);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            std::vector<Rat> b(m);
            b[0] = Rat(static_cast<long>(N - i));
            for (std::size_t t = 0; t < wdim; ++t) b[1 + t] = thin * simplex[k][t];
            b[m - 1] = 1;
            pts.emplace_back(b);
        }
        Arrangement arr(pts);
        flats.push_back(flat_from_tau(tau_for_frame(arr.frame())));
        frames.emplace_back(std::move(arr));
    }
    std::vector<SubspaceY> ys;
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<Rat> l(m), phi(m);
        l[0] = Rat(static_cast<long>(2 * (N - j)) - 1, 2);
        l[m - 1] = 1;
        phi[0] = 1;
        phi[m - 1] = 2;
        for (std::size_t t = 0; t < wdim; ++t)
            phi[1 + t] = -rot * Rat(static_cast<long>(j) + 1) / Rat(static_cast<long>(t) + 1);
        ys.push_back(subspace_from_pair(LinePlanePair(ProjPoint(l), ProjHyperplane(phi))));
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (!in_general_position(*frames[i], ys[j].pair())) return std::nullopt;
    Pattern p = build_pattern(std::move(frames), std::move(flats), std::move(ys));
    if (!pattern_is_certified(p)) return std::nullopt;
    return p;
}

}  // namespace detail

inline constexpr std::size_t kDefaultRetryBudget = 32;

/// Staircase pattern: X_i meets Y_j iff i <= j. Halves thinness and rotation
/// after each failed certification.
inline Pattern synthesize_pattern(std::size_t N, std::size_t m, Rat thinness = Rat(1, 4), Rat rotation = Rat(1, 8),
                                  std::size_t retry_budget = kDefaultRetryBudget) {
    if (N < 1 || m < 2) throw std::invalid_argument("synthesize_pattern: need N >= 1 and m >= 2");
    if (thinness <= 0 || rotation <= 0) throw std::invalid_argument("synthesize_pattern: thinness and rotation must be positive");
    for (std::size_t attempt = 1; attempt <= retry_budget; ++attempt) {
        if (auto p = detail::staircase_attempt(N, m, thinness, rotation)) {
            p->thinness = thinness;
            p->rotation = rotation;
            p->attempts = attempt;
            return *p;
        }
        thinness /= 2;
        rotation /= 2;
    }
    throw BudgetExhausted("synthesize_pattern: retry budget exhausted");
}

/// The same configuration moved by g in GL_m(Q); the pattern is unchanged.
inline Pattern conjugate_pattern(const QMatrix& g, const Pattern& p) {
    std::vector<std::optional<Arrangement>> frames;
    std::vector<FlatX> flats;
    std::vector<SubspaceY> ys;
    QMatrix ginv = inverse_or_throw(g);
    for (std::size_t i = 0; i < p.N; ++i) {
        if (p.frames[i]) frames.emplace_back(transform(g, *p.frames[i]));
        else frames.emplace_back(std::nullopt);
        flats.push_back(flat_from_tau(g * p.flats[i].tau * ginv));
    }
    for (const auto& y : p.subspaces) ys.push_back(subspace_from_pair(transform(g, y.pair())));
    Pattern out = build_pattern(std::move(frames), std::move(flats), std::move(ys));
    out.thinness = p.thinness;
    out.rotation = p.rotation;
    out.attempts = p.attempts;
    return out;
}

// ---------------------------------------------------------------------------
// Rationalization.

/// Columns of a real frame, one vector per projective point.
using FloatFrame = std::vector<std::vector<double>>;

struct RationalizedTau {
    QMatrix tau;
    QMatrix base;  // integer symmetric tau_0
    QMatrix g;     // tau = g tau_0 g^{-1}
    IrredCertificate irred;
    std::size_t sturm_count = 0;
    Rat frame_distance;  // upper bound on the largest sine between matched frame lines
    bool unit_determinant = false;
    std::vector<std::size_t> matching;  // target column j <- eigenvector matching[j] of tau_0 (descending)
};

struct RationalPair {
    LinePlanePair pair;
    QMatrix rho;
};

/// Best rational approximation with denominator at most qmax (continued
/// fractions with the final semiconvergent), computed exactly from the double.
inline Rat best_rational(double x, const Int& qmax) {
    if (!std::isfinite(x)) throw std::invalid_argument("best_rational: non-finite input");
    if (qmax < 1) throw std::invalid_argument("best_rational: denominator bound must be positive");
    Rat target(x);
    Int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Rat r = target;
    for (;;) {
        Int a;
        mpz_fdiv_q(a.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
        Int p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > qmax) {
            Int k = (qmax - q0) / q1;
            Rat semi(Int(k * p1 + p0), Int(k * q1 + q0));
            semi.canonicalize();
            Rat conv(p1, q1);
            conv.canonicalize();
            return abs(semi - target) < abs(conv - target) ? semi : conv;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Rat frac = r - Rat(a);
        if (frac == 0) {
            Rat out(p1, q1);
            out.canonicalize();
            return out;
        }
        r = 1 / frac;
    }
}

namespace detail {

inline Eigen::MatrixXd to_eigen(const QMatrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j).get_d();
    return e;
}

/// Sine of the angle between the lines through a and b.
inline double line_sine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd ua = a.normalized(), ub = b.normalized();
    return (ua - ua.dot(ub) * ub).norm();
}

/// Smallest rational of the form k / 2^40 that is at least d + 2^-40.
inline Rat upper_bound_rat(double d) {
    const double scale = std::ldexp(1.0, 40);
    Int k(std::ceil(d * scale) + 1);
    return make_rat(k, Int(1) << 40);
}

struct PoolEntry {
    QMatrix tau0;
    IrredCertificate cert;
    Eigen::MatrixXd eigvecs;  // unit columns, eigenvalues descending
    bool unit_det = false;
    bool positive_definite = false;
    std::size_t index = 0;
};

inline std::optional<PoolEntry> certify_base(const QMatrix& t, bool require_irreducible,
                                             std::size_t prime_budget = kDefaultPrimeBudget) {
    if (det(t) == 0) return std::nullopt;
    QPoly cp = char_poly(t);
    if (sturm_distinct_real_roots(cp) != t.rows()) return std::nullopt;
    PoolEntry e;
    e.tau0 = t;
    e.cert = irreducible_over_Q(cp, prime_budget);
    if (require_irreducible && e.cert.verdict != IrredVerdict::Irreducible) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(t));
    e.eigvecs = es.eigenvectors().rowwise().reverse();
    e.unit_det = det(t) == 1;
    e.positive_definite = es.eigenvalues().minCoeff() > 0;
    return e;
}

/// Integer symmetric matrices with entries in [-5, 5], in order of increasing
/// Frobenius norm and then lexicographically in the upper-triangular entries.
template <class Visit>
bool for_each_small_symmetric(std::size_t m, Visit&& visit) {
    const std::size_t n = sym_dim(m);
    std::vector<long> weight;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) weight.push_back(i == j ? 1 : 2);
    std::vector<long> e(n);
    const long max_norm = 25 * static_cast<long>(m * m);
    for (long target = 1; target <= max_norm; ++target) {
        bool stop = false;
        auto rec = [&](auto&& self, std::size_t k, long remaining) -> void {
            if (stop) return;
            if (k == n) {
                if (remaining != 0) return;
                QMatrix t(m, m);
                std::size_t idx = 0;
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = i; j < m; ++j, ++idx) t(i, j) = t(j, i) = e[idx];
                if (!visit(t)) stop = true;
                return;
            }
            for (long v = -5; v <= 5; ++v) {
                long c = weight[k] * v * v;
                if (c > remaining) continue;
                e[k] = v;
                self(self, k + 1, remaining - c);
                if (stop) return;
            }
        };
        rec(rec, 0, target);
        if (stop) return true;
    }
    return false;
}

inline const std::vector<PoolEntry>& base_pool(std::size_t m, bool require_irreducible, std::size_t size,
                                               std::size_t prime_budget = kDefaultPrimeBudget) {
    static std::mutex mu;
    static std::map<std::tuple<std::size_t, bool, std::size_t, std::size_t>, std::vector<PoolEntry>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(m, require_irreducible, size, prime_budget);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<PoolEntry> pool;
    for_each_small_symmetric(m, [&](const QMatrix& t) {
        if (auto e = certify_base(t, require_irreducible, prime_budget)) {
            e->index = pool.size();
            pool.push_back(std::move(*e));
        }
        return pool.size() < size;
    });
    return cache.emplace(key, std::move(pool)).first->second;
}

struct Candidate {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t pool_index = 0;
    std::vector<std::size_t> perm;
    QMatrix g;
    bool valid = false;
};

inline Candidate best_for_base(const PoolEntry& e, const Eigen::MatrixXd& target, const Int& denom_bound) {
    const auto m = static_cast<std::size_t>(target.cols());
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    Candidate best;
    do {
        Eigen::MatrixXd e0(m, m);
        bool ok = true;
        for (std::size_t j = 0; j < m; ++j) {
            Eigen::VectorXd v = e.eigvecs.col(static_cast<Eigen::Index>(perm[j]));
            double s = v.dot(target.col(static_cast<Eigen::Index>(j)));
            if (std::abs(s) < 1e-9) ok = false;
            e0.col(static_cast<Eigen::Index>(j)) = v * s;
        }
        if (!ok) continue;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(e0);
        if (!lu.isInvertible()) continue;
        Eigen::MatrixXd gf = target * lu.inverse();
        double scale = gf.cwiseAbs().maxCoeff();
        if (!(scale > 0)) continue;
        gf /= scale;
        QMatrix g(m, m);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < m; ++c)
                g(r, c) = best_rational(gf(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), denom_bound);
        if (det(g) == 0) continue;
        Eigen::MatrixXd frame = to_eigen(g) * e0;
        double d = 0;
        for (std::size_t j = 0; j < m; ++j)
            d = std::max(d, line_sine(frame.col(static_cast<Eigen::Index>(j)), target.col(static_cast<Eigen::Index>(j))));
        if (d < best.distance) {
            best = {d, e.index, perm, g, true};
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline bool identity_perm(const std::vector<std::size_t>& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != i) return false;
    return true;
}

}  // namespace detail

inline constexpr std::size_t kDefaultPoolSize = 64;

/// Rational tau = g tau_0 g^{-1} whose eigenframe approximates the target
/// frame: tau_0 ranges over small integer symmetric matrices (irreducible
/// characteristic polynomial when required), g is the frame transport snapped
/// entrywise to denominators at most denom_bound after scaling to max entry 1.
/// Ties within 1e-12 in frame distance prefer det tau_0 = 1, then positive
/// definite tau_0, then the identity matching, then the smaller tau_0.
inline RationalizedTau rationalize_tau(const FloatFrame& target_frame, const Int& denom_bound, bool require_irreducible,
                                       const std::optional<QMatrix>& hint = std::nullopt,
                                       std::size_t pool_size = kDefaultPoolSize,
                                       std::size_t prime_budget = kDefaultPrimeBudget) {
    const std::size_t m = target_frame.size();
    if (m < 2) throw std::invalid_argument("rationalize_tau: need m >= 2 frame vectors");
    Eigen::MatrixXd target(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        if (target_frame[j].size() != m) throw std::invalid_argument("rationalize_tau: frame vectors must have length m");
        for (std::size_t i = 0; i < m; ++i) target(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = target_frame[j][i];
        double n = target.col(static_cast<Eigen::Index>(j)).norm();
        if (!(n > 0) || !std::isfinite(n)) throw std::invalid_argument("rationalize_tau: zero or non-finite frame vector");
        target.col(static_cast<Eigen::Index>(j)) /= n;
    }
    if (std::abs(target.determinant()) < 1e-12) throw std::invalid_argument("rationalize_tau: degenerate target frame");

    std::vector<detail::PoolEntry> hinted;
    const std::vector<detail::PoolEntry>* pool;
    if (hint) {
        if (!hint->square() || hint->rows() != m || !hint->is_symmetric() || !hint->is_integral())
            throw std::invalid_argument("rationalize_tau: hint must be an integer symmetric m x m matrix");
        auto e = detail::certify_base(*hint, require_irreducible, prime_budget);
        if (!e) throw std::domain_error("rationalize_tau: hint does not pass certification");
        hinted.push_back(std::move(*e));
        pool = &hinted;
    } else {
        pool = &detail::base_pool(m, require_irreducible, pool_size, prime_budget);
    }
    if (pool->empty()) throw std::runtime_error("rationalize_tau: no base matrix found within the search bound");

    std::vector<detail::Candidate> cands(pool->size());
    parallel_for(pool->size(), [&](std::size_t k) { cands[k] = detail::best_for_base((*pool)[k], target, denom_bound); });
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cands)
        if (c.valid) best = std::min(best, c.distance);
    if (!std::isfinite(best)) throw std::runtime_error("rationalize_tau: no candidate transport is invertible");
    const detail::Candidate* pick = nullptr;
    auto key = [&](const detail::Candidate& c) {
        const auto& e = (*pool)[c.pool_index];
        return std::make_tuple(!e.unit_det, !e.positive_definite, !detail::identity_perm(c.perm), c.pool_index);
    };
    for (const auto& c : cands) {
        if (!c.valid || c.distance > best + 1e-12) continue;
        if (!pick || key(c) < key(*pick)) pick = &c;
    }
    const auto& e = (*pool)[pick->pool_index];
    RationalizedTau out;
    out.base = e.tau0;
    out.g = pick->g;
    out.tau = out.g * e.tau0 * inverse_or_throw(out.g);
    out.irred = e.cert;
    out.sturm_count = sturm_distinct_real_roots(char_poly(out.tau));
    out.frame_distance = detail::upper_bound_rat(pick->distance);
    out.unit_determinant = e.unit_det;
    out.matching = pick->perm;
    return out;
}

/// Snaps L and phi (each scaled so its largest coordinate has absolute value
/// 1) to rationals with denominators at most denom_bound; rho = 2 L phi^T / phi(L) - I.
inline RationalPair rationalize_pair(const std::vector<double>& line, const std::vector<double>& plane, const Int& denom_bound) {
    if (line.size() != plane.size() || line.size() < 2) throw std::invalid_argument("rationalize_pair: dimension mismatch");
    auto snap = [&](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) {
            if (!std::isfinite(x)) throw std::invalid_argument("rationalize_pair: non-finite coordinate");
            s = std::max(s, std::abs(x));
        }
        if (s == 0) throw std::invalid_argument("rationalize_pair: zero vector");
        std::vector<Rat> out;
        for (double x : v) out.push_back(best_rational(x / s, denom_bound));
        return out;
    };
    auto l = snap(line), phi = snap(plane);
    if (std::all_of(l.begin(), l.end(), [](const Rat& x) { return x == 0; }) ||
        std::all_of(phi.begin(), phi.end(), [](const Rat& x) { return x == 0; }))
        throw GeneralPositionError("rationalize_pair: snapped vector is zero");
    if (dot(l, phi) == 0) throw GeneralPositionError("rationalize_pair: snapped line lies in the snapped hyperplane");
    LinePlanePair lp{ProjPoint(l), ProjHyperplane(phi)};
    return {lp, involution_from_pair(lp)};
}

/// Real eigenframe of tau (descending real parts), for use as a target.
inline FloatFrame float_eigenframe(const QMatrix& tau) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(detail::to_eigen(tau));
    const auto m = static_cast<std::size_t>(tau.rows());
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    auto ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ev(static_cast<Eigen::Index>(a)).real() > ev(static_cast<Eigen::Index>(b)).real();
    });
    FloatFrame f;
    for (std::size_t k : order) {
        Eigen::VectorXd col = es.eigenvectors().col(static_cast<Eigen::Index>(k)).real();
        f.emplace_back(col.data(), col.data() + col.size());
    }
    return f;
}

inline FloatFrame float_frame(const Arrangement& arr) {
    FloatFrame f;
    for (const auto& p : arr.points()) {
        std::vector<double> v;
        for (const auto& x : p.rep) v.push_back(x.get_d());
        f.push_back(std::move(v));
    }
    return f;
}

namespace detail {

/// Reorients `basis` so that it agrees with `reference` on the coordinates
/// where the reference is invertible; used when a flat is perturbed slightly.
inline std::vector<QMatrix> orient_like(std::vector<QMatrix> basis, const std::vector<QMatrix>& reference) {
    int s = relative_orientation(sym_columns(reference), sym_columns(basis));
    if (s < 0) basis.front() = -basis.front();
    return basis;
}

}  // namespace detail

struct RationalizedPattern {
    Pattern pattern;
    std::vector<RationalizedTau> taus;
    Int denom_bound;
    bool stable = false;
};

/// Replaces each flat by a rationalized tau with irreducible characteristic
/// polynomial and each pair by its snap, trying the denominator bounds in
/// order until the sign matrix is unchanged.
inline RationalizedPattern rationalize_pattern(const Pattern& p, const std::vector<Int>& bounds,
                                               std::size_t prime_budget = kDefaultPrimeBudget) {
    if (bounds.empty()) throw std::invalid_argument("rationalize_pattern: no denominator bounds");
    RationalizedPattern out;
    for (const Int& q : bounds) {
        if (q < 1) throw std::invalid_argument("rationalize_pattern: denominator bounds must be positive");
        std::vector<RationalizedTau> taus;
        std::vector<FlatX> flats;
        for (std::size_t i = 0; i < p.N; ++i) {
            FloatFrame target = p.frames[i] ? float_frame(*p.frames[i]) : float_eigenframe(p.flats[i].tau);
            taus.push_back(rationalize_tau(target, q, true, std::nullopt, kDefaultPoolSize, prime_budget));
            FlatX x = flat_from_tau(taus.back().tau);
            x.basis = detail::orient_like(std::move(x.basis), p.flats[i].basis);
            x.orientation = SymOrientation::Matched;
            flats.push_back(std::move(x));
        }
        std::vector<SubspaceY> ys;
        bool degenerate = false;
        for (const auto& y : p.subspaces) {
            std::vector<double> l, phi;
            for (const auto& x : y.line.rep) l.push_back(x.get_d());
            for (const auto& x : y.plane.rep) phi.push_back(x.get_d());
            std::optional<RationalPair> snapped;
            try {
                snapped = rationalize_pair(l, phi, q);
            } catch (const GeneralPositionError&) {
                degenerate = true;
                break;
            }
            SubspaceY sy = subspace_from_rho(snapped->rho);
            sy.basis = detail::orient_like(std::move(sy.basis), y.basis);
            sy.orientation = SymOrientation::Matched;
            ys.push_back(std::move(sy));
        }
        if (degenerate) continue;
        Pattern snapped = build_pattern(std::vector<std::optional<Arrangement>>(p.N), std::move(flats), std::move(ys));
        out.pattern = std::move(snapped);
        out.taus = std::move(taus);
        out.denom_bound = q;
        out.stable = certify_pattern_stability(p, out.pattern);
        if (out.stable) return out;
    }
    return out;
}

/// Denominator bounds start, 10 start, 100 start, .. up to limit.
inline std::vector<Int> denominator_ladder(Int start = 10, const Int& limit = Int(1'000'000'000)) {
    std::vector<Int> out;
    for (; start <= limit; start *= 10) out.push_back(start);
    return out;
}

inline RationalizedPattern rationalize_pattern(const Pattern& p) { return rationalize_pattern(p, denominator_ladder()); }

}  // namespace flatlink
