#pragma once

// Congruence descent at desk scale: rational decompositions gamma = a b with
// a commuting with rho and b with tau, orientation and level arithmetic for
// Gamma(p^n), and bounded enumeration of signed intersections gamma X n Y.

#include "flatlink/parallel.hpp"
#include "flatlink/symspace.hpp"

#include <random>

namespace flatlink {

struct CongruenceLevel {
    Int p;
    unsigned n = 1;

    CongruenceLevel() = default;
    CongruenceLevel(Int prime, unsigned exponent) : p(std::move(prime)), n(exponent) {
        if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 30) == 0)
            throw std::invalid_argument("CongruenceLevel: p must be prime");
        if (n < 1) throw std::invalid_argument("CongruenceLevel: n must be positive");
    }
    Int modulus() const {
        Int q;
        mpz_pow_ui(q.get_mpz_t(), p.get_mpz_t(), n);
        return q;
    }
};

struct Decomposition {
    QMatrix a;
    QMatrix b;
};

enum class PtoqStatus { Solved, NoSolution, Undecided };

inline const char* to_string(PtoqStatus s) {
    switch (s) {
        case PtoqStatus::Solved: return "Solved";
        case PtoqStatus::NoSolution: return "NoSolution";
        case PtoqStatus::Undecided: return "Undecided";
    }
    return "?";
}

/// NoSolution is certified either by an empty kernel or by det vanishing on
/// the grid {0..m}^k of kernel coordinates, which forces det = 0 on the whole
/// kernel since det has degree at most m in each coordinate.
struct PtoqResult {
    PtoqStatus status = PtoqStatus::Undecided;
    std::optional<Decomposition> decomposition;
    std::size_t kernel_dim = 0;
    std::size_t grid_points_checked = 0;
    bool grid_certificate = false;

    bool solved() const { return status == PtoqStatus::Solved; }
};

struct SignedHit {
    QMatrix gamma;
    SPDPoint point;
    int sign = 0;
};

enum class LOrientation { Preserving, Reversing };

inline const char* to_string(LOrientation o) { return o == LOrientation::Preserving ? "Preserving" : "Reversing"; }

namespace detail {

inline void check_square_pair(const QMatrix& a, const QMatrix& b, const char* who) {
    if (!a.square() || !b.square() || a.rows() != b.rows() || a.rows() == 0)
        throw std::invalid_argument(std::string(who) + ": inputs must be square of equal size");
}

/// Columns: vec of each map applied to the unit matrices E_ij, stacked.
template <class... F>
QMatrix matrix_linear_system(std::size_t m, F&&... maps) {
    std::vector<std::vector<Rat>> cols;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            QMatrix e(m, m);
            e(i, j) = 1;
            std::vector<Rat> col;
            auto append = [&](const QMatrix& img) {
                for (std::size_t r = 0; r < m; ++r)
                    for (std::size_t c = 0; c < m; ++c) col.push_back(img(r, c));
            };
            (append(maps(e)), ...);
            cols.push_back(std::move(col));
        }
    return QMatrix::from_columns(cols);
}

inline QMatrix unvec(const QMatrix& v, std::size_t m) {
    QMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = v(i * m + j, 0);
    return a;
}

inline QMatrix combine(const std::vector<QMatrix>& basis, const std::vector<long>& coeffs) {
    QMatrix a = basis.front() * Rat(coeffs.front());
    for (std::size_t k = 1; k < basis.size(); ++k)
        if (coeffs[k] != 0) a = a + basis[k] * Rat(coeffs[k]);
    return a;
}

/// a v = lambda v on the +1 line of rho; rescales (a, b) to (a / lambda, lambda b).
inline Decomposition normalize_on_line(Decomposition d, const QMatrix& rho) {
    const std::size_t m = rho.rows();
    auto plus = kernel_basis(rho - QMatrix::identity(m));
    if (plus.size() != 1) return d;
    QMatrix v = plus.front();
    QMatrix av = d.a * v;
    std::optional<Rat> lambda;
    for (std::size_t i = 0; i < m; ++i)
        if (v(i, 0) != 0) {
            lambda = av(i, 0) / v(i, 0);
            break;
        }
    if (!lambda || *lambda == 0 || av != v * *lambda) return d;
    d.a = d.a * (1 / *lambda);
    d.b = d.b * *lambda;
    return d;
}

inline Int p_valuation(const Int& x, const Int& p) {
    if (x == 0) throw std::invalid_argument("p_valuation: zero");
    Int rest;
    return Int(static_cast<unsigned long>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t())));
}

inline void check_prime(const Int& p) {
    if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 30) == 0) throw std::invalid_argument("level: p must be prime");
}

inline Int as_integer(const Rat& x, const char* who) {
    if (x.get_den() != 1) throw std::invalid_argument(std::string(who) + ": entries must be integers");
    return x.get_num();
}

}  // namespace detail

inline constexpr std::size_t kDefaultGridBudget = 200'000;
inline constexpr std::size_t kDefaultRandomTrials = 64;

/// Solves a tau = (gamma tau gamma^{-1}) a and a rho = rho a for an invertible
/// a, then b = a^{-1} gamma. The returned a fixes the primitive vector of the
/// +1 line of rho when rho is a reflection-type involution.
inline PtoqResult ptoq_solve(const QMatrix& gamma, const QMatrix& tau, const QMatrix& rho,
                             std::size_t grid_budget = kDefaultGridBudget, std::uint64_t seed = 1) {
    detail::check_square_pair(gamma, tau, "ptoq_solve");
    detail::check_square_pair(gamma, rho, "ptoq_solve");
    const std::size_t m = gamma.rows();
    auto gamma_inv = inverse(gamma);
    if (!gamma_inv) throw std::domain_error("ptoq_solve: gamma is singular");
    const QMatrix conj = gamma * tau * *gamma_inv;
    QMatrix sys = detail::matrix_linear_system(
        m, [&](const QMatrix& a) { return a * tau - conj * a; }, [&](const QMatrix& a) { return a * rho - rho * a; });
    std::vector<QMatrix> basis;
    for (const auto& v : kernel_basis(sys)) basis.push_back(detail::unvec(v, m));

    PtoqResult out;
    out.kernel_dim = basis.size();
    if (basis.empty()) {
        out.status = PtoqStatus::NoSolution;
        return out;
    }
    auto accept = [&](const QMatrix& a) {
        Decomposition d{a, inverse_or_throw(a) * gamma};
        out.decomposition = detail::normalize_on_line(std::move(d), rho);
        out.status = PtoqStatus::Solved;
        return out;
    };
    for (const auto& a : basis)
        if (det(a) != 0) return accept(a);

    const std::size_t k = basis.size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> coef(-3, 3);
    for (std::size_t t = 0; t < kDefaultRandomTrials; ++t) {
        std::vector<long> c(k);
        for (auto& x : c) x = coef(rng);
        QMatrix a = detail::combine(basis, c);
        if (det(a) != 0) return accept(a);
    }

    double grid = std::pow(static_cast<double>(m + 1), static_cast<double>(k));
    if (grid > static_cast<double>(grid_budget)) {
        out.status = PtoqStatus::Undecided;
        return out;
    }
    std::vector<long> c(k, 0);
    for (;;) {
        ++out.grid_points_checked;
        QMatrix a = detail::combine(basis, c);
        if (det(a) != 0) return accept(a);
        std::size_t pos = 0;
        while (pos < k && c[pos] == static_cast<long>(m)) c[pos++] = 0;
        if (pos == k) break;
        ++c[pos];
    }
    out.status = PtoqStatus::NoSolution;
    out.grid_certificate = true;
    return out;
}

/// Checks a b = gamma, [a, rho] = 0, [b, tau] = 0 and det a != 0.
inline bool verify_decomposition(const Decomposition& d, const QMatrix& gamma, const QMatrix& tau, const QMatrix& rho) {
    return det(d.a) != 0 && d.a * d.b == gamma && commutator(d.a, rho).is_zero() && commutator(d.b, tau).is_zero();
}

/// Sign of gamma on the primitive integer vector of L.
inline LOrientation orientation_on_L(const QMatrix& gamma, const ProjPoint& line) {
    if (!gamma.square() || gamma.rows() != line.dim()) throw std::invalid_argument("orientation_on_L: dimension mismatch");
    if (!gamma.is_integral()) throw std::invalid_argument("orientation_on_L: gamma must be integral");
    auto v = line.rat();
    auto w = mat_vec(gamma, v);
    if (w == v) return LOrientation::Preserving;
    std::vector<Rat> neg;
    for (const auto& x : v) neg.push_back(-x);
    if (w == neg) return LOrientation::Reversing;
    const std::size_t m = v.size();
    QMatrix both(m, 2);
    for (std::size_t i = 0; i < m; ++i) {
        both(i, 0) = v[i];
        both(i, 1) = w[i];
    }
    if (rank(both) == 2) throw std::domain_error("orientation_on_L: gamma does not fix L");
    throw std::domain_error("orientation_on_L: gamma scales L by a factor other than +-1");
}

/// Least n with 2 v != 0 mod p^n.
inline unsigned min_level_v(const std::vector<Int>& v, const Int& p) {
    detail::check_prime(p);
    Int g = 0;
    for (const auto& x : v) g = gcd(g, x);
    if (g == 0) throw std::invalid_argument("min_level_v: zero vector");
    if (g != 1) throw std::invalid_argument("min_level_v: vector is not primitive");
    std::optional<Int> best;
    for (const auto& x : v)
        if (x != 0) {
            Int val = detail::p_valuation(Int(2 * x), p);
            if (!best || val < *best) best = val;
        }
    return static_cast<unsigned>(best->get_ui()) + 1;
}

/// Least n with gamma not in Gamma(p^n).
inline unsigned min_level_separate(const QMatrix& gamma, const Int& p) {
    detail::check_prime(p);
    if (!gamma.square()) throw std::invalid_argument("min_level_separate: gamma must be square");
    QMatrix d = gamma - QMatrix::identity(gamma.rows());
    if (d.is_zero()) throw std::invalid_argument("min_level_separate: gamma is the identity");
    std::optional<Int> best;
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
            Int x = detail::as_integer(d(i, j), "min_level_separate");
            if (x == 0) continue;
            Int val = detail::p_valuation(x, p);
            if (!best || val < *best) best = val;
        }
    return static_cast<unsigned>(best->get_ui()) + 1;
}

inline bool in_congruence_subgroup(const QMatrix& gamma, const CongruenceLevel& level) {
    if (!gamma.square() || !gamma.is_integral() || det(gamma) != 1) return false;
    const Int q = level.modulus();
    QMatrix d = gamma - QMatrix::identity(gamma.rows());
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
            if (!mpz_divisible_p(d(i, j).get_num_mpz_t(), q.get_mpz_t())) return false;
    return true;
}

/// The joint commutant {x : x rho = rho x, x tau = tau x} is the scalars.
inline bool scalar_commutant_check(const QMatrix& tau, const QMatrix& rho) {
    detail::check_square_pair(tau, rho, "scalar_commutant_check");
    const std::size_t m = tau.rows();
    QMatrix sys = detail::matrix_linear_system(
        m, [&](const QMatrix& x) { return x * rho - rho * x; }, [&](const QMatrix& x) { return x * tau - tau * x; });
    return kernel_basis(sys).size() == 1;
}

namespace detail {

using I128 = __int128;

inline I128 det_int(std::vector<I128> a, std::size_t m) {
    I128 prev = 1;
    int s = 1;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (a[k * m + k] == 0) {
            std::size_t r = k + 1;
            while (r < m && a[r * m + k] == 0) ++r;
            if (r == m) return 0;
            for (std::size_t c = 0; c < m; ++c) std::swap(a[k * m + c], a[r * m + c]);
            s = -s;
        }
        for (std::size_t i = k + 1; i < m; ++i)
            for (std::size_t j = k + 1; j < m; ++j)
                a[i * m + j] = (a[i * m + j] * a[k * m + k] - a[i * m + k] * a[k * m + j]) / prev;
        prev = a[k * m + k];
    }
    return s * a[m * m - 1];
}

/// Values x with |x| <= bound and x = r mod q, ascending.
inline std::vector<long> residue_values(long bound, long q, long r) {
    std::vector<long> out;
    for (long x = -bound; x <= bound; ++x)
        if (((x - r) % q + q) % q == 0) out.push_back(x);
    return out;
}

inline bool hit_order(const SignedHit& a, const SignedHit& b) {
    auto key = [](const QMatrix& g) {
        Rat mx = 0;
        std::vector<Rat> entries;
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) {
                mx = std::max(mx, Rat(abs(g(i, j))));
                entries.push_back(g(i, j));
            }
        return std::make_pair(mx, entries);
    };
    return key(a.gamma) < key(b.gamma);
}

}  // namespace detail

inline constexpr std::size_t kMaxEnumeration = 200'000'000;

/// All gamma in SL_m(Z) n Gamma(p^n) with |entries| <= entry_bound, in the
/// order of increasing max entry then lexicographic.
inline std::vector<QMatrix> congruence_elements(std::size_t m, const CongruenceLevel& level, long entry_bound) {
    if (m < 1 || entry_bound < 1) throw std::invalid_argument("congruence_elements: need m >= 1 and entry_bound >= 1");
    const Int qz = level.modulus();
    const long q = qz.fits_slong_p() && qz <= 2 * entry_bound + 1 ? qz.get_si() : 2 * entry_bound + 1;
    const auto diag = detail::residue_values(entry_bound, q, 1);
    const auto off = detail::residue_values(entry_bound, q, 0);
    const std::size_t free = m * m - 1;
    std::vector<const std::vector<long>*> choices;
    double total = 1;
    for (std::size_t k = 0; k < free; ++k) {
        const auto& c = (k / m == k % m) ? diag : off;
        choices.push_back(&c);
        total *= static_cast<double>(c.size());
    }
    if (total > static_cast<double>(kMaxEnumeration)) throw std::invalid_argument("congruence_elements: search space too large");
    const std::size_t outer = choices.empty() ? 1 : choices.front()->size();
    std::vector<std::vector<std::vector<long>>> found(outer);
    parallel_for(outer, [&](std::size_t first) {
        std::vector<std::size_t> idx(free, 0);
        if (free > 0) idx[0] = first;
        for (;;) {
            std::vector<detail::I128> a(m * m, 0);
            for (std::size_t k = 0; k < free; ++k) a[k] = (*choices[k])[idx[k]];
            a[m * m - 1] = 0;
            const detail::I128 d0 = detail::det_int(a, m);
            std::vector<detail::I128> minor;
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < m; ++j) minor.push_back(a[i * m + j]);
            const detail::I128 c = m == 1 ? 1 : detail::det_int(minor, m - 1);
            auto emit = [&](long x) {
                std::vector<long> g(a.begin(), a.end());
                g[m * m - 1] = x;
                found[first].push_back(std::move(g));
            };
            if (c != 0) {
                const detail::I128 num = 1 - d0;
                if (num % c == 0) {
                    const detail::I128 x = num / c;
                    if (x >= -entry_bound && x <= entry_bound && (((x - 1) % q) + q) % q == 0) emit(static_cast<long>(x));
                }
            } else if (d0 == 1) {
                for (long x : diag) emit(x);
            }
            std::size_t pos = 1;
            while (pos < free && idx[pos] + 1 == choices[pos]->size()) idx[pos++] = 0;
            if (pos >= free) break;
            ++idx[pos];
        }
    });
    std::vector<QMatrix> out;
    for (const auto& bucket : found)
        for (const auto& g : bucket) {
            QMatrix mtx(m, m);
            for (std::size_t k = 0; k < m * m; ++k) mtx(k / m, k % m) = g[k];
            out.push_back(std::move(mtx));
        }
    std::vector<SignedHit> keyed;
    keyed.reserve(out.size());
    for (auto& g : out) keyed.push_back({std::move(g), {}, 0});
    std::sort(keyed.begin(), keyed.end(), detail::hit_order);
    out.clear();
    for (auto& h : keyed) out.push_back(std::move(h.gamma));
    return out;
}

/// Transverse points of gamma X n Y over the bounded part of Gamma(p^n), with
/// gamma X carrying the transported orientation of X.
inline std::vector<SignedHit> enumerate_same_sign(const QMatrix& tau, const QMatrix& rho, const CongruenceLevel& level,
                                                  long entry_bound) {
    detail::check_square_pair(tau, rho, "enumerate_same_sign");
    if (!scalar_commutant_check(tau, rho))
        throw std::invalid_argument("enumerate_same_sign: the common centralizer of tau and rho is not scalar");
    const FlatX x = flat_from_tau(tau);
    const SubspaceY y = subspace_from_rho(rho);
    auto gammas = congruence_elements(tau.rows(), level, entry_bound);
    std::vector<std::optional<SignedHit>> slots(gammas.size());
    parallel_for(gammas.size(), [&](std::size_t k) {
        auto r = intersect(transport(gammas[k], x), y);
        if (r.kind == IntersectionKind::TransversePoint) slots[k] = SignedHit{gammas[k], *r.point, *r.sign};
    });
    std::vector<SignedHit> hits;
    for (auto& s : slots)
        if (s) hits.push_back(std::move(*s));
    return hits;
}

inline bool all_same_sign(const std::vector<SignedHit>& hits) {
    return std::all_of(hits.begin(), hits.end(), [&](const SignedHit& h) { return h.sign == hits.front().sign; });
}

struct LevelReport {
    CongruenceLevel level;
    long entry_bound = 0;
    std::vector<SignedHit> hits;
    std::vector<unsigned> levels_tried;
    bool identity_hit = false;
    bool all_same_sign = false;
};

/// Starts at the level where the primitive vector of L survives (v != -v),
/// then raises n past every hit whose sign disagrees with the identity's (or
/// past every hit when X and Y are disjoint) until none remain. `start`
/// overrides the initial level.
inline LevelReport find_same_sign_level(const QMatrix& tau, const QMatrix& rho, const Int& p, long entry_bound,
                                        std::optional<unsigned> start = std::nullopt, unsigned max_n = 64) {
    const SubspaceY y = subspace_from_rho(rho);
    std::vector<Int> v(y.line.rep.begin(), y.line.rep.end());
    const auto base = intersect(flat_from_tau(tau), y);
    LevelReport rep;
    rep.entry_bound = entry_bound;
    rep.identity_hit = base.kind == IntersectionKind::TransversePoint;
    unsigned n = start ? *start : min_level_v(v, p);
    while (n <= max_n) {
        rep.level = CongruenceLevel(p, n);
        rep.levels_tried.push_back(n);
        rep.hits = enumerate_same_sign(tau, rho, rep.level, entry_bound);
        unsigned next = n;
        for (const auto& h : rep.hits) {
            const bool offending = rep.identity_hit ? h.sign != *base.sign : true;
            if (offending) next = std::max(next, min_level_separate(h.gamma, p));
        }
        if (next == n) {
            rep.all_same_sign = all_same_sign(rep.hits);
            return rep;
        }
        n = next;
    }
    throw std::runtime_error("find_same_sign_level: level limit reached");
}

}  // namespace flatlink
