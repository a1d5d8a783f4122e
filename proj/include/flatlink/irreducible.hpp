#pragma once

// Sufficient irreducibility certificates over Q: rational roots, square-free
// part, factor-degree patterns modulo small primes, and a bounded Kronecker
// search for an explicit factor.

#include "flatlink/poly.hpp"

#include <cstdint>
#include <map>
#include <set>

namespace flatlink {

enum class IrredVerdict { Irreducible, Reducible, Inconclusive };

inline const char* to_string(IrredVerdict v) {
    switch (v) {
        case IrredVerdict::Irreducible: return "Irreducible";
        case IrredVerdict::Reducible: return "Reducible";
        case IrredVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct PrimePattern {
    long prime = 0;
    std::vector<int> degrees;  // factor degrees of the reduction, ascending
};

struct IrredCertificate {
    IrredVerdict verdict = IrredVerdict::Inconclusive;
    std::optional<long> witness_prime;  // reduction irreducible mod this prime
    std::optional<Rat> witness_root;
    std::optional<QPoly> witness_factor;  // nontrivial factor over Q
    std::vector<PrimePattern> patterns;
};

inline constexpr std::size_t kDefaultPrimeBudget = 25;

namespace detail {

inline bool is_small_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Positive divisors of |n| (n != 0) when |n| factors over primes below the
/// trial limit, otherwise nullopt.
inline std::optional<std::vector<Int>> divisors(const Int& n, long trial_limit = 1'000'000, std::size_t cap = 4096) {
    Int m = abs(n);
    if (m == 0) return std::nullopt;
    std::vector<std::pair<Int, int>> fac;
    for (long d = 2; d <= trial_limit && Int(d) * d <= m; ++d) {
        if (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(d))) {
            int e = 0;
            while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(d))) {
                m /= d;
                ++e;
            }
            fac.push_back({Int(d), e});
        }
    }
    if (m > 1) {
        if (m > Int(trial_limit) * trial_limit && mpz_probab_prime_p(m.get_mpz_t(), 30) == 0) return std::nullopt;
        fac.push_back({m, 1});
    }
    std::vector<Int> divs{1};
    for (const auto& [p, e] : fac) {
        std::size_t base = divs.size();
        Int pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
            if (divs.size() > cap) return std::nullopt;
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

/// Integer coefficients with content 1 and positive leading coefficient.
inline std::vector<Int> primitive_coefficients(const QPoly& p) {
    auto prim = primitive_integer(std::vector<Rat>(p.coeffs().rbegin(), p.coeffs().rend()));
    return {prim.rbegin(), prim.rend()};
}

// Dense polynomials over Z/p, ascending, trimmed.
using ModPoly = std::vector<std::int64_t>;

inline void mtrim(ModPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::int64_t mpow(std::int64_t b, std::int64_t e, std::int64_t p) {
    std::int64_t r = 1;
    b %= p;
    if (b < 0) b += p;
    while (e > 0) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

inline std::int64_t minv(std::int64_t a, std::int64_t p) { return mpow(a, p - 2, p); }

inline ModPoly msub(ModPoly a, const ModPoly& b, std::int64_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % p + p) % p;
    mtrim(a);
    return a;
}

inline ModPoly mmul(const ModPoly& a, const ModPoly& b, std::int64_t p) {
    if (a.empty() || b.empty()) return {};
    ModPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    mtrim(c);
    return c;
}

inline std::pair<ModPoly, ModPoly> mdivmod(ModPoly a, const ModPoly& b, std::int64_t p) {
    if (b.empty()) throw std::domain_error("mod-p division by zero");
    if (a.size() < b.size()) return {{}, a};
    ModPoly q(a.size() - b.size() + 1, 0);
    std::int64_t inv = minv(b.back(), p);
    for (std::size_t k = q.size(); k-- > 0;) {
        std::int64_t f = a[k + b.size() - 1] * inv % p;
        q[k] = f;
        if (f == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) a[k + j] = ((a[k + j] - f * b[j]) % p + p) % p;
    }
    a.resize(b.size() - 1);
    mtrim(a);
    mtrim(q);
    return {q, a};
}

inline ModPoly mgcd(ModPoly a, ModPoly b, std::int64_t p) {
    while (!b.empty()) {
        auto r = mdivmod(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        std::int64_t inv = minv(a.back(), p);
        for (auto& x : a) x = x * inv % p;
    }
    return a;
}

inline ModPoly mderiv(const ModPoly& a, std::int64_t p) {
    if (a.size() <= 1) return {};
    ModPoly d(a.size() - 1);
    for (std::size_t k = 1; k < a.size(); ++k) d[k - 1] = a[k] * static_cast<std::int64_t>(k % p) % p;
    mtrim(d);
    return d;
}

inline ModPoly mpowmod(ModPoly base, std::int64_t e, const ModPoly& f, std::int64_t p) {
    ModPoly r{1};
    base = mdivmod(base, f, p).second;
    while (e > 0) {
        if (e & 1) r = mdivmod(mmul(r, base, p), f, p).second;
        base = mdivmod(mmul(base, base, p), f, p).second;
        e >>= 1;
    }
    return r;
}

/// Factor degrees of a square-free polynomial over Z/p by distinct-degree
/// factorization (the count of degree-d factors is deg(g_d)/d).
inline std::vector<int> distinct_degree_pattern(ModPoly f, std::int64_t p) {
    std::vector<int> degrees;
    {
        std::int64_t inv = minv(f.back(), p);
        for (auto& x : f) x = x * inv % p;
    }
    const ModPoly x{0, 1};
    ModPoly h = x;
    for (int d = 1; 2 * d <= static_cast<int>(f.size()) - 1; ++d) {
        h = mpowmod(h, p, f, p);
        ModPoly g = mgcd(f, msub(h, x, p), p);
        int gd = static_cast<int>(g.size()) - 1;
        if (gd > 0) {
            for (int k = 0; k < gd / d; ++k) degrees.push_back(d);
            f = mdivmod(f, g, p).first;
            h = mdivmod(h, f, p).second;
        }
    }
    if (f.size() > 1) degrees.push_back(static_cast<int>(f.size()) - 1);
    std::sort(degrees.begin(), degrees.end());
    return degrees;
}

inline std::set<int> proper_subset_sums(const std::vector<int>& degrees, int total) {
    std::set<int> sums{0};
    for (int d : degrees) {
        std::set<int> next = sums;
        for (int s : sums) next.insert(s + d);
        sums = std::move(next);
    }
    std::set<int> out;
    for (int s : sums)
        if (s > 0 && s < total) out.insert(s);
    return out;
}

inline std::optional<Rat> find_rational_root(const std::vector<Int>& f) {
    if (f.front() == 0) return Rat(0);
    auto num = divisors(f.front());
    auto den = divisors(f.back());
    if (!num || !den) return std::nullopt;
    QPoly q(to_rat(f));
    for (const auto& a : *num)
        for (const auto& b : *den)
            for (int s : {1, -1}) {
                Rat r = make_rat(a * s, b);
                if (q(r) == 0) return r;
            }
    return std::nullopt;
}

/// Lagrange interpolation through (xs[i], ys[i]).
inline QPoly interpolate(const std::vector<Rat>& xs, const std::vector<Rat>& ys) {
    QPoly acc;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        QPoly basis = QPoly::constant(1);
        Rat denom = 1;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            basis = basis * QPoly{-xs[j], 1};
            denom *= xs[i] - xs[j];
        }
        acc = acc + (ys[i] / denom) * basis;
    }
    return acc;
}

/// Kronecker's method restricted to the candidate degrees, with a cap on the
/// number of value combinations tried.
inline std::optional<QPoly> kronecker_factor(const std::vector<Int>& f, const std::set<int>& degrees,
                                             std::size_t combo_cap = 200'000) {
    QPoly fq(to_rat(f));
    const int n = fq.degree();
    for (int d : degrees) {
        if (d > n / 2) continue;
        std::vector<Rat> xs;
        std::vector<std::vector<Int>> divs;
        std::size_t combos = 1;
        for (long x = 0; static_cast<int>(xs.size()) < d + 1 && x < 64; x = (x <= 0 ? -x + 1 : -x)) {
            Rat v = fq(Rat(x));
            if (v == 0) return QPoly{Rat(-x), 1};
            auto dv = divisors(v.get_num());
            if (!dv) continue;
            xs.push_back(Rat(x));
            divs.push_back(*dv);
            combos *= 2 * dv->size();
            if (combos > combo_cap) break;
        }
        if (static_cast<int>(xs.size()) < d + 1 || combos > combo_cap) continue;
        // Candidate values g(x_i) divide f(x_i); the first is taken positive
        // since g and -g are the same factor.
        std::vector<std::vector<Int>> vals(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (const auto& dv : divs[i]) {
                vals[i].push_back(dv);
                if (i > 0) vals[i].push_back(-dv);
            }
        std::vector<std::size_t> idx(xs.size(), 0);
        for (;;) {
            std::vector<Rat> ys(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = Rat(vals[i][idx[i]]);
            QPoly g = interpolate(xs, ys);
            if (g.degree() == d) {
                bool integral = std::all_of(g.coeffs().begin(), g.coeffs().end(),
                                            [](const Rat& c) { return c.get_den() == 1; });
                if (integral && QPoly::divmod(fq, g).second.is_zero()) return g;
            }
            std::size_t k = 0;
            while (k < xs.size() && ++idx[k] == vals[k].size()) idx[k++] = 0;
            if (k == xs.size()) break;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Irreducibility of p over Q. Reducible verdicts carry an explicit root or
/// factor; Irreducible verdicts carry a prime or a set of degree patterns with
/// no common proper refinement. Constant input is an error.
inline IrredCertificate irreducible_over_Q(const QPoly& p, std::size_t prime_budget = kDefaultPrimeBudget) {
    if (p.degree() < 1) throw std::invalid_argument("irreducible_over_Q: constant polynomial");
    IrredCertificate cert;
    const int n = p.degree();
    auto f = detail::primitive_coefficients(p);
    QPoly fq(to_rat(f));

    if (n >= 2) {
        if (auto root = detail::find_rational_root(f)) {
            cert.verdict = IrredVerdict::Reducible;
            cert.witness_root = *root;
            return cert;
        }
        QPoly g = gcd(fq, fq.derivative());
        if (g.degree() > 0) {
            cert.verdict = IrredVerdict::Reducible;
            cert.witness_factor = g;
            return cert;
        }
    }

    std::set<int> possible;
    for (int d = 1; d < n; ++d) possible.insert(d);
    std::size_t used = 0;
    for (long prime = 2; used < prime_budget && prime < 100'000; ++prime) {
        if (!detail::is_small_prime(prime)) continue;
        detail::ModPoly fp(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            Int r = f[k] % prime;
            if (r < 0) r += prime;
            fp[k] = r.get_si();
        }
        if (fp.back() == 0) continue;
        detail::mtrim(fp);
        if (detail::mgcd(fp, detail::mderiv(fp, prime), prime).size() > 1) continue;
        ++used;
        auto degs = detail::distinct_degree_pattern(fp, prime);
        cert.patterns.push_back({prime, degs});
        if (degs.size() == 1) {
            cert.verdict = IrredVerdict::Irreducible;
            cert.witness_prime = prime;
            return cert;
        }
        auto sums = detail::proper_subset_sums(degs, n);
        std::set<int> keep;
        std::set_intersection(possible.begin(), possible.end(), sums.begin(), sums.end(),
                              std::inserter(keep, keep.begin()));
        possible = std::move(keep);
        if (possible.empty()) {
            cert.verdict = IrredVerdict::Irreducible;
            return cert;
        }
    }

    if (auto g = detail::kronecker_factor(f, possible)) {
        cert.verdict = IrredVerdict::Reducible;
        cert.witness_factor = g->monic();
        return cert;
    }
    cert.verdict = IrredVerdict::Inconclusive;
    return cert;
}

}  // namespace flatlink
