#pragma once

// Univariate polynomials over Q, characteristic polynomials and Sturm sequences.

#include "flatlink/linalg.hpp"

namespace flatlink {

/// Coefficients in ascending degree; the zero polynomial has no coefficients.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
    QPoly(std::initializer_list<Rat> coeffs) : c_(coeffs) { trim(); }

    static QPoly constant(const Rat& a) { return QPoly(std::vector<Rat>{a}); }
    static QPoly monomial(std::size_t deg, const Rat& a = 1) {
        std::vector<Rat> c(deg + 1);
        c[deg] = a;
        return QPoly(std::move(c));
    }
    /// Monic polynomial with the given roots.
    static QPoly from_roots(std::span<const Rat> roots) {
        QPoly p = constant(1);
        for (const auto& r : roots) p = p * QPoly{-r, 1};
        return p;
    }

    bool is_zero() const { return c_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const Rat& lead() const {
        if (c_.empty()) throw std::domain_error("leading coefficient of zero polynomial");
        return c_.back();
    }
    Rat coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }
    std::span<const Rat> coeffs() const { return c_; }

    Rat operator()(const Rat& x) const {
        Rat acc = 0;
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
        return acc;
    }
    double eval(double x) const {
        double acc = 0;
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k].get_d();
        return acc;
    }

    QPoly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Rat> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<unsigned long>(k);
        return QPoly(std::move(d));
    }

    QPoly monic() const {
        if (is_zero()) return {};
        QPoly p = *this;
        Rat l = lead();
        for (auto& x : p.c_) x /= l;
        return p;
    }

    friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

    friend QPoly operator+(const QPoly& a, const QPoly& b) {
        std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
        return QPoly(std::move(c));
    }
    friend QPoly operator-(const QPoly& a, const QPoly& b) {
        std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) - b.coeff(k);
        return QPoly(std::move(c));
    }
    friend QPoly operator-(const QPoly& a) { return QPoly() - a; }
    friend QPoly operator*(const QPoly& a, const QPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rat> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return QPoly(std::move(c));
    }
    friend QPoly operator*(const Rat& s, const QPoly& a) { return QPoly::constant(s) * a; }

    /// Euclidean division: a = q b + r with deg r < deg b.
    static std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        if (a.degree() < b.degree()) return {QPoly(), a};
        std::vector<Rat> r = a.c_;
        std::vector<Rat> q(a.c_.size() - b.c_.size() + 1);
        const Rat& bl = b.lead();
        for (std::size_t k = q.size(); k-- > 0;) {
            Rat f = r[k + b.c_.size() - 1] / bl;
            q[k] = f;
            if (f == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[k + j] -= f * b.c_[j];
        }
        r.resize(b.c_.size() - 1);
        return {QPoly(std::move(q)), QPoly(std::move(r))};
    }
    friend QPoly operator%(const QPoly& a, const QPoly& b) { return divmod(a, b).second; }
    friend QPoly operator/(const QPoly& a, const QPoly& b) { return divmod(a, b).first; }

    friend std::ostream& operator<<(std::ostream& os, const QPoly& p) {
        if (p.is_zero()) return os << "0";
        bool first = true;
        for (std::size_t k = p.c_.size(); k-- > 0;) {
            if (p.c_[k] == 0) continue;
            Rat a = p.c_[k];
            if (!first) os << (a < 0 ? " - " : " + ");
            else if (a < 0) os << "-";
            a = abs(a);
            if (a != 1 || k == 0) os << a.get_str();
            if (k >= 1) os << "t";
            if (k >= 2) os << "^" << k;
            first = false;
        }
        return os;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rat> c_;
};

/// Monic gcd; gcd(0, 0) = 0.
inline QPoly gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// Substitutes a square matrix into p (Horner).
inline QMatrix evaluate(const QPoly& p, const QMatrix& m) {
    if (!m.square()) throw std::invalid_argument("evaluate: matrix is not square");
    QMatrix acc(m.rows(), m.cols());
    const QMatrix id = QMatrix::identity(m.rows());
    for (std::size_t k = p.coeffs().size(); k-- > 0;) acc = acc * m + id * p.coeffs()[k];
    return acc;
}

/// det(t I - M), monic of degree dim M (Faddeev-LeVerrier recurrence).
inline QPoly char_poly(const QMatrix& m) {
    if (!m.square()) throw std::invalid_argument("char_poly: matrix is not square");
    const std::size_t n = m.rows();
    std::vector<Rat> c(n + 1);
    c[n] = 1;
    QMatrix mk(n, n);
    const QMatrix id = QMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        mk = m * mk + id * c[n - k + 1];
        QMatrix amk = m * mk;
        c[n - k] = -amk.trace() / Rat(static_cast<unsigned long>(k));
    }
    return QPoly(std::move(c));
}

/// Canonical Sturm sequence p, p', -rem(...), ... with exact coefficients.
inline std::vector<QPoly> sturm_sequence(const QPoly& p) {
    if (p.is_zero()) throw std::domain_error("Sturm sequence of the zero polynomial");
    std::vector<QPoly> seq{p, p.derivative()};
    while (!seq.back().is_zero()) {
        QPoly r = seq[seq.size() - 2] % seq.back();
        seq.push_back(-r);
    }
    seq.pop_back();
    return seq;
}

namespace detail {

inline int sign_changes(const std::vector<int>& signs) {
    int changes = 0;
    int last = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

inline int changes_at(const std::vector<QPoly>& seq, const Rat& x) {
    std::vector<int> s;
    for (const auto& q : seq) s.push_back(sign(q(x)));
    return sign_changes(s);
}

inline int changes_at_infinity(const std::vector<QPoly>& seq, bool positive) {
    std::vector<int> s;
    for (const auto& q : seq) {
        int sg = sign(q.lead());
        if (!positive && q.degree() % 2 == 1) sg = -sg;
        s.push_back(sg);
    }
    return sign_changes(s);
}

}  // namespace detail

/// Number of distinct real roots over the whole real line.
inline std::size_t sturm_distinct_real_roots(const QPoly& p) {
    if (p.is_zero()) throw std::domain_error("sturm_distinct_real_roots: zero polynomial");
    auto seq = sturm_sequence(p);
    return static_cast<std::size_t>(detail::changes_at_infinity(seq, false) - detail::changes_at_infinity(seq, true));
}

/// Number of distinct real roots in the half-open interval (a, b].
inline std::size_t sturm_count(const std::vector<QPoly>& seq, const Rat& a, const Rat& b) {
    return static_cast<std::size_t>(detail::changes_at(seq, a) - detail::changes_at(seq, b));
}

/// Every real root lies strictly inside (-B, B).
inline Rat cauchy_root_bound(const QPoly& p) {
    Rat m = 0;
    for (int k = 0; k < p.degree(); ++k) m = std::max(m, Rat(abs(p.coeff(k) / p.lead())));
    return m + 1;
}

/// Rational with the smallest denominator in the open interval (lo, hi),
/// hi = nullopt meaning +infinity.
inline Rat simplest_rational_between(const Rat& lo, const std::optional<Rat>& hi) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    Rat next(f + 1);
    if (!hi || next < *hi) return next;
    // lo and hi share the integer part f; recurse on the reciprocals.
    Rat a = lo - Rat(f);
    Rat b = *hi - Rat(f);
    std::optional<Rat> upper;
    if (a != 0) upper = 1 / a;
    return Rat(f) + 1 / simplest_rational_between(1 / b, upper);
}

struct RootInterval {
    Rat lo;  // exclusive
    Rat hi;  // inclusive; equals the root when the root is rational and was hit
    bool exact = false;
};

/// Isolating intervals (lo, hi] for the distinct real roots, ascending, each of
/// width at most `width` unless the root is pinned exactly.
inline std::vector<RootInterval> isolate_real_roots(const QPoly& p, const Rat& width = Rat(1, 1 << 20)) {
    auto seq = sturm_sequence(p);
    Rat bound = cauchy_root_bound(p);
    std::vector<RootInterval> out;
    std::vector<std::pair<Rat, Rat>> stack{{-bound, bound}};
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        std::size_t n = sturm_count(seq, lo, hi);
        if (n == 0) continue;
        if (n == 1) {
            if (p(hi) == 0) {
                out.push_back({lo, hi, true});
                continue;
            }
            while (hi - lo > width) {
                Rat mid = (lo + hi) / 2;
                if (p(mid) == 0) {
                    lo = mid - width / 4;
                    hi = mid;
                    break;
                }
                if (sturm_count(seq, lo, mid) == 1) hi = mid;
                else lo = mid;
            }
            if (p(hi) != 0) {
                Rat r = simplest_rational_between(lo, hi);
                if (p(r) == 0) hi = r;
            }
            out.push_back({lo, hi, p(hi) == 0});
            continue;
        }
        Rat mid = (lo + hi) / 2;
        stack.push_back({lo, mid});
        stack.push_back({mid, hi});
    }
    std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.hi < b.hi; });
    return out;
}

}  // namespace flatlink
