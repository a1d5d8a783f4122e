#pragma once

// Fraction-free (Bareiss) elimination and the exact linear algebra built on it.

#include "flatlink/matrix.hpp"

namespace flatlink {

namespace detail {

/// Row echelon form of an integer-scaled copy of a rational matrix. Every
/// entry produced by the Bareiss recurrence is a minor of the scaled input, so
/// the divisions by the previous pivot are exact.
struct FractionFreeEchelon {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<Int>> a;
    std::vector<std::size_t> pivot_cols;
    int row_swaps_sign = 1;
    Int row_scale_product = 1;

    std::size_t rank() const { return pivot_cols.size(); }
};

inline FractionFreeEchelon bareiss(const QMatrix& m) {
    FractionFreeEchelon e;
    e.rows = m.rows();
    e.cols = m.cols();
    e.a.assign(e.rows, std::vector<Int>(e.cols));
    for (std::size_t i = 0; i < e.rows; ++i) {
        auto row = m.row_vec(i);
        Int l = lcm_of_denominators(row);
        e.row_scale_product *= l;
        for (std::size_t j = 0; j < e.cols; ++j) {
            Rat s = row[j] * l;
            e.a[i][j] = s.get_num();
        }
    }
    Int prev = 1;
    Int t;
    std::size_t r = 0;
    for (std::size_t c = 0; c < e.cols && r < e.rows; ++c) {
        std::size_t p = r;
        while (p < e.rows && e.a[p][c] == 0) ++p;
        if (p == e.rows) continue;
        if (p != r) {
            std::swap(e.a[p], e.a[r]);
            e.row_swaps_sign = -e.row_swaps_sign;
        }
        const Int& piv = e.a[r][c];
        for (std::size_t i = r + 1; i < e.rows; ++i) {
            for (std::size_t j = c + 1; j < e.cols; ++j) {
                t = piv * e.a[i][j] - e.a[i][c] * e.a[r][j];
                mpz_divexact(e.a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            e.a[i][c] = 0;
        }
        prev = e.a[r][c];
        e.pivot_cols.push_back(c);
        ++r;
    }
    return e;
}

}  // namespace detail

inline Rat det(const QMatrix& m) {
    if (!m.square()) throw std::invalid_argument("det: matrix is not square");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    auto e = detail::bareiss(m);
    if (e.rank() < n) return 0;
    return make_rat(e.a[n - 1][n - 1] * e.row_swaps_sign, e.row_scale_product);
}

inline std::size_t rank(const QMatrix& m) {
    if (m.empty()) return 0;
    return detail::bareiss(m).rank();
}

/// Basis of the right null space, one column vector per free variable. The
/// basis vector for free column f has a 1 at f and 0 at every other free column.
inline std::vector<QMatrix> kernel_basis(const QMatrix& m) {
    const std::size_t n = m.cols();
    std::vector<QMatrix> out;
    if (n == 0) return out;
    if (m.rows() == 0) {
        for (std::size_t f = 0; f < n; ++f) {
            QMatrix v(n, 1);
            v(f, 0) = 1;
            out.push_back(std::move(v));
        }
        return out;
    }
    auto e = detail::bareiss(m);
    std::vector<bool> is_pivot(n, false);
    for (auto c : e.pivot_cols) is_pivot[c] = true;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rat> x(n);
        x[f] = 1;
        for (std::size_t k = e.rank(); k-- > 0;) {
            const std::size_t pc = e.pivot_cols[k];
            Rat s = 0;
            for (std::size_t j = pc + 1; j < n; ++j)
                if (x[j] != 0 && e.a[k][j] != 0) s += Rat(e.a[k][j]) * x[j];
            x[pc] = -s / Rat(e.a[k][pc]);
        }
        out.push_back(QMatrix::column(x));
    }
    return out;
}

/// Reduced row echelon form over Q. Returns the nonzero rows only.
inline QMatrix rref(const QMatrix& m, std::vector<std::size_t>* pivots = nullptr) {
    QMatrix a = m;
    std::size_t r = 0;
    std::vector<std::size_t> piv;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t p = r;
        while (p < a.rows() && a(p, c) == 0) ++p;
        if (p == a.rows()) continue;
        if (p != r)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
        Rat inv = 1 / a(r, c);
        for (std::size_t j = c; j < a.cols(); ++j) a(r, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == r || a(i, c) == 0) continue;
            Rat f = a(i, c);
            for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    if (pivots) *pivots = piv;
    std::vector<Rat> kept;
    for (std::size_t i = 0; i < r; ++i) {
        auto row = a.row_vec(i);
        kept.insert(kept.end(), row.begin(), row.end());
    }
    return QMatrix(r, a.cols(), std::move(kept));
}

inline std::optional<QMatrix> inverse(const QMatrix& m) {
    if (!m.square()) throw std::invalid_argument("inverse: matrix is not square");
    const std::size_t n = m.rows();
    QMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    std::vector<std::size_t> piv;
    QMatrix r = rref(aug, &piv);
    if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
    QMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = r(i, n + j);
    return inv;
}

inline QMatrix inverse_or_throw(const QMatrix& m) {
    auto inv = inverse(m);
    if (!inv) throw std::domain_error("matrix is singular");
    return *inv;
}

// Subspaces of Q^n are carried as matrices whose columns generate them.

/// Canonical basis (columns) of the column span: the transposed RREF of the
/// generators, so equal subspaces give equal matrices.
inline QMatrix canonical_span(const QMatrix& gens) {
    if (gens.cols() == 0) return QMatrix(gens.rows(), 0);
    return rref(gens.transpose()).transpose();
}

inline std::size_t span_dim(const QMatrix& gens) { return gens.cols() == 0 ? 0 : rank(gens); }

inline QMatrix hstack(const QMatrix& a, const QMatrix& b) {
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row mismatch");
    QMatrix c(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
    }
    return c;
}

inline QMatrix vstack(const QMatrix& a, const QMatrix& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    return hstack(a.transpose(), b.transpose()).transpose();
}

inline QMatrix subspace_sum(const QMatrix& a, const QMatrix& b) { return canonical_span(hstack(a, b)); }

inline QMatrix subspace_intersection(const QMatrix& a, const QMatrix& b) {
    const std::size_t n = a.rows() ? a.rows() : b.rows();
    if (a.cols() == 0 || b.cols() == 0) return QMatrix(n, 0);
    // x in both iff a u = b w; solve [a | -b] (u, w) = 0.
    QMatrix sys = hstack(a, -b);
    auto ker = kernel_basis(sys);
    std::vector<std::vector<Rat>> vecs;
    for (const auto& k : ker) {
        std::vector<Rat> u(a.cols());
        for (std::size_t i = 0; i < a.cols(); ++i) u[i] = k(i, 0);
        vecs.push_back(mat_vec(a, u));
    }
    if (vecs.empty()) return QMatrix(n, 0);
    return canonical_span(QMatrix::from_columns(vecs));
}

inline bool subspace_equal(const QMatrix& a, const QMatrix& b) { return canonical_span(a) == canonical_span(b); }

inline bool subspace_contains(const QMatrix& big, const QMatrix& small) {
    return span_dim(hstack(big, small)) == span_dim(big);
}

}  // namespace flatlink
