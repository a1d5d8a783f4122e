#pragma once

// Points of the sphere at infinity as flag-eigenvalue pairs, dimensions of
// the spheres S(U_1, .., U_r), and associated subspaces of a decomposition.

#include "flatlink/poly.hpp"

#include <Eigen/Dense>

namespace flatlink {

/// Strictly nested proper nonzero subspaces of Q^m, each in canonical form.
class Flag {
public:
    Flag() = default;
    Flag(std::size_t m, std::vector<QMatrix> subspaces) : m_(m) {
        std::size_t last = 0;
        for (auto& s : subspaces) {
            if (s.rows() != m) throw std::invalid_argument("Flag: subspace in wrong ambient dimension");
            QMatrix c = canonical_span(s);
            const std::size_t d = c.cols();
            if (d == 0 || d >= m) throw std::invalid_argument("Flag: members must be proper and nonzero");
            if (d <= last) throw std::invalid_argument("Flag: dimensions must increase");
            if (!subspaces_.empty() && !subspace_contains(c, subspaces_.back()))
                throw std::invalid_argument("Flag: members must be nested");
            last = d;
            subspaces_.push_back(std::move(c));
        }
    }

    /// <e_1> c <e_1, e_2> c ... c <e_1, .., e_{m-1}>.
    static Flag coordinate(std::size_t m) {
        std::vector<QMatrix> subs;
        for (std::size_t k = 1; k < m; ++k) {
            QMatrix s(m, k);
            for (std::size_t i = 0; i < k; ++i) s(i, i) = 1;
            subs.push_back(s);
        }
        return Flag(m, subs);
    }

    std::size_t ambient_dim() const { return m_; }
    const std::vector<QMatrix>& subspaces() const { return subspaces_; }
    std::size_t size() const { return subspaces_.size(); }
    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> d;
        for (const auto& s : subspaces_) d.push_back(s.cols());
        return d;
    }
    friend bool operator==(const Flag&, const Flag&) = default;

private:
    std::size_t m_ = 0;
    std::vector<QMatrix> subspaces_;
};

/// A real eigenvalue: exact when rational, otherwise an isolating interval
/// (lo, hi] of a root of `poly`.
struct AlgebraicValue {
    QPoly poly;
    Rat lo;
    Rat hi;
    bool exact = false;
    std::size_t multiplicity = 0;

    const Rat& value() const {
        if (!exact) throw std::logic_error("AlgebraicValue: not rational");
        return hi;
    }
    double approx() const { return exact ? hi.get_d() : Rat((lo + hi) / 2).get_d(); }
};

/// Direction of a geodesic ray up to positive scale. The unit normalization
/// divides every eigenvalue by sqrt(norm_squared).
struct BoundaryPoint {
    QMatrix direction;
    Rat norm_squared;
    std::vector<AlgebraicValue> eigenvalues;  // strictly descending
    bool exact = false;
    Flag flag;                                     // when exact
    std::vector<Eigen::MatrixXd> approx_flag;     // when not exact, orthonormal columns
};

struct DecompSphere {
    std::vector<std::size_t> dims;
};

namespace detail {

inline std::size_t root_multiplicity(const QPoly& p, const RootInterval& r) {
    std::size_t k = 0;
    QPoly g = p;
    while (g.degree() >= 1 && sturm_count(sturm_sequence(g), r.lo, r.hi) >= 1) {
        ++k;
        g = gcd(g, g.derivative());
    }
    return k;
}

}  // namespace detail

/// Flag-eigenvalue pair of a nonzero symmetric trace-zero direction: descending
/// eigenvalues and the flag E_1 c E_1 + E_2 c ... of partial eigenspace sums.
inline BoundaryPoint direction_to_boundary(const QMatrix& zdir) {
    if (!zdir.is_symmetric()) throw std::invalid_argument("direction_to_boundary: direction is not symmetric");
    if (zdir.trace() != 0) throw std::invalid_argument("direction_to_boundary: direction has nonzero trace");
    if (zdir.is_zero()) throw std::invalid_argument("direction_to_boundary: zero direction");
    const std::size_t m = zdir.rows();
    BoundaryPoint bp;
    bp.direction = zdir;
    bp.norm_squared = (zdir * zdir).trace();
    QPoly p = char_poly(zdir);
    QPoly sq = p / gcd(p, p.derivative());
    auto roots = isolate_real_roots(sq, Rat(1, 1 << 30));
    std::reverse(roots.begin(), roots.end());
    bp.exact = std::all_of(roots.begin(), roots.end(), [](const RootInterval& r) { return r.exact; });
    for (const auto& r : roots) bp.eigenvalues.push_back({sq, r.lo, r.hi, r.exact, detail::root_multiplicity(p, r)});

    if (bp.exact) {
        std::vector<QMatrix> subs;
        QMatrix acc(m, 0);
        for (std::size_t k = 0; k + 1 < bp.eigenvalues.size(); ++k) {
            auto ker = kernel_basis(zdir - QMatrix::identity(m) * bp.eigenvalues[k].value());
            for (const auto& v : ker) acc = hstack(acc, v);
            subs.push_back(acc);
        }
        bp.flag = Flag(m, subs);
        return bp;
    }
    Eigen::MatrixXd z(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) z(i, j) = zdir(i, j).get_d();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z);
    // Eigen sorts ascending, so E_1 + .. + E_k is spanned by the rightmost columns.
    std::size_t taken = 0;
    for (std::size_t k = 0; k + 1 < bp.eigenvalues.size(); ++k) {
        taken += bp.eigenvalues[k].multiplicity;
        bp.approx_flag.push_back(es.eigenvectors().rightCols(static_cast<Eigen::Index>(taken)));
    }
    return bp;
}

/// Dimension of S^{r-2} * S(U_1) * .. * S(U_r) with dim S(U) = n(n+1)/2 - 2
/// and the join rule dim(A * B) = dim A + dim B + 1, dim(empty) = -1.
inline long sphere_dim(const DecompSphere& d) {
    if (d.dims.empty()) throw std::invalid_argument("sphere_dim: empty decomposition");
    long acc = static_cast<long>(d.dims.size()) - 2;
    for (std::size_t n : d.dims) {
        if (n == 0) throw std::invalid_argument("sphere_dim: zero-dimensional component");
        long s = static_cast<long>(n * (n + 1) / 2) - 2;
        acc = acc + s + 1;
    }
    return acc;
}

namespace detail {

inline void check_decomposition(const std::vector<QMatrix>& parts) {
    if (parts.empty()) throw std::invalid_argument("decomposition: no components");
    const std::size_t m = parts.front().rows();
    std::size_t total = 0;
    QMatrix all(m, 0);
    for (const auto& u : parts) {
        if (u.rows() != m) throw std::invalid_argument("decomposition: ambient dimension mismatch");
        const std::size_t d = span_dim(u);
        if (d == 0) throw std::invalid_argument("decomposition: zero component");
        total += d;
        all = hstack(all, u);
    }
    if (total != m || span_dim(all) != m) throw std::invalid_argument("decomposition: components are not a direct sum of Q^m");
}

}  // namespace detail

/// V is associated to U_1 + .. + U_r iff V is spanned by its intersections with the U_i.
inline bool is_associated(const QMatrix& v, const std::vector<QMatrix>& parts) {
    detail::check_decomposition(parts);
    if (v.rows() != parts.front().rows()) throw std::invalid_argument("is_associated: dimension mismatch");
    QMatrix acc(v.rows(), 0);
    for (const auto& u : parts) acc = hstack(acc, subspace_intersection(v, u));
    return span_dim(acc) == span_dim(v);
}

inline bool flag_associated(const Flag& f, const std::vector<QMatrix>& parts) {
    return std::all_of(f.subspaces().begin(), f.subspaces().end(),
                       [&](const QMatrix& s) { return is_associated(s, parts); });
}

/// tau F_i = F_i for every member.
inline bool flag_preserved_by(const QMatrix& tau, const Flag& f) {
    if (!tau.square() || tau.rows() != f.ambient_dim()) throw std::invalid_argument("flag_preserved_by: dimension mismatch");
    if (det(tau) == 0) throw std::domain_error("flag_preserved_by: tau is singular");
    return std::all_of(f.subspaces().begin(), f.subspaces().end(),
                       [&](const QMatrix& s) { return span_dim(hstack(s, tau * s)) == s.cols(); });
}

/// Proper nonzero subspaces spanned by unions of the components of two
/// decompositions and their pairwise intersections that are associated to
/// both decompositions, in canonical form and without repeats.
inline std::vector<QMatrix> common_associated_subspaces(const std::vector<QMatrix>& a, const std::vector<QMatrix>& b) {
    detail::check_decomposition(a);
    detail::check_decomposition(b);
    const std::size_t m = a.front().rows();
    std::vector<QMatrix> atoms;
    for (const auto& u : a) atoms.push_back(canonical_span(u));
    for (const auto& w : b) atoms.push_back(canonical_span(w));
    for (const auto& u : a)
        for (const auto& w : b) {
            QMatrix i = subspace_intersection(u, w);
            if (i.cols() > 0) atoms.push_back(i);
        }
    if (atoms.size() > 20) throw std::invalid_argument("common_associated_subspaces: too many atoms");
    std::vector<QMatrix> out;
    for (std::size_t mask = 1; mask < (std::size_t{1} << atoms.size()); ++mask) {
        QMatrix gens(m, 0);
        for (std::size_t k = 0; k < atoms.size(); ++k)
            if (mask >> k & 1) gens = hstack(gens, atoms[k]);
        QMatrix v = canonical_span(gens);
        if (v.cols() == 0 || v.cols() == m) continue;
        if (std::find(out.begin(), out.end(), v) != out.end()) continue;
        if (is_associated(v, a) && is_associated(v, b)) out.push_back(std::move(v));
    }
    return out;
}

}  // namespace flatlink
