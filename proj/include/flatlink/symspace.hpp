#pragma once

// Symmetric-matrix model of SL_m(R)/SO(m): points are positive definite
// matrices up to positive scale. Flats of regular elements and minsets of
// involutions are cut out by linear equations, so intersections are exact.

#include "flatlink/poly.hpp"
#include "flatlink/projlink.hpp"

namespace flatlink {

/// Dimension of the space of symmetric m x m matrices.
constexpr std::size_t sym_dim(std::size_t m) { return m * (m + 1) / 2; }

/// Coordinates Z_ij, i <= j, in lexicographic order.
inline std::vector<Rat> sym_coords(const QMatrix& z) {
    std::vector<Rat> v;
    v.reserve(sym_dim(z.rows()));
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t j = i; j < z.cols(); ++j) v.push_back(z(i, j));
    return v;
}

inline QMatrix from_sym_coords(std::span<const Rat> v, std::size_t m) {
    if (v.size() != sym_dim(m)) throw std::invalid_argument("from_sym_coords: length mismatch");
    QMatrix z(m, m);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) z(i, j) = z(j, i) = v[k++];
    return z;
}

/// Sylvester's criterion on the leading principal minors.
inline bool is_positive_definite(const QMatrix& z) {
    if (!z.is_symmetric()) return false;
    for (std::size_t k = 1; k <= z.rows(); ++k) {
        QMatrix sub(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub(i, j) = z(i, j);
        if (det(sub) <= 0) return false;
    }
    return true;
}

/// A point of H, stored up to positive scale; det = 1 normalization is left
/// symbolic since its m-th root is usually irrational.
struct SPDPoint {
    QMatrix Z;

    SPDPoint() = default;
    explicit SPDPoint(QMatrix z) : Z(std::move(z)) {
        if (!is_positive_definite(Z)) throw std::domain_error("SPDPoint: matrix is not symmetric positive definite");
    }
    std::size_t m() const { return Z.rows(); }
    Rat determinant() const { return det(Z); }
};

enum class SymOrientation { Echelon, Transported, Matched };

/// Flat of a regular element tau: {Z symmetric : tau Z = Z tau^T}. The basis
/// order fixes the orientation.
struct FlatX {
    QMatrix tau;
    std::vector<QMatrix> basis;
    SymOrientation orientation = SymOrientation::Echelon;

    std::size_t m() const { return tau.rows(); }
};

/// Minset of an involution with eigenvalues (-1, .., -1, 1):
/// {Z symmetric : rho Z rho^T = Z}.
struct SubspaceY {
    QMatrix rho;
    ProjPoint line;
    ProjHyperplane plane;
    std::vector<QMatrix> basis;
    SymOrientation orientation = SymOrientation::Echelon;

    std::size_t m() const { return rho.rows(); }
    LinePlanePair pair() const { return LinePlanePair(line, plane); }
};

enum class IntersectionKind { Empty, TransversePoint, Degenerate };

inline std::string to_string(IntersectionKind k) {
    switch (k) {
        case IntersectionKind::Empty: return "Empty";
        case IntersectionKind::TransversePoint: return "TransversePoint";
        case IntersectionKind::Degenerate: return "Degenerate";
    }
    return "?";
}

struct IntersectionResult {
    IntersectionKind kind = IntersectionKind::Empty;
    std::optional<SPDPoint> point;
    std::optional<int> sign;
    std::size_t kernel_dim = 0;
    bool det_normalized = false;
};

namespace detail {

/// Rows: the independent entries of f(E) for each symmetric unit E, as a
/// linear map from sym coordinates. `upper_strict` selects i < j entries only.
template <class F>
QMatrix sym_linear_system(std::size_t m, F&& f, bool upper_strict) {
    const std::size_t n = sym_dim(m);
    std::vector<std::vector<Rat>> cols;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            QMatrix e(m, m);
            e(a, b) = e(b, a) = 1;
            QMatrix img = f(e);
            std::vector<Rat> col;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = upper_strict ? i + 1 : i; j < m; ++j) col.push_back(img(i, j));
            cols.push_back(std::move(col));
        }
    QMatrix sys = QMatrix::from_columns(cols);
    if (sys.cols() != n) throw std::logic_error("sym_linear_system: column count");
    return sys;
}

inline QMatrix flat_system(const QMatrix& tau) {
    QMatrix tt = tau.transpose();
    return sym_linear_system(tau.rows(), [&](const QMatrix& e) { return tau * e - e * tt; }, true);
}

inline QMatrix involution_system(const QMatrix& rho) {
    QMatrix rt = rho.transpose();
    return sym_linear_system(rho.rows(), [&](const QMatrix& e) { return rho * e * rt - e; }, false);
}

/// Basis of the solution space as symmetric matrices, in reduced echelon
/// form with pivots in sym-coordinate order.
inline std::vector<QMatrix> echelon_solution_basis(const QMatrix& sys, std::size_t m) {
    auto ker = kernel_basis(sys);
    if (ker.empty()) return {};
    QMatrix gens(sym_dim(m), ker.size());
    for (std::size_t k = 0; k < ker.size(); ++k)
        for (std::size_t i = 0; i < sym_dim(m); ++i) gens(i, k) = ker[k](i, 0);
    QMatrix r = rref(gens.transpose());
    std::vector<QMatrix> out;
    for (std::size_t k = 0; k < r.rows(); ++k) out.push_back(from_sym_coords(r.row_vec(k), m));
    return out;
}

inline QMatrix sym_columns(const std::vector<QMatrix>& mats) {
    std::vector<std::vector<Rat>> cols;
    for (const auto& s : mats) cols.push_back(sym_coords(s));
    return QMatrix::from_columns(cols);
}

/// Sign of det of `vectors` written in the oriented basis `basis` (both as
/// columns spanning the same space).
inline int relative_orientation(const QMatrix& basis, const QMatrix& vectors) {
    auto e = bareiss(basis.transpose());
    // Rows of `basis` on which it is invertible: pivot columns of its transpose.
    const auto& rows = e.pivot_cols;
    if (rows.size() != basis.cols() || vectors.cols() != basis.cols())
        throw std::invalid_argument("relative_orientation: not a basis");
    const std::size_t k = rows.size();
    QMatrix b(k, k), v(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            b(i, j) = basis(rows[i], j);
            v(i, j) = vectors(rows[i], j);
        }
    return sign(det(b)) * sign(det(v));
}

/// Tangent frame of the projectivized subspace spanned by `basis` at Z:
/// the basis projected along Z onto {S : tr(Z^{-1} S) = 0}, one vector with a
/// radial component dropped, oriented so that appending (radial_first =
/// false) or prepending (true) Z reproduces the orientation of `basis`.
inline std::vector<std::vector<Rat>> tangent_frame(const std::vector<QMatrix>& basis, const QMatrix& z,
                                                   bool radial_first) {
    const std::size_t m = z.rows();
    QMatrix zinv = inverse_or_throw(z);
    std::vector<Rat> alpha;
    for (const auto& b : basis) alpha.push_back((zinv * b).trace() / Rat(static_cast<unsigned long>(m)));
    auto drop = std::find_if(alpha.begin(), alpha.end(), [](const Rat& a) { return a != 0; });
    if (drop == alpha.end()) throw std::logic_error("tangent_frame: radial direction not in span");
    const std::size_t d = static_cast<std::size_t>(drop - alpha.begin());
    std::vector<std::vector<Rat>> frame;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (k == d) continue;
        frame.push_back(sym_coords(basis[k] - z * alpha[k]));
    }
    auto zc = sym_coords(z);
    std::vector<std::vector<Rat>> with_radial;
    if (radial_first) with_radial.push_back(zc);
    with_radial.insert(with_radial.end(), frame.begin(), frame.end());
    if (!radial_first) with_radial.push_back(zc);
    int s = relative_orientation(sym_columns(basis), QMatrix::from_columns(with_radial));
    if (s == 0) throw std::logic_error("tangent_frame: degenerate frame");
    if (s < 0 && !frame.empty())
        for (auto& x : frame.front()) x = -x;
    return frame;
}

inline QMatrix primitive_matrix(const QMatrix& z) {
    auto v = primitive_integer(z.entries());
    return QMatrix(z.rows(), z.cols(), to_rat(v));
}

}  // namespace detail

/// Flat of tau. Requires m distinct real eigenvalues (Sturm certified).
inline FlatX flat_from_tau(const QMatrix& tau) {
    if (!tau.square() || tau.rows() < 2) throw std::invalid_argument("flat_from_tau: tau must be square, m >= 2");
    if (det(tau) == 0) throw std::domain_error("flat_from_tau: tau is singular");
    const std::size_t m = tau.rows();
    if (sturm_distinct_real_roots(char_poly(tau)) != m)
        throw std::domain_error("flat_from_tau: tau does not have m distinct real eigenvalues");
    FlatX x{tau, detail::echelon_solution_basis(detail::flat_system(tau), m), SymOrientation::Echelon};
    if (x.basis.size() != m) throw std::logic_error("flat_from_tau: solution space has wrong dimension");
    return x;
}

/// Builds Y from its line and hyperplane: rho = 2 L phi^T / phi(L) - I.
inline QMatrix involution_from_pair(const LinePlanePair& lp) {
    auto l = lp.line.rat();
    auto phi = lp.plane.rat();
    Rat s = dot(phi, l);
    if (s == 0) throw GeneralPositionError("involution_from_pair: line lies in the hyperplane");
    QMatrix r = QMatrix::column(l) * QMatrix::row(phi) * (Rat(2) / s);
    return r - QMatrix::identity(l.size());
}

inline SubspaceY subspace_from_rho(const QMatrix& rho) {
    if (!rho.square() || rho.rows() < 2) throw std::invalid_argument("subspace_from_rho: rho must be square, m >= 2");
    const std::size_t m = rho.rows();
    const QMatrix id = QMatrix::identity(m);
    if (rho * rho != id) throw std::domain_error("subspace_from_rho: rho is not an involution");
    auto plus = kernel_basis(rho - id);
    if (plus.size() != 1) throw std::domain_error("subspace_from_rho: eigenvalue signature is not (-1,..,-1,1)");
    // The -1 eigenspace is cut out by the left +1 eigenvector.
    auto phi_ker = kernel_basis((rho - id).transpose());
    SubspaceY y;
    y.rho = rho;
    y.line = ProjPoint(plus[0].col(0));
    y.plane = ProjHyperplane(phi_ker[0].col(0));
    y.basis = detail::echelon_solution_basis(detail::involution_system(rho), m);
    if (y.basis.size() != 1 + m * (m - 1) / 2) throw std::logic_error("subspace_from_rho: wrong solution dimension");
    return y;
}

inline SubspaceY subspace_from_pair(const LinePlanePair& lp) { return subspace_from_rho(involution_from_pair(lp)); }

inline bool in_flat(const FlatX& x, const QMatrix& z) { return z.is_symmetric() && x.tau * z == z * x.tau.transpose(); }
inline bool in_subspace(const SubspaceY& y, const QMatrix& z) {
    return z.is_symmetric() && y.rho * z * y.rho.transpose() == z;
}

/// Orientation sign of X n Y at Z: det[Z | X-frame | Y-frame] in sym
/// coordinates, with the X-frame oriented radial-last and the Y-frame
/// radial-first against their bases.
inline int intersection_sign(const FlatX& x, const SubspaceY& y, const SPDPoint& at) {
    if (!in_flat(x, at.Z) || !in_subspace(y, at.Z)) throw std::domain_error("intersection_sign: point is not in X n Y");
    auto xf = detail::tangent_frame(x.basis, at.Z, false);
    auto yf = detail::tangent_frame(y.basis, at.Z, true);
    std::vector<std::vector<Rat>> cols{sym_coords(at.Z)};
    cols.insert(cols.end(), xf.begin(), xf.end());
    cols.insert(cols.end(), yf.begin(), yf.end());
    if (cols.size() != sym_dim(x.m())) throw std::domain_error("intersection_sign: dimensions are not complementary");
    int s = sign(det(QMatrix::from_columns(cols)));
    if (s == 0) throw std::domain_error("intersection_sign: X and Y are not transverse at the point");
    return s;
}

/// Solves the joint system; a one-dimensional solution line with a positive
/// definite representative is a transverse intersection point.
inline IntersectionResult intersect(const FlatX& x, const SubspaceY& y) {
    if (x.m() != y.m()) throw std::invalid_argument("intersect: dimension mismatch");
    const std::size_t m = x.m();
    QMatrix sys = vstack(detail::flat_system(x.tau), detail::involution_system(y.rho));
    auto ker = kernel_basis(sys);
    IntersectionResult r;
    r.kernel_dim = ker.size();
    if (ker.size() > 1) {
        r.kind = IntersectionKind::Degenerate;
        return r;
    }
    if (ker.empty()) return r;
    QMatrix z = detail::primitive_matrix(from_sym_coords(ker[0].col(0), m));
    if (!is_positive_definite(z)) z = -z;
    if (!is_positive_definite(z)) return r;
    r.kind = IntersectionKind::TransversePoint;
    r.point = SPDPoint(z);
    r.sign = intersection_sign(x, y, *r.point);
    return r;
}

inline SPDPoint apply_isometry(const QMatrix& g, const SPDPoint& p) {
    if (!g.square() || g.rows() != p.m()) throw std::invalid_argument("apply_isometry: dimension mismatch");
    if (det(g) == 0) throw std::domain_error("apply_isometry: g is singular");
    return SPDPoint(g * p.Z * g.transpose());
}

/// g X: the flat of g tau g^{-1} with the pushed-forward oriented basis.
inline FlatX transport(const QMatrix& g, const FlatX& x) {
    QMatrix ginv = inverse_or_throw(g);
    FlatX out{g * x.tau * ginv, {}, SymOrientation::Transported};
    for (const auto& b : x.basis) out.basis.push_back(g * b * g.transpose());
    return out;
}

inline SubspaceY transport(const QMatrix& g, const SubspaceY& y) {
    QMatrix ginv = inverse_or_throw(g);
    SubspaceY out;
    out.rho = g * y.rho * ginv;
    out.line = ProjPoint(mat_vec(g, y.line.rat()));
    out.plane = ProjHyperplane(mat_vec(ginv.transpose(), y.plane.rat()));
    for (const auto& b : y.basis) out.basis.push_back(g * b * g.transpose());
    out.orientation = SymOrientation::Transported;
    return out;
}

/// +1 if S -> g S g^T maps the oriented basis of Y to a positively oriented
/// basis of g Y relative to `target` (e.g. g in the centralizer of rho, target = Y).
inline int pushforward_orientation(const QMatrix& g, const SubspaceY& y, const SubspaceY& target) {
    std::vector<QMatrix> pushed;
    for (const auto& b : y.basis) pushed.push_back(g * b * g.transpose());
    return detail::relative_orientation(detail::sym_columns(target.basis), detail::sym_columns(pushed));
}

}  // namespace flatlink
