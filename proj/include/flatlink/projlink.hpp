#pragma once

// Projective points, hyperplanes and frames in P^{m-1}, and the linking
// decision for a frame (eigenlines of a regular element) against a
// line-hyperplane pair (eigenspaces of an involution).

#include "flatlink/linalg.hpp"

#include <array>
#include <compare>

namespace flatlink {

/// Raised for inputs outside general position. The linking criterion is
/// only defined there, so these are refused rather than perturbed.
class GeneralPositionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

template <class Tag>
struct PrimitiveVector {
    std::vector<Int> rep;

    PrimitiveVector() = default;
    explicit PrimitiveVector(std::span<const Rat> v) : rep(primitive_integer(v)) {}
    PrimitiveVector(std::initializer_list<Rat> v) : PrimitiveVector(std::vector<Rat>(v)) {}
    static PrimitiveVector from_ints(std::span<const Int> v) { return PrimitiveVector(to_rat(v)); }

    std::size_t dim() const { return rep.size(); }
    std::vector<Rat> rat() const { return to_rat(rep); }
    friend bool operator==(const PrimitiveVector&, const PrimitiveVector&) = default;
    friend auto operator<=>(const PrimitiveVector& a, const PrimitiveVector& b) {
        return std::lexicographical_compare_three_way(
            a.rep.begin(), a.rep.end(), b.rep.begin(), b.rep.end(),
            [](const Int& x, const Int& y) { return cmp(x, y) <=> 0; });
    }
    friend std::ostream& operator<<(std::ostream& os, const PrimitiveVector& v) {
        os << '(';
        for (std::size_t i = 0; i < v.rep.size(); ++i) os << (i ? "," : "") << v.rep[i].get_str();
        return os << ')';
    }
};

}  // namespace detail

struct PointTag {};
struct HyperplaneTag {};

/// A point of P^{m-1}: primitive integer representative, first nonzero entry positive.
using ProjPoint = detail::PrimitiveVector<PointTag>;
/// A hyperplane of P^{m-1} given by a primitive integer functional.
using ProjHyperplane = detail::PrimitiveVector<HyperplaneTag>;

inline Int evaluate(const ProjHyperplane& h, const ProjPoint& p) {
    if (h.dim() != p.dim()) throw std::invalid_argument("hyperplane/point dimension mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < p.dim(); ++i) s += h.rep[i] * p.rep[i];
    return s;
}

/// m points of P^{m-1} spanning Q^m.
class Arrangement {
public:
    Arrangement() = default;
    explicit Arrangement(std::vector<ProjPoint> points) : points_(std::move(points)) {
        const std::size_t m = points_.size();
        if (m < 2) throw std::invalid_argument("arrangement needs at least two points");
        for (const auto& p : points_)
            if (p.dim() != m) throw std::invalid_argument("arrangement point dimension must equal point count");
        if (det(frame()) == 0) throw GeneralPositionError("arrangement points are linearly dependent");
    }

    std::size_t m() const { return points_.size(); }
    const std::vector<ProjPoint>& points() const { return points_; }
    const ProjPoint& operator[](std::size_t i) const { return points_.at(i); }

    /// Columns are the point representatives.
    QMatrix frame() const {
        std::vector<std::vector<Rat>> cols;
        for (const auto& p : points_) cols.push_back(p.rat());
        return QMatrix::from_columns(cols);
    }

private:
    std::vector<ProjPoint> points_;
};

struct LinePlanePair {
    ProjPoint line;
    ProjHyperplane plane;

    LinePlanePair() = default;
    LinePlanePair(ProjPoint l, ProjHyperplane p) : line(std::move(l)), plane(std::move(p)) {
        if (line.dim() != plane.dim()) throw std::invalid_argument("line/plane dimension mismatch");
        if (evaluate(plane, line) == 0) throw GeneralPositionError("line lies inside the hyperplane");
    }
    std::size_t m() const { return line.dim(); }
};

/// Sign pattern of an open simplex of the frame, first entry +1.
struct SignVector {
    std::vector<int> signs;

    static SignVector canonical(std::vector<int> s) {
        if (s.empty() || std::find(s.begin(), s.end(), 0) != s.end())
            throw std::invalid_argument("sign vector entries must be +1 or -1");
        if (s.front() < 0)
            for (auto& x : s) x = -x;
        return {std::move(s)};
    }
    friend bool operator==(const SignVector&, const SignVector&) = default;
};

enum class LinkDecision { Linked, NotLinked };

struct LinkResult {
    LinkDecision decision = LinkDecision::NotLinked;
    SignVector sigma;
    std::vector<Rat> witness_values;  // P(sigma_j L_j), j = 1..m

    bool linked() const { return decision == LinkDecision::Linked; }
};

namespace detail {

inline void check_dims(const Arrangement& arr, const LinePlanePair& lp) {
    if (arr.m() != lp.m()) throw std::invalid_argument("arrangement and pair dimensions differ");
}

inline Rat det_of_points(const std::vector<std::vector<Rat>>& cols) { return det(QMatrix::from_columns(cols)); }

/// Functional vanishing on the given m-1 independent points of Q^m.
inline ProjHyperplane hyperplane_through(const std::vector<std::vector<Rat>>& pts) {
    QMatrix rows = QMatrix::from_columns(pts).transpose();
    auto ker = kernel_basis(rows);
    if (ker.size() != 1) throw GeneralPositionError("points do not span a hyperplane");
    return ProjHyperplane(ker[0].col(0));
}

/// Point where the hyperplane meets the line through a and b.
inline std::vector<Rat> meet_line(const ProjHyperplane& h, const std::vector<Rat>& a, const std::vector<Rat>& b) {
    std::vector<Rat> hv = to_rat(h.rep);
    Rat ha = dot(hv, a), hb = dot(hv, b);
    std::vector<Rat> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = hb * a[i] - ha * b[i];
    return out;
}

/// Coefficients of v in the frame basis.
inline std::vector<Rat> frame_coordinates(const Arrangement& arr, const std::vector<Rat>& v) {
    return mat_vec(inverse_or_throw(arr.frame()), v);
}

}  // namespace detail

/// True iff every m-subset of {L_1..L_m, L} is a basis, P misses every L_i and L,
/// and for every edge L_aL_b the point P n L_aL_b together with L and the
/// remaining m-2 frame points spans Q^m.
inline bool in_general_position(const Arrangement& arr, const LinePlanePair& lp) {
    detail::check_dims(arr, lp);
    const std::size_t m = arr.m();
    std::vector<std::vector<Rat>> pts;
    for (const auto& p : arr.points()) pts.push_back(p.rat());
    pts.push_back(lp.line.rat());
    for (std::size_t skip = 0; skip <= m; ++skip) {
        std::vector<std::vector<Rat>> sub;
        for (std::size_t k = 0; k <= m; ++k)
            if (k != skip) sub.push_back(pts[k]);
        if (detail::det_of_points(sub) == 0) return false;
    }
    for (const auto& p : arr.points())
        if (evaluate(lp.plane, p) == 0) return false;
    if (evaluate(lp.plane, lp.line) == 0) return false;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            std::vector<std::vector<Rat>> sub{detail::meet_line(lp.plane, pts[a], pts[b]), pts[m]};
            for (std::size_t k = 0; k < m; ++k)
                if (k != a && k != b) sub.push_back(pts[k]);
            if (detail::det_of_points(sub) == 0) return false;
        }
    return true;
}

/// Hyperplane through every frame point except the i-th (0-based).
inline ProjHyperplane hyperplane_V(const Arrangement& arr, std::size_t i) {
    if (i >= arr.m()) throw std::out_of_range("hyperplane_V: index out of range");
    std::vector<std::vector<Rat>> pts;
    for (std::size_t j = 0; j < arr.m(); ++j)
        if (j != i) pts.push_back(arr[j].rat());
    return detail::hyperplane_through(pts);
}

/// Sign vector of the frame coefficients of L: the open simplex containing L.
inline SignVector simplex_of(const Arrangement& arr, const ProjPoint& L) {
    if (L.dim() != arr.m()) throw std::invalid_argument("simplex_of: dimension mismatch");
    auto c = detail::frame_coordinates(arr, L.rat());
    std::vector<int> s;
    for (const auto& x : c) {
        if (x == 0) throw GeneralPositionError("point lies on a frame hyperplane V_i");
        s.push_back(sign(x));
    }
    return SignVector::canonical(std::move(s));
}

inline std::vector<Rat> vertex_values(const ProjHyperplane& P, const Arrangement& arr, const SignVector& sigma) {
    if (P.dim() != arr.m() || sigma.signs.size() != arr.m())
        throw std::invalid_argument("vertex_values: dimension mismatch");
    std::vector<Rat> vals;
    for (std::size_t j = 0; j < arr.m(); ++j) {
        Int v = evaluate(P, arr[j]);
        if (v == 0) throw GeneralPositionError("hyperplane passes through a frame vertex");
        vals.push_back(Rat(v * sigma.signs[j]));
    }
    return vals;
}

/// True iff P meets the open simplex sigma, i.e. P is not of one strict sign
/// on the signed vertices.
inline bool plane_meets_simplex(const ProjHyperplane& P, const Arrangement& arr, const SignVector& sigma) {
    auto vals = vertex_values(P, arr, sigma);
    int s0 = sign(vals.front());
    return std::any_of(vals.begin(), vals.end(), [&](const Rat& v) { return sign(v) != s0; });
}

/// Linked iff the simplex of the frame containing L does not meet P.
inline LinkResult link_decision(const Arrangement& arr, const LinePlanePair& lp) {
    if (!in_general_position(arr, lp)) throw GeneralPositionError("frame and line-plane pair are not in general position");
    LinkResult r;
    r.sigma = simplex_of(arr, lp.line);
    r.witness_values = vertex_values(lp.plane, arr, r.sigma);
    r.decision = plane_meets_simplex(lp.plane, arr, r.sigma) ? LinkDecision::NotLinked : LinkDecision::Linked;
    return r;
}

/// The two flags common to S(L_1,..,L_{m-2}, L_{m-1}L_m) and S(L, P):
/// L' = P n L_{m-1}L_m and Q = span(L, L_1, .., L_{m-2}).
inline std::pair<ProjPoint, ProjHyperplane> common_flags(const Arrangement& arr, const LinePlanePair& lp) {
    detail::check_dims(arr, lp);
    const std::size_t m = arr.m();
    if (!in_general_position(arr, lp)) throw GeneralPositionError("common_flags: degenerate configuration");
    ProjPoint lprime(detail::meet_line(lp.plane, arr[m - 2].rat(), arr[m - 1].rat()));
    std::vector<std::vector<Rat>> qpts{lp.line.rat()};
    for (std::size_t k = 0; k + 2 < m; ++k) qpts.push_back(arr[k].rat());
    return {lprime, detail::hyperplane_through(qpts)};
}

/// Image of the frame under g in GL_m(Q).
inline Arrangement transform(const QMatrix& g, const Arrangement& arr) {
    std::vector<ProjPoint> pts;
    for (const auto& p : arr.points()) pts.emplace_back(mat_vec(g, p.rat()));
    return Arrangement(std::move(pts));
}

/// Image of the pair under g: L -> gL, functional phi -> phi g^{-1}.
inline LinePlanePair transform(const QMatrix& g, const LinePlanePair& lp) {
    QMatrix ginv = inverse_or_throw(g);
    auto phi = mat_vec(ginv.transpose(), lp.plane.rat());
    return LinePlanePair(ProjPoint(mat_vec(g, lp.line.rat())), ProjHyperplane(phi));
}

namespace detail {

/// On a projective line, whether {a, b} separates {c, d}; all four distinct.
inline bool separates(const std::array<Rat, 2>& a, const std::array<Rat, 2>& b, const std::array<Rat, 2>& c,
                      const std::array<Rat, 2>& d) {
    auto br = [](const std::array<Rat, 2>& x, const std::array<Rat, 2>& y) { return Rat(x[0] * y[1] - x[1] * y[0]); };
    Rat cross = br(a, c) * br(b, d) * br(a, d) * br(b, c);
    if (cross == 0) throw GeneralPositionError("coincident points on a projective line");
    return cross < 0;
}

inline bool linked_by_induction(const std::vector<std::vector<Rat>>& frame_coords_of_L,
                                const std::vector<Rat>& plane_values) {
    // Frame is the standard basis of Q^k; L has coordinates c, P has values
    // phi_j on the basis vectors.
    const std::vector<Rat>& c = frame_coords_of_L.front();
    const std::size_t k = c.size();
    auto edge_links = [&](std::size_t a, std::size_t b) {
        // On the line L_aL_b in coordinates (L_a, L_b): the frame points,
        // Q n line = (c_a, c_b), and P n line = (phi_b, -phi_a).
        return separates({1, 0}, {0, 1}, {c[a], c[b]}, {plane_values[b], -plane_values[a]});
    };
    if (k == 2) return edge_links(0, 1);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (!edge_links(a, b)) return false;
    // Restrict to Q = span(L, L_1..L_{k-2}) with frame L_1..L_{k-2}, M where
    // M = c_{k-1} L_{k-1} + c_k L_k; in that frame L = (c_1..c_{k-2}, 1).
    std::vector<Rat> sub_c(c.begin(), c.end() - 2);
    sub_c.push_back(1);
    std::vector<Rat> sub_phi(plane_values.begin(), plane_values.end() - 2);
    sub_phi.push_back(c[k - 2] * plane_values[k - 2] + c[k - 1] * plane_values[k - 1]);
    return linked_by_induction({sub_c}, sub_phi);
}

}  // namespace detail

/// Independent route to the linking decision that follows the inductive
/// argument: P meets the simplex iff it meets an edge, which is detected on
/// the edge's projective line; otherwise the problem restricts to the
/// hyperplane through L and all but two frame points.
inline LinkDecision link_decision_by_induction(const Arrangement& arr, const LinePlanePair& lp) {
    if (!in_general_position(arr, lp)) throw GeneralPositionError("frame and line-plane pair are not in general position");
    auto c = detail::frame_coordinates(arr, lp.line.rat());
    std::vector<Rat> phi;
    for (const auto& p : arr.points()) phi.push_back(Rat(evaluate(lp.plane, p)));
    return detail::linked_by_induction({c}, phi) ? LinkDecision::Linked : LinkDecision::NotLinked;
}

}  // namespace flatlink
