#pragma once

// RP^2 drawn as the closed upper hemisphere projected orthogonally onto the
// unit disk; antipodal boundary points are identified. Shows each X_i as the
// triangle spanned by its frame representatives and each Y_j as the point L_j
// with the line P_j.

#include "flatlink/construct.hpp"

#include <array>
#include <cstdio>
#include <sstream>

namespace flatlink::svg {

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 to_vec3(std::span<const Int> v) { return {v[0].get_d(), v[1].get_d(), v[2].get_d()}; }

inline Vec3 unit(Vec3 v) {
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

/// Chart (x, y) in the unit disk of the representative with z >= 0.
inline std::array<double, 2> to_disk(Vec3 v) {
    v = unit(v);
    if (v[2] < 0 || (v[2] == 0 && (v[1] < 0 || (v[1] == 0 && v[0] < 0)))) v = {-v[0], -v[1], -v[2]};
    return {v[0], v[1]};
}

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

class Canvas {
public:
    explicit Canvas(double size) : size_(size), r_(size * 0.45) {}

    double px(double x) const { return size_ / 2 + r_ * x; }
    double py(double y) const { return size_ / 2 - r_ * y; }

    /// Polyline through sampled projective points, broken where the chart
    /// representative jumps across the boundary circle.
    void curve(const std::vector<Vec3>& samples, const std::string& colour, double width, bool dashed = false) {
        std::vector<std::array<double, 2>> run;
        std::array<double, 2> last{};
        bool have = false;
        auto flush = [&] {
            if (run.size() >= 2) {
                out_ << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << num(width) << "\"";
                if (dashed) out_ << " stroke-dasharray=\"6 4\"";
                out_ << " points=\"";
                for (std::size_t k = 0; k < run.size(); ++k)
                    out_ << (k ? " " : "") << num(px(run[k][0])) << "," << num(py(run[k][1]));
                out_ << "\"/>\n";
            }
            run.clear();
        };
        for (const auto& s : samples) {
            auto p = to_disk(s);
            if (have && std::hypot(p[0] - last[0], p[1] - last[1]) > 0.5) flush();
            run.push_back(p);
            last = p;
            have = true;
        }
        flush();
    }

    void dot(const Vec3& v, const std::string& colour, double radius) {
        auto p = to_disk(v);
        out_ << "<circle cx=\"" << num(px(p[0])) << "\" cy=\"" << num(py(p[1])) << "\" r=\"" << num(radius) << "\" fill=\""
             << colour << "\"/>\n";
    }

    void label(const Vec3& v, const std::string& text, const std::string& colour) {
        auto p = to_disk(v);
        out_ << "<text x=\"" << num(px(p[0]) + 6) << "\" y=\"" << num(py(p[1]) - 6) << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
             << colour << "\">" << text << "</text>\n";
    }

    std::string finish(const std::string& title) const {
        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size_) << "\" height=\"" << num(size_)
          << "\" viewBox=\"0 0 " << num(size_) << " " << num(size_) << "\">\n";
        s << "<title>" << title << "</title>\n";
        s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        s << "<circle cx=\"" << num(size_ / 2) << "\" cy=\"" << num(size_ / 2) << "\" r=\"" << num(r_)
          << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1.5\"/>\n";
        s << out_.str() << "</svg>\n";
        return s.str();
    }

private:
    double size_;
    double r_;
    std::ostringstream out_;
};

inline const std::string& palette(std::size_t k) {
    static const std::vector<std::string> colours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                                   "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
    return colours[k % colours.size()];
}

/// Representative with positive last coordinate, so edges are drawn in the
/// affine chart h > 0.
inline Vec3 chart_rep(std::span<const Int> v) {
    Vec3 x = to_vec3(v);
    if (x[2] < 0) x = {-x[0], -x[1], -x[2]};
    return x;
}

inline std::vector<Vec3> segment(const Vec3& a, const Vec3& b, int steps = 64) {
    std::vector<Vec3> out;
    for (int s = 0; s <= steps; ++s) {
        double t = static_cast<double>(s) / steps;
        out.push_back({a[0] * (1 - t) + b[0] * t, a[1] * (1 - t) + b[1] * t, a[2] * (1 - t) + b[2] * t});
    }
    return out;
}

/// Projective line with normal phi, as a closed great circle.
inline std::vector<Vec3> projective_line(const Vec3& phi, int steps = 256) {
    Vec3 n = unit(phi);
    Vec3 helper = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    double d = helper[0] * n[0] + helper[1] * n[1] + helper[2] * n[2];
    Vec3 u = unit({helper[0] - d * n[0], helper[1] - d * n[1], helper[2] - d * n[2]});
    Vec3 w{n[1] * u[2] - n[2] * u[1], n[2] * u[0] - n[0] * u[2], n[0] * u[1] - n[1] * u[0]};
    std::vector<Vec3> out;
    for (int s = 0; s <= steps; ++s) {
        double t = M_PI * s / steps;
        out.push_back({std::cos(t) * u[0] + std::sin(t) * w[0], std::cos(t) * u[1] + std::sin(t) * w[1],
                       std::cos(t) * u[2] + std::sin(t) * w[2]});
    }
    return out;
}

/// Linear change of coordinates centring the chart points (h != 0) at the
/// pole with spread about 1; points map by V and functionals by V^{-T}.
struct View {
    double cu = 0, cw = 0, scale = 1;

    Vec3 point(Vec3 v) const { return {(v[0] - cu * v[2]) / scale, (v[1] - cw * v[2]) / scale, v[2]}; }
    Vec3 functional(Vec3 f) const { return {f[0] * scale, f[1] * scale, f[2] + f[0] * cu + f[1] * cw}; }
};

inline View fit_view(const std::vector<Vec3>& pts) {
    double lo_u = 1e300, hi_u = -1e300, lo_w = 1e300, hi_w = -1e300;
    std::size_t count = 0;
    for (const auto& v : pts) {
        if (v[2] == 0) continue;
        double u = v[0] / v[2], w = v[1] / v[2];
        lo_u = std::min(lo_u, u);
        hi_u = std::max(hi_u, u);
        lo_w = std::min(lo_w, w);
        hi_w = std::max(hi_w, w);
        ++count;
    }
    View view;
    if (count == 0) return view;
    view.cu = (lo_u + hi_u) / 2;
    view.cw = (lo_w + hi_w) / 2;
    view.scale = std::max({(hi_u - lo_u) / 2, (hi_w - lo_w) / 2, 1e-9});
    return view;
}

}  // namespace detail

/// Drawing of a pattern in RP^2; only defined for m = 3. The view is a fixed
/// linear change of coordinates, so incidences and segments are preserved.
inline std::string render_pattern(const Pattern& p, double size = 640) {
    if (p.m != 3) throw std::invalid_argument("render_pattern: drawings exist only for m = 3");
    std::vector<detail::Vec3> all;
    for (const auto& f : p.frames)
        if (f)
            for (const auto& pt : f->points()) all.push_back(detail::chart_rep(pt.rep));
    for (const auto& y : p.subspaces) all.push_back(detail::chart_rep(y.line.rep));
    const detail::View view = detail::fit_view(all);
    auto pt = [&](std::span<const Int> v) { return view.point(detail::chart_rep(v)); };

    detail::Canvas c(size);
    for (std::size_t j = 0; j < p.N; ++j)
        c.curve(detail::projective_line(view.functional(detail::to_vec3(p.subspaces[j].plane.rep))), detail::palette(j), 1.0,
                true);
    for (std::size_t i = 0; i < p.N; ++i) {
        if (!p.frames[i]) continue;
        const auto& pts = p.frames[i]->points();
        const auto& colour = detail::palette(i);
        for (std::size_t a = 0; a < 3; ++a) c.curve(detail::segment(pt(pts[a].rep), pt(pts[(a + 1) % 3].rep)), colour, 1.6);
        for (const auto& q : pts) c.dot(pt(q.rep), colour, 2.5);
        c.label(pt(pts.back().rep), "X" + std::to_string(i + 1), colour);
    }
    for (std::size_t j = 0; j < p.N; ++j) {
        const auto& colour = detail::palette(j);
        c.dot(pt(p.subspaces[j].line.rep), colour, 4);
        c.label(pt(p.subspaces[j].line.rep), "L" + std::to_string(j + 1), colour);
    }
    return c.finish("intersection pattern N=" + std::to_string(p.N));
}

}  // namespace flatlink::svg
