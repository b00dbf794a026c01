#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ac_grid.hpp"
#include "confocal.hpp"
#include "geom.hpp"
#include "grid_spec.hpp"

namespace cnets {

struct WindowError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Uniformly scaled ellipsoids carrying circular sections. s1, s2 parametrize
// curvature lines, s3 in [0, pi/2] is the deformation parameter; y has unit
// semi-axis and the circles alpha = s1 + s2, beta = s1 - s2 have radii
// |sin alpha| and |sin beta|.
struct CircularParametrization {
    ConfocalSystem sys;
    int hemisphere = 1;  // sign of y

    double s0() const { return std::acos(std::sqrt((sys.a - sys.b) / (sys.a - sys.c))); }
    double denom() const { return std::sqrt((sys.a - sys.b) * (sys.b - sys.c)); }
    // x and z are K (cos beta + cos alpha) cos s3 and K (cos beta - cos alpha) sin s3
    double chain_constant() const { return 0.5 * (sys.a - sys.c) / denom(); }
    double spherical_s3() const { return std::atan(std::sqrt((sys.a - sys.b) / (sys.b - sys.c))); }

    bool in_window(double s1, double s2, double slack = 1e-12) const {
        const double w = s0();
        return s1 >= w - slack && s1 <= std::numbers::pi - w + slack && std::abs(s2) <= w + slack;
    }

    Vec3 point(double s1, double s2, double s3) const {
        const double a = sys.a, b = sys.b, c = sys.c;
        const double c1 = std::cos(s1), c2 = std::cos(s2);
        const double g1 = std::sqrt(std::max(0.0, a - b - (a - c) * c1 * c1));
        const double g2 = std::sqrt(std::max(0.0, (a - c) * c2 * c2 - a + b));
        const double D = denom();
        return {(a - c) * c1 * c2 * std::cos(s3) / D, hemisphere * g1 * g2 / D,
                (a - c) * std::sin(s1) * std::sin(s2) * std::sin(s3) / D};
    }

    // |r_alpha|^2 = |r_beta|^2 in closed form.
    double circular_speed_sq(double s1, double s2) const {
        const double a = sys.a, b = sys.b, c = sys.c;
        const double c1 = std::cos(s1), c2 = std::cos(s2);
        const double num = (a - c) * (a - c) * std::pow(c1 * c1 - c2 * c2, 2);
        return num / (4.0 * (a - b - (a - c) * c1 * c1) * ((a - c) * c2 * c2 - a + b));
    }
};

struct CCGrid {
    CircularParametrization param;
    double s3 = 0.0;
    GridSpec spec;  // (s1, s2) = delta (n1 + n2, n1 - n2) + offset
    std::map<Index2, Vec3> vertices;
    std::vector<VertexChain> circles;  // family 0: alpha fixed (n1 fixed), 1: beta fixed (n2 fixed)
    std::vector<Index2> clipped;       // indices outside the parameter window

    double alpha(int n1) const { return 2.0 * spec.delta * n1 + spec.offset[0] + spec.offset[1]; }
    double beta(int n2) const { return 2.0 * spec.delta * n2 + spec.offset[0] - spec.offset[1]; }
    double label(const VertexChain& c) const { return c.family == 0 ? alpha(c.index) : beta(c.index); }
    // circles never straddle poles
    bool pole_between(const Index2&, const Index2&) const { return false; }
};

inline CCGrid build_cc_grid(const ConfocalSystem& sys, double s3, const GridSpec& spec, int hemisphere = 1) {
    spec.validate();
    if (!(s3 >= 0.0 && s3 <= std::numbers::pi / 2))
        throw WindowError("s3 must lie in [0, pi/2], got " + std::to_string(s3));
    if (hemisphere != 1 && hemisphere != -1) throw std::invalid_argument("hemisphere must be +1 or -1");
    CCGrid g;
    g.param = {sys, hemisphere};
    g.s3 = s3;
    g.spec = spec;
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1)
        for (int n2 = spec.lo[1]; n2 < spec.hi[1]; ++n2) {
            const auto p = spec.params(n1, n2);
            if (!g.param.in_window(p[0], p[1])) {
                g.clipped.push_back({n1, n2});
                continue;
            }
            g.vertices[{n1, n2}] = g.param.point(p[0], p[1], s3);
        }
    if (g.vertices.empty()) throw WindowError("no grid vertex lies inside the parameter window");
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) {
        std::vector<Index2> seq;
        for (int n2 = spec.lo[1]; n2 < spec.hi[1]; ++n2) seq.push_back({n1, n2});
        for (auto& c : detail::build_chains(g, 0, n1, seq)) g.circles.push_back(std::move(c));
    }
    for (int n2 = spec.lo[1]; n2 < spec.hi[1]; ++n2) {
        std::vector<Index2> seq;
        for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) seq.push_back({n1, n2});
        for (auto& c : detail::build_chains(g, 1, n2, seq)) g.circles.push_back(std::move(c));
    }
    return g;
}

inline CCGrid deform_cc_grid(const CCGrid& g, double s3_new) {
    return build_cc_grid(g.param.sys, s3_new, g.spec, g.param.hemisphere);
}

struct CircleChainCheck {
    double radius_defect = 0.0;  // | fitted radius - |sin label| |
    double fit_residual = 0.0;   // deviation of vertices from the fitted circle
    double plane_defect = 0.0;   // deviation from the predicted chain plane
};

inline std::vector<Vec3> chain_points(const std::map<Index2, Vec3>& verts, const VertexChain& c) {
    std::vector<Vec3> pts;
    for (const auto& i : c.vertices) pts.push_back(verts.at(i));
    return pts;
}

// Circle and plane checks for every chain with at least three vertices.
inline CircleChainCheck check_cc_circles(const CCGrid& g) {
    CircleChainCheck out;
    const double K2 = 2.0 * g.param.chain_constant();
    const double ss = std::sin(g.s3), cs = std::cos(g.s3);
    for (const auto& c : g.circles) {
        const auto pts = chain_points(g.vertices, c);
        const double t = g.label(c);
        if (pts.size() >= 3) {
            const CircleFit f = fit_circle(pts);
            out.radius_defect = std::max(out.radius_defect, std::abs(f.radius - std::abs(std::sin(t))));
            out.fit_residual = std::max(out.fit_residual, f.residual);
        }
        // beta chains: x sin s3 + z cos s3 = 2K cos(beta) sin s3 cos s3; alpha chains with -z
        const double zs = c.family == 1 ? 1.0 : -1.0;
        for (const auto& p : pts)
            out.plane_defect = std::max(out.plane_defect,
                                        std::abs(p.x * ss + zs * p.z * cs - K2 * std::cos(t) * ss * cs));
    }
    return out;
}

// Chord lengths between all vertex pairs of each circle chain.
inline std::map<std::pair<Index2, Index2>, double> circle_chords(const CCGrid& g) {
    std::map<std::pair<Index2, Index2>, double> out;
    for (const auto& c : g.circles)
        for (std::size_t i = 0; i < c.vertices.size(); ++i)
            for (std::size_t j = i + 1; j < c.vertices.size(); ++j)
                out[{c.vertices[i], c.vertices[j]}] =
                    distance(g.vertices.at(c.vertices[i]), g.vertices.at(c.vertices[j]));
    return out;
}

inline double chord_isometry_defect(const CCGrid& a, const CCGrid& b) {
    const auto ca = circle_chords(a), cb = circle_chords(b);
    double worst = 0.0;
    for (const auto& [k, v] : ca) {
        auto it = cb.find(k);
        if (it != cb.end()) worst = std::max(worst, std::abs(v - it->second));
    }
    return worst;
}

// Finite-difference |r_alpha|^2, |r_beta|^2 against the closed form, and the
// angle defect of the curvature tangents bisecting the circular tangents.
struct CircularSpeedCheck {
    double alpha_defect = 0.0, beta_defect = 0.0, bisection_defect = 0.0;
};

inline CircularSpeedCheck circular_speed_check(const CircularParametrization& cp, double s1, double s2, double s3,
                                               double h = 1e-5) {
    auto pos = [&](double al, double be) { return cp.point(0.5 * (al + be), 0.5 * (al - be), s3); };
    const double al = s1 + s2, be = s1 - s2;
    auto d = [&](int which, double hh) {
        return which == 0 ? (pos(al + hh, be) - pos(al - hh, be)) / (2 * hh)
                          : (pos(al, be + hh) - pos(al, be - hh)) / (2 * hh);
    };
    const Vec3 ra = (4.0 * d(0, 0.5 * h) - d(0, h)) / 3.0;
    const Vec3 rb = (4.0 * d(1, 0.5 * h) - d(1, h)) / 3.0;
    const double exact = cp.circular_speed_sq(s1, s2);
    CircularSpeedCheck c;
    c.alpha_defect = std::abs(dot(ra, ra) - exact);
    c.beta_defect = std::abs(dot(rb, rb) - exact);
    // r_s1 = r_alpha + r_beta, r_s2 = r_alpha - r_beta
    const Vec3 t1 = ra + rb;
    auto angle = [](Vec3 u, Vec3 v) { return std::atan2(norm(cross(u, v)), dot(u, v)); };
    c.bisection_defect = std::abs(angle(t1, ra) - angle(t1, rb));
    return c;
}

// Planar HIC-net from a degenerate CC grid.
enum class HICLimit { S3Zero, S3HalfPi };

struct HICCircle {
    int family = 0;  // 0 alpha, 1 beta
    int index = 0;
    double label = 0.0;
    double center = 0.0;  // position on the symmetry axis
    double radius = 0.0;  // |sin label|
};

struct HICQuad {
    Index2 base;                 // (n1, n2): circles alpha_{n1}, alpha_{n1+1}, beta_{n2}, beta_{n2+1}
    std::array<double, 4> labels;  // alpha+, alpha-, beta+, beta-
    double determinant = 0.0;      // four-circle condition with the sign pattern (+,-,-,+)
    bool complex_incircle = false;
    std::array<OrientedCircle2D, 2> incircles{};  // mirror pair about the axis
    double contact_residual = 0.0;
};

struct HICNet {
    PlanarFrame frame = PlanarFrame::XY;  // axis is the first frame coordinate
    double ellipse_e = 0.0;               // boundary ellipse e u^2 + y^2 = 1
    double axis_scale = 1.0;              // center = axis_scale * cos(label)
    std::map<Index2, Vec2> vertices;
    std::vector<HICCircle> circles;
    std::vector<HICQuad> quads;
    std::vector<std::string> complex_quads;
    double collinearity = 0.0;  // center offsets from the axis (zero by construction)

    // |B^2 - 4AC|/4 for the x-equation of circle and ellipse.
    double contact_discriminant(const HICCircle& k) const {
        const double A = 1.0 - ellipse_e, B = -2.0 * k.center, C = k.center * k.center - k.radius * k.radius + 1.0;
        return std::abs(B * B - 4.0 * A * C) / 4.0;
    }
};

inline constexpr std::array<int, 4> kHICPattern{1, -1, -1, 1};

// det [1, x_i, r_i, x_i^2 - r_i^2] of four circles centred on the axis.
inline double four_circle_determinant(const std::array<double, 4>& x, const std::array<double, 4>& r) {
    Eigen::Matrix4d M;
    for (int i = 0; i < 4; ++i) M.row(i) << 1.0, x[i], r[i], x[i] * x[i] - r[i] * r[i];
    return M.determinant();
}

// Oriented circles touching four oriented circles centred on the x-axis.
// Returns false when the touching circles are not real.
inline bool axis_incircles(const std::array<double, 4>& x, const std::array<double, 4>& r,
                           std::array<OrientedCircle2D, 2>& out, double& residual) {
    // (X - x_i)^2 + Y^2 = (R - r_i)^2  <=>  W - 2 X x_i + 2 R r_i + x_i^2 - r_i^2 = 0, W = X^2 + Y^2 - R^2
    Eigen::Matrix<double, 4, 3> A;
    Eigen::Vector4d b;
    for (int i = 0; i < 4; ++i) {
        A.row(i) << 1.0, -2.0 * x[i], 2.0 * r[i];
        b[i] = -(x[i] * x[i] - r[i] * r[i]);
    }
    const Eigen::Vector3d s = A.colPivHouseholderQr().solve(b);
    const double X = s[1], R = s[2];
    const double Y2 = s[0] - X * X + R * R;
    if (Y2 < 0.0) return false;
    const double Y = std::sqrt(Y2);
    out[0] = {{X, Y}, R};
    out[1] = {{X, -Y}, R};
    residual = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double d = std::hypot(X - x[i], Y);
        residual = std::max(residual, std::abs(d - std::abs(R - r[i])));
    }
    return true;
}

// The s3 = pi/2 limit is the s3 = 0 limit of the system (-c, -b, -a) with the
// roles of x and z exchanged and alpha replaced by pi - alpha.
inline HICNet planar_limit_hic(const ConfocalSystem& sys, const GridSpec& spec, HICLimit which) {
    const bool half = which == HICLimit::S3HalfPi;
    const ConfocalSystem work = half ? ConfocalSystem(-sys.c, -sys.b, -sys.a) : sys;
    const CCGrid g = build_cc_grid(sys, half ? std::numbers::pi / 2 : 0.0, spec);
    HICNet net;
    net.frame = half ? PlanarFrame::ZY : PlanarFrame::XY;
    net.ellipse_e = (work.b - work.c) / (work.a - work.c);
    net.axis_scale = std::sqrt((work.a - work.b) / (work.b - work.c));
    for (const auto& [k, p] : g.vertices) net.vertices[k] = project(net.frame, p);
    // labels in the working frame
    auto alpha_w = [&](int n1) { return half ? std::numbers::pi - g.alpha(n1) : g.alpha(n1); };
    auto beta_w = [&](int n2) { return g.beta(n2); };
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) {
        const double t = alpha_w(n1);
        net.circles.push_back({0, n1, t, net.axis_scale * std::cos(t), std::abs(std::sin(t))});
    }
    for (int n2 = spec.lo[1]; n2 < spec.hi[1]; ++n2) {
        const double t = beta_w(n2);
        net.circles.push_back({1, n2, t, net.axis_scale * std::cos(t), std::abs(std::sin(t))});
    }
    for (int n1 = spec.lo[0]; n1 + 1 < spec.hi[0]; ++n1)
        for (int n2 = spec.lo[1]; n2 + 1 < spec.hi[1]; ++n2) {
            const auto idx = quad_indices({n1, n2});
            bool inside = true;
            for (const auto& i : idx) inside = inside && g.vertices.count(i);
            if (!inside) continue;
            HICQuad q;
            q.base = {n1, n2};
            // in the working frame alpha decreases with n1 when half
            double ap = alpha_w(n1 + 1), am = alpha_w(n1);
            if (ap < am) std::swap(ap, am);
            const double bp = beta_w(n2 + 1), bm = beta_w(n2);
            q.labels = {ap, am, bp, bm};
            std::array<double, 4> x, r;
            for (int i = 0; i < 4; ++i) {
                x[i] = net.axis_scale * std::cos(q.labels[i]);
                r[i] = kHICPattern[i] * std::sin(q.labels[i]);
            }
            // scale-free form: columns 1, cos, sin, cos 2t
            Eigen::Matrix4d M;
            for (int i = 0; i < 4; ++i)
                M.row(i) << 1.0, std::cos(q.labels[i]), kHICPattern[i] * std::sin(q.labels[i]),
                    std::cos(2.0 * q.labels[i]);
            q.determinant = M.determinant();
            q.complex_incircle = !axis_incircles(x, r, q.incircles, q.contact_residual);
            if (q.complex_incircle)
                net.complex_quads.push_back("quad (" + std::to_string(n1) + "," + std::to_string(n2) +
                                            "): touching circles are not real");
            net.quads.push_back(q);
        }
    return net;
}

}  // namespace cnets
