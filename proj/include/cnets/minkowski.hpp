#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ac_grid.hpp"
#include "confocal.hpp"
#include "elliptic.hpp"
#include "geom.hpp"

namespace cnets {

struct VertexOnSlice : GeometryError {
    using GeometryError::GeometryError;
};

enum class MinkowskiVariant { Elliptic, Hyperbolic };

// Confocal quadrics x^2/(mu+a) + y^2/(mu+b) - z^2/(mu+c) = 1 scaled to a - c = 1.
// Elliptic: a - b = k^2; hyperbolic: a - b = 1/k^2.
struct MinkowskiSystem {
    MinkowskiVariant variant = MinkowskiVariant::Elliptic;
    Modulus m;
    double a = 1.0, b = 0.0, c = 0.0;

    MinkowskiSystem() : MinkowskiSystem(MinkowskiVariant::Elliptic, 0.8) {}
    MinkowskiSystem(MinkowskiVariant v, double k) : variant(v) {
        if (!(k > 0.0 && k < 1.0)) throw std::invalid_argument("Minkowski modulus must lie in (0, 1)");
        m = Modulus(k);
        b = v == MinkowskiVariant::Elliptic ? 1.0 - k * k : 1.0 - 1.0 / (k * k);
    }
    double k() const { return m.k; }
    bool elliptic() const { return variant == MinkowskiVariant::Elliptic; }

    // Focal conic of the z = 0 trace: x^2/A + y^2/B = 1.
    std::array<double, 2> trace_conic() const {
        return elliptic() ? std::array<double, 2>{1.0, 1.0 - k() * k()}
                          : std::array<double, 2>{1.0, -(1.0 - k() * k()) / (k() * k())};
    }
};

inline const char* variant_name(MinkowskiVariant v) {
    return v == MinkowskiVariant::Elliptic ? "elliptic" : "hyperbolic";
}

struct MinkowskiSample {
    SParams s;
    std::array<double, 3> mu{};
    Vec3 pos;
};

inline MinkowskiSample minkowski_point(const MinkowskiSystem& sys, const SParams& s) {
    const JacobiTriple t1 = jacobi(s.s1, sys.m), t2 = jacobi(s.s2, sys.m), t3 = jacobi(s.s3, sys.m);
    const double k = sys.k();
    const double ns3 = quotient_of(Quotient::ns, t3, k, s.s3);
    MinkowskiSample out;
    out.s = s;
    if (sys.elliptic()) {
        const double nc2 = quotient_of(Quotient::nc, t2, k, s.s2);
        out.pos = {t1.sn * t2.dn * nc2 * ns3, t1.cn * nc2 * t3.dn * ns3, t1.dn * t2.sn * nc2 * t3.cn * ns3};
        out.mu = {-sys.a + k * k * t1.sn * t1.sn, -sys.b + (1.0 - k * k) * nc2 * nc2, -sys.a + ns3 * ns3};
    } else {
        const double nd2 = 1.0 / t2.dn;
        out.pos = {t1.sn * t2.cn * nd2 * ns3, t1.dn * nd2 * t3.cn * ns3 / k, t1.cn * t2.sn * nd2 * t3.dn * ns3};
        out.mu = {-sys.a + t1.sn * t1.sn, -sys.b + (1.0 - 1.0 / (k * k)) * nd2 * nd2,
                  -sys.a + ns3 * ns3 / (k * k)};
    }
    return out;
}

inline double minkowski_quadric_residual(const MinkowskiSystem& sys, Vec3 p, double mu) {
    return std::abs(p.x * p.x / (mu + sys.a) + p.y * p.y / (mu + sys.b) - p.z * p.z / (mu + sys.c) - 1.0);
}

// Families (0-based) whose label range contains mu. Two of the ranges overlap
// (second and third when elliptic, first and second when hyperbolic), so
// membership comes from the parameter, not from mu.
inline std::vector<int> mu_families(const MinkowskiSystem& sys, double mu) {
    std::vector<int> out;
    if (sys.elliptic()) {
        if (mu >= -sys.a && mu <= -sys.b) out.push_back(0);
        if (mu >= -sys.c) out.insert(out.end(), {1, 2});
    } else {
        if (mu >= -sys.a && mu <= -sys.c) out.insert(out.end(), {0, 1});
        if (mu >= -sys.b) out.push_back(2);
    }
    return out;
}

// II of the quadric s_{fixed} = const in its two free parameters, up to a
// common factor: second derivatives projected on the quadric gradient.
inline FundamentalForm minkowski_second_form(const MinkowskiSystem& sys, const SParams& s, int fixed,
                                             double h = 1e-3) {
    const auto [i, k] = detail::surface_params(fixed);
    const MinkowskiSample p = minkowski_point(sys, s);
    const double mu = p.mu[fixed];
    const Vec3 grad{p.pos.x / (mu + sys.a), p.pos.y / (mu + sys.b), -p.pos.z / (mu + sys.c)};
    auto pos = [&](double di, double dk) {
        SParams q = s;
        q[i] += di;
        q[k] += dk;
        return minkowski_point(sys, q).pos;
    };
    const Vec3 c0 = pos(0, 0);
    auto form = [&](double t) -> FundamentalForm {
        const Vec3 rii = (pos(t, 0) - 2.0 * c0 + pos(-t, 0)) / (t * t);
        const Vec3 rkk = (pos(0, t) - 2.0 * c0 + pos(0, -t)) / (t * t);
        const Vec3 rik = (pos(t, t) - pos(t, -t) - pos(-t, t) + pos(-t, -t)) / (4.0 * t * t);
        return {dot(rii, grad), dot(rik, grad), dot(rkk, grad)};
    };
    // one Richardson step
    const FundamentalForm F1 = form(h), F2 = form(0.5 * h);
    return {(4.0 * F2.e - F1.e) / 3.0, (4.0 * F2.f - F1.f) / 3.0, (4.0 * F2.g - F1.g) / 3.0};
}

struct PlaneFamilyLabel {
    int family = 1;  // 1..4
    double lambda = 0.0;
};

// Coefficients (px, py, pz, p0) of px x + py y + pz z + p0 = 0, pz = 1.
inline std::array<double, 4> plane_coefficients(const MinkowskiSystem& sys, const PlaneFamilyLabel& l) {
    if (l.family < 1 || l.family > 4) throw std::invalid_argument("plane family must be 1..4");
    const JacobiTriple t = jacobi(l.lambda, sys.m);
    // elliptic uses (cn, sn, dn); hyperbolic (dn, k sn, cn)
    const double p = sys.elliptic() ? t.cn : t.dn;
    const double q = sys.elliptic() ? t.sn : sys.k() * t.sn;
    const double r = sys.elliptic() ? t.dn : t.cn;
    static constexpr int lin[5] = {0, 1, 1, -1, -1};
    static constexpr int cst[5] = {0, 1, -1, -1, 1};
    return {lin[l.family] * p, -lin[l.family] * q, 1.0, cst[l.family] * r};
}

// Unit normal with z-component +1/sqrt(2).
inline OrientedPlane plane_from_label(const MinkowskiSystem& sys, const PlaneFamilyLabel& l) {
    const auto c = plane_coefficients(sys, l);
    return OrientedPlane::from_coefficients(c[0], c[1], c[2], c[3]);
}

// Dual form of tangency to x^2/A + y^2/B - z^2/C = 1: A px^2 + B py^2 - C pz^2 = p0^2.
// Also valid for the degenerate members (focal conics).
inline double dual_tangency_residual(const std::array<double, 4>& c, double A, double B, double C) {
    return std::abs(A * c[0] * c[0] + B * c[1] * c[1] - C * c[2] * c[2] - c[3] * c[3]);
}

// Contact point of the plane with the quadric labelled mu and its on-quadric
// residual; the dual form is used when the plane passes through the origin.
struct PlaneContact {
    std::optional<Vec3> point;
    double residual = 0.0;
};

inline PlaneContact plane_tangency_to_confocal(const MinkowskiSystem& sys, const PlaneFamilyLabel& l, double mu) {
    const double A = mu + sys.a, B = mu + sys.b, C = mu + sys.c;
    if (std::abs(A) < 1e-14 || std::abs(B) < 1e-14 || std::abs(C) < 1e-14)
        throw DegenerateConfiguration("mu = " + std::to_string(mu) + " labels a degenerate quadric");
    const auto c = plane_coefficients(sys, l);
    PlaneContact out;
    if (std::abs(c[3]) < 1e-8) {
        out.residual = dual_tangency_residual(c, A, B, C);
        return out;
    }
    // matching x0 x/A + y0 y/B - z0 z/C = 1 with the plane
    const Vec3 p{-A * c[0] / c[3], -B * c[1] / c[3], C * c[2] / c[3]};
    out.point = p;
    out.residual = std::abs(p.x * p.x / A + p.y * p.y / B - p.z * p.z / C - 1.0);
    return out;
}

// Tangency of a plane to the three focal conics mu = -a, -b, -c.
inline std::array<double, 3> focal_conic_tangency(const MinkowskiSystem& sys, const PlaneFamilyLabel& l) {
    const auto c = plane_coefficients(sys, l);
    std::array<double, 3> r{};
    const double mus[3] = {-sys.a, -sys.b, -sys.c};
    for (int i = 0; i < 3; ++i) r[i] = dual_tangency_residual(c, mus[i] + sys.a, mus[i] + sys.b, mus[i] + sys.c);
    return r;
}

// lambda_i = lambda0_i + delta n_i with lambda0_1 + lambda0_4 = lambda0_2 + lambda0_3.
struct OctahedralGridSpec {
    std::array<double, 4> lambda0{0, 0, 0, 0};
    double delta = 0.1;
    std::array<int, 4> lo{0, 0, 0, 0};
    std::array<int, 4> hi{1, 1, 1, 1};  // half-open
    std::optional<int> closure_n;

    static OctahedralGridSpec closed(int n, const Modulus& m) {
        if (n <= 0) throw std::invalid_argument("closure_n must be positive");
        OctahedralGridSpec s;
        s.delta = 4.0 * m.kk / n;
        s.hi = {n, n, n, n};
        s.closure_n = n;
        return s;
    }

    void validate(const Modulus* m = nullptr) const {
        if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("grid delta must be positive");
        if (std::abs(lambda0[0] + lambda0[3] - lambda0[1] - lambda0[2]) > 1e-12)
            throw std::invalid_argument("lambda0 must satisfy l1 + l4 = l2 + l3");
        for (int i = 0; i < 4; ++i)
            if (hi[i] <= lo[i]) throw std::invalid_argument("plane index range is empty");
        if (closure_n && m && std::abs(delta * *closure_n - 4.0 * m->kk) > 1e-12)
            throw std::invalid_argument("delta does not match closure_n");
    }
    double lambda(int family, int n) const { return lambda0[family - 1] + delta * n; }
};

using Index4 = std::array<int, 4>;

// Common solution of the four web equations.
inline SParams vertex_params(const std::array<double, 4>& lam) {
    return {0.5 * (lam[0] + lam[3]), 0.5 * (lam[0] - lam[2]), 0.5 * (lam[0] - lam[1])};
}

struct GridVertex {
    Index4 n{};
    SParams s;
    Vec3 pos;
    double concurrency = 0.0;   // distance of pos from the four planes
    double cone_residual = 0.0; // oriented contact residual of the fitted cone
    Cone cone;
    // only two distinct normals (vertex on the focal conic): the cone is the
    // vertical 45 degree cone at the vertex instead of a four-plane fit
    bool degenerate_cone = false;
};

struct OctahedralGrid {
    MinkowskiSystem sys;
    OctahedralGridSpec spec;
    std::map<std::pair<int, int>, OrientedPlane> planes;  // (family, n)
    std::vector<GridVertex> vertices;
    std::vector<std::string> skipped;  // vertices at infinity

    const OrientedPlane& plane(int family, int n) const { return planes.at({family, n}); }
};

inline std::array<OrientedPlane, 4> vertex_planes(const MinkowskiSystem& sys, const OctahedralGridSpec& spec,
                                                  const Index4& n) {
    std::array<OrientedPlane, 4> out;
    for (int f = 1; f <= 4; ++f) out[f - 1] = plane_from_label(sys, {f, spec.lambda(f, n[f - 1])});
    return out;
}

inline OctahedralGrid build_octahedral_grid(const MinkowskiSystem& sys, const OctahedralGridSpec& spec) {
    spec.validate(&sys.m);
    OctahedralGrid g;
    g.sys = sys;
    g.spec = spec;
    for (int f = 1; f <= 4; ++f)
        for (int n = spec.lo[f - 1]; n < spec.hi[f - 1]; ++n)
            g.planes[{f, n}] = plane_from_label(sys, {f, spec.lambda(f, n)});
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1)
        for (int n2 = spec.lo[1]; n2 < spec.hi[1]; ++n2)
            for (int n3 = spec.lo[2]; n3 < spec.hi[2]; ++n3) {
                const int n4 = n2 + n3 - n1;
                if (n4 < spec.lo[3] || n4 >= spec.hi[3]) continue;
                const Index4 n{n1, n2, n3, n4};
                GridVertex v;
                v.n = n;
                v.s = vertex_params({spec.lambda(1, n1), spec.lambda(2, n2), spec.lambda(3, n3), spec.lambda(4, n4)});
                try {
                    v.pos = minkowski_point(sys, v.s).pos;
                } catch (const PoleError&) {
                    g.skipped.push_back("vertex (" + std::to_string(n1) + "," + std::to_string(n2) + "," +
                                        std::to_string(n3) + "," + std::to_string(n4) + ") lies at infinity");
                    continue;
                }
                const auto P = vertex_planes(sys, spec, n);
                const double scale = std::max(1.0, norm(v.pos));
                for (const auto& p : P) v.concurrency = std::max(v.concurrency, std::abs(p.signed_distance(v.pos)));
                v.concurrency /= scale;
                int distinct = 0;
                for (int i = 0; i < 4; ++i) {
                    bool seen = false;
                    for (int j = 0; j < i; ++j) seen = seen || norm(P[i].v - P[j].v) < 1e-9;
                    distinct += !seen;
                }
                v.degenerate_cone = distinct <= 2;
                v.cone = v.degenerate_cone ? Cone{v.pos, {0.0, 0.0, 1.0}, std::numbers::pi / 4, 1}
                                           : cone_through_four_planes(P, v.pos, 1e-8);
                for (const auto& p : P) v.cone_residual = std::max(v.cone_residual, v.cone.contact_residual(p) / scale);
                g.vertices.push_back(v);
            }
    return g;
}

// IC-net on z = 0: l_n is the trace of family 1 (= family 3 reversed) at
// lambda_n, m_n of family 2 (= family 4 reversed). The quad bounded by l_n,
// l_{n+1}, m_n', m_{n'+1} is inscribed in the section of the cone at the
// vertex (n+1, n'+1, n, n').
struct TraceQuad {
    Index2 base;
    OrientedCircle2D incircle;  // computed from the four lines
    OrientedCircle2D cone_section;
    double residual = 0.0;      // incircle contact residual
    double cone_defect = 0.0;   // incircle vs cone section
};

struct TraceNet {
    std::map<int, OrientedLine2D> lines_l, lines_m;
    std::array<double, 2> conic{1.0, 1.0};
    std::vector<TraceQuad> quads;
    std::vector<Index2> degenerate;  // parallel adjacent sides or vertex at infinity
    std::vector<std::string> skipped;

    double max_tangency_residual() const {
        double r = 0.0;
        for (const auto* fam : {&lines_l, &lines_m})
            for (const auto& [k, l] : *fam) r = std::max(r, conic_tangency_residual(l, conic[0], conic[1]));
        return r;
    }
};

inline TraceNet z0_trace(const MinkowskiSystem& sys, const OctahedralGridSpec& spec, double tol = 1e-8) {
    spec.validate(&sys.m);
    if (spec.lambda0 != std::array<double, 4>{0, 0, 0, 0})
        throw std::invalid_argument("the z = 0 trace net needs lambda0 = 0");
    TraceNet net;
    net.conic = sys.trace_conic();
    const int lo = std::max(spec.lo[0], spec.lo[2]), hi = std::min(spec.hi[0], spec.hi[2]);
    const int lo2 = std::max(spec.lo[1], spec.lo[3]), hi2 = std::min(spec.hi[1], spec.hi[3]);
    for (int n = lo; n < hi; ++n) net.lines_l[n] = plane_from_label(sys, {1, spec.lambda(1, n)}).trace_at_height(0.0);
    for (int n = lo2; n < hi2; ++n) net.lines_m[n] = plane_from_label(sys, {2, spec.lambda(2, n)}).trace_at_height(0.0);
    for (int n = lo; n + 1 < hi; ++n)
        for (int np = lo2; np + 1 < hi2; ++np) {
            const Index4 idx{n + 1, np + 1, n, np};
            const auto P = vertex_planes(sys, spec, idx);
            std::array<OrientedLine2D, 4> L;
            for (int i = 0; i < 4; ++i) L[i] = P[i].trace_at_height(0.0);
            // side order around the quad: l_{n+1}, m_{n'+1}, l_n, m_n'
            const std::array<OrientedLine2D, 4> sides{L[0], L[1], L[2], L[3]};
            TraceQuad q;
            q.base = {n, np};
            try {
                const SParams s = vertex_params({spec.lambda(1, n + 1), spec.lambda(2, np + 1), spec.lambda(3, n),
                                                 spec.lambda(4, np)});
                const Vec3 apex = minkowski_point(sys, s).pos;
                q.cone_section = {{apex.x, apex.y}, apex.z};
                const IncircleResult r = incircle_of_quad(sides, tol);
                q.incircle = r.circle;
                const double scale = std::max(1.0, r.diameter);
                q.residual = r.residual / scale;
                q.cone_defect = std::max(distance(r.circle.center, q.cone_section.center),
                                         std::abs(r.circle.r - q.cone_section.r)) / scale;
            } catch (const PoleError&) {
                net.degenerate.push_back(q.base);
                net.skipped.push_back("quad (" + std::to_string(n) + "," + std::to_string(np) + "): cone vertex at infinity");
                continue;
            } catch (const GeometryError& e) {
                net.degenerate.push_back(q.base);
                net.skipped.push_back("quad (" + std::to_string(n) + "," + std::to_string(np) + "): " + e.what());
                continue;
            }
            net.quads.push_back(q);
        }
    return net;
}

// Slice z = eps. Lines l_{2n} = trace of family 3 at n, l_{2n+1} = family 1 at n;
// m_{2n'} = family 4 at n', m_{2n'+1} = family 2 at n'. Quad (i, j) is white
// when i + j is even; white quads carry the section of the cone at their vertex.
struct SliceQuad {
    Index2 base;
    bool white = false;
    Index4 vertex{};                // white only
    OrientedCircle2D circle;        // cone section
    double contact_residual = 0.0;  // cone section against the four oriented lines
    bool degenerate = false;        // two adjacent sides parallel
    bool incircle_exists = false;   // result of the independent four-line test
    double incircle_defect = 0.0;   // four-line incircle vs cone section
};

struct CheckerboardSlice {
    double eps = 0.0;
    std::map<int, OrientedLine2D> lines_l, lines_m;
    std::vector<SliceQuad> quads;
    std::vector<std::string> skipped;
    double doubled_line_defect = 0.0;  // eps = 0: distance between l_{2n} reversed and l_{2n+1}
};

namespace detail {

// Plane-index of slice line i: (family, n).
inline std::pair<int, int> slice_line(int i, int even_family, int odd_family) {
    const int n = i >= 0 ? i / 2 : -((-i + 1) / 2);
    return (i - 2 * n) == 0 ? std::pair{even_family, n} : std::pair{odd_family, n};
}

}  // namespace detail

inline CheckerboardSlice checkerboard_slice(const OctahedralGrid& grid, double eps, double tol = 1e-8) {
    const auto& sys = grid.sys;
    const auto& spec = grid.spec;
    CheckerboardSlice out;
    out.eps = eps;
    if (eps != 0.0) {
        for (const auto& v : grid.vertices)
            if (std::abs(v.pos.z - eps) < 1e-12 * std::max(1.0, std::abs(eps)))
                throw VertexOnSlice("grid vertex lies on the slice z = " + std::to_string(eps));
    }
    auto plane_line = [&](int family, int n) {
        return plane_from_label(sys, {family, spec.lambda(family, n)}).trace_at_height(eps);
    };
    const int nl = std::min(spec.hi[0] - spec.lo[0], spec.hi[2] - spec.lo[2]);
    const int nm = std::min(spec.hi[1] - spec.lo[1], spec.hi[3] - spec.lo[3]);
    const int l0 = std::max(spec.lo[0], spec.lo[2]), m0 = std::max(spec.lo[1], spec.lo[3]);
    for (int i = 2 * l0; i < 2 * (l0 + nl); ++i) {
        const auto [f, n] = detail::slice_line(i, 3, 1);
        out.lines_l[i] = plane_line(f, n);
    }
    for (int j = 2 * m0; j < 2 * (m0 + nm); ++j) {
        const auto [f, n] = detail::slice_line(j, 4, 2);
        out.lines_m[j] = plane_line(f, n);
    }
    for (int n = l0; n < l0 + nl; ++n) {
        const auto a = out.lines_l.at(2 * n).flipped(), b = out.lines_l.at(2 * n + 1);
        out.doubled_line_defect = std::max({out.doubled_line_defect, norm(a.n - b.n), std::abs(a.c - b.c)});
    }
    for (int n = m0; n < m0 + nm; ++n) {
        const auto a = out.lines_m.at(2 * n).flipped(), b = out.lines_m.at(2 * n + 1);
        out.doubled_line_defect = std::max({out.doubled_line_defect, norm(a.n - b.n), std::abs(a.c - b.c)});
    }
    for (int i = 2 * l0; i + 1 < 2 * (l0 + nl); ++i)
        for (int j = 2 * m0; j + 1 < 2 * (m0 + nm); ++j) {
            SliceQuad q;
            q.base = {i, j};
            q.white = (i + j) % 2 == 0;
            const std::array<OrientedLine2D, 4> sides{out.lines_l.at(i), out.lines_m.at(j), out.lines_l.at(i + 1),
                                                      out.lines_m.at(j + 1)};
            for (int s = 0; s < 4; ++s)
                q.degenerate = q.degenerate || std::abs(cross(sides[s].n, sides[(s + 1) % 4].n)) < 1e-9;
            if (q.white) {
                const auto [f1, a1] = detail::slice_line(i, 3, 1);
                const auto [f2, a2] = detail::slice_line(i + 1, 3, 1);
                const auto [g1, b1] = detail::slice_line(j, 4, 2);
                const auto [g2, b2] = detail::slice_line(j + 1, 4, 2);
                // family 1 and 3 indices from the l-pair, 2 and 4 from the m-pair
                const int n1 = f1 == 1 ? a1 : a2, n3 = f1 == 3 ? a1 : a2;
                const int n2 = g1 == 2 ? b1 : b2, n4 = g1 == 4 ? b1 : b2;
                (void)f2;
                (void)g2;
                q.vertex = {n1, n2, n3, n4};
                const SParams s = vertex_params(
                    {spec.lambda(1, n1), spec.lambda(2, n2), spec.lambda(3, n3), spec.lambda(4, n4)});
                try {
                    const Vec3 apex = minkowski_point(sys, s).pos;
                    q.circle = {{apex.x, apex.y}, apex.z - eps};
                } catch (const PoleError&) {
                    out.skipped.push_back("quad (" + std::to_string(i) + "," + std::to_string(j) +
                                          "): cone vertex at infinity");
                    continue;
                }
                const double scale = std::max(1.0, std::abs(q.circle.r) + norm(q.circle.center));
                for (const auto& l : sides) q.contact_residual = std::max(q.contact_residual, contact_residual(l, q.circle));
                q.contact_residual /= scale;
            }
            try {
                const IncircleResult r = incircle_of_quad(sides, tol);
                q.incircle_exists = true;
                if (q.white) {
                    const double scale = std::max(1.0, r.diameter);
                    q.incircle_defect = std::max(distance(r.circle.center, q.circle.center),
                                                 std::abs(r.circle.r - q.circle.r)) / scale;
                }
            } catch (const GeometryError&) {
                q.incircle_exists = false;
            }
            out.quads.push_back(q);
        }
    return out;
}

}  // namespace cnets
