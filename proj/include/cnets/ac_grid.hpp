#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "confocal.hpp"
#include "geom.hpp"
#include "grid_spec.hpp"

namespace cnets {

using Index2 = std::pair<int, int>;

struct VertexChain {
    int family = 0;  // 0: fixed first index, 1: fixed second index
    int index = 0;   // value of the fixed index
    std::vector<Index2> vertices;
    bool truncated = false;  // cut short by a pole
};

struct PoleReport {
    Index2 vertex;
    std::string message;
};

// s2 of the one-sheeted hyperboloid with label u2 in [-b, -c].
inline double s2_from_u2(const ConfocalSystem& sys, double u2) {
    const double t = (-sys.c - u2) / (sys.b - sys.c);
    if (!(t >= -1e-15 && t <= 1.0 + 1e-15))
        throw std::invalid_argument("u2 must lie in [-b, -c], got " + std::to_string(u2));
    return arcsn(std::sqrt(std::clamp(t, 0.0, 1.0)), sys.m2.k);
}

// Samples of asymptotic lines on the hyperboloid u2 = const, vertex (n1, n3)
// at (s1, s3) = delta (n1 + n3, n1 - n3) + offset.
struct ACGrid {
    ConfocalSystem sys;
    double u2 = 0.0;
    double s2 = 0.0;
    GridSpec spec;
    Octant octant;
    std::map<Index2, Vec3> vertices;
    std::vector<VertexChain> lines;      // asymptotic lines, family 0 = l_n (fixed n1), 1 = m_n' (fixed n3)
    std::vector<VertexChain> curvature;  // family 0: s1 fixed (n1 + n3), 1: s3 fixed (n1 - n3)
    std::vector<PoleReport> poles;

    SParams params(int n1, int n3) const {
        const auto p = spec.params(n1, n3);
        return {p[0], s2, p[1]};
    }

    std::optional<Vec3> evaluate(int n1, int n3) const {
        try {
            return point_from_s(sys, params(n1, n3), octant).pos;
        } catch (const PoleError&) {
            return std::nullopt;
        }
    }

    const Vec3* find(int n1, int n3) const {
        auto it = vertices.find({n1, n3});
        return it == vertices.end() ? nullptr : &it->second;
    }

    // True when s3 passes through a multiple of 2K strictly between two vertices.
    bool pole_between(const Index2& a, const Index2& b) const {
        const double twok = 2.0 * sys.m1.kk;
        const double sa = params(a.first, a.second).s3 / twok, sb = params(b.first, b.second).s3 / twok;
        return std::floor(std::min(sa, sb)) != std::floor(std::max(sa, sb)) ||
               std::ceil(std::min(sa, sb)) != std::ceil(std::max(sa, sb));
    }
};

namespace detail {

// Split the index sequence into pole-free runs.
template <class Grid>
std::vector<VertexChain> build_chains(const Grid& g, int family, int index, const std::vector<Index2>& seq) {
    std::vector<VertexChain> out;
    VertexChain cur{family, index, {}, false};
    auto flush = [&](bool cut) {
        if (cut && !cur.vertices.empty()) cur.truncated = true;
        if (cur.vertices.size() >= 2) out.push_back(cur);
        const bool was = cur.truncated;
        cur = VertexChain{family, index, {}, false};
        cur.truncated = was && cut;
    };
    for (const auto& v : seq) {
        if (!g.vertices.count(v)) {
            flush(true);
            continue;
        }
        if (!cur.vertices.empty() && g.pole_between(cur.vertices.back(), v)) flush(true);
        cur.vertices.push_back(v);
    }
    flush(false);
    return out;
}

}  // namespace detail

inline ACGrid build_ac_grid(const ConfocalSystem& sys, double u2, const GridSpec& spec, Octant octant = {}) {
    spec.validate(&sys.m1);
    ACGrid g;
    g.sys = sys;
    g.u2 = u2;
    g.s2 = s2_from_u2(sys, u2);
    g.spec = spec;
    g.octant = octant;
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1)
        for (int n3 = spec.lo[1]; n3 < spec.hi[1]; ++n3) {
            try {
                g.vertices[{n1, n3}] = point_from_s(sys, g.params(n1, n3), octant).pos;
            } catch (const PoleError& e) {
                g.poles.push_back({{n1, n3}, e.what()});
            }
        }
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) {
        std::vector<Index2> seq;
        for (int n3 = spec.lo[1]; n3 < spec.hi[1]; ++n3) seq.push_back({n1, n3});
        for (auto& c : detail::build_chains(g, 0, n1, seq)) g.lines.push_back(std::move(c));
    }
    for (int n3 = spec.lo[1]; n3 < spec.hi[1]; ++n3) {
        std::vector<Index2> seq;
        for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) seq.push_back({n1, n3});
        for (auto& c : detail::build_chains(g, 1, n3, seq)) g.lines.push_back(std::move(c));
    }
    // curvature lines through vertices: s1 fixed <=> n1 + n3 fixed, s3 fixed <=> n1 - n3 fixed
    const int lo_sum = spec.lo[0] + spec.lo[1], hi_sum = spec.hi[0] + spec.hi[1] - 2;
    for (int sum = lo_sum; sum <= hi_sum; ++sum) {
        std::vector<Index2> seq;
        for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) {
            const int n3 = sum - n1;
            if (n3 >= spec.lo[1] && n3 < spec.hi[1]) seq.push_back({n1, n3});
        }
        for (auto& c : detail::build_chains(g, 0, sum, seq)) g.curvature.push_back(std::move(c));
    }
    const int lo_dif = spec.lo[0] - (spec.hi[1] - 1), hi_dif = spec.hi[0] - 1 - spec.lo[1];
    for (int dif = lo_dif; dif <= hi_dif; ++dif) {
        std::vector<Index2> seq;
        for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) {
            const int n3 = n1 - dif;
            if (n3 >= spec.lo[1] && n3 < spec.hi[1]) seq.push_back({n1, n3});
        }
        for (auto& c : detail::build_chains(g, 1, dif, seq)) g.curvature.push_back(std::move(c));
    }
    return g;
}

inline ACGrid deform_ac_grid(const ACGrid& grid, double u2_new) {
    return build_ac_grid(grid.sys, u2_new, grid.spec, grid.octant);
}

// Elementary quadrilateral with corners (n1,n3), (n1+1,n3), (n1+1,n3+1), (n1,n3+1).
struct GridQuad {
    Index2 base;
    std::array<Vec3, 4> corners;

    std::array<double, 4> edges() const {
        std::array<double, 4> e;
        for (int i = 0; i < 4; ++i) e[i] = distance(corners[i], corners[(i + 1) % 4]);
        return e;
    }
    // |AB| + |CD| - |BC| - |DA|
    double edge_sum_defect() const {
        const auto e = edges();
        return e[0] + e[2] - e[1] - e[3];
    }
    double diameter() const {
        double d = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) d = std::max(d, distance(corners[i], corners[j]));
        return d;
    }
};

inline std::array<Index2, 4> quad_indices(const Index2& b) {
    return {Index2{b.first, b.second}, Index2{b.first + 1, b.second}, Index2{b.first + 1, b.second + 1},
            Index2{b.first, b.second + 1}};
}

// Quads whose four corners exist and which do not straddle a pole.
inline std::vector<GridQuad> ac_quads(const ACGrid& g) {
    std::vector<GridQuad> out;
    for (int n1 = g.spec.lo[0]; n1 + 1 < g.spec.hi[0]; ++n1)
        for (int n3 = g.spec.lo[1]; n3 + 1 < g.spec.hi[1]; ++n3) {
            const auto idx = quad_indices({n1, n3});
            GridQuad q{{n1, n3}, {}};
            bool ok = true;
            for (int i = 0; i < 4 && ok; ++i) {
                const Vec3* p = g.find(idx[i].first, idx[i].second);
                if (!p || g.pole_between(idx[i], idx[(i + 1) % 4])) ok = false;
                else q.corners[i] = *p;
            }
            if (ok) out.push_back(q);
        }
    return out;
}

// Spheres centred at the corners touching along the edges: r_i + r_{i+1} = |edge i|.
// The system has rank 3; its solutions form the line particular + t * direction.
struct TouchingSpheres {
    Eigen::Vector4d particular;
    Eigen::Vector4d direction;
    int rank = 0;
    double consistency = 0.0;  // residual of the least-squares solution
};

inline TouchingSpheres touching_spheres(const GridQuad& q) {
    Eigen::Matrix4d A;
    A << 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1;
    const auto e = q.edges();
    const Eigen::Vector4d b(e[0], e[1], e[2], e[3]);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
    TouchingSpheres t;
    t.rank = static_cast<int>(lu.rank());
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix4d> cod(A);
    t.particular = cod.solve(b);
    t.direction = lu.kernel().col(0).normalized();
    t.consistency = (A * t.particular - b).norm();
    return t;
}

// Edge lengths keyed by (first corner, second corner) along the asymptotic lines.
inline std::map<std::pair<Index2, Index2>, double> asymptotic_edge_lengths(const ACGrid& g) {
    std::map<std::pair<Index2, Index2>, double> out;
    for (const auto& c : g.lines)
        for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
            out[{c.vertices[i], c.vertices[i + 1]}] =
                distance(g.vertices.at(c.vertices[i]), g.vertices.at(c.vertices[i + 1]));
    return out;
}

// Largest change of a shared asymptotic edge length between two grids.
inline double isometry_defect(const ACGrid& a, const ACGrid& b) {
    const auto la = asymptotic_edge_lengths(a), lb = asymptotic_edge_lengths(b);
    double worst = 0.0;
    for (const auto& [k, v] : la) {
        auto it = lb.find(k);
        if (it != lb.end()) worst = std::max(worst, std::abs(v - it->second));
    }
    return worst;
}

// Cross distances between corresponding points on two confocal hyperboloids:
// | |P Q'| - |Q P'| | over vertex pairs within each quad.
inline double ivory_defect(const ACGrid& a, const ACGrid& b) {
    double worst = 0.0;
    for (const auto& q : ac_quads(a)) {
        const auto idx = quad_indices(q.base);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                const Vec3* pb = b.find(idx[i].first, idx[i].second);
                const Vec3* qb = b.find(idx[j].first, idx[j].second);
                if (!pb || !qb) continue;
                const double d1 = distance(q.corners[i], *qb), d2 = distance(q.corners[j], *pb);
                worst = std::max(worst, std::abs(d1 - d2));
            }
    }
    return worst;
}

// Planar incircular net in one coordinate plane.
enum class PlanarFrame { XY, XZ, ZY };

inline Vec2 project(PlanarFrame f, Vec3 p) {
    switch (f) {
        case PlanarFrame::XY: return {p.x, p.y};
        case PlanarFrame::XZ: return {p.x, p.z};
        default: return {p.z, p.y};
    }
}

inline const char* frame_name(PlanarFrame f) {
    switch (f) {
        case PlanarFrame::XY: return "xy";
        case PlanarFrame::XZ: return "xz";
        default: return "zy";
    }
}

struct ICQuad {
    Index2 base;
    std::array<Vec2, 4> corners;
    OrientedCircle2D incircle;
    double residual = 0.0;        // incircle contact residual, relative to max(1, diameter)
    double corner_defect = 0.0;   // distance of line intersections from the sampled corners
    double label_defect = 0.0;    // opposite corners on a common confocal conic
};

struct ICNet {
    PlanarFrame frame = PlanarFrame::XY;
    double conic_a = 1.0, conic_b = 1.0;  // focal conic x^2/A + y^2/B = 1 in frame coordinates
    std::map<Index2, Vec2> vertices;
    std::map<int, OrientedLine2D> lines_l;  // fixed n1
    std::map<int, OrientedLine2D> lines_m;  // fixed n3
    std::vector<ICQuad> quads;
    std::vector<std::string> rejected;  // quads that failed the incircle construction
    std::vector<Index2> folded;         // quads straddling the fold onto the focal conic

    double max_tangency_residual() const {
        double r = 0.0;
        for (const auto* fam : {&lines_l, &lines_m})
            for (const auto& [k, l] : *fam) r = std::max(r, conic_tangency_residual(l, conic_a, conic_b));
        return r;
    }
};

enum class ICLimit { Ellipse, Hyperbola };

namespace detail {

inline std::optional<OrientedLine2D> line_through_chain(const std::map<Index2, Vec2>& verts,
                                                        const std::vector<Index2>& seq) {
    const Vec2* best_a = nullptr;
    const Vec2* best_b = nullptr;
    double far = 0.0;
    std::vector<const Vec2*> pts;
    for (const auto& i : seq) {
        auto it = verts.find(i);
        if (it != verts.end()) pts.push_back(&it->second);
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (distance(*pts[i], *pts[j]) > far) far = distance(*pts[i], *pts[j]), best_a = pts[i], best_b = pts[j];
    if (!best_a) return std::nullopt;
    return OrientedLine2D::through(*best_a, *best_b);
}

}  // namespace detail

// Planar limit of the AC grid: u2 -> -c gives an IC-net in z = 0 tangent to an
// ellipse, u2 -> -b one in y = 0 tangent to a hyperbola.
inline ICNet planar_limit_ic(const ConfocalSystem& sys, const GridSpec& spec, ICLimit which,
                             double tol = 1e-8) {
    const double u2 = which == ICLimit::Ellipse ? -sys.c : -sys.b;
    const ACGrid g = build_ac_grid(sys, u2, spec);
    ICNet net;
    net.frame = which == ICLimit::Ellipse ? PlanarFrame::XY : PlanarFrame::XZ;
    if (which == ICLimit::Ellipse) {
        net.conic_a = sys.a - sys.c;
        net.conic_b = sys.b - sys.c;
    } else {
        net.conic_a = sys.a - sys.b;
        net.conic_b = -(sys.b - sys.c);
    }
    for (const auto& [k, p] : g.vertices) net.vertices[k] = project(net.frame, p);
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) {
        std::vector<Index2> seq;
        for (int n3 = spec.lo[1]; n3 < spec.hi[1]; ++n3) seq.push_back({n1, n3});
        if (auto l = detail::line_through_chain(net.vertices, seq)) net.lines_l[n1] = *l;
    }
    for (int n3 = spec.lo[1]; n3 < spec.hi[1]; ++n3) {
        std::vector<Index2> seq;
        for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) seq.push_back({n1, n3});
        if (auto l = detail::line_through_chain(net.vertices, seq)) net.lines_m[n3] = *l;
    }
    // labels of the planar confocal conics in the frame
    const double p = sys.a, q = which == ICLimit::Ellipse ? sys.b : sys.c;
    // The flattened hyperboloid covers the plane twice; the sheets meet along the
    // focal conic at s3 = K mod 2K (ellipse) or s1 = K mod 2K (hyperbola).
    const double K = sys.m1.kk;
    auto fold_of = [&](const Index2& i) {
        const SParams s = g.params(i.first, i.second);
        return ((which == ICLimit::Ellipse ? s.s3 : s.s1) - K) / (2.0 * K);
    };
    for (const auto& gq : ac_quads(g)) {
        const auto [n1, n3] = gq.base;
        double flo = 1e300, fhi = -1e300;
        for (const auto& i : quad_indices(gq.base)) flo = std::min(flo, fold_of(i)), fhi = std::max(fhi, fold_of(i));
        if (std::floor(flo) != std::floor(fhi) && std::ceil(flo) != std::ceil(fhi)) {
            net.folded.push_back(gq.base);
            continue;
        }
        ICQuad iq;
        iq.base = gq.base;
        for (int i = 0; i < 4; ++i) iq.corners[i] = project(net.frame, gq.corners[i]);
        Vec2 centroid{0, 0};
        for (const auto& c : iq.corners) centroid = centroid + 0.25 * c;
        const std::array<OrientedLine2D, 4> sides =
            orient_outward({net.lines_m.at(n3), net.lines_l.at(n1 + 1), net.lines_m.at(n3 + 1), net.lines_l.at(n1)},
                           centroid);
        try {
            const IncircleResult r = incircle_of_quad(sides, tol);
            iq.incircle = r.circle;
            iq.residual = r.residual / std::max(1.0, r.diameter);
        } catch (const NoIncircle& e) {
            net.rejected.push_back("quad (" + std::to_string(n1) + "," + std::to_string(n3) + "): " + e.what());
            continue;
        }
        const auto sc = quad_corners(sides);
        for (int i = 0; i < 4; ++i) {
            // side i meets side i+1 at corner i+1
            iq.corner_defect = std::max(iq.corner_defect, distance(sc[i], iq.corners[(i + 1) % 4]));
        }
        iq.corner_defect /= std::max(1.0, detail::quad_diameter(iq.corners));
        std::array<std::array<double, 2>, 4> lab;
        for (int i = 0; i < 4; ++i) lab[i] = planar_conic_labels(p, q, iq.corners[i]);
        // corners 0,2 share s3 (second label), corners 1,3 share s1 (first label)
        iq.label_defect = std::max(std::abs(lab[0][1] - lab[2][1]), std::abs(lab[1][0] - lab[3][0]));
        net.quads.push_back(iq);
    }
    return net;
}

}  // namespace cnets
