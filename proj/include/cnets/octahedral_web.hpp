#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "confocal.hpp"
#include "geom.hpp"
#include "grid_spec.hpp"

namespace cnets {

// Web surface s1 + sign2 s2 + sign3 s3 = value.
struct WebFamily {
    int sign2 = 1, sign3 = 1;

    double level(const SParams& s) const { return s.s1 + sign2 * s.s2 + sign3 * s.s3; }
    friend bool operator==(const WebFamily&, const WebFamily&) = default;
};

inline constexpr std::array<WebFamily, 4> kWebFamilies{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

// Samples of a web surface over (s2, s3) = spec.params(n, n'); s1 follows.
inline std::vector<SurfaceSample> characteristic_web_sampler(const ConfocalSystem& sys, WebFamily fam, double value,
                                                             const GridSpec& spec, Octant o = {}) {
    spec.validate();
    std::vector<SurfaceSample> out;
    for (int n = spec.lo[0]; n < spec.hi[0]; ++n)
        for (int np = spec.lo[1]; np < spec.hi[1]; ++np) {
            const auto p = spec.params(n, np);
            const SParams s{value - fam.sign2 * p[0] - fam.sign3 * p[1], p[0], p[1]};
            try {
                out.push_back(point_from_s(sys, s, o));
            } catch (const PoleError&) {
            }
        }
    return out;
}

// Two web surfaces meet on a coordinate quadric: the returned index is the
// s-coordinate held fixed (1: u2 hyperboloid, 2: u3 ellipsoid, 0: u1 two-sheeted).
struct WebIntersection {
    int fixed = 0;
    double fixed_value = 0.0;
    SParams through;  // a point of the common curve
    SParams direction;  // parameter direction of the curve
};

inline WebIntersection intersect_web(WebFamily fa, double ca, WebFamily fb, double cb) {
    if (fa == fb) throw std::invalid_argument("web surfaces of one family do not meet");
    WebIntersection w;
    if (fa.sign3 == fb.sign3) {
        // differ in sign2: s2 fixed
        w.fixed = 1;
        w.fixed_value = (ca - cb) / (fa.sign2 - fb.sign2);
        w.through = {ca - fa.sign2 * w.fixed_value, w.fixed_value, 0.0};
        w.direction = {-static_cast<double>(fa.sign3), 0.0, 1.0};
    } else if (fa.sign2 == fb.sign2) {
        w.fixed = 2;
        w.fixed_value = (ca - cb) / (fa.sign3 - fb.sign3);
        w.through = {ca - fa.sign3 * w.fixed_value, 0.0, w.fixed_value};
        w.direction = {-static_cast<double>(fa.sign2), 1.0, 0.0};
    } else {
        // s1 + e2 s2 + e3 s3 = ca and s1 - e2 s2 - e3 s3 = cb
        w.fixed = 0;
        w.fixed_value = 0.5 * (ca + cb);
        w.through = {w.fixed_value, 0.5 * (ca - cb) / fa.sign2, 0.0};
        w.direction = {0.0, 1.0, -static_cast<double>(fa.sign2 * fa.sign3)};
    }
    return w;
}

// Normal curvatures of the quadric u_{fixed+1} in the parameter directions (1, 1) and (1, -1).
inline std::array<double, 2> diagonal_normal_curvatures(const ConfocalSystem& sys, const SParams& s, int fixed,
                                                        Octant o = {}) {
    const FundamentalForm I = first_fundamental_form(sys, s, fixed, o);
    const FundamentalForm II = second_fundamental_form(sys, s, fixed, o);
    auto kappa = [&](double di, double dk) {
        return (II.e * di * di + 2 * II.f * di * dk + II.g * dk * dk) /
               (I.e * di * di + 2 * I.f * di * dk + I.g * dk * dk);
    };
    return {kappa(1, 1), kappa(1, -1)};
}

struct OctaVertex {
    int axis = 0;  // parameter direction
    int sign = 1;  // +delta or -delta
    SParams s;
    Vec3 pos;
};

struct OctaEdge {
    int from = 0, to = 0;  // vertex indices
    int fixed = 0;         // s-coordinate constant along the edge
};

struct OctaFace {
    std::array<int, 3> vertices{};
    std::array<int, 3> signs{};  // (sigma1, sigma2, sigma3)
    WebFamily family;            // normalized so the s1 coefficient is +1
    double level = 0.0;
};

struct Octahedron3D {
    ConfocalSystem sys;
    SParams center;
    double delta = 0.0;
    std::array<OctaVertex, 6> vertices;  // index 2*axis + (sign < 0)
    std::vector<OctaEdge> edges;         // 12
    std::vector<OctaFace> faces;         // 8
    std::array<std::array<int, 2>, 3> diagonals{};  // opposite vertex pairs: curvature lines

    SParams edge_point(const OctaEdge& e, double t) const {
        const SParams& a = vertices[e.from].s;
        const SParams& b = vertices[e.to].s;
        return {a.s1 + t * (b.s1 - a.s1), a.s2 + t * (b.s2 - a.s2), a.s3 + t * (b.s3 - a.s3)};
    }
};

inline int octa_index(int axis, int sign) { return 2 * axis + (sign < 0 ? 1 : 0); }

inline Octahedron3D octahedron_3d(const ConfocalSystem& sys, const SParams& center, double delta, Octant o = {}) {
    if (!(delta > 0.0)) throw std::invalid_argument("octahedron delta must be positive");
    Octahedron3D oct;
    oct.sys = sys;
    oct.center = center;
    oct.delta = delta;
    for (int axis = 0; axis < 3; ++axis)
        for (int sign : {1, -1}) {
            OctaVertex v{axis, sign, center, {}};
            v.s[axis] += sign * delta;
            v.pos = point_from_s(sys, v.s, o).pos;
            oct.vertices[octa_index(axis, sign)] = v;
        }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (int si : {1, -1})
                for (int sj : {1, -1}) oct.edges.push_back({octa_index(i, si), octa_index(j, sj), 3 - i - j});
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (int s3 : {1, -1}) {
                OctaFace f;
                f.signs = {s1, s2, s3};
                f.vertices = {octa_index(0, s1), octa_index(1, s2), octa_index(2, s3)};
                // sigma . s = sigma . center + delta on all three vertices
                f.family = {s1 * s2, s1 * s3};
                f.level = s1 * (s1 * center.s1 + s2 * center.s2 + s3 * center.s3 + delta);
                oct.faces.push_back(f);
            }
    for (int axis = 0; axis < 3; ++axis) oct.diagonals[axis] = {octa_index(axis, 1), octa_index(axis, -1)};
    return oct;
}

namespace detail {

// Move along the parameter segment from -> from + dir * t and stop where the
// geometric label of quadric `label` (recomputed from the 3D position) hits target.
inline Vec3 walk_to_label(const ConfocalSystem& sys, const SParams& from, const SParams& dir, int label, double target,
                          double t_lo, double t_hi, Octant o) {
    auto at = [&](double t) {
        return point_from_s(sys, {from.s1 + t * dir.s1, from.s2 + t * dir.s2, from.s3 + t * dir.s3}, o).pos;
    };
    auto f = [&](double t) { return confocal_coordinates(sys, at(t))[label] - target; };
    const double flo = f(t_lo), fhi = f(t_hi);
    if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0)
        throw GeometryError("closure walk: target label not bracketed");
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, t_lo, t_hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    return at(0.5 * (r.first + r.second));
}

}  // namespace detail

// Triangular closure on one face. From the vertex on the curvature line with
// s_i, s_k fixed, walk along the web lines on quadrics i and k until the
// third label reaches its value at the face; from the first landing point walk
// along the web line on quadric l until label k matches the second landing
// point. Returns the distance between the end point and the second landing.
struct ClosureResult {
    Vec3 start, first, second, end;
    double residual = 0.0;
};

inline ClosureResult triangular_closure(const Octahedron3D& oct, const OctaFace& face, Octant o = {}) {
    const ConfocalSystem& sys = oct.sys;
    const OctaVertex& P = oct.vertices[face.vertices[2]];  // on the s3 axis: s1, s2 at center values
    const OctaVertex& Q = oct.vertices[face.vertices[1]];  // s1, s3 at center values
    const OctaVertex& R = oct.vertices[face.vertices[0]];  // s2, s3 at center values
    const ConfocalParams target = u_from_s(sys, oct.center);
    auto diff = [](const SParams& a, const SParams& b) { return SParams{b.s1 - a.s1, b.s2 - a.s2, b.s3 - a.s3}; };
    ClosureResult c;
    c.start = P.pos;
    // along quadric u1 (s1 fixed) until u3 = target
    c.first = detail::walk_to_label(sys, P.s, diff(P.s, Q.s), 2, target.u3, 0.5, 1.3, o);
    // along quadric u2 (s2 fixed) until u3 = target
    c.second = detail::walk_to_label(sys, P.s, diff(P.s, R.s), 2, target.u3, 0.5, 1.3, o);
    // restart from the first landing using only its geometric labels
    const SParams q = s_from_u(sys, confocal_coordinates(sys, c.first));
    const ConfocalParams second_labels = confocal_coordinates(sys, c.second);
    c.end = detail::walk_to_label(sys, q, diff(Q.s, R.s), 1, second_labels.u2, 0.5, 1.3, o);
    c.residual = distance(c.end, c.second);
    return c;
}

// Octahedra with all vertices inside the principal parameter box, where every
// label is monotone in its parameter.
inline bool inside_principal_box(const ConfocalSystem& sys, const SParams& center, double delta, double margin) {
    const double K[3] = {sys.m1.kk, sys.m2.kk, sys.m1.kk};
    for (int i = 0; i < 3; ++i)
        if (center[i] - delta < margin || center[i] + delta > K[i] - margin) return false;
    return true;
}

}  // namespace cnets
