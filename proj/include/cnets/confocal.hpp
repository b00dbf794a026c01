#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "elliptic.hpp"
#include "geom.hpp"

namespace cnets {

// Confocal family x^2/(u+a) + y^2/(u+b) + z^2/(u+c) = 1 with a > b > c.
struct ConfocalSystem {
    double a = 3.0, b = 2.0, c = 0.0;
    Modulus m1;  // k1^2 = (a-b)/(a-c)
    Modulus m2;  // k2^2 = (b-c)/(a-c)

    ConfocalSystem() : ConfocalSystem(3.0, 2.0, 0.0) {}
    ConfocalSystem(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
        if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c)))
            throw std::invalid_argument("confocal system: parameters must be finite");
        if (!(a > b && b > c))
            throw std::invalid_argument("confocal system: need a > b > c, got a=" + std::to_string(a) +
                                        " b=" + std::to_string(b) + " c=" + std::to_string(c));
        m1 = Modulus(std::sqrt((a - b) / (a - c)));
        m2 = Modulus(std::sqrt((b - c) / (a - c)));
    }
    double scale() const { return std::sqrt(a - c); }
};

struct SParams {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;

    double operator[](int i) const { return i == 0 ? s1 : (i == 1 ? s2 : s3); }
    double& operator[](int i) { return i == 0 ? s1 : (i == 1 ? s2 : s3); }
    friend bool operator==(const SParams&, const SParams&) = default;
};

struct ConfocalParams {
    double u1 = 0.0, u2 = 0.0, u3 = 0.0;

    double operator[](int i) const { return i == 0 ? u1 : (i == 1 ? u2 : u3); }
};

// Sign of each coordinate; the parametrization covers one octant at a time.
struct Octant {
    int sx = 1, sy = 1, sz = 1;
};

struct SurfaceSample {
    SParams s;
    ConfocalParams u;
    Vec3 pos;
};

inline constexpr double kInterleaveTol = 1e-12;

// Closed interleaving: boundary labels occur at the quarter periods.
inline bool interleaved(const ConfocalSystem& sys, const ConfocalParams& u, double tol = kInterleaveTol) {
    const double t = tol * (1.0 + std::abs(sys.a) + std::abs(sys.c));
    return u.u1 >= -sys.a - t && u.u1 <= -sys.b + t && u.u2 >= -sys.b - t && u.u2 <= -sys.c + t &&
           u.u3 >= -sys.c - t;
}

inline ConfocalParams u_from_s(const ConfocalSystem& sys, const SParams& s) {
    const JacobiTriple t1 = jacobi(s.s1, sys.m1);
    const JacobiTriple t2 = jacobi(s.s2, sys.m2);
    const double ns3 = jacobi_quotient(Quotient::ns, s.s3, sys.m1);
    ConfocalParams u;
    u.u1 = (sys.a - sys.b) * t1.sn * t1.sn - sys.a;
    u.u2 = -sys.c - (sys.b - sys.c) * t2.sn * t2.sn;
    u.u3 = (sys.a - sys.c) * ns3 * ns3 - sys.a;
    return u;
}

// Inverse of u_from_s on the principal branch s1, s3 in [0, K(k1)], s2 in [0, K(k2)].
inline SParams s_from_u(const ConfocalSystem& sys, const ConfocalParams& u) {
    auto unit = [](double t) { return std::sqrt(std::clamp(t, 0.0, 1.0)); };
    return {arcsn(unit((u.u1 + sys.a) / (sys.a - sys.b)), sys.m1.k),
            arcsn(unit((-sys.c - u.u2) / (sys.b - sys.c)), sys.m2.k),
            arcsn(unit((sys.a - sys.c) / (u.u3 + sys.a)), sys.m1.k)};
}

inline SurfaceSample point_from_s(const ConfocalSystem& sys, const SParams& s, Octant o = {}) {
    const JacobiTriple t1 = jacobi(s.s1, sys.m1);
    const JacobiTriple t2 = jacobi(s.s2, sys.m2);
    const JacobiTriple t3 = jacobi(s.s3, sys.m1);
    const double ns3 = quotient_of(Quotient::ns, t3, sys.m1.k, s.s3);
    const double ds3 = t3.dn * ns3;
    const double cs3 = t3.cn * ns3;
    const double R = sys.scale();
    SurfaceSample out;
    out.s = s;
    out.pos = {o.sx * R * t1.sn * t2.dn * ns3, o.sy * R * t1.cn * t2.cn * ds3,
               o.sz * R * t1.dn * t2.sn * cs3};
    out.u.u1 = (sys.a - sys.b) * t1.sn * t1.sn - sys.a;
    out.u.u2 = -sys.c - (sys.b - sys.c) * t2.sn * t2.sn;
    out.u.u3 = (sys.a - sys.c) * ns3 * ns3 - sys.a;
    return out;
}

// |x^2/(u+a) + y^2/(u+b) + z^2/(u+c) - 1|; terms with a vanishing
// denominator are skipped (their numerator vanishes with it).
inline double quadric_residual(const ConfocalSystem& sys, Vec3 p, double u) {
    const double den[3] = {u + sys.a, u + sys.b, u + sys.c};
    const double num[3] = {p.x * p.x, p.y * p.y, p.z * p.z};
    double sum = -1.0;
    for (int i = 0; i < 3; ++i)
        if (std::abs(den[i]) > 1e-12) sum += num[i] / den[i];
    return std::abs(sum);
}

// Product form of the coordinates: x^2 (a-b)(a-c) = (u1+a)(u2+a)(u3+a), etc.
inline std::array<double, 3> product_residuals(const ConfocalSystem& sys, Vec3 p, const ConfocalParams& u) {
    const double a = sys.a, b = sys.b, c = sys.c;
    return {std::abs(p.x * p.x - (u.u1 + a) * (u.u2 + a) * (u.u3 + a) / ((a - b) * (a - c))),
            std::abs(p.y * p.y - (u.u1 + b) * (u.u2 + b) * (u.u3 + b) / ((b - a) * (b - c))),
            std::abs(p.z * p.z - (u.u1 + c) * (u.u2 + c) * (u.u3 + c) / ((c - a) * (c - b)))};
}

// Labels of the three confocal quadrics through a point: the roots of
// (u+a)(u+b)(u+c) - x^2(u+b)(u+c) - y^2(u+a)(u+c) - z^2(u+a)(u+b).
inline ConfocalParams confocal_coordinates(const ConfocalSystem& sys, Vec3 p) {
    const double a = sys.a, b = sys.b, c = sys.c;
    const double x2 = p.x * p.x, y2 = p.y * p.y, z2 = p.z * p.z;
    auto P = [&](double u) {
        return (u + a) * (u + b) * (u + c) - x2 * (u + b) * (u + c) - y2 * (u + a) * (u + c) -
               z2 * (u + a) * (u + b);
    };
    auto root = [&](double lo, double hi) {
        const double flo = P(lo), fhi = P(hi);
        if (flo == 0.0) return lo;
        if (fhi == 0.0) return hi;
        if ((flo > 0.0) == (fhi > 0.0)) return std::abs(flo) < std::abs(fhi) ? lo : hi;
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(P, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
        return 0.5 * (r.first + r.second);
    };
    const double top = -c + 1.0 + x2 + y2 + z2;  // P(top) > 0
    return {root(-a, -b), root(-b, -c), root(-c, top)};
}

namespace detail {

// Richardson-extrapolated central difference of f along parameter j.
template <class F>
auto central_diff(F&& f, SParams s, int j, double h) {
    auto step = [&](double hh) {
        SParams sp = s, sm = s;
        sp[j] += hh;
        sm[j] -= hh;
        return (f(sp) - f(sm)) / (2.0 * hh);
    };
    const auto d1 = step(h);
    const auto d2 = step(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

inline std::array<int, 2> surface_params(int fixed) {
    switch (fixed) {
        case 0: return {1, 2};
        case 1: return {0, 2};
        case 2: return {0, 1};
        default: throw std::invalid_argument("surface index must be 0, 1 or 2");
    }
}

}  // namespace detail

inline constexpr double kDiffStep = 1e-5;

// Unit normal of the coordinate quadric with label index `fixed` (0 for u1).
inline Vec3 quadric_normal(const ConfocalSystem& sys, const SParams& s, int fixed, Octant o = {}) {
    const SurfaceSample p = point_from_s(sys, s, o);
    const double u = p.u[fixed];
    const double da = u + sys.a, db = u + sys.b, dc = u + sys.c;
    const Vec3 g{p.pos.x / da, p.pos.y / db, p.pos.z / dc};
    const double n = norm(g);
    if (!(n > 1e-10) || !is_finite(g)) throw DegenerateConfiguration("degenerate quadric normal");
    return g / n;
}

struct FundamentalForm {
    double e = 0.0, f = 0.0, g = 0.0;
};

// First fundamental form of the quadric u_{fixed+1} = const in its two free parameters.
inline FundamentalForm first_fundamental_form(const ConfocalSystem& sys, const SParams& s, int fixed,
                                              Octant o = {}) {
    const auto [i, k] = detail::surface_params(fixed);
    auto pos = [&](const SParams& q) { return point_from_s(sys, q, o).pos; };
    const Vec3 ri = detail::central_diff(pos, s, i, kDiffStep);
    const Vec3 rk = detail::central_diff(pos, s, k, kDiffStep);
    return {dot(ri, ri), dot(ri, rk), dot(rk, rk)};
}

// II = -dr.dN of the quadric u_{fixed+1} = const, by finite differences.
inline FundamentalForm second_fundamental_form(const ConfocalSystem& sys, const SParams& s, int fixed,
                                               Octant o = {}) {
    const auto [i, k] = detail::surface_params(fixed);
    auto pos = [&](const SParams& q) { return point_from_s(sys, q, o).pos; };
    const Vec3 rl = detail::central_diff(pos, s, fixed, kDiffStep);
    if (norm(rl) < 1e-10) throw DegenerateConfiguration("transversal derivative vanishes: degenerate normal");
    // the normal formula needs the label of the fixed surface, which stays constant along i, k
    auto nrm = [&](const SParams& q) { return quadric_normal(sys, q, fixed, o); };
    const Vec3 ri = detail::central_diff(pos, s, i, kDiffStep);
    const Vec3 rk = detail::central_diff(pos, s, k, kDiffStep);
    const Vec3 ni = detail::central_diff(nrm, s, i, kDiffStep);
    const Vec3 nk = detail::central_diff(nrm, s, k, kDiffStep);
    return {-dot(ri, ni), -0.5 * (dot(ri, nk) + dot(rk, ni)), -dot(rk, nk)};
}

// Residuals |U1 - 1/(a-c)|, |U2 + 1/(a-c)|, |U3 - 1/(a-c)| with
// U_i = u_i'^2 / (4 (u_i+a)(u_i+b)(u_i+c)).
inline std::array<double, 3> factor_ratio_check(const ConfocalSystem& sys, const SParams& s) {
    const ConfocalParams u = u_from_s(sys, s);
    const double target = 1.0 / (sys.a - sys.c);
    std::array<double, 3> res{};
    for (int i = 0; i < 3; ++i) {
        auto ui = [&](const SParams& q) { return u_from_s(sys, q)[i]; };
        const double du = detail::central_diff(ui, s, i, kDiffStep);
        const double prod = (u[i] + sys.a) * (u[i] + sys.b) * (u[i] + sys.c);
        const double U = 0.25 * du * du / prod;
        res[i] = std::abs(U - (i == 1 ? -target : target));
    }
    return res;
}

// Planar confocal conics x^2/(a-c) + y^2/(b-c) = 1 family, privileged parameters.
inline Vec2 planar_confocal_2d(const ConfocalSystem& sys, double s1, double s3) {
    const JacobiTriple t1 = jacobi(s1, sys.m1);
    const JacobiTriple t3 = jacobi(s3, sys.m1);
    const double ns3 = quotient_of(Quotient::ns, t3, sys.m1.k, s3);
    const double R = sys.scale();
    return {R * t1.sn * ns3, R * t1.cn * t3.dn * ns3};
}

// How far the line n.p = c is from touching x^2/A + y^2/B = 1 (A or B may be
// negative for a hyperbola): |A nx^2 + B ny^2 - c^2|.
inline double conic_tangency_residual(const OrientedLine2D& l, double A, double B) {
    return std::abs(A * l.n.x * l.n.x + B * l.n.y * l.n.y - l.c * l.c);
}

// Labels of the two conics x^2/(u+p) + y^2/(u+q) = 1 (p > q) through a point.
inline std::array<double, 2> planar_conic_labels(double p, double q, Vec2 pt) {
    const double B = p + q - pt.x * pt.x - pt.y * pt.y;
    const double C = p * q - pt.x * pt.x * q - pt.y * pt.y * p;
    const double disc = std::sqrt(std::max(0.0, B * B - 4.0 * C));
    // numerically stable pair of roots
    const double r1 = B >= 0.0 ? -0.5 * (B + disc) : -0.5 * (B - disc);
    const double r2 = r1 != 0.0 ? C / r1 : 0.0;
    return r1 < r2 ? std::array<double, 2>{r1, r2} : std::array<double, 2>{r2, r1};
}

}  // namespace cnets
