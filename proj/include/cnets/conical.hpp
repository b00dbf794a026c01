#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geom.hpp"
#include "minkowski.hpp"

namespace cnets {

// Blaschke cylinder: oriented plane (v, d) with |v| = 1 as a point of R^4.
struct BlaschkePoint {
    Eigen::Vector4d x = Eigen::Vector4d::Zero();
};

inline BlaschkePoint blaschke_lift(const OrientedPlane& p) {
    if (std::abs(norm(p.v) - 1.0) > 1e-12) throw std::invalid_argument("plane normal is not a unit vector");
    return {lift(p)};
}

inline OrientedPlane blaschke_drop(const BlaschkePoint& b) {
    const Vec3 v{b.x[0], b.x[1], b.x[2]};
    if (std::abs(norm(v) - 1.0) > 1e-12) throw std::invalid_argument("point is off the Blaschke cylinder");
    return {v, b.x[3]};
}

struct ConicalVertex {
    bool conical = false;
    double residual = 0.0;       // coplanarity defect of the four lifts
    double concurrency = 0.0;
    Vec3 point;
};

inline ConicalVertex is_conical_vertex(const std::array<OrientedPlane, 4>& planes, double tol = 1e-9) {
    const ConcurrencyResult c = common_point(planes);
    const double scale = std::max(1.0, norm(c.point));
    if (c.residual > 1e-9 * scale)
        throw NonConcurrent("vertex planes miss their common point by " + std::to_string(c.residual));
    std::array<Eigen::Vector4d, 4> lifts;
    for (int i = 0; i < 4; ++i) lifts[i] = lift(planes[i]);
    ConicalVertex out;
    out.point = c.point;
    out.concurrency = c.residual / scale;
    out.residual = affine_rank2_defect(lifts);
    out.conical = out.residual < tol;
    return out;
}

// Octahedron of the lattice: face (family m in 1..4, side s = +-1) lies on
// r_m . p = r_m . center + s and is stored at 2 (m - 1) + (s < 0).
// Vertex (axis i, sign e) = center + e e_i lies on the faces with s = e r_m[i].
inline constexpr std::array<std::array<int, 3>, 4> kFamilyRows{{{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}}};

inline constexpr int face_index(int family, int side) { return 2 * (family - 1) + (side < 0 ? 1 : 0); }
inline constexpr int face_family(int f) { return f / 2 + 1; }
inline constexpr int face_side(int f) { return f % 2 == 0 ? 1 : -1; }

inline std::array<int, 4> vertex_faces(int axis, int sign) {
    std::array<int, 4> out{};
    for (int m = 1; m <= 4; ++m) out[m - 1] = face_index(m, sign * kFamilyRows[m - 1][axis]);
    return out;
}

// Vertices (axis, sign) incident to a face.
inline std::array<std::pair<int, int>, 3> face_vertices(int f) {
    const int m = face_family(f), s = face_side(f);
    std::array<std::pair<int, int>, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = {i, s * kFamilyRows[m - 1][i]};
    return out;
}

struct OrientedOctahedron {
    std::array<OrientedPlane, 8> planes;

    std::array<OrientedPlane, 4> vertex_planes(int axis, int sign) const {
        const auto f = vertex_faces(axis, sign);
        return {planes[f[0]], planes[f[1]], planes[f[2]], planes[f[3]]};
    }
    Vec3 vertex(int axis, int sign) const {
        const auto P = vertex_planes(axis, sign);
        return common_point(P).point;
    }
    // Worst coplanarity defect over the six vertices; throws if a vertex is not concurrent.
    double conical_residual() const {
        double r = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int e : {1, -1}) r = std::max(r, is_conical_vertex(vertex_planes(i, e), 1.0).residual);
        return r;
    }
};

using Lattice3 = std::array<int, 3>;

inline int lattice_level(int family, const Lattice3& p) {
    const auto& r = kFamilyRows[family - 1];
    return r[0] * p[0] + r[1] * p[1] + r[2] * p[2];
}

// Plane index (family, n) of face f of the octahedron centered at q (odd coordinate sum).
inline std::pair<int, int> face_plane_key(const Lattice3& q, int f) {
    return {face_family(f), (lattice_level(face_family(f), q) + face_side(f)) / 2};
}

inline bool is_octahedron_center(const Lattice3& q) { return ((q[0] + q[1] + q[2]) % 2 + 2) % 2 == 1; }

struct CompletionResult {
    OrientedPlane plane;
    bool flipped = false;
    double cylinder_defect = 0.0;  // | |v| - 1 | of the linear solution
    double conditioning = 0.0;     // smallest / largest singular value of the face system
};

// Eighth plane of a conical octahedron from the other seven: the Blaschke
// lifts form a combinatorial cuboid with planar faces, so the missing lift
// is the common point of the three faces through it.
inline CompletionResult complete_octahedron(const std::array<OrientedPlane, 8>& planes, int missing,
                                            double tol = 1e-8) {
    if (missing < 0 || missing >= 8) throw std::invalid_argument("missing face index must be 0..7");
    const OrientedOctahedron oct{planes};
    const auto incident = face_vertices(missing);
    // the three vertices away from the missing face carry the precondition
    for (const auto& [axis, sign] : incident) {
        const auto P = oct.vertex_planes(axis, -sign);
        const ConicalVertex cv = is_conical_vertex(P, tol);
        if (!cv.conical)
            throw NotConical("input vertex is not conical (defect " + std::to_string(cv.residual) + ")");
    }
    Eigen::Matrix<double, 6, 4> A;
    Eigen::Matrix<double, 6, 1> b;
    int row = 0;
    for (const auto& [axis, sign] : incident) {
        std::array<Eigen::Vector4d, 3> pts;
        int k = 0;
        for (int f : vertex_faces(axis, sign))
            if (f != missing) pts[k++] = lift(planes[f]);
        Eigen::Matrix<double, 4, 2> D;
        D.col(0) = pts[1] - pts[0];
        D.col(1) = pts[2] - pts[0];
        Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(D, Eigen::ComputeFullU);
        if (svd.singularValues()[1] < 1e-12 * std::max(1.0, svd.singularValues()[0]))
            throw DegenerateConfiguration("three lifts of a cuboid face are collinear");
        // the face's affine 2-plane: orthogonal complement of its directions
        for (int c = 2; c < 4; ++c) {
            const Eigen::Vector4d nrm = svd.matrixU().col(c);
            A.row(row) = nrm.transpose();
            b[row] = nrm.dot(pts[0]);
            ++row;
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 4>> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    CompletionResult out;
    out.conditioning = sv[3] / sv[0];
    if (out.conditioning < 1e-10) throw DegenerateConfiguration("cuboid face system is rank deficient");
    const Eigen::Vector4d x = svd.solve(b);
    const Vec3 v{x[0], x[1], x[2]};
    out.cylinder_defect = std::abs(norm(v) - 1.0);
    if (out.cylinder_defect > tol)
        throw DegenerateConfiguration("completed lift leaves the Blaschke cylinder by " +
                                      std::to_string(out.cylinder_defect));
    out.plane = {v / norm(v), x[3] / norm(v)};
    // conical at the incident vertices, possibly only after reversing the new plane
    auto conical_with = [&](const OrientedPlane& p) {
        std::array<OrientedPlane, 8> full = planes;
        full[missing] = p;
        const OrientedOctahedron o{full};
        for (const auto& [axis, sign] : incident)
            if (!is_conical_vertex(o.vertex_planes(axis, sign), tol).conical) return false;
        return true;
    };
    if (!conical_with(out.plane)) {
        if (!conical_with(out.plane.flipped())) throw NotConical("completed octahedron is not conical");
        out.plane = out.plane.flipped();
        out.flipped = true;
    }
    return out;
}

struct ClosingConditionViolation : GeometryError {
    Lattice3 center{};
    double residual = 0.0;
    ClosingConditionViolation(const Lattice3& q, double r)
        : GeometryError("closing condition violated at octahedron (" + std::to_string(q[0]) + "," +
                        std::to_string(q[1]) + "," + std::to_string(q[2]) + "): residual " + std::to_string(r)),
          center(q),
          residual(r) {}
};

enum class Traversal { Ascending, Descending };

// Octahedron centers in the box lo..hi (inclusive); seed A sits at `seed`,
// seed B at seed + (1, 1, 0).
struct PropagationSpec {
    Lattice3 seed{1, 0, 0};
    Lattice3 lo{-1, -2, -2};
    Lattice3 hi{3, 2, 2};
    Traversal order = Traversal::Ascending;
    double tol = 1e-8;
};

inline constexpr Lattice3 kSeedOffset{1, 1, 0};

using PlaneKey = std::pair<int, int>;  // (family, n)

struct ConicalGrid {
    std::map<PlaneKey, OrientedPlane> planes;
    std::vector<Lattice3> octahedra;    // complete octahedra in the box
    std::vector<Lattice3> incomplete;   // box centers never reaching 8 planes
    std::vector<PlaneKey> completion_order;
    int flips = 0;
    double closure_residual = 0.0;      // re-derivation of every plane from the other seven
    double conical_residual = 0.0;
    double worst_conditioning = 1.0;

    std::optional<std::array<OrientedPlane, 8>> octahedron(const Lattice3& q) const {
        std::array<OrientedPlane, 8> out;
        for (int f = 0; f < 8; ++f) {
            const auto it = planes.find(face_plane_key(q, f));
            if (it == planes.end()) return std::nullopt;
            out[f] = it->second;
        }
        return out;
    }
};

inline std::vector<Lattice3> octahedron_centers(const Lattice3& lo, const Lattice3& hi, Traversal order) {
    std::vector<Lattice3> out;
    for (int i = lo[0]; i <= hi[0]; ++i)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int k = lo[2]; k <= hi[2]; ++k)
                if (is_octahedron_center({i, j, k})) out.push_back({i, j, k});
    if (order == Traversal::Descending) std::reverse(out.begin(), out.end());
    return out;
}

inline ConicalGrid propagate_grid(const OrientedOctahedron& a, const OrientedOctahedron& b, const PropagationSpec& spec) {
    if (!is_octahedron_center(spec.seed)) throw std::invalid_argument("seed center must have odd coordinate sum");
    for (int i = 0; i < 3; ++i)
        if (spec.lo[i] > spec.hi[i]) throw std::invalid_argument("empty propagation box");
    if (a.conical_residual() > spec.tol || b.conical_residual() > spec.tol)
        throw NotConical("seed octahedron is not conical");
    ConicalGrid g;
    const Lattice3 qa = spec.seed;
    const Lattice3 qb{qa[0] + kSeedOffset[0], qa[1] + kSeedOffset[1], qa[2] + kSeedOffset[2]};
    for (int f = 0; f < 8; ++f) g.planes[face_plane_key(qa, f)] = a.planes[f];
    for (int f = 0; f < 8; ++f) {
        const auto key = face_plane_key(qb, f);
        const auto it = g.planes.find(key);
        if (it == g.planes.end()) {
            g.planes[key] = b.planes[f];
        } else if (plane_distance(it->second, b.planes[f]) > spec.tol) {
            throw GeometryError("seed octahedra are not in oriented contact along an edge");
        }
    }
    if (g.planes.size() != 10) throw GeometryError("seed octahedra must share exactly six planes");

    const auto centers = octahedron_centers(spec.lo, spec.hi, spec.order);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& q : centers) {
            int known = 0, missing = -1;
            std::array<OrientedPlane, 8> P;
            for (int f = 0; f < 8; ++f) {
                const auto it = g.planes.find(face_plane_key(q, f));
                if (it == g.planes.end()) {
                    missing = f;
                } else {
                    P[f] = it->second;
                    ++known;
                }
            }
            if (known != 7) continue;
            const CompletionResult c = complete_octahedron(P, missing, spec.tol);
            g.flips += c.flipped;
            g.worst_conditioning = std::min(g.worst_conditioning, c.conditioning);
            g.planes[face_plane_key(q, missing)] = c.plane;
            g.completion_order.push_back(face_plane_key(q, missing));
            changed = true;
        }
    }
    // closing condition: every plane agrees with its re-derivation
    for (const auto& q : octahedron_centers(spec.lo, spec.hi, Traversal::Ascending)) {
        const auto P = g.octahedron(q);
        if (!P) {
            g.incomplete.push_back(q);
            continue;
        }
        g.octahedra.push_back(q);
        double worst = 0.0;
        for (int f = 0; f < 8; ++f)
            worst = std::max(worst, plane_distance(complete_octahedron(*P, f, spec.tol).plane, (*P)[f]));
        if (worst > spec.tol) throw ClosingConditionViolation(q, worst);
        g.closure_residual = std::max(g.closure_residual, worst);
        g.conical_residual = std::max(g.conical_residual, OrientedOctahedron{*P}.conical_residual());
    }
    return g;
}

// Common oriented sphere: v.c + r - beta d = 0 for all planes, (c, r, beta)
// the null vector. beta ~ 0 is the degenerate sphere (at infinity): then the
// planes satisfy v.c + r = 0, a fixed angle to the direction c.
struct SphereFit {
    Sphere sphere;
    bool degenerate = false;
    double residual = 0.0;
    double beta = 0.0;
    Vec3 direction;         // degenerate: unit c
    double offset = 0.0;    // degenerate: r / |c|
    double null_gap = 0.0;  // second smallest / largest singular value
};

inline SphereFit common_sphere(std::span<const OrientedPlane> planes, double degenerate_tol = 1e-8) {
    if (planes.size() < 5) throw DegenerateConfiguration("common sphere needs at least five planes");
    Eigen::MatrixXd A(planes.size(), 5);
    for (std::size_t i = 0; i < planes.size(); ++i)
        A.row(i) << planes[i].v.x, planes[i].v.y, planes[i].v.z, 1.0, -planes[i].d;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::VectorXd x = svd.matrixV().col(4);
    SphereFit out;
    out.null_gap = sv[3] / sv[0];
    const double cnorm = x.head<3>().norm();
    // scale-free test: beta against the other components
    out.beta = x[4] / std::max(cnorm, std::abs(x[3]));
    if (out.null_gap < 1e-10 || std::abs(out.beta) < degenerate_tol) {
        out.degenerate = true;
        if (cnorm < 1e-14) throw DegenerateConfiguration("planes admit no sphere, not even a degenerate one");
        out.direction = Vec3{x[0], x[1], x[2]} / cnorm;
        out.offset = x[3] / cnorm;
        for (const auto& p : planes) out.residual = std::max(out.residual, std::abs(dot(p.v, out.direction) + out.offset));
        return out;
    }
    out.sphere = {Vec3{x[0], x[1], x[2]} / x[4], x[3] / x[4]};
    for (const auto& p : planes) out.residual = std::max(out.residual, plane_tangent_to_sphere(p, out.sphere));
    return out;
}

inline SphereFit common_sphere(const ConicalGrid& g, double degenerate_tol = 1e-8) {
    std::vector<OrientedPlane> P;
    for (const auto& [k, p] : g.planes) P.push_back(p);
    return common_sphere(P, degenerate_tol);
}

// Laguerre map in the cyclographic model: sphere (c, r) -> L (c, r) + T with
// L preserving c.c - r^2. Planes follow through their null normal (v, -1).
struct LaguerreMap {
    Eigen::Matrix4d L = Eigen::Matrix4d::Identity();
    Eigen::Vector4d T = Eigen::Vector4d::Zero();

    static double pairing(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3];
    }
    static LaguerreMap translation(Vec3 t) {
        LaguerreMap m;
        m.T << t.x, t.y, t.z, 0.0;
        return m;
    }
    static LaguerreMap offset(double h) {
        LaguerreMap m;
        m.T[3] = h;
        return m;
    }
    static LaguerreMap rotation(const Eigen::Matrix3d& R) {
        LaguerreMap m;
        m.L.topLeftCorner<3, 3>() = R;
        return m;
    }
    // Lorentz boost mixing the radius with the component along unit `dir`.
    static LaguerreMap boost(Vec3 dir, double rapidity) {
        const Eigen::Vector3d u = to_eigen(normalized(dir));
        LaguerreMap m;
        m.L.topLeftCorner<3, 3>() += (std::cosh(rapidity) - 1.0) * u * u.transpose();
        m.L.block<3, 1>(0, 3) = std::sinh(rapidity) * u;
        m.L.block<1, 3>(3, 0) = std::sinh(rapidity) * u.transpose();
        m.L(3, 3) = std::cosh(rapidity);
        return m;
    }
    // this after other
    LaguerreMap after(const LaguerreMap& o) const { return {L * o.L, L * o.T + T}; }

    Sphere apply(const Sphere& s) const {
        const Eigen::Vector4d y = L * Eigen::Vector4d(s.center.x, s.center.y, s.center.z, s.r) + T;
        return {{y[0], y[1], y[2]}, y[3]};
    }
    OrientedPlane apply(const OrientedPlane& p) const {
        const Eigen::Vector4d n = L * Eigen::Vector4d(p.v.x, p.v.y, p.v.z, -1.0);
        const double w = -n[3];
        if (!(w > 0.0)) throw DegenerateConfiguration("Laguerre map reverses the time orientation");
        return {Vec3{n[0], n[1], n[2]} / w, (p.d + pairing(n, T)) / w};
    }
    // Maps that send points (radius 0) to points keep grid vertices concurrent.
    bool preserves_points() const {
        return std::abs(L(3, 0)) + std::abs(L(3, 1)) + std::abs(L(3, 2)) < 1e-14 && std::abs(T[3]) < 1e-14 &&
               std::abs(L(3, 3) - 1.0) < 1e-14;
    }
};

inline OrientedOctahedron transform(const LaguerreMap& m, const OrientedOctahedron& o) {
    OrientedOctahedron out;
    for (int f = 0; f < 8; ++f) out.planes[f] = m.apply(o.planes[f]);
    return out;
}

// Octahedron of a Minkowski octahedral grid centered at lattice point q:
// plane (m, n) is family m at lambda0_m + delta n.
inline OrientedOctahedron minkowski_octahedron(const MinkowskiSystem& sys, const OctahedralGridSpec& spec,
                                               const Lattice3& q) {
    if (!is_octahedron_center(q)) throw std::invalid_argument("octahedron center must have odd coordinate sum");
    OrientedOctahedron o;
    for (int f = 0; f < 8; ++f) {
        const auto [m, n] = face_plane_key(q, f);
        o.planes[f] = plane_from_label(sys, {m, spec.lambda(m, n)});
    }
    return o;
}

namespace detail {

// Circle on the unit sphere: the section by n.x = h, |n| = 1.
struct SphereCircle {
    Vec3 n;
    double h = 0.0;
};

inline SphereCircle circle_through(Vec3 a, Vec3 b, Vec3 c) {
    const Vec3 n = cross(b - a, c - a);
    const double l = norm(n);
    if (l < 1e-12) throw DegenerateConfiguration("points on the sphere are collinear");
    return {n / l, dot(n / l, a)};
}

inline Vec3 point_on_circle(const SphereCircle& k, double angle) {
    const Vec3 helper = std::abs(k.n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = normalized(cross(k.n, helper));
    const Vec3 e2 = cross(k.n, e1);
    const double rho = std::sqrt(std::max(0.0, 1.0 - k.h * k.h));
    return k.h * k.n + rho * (std::cos(angle) * e1 + std::sin(angle) * e2);
}

// Second common point of two circles through `known`.
inline Vec3 second_intersection(const SphereCircle& p, const SphereCircle& q, Vec3 known) {
    const Vec3 dir = cross(p.n, q.n);
    const double l = norm(dir);
    if (l < 1e-12) throw DegenerateConfiguration("circles lie in parallel planes");
    // the chord through `known` along dir: known + t dir, |.| = 1
    const double t = -2.0 * dot(known, dir) / (l * l);
    return known + t * dir;
}

inline int sign_index(int s) { return s > 0 ? 1 : 0; }

}  // namespace detail

// Two conical octahedra in oriented contact along an edge, all 16 planes
// tangent to `sphere`. Tangency points on the sphere correspond to the
// vertices of a cube whose faces (octahedron vertices) must be concyclic;
// they are placed by Miquel's theorem. `jitter` perturbs the free points
// away from the symmetric octahedron.
inline std::pair<OrientedOctahedron, OrientedOctahedron> sphere_tangent_seed(const Sphere& sphere, std::uint64_t seed,
                                                                             double jitter = 0.15) {
    if (!(sphere.r != 0.0)) throw std::invalid_argument("seed sphere must have nonzero radius");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    using Cube = std::map<std::array<int, 3>, Vec3>;
    auto perturbed = [&](std::array<int, 3> s) {
        const Vec3 base{double(s[0]), double(s[1]), double(s[2])};
        return normalized(base / std::sqrt(3.0) + jitter * Vec3{gauss(rng), gauss(rng), gauss(rng)});
    };
    // nearest point of a circle to a target direction, then jittered
    auto on_circle_near = [&](const detail::SphereCircle& k, Vec3 target) {
        double best = 0.0, bd = 1e300;
        for (int i = 0; i < 360; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 360.0;
            const double dd = distance(detail::point_on_circle(k, t), target);
            if (dd < bd) bd = dd, best = t;
        }
        return detail::point_on_circle(k, best + jitter * uni(rng));
    };
    auto sigma_vec = [](std::array<int, 3> s) { return normalized(Vec3{double(s[0]), double(s[1]), double(s[2])}); };

    // octahedron A: base (-1,-1,-1), its three neighbours free
    Cube A;
    A[{-1, -1, -1}] = perturbed({-1, -1, -1});
    A[{1, -1, -1}] = perturbed({1, -1, -1});
    A[{-1, 1, -1}] = perturbed({-1, 1, -1});
    A[{-1, -1, 1}] = perturbed({-1, -1, 1});
    for (auto s : std::array<std::array<int, 3>, 3>{{{1, 1, -1}, {1, -1, 1}, {-1, 1, 1}}}) {
        std::vector<Vec3> pts{A.at({-1, -1, -1})};
        for (int i = 0; i < 3; ++i)
            if (s[i] == 1) {
                std::array<int, 3> nb{-1, -1, -1};
                nb[i] = 1;
                pts.push_back(A.at(nb));
            }
        A[s] = on_circle_near(detail::circle_through(pts[0], pts[1], pts[2]), sigma_vec(s));
    }
    {
        const auto k0 = detail::circle_through(A.at({1, 1, -1}), A.at({1, -1, 1}), A.at({1, -1, -1}));
        const auto k1 = detail::circle_through(A.at({1, 1, -1}), A.at({-1, 1, 1}), A.at({-1, 1, -1}));
        A[{1, 1, 1}] = detail::second_intersection(k0, k1, A.at({1, 1, -1}));
    }
    // cube vertex of face (m, s) is s r_m
    auto cube_key = [](int f) {
        const auto& r = kFamilyRows[face_family(f) - 1];
        const int s = face_side(f);
        return std::array<int, 3>{s * r[0], s * r[1], s * r[2]};
    };
    auto tangent = [&](Vec3 u) { return OrientedPlane{u, dot(u, sphere.center) + sphere.r}; };
    OrientedOctahedron a, b;
    for (int f = 0; f < 8; ++f) a.planes[f] = tangent(A.at(cube_key(f)));

    // octahedron B at offset (1,1,0): faces shared with A carry over
    const Lattice3 qa{1, 0, 0}, qb{qa[0] + kSeedOffset[0], qa[1] + kSeedOffset[1], qa[2] + kSeedOffset[2]};
    Cube B;
    for (int fb = 0; fb < 8; ++fb)
        for (int fa = 0; fa < 8; ++fa)
            if (face_plane_key(qb, fb) == face_plane_key(qa, fa)) B[cube_key(fb)] = A.at(cube_key(fa));
    if (B.size() != 6) throw std::logic_error("seed combinatorics: expected six shared faces");
    // unknown X = (1,1,1) on the face sigma3 = +1 circle, Y = (1,1,-1) by Miquel
    {
        const auto k = detail::circle_through(B.at({-1, -1, 1}), B.at({1, -1, 1}), B.at({-1, 1, 1}));
        const Vec3 away = normalized(-1.0 * (B.at({-1, -1, 1}) + B.at({1, -1, 1}) + B.at({-1, 1, 1})));
        B[{1, 1, 1}] = on_circle_near(k, away);
        const auto k0 = detail::circle_through(B.at({1, 1, 1}), B.at({1, -1, 1}), B.at({1, -1, -1}));
        const auto k1 = detail::circle_through(B.at({1, 1, 1}), B.at({-1, 1, 1}), B.at({-1, 1, -1}));
        B[{1, 1, -1}] = detail::second_intersection(k0, k1, B.at({1, 1, 1}));
    }
    for (int f = 0; f < 8; ++f) b.planes[f] = tangent(B.at(cube_key(f)));
    return {a, b};
}

}  // namespace cnets
