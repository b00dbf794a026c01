#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cnets {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoIncircle : GeometryError {
    using GeometryError::GeometryError;
};
struct NotConical : GeometryError {
    using GeometryError::GeometryError;
};
struct NonConcurrent : GeometryError {
    using GeometryError::GeometryError;
};
struct DegenerateConfiguration : GeometryError {
    using GeometryError::GeometryError;
};

struct Vec2 {
    double x = 0.0, y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return s * a; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3& operator+=(Vec3 o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend Vec3 operator*(Vec3 a, double s) { return s * a; }
    friend Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }
inline Vec3 normalized(Vec3 a) {
    const double n = norm(a);
    if (n == 0.0) throw DegenerateConfiguration("cannot normalize a zero vector");
    return a / n;
}
inline bool is_finite(Vec3 a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}
inline Eigen::Vector3d to_eigen(Vec3 a) { return {a.x, a.y, a.z}; }
inline Vec3 from_eigen(const Eigen::Vector3d& a) { return {a[0], a[1], a[2]}; }

// Line {p : n.p = c} with unit normal n. The signed distance n.p - c is
// positive on the side the normal points to.
struct OrientedLine2D {
    Vec2 n{1.0, 0.0};
    double c = 0.0;

    static OrientedLine2D from_coefficients(double px, double py, double p0) {
        // px x + py y + p0 = 0, normal (px, py)
        const double l = std::hypot(px, py);
        if (l == 0.0) throw DegenerateConfiguration("line with zero normal");
        return {{px / l, py / l}, -p0 / l};
    }
    static OrientedLine2D through(Vec2 a, Vec2 b) {
        const Vec2 d = b - a;
        const double l = norm(d);
        if (l == 0.0) throw DegenerateConfiguration("line through coincident points");
        const Vec2 n{d.y / l, -d.x / l};
        return {n, dot(n, a)};
    }
    double signed_distance(Vec2 p) const { return dot(n, p) - c; }
    OrientedLine2D flipped() const { return {-n, -c}; }
    Vec2 direction() const { return {-n.y, n.x}; }
    Vec2 foot() const { return c * n; }
};

// Intersection of two lines; throws for (near-)parallel input.
inline Vec2 intersect(const OrientedLine2D& a, const OrientedLine2D& b) {
    const double det = cross(a.n, b.n);
    if (std::abs(det) < 1e-14) throw DegenerateConfiguration("parallel lines do not intersect");
    return {(a.c * b.n.y - b.c * a.n.y) / det, (a.n.x * b.c - b.n.x * a.c) / det};
}

struct OrientedCircle2D {
    Vec2 center;
    double r = 0.0;
};

// Oriented contact of a circle with a line: n.center - c = -r.
inline double contact_residual(const OrientedLine2D& l, const OrientedCircle2D& k) {
    return std::abs(l.signed_distance(k.center) + k.r);
}

struct OrientedPlane {
    Vec3 v{0.0, 0.0, 1.0};
    double d = 0.0;

    // Plane px x + py y + pz z + p0 = 0 oriented by (px, py, pz).
    static OrientedPlane from_coefficients(double px, double py, double pz, double p0) {
        const double l = std::sqrt(px * px + py * py + pz * pz);
        if (l == 0.0) throw DegenerateConfiguration("plane with zero normal");
        return {{px / l, py / l, pz / l}, -p0 / l};
    }
    double signed_distance(Vec3 p) const { return dot(v, p) - d; }
    OrientedPlane flipped() const { return {-v, -d}; }

    // Trace on the horizontal plane z = height as an oriented line in (x, y).
    OrientedLine2D trace_at_height(double height) const {
        const double rho = std::hypot(v.x, v.y);
        if (rho < 1e-14) throw DegenerateConfiguration("horizontal plane has no trace");
        return {{v.x / rho, v.y / rho}, (d - v.z * height) / rho};
    }
};

inline double plane_distance(const OrientedPlane& a, const OrientedPlane& b) {
    return std::max(norm(a.v - b.v), std::abs(a.d - b.d));
}

struct Sphere {
    Vec3 center;
    double r = 0.0;
};

// Oriented contact: v.center - d = -r, so a sphere of positive radius lies on
// the negative side of every plane it touches.
inline double plane_tangent_to_sphere(const OrientedPlane& p, const Sphere& s) {
    return std::abs(dot(p.v, s.center) - p.d + s.r);
}

// Cone with apex, unit axis and half angle in (0, pi/2). A plane (v, d) is in
// oriented contact when it passes through the apex and v.axis equals
// orientation * sin(half_angle).
struct Cone {
    Vec3 apex;
    Vec3 axis{0.0, 0.0, 1.0};
    double half_angle = std::numbers::pi / 4;
    int orientation = 1;

    double contact_residual(const OrientedPlane& p) const {
        return std::max(std::abs(p.signed_distance(apex)),
                        std::abs(dot(p.v, axis) - orientation * std::sin(half_angle)));
    }

    // Tangent plane whose normal has azimuth phi about the axis.
    OrientedPlane tangent_plane(double phi) const {
        Vec3 e1 = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        e1 = normalized(e1 - dot(e1, axis) * axis);
        const Vec3 e2 = cross(axis, e1);
        const double s = orientation * std::sin(half_angle), c = std::cos(half_angle);
        const Vec3 v = s * axis + c * (std::cos(phi) * e1 + std::sin(phi) * e2);
        return {v, dot(v, apex)};
    }

    // Oriented section circle in the plane z = height; requires a vertical axis.
    OrientedCircle2D section_at_height(double height) const {
        if (std::abs(std::abs(axis.z) - 1.0) > 1e-12)
            throw DegenerateConfiguration("section_at_height needs a vertical axis");
        const double v3 = orientation * std::sin(half_angle) * axis.z;
        const double rho = std::cos(half_angle);
        return {{apex.x, apex.y}, v3 * (apex.z - height) / rho};
    }
};

namespace detail {

inline double quad_diameter(std::span<const Vec2> pts) {
    double diam = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) diam = std::max(diam, distance(pts[i], pts[j]));
    return diam;
}

}  // namespace detail

struct IncircleResult {
    OrientedCircle2D circle;
    double residual = 0.0;  // max over lines of |signed distance + r|
    double spread = 0.0;    // disagreement between the line-triple solutions
    double diameter = 0.0;
};

// Corners of a quadrilateral whose sides lie on four lines in cyclic order.
inline std::array<Vec2, 4> quad_corners(const std::array<OrientedLine2D, 4>& lines) {
    std::array<Vec2, 4> pts;
    for (int i = 0; i < 4; ++i) pts[i] = intersect(lines[i], lines[(i + 1) % 4]);
    return pts;
}

// Circle in oriented contact with four lines listed in cyclic order.
inline IncircleResult incircle_of_quad(const std::array<OrientedLine2D, 4>& lines,
                                       double tol = 1e-8) {
    std::array<Vec2, 4> corners;
    try {
        corners = quad_corners(lines);
    } catch (const DegenerateConfiguration&) {
        throw NoIncircle("degenerate quadrilateral: adjacent sides are parallel");
    }
    const double diam = detail::quad_diameter(corners);
    std::vector<Eigen::Vector3d> sols;
    for (int skip = 0; skip < 4; ++skip) {
        Eigen::Matrix3d A;
        Eigen::Vector3d b;
        int row = 0;
        for (int i = 0; i < 4; ++i) {
            if (i == skip) continue;
            A.row(row) << lines[i].n.x, lines[i].n.y, 1.0;
            b[row] = lines[i].c;
            ++row;
        }
        if (std::abs(A.determinant()) < 1e-12) continue;
        sols.push_back(A.partialPivLu().solve(b));
    }
    if (sols.size() < 2) throw NoIncircle("degenerate quadrilateral: line triples are singular");
    double spread = 0.0;
    for (std::size_t i = 0; i < sols.size(); ++i)
        for (std::size_t j = i + 1; j < sols.size(); ++j)
            spread = std::max(spread, (sols[i] - sols[j]).norm());
    const double scale = std::max(diam, 1.0);
    if (spread > tol * scale)
        throw NoIncircle("no circle touches all four lines (triple disagreement " +
                         std::to_string(spread) + ")");
    Eigen::Matrix<double, 4, 3> A;
    Eigen::Vector4d b;
    for (int i = 0; i < 4; ++i) {
        A.row(i) << lines[i].n.x, lines[i].n.y, 1.0;
        b[i] = lines[i].c;
    }
    const Eigen::Vector3d x = A.colPivHouseholderQr().solve(b);
    IncircleResult res;
    res.circle = {{x[0], x[1]}, x[2]};
    for (const auto& l : lines) res.residual = std::max(res.residual, contact_residual(l, res.circle));
    res.spread = spread;
    res.diameter = diam;
    return res;
}

// Orient each line so its normal points away from `inside`.
inline std::array<OrientedLine2D, 4> orient_outward(std::array<OrientedLine2D, 4> lines, Vec2 inside) {
    for (auto& l : lines)
        if (l.signed_distance(inside) > 0.0) l = l.flipped();
    return lines;
}

// Least-squares common point of a set of planes; residual is the largest
// plane distance from that point.
struct ConcurrencyResult {
    Vec3 point;
    double residual = 0.0;
};

inline ConcurrencyResult common_point(std::span<const OrientedPlane> planes) {
    if (planes.size() < 3) throw DegenerateConfiguration("need at least three planes");
    Eigen::MatrixXd A(planes.size(), 3);
    Eigen::VectorXd b(planes.size());
    for (std::size_t i = 0; i < planes.size(); ++i) {
        A.row(i) << planes[i].v.x, planes[i].v.y, planes[i].v.z;
        b[i] = planes[i].d;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv[2] < 1e-12 * sv[0]) throw DegenerateConfiguration("planes share no isolated point");
    ConcurrencyResult r;
    r.point = from_eigen(svd.solve(b));
    for (const auto& p : planes) r.residual = std::max(r.residual, std::abs(p.signed_distance(r.point)));
    return r;
}

// Coplanarity defect of points in R^4: the third singular value of the
// differences to the first point, relative to the largest difference.
inline double affine_rank2_defect(std::span<const Eigen::Vector4d> pts) {
    if (pts.size() <= 3) return 0.0;
    Eigen::MatrixXd D(4, pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) D.col(i - 1) = pts[i] - pts[0];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
    const auto& sv = svd.singularValues();
    return sv.size() > 2 ? sv[2] / std::max(1.0, sv[0]) : 0.0;
}

inline Eigen::Vector4d lift(const OrientedPlane& p) { return {p.v.x, p.v.y, p.v.z, p.d}; }

// Cone with apex `apex` in oriented contact with four planes through it.
inline Cone cone_through_four_planes(const std::array<OrientedPlane, 4>& planes, Vec3 apex,
                                     double tol = 1e-9) {
    const double scale = std::max(1.0, norm(apex));
    for (const auto& p : planes)
        if (std::abs(p.signed_distance(apex)) > tol * scale)
            throw NotConical("plane misses the apex by " + std::to_string(p.signed_distance(apex)));
    // With all planes through the apex the lifts are coplanar exactly when
    // the unit normals are.
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : planes) mean += to_eigen(p.v);
    mean /= 4.0;
    Eigen::Matrix<double, 4, 3> C;
    for (int i = 0; i < 4; ++i) C.row(i) = (to_eigen(planes[i].v) - mean).transpose();
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[1] < 1e-10) throw NotConical("normals are not spread enough to span a cone");
    Vec3 axis = from_eigen(svd.matrixV().col(2));
    double defect = 0.0;
    for (const auto& p : planes) defect = std::max(defect, std::abs(dot(p.v - from_eigen(mean), axis)));
    if (defect > tol) throw NotConical("plane lifts are not coplanar (defect " + std::to_string(defect) + ")");
    // canonical axis: first nonzero component positive
    const double lead = std::abs(axis.z) > 1e-12 ? axis.z : (std::abs(axis.y) > 1e-12 ? axis.y : axis.x);
    if (lead < 0.0) axis = -axis;
    const double sigma = dot(from_eigen(mean), axis);
    if (std::abs(sigma) < 1e-12 || std::abs(sigma) > 1.0 - 1e-12)
        throw NotConical("normals lie on a great circle or coincide: no proper cone");
    Cone cone;
    cone.apex = apex;
    cone.axis = axis;
    cone.half_angle = std::asin(std::abs(sigma));
    cone.orientation = sigma > 0.0 ? 1 : -1;
    return cone;
}

// Circle through points in space: center, radius, unit normal and the
// maximal deviation of the points from it.
struct CircleFit {
    Vec3 center;
    Vec3 normal;
    double radius = 0.0;
    double residual = 0.0;
};

inline CircleFit fit_circle(std::span<const Vec3> pts) {
    if (pts.size() < 3) throw DegenerateConfiguration("need three points for a circle");
    // pick a well-spread triple: first point, farthest from it, farthest from that line
    const Vec3 a = pts[0];
    std::size_t ib = 1;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (distance(pts[i], a) > distance(pts[ib], a)) ib = i;
    const Vec3 b = pts[ib];
    std::size_t ic = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double h = norm(cross(pts[i] - a, b - a));
        if (h > best) best = h, ic = i;
    }
    const Vec3 c = pts[ic];
    const Vec3 ab = b - a, ac = c - a;
    const Vec3 n = cross(ab, ac);
    const double n2 = dot(n, n);
    if (n2 < 1e-24) throw DegenerateConfiguration("points are collinear");
    const Vec3 center = a + (dot(ac, ac) * cross(n, ab) + dot(ab, ab) * cross(ac, n)) / (2.0 * n2);
    CircleFit f;
    f.center = center;
    f.normal = n / std::sqrt(n2);
    f.radius = distance(center, a);
    for (const auto& p : pts)
        f.residual = std::max({f.residual, std::abs(distance(p, center) - f.radius),
                               std::abs(dot(p - center, f.normal))});
    return f;
}

// Largest distance of points from the line through the two most distant ones.
inline double collinearity_residual(std::span<const Vec3> pts) {
    if (pts.size() < 3) return 0.0;
    std::size_t ia = 0, ib = 1;
    double far = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (distance(pts[i], pts[j]) > far) far = distance(pts[i], pts[j]), ia = i, ib = j;
    if (far == 0.0) return 0.0;
    const Vec3 dir = (pts[ib] - pts[ia]) / far;
    double r = 0.0;
    for (const auto& p : pts) r = std::max(r, norm(cross(p - pts[ia], dir)));
    return r;
}

}  // namespace cnets
