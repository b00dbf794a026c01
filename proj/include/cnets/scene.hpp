#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnets/geom.hpp"

namespace cnets {

inline constexpr const char* kToolVersion = "cnets 0.1.0";

using json = nlohmann::json;

// Malformed input: bad config field, broken scene file, unsupported export.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct AuditEntry {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

inline AuditEntry make_audit(std::string name, double residual, double tolerance) {
    // NaN never passes
    return {std::move(name), residual, tolerance, residual <= tolerance};
}

struct ScenePolyline {
    std::string tag;  // asymptotic | curvature | characteristic | circular
    std::string label;
    std::vector<std::size_t> vertices;
    bool closed = false;
    std::optional<std::size_t> circle;  // circle carrying the vertices
};

struct SceneCircle {
    Vec3 center;
    Vec3 normal{0.0, 0.0, 1.0};
    double radius = 0.0;  // signed for oriented circles
    std::string label;
};

// Oriented plane with a bounded square patch for rendering.
struct ScenePlane {
    Vec3 v;
    double d = 0.0;
    std::array<Vec3, 4> corners;
    std::string label;
};

struct SceneQuad {
    std::array<std::size_t, 4> vertices{};
    std::optional<std::size_t> circle;  // inscribed circle
    std::string label;
};

inline const std::vector<std::string>& polyline_tags() {
    static const std::vector<std::string> tags{"asymptotic", "curvature", "characteristic", "circular"};
    return tags;
}

struct Scene {
    json metadata = json::object();
    std::vector<Vec3> vertices;
    std::vector<ScenePolyline> polylines;
    std::vector<SceneCircle> circles;
    std::vector<ScenePlane> planes;
    std::vector<SceneQuad> quads;
    std::vector<AuditEntry> audit;

    std::string kind() const { return metadata.value("kind", std::string{}); }
    bool planar() const { return metadata.value("planar", false); }
    bool all_pass() const {
        return std::all_of(audit.begin(), audit.end(), [](const AuditEntry& a) { return a.pass; });
    }

    std::size_t add_vertex(Vec3 p) {
        vertices.push_back(p);
        return vertices.size() - 1;
    }
    std::size_t add_circle(SceneCircle c) {
        circles.push_back(std::move(c));
        return circles.size() - 1;
    }
};

// Square patch of half width `half` in plane p, centred at the projection of `focus`.
inline ScenePlane plane_patch(const OrientedPlane& p, Vec3 focus, double half, std::string label) {
    const Vec3 foot = focus - p.signed_distance(focus) * p.v;
    Vec3 e1 = cross(p.v, Vec3{0.0, 0.0, 1.0});
    if (norm(e1) < 1e-12) e1 = cross(p.v, Vec3{1.0, 0.0, 0.0});
    e1 = normalized(e1);
    const Vec3 e2 = cross(p.v, e1);
    ScenePlane out;
    out.v = p.v;
    out.d = p.d;
    out.corners = {foot - half * e1 - half * e2, foot + half * e1 - half * e2, foot + half * e1 + half * e2,
                   foot - half * e1 + half * e2};
    out.label = std::move(label);
    return out;
}

// ---- JSON ----

namespace detail {

inline json vec_json(Vec3 p) { return json::array({p.x, p.y, p.z}); }

inline Vec3 json_vec(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw ValidationError(where + ": expected an array of three numbers");
    Vec3 p;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) throw ValidationError(where + ": expected an array of three numbers");
        (i == 0 ? p.x : i == 1 ? p.y : p.z) = j[i].get<double>();
    }
    return p;
}

inline std::size_t json_index(const json& j, const std::string& where) {
    if (!j.is_number_unsigned()) throw ValidationError(where + ": expected a vertex index");
    return j.get<std::size_t>();
}

inline const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline double json_number(const json& j, const char* key, const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::string json_string(const json& j, const char* key, const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_string()) throw ValidationError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

}  // namespace detail

inline json audit_json(const std::vector<AuditEntry>& audit) {
    json a = json::array();
    for (const auto& e : audit)
        a.push_back({{"name", e.name}, {"max_residual", e.max_residual}, {"tolerance", e.tolerance}, {"pass", e.pass}});
    return a;
}

inline json to_json(const Scene& s) {
    json j;
    j["metadata"] = s.metadata;
    json v = json::array();
    for (const auto& p : s.vertices) v.push_back(detail::vec_json(p));
    j["vertices"] = std::move(v);
    json pl = json::array();
    for (const auto& p : s.polylines) {
        json e{{"tag", p.tag}, {"label", p.label}, {"vertices", p.vertices}, {"closed", p.closed}};
        if (p.circle) e["circle"] = *p.circle;
        pl.push_back(std::move(e));
    }
    j["polylines"] = std::move(pl);
    json c = json::array();
    for (const auto& k : s.circles)
        c.push_back({{"center", detail::vec_json(k.center)},
                     {"normal", detail::vec_json(k.normal)},
                     {"radius", k.radius},
                     {"label", k.label}});
    j["circles"] = std::move(c);
    json planes = json::array();
    for (const auto& p : s.planes) {
        json corners = json::array();
        for (const auto& q : p.corners) corners.push_back(detail::vec_json(q));
        planes.push_back({{"v", detail::vec_json(p.v)}, {"d", p.d}, {"corners", corners}, {"label", p.label}});
    }
    j["planes"] = std::move(planes);
    json quads = json::array();
    for (const auto& q : s.quads) {
        json e{{"vertices", q.vertices}, {"label", q.label}};
        if (q.circle) e["circle"] = *q.circle;
        quads.push_back(std::move(e));
    }
    j["quads"] = std::move(quads);
    j["audit"] = audit_json(s.audit);
    return j;
}

// Compact, key-sorted, shortest round-trip floats.
inline std::string serialize(const Scene& s) { return to_json(s).dump() + "\n"; }

// Structural validation: every reference resolves and the scene is not empty.
inline void validate_scene(const Scene& s) {
    if (s.vertices.empty() && s.planes.empty()) throw ValidationError("scene is empty: no vertices and no planes");
    if (!s.metadata.is_object() || !s.metadata.contains("kind"))
        throw ValidationError("metadata: missing field 'kind'");
    const auto& tags = polyline_tags();
    for (std::size_t i = 0; i < s.polylines.size(); ++i) {
        const auto& p = s.polylines[i];
        const std::string where = "polylines[" + std::to_string(i) + "]";
        if (std::find(tags.begin(), tags.end(), p.tag) == tags.end())
            throw ValidationError(where + ".tag: unknown tag '" + p.tag + "'");
        for (auto v : p.vertices)
            if (v >= s.vertices.size())
                throw ValidationError(where + ": vertex index " + std::to_string(v) + " out of range");
        if (p.circle && *p.circle >= s.circles.size()) throw ValidationError(where + ": circle index out of range");
    }
    for (std::size_t i = 0; i < s.quads.size(); ++i) {
        const auto& q = s.quads[i];
        const std::string where = "quads[" + std::to_string(i) + "]";
        for (auto v : q.vertices)
            if (v >= s.vertices.size())
                throw ValidationError(where + ": vertex index " + std::to_string(v) + " out of range");
        if (q.circle && *q.circle >= s.circles.size()) throw ValidationError(where + ": circle index out of range");
    }
}

inline Scene scene_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object()) throw ValidationError("scene: expected a JSON object");
    Scene s;
    s.metadata = member(j, "metadata", "scene");
    for (const char* key : {"vertices", "polylines", "circles", "planes", "quads", "audit"})
        if (!member(j, key, "scene").is_array()) throw ValidationError(std::string("scene.") + key + ": expected an array");
    const json& verts = j.at("vertices");
    for (std::size_t i = 0; i < verts.size(); ++i) s.vertices.push_back(json_vec(verts[i], "vertices[" + std::to_string(i) + "]"));
    const json& pls = j.at("polylines");
    for (std::size_t i = 0; i < pls.size(); ++i) {
        const std::string where = "polylines[" + std::to_string(i) + "]";
        ScenePolyline p;
        p.tag = json_string(pls[i], "tag", where);
        p.label = json_string(pls[i], "label", where);
        const json& vs = member(pls[i], "vertices", where);
        if (!vs.is_array()) throw ValidationError(where + ".vertices: expected an array");
        for (const auto& v : vs) p.vertices.push_back(json_index(v, where + ".vertices"));
        const json& closed = member(pls[i], "closed", where);
        if (!closed.is_boolean()) throw ValidationError(where + ".closed: expected a boolean");
        p.closed = closed.get<bool>();
        if (pls[i].contains("circle")) p.circle = json_index(pls[i].at("circle"), where + ".circle");
        s.polylines.push_back(std::move(p));
    }
    const json& cs = j.at("circles");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string where = "circles[" + std::to_string(i) + "]";
        SceneCircle c;
        c.center = json_vec(member(cs[i], "center", where), where + ".center");
        c.normal = json_vec(member(cs[i], "normal", where), where + ".normal");
        c.radius = json_number(cs[i], "radius", where);
        c.label = json_string(cs[i], "label", where);
        s.circles.push_back(std::move(c));
    }
    const json& ps = j.at("planes");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string where = "planes[" + std::to_string(i) + "]";
        ScenePlane p;
        p.v = json_vec(member(ps[i], "v", where), where + ".v");
        p.d = json_number(ps[i], "d", where);
        const json& corners = member(ps[i], "corners", where);
        if (!corners.is_array() || corners.size() != 4) throw ValidationError(where + ".corners: expected four points");
        for (int k = 0; k < 4; ++k) p.corners[k] = json_vec(corners[k], where + ".corners");
        p.label = json_string(ps[i], "label", where);
        s.planes.push_back(std::move(p));
    }
    const json& qs = j.at("quads");
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const std::string where = "quads[" + std::to_string(i) + "]";
        SceneQuad q;
        const json& vs = member(qs[i], "vertices", where);
        if (!vs.is_array() || vs.size() != 4) throw ValidationError(where + ".vertices: expected four indices");
        for (int k = 0; k < 4; ++k) q.vertices[k] = json_index(vs[k], where + ".vertices");
        if (qs[i].contains("circle")) q.circle = json_index(qs[i].at("circle"), where + ".circle");
        q.label = json_string(qs[i], "label", where);
        s.quads.push_back(std::move(q));
    }
    const json& as = j.at("audit");
    for (std::size_t i = 0; i < as.size(); ++i) {
        const std::string where = "audit[" + std::to_string(i) + "]";
        AuditEntry e;
        e.name = json_string(as[i], "name", where);
        e.max_residual = json_number(as[i], "max_residual", where);
        e.tolerance = json_number(as[i], "tolerance", where);
        const json& pass = member(as[i], "pass", where);
        if (!pass.is_boolean()) throw ValidationError(where + ".pass: expected a boolean");
        e.pass = pass.get<bool>();
        s.audit.push_back(std::move(e));
    }
    validate_scene(s);
    return s;
}

inline Scene parse_scene(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scene is not valid JSON: ") + e.what());
    }
    return scene_from_json(j);
}

// ---- scene-level invariants, computed from the stored geometry alone ----

namespace detail {

inline double line_distance(Vec3 p, Vec3 a, Vec3 b) {
    const Vec3 d = b - a;
    const double l = norm(d);
    if (l == 0.0) return std::numeric_limits<double>::infinity();
    return norm(cross(p - a, d)) / l;
}

inline double quad_extent(const Scene& s, const SceneQuad& q) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int k = i + 1; k < 4; ++k) d = std::max(d, distance(s.vertices[q.vertices[i]], s.vertices[q.vertices[k]]));
    return d;
}

}  // namespace detail

// Checks that need only the stored scene: the edge-sum identity of the
// quads (ac_grid), incircles touching the four side lines (straight-sided
// planar nets) and circular polylines lying on their circle.
inline std::vector<AuditEntry> scene_invariants(const Scene& s) {
    std::vector<AuditEntry> out;
    const std::string kind = s.kind();
    if (kind == "ac_grid" && !s.quads.empty()) {
        double worst = 0.0;
        for (const auto& q : s.quads) {
            double e[4];
            for (int i = 0; i < 4; ++i) e[i] = distance(s.vertices[q.vertices[i]], s.vertices[q.vertices[(i + 1) % 4]]);
            worst = std::max(worst, std::abs(e[0] + e[2] - e[1] - e[3]) / std::max(1.0, detail::quad_extent(s, q)));
        }
        out.push_back(make_audit("scene.edge_sum", worst, 1e-9));
    }
    const bool straight = kind == "ic_net" || kind == "checkerboard" || kind == "octahedral";
    if (straight) {
        double worst = 0.0;
        bool any = false;
        for (const auto& q : s.quads) {
            if (!q.circle) continue;
            any = true;
            const auto& k = s.circles[*q.circle];
            for (int i = 0; i < 4; ++i) {
                const double dist = detail::line_distance(k.center, s.vertices[q.vertices[i]], s.vertices[q.vertices[(i + 1) % 4]]);
                worst = std::max(worst, std::abs(dist - std::abs(k.radius)) / std::max(1.0, detail::quad_extent(s, q)));
            }
        }
        if (any) out.push_back(make_audit("scene.incircle_contact", worst, 1e-9));
    }
    double on_circle = 0.0;
    bool any_circle = false;
    for (const auto& p : s.polylines) {
        if (!p.circle) continue;
        any_circle = true;
        const auto& k = s.circles[*p.circle];
        const double scale = std::max(1.0, std::abs(k.radius));
        for (auto v : p.vertices) {
            const Vec3 d = s.vertices[v] - k.center;
            on_circle = std::max({on_circle, std::abs(norm(d) - std::abs(k.radius)) / scale,
                                  std::abs(dot(d, k.normal)) / scale});
        }
    }
    if (any_circle) out.push_back(make_audit("scene.circle_incidence", on_circle, 1e-9));
    return out;
}

// Largest difference between the geometry of two scenes; infinite when the
// element counts differ.
inline double scene_distance(const Scene& a, const Scene& b) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (a.vertices.size() != b.vertices.size() || a.circles.size() != b.circles.size() ||
        a.planes.size() != b.planes.size() || a.quads.size() != b.quads.size() ||
        a.polylines.size() != b.polylines.size())
        return inf;
    double d = 0.0;
    auto rel = [](Vec3 p, Vec3 q) { return distance(p, q) / std::max(1.0, norm(q)); };
    for (std::size_t i = 0; i < a.vertices.size(); ++i) d = std::max(d, rel(a.vertices[i], b.vertices[i]));
    for (std::size_t i = 0; i < a.circles.size(); ++i)
        d = std::max({d, rel(a.circles[i].center, b.circles[i].center),
                      std::abs(a.circles[i].radius - b.circles[i].radius) / std::max(1.0, std::abs(b.circles[i].radius))});
    for (std::size_t i = 0; i < a.planes.size(); ++i)
        d = std::max({d, norm(a.planes[i].v - b.planes[i].v),
                      std::abs(a.planes[i].d - b.planes[i].d) / std::max(1.0, std::abs(b.planes[i].d))});
    for (std::size_t i = 0; i < a.quads.size(); ++i)
        if (a.quads[i].vertices != b.quads[i].vertices || a.quads[i].circle != b.quads[i].circle) return inf;
    for (std::size_t i = 0; i < a.polylines.size(); ++i)
        if (a.polylines[i].vertices != b.polylines[i].vertices) return inf;
    return d;
}

inline void override_tolerance(std::vector<AuditEntry>& audit, double tol) {
    for (auto& e : audit) {
        e.tolerance = tol;
        e.pass = e.max_residual <= tol;
    }
}

inline std::string audit_report(const std::vector<AuditEntry>& audit) {
    std::ostringstream os;
    for (const auto& e : audit) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e <= %.1e", e.max_residual, e.tolerance);
        os << (e.pass ? "PASS " : "FAIL ") << e.name << "  " << buf << "\n";
    }
    return os.str();
}

// ---- exporters ----

namespace detail {

inline std::string shortest(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline std::string fixed6(double x) {
    if (std::abs(x) < 5e-7) x = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

inline constexpr int kCircleSegments = 64;

inline std::vector<Vec3> circle_samples(const SceneCircle& k) {
    Vec3 e1 = cross(k.normal, Vec3{0.0, 0.0, 1.0});
    if (norm(e1) < 1e-12) e1 = cross(k.normal, Vec3{1.0, 0.0, 0.0});
    e1 = normalized(e1);
    const Vec3 e2 = cross(normalized(k.normal), e1);
    const double r = std::abs(k.radius);
    std::vector<Vec3> out;
    for (int i = 0; i < kCircleSegments; ++i) {
        const double t = 2.0 * std::numbers::pi * i / kCircleSegments;
        out.push_back(k.center + r * std::cos(t) * e1 + r * std::sin(t) * e2);
    }
    return out;
}

}  // namespace detail

// Vertices, then plane corners, then circle samples. Polylines and circles
// become `l` records, quads and plane patches `f` records.
inline std::string export_obj(const Scene& s) {
    std::ostringstream os;
    os << "# " << kToolVersion << " " << s.kind() << "\n";
    auto vline = [&](Vec3 p) {
        os << "v " << detail::shortest(p.x) << " " << detail::shortest(p.y) << " " << detail::shortest(p.z) << "\n";
    };
    for (const auto& p : s.vertices) vline(p);
    const std::size_t plane_base = s.vertices.size() + 1;
    for (const auto& p : s.planes)
        for (const auto& c : p.corners) vline(c);
    const std::size_t circle_base = plane_base + 4 * s.planes.size();
    std::vector<std::vector<Vec3>> samples;
    for (const auto& k : s.circles) {
        samples.push_back(detail::circle_samples(k));
        for (const auto& p : samples.back()) vline(p);
    }
    for (const auto& p : s.polylines) {
        if (p.vertices.size() < 2) continue;
        os << "l";
        for (auto v : p.vertices) os << " " << v + 1;
        if (p.closed) os << " " << p.vertices.front() + 1;
        os << "\n";
    }
    for (std::size_t i = 0; i < s.circles.size(); ++i) {
        const std::size_t base = circle_base + i * detail::kCircleSegments;
        os << "l";
        for (int k = 0; k < detail::kCircleSegments; ++k) os << " " << base + k;
        os << " " << base << "\n";
    }
    for (const auto& q : s.quads)
        os << "f " << q.vertices[0] + 1 << " " << q.vertices[1] + 1 << " " << q.vertices[2] + 1 << " "
           << q.vertices[3] + 1 << "\n";
    for (std::size_t i = 0; i < s.planes.size(); ++i) {
        const std::size_t b = plane_base + 4 * i;
        os << "f " << b << " " << b + 1 << " " << b + 2 << " " << b + 3 << "\n";
    }
    return os.str();
}

// Orthographic view direction from azimuth/elevation in degrees.
struct Camera {
    double azimuth = 30.0, elevation = 20.0;

    std::array<Vec3, 2> screen_axes() const {
        const double az = azimuth * std::numbers::pi / 180.0, el = elevation * std::numbers::pi / 180.0;
        const Vec3 right{-std::sin(az), std::cos(az), 0.0};
        const Vec3 up{-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el)};
        return {right, up};
    }
};

// Planar scenes draw in their frame coordinates; other scenes need a camera.
inline std::string export_svg(const Scene& s) {
    std::optional<Camera> cam;
    if (!s.planar()) {
        if (!s.metadata.contains("camera"))
            throw ValidationError("svg export needs a planar scene or a camera in the config");
        const json& c = s.metadata.at("camera");
        cam = Camera{c.value("azimuth", 30.0), c.value("elevation", 20.0)};
    }
    auto to2 = [&](Vec3 p) -> Vec2 {
        if (!cam) return {p.x, -p.y};
        const auto ax = cam->screen_axes();
        return {dot(p, ax[0]), -dot(p, ax[1])};
    };
    std::vector<std::array<Vec2, 2>> lines;
    for (const auto& p : s.polylines) {
        for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
            lines.push_back({to2(s.vertices[p.vertices[i]]), to2(s.vertices[p.vertices[i + 1]])});
        if (p.closed && p.vertices.size() > 2)
            lines.push_back({to2(s.vertices[p.vertices.back()]), to2(s.vertices[p.vertices.front()])});
    }
    for (const auto& pl : s.planes)
        for (int i = 0; i < 4; ++i) lines.push_back({to2(pl.corners[i]), to2(pl.corners[(i + 1) % 4])});
    std::vector<std::pair<Vec2, double>> circles;
    std::vector<std::vector<Vec2>> ellipses;  // projected 3D circles
    for (const auto& k : s.circles) {
        if (!cam) {
            circles.push_back({to2(k.center), std::abs(k.radius)});
        } else {
            std::vector<Vec2> pts;
            for (const auto& p : detail::circle_samples(k)) pts.push_back(to2(p));
            ellipses.push_back(std::move(pts));
        }
    }
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    auto grow = [&](Vec2 p, double r) {
        x0 = std::min(x0, p.x - r), x1 = std::max(x1, p.x + r);
        y0 = std::min(y0, p.y - r), y1 = std::max(y1, p.y + r);
    };
    for (const auto& l : lines) grow(l[0], 0), grow(l[1], 0);
    for (const auto& [c, r] : circles) grow(c, r);
    for (const auto& e : ellipses)
        for (const auto& p : e) grow(p, 0);
    for (const auto& v : s.vertices) grow(to2(v), 0);
    if (x0 > x1) x0 = y0 = -1.0, x1 = y1 = 1.0;
    const double pad = 0.02 * std::max({x1 - x0, y1 - y0, 1e-9});
    using detail::fixed6;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fixed6(x0 - pad) << " " << fixed6(y0 - pad) << " "
       << fixed6(x1 - x0 + 2 * pad) << " " << fixed6(y1 - y0 + 2 * pad) << "\">\n";
    const std::string stroke = fixed6(0.002 * std::max(x1 - x0, y1 - y0));
    os << "<g fill=\"none\" stroke=\"black\" stroke-width=\"" << stroke << "\">\n";
    for (const auto& l : lines)
        os << "<line x1=\"" << fixed6(l[0].x) << "\" y1=\"" << fixed6(l[0].y) << "\" x2=\"" << fixed6(l[1].x)
           << "\" y2=\"" << fixed6(l[1].y) << "\"/>\n";
    for (const auto& e : ellipses)
        for (std::size_t i = 0; i < e.size(); ++i) {
            const Vec2 a = e[i], b = e[(i + 1) % e.size()];
            os << "<line x1=\"" << fixed6(a.x) << "\" y1=\"" << fixed6(a.y) << "\" x2=\"" << fixed6(b.x) << "\" y2=\""
               << fixed6(b.y) << "\"/>\n";
        }
    os << "</g>\n<g fill=\"none\" stroke=\"red\" stroke-width=\"" << stroke << "\">\n";
    for (const auto& [c, r] : circles)
        os << "<circle cx=\"" << fixed6(c.x) << "\" cy=\"" << fixed6(c.y) << "\" r=\"" << fixed6(r) << "\"/>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace cnets
