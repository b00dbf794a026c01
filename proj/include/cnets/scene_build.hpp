#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cnets/ac_grid.hpp"
#include "cnets/cc_grid.hpp"
#include "cnets/conical.hpp"
#include "cnets/minkowski.hpp"
#include "cnets/octahedral_web.hpp"
#include "cnets/scene.hpp"

namespace cnets {

// Field access with path-qualified errors; `finish` rejects unknown keys.
class ConfigFields {
public:
    ConfigFields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ValidationError(label() + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    double number(const char* key) {
        const json& v = require(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "must be finite");
        return x;
    }
    double number(const char* key, double fallback) { return has(key) ? number(key) : (used_.insert(key), fallback); }

    int integer(const char* key) {
        const json& v = require(key);
        if (!v.is_number_integer()) fail(key, "expected an integer");
        return v.get<int>();
    }
    int integer(const char* key, int fallback) { return has(key) ? integer(key) : (used_.insert(key), fallback); }

    std::string choice(const char* key, const std::string& fallback, const std::vector<std::string>& allowed) {
        std::string s = fallback;
        if (has(key)) {
            const json& v = require(key);
            if (!v.is_string()) fail(key, "expected a string");
            s = v.get<std::string>();
        }
        used_.insert(key);
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(key, "must be one of " + list + ", got '" + s + "'");
        }
        return s;
    }

    template <std::size_t N>
    std::array<double, N> numbers(const char* key) {
        const json& v = require(key);
        if (!v.is_array() || v.size() != N) fail(key, "expected " + std::to_string(N) + " numbers");
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            if (!v[i].is_number()) fail(key, "expected " + std::to_string(N) + " numbers");
            out[i] = v[i].get<double>();
        }
        return out;
    }
    template <std::size_t N>
    std::array<double, N> numbers(const char* key, std::array<double, N> fallback) {
        return has(key) ? numbers<N>(key) : (used_.insert(key), fallback);
    }

    template <std::size_t N>
    std::array<int, N> integers(const char* key) {
        const json& v = require(key);
        if (!v.is_array() || v.size() != N) fail(key, "expected " + std::to_string(N) + " integers");
        std::array<int, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            if (!v[i].is_number_integer()) fail(key, "expected " + std::to_string(N) + " integers");
            out[i] = v[i].get<int>();
        }
        return out;
    }
    template <std::size_t N>
    std::array<int, N> integers(const char* key, std::array<int, N> fallback) {
        return has(key) ? integers<N>(key) : (used_.insert(key), fallback);
    }

    ConfigFields object(const char* key) { return ConfigFields(require(key), path(key)); }

    void ignore(const char* key) { used_.insert(key); }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k)) throw ValidationError("config field '" + path(k.c_str()) + "': unknown field");
    }

    [[noreturn]] void fail(const char* key, const std::string& msg) const {
        throw ValidationError("config field '" + path(key) + "': " + msg);
    }

private:
    const json& require(const char* key) {
        if (!j_.contains(key)) fail(key, "required");
        used_.insert(key);
        return j_.at(key);
    }
    std::string path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }
    std::string label() const { return where_.empty() ? "config" : "config field '" + where_ + "'"; }

    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

namespace detail {

inline ConfocalSystem read_confocal(ConfigFields& f) {
    const double a = f.number("a"), b = f.number("b"), c = f.number("c");
    if (!(a > b)) f.fail("b", "must be smaller than a (a > b > c), got a=" + shortest(a) + " b=" + shortest(b));
    if (!(b > c)) f.fail("c", "must be smaller than b (a > b > c), got b=" + shortest(b) + " c=" + shortest(c));
    return ConfocalSystem(a, b, c);
}

inline GridSpec read_grid(ConfigFields& parent, const Modulus* closure_modulus) {
    ConfigFields f = parent.object("grid");
    const auto offset = f.numbers<2>("offset", {0.0, 0.0});
    GridSpec g;
    if (f.has("closure_n")) {
        if (!closure_modulus) f.fail("closure_n", "this construction has no closing period");
        const int n = f.integer("closure_n");
        if (n <= 0) f.fail("closure_n", "must be positive");
        g = GridSpec::closed(n, *closure_modulus, offset);
    } else {
        g.delta = f.number("delta");
        if (!(g.delta > 0.0)) f.fail("delta", "must be positive");
        g.offset = offset;
        g.lo = f.integers<2>("lo");
        g.hi = f.integers<2>("hi");
        if (g.hi[0] <= g.lo[0] || g.hi[1] <= g.lo[1]) f.fail("hi", "index range is empty");
    }
    f.finish();
    return g;
}

inline MinkowskiSystem read_minkowski(ConfigFields& f) {
    const std::string variant = f.choice("variant", "elliptic", {"elliptic", "hyperbolic"});
    const double k = f.number("k");
    if (!(k > 0.0 && k < 1.0)) f.fail("k", "must lie in (0, 1)");
    return MinkowskiSystem(variant == "elliptic" ? MinkowskiVariant::Elliptic : MinkowskiVariant::Hyperbolic, k);
}

inline OctahedralGridSpec read_octahedral_grid(ConfigFields& parent, const MinkowskiSystem& sys) {
    ConfigFields f = parent.object("grid");
    OctahedralGridSpec s;
    if (f.has("closure_n")) {
        const int n = f.integer("closure_n");
        if (n <= 0) f.fail("closure_n", "must be positive");
        s = OctahedralGridSpec::closed(n, sys.m);
    } else {
        s.delta = f.number("delta");
        if (!(s.delta > 0.0)) f.fail("delta", "must be positive");
        s.lambda0 = f.numbers<4>("lambda0", {0.0, 0.0, 0.0, 0.0});
        if (std::abs(s.lambda0[0] + s.lambda0[3] - s.lambda0[1] - s.lambda0[2]) > 1e-12)
            f.fail("lambda0", "must satisfy l1 + l4 = l2 + l3");
        s.lo = f.integers<4>("lo");
        s.hi = f.integers<4>("hi");
        for (int i = 0; i < 4; ++i)
            if (s.hi[i] <= s.lo[i]) f.fail("hi", "index range is empty");
    }
    f.finish();
    return s;
}

inline std::string idx_label(const char* prefix, int n) { return std::string(prefix) + "_" + std::to_string(n); }

inline std::string idx_label(const char* prefix, const Index2& i) {
    return std::string(prefix) + "_" + std::to_string(i.first) + "_" + std::to_string(i.second);
}

inline Vec3 lift2(Vec2 p) { return {p.x, p.y, 0.0}; }

// Vertex map and chain polylines for 2-index grids.
struct IndexedVertices {
    std::map<Index2, std::size_t> index;

    template <class Map, class ToVec3>
    void add_all(Scene& s, const Map& verts, ToVec3 to3) {
        for (const auto& [k, p] : verts) index[k] = s.add_vertex(to3(p));
    }
    std::vector<std::size_t> chain(const std::vector<Index2>& seq) const {
        std::vector<std::size_t> out;
        for (const auto& i : seq) {
            auto it = index.find(i);
            if (it != index.end()) out.push_back(it->second);
        }
        return out;
    }
    std::optional<std::array<std::size_t, 4>> quad(const Index2& base) const {
        std::array<std::size_t, 4> out{};
        const auto idx = quad_indices(base);
        for (int i = 0; i < 4; ++i) {
            auto it = index.find(idx[i]);
            if (it == index.end()) return std::nullopt;
            out[i] = it->second;
        }
        return out;
    }
};

// Deterministic uniform double in [lo, hi): platform-independent, unlike the
// standard distributions.
inline double unit_draw(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline void add_chain_polylines(Scene& s, const IndexedVertices& iv, const std::vector<VertexChain>& chains,
                                const char* tag, const char* p0, const char* p1) {
    for (const auto& c : chains) {
        ScenePolyline p;
        p.tag = tag;
        p.label = idx_label(c.family == 0 ? p0 : p1, c.index);
        p.vertices = iv.chain(c.vertices);
        if (p.vertices.size() >= 2) s.polylines.push_back(std::move(p));
    }
}

// Points of one line sorted along it; used for planar nets whose vertices are
// line intersections.
inline std::vector<std::size_t> sort_along(const Scene& s, const OrientedLine2D& l, std::vector<std::size_t> ids) {
    const Vec2 d = l.direction();
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        return dot(d, Vec2{s.vertices[a].x, s.vertices[a].y}) < dot(d, Vec2{s.vertices[b].x, s.vertices[b].y});
    });
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace detail

// ---- constructions ----

struct BuiltScene {
    Scene scene;
    std::vector<std::string> notes;
};

inline BuiltScene build_ac_scene(ConfigFields& f) {
    const ConfocalSystem sys = detail::read_confocal(f);
    const double u2 = f.number("u2");
    if (!(u2 >= -sys.b && u2 <= -sys.c)) f.fail("u2", "must lie in [-b, -c]");
    const GridSpec spec = detail::read_grid(f, &sys.m1);
    Octant oct;
    if (f.has("octant")) {
        const auto o = f.integers<3>("octant");
        for (int v : o)
            if (v != 1 && v != -1) f.fail("octant", "entries must be +1 or -1");
        oct = {o[0], o[1], o[2]};
    }
    BuiltScene out;
    Scene& s = out.scene;
    const ACGrid g = build_ac_grid(sys, u2, spec, oct);
    detail::IndexedVertices iv;
    iv.add_all(s, g.vertices, [](Vec3 p) { return p; });
    detail::add_chain_polylines(s, iv, g.lines, "asymptotic", "l", "m");
    detail::add_chain_polylines(s, iv, g.curvature, "curvature", "s1", "s3");
    double edge_sum = 0.0;
    for (const auto& q : ac_quads(g)) {
        edge_sum = std::max(edge_sum, std::abs(q.edge_sum_defect()) / std::max(1.0, q.diameter()));
        SceneQuad sq;
        sq.vertices = *iv.quad(q.base);
        sq.label = detail::idx_label("q", q.base);
        s.quads.push_back(sq);
    }
    for (const auto& p : g.poles) out.notes.push_back(p.message);
    const ACGrid ell = build_ac_grid(sys, -sys.c, spec, oct), hyp = build_ac_grid(sys, -sys.b, spec, oct);
    s.audit.push_back(make_audit("edge_sum", edge_sum, 1e-9));
    s.audit.push_back(make_audit("isometry", std::max(isometry_defect(g, ell), isometry_defect(g, hyp)), 1e-9));
    for (ICLimit which : {ICLimit::Ellipse, ICLimit::Hyperbola}) {
        const ICNet net = planar_limit_ic(sys, spec, which);
        const std::string tag = which == ICLimit::Ellipse ? "ellipse_limit" : "hyperbola_limit";
        double r = 0.0;
        for (const auto& q : net.quads) r = std::max(r, q.residual);
        s.audit.push_back(make_audit("incircle." + tag, r, 1e-9));
        s.audit.push_back(make_audit("incircle_failures." + tag, static_cast<double>(net.rejected.size()), 0.0));
        s.audit.push_back(make_audit("conic_tangency." + tag, net.max_tangency_residual(), 1e-9));
    }
    return out;
}

inline BuiltScene build_ic_scene(ConfigFields& f) {
    const ConfocalSystem sys = detail::read_confocal(f);
    const std::string limit = f.choice("limit", "ellipse", {"ellipse", "hyperbola"});
    const GridSpec spec = detail::read_grid(f, &sys.m1);
    const ICNet net = planar_limit_ic(sys, spec, limit == "ellipse" ? ICLimit::Ellipse : ICLimit::Hyperbola);
    BuiltScene out;
    Scene& s = out.scene;
    s.metadata["frame"] = frame_name(net.frame);
    detail::IndexedVertices iv;
    iv.add_all(s, net.vertices, detail::lift2);
    for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) {
        std::vector<Index2> seq;
        for (int n3 = spec.lo[1]; n3 < spec.hi[1]; ++n3) seq.push_back({n1, n3});
        s.polylines.push_back({"asymptotic", detail::idx_label("l", n1), iv.chain(seq), false, std::nullopt});
    }
    for (int n3 = spec.lo[1]; n3 < spec.hi[1]; ++n3) {
        std::vector<Index2> seq;
        for (int n1 = spec.lo[0]; n1 < spec.hi[0]; ++n1) seq.push_back({n1, n3});
        s.polylines.push_back({"asymptotic", detail::idx_label("m", n3), iv.chain(seq), false, std::nullopt});
    }
    double residual = 0.0, corner = 0.0, label = 0.0;
    for (const auto& q : net.quads) {
        residual = std::max(residual, q.residual);
        corner = std::max(corner, q.corner_defect);
        label = std::max(label, q.label_defect);
        SceneQuad sq;
        sq.vertices = *iv.quad(q.base);
        sq.label = detail::idx_label("q", q.base);
        sq.circle = s.add_circle({detail::lift2(q.incircle.center), {0, 0, 1}, q.incircle.r, sq.label});
        s.quads.push_back(sq);
    }
    for (const auto& b : net.folded) out.notes.push_back("quad " + detail::idx_label("q", b) + " straddles the fold");
    s.audit.push_back(make_audit("incircle", residual, 1e-9));
    s.audit.push_back(make_audit("incircle_failures", static_cast<double>(net.rejected.size()), 0.0));
    s.audit.push_back(make_audit("corner_match", corner, 1e-9));
    s.audit.push_back(make_audit("confocal_labels", label, 1e-9));
    s.audit.push_back(make_audit("conic_tangency", net.max_tangency_residual(), 1e-9));
    return out;
}

inline BuiltScene build_cc_scene(ConfigFields& f) {
    const ConfocalSystem sys = detail::read_confocal(f);
    const double s3 = f.number("s3");
    if (!(s3 >= 0.0 && s3 <= std::numbers::pi / 2)) f.fail("s3", "must lie in [0, pi/2]");
    const int hemisphere = f.integer("hemisphere", 1);
    if (hemisphere != 1 && hemisphere != -1) f.fail("hemisphere", "must be +1 or -1");
    const GridSpec spec = detail::read_grid(f, nullptr);
    const CCGrid g = build_cc_grid(sys, s3, spec, hemisphere);
    BuiltScene out;
    Scene& s = out.scene;
    detail::IndexedVertices iv;
    iv.add_all(s, g.vertices, [](Vec3 p) { return p; });
    for (const auto& c : g.circles) {
        ScenePolyline p{"circular", detail::idx_label(c.family == 0 ? "alpha" : "beta", c.index), iv.chain(c.vertices),
                        false, std::nullopt};
        if (p.vertices.size() < 2) continue;
        if (p.vertices.size() >= 3) {
            const CircleFit fit = fit_circle(chain_points(g.vertices, c));
            p.circle = s.add_circle({fit.center, fit.normal, fit.radius, p.label});
        }
        s.polylines.push_back(std::move(p));
    }
    for (int n1 = spec.lo[0]; n1 + 1 < spec.hi[0]; ++n1)
        for (int n2 = spec.lo[1]; n2 + 1 < spec.hi[1]; ++n2)
            if (auto q = iv.quad({n1, n2})) s.quads.push_back({*q, std::nullopt, detail::idx_label("q", Index2{n1, n2})});
    if (!g.clipped.empty())
        out.notes.push_back(std::to_string(g.clipped.size()) + " indices outside the parameter window");
    const auto check = check_cc_circles(g);
    s.audit.push_back(make_audit("circle_radius", check.radius_defect, 1e-9));
    s.audit.push_back(make_audit("circle_fit", check.fit_residual, 1e-9));
    s.audit.push_back(make_audit("circle_plane", check.plane_defect, 1e-9));
    double chords = 0.0;
    for (double t : {0.0, g.param.spherical_s3(), std::numbers::pi / 2})
        chords = std::max(chords, chord_isometry_defect(g, deform_cc_grid(g, t)));
    s.audit.push_back(make_audit("chord_isometry", chords, 1e-9));
    return out;
}

inline BuiltScene build_hic_scene(ConfigFields& f) {
    const ConfocalSystem sys = detail::read_confocal(f);
    const std::string limit = f.choice("limit", "s3_zero", {"s3_zero", "s3_half_pi"});
    const GridSpec spec = detail::read_grid(f, nullptr);
    const HICNet net = planar_limit_hic(sys, spec, limit == "s3_zero" ? HICLimit::S3Zero : HICLimit::S3HalfPi);
    BuiltScene out;
    Scene& s = out.scene;
    s.metadata["frame"] = frame_name(net.frame);
    detail::IndexedVertices iv;
    iv.add_all(s, net.vertices, detail::lift2);
    double contact = 0.0;
    for (const auto& c : net.circles) {
        const std::string name = detail::idx_label(c.family == 0 ? "alpha" : "beta", c.index);
        const std::size_t ci = s.add_circle({{c.center, 0.0, 0.0}, {0, 0, 1}, c.radius, name});
        std::vector<Index2> seq;
        for (int n = spec.lo[1 - c.family]; n < spec.hi[1 - c.family]; ++n)
            seq.push_back(c.family == 0 ? Index2{c.index, n} : Index2{n, c.index});
        ScenePolyline p{"circular", name, iv.chain(seq), false, ci};
        if (p.vertices.size() >= 2) s.polylines.push_back(std::move(p));
        contact = std::max(contact, net.contact_discriminant(c));
    }
    double det = 0.0, touch = 0.0;
    for (const auto& q : net.quads) {
        det = std::max(det, std::abs(q.determinant));
        SceneQuad sq;
        sq.vertices = *iv.quad(q.base);
        sq.label = detail::idx_label("q", q.base);
        if (!q.complex_incircle) {
            touch = std::max(touch, q.contact_residual);
            sq.circle = s.add_circle({detail::lift2(q.incircles[0].center), {0, 0, 1}, q.incircles[0].r, sq.label});
            s.add_circle({detail::lift2(q.incircles[1].center), {0, 0, 1}, q.incircles[1].r, sq.label + "_mirror"});
        }
        s.quads.push_back(sq);
    }
    for (const auto& m : net.complex_quads) out.notes.push_back(m);
    s.audit.push_back(make_audit("four_circle_determinant", det, 1e-10));
    s.audit.push_back(make_audit("incircle_contact", touch, 1e-9));
    s.audit.push_back(make_audit("boundary_contact", contact, 1e-9));
    return out;
}

inline BuiltScene build_octahedral_web_scene(ConfigFields& f) {
    const ConfocalSystem sys = detail::read_confocal(f);
    const auto c = f.numbers<3>("center");
    const double delta = f.number("delta");
    if (!(delta > 0.0)) f.fail("delta", "must be positive");
    const int samples = f.integer("samples", 16);
    if (samples < 2) f.fail("samples", "must be at least 2");
    const SParams center{c[0], c[1], c[2]};
    const Octahedron3D oct = octahedron_3d(sys, center, delta);
    BuiltScene out;
    Scene& s = out.scene;
    for (const auto& v : oct.vertices) s.add_vertex(v.pos);
    double straight = 0.0;
    for (const auto& e : oct.edges) {
        ScenePolyline p;
        p.tag = e.fixed == 1 ? "asymptotic" : "characteristic";
        p.label = "edge_" + std::to_string(e.from) + "_" + std::to_string(e.to);
        p.vertices.push_back(static_cast<std::size_t>(e.from));
        std::vector<Vec3> pts{oct.vertices[e.from].pos};
        for (int i = 1; i < samples; ++i) {
            const Vec3 q = point_from_s(sys, oct.edge_point(e, double(i) / samples)).pos;
            p.vertices.push_back(s.add_vertex(q));
            pts.push_back(q);
        }
        p.vertices.push_back(static_cast<std::size_t>(e.to));
        pts.push_back(oct.vertices[e.to].pos);
        if (e.fixed == 1) straight = std::max(straight, collinearity_residual(pts));
        s.polylines.push_back(std::move(p));
    }
    int bad_diagonals = 0;
    for (int axis = 0; axis < 3; ++axis) {
        const auto [ia, ib] = oct.diagonals[axis];
        const SParams &a = oct.vertices[ia].s, &b = oct.vertices[ib].s;
        int differing = 0;
        for (int i = 0; i < 3; ++i) differing += a[i] != b[i];
        bad_diagonals += differing != 1 || a[axis] == b[axis];
        ScenePolyline p{"curvature", "diagonal_" + std::to_string(axis), {static_cast<std::size_t>(ia)}, false, std::nullopt};
        for (int i = 1; i < samples; ++i) {
            SParams q = a;
            q[axis] = a[axis] + (b[axis] - a[axis]) * i / samples;
            p.vertices.push_back(s.add_vertex(point_from_s(sys, q).pos));
        }
        p.vertices.push_back(static_cast<std::size_t>(ib));
        s.polylines.push_back(std::move(p));
    }
    double closure = 0.0, level = 0.0;
    for (const auto& face : oct.faces) {
        closure = std::max(closure, triangular_closure(oct, face).residual);
        for (int v : face.vertices) level = std::max(level, std::abs(face.family.level(oct.vertices[v].s) - face.level));
    }
    s.audit.push_back(make_audit("triangular_closure", closure, 1e-9));
    s.audit.push_back(make_audit("web_level", level, 1e-12));
    s.audit.push_back(make_audit("straight_edges", straight, 1e-10));
    s.audit.push_back(make_audit("diagonal_index", bad_diagonals, 0.0));
    return out;
}

namespace detail {

// Largest tangency residual of every grid plane against `per_plane` confocal
// quadrics with labels drawn away from the focal values.
inline double confocal_tangency(const MinkowskiSystem& sys, const OctahedralGrid& g, int per_plane, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (const auto& [key, p] : g.planes) {
        const PlaneFamilyLabel l{key.first, g.spec.lambda(key.first, key.second)};
        for (int j = 0; j < per_plane; ++j) {
            double mu = unit_draw(rng, -3.0, 3.0);
            for (double focal : {sys.a, sys.b, sys.c})
                if (std::abs(mu + focal) < 1e-3) mu += 0.01;
            worst = std::max(worst, plane_tangency_to_confocal(sys, l, mu).residual);
        }
    }
    return worst;
}

inline std::string plane_label(int family, int n) { return "P" + std::to_string(family) + "_" + std::to_string(n); }

}  // namespace detail

inline BuiltScene build_octahedral_scene(ConfigFields& f) {
    const MinkowskiSystem sys = detail::read_minkowski(f);
    const OctahedralGridSpec spec = detail::read_octahedral_grid(f, sys);
    const double half = f.number("patch", 1.5);
    if (!(half > 0.0)) f.fail("patch", "must be positive");
    const int per_plane = f.integer("confocal_samples", 10);
    const int seed = f.integer("seed", 1);
    const OctahedralGrid g = build_octahedral_grid(sys, spec);
    BuiltScene out;
    Scene& s = out.scene;
    double angle = 0.0;
    for (const auto& [key, p] : g.planes) {
        s.planes.push_back(plane_patch(p, {0, 0, 0}, half, detail::plane_label(key.first, key.second)));
        angle = std::max(angle, std::abs(std::abs(p.v.z) - std::sqrt(0.5)));
    }
    double concurrency = 0.0, cone = 0.0;
    int degenerate = 0;
    for (const auto& v : g.vertices) {
        s.add_vertex(v.pos);
        concurrency = std::max(concurrency, v.concurrency);
        cone = std::max(cone, v.cone_residual);
        degenerate += v.degenerate_cone;
    }
    for (const auto& m : g.skipped) out.notes.push_back(m);
    if (degenerate) out.notes.push_back(std::to_string(degenerate) + " vertices with two distinct planes use the vertical cone");
    s.audit.push_back(make_audit("plane_angle", angle, 1e-12));
    s.audit.push_back(make_audit("confocal_tangency", detail::confocal_tangency(sys, g, per_plane, seed), 1e-10));
    s.audit.push_back(make_audit("concurrency", concurrency, 1e-9));
    s.audit.push_back(make_audit("cone_contact", cone, 1e-9));

    if (spec.lambda0 == std::array<double, 4>{0, 0, 0, 0}) {
        const TraceNet net = z0_trace(sys, spec);
        std::map<Index2, std::size_t> corner;  // (l index, m index)
        auto corner_at = [&](int i, int j) {
            auto it = corner.find({i, j});
            if (it != corner.end()) return it->second;
            const Vec2 p = intersect(net.lines_l.at(i), net.lines_m.at(j));
            return corner[{i, j}] = s.add_vertex(detail::lift2(p));
        };
        double incircle = 0.0, section = 0.0;
        for (const auto& q : net.quads) {
            const auto [n, np] = q.base;
            SceneQuad sq;
            sq.vertices = {corner_at(n, np), corner_at(n + 1, np), corner_at(n + 1, np + 1), corner_at(n, np + 1)};
            sq.label = detail::idx_label("trace", q.base);
            sq.circle = s.add_circle({detail::lift2(q.incircle.center), {0, 0, 1}, q.incircle.r, sq.label});
            s.quads.push_back(sq);
            incircle = std::max(incircle, q.residual);
            section = std::max(section, q.cone_defect);
        }
        std::map<int, std::vector<std::size_t>> on_l, on_m;
        for (const auto& [ij, id] : corner) on_l[ij.first].push_back(id), on_m[ij.second].push_back(id);
        for (auto& [i, ids] : on_l)
            s.polylines.push_back({"asymptotic", detail::idx_label("trace_l", i),
                                   detail::sort_along(s, net.lines_l.at(i), ids), false, std::nullopt});
        for (auto& [j, ids] : on_m)
            s.polylines.push_back({"asymptotic", detail::idx_label("trace_m", j),
                                   detail::sort_along(s, net.lines_m.at(j), ids), false, std::nullopt});
        out.notes.push_back(std::to_string(net.degenerate.size()) + " degenerate trace cells");
        s.audit.push_back(make_audit("trace_incircle", incircle, 1e-9));
        s.audit.push_back(make_audit("trace_cone_section", section, 1e-9));
        s.audit.push_back(make_audit("trace_conic_tangency", net.max_tangency_residual(), 1e-9));
    }
    return out;
}

inline BuiltScene build_checkerboard_scene(ConfigFields& f) {
    const MinkowskiSystem sys = detail::read_minkowski(f);
    const OctahedralGridSpec spec = detail::read_octahedral_grid(f, sys);
    const double eps = f.number("eps");
    const OctahedralGrid g = build_octahedral_grid(sys, spec);
    const CheckerboardSlice slice = checkerboard_slice(g, eps);
    BuiltScene out;
    Scene& s = out.scene;
    s.metadata["frame"] = "xy";
    std::map<Index2, std::size_t> corner;
    auto corner_at = [&](int i, int j) {
        auto it = corner.find({i, j});
        if (it != corner.end()) return it->second;
        const Vec2 p = intersect(slice.lines_l.at(i), slice.lines_m.at(j));
        return corner[{i, j}] = s.add_vertex(detail::lift2(p));
    };
    double contact = 0.0, defect = 0.0;
    int white_missing = 0, black_with = 0;
    for (const auto& q : slice.quads) {
        if (q.degenerate) continue;
        const auto [i, j] = q.base;
        SceneQuad sq;
        sq.vertices = {corner_at(i, j), corner_at(i, j + 1), corner_at(i + 1, j + 1), corner_at(i + 1, j)};
        sq.label = detail::idx_label(q.white ? "white" : "black", q.base);
        if (q.white) {
            contact = std::max(contact, q.contact_residual);
            if (q.incircle_exists) defect = std::max(defect, q.incircle_defect);
            else ++white_missing;
            sq.circle = s.add_circle({detail::lift2(q.circle.center), {0, 0, 1}, q.circle.r, sq.label});
        } else {
            black_with += q.incircle_exists;
        }
        s.quads.push_back(sq);
    }
    std::map<int, std::vector<std::size_t>> on_l, on_m;
    for (const auto& [ij, id] : corner) on_l[ij.first].push_back(id), on_m[ij.second].push_back(id);
    for (auto& [i, ids] : on_l)
        s.polylines.push_back({"asymptotic", detail::idx_label("l", i), detail::sort_along(s, slice.lines_l.at(i), ids),
                               false, std::nullopt});
    for (auto& [j, ids] : on_m)
        s.polylines.push_back({"asymptotic", detail::idx_label("m", j), detail::sort_along(s, slice.lines_m.at(j), ids),
                               false, std::nullopt});
    for (const auto& m : slice.skipped) out.notes.push_back(m);
    if (eps == 0.0) {
        s.audit.push_back(make_audit("doubled_lines", slice.doubled_line_defect, 1e-12));
    } else {
        s.audit.push_back(make_audit("white_cone_section", contact, 1e-9));
        s.audit.push_back(make_audit("white_incircle", defect, 1e-9));
        s.audit.push_back(make_audit("white_incircle_missing", white_missing, 0.0));
        s.audit.push_back(make_audit("black_incircle_present", black_with, 0.0));
    }
    return out;
}

inline BuiltScene build_conical_scene(ConfigFields& f) {
    ConfigFields seed = f.object("seed");
    const std::string type = seed.choice("type", "minkowski", {"minkowski", "sphere"});
    PropagationSpec ps;
    ps.lo = f.integers<3>("lo", ps.lo);
    ps.hi = f.integers<3>("hi", ps.hi);
    for (int i = 0; i < 3; ++i)
        if (ps.hi[i] < ps.lo[i]) f.fail("hi", "box is empty");
    ps.seed = f.integers<3>("seed_center", ps.seed);
    if (!is_octahedron_center(ps.seed)) f.fail("seed_center", "must have an odd coordinate sum");
    const std::string order = f.choice("order", "ascending", {"ascending", "descending"});
    ps.order = order == "ascending" ? Traversal::Ascending : Traversal::Descending;
    const double half = f.number("patch", 1.0);
    if (!(half > 0.0)) f.fail("patch", "must be positive");
    const Lattice3 qb{ps.seed[0] + kSeedOffset[0], ps.seed[1] + kSeedOffset[1], ps.seed[2] + kSeedOffset[2]};

    OrientedOctahedron A, B;
    std::optional<MinkowskiSystem> msys;
    OctahedralGridSpec mspec;
    std::optional<Sphere> sphere;
    if (type == "minkowski") {
        msys = detail::read_minkowski(seed);
        const auto s0 = seed.numbers<3>("s0");
        mspec.delta = seed.number("delta");
        if (!(mspec.delta > 0.0)) seed.fail("delta", "must be positive");
        mspec.lambda0 = {s0[0] + s0[1] + s0[2], s0[0] + s0[1] - s0[2], s0[0] - s0[1] + s0[2], s0[0] - s0[1] - s0[2]};
        A = minkowski_octahedron(*msys, mspec, ps.seed);
        B = minkowski_octahedron(*msys, mspec, qb);
    } else {
        const auto c = seed.numbers<3>("center");
        const double r = seed.number("radius");
        if (r == 0.0) seed.fail("radius", "must be nonzero");
        const int rs = seed.integer("seed", 1);
        const double jitter = seed.number("jitter", 0.15);
        sphere = Sphere{{c[0], c[1], c[2]}, r};
        std::tie(A, B) = sphere_tangent_seed(*sphere, static_cast<std::uint64_t>(rs), jitter);
        // the generated seeds sit at centers (1,0,0) and (2,1,0)
        if (ps.seed != Lattice3{1, 0, 0}) f.fail("seed_center", "sphere seeds are placed at (1, 0, 0)");
    }
    seed.finish();
    const ConicalGrid g = propagate_grid(A, B, ps);
    BuiltScene out;
    Scene& s = out.scene;
    for (const auto& [key, p] : g.planes) {
        const Vec3 focus = sphere ? sphere->center : Vec3{0, 0, 0};
        s.planes.push_back(plane_patch(p, focus, half, detail::plane_label(key.first, key.second)));
    }
    std::map<Lattice3, std::size_t> vid;
    for (const auto& q : g.octahedra) {
        OrientedOctahedron o;
        o.planes = *g.octahedron(q);
        for (int axis = 0; axis < 3; ++axis)
            for (int e : {1, -1}) {
                Lattice3 p = q;
                p[axis] += e;
                if (!vid.count(p)) vid[p] = s.add_vertex(o.vertex(axis, e));
            }
    }
    PropagationSpec other = ps;
    other.order = ps.order == Traversal::Ascending ? Traversal::Descending : Traversal::Ascending;
    const ConicalGrid h = propagate_grid(A, B, other);
    double order_gap = h.planes.size() == g.planes.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (const auto& [k, p] : g.planes) {
        auto it = h.planes.find(k);
        if (it != h.planes.end()) order_gap = std::max(order_gap, plane_distance(p, it->second));
    }
    s.audit.push_back(make_audit("completion_closure", g.closure_residual, 1e-8));
    s.audit.push_back(make_audit("conical_vertices", g.conical_residual, 1e-9));
    s.audit.push_back(make_audit("incomplete_octahedra", g.incomplete.size(), 0.0));
    s.audit.push_back(make_audit("traversal_order", order_gap, 1e-9));
    const SphereFit fit = common_sphere(g);
    s.audit.push_back(make_audit("common_sphere", fit.residual, 1e-8));
    if (msys) {
        double err = 0.0;
        for (const auto& [k, p] : g.planes)
            err = std::max(err, plane_distance(p, plane_from_label(*msys, {k.first, mspec.lambda(k.first, k.second)})));
        s.audit.push_back(make_audit("analytic_planes", err, 1e-8));
        // the planes share a sphere at infinity: beta vanishes
        s.audit.push_back(make_audit("common_sphere_at_infinity", std::abs(fit.beta), 1e-8));
        out.notes.push_back(fit.degenerate ? "common sphere is degenerate (at infinity)" : "common sphere is finite");
    } else {
        const double d = fit.degenerate ? std::numeric_limits<double>::infinity()
                                        : std::max(distance(fit.sphere.center, sphere->center),
                                                   std::abs(fit.sphere.r - sphere->r));
        s.audit.push_back(make_audit("common_sphere_recovery", d, 1e-8));
    }
    return out;
}

// ---- dispatch ----

inline const std::vector<std::string>& scene_kinds() {
    static const std::vector<std::string> kinds{"ac_grid",    "ic_net",     "cc_grid",      "hic_net",
                                                "octahedral_web", "octahedral", "checkerboard", "conical_grid"};
    return kinds;
}

// Parameter swept by a `sequence` list, per kind.
inline const char* sequence_parameter(const std::string& kind) {
    if (kind == "ac_grid") return "u2";
    if (kind == "cc_grid") return "s3";
    if (kind == "checkerboard") return "eps";
    return nullptr;
}

inline bool planar_kind(const std::string& kind) {
    return kind == "ic_net" || kind == "hic_net" || kind == "checkerboard";
}

// Builds one scene from a config without a `sequence`; the audit holds the
// module invariants followed by the scene-level ones.
inline Scene build_scene(const json& config) {
    ConfigFields f(config, "");
    std::vector<std::string> kinds = scene_kinds();
    const std::string kind = f.choice("kind", "", kinds);
    f.ignore("name");
    if (f.has("sequence")) f.fail("sequence", "expand the sequence before building a single scene");
    std::optional<Camera> camera;
    if (f.has("camera")) {
        ConfigFields c = f.object("camera");
        camera = Camera{c.number("azimuth", 30.0), c.number("elevation", 20.0)};
        c.finish();
    }
    BuiltScene b;
    try {
        if (kind == "ac_grid") b = build_ac_scene(f);
        else if (kind == "ic_net") b = build_ic_scene(f);
        else if (kind == "cc_grid") b = build_cc_scene(f);
        else if (kind == "hic_net") b = build_hic_scene(f);
        else if (kind == "octahedral_web") b = build_octahedral_web_scene(f);
        else if (kind == "octahedral") b = build_octahedral_scene(f);
        else if (kind == "checkerboard") b = build_checkerboard_scene(f);
        else b = build_conical_scene(f);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        // module preconditions (poles, windows, empty grids) surface as validation errors
        throw ValidationError(kind + ": " + e.what());
    }
    f.finish();
    Scene& s = b.scene;
    s.metadata["kind"] = kind;
    s.metadata["config"] = config;
    s.metadata["tool_version"] = kToolVersion;
    s.metadata["planar"] = planar_kind(kind);
    s.metadata["notes"] = b.notes;
    if (camera) s.metadata["camera"] = {{"azimuth", camera->azimuth}, {"elevation", camera->elevation}};
    for (auto& e : scene_invariants(s)) s.audit.push_back(std::move(e));
    validate_scene(s);
    return s;
}

// Expands `sequence` into one config per value of the swept parameter.
inline std::vector<json> expand_sequence(const json& config) {
    if (!config.is_object()) throw ValidationError("config: expected an object");
    if (!config.contains("sequence")) return {config};
    const std::string kind = config.value("kind", std::string{});
    const char* param = sequence_parameter(kind);
    if (!param) throw ValidationError("config field 'sequence': kind '" + kind + "' has no deformation parameter");
    const json& seq = config.at("sequence");
    if (!seq.is_array() || seq.empty()) throw ValidationError("config field 'sequence': expected a non-empty array");
    std::vector<json> out;
    for (const auto& v : seq) {
        if (!v.is_number()) throw ValidationError("config field 'sequence': expected numbers");
        json c = config;
        c.erase("sequence");
        c[param] = v;
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<Scene> generate_scenes(const json& config) {
    std::vector<Scene> out;
    for (const auto& c : expand_sequence(config)) out.push_back(build_scene(c));
    return out;
}

// Audit of a stored scene: the module invariants of its regenerated config,
// the scene-level invariants of the stored geometry, and the distance between
// the two.
inline std::vector<AuditEntry> audit_scene(const Scene& stored) {
    validate_scene(stored);
    if (!stored.metadata.contains("config")) throw ValidationError("metadata: missing field 'config'");
    const Scene fresh = build_scene(stored.metadata.at("config"));
    std::vector<AuditEntry> out;
    for (const auto& e : fresh.audit)
        if (e.name.rfind("scene.", 0) != 0) out.push_back(e);
    for (auto& e : scene_invariants(stored)) out.push_back(std::move(e));
    out.push_back(make_audit("scene.matches_config", scene_distance(stored, fresh), 1e-9));
    return out;
}

}  // namespace cnets
