#include <cmath>

#include <gtest/gtest.h>

#include "cnets/scene_build.hpp"

using namespace cnets;

namespace {

// Unit square with its inscribed circle, built by hand.
Scene square_scene(const std::string& kind) {
    Scene s;
    s.metadata = {{"kind", kind}, {"planar", true}};
    for (Vec3 p : {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{1, 1, 0}, Vec3{0, 1, 0}}) s.add_vertex(p);
    const auto c = s.add_circle({{0.5, 0.5, 0}, {0, 0, 1}, 0.5, "in"});
    s.quads.push_back({{0, 1, 2, 3}, c, "q"});
    s.polylines.push_back({"asymptotic", "edge", {0, 1, 2, 3}, true, std::nullopt});
    return s;
}

json ac_config() {
    return json::parse(R"({"kind":"ac_grid","a":3,"b":2,"c":0,"u2":-1.2,"grid":{"closure_n":8,"offset":[0.05,0.11]}})");
}

}  // namespace

TEST(Scene, SerializeParseRoundTrip) {
    Scene s = square_scene("ic_net");
    s.vertices[1].x = 0.1 + 0.2;  // not exactly representable as a short decimal
    s.planes.push_back(plane_patch({{0, 0, 1}, 2.0}, {3, 4, 5}, 0.5, "p"));
    s.audit.push_back(make_audit("x", 1e-17, 1e-9));
    const std::string text = serialize(s);
    const Scene back = parse_scene(text);
    EXPECT_EQ(back.vertices[1].x, 0.1 + 0.2);
    EXPECT_EQ(serialize(back), text);
    // keys come out sorted
    EXPECT_LT(text.find("\"audit\""), text.find("\"circles\""));
    EXPECT_LT(text.find("\"planes\""), text.find("\"vertices\""));
}

TEST(Scene, PlanePatch) {
    const OrientedPlane p = OrientedPlane::from_coefficients(1, 2, 2, -3);
    const ScenePlane q = plane_patch(p, {5, -1, 2}, 0.75, "p");
    for (const auto& c : q.corners) EXPECT_NEAR(p.signed_distance(c), 0.0, 1e-14);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(distance(q.corners[i], q.corners[(i + 1) % 4]), 1.5, 1e-14);
    EXPECT_NEAR(distance(q.corners[0], q.corners[2]), 1.5 * std::sqrt(2.0), 1e-14);
    // horizontal planes still get a patch
    const ScenePlane h = plane_patch({{0, 0, 1}, 1.0}, {0, 0, 0}, 1.0, "h");
    for (const auto& c : h.corners) EXPECT_DOUBLE_EQ(c.z, 1.0);
}

TEST(Scene, Validation) {
    Scene s = square_scene("ic_net");
    EXPECT_NO_THROW(validate_scene(s));
    s.quads[0].vertices[3] = 7;
    EXPECT_THROW(validate_scene(s), ValidationError);
    s = square_scene("ic_net");
    s.polylines[0].tag = "spline";
    EXPECT_THROW(validate_scene(s), ValidationError);
    s = square_scene("ic_net");
    s.vertices.clear();
    s.quads.clear();
    s.polylines.clear();
    EXPECT_THROW(validate_scene(s), ValidationError);
    EXPECT_THROW(parse_scene("[1, 2]"), ValidationError);
    EXPECT_THROW(parse_scene(R"({"metadata":{"kind":"x"},"vertices":[[0,0]],"polylines":[],"circles":[],"planes":[],"quads":[],"audit":[]})"),
                 ValidationError);
}

TEST(Scene, InvariantsSeeStoredGeometry) {
    Scene s = square_scene("ic_net");
    auto inv = scene_invariants(s);
    ASSERT_EQ(inv.size(), 1u);
    EXPECT_EQ(inv[0].name, "scene.incircle_contact");
    EXPECT_LT(inv[0].max_residual, 1e-15);
    s.circles[0].radius = 0.5 + 1e-6;
    EXPECT_FALSE(scene_invariants(s)[0].pass);

    // a rhombus satisfies the edge-sum identity, a generic quad does not
    Scene r;
    r.metadata = {{"kind", "ac_grid"}};
    for (Vec3 p : {Vec3{0, 0, 0}, Vec3{1.5, 0, 0}, Vec3{2.5, 1, 0.5}, Vec3{1, 1, 0.5}}) r.add_vertex(p);
    r.quads.push_back({{0, 1, 2, 3}, std::nullopt, "q"});
    EXPECT_LT(scene_invariants(r)[0].max_residual, 1e-15);
    r.vertices[2] = {4, 1, 0};
    EXPECT_FALSE(scene_invariants(r)[0].pass);
}

TEST(Scene, ConfigErrorsNameTheField) {
    auto message = [](const json& config) {
        try {
            build_scene(config);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    json c = ac_config();
    c["b"] = 3.5;
    EXPECT_NE(message(c).find("'b'"), std::string::npos);
    c = ac_config();
    c["c"] = 2.5;
    EXPECT_NE(message(c).find("'c'"), std::string::npos);
    c = ac_config();
    c["u2"] = 0.5;
    EXPECT_NE(message(c).find("'u2'"), std::string::npos);
    c = ac_config();
    c["grid"].erase("closure_n");
    EXPECT_NE(message(c).find("'grid.delta'"), std::string::npos);
    c = ac_config();
    c["grid"]["extra"] = 1;
    EXPECT_NE(message(c).find("'grid.extra'"), std::string::npos);
    c = ac_config();
    c.erase("kind");
    EXPECT_NE(message(c).find("'kind'"), std::string::npos);
    json k = json::parse(R"({"kind":"octahedral","variant":"parabolic","k":0.8,"grid":{"closure_n":4}})");
    EXPECT_NE(message(k).find("'variant'"), std::string::npos);
    k["variant"] = "elliptic";
    k["k"] = 1.2;
    EXPECT_NE(message(k).find("'k'"), std::string::npos);
}

TEST(Scene, SequenceExpansion) {
    json c = ac_config();
    c.erase("u2");
    c["sequence"] = {-1.9, -1.1};
    const auto configs = expand_sequence(c);
    ASSERT_EQ(configs.size(), 2u);
    EXPECT_EQ(configs[1]["u2"].get<double>(), -1.1);
    EXPECT_FALSE(configs[0].contains("sequence"));
    const auto scenes = generate_scenes(c);
    ASSERT_EQ(scenes.size(), 2u);
    EXPECT_TRUE(scenes[0].all_pass());
    c["sequence"] = json::array();
    EXPECT_THROW(expand_sequence(c), ValidationError);
}

TEST(Scene, StoredSceneAudit) {
    const Scene s = build_scene(ac_config());
    EXPECT_TRUE(s.all_pass());
    auto audit = audit_scene(s);
    EXPECT_EQ(audit.back().name, "scene.matches_config");
    EXPECT_EQ(audit.back().max_residual, 0.0);
    Scene moved = s;
    moved.vertices[3].z += 1e-4;
    audit = audit_scene(moved);
    EXPECT_FALSE(audit.back().pass);
    Scene dropped = s;
    dropped.quads.pop_back();
    EXPECT_TRUE(std::isinf(scene_distance(dropped, s)));
}
