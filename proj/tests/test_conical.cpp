#include <cmath>

#include <gtest/gtest.h>

#include "cnets/conical.hpp"
#include "oracles.hpp"

using namespace cnets;

namespace {

const MinkowskiSystem kEll(MinkowskiVariant::Elliptic, 0.8);

// Grid whose vertex (lattice point p) sits at s = s0 + delta p / 2.
OctahedralGridSpec lattice_spec(SParams s0, double delta) {
    OctahedralGridSpec spec;
    spec.delta = delta;
    spec.lambda0 = {s0.s1 + s0.s2 + s0.s3, s0.s1 + s0.s2 - s0.s3, s0.s1 - s0.s2 + s0.s3, s0.s1 - s0.s2 - s0.s3};
    return spec;
}

const OctahedralGridSpec kSpec = lattice_spec({0.8, 0.7, 0.9}, 0.1);

Vec3 random_unit(std::mt19937_64& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    return normalized(Vec3{n(g), n(g), n(g)});
}

Eigen::Matrix3d random_rotation(std::mt19937_64& g) {
    Eigen::Matrix3d M;
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 9; ++i) M(i / 3, i % 3) = n(g);
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(M);
    Eigen::Matrix3d Q = qr.householderQ();
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    return Q;
}

double grid_distance(const ConicalGrid& a, const ConicalGrid& b) {
    double d = 0.0;
    for (const auto& [k, p] : a.planes) d = std::max(d, plane_distance(p, b.planes.at(k)));
    return d;
}

PropagationSpec box5(Traversal order = Traversal::Ascending) {
    PropagationSpec ps;
    ps.seed = {1, 0, 0};
    ps.lo = {-1, -2, -2};
    ps.hi = {3, 2, 2};
    ps.order = order;
    return ps;
}

}  // namespace

TEST(Blaschke, LiftAndDrop) {
    const auto b = blaschke_lift({{0, 0, 1}, 0.0});
    EXPECT_EQ(b.x, Eigen::Vector4d(0, 0, 1, 0));
    auto g = oracle::rng(201);
    for (int t = 0; t < 100; ++t) {
        const OrientedPlane p{random_unit(g), oracle::uniform(g, -5, 5)};
        const auto q = blaschke_drop(blaschke_lift(p));
        EXPECT_LT(plane_distance(p, q), 1e-14);
    }
    EXPECT_THROW(blaschke_lift({{0, 0, 2}, 0.0}), std::invalid_argument);
    EXPECT_THROW(blaschke_drop({Eigen::Vector4d(1, 1, 0, 0)}), std::invalid_argument);
}

TEST(Blaschke, CoplanarLiftsIffCone) {
    auto g = oracle::rng(202);
    for (int t = 0; t < 500; ++t) {
        Cone c;
        c.apex = {oracle::uniform(g, -3, 3), oracle::uniform(g, -3, 3), oracle::uniform(g, -3, 3)};
        c.axis = random_unit(g);
        c.half_angle = oracle::uniform(g, 0.2, 1.3);
        c.orientation = t % 2 ? 1 : -1;
        std::array<OrientedPlane, 4> P;
        for (int i = 0; i < 4; ++i) P[i] = c.tangent_plane(oracle::uniform(g, 0, 2 * M_PI));
        const auto cv = is_conical_vertex(P);
        EXPECT_TRUE(cv.conical) << cv.residual;
        EXPECT_NO_THROW(cone_through_four_planes(P, c.apex));
        // tilt one plane about the apex
        const Vec3 nv = normalized(P[3].v + 1e-3 * random_unit(g));
        P[3] = {nv, dot(nv, c.apex)};
        EXPECT_FALSE(is_conical_vertex(P).conical);
        EXPECT_THROW(cone_through_four_planes(P, c.apex), NotConical);
    }
}

TEST(Blaschke, VertexPredicate) {
    const auto P = vertex_planes(kEll, kSpec, {2, 3, 1, 2});
    EXPECT_TRUE(is_conical_vertex(P).conical);
    auto Q = P;
    Q[0].d += 1e-3;
    EXPECT_THROW(is_conical_vertex(Q), NonConcurrent);
}

TEST(Completion, RecoversDeletedPlane) {
    auto g = oracle::rng(203);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        OrientedOctahedron o;
        if (t % 2 == 0) {
            const SParams s0{oracle::uniform(g, 0.5, 1.5), oracle::uniform(g, 0.5, 1.5), oracle::uniform(g, 0.5, 1.5)};
            o = minkowski_octahedron(kEll, lattice_spec(s0, oracle::uniform(g, 0.05, 0.2)), {1, 0, 0});
        } else {
            o = sphere_tangent_seed({{oracle::uniform(g, -1, 1), 0.2, 0.0}, oracle::uniform(g, 0.5, 2.0)}, t).first;
        }
        const int f = t % 8;
        const auto c = complete_octahedron(o.planes, f);
        EXPECT_FALSE(c.flipped);
        worst = std::max(worst, plane_distance(c.plane, o.planes[f]));
        // completed octahedron: all six cuboid faces planar
        auto full = o.planes;
        full[f] = c.plane;
        EXPECT_LT(OrientedOctahedron{full}.conical_residual(), 1e-9);
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(Completion, SymmetricOctahedron) {
    OrientedOctahedron o;
    for (int f = 0; f < 8; ++f) {
        const auto& r = kFamilyRows[face_family(f) - 1];
        const int s = face_side(f);
        o.planes[f] = {normalized(Vec3{double(s * r[0]), double(s * r[1]), double(s * r[2])}), 1.0};
    }
    EXPECT_LT(o.conical_residual(), 1e-14);
    for (int f = 0; f < 8; ++f) EXPECT_LT(plane_distance(complete_octahedron(o.planes, f).plane, o.planes[f]), 1e-12);
    // vertices at distance sqrt(3) on the axes
    EXPECT_NEAR(o.vertex(0, 1).x, std::sqrt(3.0), 1e-12);
}

TEST(Completion, RejectsNonConicalInput) {
    auto g = oracle::rng(204);
    int rejected = 0;
    for (int t = 0; t < 20; ++t) {
        std::array<OrientedPlane, 8> P;
        for (auto& p : P) p = {random_unit(g), oracle::uniform(g, -1, 1)};
        try {
            complete_octahedron(P, 0);
        } catch (const GeometryError&) {
            ++rejected;
        }
    }
    EXPECT_EQ(rejected, 20);
    EXPECT_THROW(complete_octahedron(minkowski_octahedron(kEll, kSpec, {1, 0, 0}).planes, 8), std::invalid_argument);
}

TEST(Propagation, ReproducesMinkowskiGrid) {
    const auto ps = box5();
    const auto a = minkowski_octahedron(kEll, kSpec, ps.seed);
    const auto b = minkowski_octahedron(kEll, kSpec, {2, 1, 0});
    const auto g = propagate_grid(a, b, ps);
    EXPECT_TRUE(g.incomplete.empty());
    EXPECT_EQ(g.octahedra.size(), 63u);
    EXPECT_EQ(g.flips, 0);
    double err = 0.0;
    for (const auto& [k, p] : g.planes)
        err = std::max(err, plane_distance(p, plane_from_label(kEll, {k.first, kSpec.lambda(k.first, k.second)})));
    EXPECT_LT(err, 1e-8);
    EXPECT_LT(g.closure_residual, 1e-8);
    EXPECT_LT(g.conical_residual, 1e-9);
    const auto d = propagate_grid(a, b, box5(Traversal::Descending));
    EXPECT_LT(grid_distance(g, d), 1e-9);

    const auto sphere = common_sphere(g);
    EXPECT_TRUE(sphere.degenerate);
    // every plane meets z = 0 at 45 degrees: v . (0,0,1) = 1/sqrt 2
    EXPECT_NEAR(std::abs(sphere.direction.z), 1.0, 1e-9);
    EXPECT_NEAR(sphere.offset * sphere.direction.z, -1.0 / std::sqrt(2.0), 1e-9);
    EXPECT_LT(sphere.residual, 1e-9);
}

TEST(Propagation, SphereSeedKeepsCommonSphere) {
    auto rng = oracle::rng(205);
    for (int t = 0; t < 5; ++t) {
        const Sphere S{{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)},
                       oracle::uniform(rng, 0.5, 2.0) * (t % 2 ? -1.0 : 1.0)};
        auto [a, b] = sphere_tangent_seed(S, 300 + t);
        // random Euclidean motion: a Laguerre map that keeps vertices concurrent
        const LaguerreMap m = LaguerreMap::translation({oracle::uniform(rng, -2, 2), oracle::uniform(rng, -2, 2), 0.3})
                                  .after(LaguerreMap::rotation(random_rotation(rng)));
        ASSERT_TRUE(m.preserves_points());
        a = transform(m, a);
        b = transform(m, b);
        const auto g = propagate_grid(a, b, box5());
        EXPECT_TRUE(g.incomplete.empty());
        const auto fit = common_sphere(g);
        ASSERT_FALSE(fit.degenerate);
        EXPECT_LT(fit.residual, 1e-8);
        const Sphere image = m.apply(S);
        EXPECT_LT(distance(fit.sphere.center, image.center), 1e-8);
        EXPECT_NEAR(fit.sphere.r, image.r, 1e-8);
        EXPECT_LT(grid_distance(g, propagate_grid(a, b, box5(Traversal::Descending))), 1e-9);
    }
}

TEST(Propagation, TranslationCovariance) {
    const double t = 0.37;
    const auto m = LaguerreMap::translation({0, 0, t});
    const auto a = minkowski_octahedron(kEll, kSpec, {1, 0, 0});
    const auto b = minkowski_octahedron(kEll, kSpec, {2, 1, 0});
    const auto g = propagate_grid(a, b, box5());
    const auto h = propagate_grid(transform(m, a), transform(m, b), box5());
    double err = 0.0;
    for (const auto& [k, p] : g.planes) {
        const OrientedPlane q{p.v, p.d + t * p.v.z};
        err = std::max(err, plane_distance(q, h.planes.at(k)));
    }
    EXPECT_LT(err, 1e-9);
}

TEST(Propagation, RejectsBadSeeds) {
    const auto a = minkowski_octahedron(kEll, kSpec, {1, 0, 0});
    auto b = minkowski_octahedron(kEll, kSpec, {2, 1, 0});
    // not sharing the edge
    const auto far = minkowski_octahedron(kEll, kSpec, {3, 0, 0});
    EXPECT_THROW(propagate_grid(a, far, box5()), GeometryError);
    b.planes[face_index(1, 1)].d += 1e-3;
    EXPECT_THROW(propagate_grid(a, b, box5()), GeometryError);
    PropagationSpec even = box5();
    even.seed = {0, 0, 0};
    EXPECT_THROW(propagate_grid(a, b, even), std::invalid_argument);
}

TEST(Laguerre, PreservesOrientedContact) {
    auto g = oracle::rng(206);
    for (int t = 0; t < 100; ++t) {
        const LaguerreMap m = LaguerreMap::boost(random_unit(g), oracle::uniform(g, -0.8, 0.8))
                                  .after(LaguerreMap::offset(oracle::uniform(g, -1, 1)))
                                  .after(LaguerreMap::rotation(random_rotation(g)))
                                  .after(LaguerreMap::translation(random_unit(g)));
        const Sphere S{random_unit(g), oracle::uniform(g, -2, 2)};
        const Vec3 v = random_unit(g);
        const OrientedPlane p{v, dot(v, S.center) + S.r};
        ASSERT_LT(plane_tangent_to_sphere(p, S), 1e-14);
        const auto q = m.apply(p);
        EXPECT_NEAR(norm(q.v), 1.0, 1e-12);
        EXPECT_LT(plane_tangent_to_sphere(q, m.apply(S)), 1e-10);
    }
}

TEST(Laguerre, MinkowskiImageStaysDegenerate) {
    // Laguerre maps fix the vertex of the Blaschke cylinder, so a sphere at
    // infinity stays at infinity
    auto g = oracle::rng(207);
    const auto grid = build_octahedral_grid(kEll, OctahedralGridSpec::closed(12, kEll.m));
    std::vector<OrientedPlane> planes;
    for (const auto& [k, p] : grid.planes) planes.push_back(p);
    for (int t = 0; t < 10; ++t) {
        const LaguerreMap m = LaguerreMap::boost(random_unit(g), oracle::uniform(g, -0.8, 0.8))
                                  .after(LaguerreMap::offset(oracle::uniform(g, -1, 1)))
                                  .after(LaguerreMap::rotation(random_rotation(g)));
        std::vector<OrientedPlane> image;
        for (const auto& p : planes) image.push_back(m.apply(p));
        const auto fit = common_sphere(image);
        EXPECT_TRUE(fit.degenerate);
        EXPECT_LT(fit.residual, 1e-9);
    }
}

TEST(CommonSphere, ExactRecoveryAndErrors) {
    auto g = oracle::rng(208);
    const Sphere S{{0.4, -1.1, 2.0}, -0.7};
    std::vector<OrientedPlane> P;
    for (int i = 0; i < 8; ++i) {
        const Vec3 v = random_unit(g);
        P.push_back({v, dot(v, S.center) + S.r});
    }
    const auto fit = common_sphere(P);
    ASSERT_FALSE(fit.degenerate);
    EXPECT_LT(distance(fit.sphere.center, S.center), 1e-12);
    EXPECT_NEAR(fit.sphere.r, S.r, 1e-12);
    P.resize(4);
    EXPECT_THROW(common_sphere(P), DegenerateConfiguration);
}
