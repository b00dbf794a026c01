// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "cnets/cnets.hpp"
#include "oracles.hpp"

using namespace cnets;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Accumulates named checks of one criterion into a single line.
class Criterion {
public:
    explicit Criterion(int id, std::string title) : id_(id), title_(std::move(title)), t0_(Clock::now()) {}

    void check(const std::string& what, double value, double bound, bool strict = false) {
        const bool ok = strict ? value < bound : value <= bound;
        pass_ = pass_ && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %.2e %s %.0e%s", what.c_str(), value, strict ? "<" : "<=", bound,
                      ok ? "" : " [failed]");
        parts_.push_back(buf);
    }
    void require(const std::string& what, bool ok) {
        pass_ = pass_ && ok;
        parts_.push_back(what + (ok ? "" : " [failed]"));
    }
    void runtime(double limit) { check("runtime s", seconds_since(t0_), limit, true); }

    bool report() const {
        std::ostringstream os;
        os << (pass_ ? "PASS" : "FAIL") << " criterion " << id_ << " (" << title_ << "):";
        for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "; " : " ") << parts_[i];
        std::cout << os.str() << std::endl;
        return pass_;
    }

private:
    int id_;
    std::string title_;
    Clock::time_point t0_;
    bool pass_ = true;
    std::vector<std::string> parts_;
};

// An exception inside a criterion is a failure of that criterion, not of the run.
bool guarded(int id, const std::string& title, const std::function<void(Criterion&)>& body) {
    Criterion c(id, title);
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(std::string("threw: ") + e.what(), false);
    }
    return c.report();
}

// ---- 1 ----
void elliptic_layer(Criterion& c) {
    auto g = oracle::rng(1001);
    double ident = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double k = oracle::uniform(g, 0.0, 0.999);
        const double s = oracle::uniform(g, -50.0, 50.0);
        const auto t = jacobi(s, k);
        ident = std::max({ident, std::abs(t.sn * t.sn + t.cn * t.cn - 1.0),
                          std::abs(t.dn * t.dn + k * k * t.sn * t.sn - 1.0)});
    }
    c.check("sn/cn/dn identities", ident, 1e-12);
    double kerr = 0.0;
    for (double k : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99})
        kerr = std::max(kerr, std::abs(complete_k(k) - oracle::complete_k_quadrature(k)));
    c.check("K vs quadrature", kerr, 1e-12);
    c.runtime(1.0);
}

// ---- 2 ----
void conformal_flatness(Criterion& c) {
    auto g = oracle::rng(1002);
    double offdiag = 0.0, ratio = 0.0, ufac = 0.0;
    const double expect[3] = {1.0, -1.0, 1.0};  // fixed u1, u2, u3
    for (int sys_i = 0; sys_i < 3; ++sys_i) {
        const double cc = oracle::uniform(g, -1.0, 1.0);
        const double bb = cc + oracle::uniform(g, 0.5, 3.0);
        const double aa = bb + oracle::uniform(g, 0.5, 3.0);
        const ConfocalSystem sys(aa, bb, cc);
        for (int fixed = 0; fixed < 3; ++fixed)
            for (int i = 0; i < 100; ++i) {
                const SParams s{oracle::uniform(g, 0.1, sys.m1.kk - 0.1), oracle::uniform(g, 0.1, sys.m2.kk - 0.1),
                                oracle::uniform(g, 0.1, sys.m1.kk - 0.1)};
                const auto ff = second_fundamental_form(sys, s, fixed);
                offdiag = std::max(offdiag, std::abs(ff.f) / std::max(std::abs(ff.e), std::abs(ff.g)));
                ratio = std::max(ratio, std::abs(ff.e / ff.g - expect[fixed]));
                if (fixed == 0)
                    for (double r : factor_ratio_check(sys, s)) ufac = std::max(ufac, r);
            }
    }
    c.check("II off-diagonal rel", offdiag, 1e-7, true);
    c.check("e/g vs (+1,-1,+1)", ratio, 1e-6);
    c.check("U residuals", ufac, 1e-6, true);
}

// ---- 3 ----
void ac_suite(Criterion& c) {
    const ConfocalSystem sys(3, 2, 0);
    const GridSpec spec = GridSpec::closed(16, sys.m1, {0.05, 0.11});
    std::vector<double> members{-sys.b};
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) members.push_back(-sys.b + t * (sys.b - sys.c));
    members.push_back(-sys.c);
    std::vector<ACGrid> grids;
    for (double u2 : members) grids.push_back(build_ac_grid(sys, u2, spec));
    // edge sums on the five hyperboloids, read off the vertices
    double edge = 0.0;
    std::size_t quads = 0;
    for (std::size_t m = 1; m + 1 < grids.size(); ++m)
        for (const auto& q : ac_quads(grids[m])) {
            const Vec3 A = q.corners[0], B = q.corners[1], C = q.corners[2], D = q.corners[3];
            double diam = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j) diam = std::max(diam, distance(q.corners[i], q.corners[j]));
            edge = std::max(edge, std::abs(distance(A, B) + distance(C, D) - distance(B, C) - distance(D, A)) /
                                      std::max(1.0, diam));
            ++quads;
        }
    c.check("edge sums (" + std::to_string(quads) + " quads)", edge, 1e-9);
    // segment lengths along asymptotic lines over all seven members
    double iso = 0.0;
    for (const auto& line : grids[0].lines)
        for (std::size_t i = 0; i + 1 < line.vertices.size(); ++i) {
            const auto a = line.vertices[i], b = line.vertices[i + 1];
            if (grids[0].pole_between(a, b)) continue;
            const double ref = distance(grids[0].vertices.at(a), grids[0].vertices.at(b));
            for (const auto& gm : grids) {
                if (gm.pole_between(a, b)) continue;
                const Vec3 *p = gm.find(a.first, a.second), *q = gm.find(b.first, b.second);
                if (!p || !q) {
                    iso = std::numeric_limits<double>::infinity();
                    continue;
                }
                iso = std::max(iso, std::abs(distance(*p, *q) - ref));
            }
        }
    c.check("asymptotic lengths across 7 members", iso, 1e-9);
    double incircle = 0.0, tangency = 0.0;
    std::size_t nets = 0, rejected = 0;
    for (ICLimit which : {ICLimit::Ellipse, ICLimit::Hyperbola}) {
        const ICNet net = planar_limit_ic(sys, spec, which);
        for (const auto& q : net.quads) {
            // independent: contact of the incircle with the four side lines through the sampled corners
            const double scale = std::max(1.0, detail::quad_diameter(q.corners));
            for (int i = 0; i < 4; ++i) {
                const auto l = OrientedLine2D::through(q.corners[i], q.corners[(i + 1) % 4]);
                incircle = std::max(incircle, std::abs(std::abs(l.signed_distance(q.incircle.center)) -
                                                       std::abs(q.incircle.r)) / scale);
            }
        }
        nets += net.quads.size();
        rejected += net.rejected.size();
        // tangency to x^2/A + y^2/B = 1: p^2 = A n_x^2 + B n_y^2 for a line n.x = p
        for (const auto* fam : {&net.lines_l, &net.lines_m})
            for (const auto& [k, l] : *fam)
                tangency = std::max(tangency, std::abs(l.c * l.c - net.conic_a * l.n.x * l.n.x - net.conic_b * l.n.y * l.n.y));
    }
    c.check("planar incircles (" + std::to_string(nets) + " quads)", incircle, 1e-9, true);
    c.require("no rejected quads", rejected == 0);
    c.check("focal conic tangency", tangency, 1e-9, true);
    c.runtime(10.0);
}

// ---- 4 ----
void cc_suite(Criterion& c) {
    const ConfocalSystem sys(3, 2, 0);
    GridSpec spec;
    spec.delta = 0.06;
    spec.offset = {std::numbers::pi / 2, 0.0};
    spec.lo = {-6, -6};
    spec.hi = {7, 7};
    const CircularParametrization cp{sys, 1};
    const std::vector<double> s3s{0.0, 0.4, cp.spherical_s3(), 1.2, std::numbers::pi / 2};
    std::vector<CCGrid> grids;
    for (double s3 : s3s) grids.push_back(build_cc_grid(sys, s3, spec));
    double radius = 0.0;
    for (const auto& g : grids)
        for (const auto& chain : g.circles) {
            const auto pts = chain_points(g.vertices, chain);
            if (pts.size() < 3) continue;
            // circumradius of three spread points
            const Vec3 a = pts.front(), b = pts[pts.size() / 2], d = pts.back();
            const double R = distance(a, b) * distance(b, d) * distance(d, a) / (2.0 * norm(cross(b - a, d - a)));
            radius = std::max(radius, std::abs(R - std::abs(std::sin(g.label(chain)))));
        }
    c.check("radii |sin alpha|, |sin beta|", radius, 1e-9);
    double chord = 0.0;
    for (const auto& chain : grids[0].circles)
        for (std::size_t i = 0; i < chain.vertices.size(); ++i)
            for (std::size_t j = i + 1; j < chain.vertices.size(); ++j) {
                const auto &a = chain.vertices[i], &b = chain.vertices[j];
                const double ref = distance(grids[0].vertices.at(a), grids[0].vertices.at(b));
                for (const auto& g : grids) {
                    const auto pa = g.vertices.find(a), pb = g.vertices.find(b);
                    if (pa == g.vertices.end() || pb == g.vertices.end()) {
                        chord = std::numeric_limits<double>::infinity();
                        continue;
                    }
                    chord = std::max(chord, std::abs(distance(pa->second, pb->second) - ref));
                }
            }
    c.check("chords over 5 deformations", chord, 1e-9);
    double det = 0.0;
    std::size_t nq = 0;
    GridSpec hs;
    hs.delta = 0.08;
    hs.offset = {std::numbers::pi / 2 + 0.013, 0.021};
    hs.lo = {-8, -8};
    hs.hi = {9, 9};
    for (HICLimit which : {HICLimit::S3Zero, HICLimit::S3HalfPi}) {
        const HICNet net = planar_limit_hic(sys, hs, which);
        for (const auto& q : net.quads) {
            // independent evaluation of det[1, cos t, eps sin t, cos 2t]
            Eigen::Matrix4d M;
            for (int i = 0; i < 4; ++i)
                M.row(i) << 1.0, std::cos(q.labels[i]), kHICPattern[i] * std::sin(q.labels[i]), std::cos(2 * q.labels[i]);
            det = std::max(det, std::abs(M.determinant()));
            ++nq;
        }
    }
    c.check("HIC determinant (" + std::to_string(nq) + " quads)", det, 1e-10);
}

// ---- 5 ----
void octahedral_web(Criterion& c) {
    const ConfocalSystem sys(3, 2, 0);
    auto g = oracle::rng(1005);
    double closure = 0.0;
    int bad_index = 0;
    for (int t = 0; t < 50; ++t) {
        const double delta = oracle::uniform(g, 0.03, 0.07);
        const double K[3] = {sys.m1.kk, sys.m2.kk, sys.m1.kk};
        SParams s;
        do {
            for (int i = 0; i < 3; ++i) s[i] = oracle::uniform(g, 0.0, K[i]);
        } while (!inside_principal_box(sys, s, 1.3 * delta, 0.1));
        const auto oct = octahedron_3d(sys, s, delta);
        for (const auto& f : oct.faces) closure = std::max(closure, triangular_closure(oct, f).residual);
        for (int axis = 0; axis < 3; ++axis) {
            const auto& a = oct.vertices[oct.diagonals[axis][0]].s;
            const auto& b = oct.vertices[oct.diagonals[axis][1]].s;
            for (int i = 0; i < 3; ++i) bad_index += (i == axis) == (a[i] == b[i]);
        }
    }
    c.check("triangular closure, 50 octahedra", closure, 1e-9);
    c.require("diagonals change one parameter", bad_index == 0);
}

// ---- 6 ----
void minkowski_suite(Criterion& c) {
    auto g = oracle::rng(1006);
    double angle = 0.0, tangency = 0.0, concurrency = 0.0, conical = 0.0, trace = 0.0, trace_tan = 0.0;
    double white = 0.0;
    std::size_t vertices = 0, skipped = 0, white_n = 0, black_with = 0, white_without = 0;
    for (auto variant : {MinkowskiVariant::Elliptic, MinkowskiVariant::Hyperbolic}) {
        const MinkowskiSystem sys(variant, 0.8);
        const auto spec = OctahedralGridSpec::closed(12, sys.m);
        const auto grid = build_octahedral_grid(sys, spec);
        for (const auto& [key, p] : grid.planes) {
            angle = std::max(angle, std::abs(std::asin(std::abs(p.v.z)) - std::numbers::pi / 4));
            // dual quadric: v.x = d touches x^2/A + y^2/B - z^2/C = 1 iff d^2 = A vx^2 + B vy^2 - C vz^2
            for (int j = 0; j < 10; ++j) {
                double mu = oracle::uniform(g, -3.0, 3.0);
                for (double f : {sys.a, sys.b, sys.c})
                    if (std::abs(mu + f) < 1e-3) mu += 0.01;
                const double A = mu + sys.a, B = mu + sys.b, C = mu + sys.c;
                tangency = std::max(tangency, std::abs(p.d * p.d - A * p.v.x * p.v.x - B * p.v.y * p.v.y + C * p.v.z * p.v.z));
            }
        }
        // every admissible quadruple: the four planes pass through the vertex and touch the vertical 45 degree cone there
        for (const auto& v : grid.vertices) {
            if (v.n[0] + v.n[3] != v.n[1] + v.n[2]) {
                concurrency = std::numeric_limits<double>::infinity();
                continue;
            }
            const auto P = vertex_planes(sys, spec, v.n);
            const double scale = std::max(1.0, norm(v.pos));
            for (const auto& p : P) {
                concurrency = std::max(concurrency, std::abs(dot(p.v, v.pos) - p.d) / scale);
                conical = std::max(conical, std::abs(p.v.z - std::sqrt(0.5)));
            }
        }
        vertices += grid.vertices.size();
        skipped += grid.skipped.size();
        const TraceNet net = z0_trace(sys, spec);
        for (const auto& q : net.quads) trace = std::max(trace, q.residual);
        trace_tan = std::max(trace_tan, net.max_tangency_residual());
        const auto slice = checkerboard_slice(grid, 0.1);
        for (const auto& q : slice.quads) {
            if (q.degenerate) continue;
            if (q.white) {
                ++white_n;
                white = std::max(white, q.contact_residual);
                white_without += !q.incircle_exists;
            } else {
                black_with += q.incircle_exists;
            }
        }
    }
    c.check("45 deg", angle, 1e-12);
    c.check("confocal tangency", tangency, 1e-10);
    c.check("concurrency (" + std::to_string(vertices) + " vertices, " + std::to_string(skipped) + " at infinity)",
            concurrency, 1e-9);
    c.check("vertical 90 deg cone", conical, 1e-9);
    c.check("z=0 trace incircles", trace, 1e-9, true);
    c.check("trace conic tangency", trace_tan, 1e-9, true);
    c.check("z=0.1 white incircles (" + std::to_string(white_n) + ")", white, 1e-9, true);
    c.require("incircles exactly on white quads", black_with == 0 && white_without == 0);
    c.runtime(30.0);
}

// ---- 7 ----
OctahedralGridSpec lattice_spec(SParams s0, double delta) {
    OctahedralGridSpec spec;
    spec.delta = delta;
    spec.lambda0 = {s0.s1 + s0.s2 + s0.s3, s0.s1 + s0.s2 - s0.s3, s0.s1 - s0.s2 + s0.s3, s0.s1 - s0.s2 - s0.s3};
    return spec;
}

void conical_suite(Criterion& c) {
    auto g = oracle::rng(1007);
    const MinkowskiSystem ell(MinkowskiVariant::Elliptic, 0.8);
    double recover = 0.0;
    for (int t = 0; t < 100; ++t) {
        OrientedOctahedron o;
        if (t % 2 == 0) {
            const SParams s0{oracle::uniform(g, 0.5, 1.5), oracle::uniform(g, 0.5, 1.5), oracle::uniform(g, 0.5, 1.5)};
            o = minkowski_octahedron(ell, lattice_spec(s0, oracle::uniform(g, 0.05, 0.2)), {1, 0, 0});
        } else {
            o = sphere_tangent_seed({{oracle::uniform(g, -1, 1), oracle::uniform(g, -1, 1), 0.0}, oracle::uniform(g, 0.5, 2.0)},
                                    2000 + t)
                    .first;
        }
        const int f = t % 8;
        recover = std::max(recover, plane_distance(complete_octahedron(o.planes, f).plane, o.planes[f]));
    }
    c.check("deleted plane recovered (100)", recover, 1e-9);

    const auto spec = lattice_spec({0.8, 0.7, 0.9}, 0.1);
    PropagationSpec ps;  // 5 x 5 x 5 lattice box
    const auto A = minkowski_octahedron(ell, spec, ps.seed);
    const auto B = minkowski_octahedron(ell, spec, {ps.seed[0] + 1, ps.seed[1] + 1, ps.seed[2]});
    const auto up = propagate_grid(A, B, ps);
    ps.order = Traversal::Descending;
    const auto down = propagate_grid(A, B, ps);
    double analytic = 0.0, order = 0.0;
    for (const auto& [k, p] : up.planes) {
        analytic = std::max(analytic, plane_distance(p, plane_from_label(ell, {k.first, spec.lambda(k.first, k.second)})));
        order = std::max(order, plane_distance(p, down.planes.at(k)));
    }
    c.require(std::to_string(up.octahedra.size()) + " octahedra, none incomplete",
              up.incomplete.empty() && down.planes.size() == up.planes.size());
    c.check("analytic grid", analytic, 1e-8);
    c.check("traversal order", order, 1e-9);

    const auto mfit = common_sphere(up);
    c.require("Minkowski grid sphere degenerate", mfit.degenerate);
    // nondegenerate case: sphere-tangent seed moved by a Euclidean Laguerre map
    double sphere_res = 0.0;
    bool finite = true;
    for (int t = 0; t < 5; ++t) {
        const Sphere S{{oracle::uniform(g, -1, 1), oracle::uniform(g, -1, 1), oracle::uniform(g, -1, 1)},
                       oracle::uniform(g, 0.5, 2.0)};
        auto [a, b] = sphere_tangent_seed(S, 3000 + t);
        Eigen::Matrix3d R = Eigen::AngleAxisd(oracle::uniform(g, 0, 6.28), Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
        const LaguerreMap m =
            LaguerreMap::translation({oracle::uniform(g, -2, 2), oracle::uniform(g, -2, 2), oracle::uniform(g, -2, 2)})
                .after(LaguerreMap::rotation(R));
        const auto grid = propagate_grid(transform(m, a), transform(m, b), PropagationSpec{});
        const auto fit = common_sphere(grid);
        finite = finite && !fit.degenerate;
        const Sphere img = m.apply(S);
        sphere_res = std::max({sphere_res, fit.residual, distance(fit.sphere.center, img.center), std::abs(fit.sphere.r - img.r)});
    }
    c.require("Laguerre-moved sphere grids finite", finite);
    c.check("common sphere", sphere_res, 1e-8, true);
}

// ---- 8 ----
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void cli_suite(Criterion& c, Clock::time_point run_start) {
    const fs::path src = CNETS_SOURCE_DIR;
    const fs::path dir = fs::temp_directory_path() / ("cnets_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    int same = 0;
    const std::vector<std::string> figs{"fig01_ic_sampling", "fig05_ac_grid",      "fig07_cc_grid",
                                        "fig10_octahedron",  "fig15_octahedral_elliptic", "fig16_octahedral_hyperbolic"};
    for (const auto& f : figs) {
        const fs::path out = dir / (f + ".json");
        const std::string cmd = std::string("\"") + CNETS_CLI_PATH + "\" generate \"" + (src / "docs/recipes" / (f + ".json")).string() +
                                "\" -o \"" + out.string() + "\" >/dev/null 2>&1";
        if (shell(cmd) == 0 && slurp(out) == slurp(src / "tests/golden" / (f + ".json"))) ++same;
    }
    c.require(std::to_string(same) + "/6 figure goldens byte-identical", same == 6);
    // the unit suites, timed together with this run
    double suites = 0.0;
    std::istringstream bins(CNETS_TEST_BINARIES);
    std::string bin;
    bool ok = true;
    while (std::getline(bins, bin, ';')) {
        const auto t0 = Clock::now();
        ok = shell("\"" + bin + "\" >/dev/null 2>&1") == 0 && ok;
        suites += seconds_since(t0);
    }
    fs::remove_all(dir);
    c.require("unit suites pass", ok);
    c.check("full suite wall clock s", seconds_since(run_start) + suites, 120.0, true);
}

}  // namespace

int main() {
    const auto start = Clock::now();
    bool ok = true;
    ok &= guarded(1, "elliptic functions", elliptic_layer);
    ok &= guarded(2, "conformal flatness", conformal_flatness);
    ok &= guarded(3, "AC grids", ac_suite);
    ok &= guarded(4, "CC grids", cc_suite);
    ok &= guarded(5, "octahedral web", octahedral_web);
    ok &= guarded(6, "Minkowski grids", minkowski_suite);
    ok &= guarded(7, "conical grids", conical_suite);
    ok &= guarded(8, "CLI", [&](Criterion& c) { cli_suite(c, start); });
    return ok ? 0 : 1;
}
