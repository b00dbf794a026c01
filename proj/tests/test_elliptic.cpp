#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cnets/elliptic.hpp"
#include "oracles.hpp"

using namespace cnets;

TEST(CompleteK, ZeroModulusIsHalfPi) { EXPECT_DOUBLE_EQ(complete_k(0.0), std::numbers::pi / 2); }

TEST(CompleteK, MatchesQuadrature) {
    for (double k : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99})
        EXPECT_NEAR(complete_k(k), oracle::complete_k_quadrature(k), 1e-12) << "k=" << k;
}

TEST(CompleteK, NearUnitModulus) {
    const double kk = complete_k(0.999999);
    EXPECT_TRUE(std::isfinite(kk));
    EXPECT_GT(kk, 7.0);
    EXPECT_NEAR(kk, std::comp_ellint_1(0.999999), 1e-11);
    // logarithmic growth: K ~ ln(4/k')
    const double kp = std::sqrt(1.0 - 0.999999 * 0.999999);
    EXPECT_NEAR(kk, std::log(4.0 / kp), 1e-4);
}

TEST(CompleteK, Monotone) {
    double prev = complete_k(0.0);
    for (int i = 1; i < 100; ++i) {
        const double cur = complete_k(i / 100.0);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(CompleteK, DomainErrors) {
    EXPECT_THROW(complete_k(-0.1), std::domain_error);
    EXPECT_THROW(complete_k(1.0), std::domain_error);
    EXPECT_THROW(jacobi(0.3, 1.0), std::domain_error);
}

TEST(Jacobi, AtZero) {
    for (double k : {0.0, 0.3, 0.9}) {
        const auto t = jacobi(0.0, k);
        EXPECT_EQ(t.sn, 0.0);
        EXPECT_EQ(t.cn, 1.0);
        EXPECT_EQ(t.dn, 1.0);
    }
}

TEST(Jacobi, QuarterPeriod) {
    const Modulus m(0.6);
    const auto t = jacobi(m.kk, m);
    EXPECT_NEAR(t.sn, 1.0, 1e-15);
    EXPECT_NEAR(t.cn, 0.0, 1e-15);
    EXPECT_NEAR(t.dn, 0.8, 1e-15);
}

TEST(Jacobi, MatchesLanden) {
    const auto t = jacobi(0.7, 0.8);
    const auto o = oracle::landen_real(0.7, 0.8);
    EXPECT_NEAR(t.sn, o[0], 1e-12);
    EXPECT_NEAR(t.cn, o[1], 1e-12);
    EXPECT_NEAR(t.dn, o[2], 1e-12);
    auto g = oracle::rng(7);
    for (int i = 0; i < 500; ++i) {
        const double k = oracle::uniform(g, 0.0, 0.995);
        const double s = oracle::uniform(g, -20.0, 20.0);
        const auto a = jacobi(s, k);
        const auto b = oracle::landen_real(s, k);
        ASSERT_NEAR(a.sn, b[0], 1e-11) << s << " " << k;
        ASSERT_NEAR(a.cn, b[1], 1e-11) << s << " " << k;
        ASSERT_NEAR(a.dn, b[2], 1e-11) << s << " " << k;
    }
}

TEST(Jacobi, Identities) {
    auto g = oracle::rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double k = oracle::uniform(g, 0.0, 0.999);
        const double s = oracle::uniform(g, -50.0, 50.0);
        const auto t = jacobi(s, k);
        ASSERT_LT(std::abs(t.sn * t.sn + t.cn * t.cn - 1.0), 1e-12);
        ASSERT_LT(std::abs(t.dn * t.dn + k * k * t.sn * t.sn - 1.0), 1e-12);
        ASSERT_GE(t.dn, std::sqrt(1 - k * k) - 1e-12);
    }
}

TEST(Jacobi, Periodicity) {
    auto g = oracle::rng(3);
    for (int i = 0; i < 200; ++i) {
        const Modulus m(oracle::uniform(g, 0.0, 0.99));
        const double s = oracle::uniform(g, -10.0, 10.0);
        const auto t = jacobi(s, m);
        const auto t4 = jacobi(s + 4.0 * m.kk, m);
        const auto t2 = jacobi(s + 2.0 * m.kk, m);
        ASSERT_NEAR(t.sn, t4.sn, 1e-10);
        ASSERT_NEAR(t.cn, t4.cn, 1e-10);
        ASSERT_NEAR(t.dn, t2.dn, 1e-10);
        ASSERT_NEAR(t.sn, -t2.sn, 1e-10);
    }
}

TEST(Jacobi, TrigonometricLimit) {
    for (double s = -30.0; s < 30.0; s += 0.37) {
        const auto t = jacobi(s, 0.0);
        EXPECT_NEAR(t.sn, std::sin(s), 1e-13);
        EXPECT_NEAR(t.cn, std::cos(s), 1e-13);
        EXPECT_EQ(t.dn, 1.0);
    }
}

TEST(Jacobi, AdditionTheorem) {
    auto g = oracle::rng(5);
    for (int i = 0; i < 300; ++i) {
        const double k = oracle::uniform(g, 0.0, 0.99);
        const double u = oracle::uniform(g, -4.0, 4.0), v = oracle::uniform(g, -4.0, 4.0);
        const auto a = jacobi(u, k), b = jacobi(v, k), c = jacobi(u + v, k);
        const double den = 1.0 - k * k * a.sn * a.sn * b.sn * b.sn;
        ASSERT_NEAR((a.sn * b.cn * b.dn + b.sn * a.cn * a.dn) / den, c.sn, 1e-10);
        ASSERT_NEAR((a.cn * b.cn - a.sn * a.dn * b.sn * b.dn) / den, c.cn, 1e-10);
    }
}

TEST(Quotient, Values) {
    const Modulus m(0.6);
    EXPECT_NEAR(jacobi_quotient(Quotient::ns, m.kk, m), 1.0, 1e-15);
    EXPECT_EQ(jacobi_quotient("dc", 0.0, 0.3), 1.0);
    const auto t = jacobi(1.1, 0.4);
    EXPECT_DOUBLE_EQ(jacobi_quotient("ds", 1.1, 0.4), t.dn / t.sn);
    EXPECT_DOUBLE_EQ(jacobi_quotient("cd", 1.1, 0.4), t.cn / t.dn);
    EXPECT_DOUBLE_EQ(jacobi_quotient("nd", 1.1, 0.4), 1.0 / t.dn);
    EXPECT_THROW(parse_quotient("xx"), std::invalid_argument);
}

TEST(Quotient, PoleDiagnostic) {
    EXPECT_THROW(jacobi_quotient("ns", 0.0, 0.5), PoleError);
    const Modulus m(0.5);
    try {
        jacobi_quotient(Quotient::nc, m.kk, m);
        FAIL() << "expected a pole";
    } catch (const PoleError& e) {
        EXPECT_LT(e.distance(), 1e-12);
    }
    EXPECT_NO_THROW(jacobi_quotient("ns", 1e-6, 0.5));
}

TEST(Imaginary, MatchesComplementaryQuotients) {
    const auto z = jacobi_imaginary(0.0, 0.5);
    EXPECT_EQ(z.sn, 0.0);
    EXPECT_EQ(z.cn, 1.0);
    EXPECT_EQ(z.dn, 1.0);
    const auto t = jacobi_imaginary(0.5, 0.6);
    EXPECT_NEAR(t.sn, jacobi_quotient("sc", 0.5, 0.8), 1e-15);
    EXPECT_NEAR(t.cn, jacobi_quotient("nc", 0.5, 0.8), 1e-15);
    EXPECT_NEAR(t.dn, jacobi_quotient("dc", 0.5, 0.8), 1e-15);
}

TEST(Imaginary, IdentitiesAndComplexOracle) {
    const double k2 = 0.28;
    const auto t = jacobi_imaginary(0.3, k2);
    EXPECT_LT(std::abs(t.cn * t.cn - t.sn * t.sn - 1.0), 1e-11);
    EXPECT_LT(std::abs(t.dn * t.dn - k2 * k2 * t.sn * t.sn - 1.0), 1e-11);
    const auto c = oracle::landen(oracle::cplx(0.0, 0.3), k2);
    EXPECT_NEAR(t.sn, (oracle::cplx(0.0, -1.0) * c.sn).real(), 1e-11);
    EXPECT_NEAR(t.cn, c.cn.real(), 1e-11);
    EXPECT_NEAR(t.dn, c.dn.real(), 1e-11);
    const double k1 = std::sqrt(1 - k2 * k2);
    EXPECT_THROW(jacobi_imaginary(complete_k(k1), k2), PoleError);
}

TEST(Inverse, ArcsnMatchesQuadrature) {
    auto g = oracle::rng(19);
    for (int i = 0; i < 100; ++i) {
        const double k = oracle::uniform(g, 0.0, 0.99);
        const double x = oracle::uniform(g, -1.0, 1.0);
        const double s = arcsn(x, k);
        EXPECT_NEAR(jacobi(s, k).sn, x, 1e-13);
        EXPECT_NEAR(std::abs(s), oracle::incomplete_f_quadrature(std::asin(std::abs(x)), k), 1e-12);
    }
    EXPECT_NEAR(arcsn(1.0, 0.7), complete_k(0.7), 1e-12);
}
