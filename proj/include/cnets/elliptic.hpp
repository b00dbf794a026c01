#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cnets {

// Raised when a quotient is evaluated at (or numerically next to) a zero of
// its denominator. `distance` estimates how far the argument is from the pole.
class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, double distance)
        : std::domain_error(what), distance_(distance) {}
    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

struct JacobiTriple {
    double sn = 0.0;
    double cn = 1.0;
    double dn = 1.0;
};

namespace detail {

inline void check_modulus(double k, const char* where) {
    if (!(k >= 0.0 && k < 1.0))
        throw std::domain_error(std::string(where) + ": modulus k must lie in [0,1), got " +
                                std::to_string(k));
}

}  // namespace detail

// Complete elliptic integral of the first kind by the arithmetic-geometric mean.
inline double complete_k(double k) {
    detail::check_modulus(k, "complete_k");
    double a = 1.0;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (a + b);
}

struct Modulus {
    double k = 0.0;
    double kp = 1.0;
    double kk = std::numbers::pi / 2;

    Modulus() = default;
    explicit Modulus(double k_) : k(k_), kp(std::sqrt((1.0 - k_) * (1.0 + k_))), kk(complete_k(k_)) {}
};

namespace detail {

// AGM/Gauss phase recursion, valid for 0 <= s <= K(k).
inline JacobiTriple jacobi_reduced(double s, double k, double kp) {
    constexpr int kMax = 32;
    double a[kMax + 1], c[kMax + 1];
    a[0] = 1.0;
    c[0] = k;
    double b = kp;
    int n = 0;
    while (n < kMax && std::abs(c[n]) > 1e-17 * a[n]) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * s, n);
    for (int i = n; i > 0; --i) phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
    JacobiTriple t;
    t.sn = std::sin(phi);
    t.cn = std::cos(phi);
    t.dn = std::sqrt(kp * kp + k * k * t.cn * t.cn);
    return t;
}

}  // namespace detail

inline JacobiTriple jacobi(double s, const Modulus& m) {
    if (!std::isfinite(s)) throw std::domain_error("jacobi: non-finite argument");
    const double kk = m.kk;
    double r = std::remainder(s, 4.0 * kk);  // r in [-2K, 2K]
    const double sign = r < 0.0 ? -1.0 : 1.0;
    r = std::abs(r);
    double cn_sign = 1.0;
    if (r > kk) {
        r = 2.0 * kk - r;
        cn_sign = -1.0;
    }
    JacobiTriple t = detail::jacobi_reduced(r, m.k, m.kp);
    t.sn *= sign;
    t.cn *= cn_sign;
    return t;
}

inline JacobiTriple jacobi(double s, double k) {
    detail::check_modulus(k, "jacobi");
    return jacobi(s, Modulus(k));
}

// Glaisher quotients; the first letter names the numerator, "n" stands for 1.
enum class Quotient { ns, nc, nd, sc, sd, cs, cd, ds, dc };

inline std::string_view quotient_name(Quotient q) {
    constexpr std::string_view names[] = {"ns", "nc", "nd", "sc", "sd", "cs", "cd", "ds", "dc"};
    return names[static_cast<int>(q)];
}

inline Quotient parse_quotient(std::string_view code) {
    for (int i = 0; i < 9; ++i)
        if (quotient_name(static_cast<Quotient>(i)) == code) return static_cast<Quotient>(i);
    throw std::invalid_argument("unknown Jacobi quotient code '" + std::string(code) + "'");
}

inline constexpr double kPoleThreshold = 1e-13;

namespace detail {

inline double letter_value(char c, const JacobiTriple& t) {
    switch (c) {
        case 's': return t.sn;
        case 'c': return t.cn;
        case 'd': return t.dn;
        default: return 1.0;
    }
}

// Derivative magnitude of sn/cn/dn in s, used to turn a small denominator
// into a distance to the pole.
inline double letter_slope(char c, const JacobiTriple& t, double k) {
    switch (c) {
        case 's': return std::abs(t.cn * t.dn);
        case 'c': return std::abs(t.sn * t.dn);
        case 'd': return k * k * std::abs(t.sn * t.cn);
        default: return 0.0;
    }
}

}  // namespace detail

inline double quotient_of(Quotient q, const JacobiTriple& t, double k, double s = 0.0) {
    const std::string_view name = quotient_name(q);
    const double num = detail::letter_value(name[0], t);
    const double den = detail::letter_value(name[1], t);
    if (std::abs(den) < kPoleThreshold) {
        const double slope = detail::letter_slope(name[1], t, k);
        const double dist = slope > 0.0 ? std::abs(den) / slope : 0.0;
        throw PoleError("jacobi quotient " + std::string(name) + " has a pole near s=" +
                            std::to_string(s) + " (denominator " + std::to_string(den) + ")",
                        dist);
    }
    return num / den;
}

inline double jacobi_quotient(Quotient q, double s, const Modulus& m) {
    return quotient_of(q, jacobi(s, m), m.k, s);
}

inline double jacobi_quotient(Quotient q, double s, double k) {
    detail::check_modulus(k, "jacobi_quotient");
    return jacobi_quotient(q, s, Modulus(k));
}

inline double jacobi_quotient(std::string_view code, double s, double k) {
    return jacobi_quotient(parse_quotient(code), s, k);
}

// (-i sn(is,k2), cn(is,k2), dn(is,k2)) through the real identities at the
// complementary modulus: (sc, nc, dc)(s, sqrt(1-k2^2)).
inline JacobiTriple jacobi_imaginary(double s, double k2) {
    if (!(k2 > 0.0 && k2 < 1.0))
        throw std::domain_error("jacobi_imaginary: modulus must lie in (0,1)");
    const Modulus m1(std::sqrt((1.0 - k2) * (1.0 + k2)));
    const JacobiTriple t = jacobi(s, m1);
    JacobiTriple r;
    r.sn = quotient_of(Quotient::sc, t, m1.k, s);
    r.cn = quotient_of(Quotient::nc, t, m1.k, s);
    r.dn = quotient_of(Quotient::dc, t, m1.k, s);
    return r;
}

// Carlson's symmetric integral R_F by duplication.
inline double carlson_rf(double x, double y, double z) {
    if (x < 0.0 || y < 0.0 || z < 0.0 || (x + y == 0.0) || (x + z == 0.0) || (y + z == 0.0))
        throw std::domain_error("carlson_rf: invalid arguments");
    for (int i = 0; i < 100; ++i) {
        const double mu = (x + y + z) / 3.0;
        const double dx = 1.0 - x / mu, dy = 1.0 - y / mu, dz = 1.0 - z / mu;
        const double eps = std::max({std::abs(dx), std::abs(dy), std::abs(dz)});
        if (eps < 1e-4) {
            const double e2 = dx * dy - dz * dz;
            const double e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mu);
        }
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    const double mu = (x + y + z) / 3.0;
    return 1.0 / std::sqrt(mu);
}

// Incomplete integral F(phi, k) for |phi| <= pi/2.
inline double incomplete_f(double phi, double k) {
    detail::check_modulus(k, "incomplete_f");
    if (std::abs(phi) > std::numbers::pi / 2 + 1e-15)
        throw std::domain_error("incomplete_f: |phi| must not exceed pi/2");
    const double s = std::sin(phi), c = std::cos(phi);
    if (s == 0.0) return 0.0;
    return s * carlson_rf(c * c, (1.0 - k * s) * (1.0 + k * s), 1.0);
}

// Principal inverse of sn: the s in [-K, K] with sn(s,k) = x.
inline double arcsn(double x, double k) {
    if (!(std::abs(x) <= 1.0)) throw std::domain_error("arcsn: |x| must not exceed 1");
    return incomplete_f(std::asin(x), k);
}

}  // namespace cnets
