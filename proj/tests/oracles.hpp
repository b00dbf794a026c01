#pragma once
// Reference computations used only by the tests. They share no code with the
// library implementations they check.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using cplx = std::complex<double>;

// K(k) as a direct quadrature of the defining integral.
inline double complete_k_quadrature(double k) {
    auto f = [k](double t) {
        const double s = std::sin(t);
        return 1.0 / std::sqrt(1.0 - k * k * s * s);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi / 2, 12,
                                                                          1e-14);
}

// F(phi, k) by quadrature.
inline double incomplete_f_quadrature(double phi, double k) {
    auto f = [k](double t) {
        const double s = std::sin(t);
        return 1.0 / std::sqrt(1.0 - k * k * s * s);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, phi, 12, 1e-14);
}

struct CTriple {
    cplx sn, cn, dn;
};

// Descending Landen transformation applied recursively, for complex argument.
inline CTriple landen(cplx z, double k) {
    if (k < 1e-9) {
        const cplx s = std::sin(z), c = std::cos(z);
        const cplx w = 0.25 * k * k * (z - s * c);
        return {s - w * c, c + w * s, 1.0 - 0.5 * k * k * s * s};
    }
    const double kp = std::sqrt((1.0 - k) * (1.0 + k));
    const double k1 = k * k / ((1.0 + kp) * (1.0 + kp));
    const CTriple t = landen(z / (1.0 + k1), k1);
    const cplx den = 1.0 + k1 * t.sn * t.sn;
    CTriple r;
    r.sn = (1.0 + k1) * t.sn / den;
    r.cn = t.cn * t.dn / den;
    r.dn = (1.0 - k1 * t.sn * t.sn) / den;
    return r;
}

inline std::array<double, 3> landen_real(double s, double k) {
    const CTriple t = landen(cplx(s, 0.0), k);
    return {t.sn.real(), t.cn.real(), t.dn.real()};
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace oracle
