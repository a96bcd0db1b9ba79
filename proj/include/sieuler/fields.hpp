#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace sieuler {

/// Scalar field on the sector {r > 0, 0 < theta < pi/m}, odd and m-fold
/// symmetric by convention (the kernels encode the extension; evaluators are
/// only ever called inside the sector).  Optional closed-form derivative
/// oracle supplies d_r^a d_theta^b values for the lemma verifications; high
/// derivatives of singular profiles cannot be differenced numerically.
struct PolarScalarField {
    std::function<double(double, double)> value;
    std::function<double(int, int, double, double)> deriv;  // (a, b, r, theta)
    double support_lo = 0.0;   // radial support (evaluates to 0 outside)
    double support_hi = std::numeric_limits<double>::infinity();
    double envelope_alpha = 0.0;  // declared (r+theta)^{-alpha} envelope
    int max_deriv = 0;

    double operator()(double r, double th) const { return value(r, th); }

    double d(int a, int b, double r, double th) const {
        if (!deriv || a + b > max_deriv)
            throw std::invalid_argument("PolarScalarField: derivative oracle missing");
        return deriv(a, b, r, th);
    }
};

namespace detail {

// exp(-(r/R)^4) cutoff and its first three derivatives
inline double quartic_cutoff(int n, double r, double R) {
    const double x = r / R;
    const double u1 = -4.0 * x * x * x / R;
    const double u2 = -12.0 * x * x / (R * R);
    const double u3 = -24.0 * x / (R * R * R);
    const double c = std::exp(-x * x * x * x);
    switch (n) {
        case 0: return c;
        case 1: return u1 * c;
        case 2: return (u2 + u1 * u1) * c;
        case 3: return (u3 + 3.0 * u1 * u2 + u1 * u1 * u1) * c;
        default: throw std::invalid_argument("quartic_cutoff: order too high");
    }
}

inline double pochhammer(double a, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= a + i;
    return p;
}

}  // namespace detail

/// omega = (r+theta)^{-alpha} exp(-(r/R)^4): the paper's model singularity
/// with a Schwartz-like radial cutoff.  All mixed derivatives are closed
/// form: d^n of the power factor is (-1)^n (alpha)_n (r+theta)^{-alpha-n}
/// in any mix of r and theta, combined with the cutoff by Leibniz in r.
inline PolarScalarField power_envelope_field(double alpha, double R) {
    PolarScalarField f;
    f.envelope_alpha = alpha;
    f.support_hi = 2.5 * R;  // cutoff below 1e-15 beyond this
    f.max_deriv = 3;
    f.value = [alpha, R](double r, double th) {
        return std::pow(r + th, -alpha) * detail::quartic_cutoff(0, r, R);
    };
    f.deriv = [alpha, R](int a, int b, double r, double th) {
        // d_r^a d_th^b [(r+th)^{-alpha} c(r)], Leibniz over the r-derivatives
        double sum = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= a; ++j) {  // j derivatives on the cutoff
            const int n = a - j + b;    // power-factor derivatives
            const double power = (n % 2 == 0 ? 1.0 : -1.0) *
                                 detail::pochhammer(alpha, n) *
                                 std::pow(r + th, -alpha - n);
            sum += binom * power * detail::quartic_cutoff(j, r, R);
            binom *= double(a - j) / (j + 1);
        }
        return sum;
    };
    return f;
}

/// omega = sin(m k theta) * Gaussian bump in r; the single-mode battery
/// member with soft support edges (quadrature friendly) and closed-form
/// derivatives to any order via Hermite polynomials.
inline PolarScalarField sine_mode_field(int m, int k, double center, double width) {
    PolarScalarField f;
    f.support_lo = std::max(0.0, center - 6.0 * width);
    f.support_hi = center + 6.0 * width;
    f.max_deriv = 3;
    const int n = m * k;
    auto bump = [center, width](int order, double r) {
        const double x = (r - center) / width;
        const double b = std::exp(-x * x);
        double h;  // physicists' Hermite H_order(x)
        switch (order) {
            case 0: h = 1.0; break;
            case 1: h = 2.0 * x; break;
            case 2: h = 4.0 * x * x - 2.0; break;
            case 3: h = 8.0 * x * x * x - 12.0 * x; break;
            default: throw std::invalid_argument("sine_mode_field: order too high");
        }
        const double sgn = (order % 2 == 0) ? 1.0 : -1.0;
        return sgn * h * b / std::pow(width, order);
    };
    f.value = [n, bump](double r, double th) { return bump(0, r) * std::sin(n * th); };
    f.deriv = [n, bump](int a, int b, double r, double th) {
        const double angular = std::pow(double(n), b) *
                               std::sin(n * th + 0.5 * std::numbers::pi * b);
        return bump(a, r) * angular;
    };
    return f;
}

}  // namespace sieuler
