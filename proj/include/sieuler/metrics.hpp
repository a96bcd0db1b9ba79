#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "sieuler/quadrature.hpp"
#include "sieuler/sector.hpp"

namespace sieuler {

using AngularProfile = std::function<double(double)>;

/// L^p distance on the unit circle between odd, m-fold extensions of two
/// sector profiles:  ||f-g||_{L^p(S^1)} = (2m Int_0^{pi/m} |f-g|^p)^{1/p}.
///
/// Profiles may carry an integrable theta^{-alpha} head; the sector integral
/// uses the power-weighted endpoint rule with exponent p*alpha.
inline double lp_sphere_distance(const AngularProfile& f, const AngularProfile& g,
                                 double p, const SectorConfig& cfg) {
    if (p < 1.0) throw std::invalid_argument("lp_sphere_distance: need p >= 1");
    const double L = cfg.sector();
    const double beta = std::min(p * cfg.alpha, 0.97);
    auto integrand = [&](double th) { return std::pow(std::abs(f(th) - g(th)), p); };
    const double I = quad_power_singular(integrand, beta, 0.0, L, 1e-13);
    return std::pow(2.0 * cfg.m * I, 1.0 / p);
}

/// The 2^{-n}-weighted ball-average metric on L^p_loc(R^2), restricted to
/// scale-invariant (angle-only) fields.
///
/// For angle-only inputs the average over B(0,R) is R-independent:
///   (1/|B|) Int_B |f-g|^p dx = (1/2pi) Int_{S^1} |f-g|^p dtheta,
/// so every ball contributes the same factor and the metric reduces to
///   (sum_{n<M} 2^{-n}) (2pi)^{-1/p} ||f-g||_{L^p(S^1)}.
/// The geometric prefactor 2 (2pi)^{-1/p} (as M -> infinity) is measured and
/// reported; it is not forced to 1.
inline double lp_loc_distance(const AngularProfile& f, const AngularProfile& g,
                              double p, int ball_count, const SectorConfig& cfg) {
    const double sphere = lp_sphere_distance(f, g, p, cfg);
    double weight_sum = 0.0, w = 1.0;
    for (int n = 0; n < ball_count; ++n, w *= 0.5) weight_sum += w;
    return weight_sum * std::pow(2.0 * std::numbers::pi, -1.0 / p) * sphere;
}

/// Measured ratio lp_loc/lp_sphere for angle-only inputs (profile independent).
inline double lp_loc_sphere_ratio(double p, int ball_count) {
    double weight_sum = 0.0, w = 1.0;
    for (int n = 0; n < ball_count; ++n, w *= 0.5) weight_sum += w;
    return weight_sum * std::pow(2.0 * std::numbers::pi, -1.0 / p);
}

}  // namespace sieuler
