#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sieuler/quadrature.hpp"
#include "sieuler/sector.hpp"

namespace sieuler {

/// One sine mode of an odd m-fold field: the coefficient of sin(m k theta),
/// given as a radial evaluator with finite support (so the Poisson integrals
/// converge) plus samples on a grid for reporting.
struct RadialModeProfile {
    int k = 1;
    std::function<double(double)> fn;
    double support_lo = 0.0;
    double support_hi = 0.0;
    std::vector<double> grid;
    std::vector<double> samples;
};

inline RadialModeProfile make_mode(int k, std::function<double(double)> fn,
                                   double lo, double hi,
                                   const std::vector<double>& grid = {}) {
    if (!(hi > lo) || !std::isfinite(hi))
        throw std::invalid_argument("make_mode: finite radial support required");
    RadialModeProfile p;
    p.k = k;
    p.fn = std::move(fn);
    p.support_lo = std::max(0.0, lo);
    p.support_hi = hi;
    p.grid = grid;
    p.samples.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) p.samples[i] = p.fn(grid[i]);
    return p;
}

/// Mode-wise Poisson inversion: for n = m k,
///   psi_k(r) = -(r^n/(2n)) Int_r^inf w_k(s) s^{1-n} ds
///              -(r^{-n}/(2n)) Int_0^r s^{n+1} w_k(s) ds,
/// solving psi'' + psi'/r - n^2 psi / r^2 = w_k.  The boundary terms of the
/// derivative cancel, leaving
///   psi_k'(r) = -(r^{n-1}/2) Int_r^inf w s^{1-n} - ... with a sign flip.
struct ModeStream {
    int k = 1;
    int n = 3;  // m k
    RadialModeProfile source;

    double tail(double r) const {  // Int_max(r,lo)^hi w s^{1-n}
        const double lo = std::max(r, source.support_lo);
        if (lo >= source.support_hi) return 0.0;
        return adaptive_gauss([&](double s) { return source.fn(s) * std::pow(s, 1 - n); },
                              lo, source.support_hi, 1e-13);
    }
    double head(double r) const {  // Int_lo^min(r,hi) s^{n+1} w
        const double hi = std::min(r, source.support_hi);
        if (hi <= source.support_lo) return 0.0;
        return adaptive_gauss([&](double s) { return source.fn(s) * std::pow(s, n + 1); },
                              source.support_lo, hi, 1e-13);
    }
    double psi(double r) const {
        if (r <= 0.0) return 0.0;
        return -std::pow(r, n) / (2.0 * n) * tail(r) -
               std::pow(r, -n) / (2.0 * n) * head(r);
    }
    double dpsi(double r) const {
        if (r <= 0.0) return 0.0;
        return -0.5 * std::pow(r, n - 1) * tail(r) + 0.5 * std::pow(r, -n - 1) * head(r);
    }
};

/// Solves the mode ODE; the returned profile carries psi_k samples on the
/// source grid (divergent tails are excluded by construction: make_mode
/// requires finite support).
inline std::pair<RadialModeProfile, ModeStream> sine_mode_stream(
    const RadialModeProfile& w, const SectorConfig& cfg) {
    ModeStream ms;
    ms.k = w.k;
    ms.n = cfg.m * w.k;
    ms.source = w;
    RadialModeProfile out;
    out.k = w.k;
    out.support_lo = w.support_lo;
    out.support_hi = w.support_hi;
    out.grid = w.grid;
    out.samples.resize(w.grid.size());
    out.fn = [ms](double r) { return ms.psi(r); };
    for (std::size_t i = 0; i < w.grid.size(); ++i) out.samples[i] = ms.psi(w.grid[i]);
    return {out, ms};
}

/// Velocity evaluator by mode summation: u^r = -d_theta psi / r,
/// u^theta = d_r psi.  Serves as the module's oracle for the singular
/// kernels.  At r = 0 the limit branch applies: psi_k ~ r^{mk} with mk >= 3,
/// so both components vanish linearly.
struct SpectralVelocity {
    int m = 3;
    std::vector<ModeStream> modes;

    std::pair<double, double> operator()(double r, double th) const {
        if (r <= 0.0) return {0.0, 0.0};
        double ur = 0.0, ut = 0.0;
        for (const auto& ms : modes) {
            const int n = ms.n;
            ur -= double(n) * ms.psi(r) * std::cos(n * th) / r;
            ut += ms.dpsi(r) * std::sin(n * th);
        }
        return {ur, ut};
    }

    double psi(double r, double th) const {
        double s = 0.0;
        for (const auto& ms : modes) s += ms.psi(r) * std::sin(ms.n * th);
        return s;
    }
};

inline SpectralVelocity spectral_velocity(const std::vector<RadialModeProfile>& ws,
                                          const SectorConfig& cfg) {
    SpectralVelocity v;
    v.m = cfg.m;
    for (const auto& w : ws) v.modes.push_back(sine_mode_stream(w, cfg).second);
    return v;
}

}  // namespace sieuler
