#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sieuler/metrics.hpp"
#include "sieuler/quadrature.hpp"
#include "sieuler/sector.hpp"

namespace sieuler {

/// Lagrangian representation of the angular profile g on (0, pi/m).
///
/// The sector is partitioned into N material cells whose edges are carried
/// by the characteristic flow; the edges at 0 and pi/m are fixed points of
/// the flow (G vanishes there) and never move.  Each interior edge carries
/// the transported value of g; each cell carries its anchor-time integral
/// of g and the in-cell weight centroid, which together give second-order
/// quadrature against the moving configuration:
///
///   Int F(theta) g(t,theta) dtheta ~= sum_j F(pos_j) * mass0_j * stretch_j,
///
/// pos_j the image of the cell centroid, stretch_j the cell stretch factor
/// relative to anchor time.
struct MarkerField {
    SectorConfig cfg;
    double time = 0.0;
    std::vector<double> theta0;    // anchor edges, size N+1, theta0[0]=0, theta0[N]=pi/m
    std::vector<double> theta;     // current edges, size N+1
    std::vector<double> values;    // transported g at edges; index 0 unused (singular end)
    std::vector<double> mass0;     // per-cell integral of g at anchor time, size N
    std::vector<double> centroid;  // in-cell weight centroid fraction at anchor time, size N
    double head_exponent = 0.0;    // g ~ c * theta^{-head_exponent} below the first marker

    int cells() const { return static_cast<int>(mass0.size()); }

    /// Point evaluation of the transported profile: linear in the marker
    /// values, power-law extension below the first interior marker.
    double eval(double th) const {
        const int N = cells();
        if (th <= theta[1]) {
            if (head_exponent > 0.0 && values[1] != 0.0)
                return values[1] * std::pow(th / theta[1], -head_exponent);
            return values[1];
        }
        if (th >= theta[N]) return values[N];
        auto it = std::upper_bound(theta.begin() + 1, theta.end(), th);
        const std::size_t j = static_cast<std::size_t>(it - theta.begin()) - 1;
        const double w = (th - theta[j]) / (theta[j + 1] - theta[j]);
        return (1.0 - w) * values[j] + w * values[j + 1];
    }

    AngularProfile profile() const {
        return [state = *this](double th) { return state.eval(th); };
    }
};

/// Builds a marker field at t = 0 from an initial profile on a graded grid.
/// head_exponent flags an integrable theta^{-beta} singularity of g0 at 0;
/// the first-cell integrals then use the power-weighted endpoint rule.
inline MarkerField marker_field_from_profile(const AngularProfile& g0,
                                             const SectorConfig& cfg, int N,
                                             double q, double head_exponent) {
    const GradedGrid grid = graded_grid(cfg, N, q);
    MarkerField f;
    f.cfg = cfg;
    f.head_exponent = head_exponent;
    f.theta0 = grid.edges(cfg.sector());
    f.theta = f.theta0;
    f.values.assign(N + 1, 0.0);
    f.mass0.resize(N);
    f.centroid.resize(N);
    for (int i = 1; i <= N; ++i) f.values[i] = g0(f.theta0[i]);
    for (int j = 0; j < N; ++j) {
        const double a = f.theta0[j], b = f.theta0[j + 1];
        double mass, first_moment;  // first moment about the left edge
        if (j == 0 && head_exponent > 0.0) {
            mass = quad_power_singular(g0, head_exponent, a, b);
            first_moment = quad_power_singular(
                [&](double t) { return (t - a) * g0(t); }, head_exponent - 1.0, a, b);
        } else {
            mass = adaptive_gauss(g0, a, b, 1e-14);
            first_moment = adaptive_gauss([&](double t) { return (t - a) * g0(t); },
                                          a, b, 1e-14);
        }
        f.mass0[j] = mass;
        f.centroid[j] = std::abs(mass) > 1e-300 ? first_moment / mass / (b - a) : 0.5;
        f.centroid[j] = std::clamp(f.centroid[j], 0.0, 1.0);
    }
    return f;
}

/// Per-cell quadrature data against the current configuration.
struct CellQuadrature {
    std::vector<double> pos;     // centroid images, size N, increasing
    std::vector<double> weight;  // mass0 * stretch, size N
};

inline CellQuadrature cell_quadrature(const MarkerField& f) {
    const int N = f.cells();
    CellQuadrature cq;
    cq.pos.resize(N);
    cq.weight.resize(N);
    for (int j = 0; j < N; ++j) {
        const double d = f.theta[j + 1] - f.theta[j];
        cq.pos[j] = f.theta[j] + f.centroid[j] * d;
        cq.weight[j] = f.mass0[j] * d / (f.theta0[j + 1] - f.theta0[j]);
    }
    return cq;
}

/// Int_0^{pi/m} g(t,theta) dtheta by change of variables to anchor angles
/// (the cell stretch factors carry d theta = d_theta0 chi d theta0).
inline double mass(const MarkerField& f) {
    double total = 0.0;
    for (int j = 0; j < f.cells(); ++j)
        total += f.mass0[j] * (f.theta[j + 1] - f.theta[j]) /
                 (f.theta0[j + 1] - f.theta0[j]);
    return total;
}

/// g^eps of the instability construction: values zeroed on the tail
/// theta >= pi/m - eps.  The jump is kept (no smoothing); cell masses are
/// re-anchored to the current configuration with the tail emptied.
inline MarkerField truncate_tail(const MarkerField& f, double eps) {
    const double L = f.cfg.sector();
    if (!(eps >= 0.0 && eps < 0.5 * L))
        throw std::invalid_argument("truncate_tail: need 0 < eps < pi/(2m)");
    MarkerField out = f;
    if (eps == 0.0) return out;
    const double cut = L - eps;
    const int N = f.cells();
    for (int i = 1; i <= N; ++i)
        if (out.theta[i] >= cut) out.values[i] = 0.0;
    // re-anchor masses to the truncated profile on the current cells
    out.theta0 = out.theta;
    for (int j = 0; j < N; ++j) {
        const double lo = out.theta[j], hi = out.theta[j + 1];
        const double stretch = (hi - lo) / (f.theta0[j + 1] - f.theta0[j]);
        double m = f.mass0[j] * stretch;
        if (lo >= cut) {
            m = 0.0;
        } else if (hi > cut) {
            const double frac = (cut - lo) / (hi - lo);
            m *= frac;  // affine in-cell model for the straddling cell
            out.centroid[j] = 0.5 * frac;
        }
        out.mass0[j] = m;
    }
    return out;
}

namespace detail {

// C1 monotone cubic Hermite on [a,b] with endpoint values/slopes; slopes are
// clamped to three times the secant (Fritsch-Carlson) to preserve monotonicity.
struct HermiteBlend {
    double a, b, ya, yb, sa, sb;
    double operator()(double x) const {
        const double h = b - a;
        const double sec = (yb - ya) / h;
        auto clampslope = [&](double s) {
            if (sec == 0.0) return 0.0;
            if (s * sec < 0.0) return 0.0;
            return std::abs(s) > 3.0 * std::abs(sec) ? 3.0 * sec : s;
        };
        const double da = clampslope(sa), db = clampslope(sb);
        const double t = (x - a) / h, t2 = t * t, t3 = t2 * t;
        return ya * (2 * t3 - 3 * t2 + 1) + h * da * (t3 - 2 * t2 + t) +
               yb * (-2 * t3 + 3 * t2) + h * db * (t3 - t2);
    }
};

inline double marker_slope(const MarkerField& f, double th) {
    const int N = f.cells();
    auto it = std::lower_bound(f.theta.begin() + 1, f.theta.begin() + N + 1, th);
    int j = static_cast<int>(it - f.theta.begin());
    j = std::clamp(j, 2, N - 1);
    return (f.values[j + 1] - f.values[j - 1]) / (f.theta[j + 1] - f.theta[j - 1]);
}

}  // namespace detail

/// Sphere L^p distance between two marker fields, with quadrature panels
/// aligned to the union of both marker partitions (the integrand is smooth
/// inside every panel; the power-weighted rule handles the singular head).
inline double lp_sphere_distance(const MarkerField& f, const MarkerField& g,
                                 double p) {
    if (p < 1.0) throw std::invalid_argument("lp_sphere_distance: need p >= 1");
    const double L = f.cfg.sector();
    std::vector<double> cuts;
    cuts.reserve(f.theta.size() + g.theta.size());
    cuts.insert(cuts.end(), f.theta.begin(), f.theta.end());
    cuts.insert(cuts.end(), g.theta.begin(), g.theta.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto integrand = [&](double th) {
        return std::pow(std::abs(f.eval(th) - g.eval(th)), p);
    };
    const double beta = std::min(p * std::max(f.head_exponent, g.head_exponent), 0.97);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= a) continue;
        if (i == 0 && beta > 0.0)
            total += quad_power_singular(integrand, beta, a, b, 1e-12);
        else
            total += detail::gauss15(integrand, a, b);
    }
    return std::pow(2.0 * f.cfg.m * total, 1.0 / p);
}

enum class SmoothMode { plateau, tail };

/// Smoothed instability data: the singular head is capped at eps^{-alpha}
/// with a C1 monotone joint over a width-eps transition (plateau); tail mode
/// additionally ramps the profile to 0 across [pi/m - 2 eps, pi/m - eps].
inline MarkerField smooth_modify(const MarkerField& f, double eps, SmoothMode mode) {
    const double L = f.cfg.sector();
    if (!(eps > 0.0 && eps < 0.5 * L))
        throw std::invalid_argument("smooth_modify: need 0 < eps < pi/(2m)");
    const int N = f.cells();
    // monotone input required: decreasing values under the blowup sign
    int dir = 0;
    for (int i = 1; i < N; ++i) {
        const double d = f.values[i + 1] - f.values[i];
        if (d > 0 && dir < 0) throw std::invalid_argument("smooth_modify: non-monotone profile");
        if (d < 0 && dir > 0) throw std::invalid_argument("smooth_modify: non-monotone profile");
        if (d != 0 && dir == 0) dir = d > 0 ? 1 : -1;
    }

    const double cap = std::pow(eps, -f.cfg.alpha);
    MarkerField out = f;
    auto base = f.profile();

    // head plateau: applies only when the profile actually exceeds the cap
    double theta_c = -1.0;
    double vmax = std::abs(f.values[1]);
    if (f.head_exponent > 0.0) vmax = std::numeric_limits<double>::infinity();
    if (vmax > cap) {
        // theta_c: |g|(theta_c) = cap (g monotone toward the singular end)
        double lo = 0.0, hi = L;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (std::abs(base(mid)) >= cap ? lo : hi) = mid;
        }
        theta_c = lo;
    }

    const double sgn = dir <= 0 ? 1.0 : -1.0;  // sign of the head values
    detail::HermiteBlend head{};
    if (theta_c > 0.0)
        head = detail::HermiteBlend{theta_c, theta_c + eps, sgn * cap,
                                    base(theta_c + eps), 0.0,
                                    detail::marker_slope(f, theta_c + eps)};
    const double t1 = L - 2.0 * eps, t2 = L - eps;
    detail::HermiteBlend tail{t1, t2, base(t1), 0.0,
                              detail::marker_slope(f, t1), 0.0};

    auto modified = [&](double th) -> double {
        if (theta_c > 0.0) {
            if (th <= theta_c) return sgn * cap;
            if (th < theta_c + eps) return head(th);
        }
        if (mode == SmoothMode::tail) {
            if (th >= t2) return 0.0;
            if (th > t1) return tail(th);
        }
        return base(th);
    };

    for (int i = 1; i <= N; ++i) out.values[i] = modified(out.theta[i]);
    out.head_exponent = theta_c > 0.0 ? 0.0 : f.head_exponent;
    out.theta0 = out.theta;
    for (int j = 0; j < N; ++j) {
        const double a = out.theta[j], b = out.theta[j + 1];
        const bool touched = (theta_c > 0.0 && a < theta_c + eps) ||
                             (mode == SmoothMode::tail && b > t1);
        if (touched) {
            out.mass0[j] = adaptive_gauss(modified, a, b, 1e-13);
            const double fm = adaptive_gauss(
                [&](double t) { return (t - a) * modified(t); }, a, b, 1e-13);
            out.centroid[j] =
                std::abs(out.mass0[j]) > 1e-300 ? std::clamp(fm / out.mass0[j] / (b - a), 0.0, 1.0) : 0.5;
        } else {
            out.mass0[j] = f.mass0[j] * (b - a) / (f.theta0[j + 1] - f.theta0[j]);
        }
    }
    return out;
}

}  // namespace sieuler
