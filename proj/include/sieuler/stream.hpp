#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sieuler/markers.hpp"
#include "sieuler/quadrature.hpp"
#include "sieuler/sector.hpp"

namespace sieuler {

/// Solution of the sector stream law with G(0) = G(pi/m) = 0.
///
/// Under the blowup convention, G'' + 4G = -g is inverted by the Green
/// kernel
///   K(theta,phi) = sin(2 theta_<) sin(2 (pi/m - theta_>)) / (2 sin(2 pi/m)),
/// which is nonnegative on the sector for every m >= 3, so g >= 0 gives
/// G >= 0.  The intro convention (4 + d^2) G = g flips the overall sign.
struct StreamSolution {
    std::vector<double> nodes;   // increasing, includes 0 and pi/m
    std::vector<double> values;  // G at nodes
    double slope0 = 0.0;         // G'(0) from the kernel representation
    double slopePi = 0.0;        // G'(pi/m) from the kernel representation
    StreamConvention convention = StreamConvention::blowup;
    double sector = 0.0;

    double eval(double th) const {
        if (th <= nodes.front()) return 0.0;
        if (th >= nodes.back()) return 0.0;
        auto it = std::upper_bound(nodes.begin(), nodes.end(), th);
        const std::size_t j = static_cast<std::size_t>(it - nodes.begin()) - 1;
        const double w = (th - nodes[j]) / (nodes[j + 1] - nodes[j]);
        return (1.0 - w) * values[j] + w * values[j + 1];
    }
};

namespace detail {

// Discrete-measure stream evaluator: g represented by point masses w_j at
// pos_j.  The separable kernel gives G and its boundary slopes from prefix
// sums in a single pass.
struct StreamMeasure {
    const std::vector<double>* pos;
    const std::vector<double>* w;
    double L = 0.0;
    double sign = 1.0;  // +1 blowup, -1 intro
    std::vector<double> prefixA;  // cumulative sin(2 pos) w
    std::vector<double> prefixB;  // cumulative sin(2 (L - pos)) w

    StreamMeasure(const std::vector<double>& p, const std::vector<double>& wt,
                  double sector, StreamConvention conv)
        : pos(&p), w(&wt), L(sector),
          sign(conv == StreamConvention::blowup ? 1.0 : -1.0) {
        const std::size_t n = p.size();
        prefixA.resize(n + 1, 0.0);
        prefixB.resize(n + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            prefixA[j + 1] = prefixA[j] + std::sin(2.0 * p[j]) * wt[j];
            prefixB[j + 1] = prefixB[j] + std::sin(2.0 * (L - p[j])) * wt[j];
        }
    }

    double operator()(double th) const {
        auto it = std::lower_bound(pos->begin(), pos->end(), th);
        const std::size_t k = static_cast<std::size_t>(it - pos->begin());
        const double A = prefixA[k];
        const double B = prefixB.back() - prefixB[k];
        return sign * (std::sin(2.0 * (L - th)) * A + std::sin(2.0 * th) * B) /
               (2.0 * std::sin(2.0 * L));
    }

    double slope0() const { return sign * prefixB.back() / std::sin(2.0 * L); }
    double slopePi() const { return -sign * prefixA.back() / std::sin(2.0 * L); }
};

}  // namespace detail

/// Inverts the stream law against the marker representation of g.  Nodes of
/// the result are the current marker edges; slopes come from the kernel
/// derivative at the boundary, consistent with the same cell quadrature.
inline StreamSolution solve_stream(const MarkerField& f) {
    const CellQuadrature cq = cell_quadrature(f);
    for (double w : cq.weight)
        if (!std::isfinite(w)) throw std::invalid_argument("solve_stream: non-finite marker data");
    for (double v : f.values)
        if (!std::isfinite(v)) throw std::invalid_argument("solve_stream: non-finite marker data");
    const double L = f.cfg.sector();
    detail::StreamMeasure ms(cq.pos, cq.weight, L, f.cfg.convention);
    StreamSolution s;
    s.sector = L;
    s.convention = f.cfg.convention;
    s.nodes = f.theta;
    s.values.resize(s.nodes.size());
    for (std::size_t i = 0; i < s.nodes.size(); ++i) s.values[i] = ms(s.nodes[i]);
    s.values.front() = 0.0;
    s.values.back() = 0.0;
    s.slope0 = ms.slope0();
    s.slopePi = ms.slopePi();
    return s;
}

/// Inverts the stream law against a profile callback on a graded grid, with
/// per-cell adaptive quadrature (power-weighted on the first cell when the
/// profile has a theta^{-beta} head).  Accurate to quadrature tolerance at
/// the grid nodes, independent of the marker machinery.
inline StreamSolution solve_stream(const AngularProfile& g, const SectorConfig& cfg,
                                   const GradedGrid& grid, double head_beta = 0.0) {
    const double L = cfg.sector();
    const std::vector<double> e = grid.edges(L);
    const std::size_t N = e.size() - 1;
    const double sign = cfg.convention == StreamConvention::blowup ? 1.0 : -1.0;
    // per-cell integrals of sin(2 phi) g and sin(2 (L - phi)) g
    std::vector<double> a(N), b(N);
    for (std::size_t j = 0; j < N; ++j) {
        auto fa = [&](double t) { return std::sin(2.0 * t) * g(t); };
        auto fb = [&](double t) { return std::sin(2.0 * (L - t)) * g(t); };
        if (j == 0 && head_beta > 0.0) {
            a[j] = quad_power_singular(fa, head_beta - 1.0, e[0], e[1]);
            b[j] = quad_power_singular(fb, head_beta, e[0], e[1]);
        } else {
            a[j] = adaptive_gauss(fa, e[j], e[j + 1], 1e-14);
            b[j] = adaptive_gauss(fb, e[j], e[j + 1], 1e-14);
        }
    }
    std::vector<double> A(N + 1, 0.0), Brev(N + 1, 0.0);
    for (std::size_t j = 0; j < N; ++j) A[j + 1] = A[j] + a[j];
    for (std::size_t j = N; j-- > 0;) Brev[j] = Brev[j + 1] + b[j];
    StreamSolution s;
    s.sector = L;
    s.convention = cfg.convention;
    s.nodes = e;
    s.values.resize(N + 1);
    const double denom = 2.0 * std::sin(2.0 * L);
    for (std::size_t i = 0; i <= N; ++i)
        s.values[i] = sign * (std::sin(2.0 * (L - e[i])) * A[i] +
                              std::sin(2.0 * e[i]) * Brev[i]) / denom;
    s.values.front() = 0.0;
    s.values.back() = 0.0;
    s.slope0 = sign * Brev[0] / std::sin(2.0 * L);
    s.slopePi = -sign * A[N] / std::sin(2.0 * L);
    return s;
}

/// One-sided boundary slope estimates from the stored grid values, O(h^2)
/// three-point formulas.  Cross-checks the kernel-derived slopes carried by
/// the solution.
inline std::pair<double, double> boundary_slopes(const StreamSolution& s) {
    const auto& x = s.nodes;
    const auto& y = s.values;
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("boundary_slopes: need at least 3 nodes");
    auto onesided = [](double x0, double x1, double x2, double y0, double y1,
                       double y2) {
        const double h1 = x1 - x0, h2 = x2 - x0;
        // derivative at x0 of the quadratic through the three points
        return (y1 - y0) * h2 / (h1 * (h2 - h1)) - (y2 - y0) * h1 / (h2 * (h2 - h1));
    };
    const double d0 = onesided(x[0], x[1], x[2], y[0], y[1], y[2]);
    const double dL = onesided(x[n - 1], x[n - 2], x[n - 3], y[n - 1], y[n - 2], y[n - 3]);
    return {d0, dL};
}

/// The blow-up section's representation of G, evaluated verbatim for
/// side-by-side comparison with solve_stream:
///   G = 3m/(2(m^2-4)) [cos(m theta/2) Int_0^theta sin(m phi/2) g
///                      + sin(m theta/2) Int_theta^{pi/m} cos(m phi/2) g].
/// Its homogeneous solutions cos(m theta/2), sin(m theta/2) solve
/// G'' + (m^2/4) G = 0, which matches the stream law only for m = 4; the
/// discrepancy for other m is reported, not repaired.
inline StreamSolution stream_paper_formula(const AngularProfile& g,
                                           const SectorConfig& cfg,
                                           const GradedGrid& grid,
                                           double head_beta = 0.0) {
    const double L = cfg.sector();
    const std::vector<double> e = grid.edges(L);
    const std::size_t N = e.size() - 1;
    const double mm = cfg.m;
    const double pref = 3.0 * mm / (2.0 * (mm * mm - 4.0));
    const double sign = cfg.convention == StreamConvention::blowup ? 1.0 : -1.0;
    std::vector<double> a(N), b(N);
    for (std::size_t j = 0; j < N; ++j) {
        auto fa = [&](double t) { return std::sin(0.5 * mm * t) * g(t); };
        auto fb = [&](double t) { return std::cos(0.5 * mm * t) * g(t); };
        if (j == 0 && head_beta > 0.0) {
            a[j] = quad_power_singular(fa, head_beta - 1.0, e[0], e[1]);
            b[j] = quad_power_singular(fb, head_beta, e[0], e[1]);
        } else {
            a[j] = adaptive_gauss(fa, e[j], e[j + 1], 1e-14);
            b[j] = adaptive_gauss(fb, e[j], e[j + 1], 1e-14);
        }
    }
    std::vector<double> A(N + 1, 0.0), Brev(N + 1, 0.0);
    for (std::size_t j = 0; j < N; ++j) A[j + 1] = A[j] + a[j];
    for (std::size_t j = N; j-- > 0;) Brev[j] = Brev[j + 1] + b[j];
    StreamSolution s;
    s.sector = L;
    s.convention = cfg.convention;
    s.nodes = e;
    s.values.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i)
        s.values[i] = sign * pref * (std::cos(0.5 * mm * e[i]) * A[i] +
                                     std::sin(0.5 * mm * e[i]) * Brev[i]);
    // the formula's own boundary slopes (the cross terms cancel; m L/2 = pi/2)
    s.slope0 = sign * pref * 0.5 * mm * Brev[0];
    s.slopePi = -sign * pref * 0.5 * mm * A[N];
    return s;
}

/// The blow-up section's slope-difference formula
///   G'(0) - G'(pi/m) = 3m^2/(4(m^2-4)) Int (cos(m phi/2) - sin(m phi/2)) g,
/// evaluated verbatim (numerically checked against the kernel route).
inline double paper_slope_difference(const AngularProfile& g, const SectorConfig& cfg,
                                     double head_beta = 0.0) {
    const double L = cfg.sector();
    const double mm = cfg.m;
    const double pref = 3.0 * mm * mm / (4.0 * (mm * mm - 4.0));
    const double sign = cfg.convention == StreamConvention::blowup ? 1.0 : -1.0;
    auto f = [&](double t) {
        return (std::cos(0.5 * mm * t) - std::sin(0.5 * mm * t)) * g(t);
    };
    const double I = head_beta > 0.0 ? quad_power_singular(f, head_beta, 0.0, L)
                                     : adaptive_gauss(f, 0.0, L, 1e-13);
    return sign * pref * I;
}

}  // namespace sieuler
