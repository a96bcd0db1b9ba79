#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sieuler/evolve.hpp"
#include "sieuler/metrics.hpp"

namespace sieuler {

struct InstabilityRow {
    double eps = 0.0;
    double t_prepare = 0.0;        // T* - eps
    double d_late_sphere = 0.0;    // distance at T* - eps
    double d_late_loc = 0.0;
    double d_zero_sphere = 0.0;    // distance at t = 0
    double d_zero_loc = 0.0;
};

struct InstabilityReport {
    double p = 0.0;
    double t_star = 0.0;
    std::vector<InstabilityRow> rows;
    double loc_sphere_ratio = 0.0;  // measured metric ratio, profile independent
};

/// The L^p_loc instability experiment: evolve g0 = theta^{-alpha} forward to
/// T* - eps, zero the tail beyond pi/m - eps, evolve both states backward to
/// t = 0, and measure the separation at both ends of the interval.
/// Requires p < 1/alpha so the singular head is p-integrable.
inline InstabilityReport run_instability(const BlowupResult& forward, double p,
                                         const std::vector<double>& eps_list,
                                         int ball_count = 40) {
    const SectorConfig& cfg = forward.cfg;
    if (!(p >= 1.0)) throw std::invalid_argument("run_instability: need p >= 1");
    if (cfg.alpha > 0.0 && !(p < 1.0 / cfg.alpha))
        throw std::invalid_argument("run_instability: need p < 1/alpha");
    InstabilityReport rep;
    rep.p = p;
    rep.t_star = forward.fit.t_star;
    rep.loc_sphere_ratio = lp_loc_sphere_ratio(p, ball_count);
    for (double eps : eps_list) {
        if (!(eps > 0.0 && eps < rep.t_star))
            throw std::invalid_argument("run_instability: eps must lie in (0, T*)");
        InstabilityRow row;
        row.eps = eps;
        row.t_prepare = rep.t_star - eps;
        MarkerField base = state_at_time(forward, row.t_prepare);
        MarkerField cut = truncate_tail(base, eps);
        const double ratio = lp_loc_sphere_ratio(p, ball_count);
        row.d_late_sphere = lp_sphere_distance(base, cut, p);
        row.d_late_loc = ratio * row.d_late_sphere;
        MarkerField base0 = evolve_to(base, 0.0, forward.policy.dt0, forward.I0);
        MarkerField cut0 = evolve_to(cut, 0.0, forward.policy.dt0, forward.I0);
        row.d_zero_sphere = lp_sphere_distance(base0, cut0, p);
        row.d_zero_loc = ratio * row.d_zero_sphere;
        rep.rows.push_back(row);
    }
    return rep;
}

struct SeparationRow {
    double eps = 0.0;
    double chi_forward = 0.0;   // chi(eps, T*-eps): image of initial angle eps
    double chi_preimage = 0.0;  // chi^{-1}(pi/m - eps, T*-eps)
};

struct SeparationReport {
    double t_star = 0.0;
    std::vector<SeparationRow> rows;
    double inf_forward = 0.0;        // inf over the sweep of chi(eps, T*-eps)
    double inf_preimage_gap = 0.0;   // inf over the sweep of pi/m - preimage
};

namespace detail {

inline double interp_monotone(const std::vector<double>& x, const std::vector<double>& y,
                              double xq) {
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t j = static_cast<std::size_t>(it - x.begin());
    j = std::clamp<std::size_t>(j, 1, x.size() - 1);
    const double w = (xq - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - w) * y[j - 1] + w * y[j];
}

}  // namespace detail

/// Trajectory-separation estimates from a recorded blow-up history:
/// the flow image of the initial angle eps at time T* - eps, and the
/// preimage of pi/m - eps under the same flow map.
inline SeparationReport flow_separation_check(const BlowupResult& forward,
                                              const std::vector<double>& eps_list) {
    SeparationReport rep;
    rep.t_star = forward.fit.t_star;
    const double L = forward.cfg.sector();
    bool first = true;
    for (double eps : eps_list) {
        const double tq = rep.t_star - eps;
        MarkerField f = state_at_time(forward, tq);  // throws if beyond history
        SeparationRow row;
        row.eps = eps;
        row.chi_forward = detail::interp_monotone(f.theta0, f.theta, eps);
        row.chi_preimage = detail::interp_monotone(f.theta, f.theta0, L - eps);
        rep.rows.push_back(row);
        if (first) {
            rep.inf_forward = row.chi_forward;
            rep.inf_preimage_gap = L - row.chi_preimage;
            first = false;
        } else {
            rep.inf_forward = std::min(rep.inf_forward, row.chi_forward);
            rep.inf_preimage_gap = std::min(rep.inf_preimage_gap, L - row.chi_preimage);
        }
    }
    return rep;
}

}  // namespace sieuler
