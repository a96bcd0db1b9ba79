#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sieuler/markers.hpp"
#include "sieuler/stream.hpp"

namespace sieuler {

/// Marker ordering violated after a step: dt too large for the local
/// velocity gradient (expected near blow-up).
struct MarkerCollisionError : std::runtime_error {
    int first_index;
    int second_index;
    MarkerCollisionError(int i, int j)
        : std::runtime_error("marker collision between indices " + std::to_string(i) +
                             " and " + std::to_string(j)),
          first_index(i), second_index(j) {}
};

/// Optional stream override for tests: maps (t, theta) -> G.
using StreamOverride = std::function<double(double, double)>;

namespace detail {

inline std::vector<double> marker_velocity(const MarkerField& f,
                                           const std::vector<double>& edges,
                                           double t, const StreamOverride& ov) {
    const std::size_t n = edges.size();
    std::vector<double> v(n, 0.0);
    if (ov) {
        for (std::size_t i = 1; i + 1 < n; ++i) v[i] = 2.0 * ov(t, edges[i]);
        return v;
    }
    // rebuild the cell quadrature against the stage configuration
    const int N = f.cells();
    std::vector<double> pos(N), w(N);
    for (int j = 0; j < N; ++j) {
        const double d = edges[j + 1] - edges[j];
        if (d <= 0.0) throw MarkerCollisionError(j, j + 1);
        pos[j] = edges[j] + f.centroid[j] * d;
        w[j] = f.mass0[j] * d / (f.theta0[j + 1] - f.theta0[j]);
    }
    StreamMeasure ms(pos, w, f.cfg.sector(), f.cfg.convention);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = 2.0 * ms(edges[i]);
    return v;
}

}  // namespace detail

/// One classical fourth-order step of the characteristic flow
/// d chi / d t = 2 G(t, chi), with the stream re-solved at every stage.
/// Carried values, cell masses, and anchors are untouched (pure transport).
inline MarkerField step(const MarkerField& f, double dt,
                        const StreamOverride& override_stream = nullptr) {
    if (dt == 0.0) throw std::invalid_argument("step: dt must be nonzero");
    const std::size_t n = f.theta.size();
    const double t = f.time;
    std::vector<double> k1 = detail::marker_velocity(f, f.theta, t, override_stream);
    std::vector<double> stage(n);
    for (std::size_t i = 0; i < n; ++i) stage[i] = f.theta[i] + 0.5 * dt * k1[i];
    std::vector<double> k2 = detail::marker_velocity(f, stage, t + 0.5 * dt, override_stream);
    for (std::size_t i = 0; i < n; ++i) stage[i] = f.theta[i] + 0.5 * dt * k2[i];
    std::vector<double> k3 = detail::marker_velocity(f, stage, t + 0.5 * dt, override_stream);
    for (std::size_t i = 0; i < n; ++i) stage[i] = f.theta[i] + dt * k3[i];
    std::vector<double> k4 = detail::marker_velocity(f, stage, t + dt, override_stream);

    MarkerField out = f;
    for (std::size_t i = 0; i < n; ++i)
        out.theta[i] = f.theta[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.time = f.time + dt;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(out.theta[i + 1] > out.theta[i]))
            throw MarkerCollisionError(static_cast<int>(i), static_cast<int>(i + 1));
    return out;
}

/// Per-record diagnostics of the blow-up mechanism.
struct MonitorRecord {
    double time = 0.0;
    double I = 0.0;           // Int_0^{pi/m} g
    double dIdt = 0.0;        // difference estimate (centered once the series is assembled)
    double identity_residual = 0.0;  // |dI/dt - (G'(0)-G'(pi/m))(G'(0)+G'(pi/m))| / |rhs|
    double riccati_ratio = 0.0;      // dI/dt / I^2
    double ratio_drift_min = 0.0;    // min over sampled pairs of d(chi_i/chi_j) since prev
    double corollary_gap_max = 0.0;  // max over pairs of g(eta2)/g(eta1) - (eta2/eta1)^{-alpha}
    double slope0 = 0.0, slopePi = 0.0;
    double intG = 0.0;
    double slope_identity_gap = 0.0;  // |(G'0-G'pi) - (I + 4 Int G)| / |I|
    std::vector<double> pair_ratios;  // sampled chi_i/chi_j, carried for drift diffs
};

/// Deterministic monitor pair sample: ~32 logarithmically spaced interior
/// markers, adjacent pairs plus the extreme pair.
inline std::vector<std::pair<int, int>> monitor_pairs(int N, int target = 32) {
    std::vector<int> idx;
    for (int k = 0; k < target + 1; ++k) {
        const double u = double(k) / target;
        int i = static_cast<int>(std::lround(std::pow(double(N - 1), u)));
        i = std::clamp(i, 1, N - 1);
        if (idx.empty() || i > idx.back()) idx.push_back(i);
    }
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) pairs.push_back({idx[k], idx[k + 1]});
    if (idx.size() >= 2) pairs.push_back({idx.front(), idx.back()});
    return pairs;
}

/// Simpson integral of G over the sector against the moving cells.
inline double integral_of_stream(const MarkerField& f, const StreamSolution& s) {
    const CellQuadrature cq = cell_quadrature(f);
    detail::StreamMeasure ms(cq.pos, cq.weight, f.cfg.sector(), f.cfg.convention);
    double total = 0.0;
    for (int j = 0; j < f.cells(); ++j) {
        const double a = f.theta[j], b = f.theta[j + 1];
        const double mid = ms(0.5 * (a + b));
        total += (b - a) * (s.values[j] + 4.0 * mid + s.values[j + 1]) / 6.0;
    }
    return total;
}

/// One monitor record.  dIdt is a backward difference against prev here;
/// assembled series replace it by the centered estimate.
inline MonitorRecord monitors(const MarkerField& f, const MonitorRecord* prev,
                              const std::vector<std::pair<int, int>>& pairs) {
    const StreamSolution s = solve_stream(f);
    MonitorRecord rec;
    rec.time = f.time;
    rec.I = mass(f);
    rec.slope0 = s.slope0;
    rec.slopePi = s.slopePi;
    rec.intG = integral_of_stream(f, s);
    const double slope_diff = s.slope0 - s.slopePi;
    rec.slope_identity_gap = std::abs(slope_diff - (rec.I + 4.0 * rec.intG)) /
                             std::max(std::abs(rec.I), 1e-300);
    const double rhs = slope_diff * (s.slope0 + s.slopePi);
    if (prev && rec.time != prev->time) {
        rec.dIdt = (rec.I - prev->I) / (rec.time - prev->time);
        rec.identity_residual = std::abs(rec.dIdt - rhs) / std::max(std::abs(rhs), 1e-300);
        rec.riccati_ratio = rec.dIdt / (rec.I * rec.I);
    }
    rec.pair_ratios.reserve(pairs.size());
    rec.ratio_drift_min = 0.0;
    rec.corollary_gap_max = 0.0;
    const double alpha = f.cfg.alpha;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        const double ratio = f.theta[i] / f.theta[j];
        rec.pair_ratios.push_back(ratio);
        if (prev && k < prev->pair_ratios.size())
            rec.ratio_drift_min =
                std::min(rec.ratio_drift_min, ratio - prev->pair_ratios[k]);
        const double gi = f.values[i], gj = f.values[j];
        if (gi != 0.0) {
            const double bound = std::pow(f.theta[j] / f.theta[i], -alpha);
            rec.corollary_gap_max = std::max(rec.corollary_gap_max, gj / gi - bound);
        }
    }
    return rec;
}

/// Replaces per-record backward dIdt with centered three-point estimates
/// (one-sided at the ends) and refreshes the dependent diagnostics.
inline void finalize_series(std::vector<MonitorRecord>& recs) {
    const std::size_t n = recs.size();
    if (n < 3) return;
    auto refresh = [](MonitorRecord& r, double dIdt) {
        const double rhs = (r.slope0 - r.slopePi) * (r.slope0 + r.slopePi);
        r.dIdt = dIdt;
        r.identity_residual = std::abs(dIdt - rhs) / std::max(std::abs(rhs), 1e-300);
        r.riccati_ratio = dIdt / (r.I * r.I);
    };
    auto three_point = [&](std::size_t a, std::size_t b, std::size_t c, double x) {
        // derivative at x of the quadratic through records a,b,c
        const double xa = recs[a].time, xb = recs[b].time, xc = recs[c].time;
        const double ya = recs[a].I, yb = recs[b].I, yc = recs[c].I;
        return ya * (2 * x - xb - xc) / ((xa - xb) * (xa - xc)) +
               yb * (2 * x - xa - xc) / ((xb - xa) * (xb - xc)) +
               yc * (2 * x - xa - xb) / ((xc - xa) * (xc - xb));
    };
    refresh(recs[0], three_point(0, 1, 2, recs[0].time));
    for (std::size_t i = 1; i + 1 < n; ++i)
        refresh(recs[i], three_point(i - 1, i, i + 1, recs[i].time));
    refresh(recs[n - 1], three_point(n - 3, n - 2, n - 1, recs[n - 1].time));
}

/// Root of the least-squares linear fit of 1/I on the last third of the
/// series (the Riccati mechanism makes 1/I asymptotically linear).
struct BlowupFit {
    double t_star = 0.0;
    double r_squared = 0.0;
};

inline BlowupFit estimate_blowup_time(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 5)
        throw std::invalid_argument("estimate_blowup_time: need at least 5 samples");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].second > series[i - 1].second))
            throw std::invalid_argument("estimate_blowup_time: I must be increasing");
    const std::size_t n = series.size(), i0 = (2 * n) / 3;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
    for (std::size_t i = i0; i < n; ++i) {
        const double x = series[i].first, y = 1.0 / series[i].second;
        sx += x; sy += y; sxx += x * x; sxy += x * y; cnt += 1;
    }
    const double denom = cnt * sxx - sx * sx;
    const double slope = (cnt * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / cnt;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / cnt;
    for (std::size_t i = i0; i < n; ++i) {
        const double x = series[i].first, y = 1.0 / series[i].second;
        const double e = y - (icept + slope * x);
        ss_res += e * e;
        ss_tot += (y - ymean) * (y - ymean);
    }
    BlowupFit fit;
    fit.t_star = -icept / slope;
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

struct DtPolicy {
    double dt0 = 2e-3;          // base step; effective dt = dt0 / (1 + I/I0)
    double stop_factor = 50.0;  // stop once I >= stop_factor * I(0)
    int max_steps = 2000000;
};

struct BlowupResult {
    SectorConfig cfg;
    int N = 0;
    double q = 0.0;
    DtPolicy policy;
    std::vector<MonitorRecord> records;
    std::vector<std::vector<double>> history;  // marker edges per record
    MarkerField final_state;
    MarkerField initial_state;
    double I0 = 0.0;
    BlowupFit fit;
    double c_min = 0.0;  // min riccati ratio over assembled records
    bool collided = false;
};

/// Theorem-1.3 experiment: evolve g0 = theta^{-alpha} under the blowup
/// convention with adaptive dt until I(t) >= stop_factor * I(0) (or marker
/// collision), recording monitors and the full marker history.
inline BlowupResult run_blowup(const SectorConfig& cfg, int N, const DtPolicy& policy,
                               const AngularProfile* custom_g0 = nullptr,
                               double q_override = 0.0) {
    const double q = q_override > 0.0 ? q_override : default_grading(cfg);
    AngularProfile g0 = custom_g0 ? *custom_g0
                                  : AngularProfile([a = cfg.alpha](double th) {
                                        return std::pow(th, -a);
                                    });
    BlowupResult out;
    out.cfg = cfg;
    out.N = N;
    out.q = q;
    out.policy = policy;
    MarkerField state = marker_field_from_profile(g0, cfg, N, q, cfg.alpha);
    out.initial_state = state;
    out.I0 = mass(state);
    const auto pairs = monitor_pairs(N);
    MonitorRecord prev;
    bool have_prev = false;
    for (int it = 0; it < policy.max_steps; ++it) {
        MonitorRecord rec = monitors(state, have_prev ? &prev : nullptr, pairs);
        out.records.push_back(rec);
        out.history.push_back(state.theta);
        prev = rec;
        have_prev = true;
        if (rec.I >= policy.stop_factor * out.I0) break;
        const double dt = policy.dt0 / (1.0 + rec.I / out.I0);
        try {
            state = step(state, dt);
        } catch (const MarkerCollisionError&) {
            out.collided = true;
            break;
        }
    }
    out.final_state = state;
    finalize_series(out.records);
    // alpha = 0 data g0 = 1 is an exact steady state (the profile has no
    // angular gradient), so I stays constant and no blow-up time exists
    if (out.records.back().I >= 1.5 * out.I0) {
        std::vector<std::pair<double, double>> series;
        series.reserve(out.records.size());
        for (const auto& r : out.records) series.push_back({r.time, r.I});
        out.fit = estimate_blowup_time(series);
    } else {
        out.fit.t_star = std::numeric_limits<double>::infinity();
        out.fit.r_squared = 0.0;
    }
    out.c_min = out.records.empty() ? 0.0 : out.records.front().riccati_ratio;
    for (const auto& r : out.records) out.c_min = std::min(out.c_min, r.riccati_ratio);
    return out;
}

/// Marker state interpolated at an intermediate recorded time.
inline MarkerField state_at_time(const BlowupResult& run, double t) {
    const auto& recs = run.records;
    if (recs.empty() || t < recs.front().time - 1e-12 || t > recs.back().time + 1e-12)
        throw std::invalid_argument("state_at_time: requested time beyond history");
    std::size_t k = 1;
    while (k < recs.size() && recs[k].time < t) ++k;
    k = std::min(k, recs.size() - 1);
    const double t0 = recs[k - 1].time, t1 = recs[k].time;
    const double w = t1 > t0 ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
    MarkerField f = run.initial_state;
    f.time = t;
    for (std::size_t i = 0; i < f.theta.size(); ++i)
        f.theta[i] = (1.0 - w) * run.history[k - 1][i] + w * run.history[k][i];
    return f;
}

/// Evolves a state to a target time with the adaptive policy (either
/// direction); I0_ref sets the dt scaling, usually the forward run's I(0).
inline MarkerField evolve_to(MarkerField state, double t_target, double dt0,
                             double I0_ref) {
    const double sgn = t_target >= state.time ? 1.0 : -1.0;
    int guard = 0;
    while (std::abs(t_target - state.time) > 1e-13) {
        const double I = mass(state);
        double dt = dt0 / (1.0 + std::abs(I) / I0_ref);
        dt = std::min(dt, std::abs(t_target - state.time));
        state = step(state, sgn * dt);
        if (++guard > 10000000) throw std::runtime_error("evolve_to: step guard exceeded");
    }
    return state;
}

}  // namespace sieuler
