#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sieuler/kernels.hpp"

namespace sieuler {

/// Evaluation grid for the lemma verifications: tensor of log-spaced radii
/// and interior angles.  level+1 refines by nested midpoint insertion, so
/// grid suprema are monotone under refinement.
struct LemmaGrid {
    double r_lo = 1e-3, r_hi = 2.0;
    int nr = 4, na = 4;
    int level = 0;

    // endpoints included; level doubles the cell count by midpoint insertion,
    // so each level's point set contains the previous one and grid suprema
    // are monotone under refinement
    std::vector<double> radii() const {
        const int cells = (nr - 1) << level;
        std::vector<double> r(cells + 1);
        for (int i = 0; i <= cells; ++i)
            r[i] = r_lo * std::pow(r_hi / r_lo, double(i) / cells);
        return r;
    }
    std::vector<double> angles(double L) const {
        const int cells = (na - 1) << level;
        std::vector<double> a(cells + 1);
        for (int i = 0; i <= cells; ++i)
            a[i] = L * (0.08 + 0.84 * double(i) / cells);
        return a;
    }
};

struct LinearGrowthReport {
    double sup_ur_over_r = 0.0;
    double sup_ut_over_r = 0.0;
    double sup_ur_refined = 0.0;
    double sup_ut_refined = 0.0;
    bool refinement_stable = false;  // < 5% change under nested grid doubling
    double envelope_norm = 0.0;      // ||(r+theta)^alpha omega||_inf on the grid
};

/// Velocity growth verification: sup |u^r|/r and sup |u^theta|/r over the
/// sample grid, with nested-refinement stability.
inline LinearGrowthReport verify_linear_growth(const PolarScalarField& w,
                                               const LemmaGrid& grid,
                                               const SectorConfig& cfg,
                                               const KernelVariant& var = {},
                                               double tol = 1e-8) {
    LinearGrowthReport rep;
    const double L = cfg.sector();
    auto sweep = [&](int level, double& sup_r, double& sup_t) {
        LemmaGrid g = grid;
        g.level = level;
        for (double r : g.radii()) {
            for (double a : g.angles(L)) {
                const auto [ur, ut] = kernel_velocity(w, r, a, cfg, var, tol * r);
                sup_r = std::max(sup_r, std::abs(ur) / r);
                sup_t = std::max(sup_t, std::abs(ut) / r);
            }
        }
    };
    sweep(0, rep.sup_ur_over_r, rep.sup_ut_over_r);
    rep.sup_ur_refined = rep.sup_ur_over_r;
    rep.sup_ut_refined = rep.sup_ut_over_r;
    sweep(1, rep.sup_ur_refined, rep.sup_ut_refined);
    auto rel = [](double a, double b) { return std::abs(b - a) / std::max(b, 1e-300); };
    rep.refinement_stable = rel(rep.sup_ur_over_r, rep.sup_ur_refined) < 0.05 &&
                            rel(rep.sup_ut_over_r, rep.sup_ut_refined) < 0.05;
    for (double r : grid.radii())
        for (double a : grid.angles(L))
            rep.envelope_norm =
                std::max(rep.envelope_norm, std::pow(r + a, cfg.alpha) * std::abs(w(r, a)));
    return rep;
}

struct WeightedDerivativeRow {
    std::string name;
    double lhs_sup = 0.0;   // weighted velocity-derivative sup over the grid
    double rhs_norm = 0.0;  // the lemma's weighted vorticity norm combination
    double ratio = 0.0;     // lhs/rhs: finite and refinement-stable expected
};

struct WeightedDerivativeReport {
    int order = 1;
    std::vector<WeightedDerivativeRow> rows;
};

namespace detail {

// central finite differences of the kernel velocities; high derivatives of
// the singular field itself come from the closed-form oracle instead
template <class F>
double central_diff(const F& f, double x, double h, int k) {
    if (k == 1) return (f(x + h) - f(x - h)) / (2.0 * h);
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double weight_fn(double s, int k) {
    const double p = std::pow(s, k - 1);
    return p / (1.0 + p);
}

// sup over a sample grid of (r+theta)^{j+alpha} |d_r^a d_th^b omega|
inline double weighted_norm(const PolarScalarField& w, int a, int b, double alpha,
                            const LemmaGrid& grid, double L) {
    LemmaGrid g = grid;
    g.level = 1;  // denser sampling for the norms, they are cheap
    double sup = 0.0;
    for (double r : g.radii())
        for (double th : g.angles(L))
            sup = std::max(sup, std::pow(r + th, a + b + alpha) *
                                    std::abs(w.d(a, b, r, th)));
    return sup;
}

}  // namespace detail

/// The weighted derivative estimates: left-hand quantities evaluated on the
/// grid via finite differences of the kernel velocities, right-hand weighted
/// vorticity norms from the derivative oracle, and their ratios.
inline WeightedDerivativeReport verify_weighted_derivatives(
    const PolarScalarField& w, int k, const LemmaGrid& grid, const SectorConfig& cfg,
    const KernelVariant& var = {}, double tol = 1e-8) {
    if (k < 1 || k > 2)
        throw std::invalid_argument("verify_weighted_derivatives: order k in {1,2}");
    if (!w.deriv || w.max_deriv < k + 1)
        throw std::invalid_argument(
            "verify_weighted_derivatives: derivative oracle to order k+1 required");
    const double L = cfg.sector();
    const double alpha = cfg.alpha;
    WeightedDerivativeReport rep;
    rep.order = k;
    WeightedDerivativeRow dr_ur{"dr^k u^r", 0, 0, 0};
    WeightedDerivativeRow dt_ur{"dth^k u^r / r", 0, 0, 0};
    WeightedDerivativeRow dr_ut{"dr^k u^theta", 0, 0, 0};
    WeightedDerivativeRow dt_ut{"dth^k u^theta / r", 0, 0, 0};
    WeightedDerivativeRow dr_utr{"dr^k (u^theta/r)", 0, 0, 0};

    for (double r : grid.radii()) {
        for (double a : grid.angles(L)) {
            const double wk = detail::weight_fn(r + a, k);
            const double hr = 0.04 * std::max(r, 0.02);
            const double ha = 0.04 * std::min(a, L - a);
            // one five-point stencil of velocity evaluations serves every
            // quantity at this grid point
            const auto vc = kernel_velocity(w, r, a, cfg, var, tol * r);
            const auto vrp = kernel_velocity(w, r + hr, a, cfg, var, tol * r);
            const auto vrm = kernel_velocity(w, r - hr, a, cfg, var, tol * r);
            const auto vtp = kernel_velocity(w, r, a + ha, cfg, var, tol * r);
            const auto vtm = kernel_velocity(w, r, a - ha, cfg, var, tol * r);
            auto diff_r = [&](double fp, double fc, double fm) {
                return k == 1 ? (fp - fm) / (2.0 * hr) : (fp - 2.0 * fc + fm) / (hr * hr);
            };
            auto diff_t = [&](double fp, double fc, double fm) {
                return k == 1 ? (fp - fm) / (2.0 * ha) : (fp - 2.0 * fc + fm) / (ha * ha);
            };
            dr_ur.lhs_sup = std::max(dr_ur.lhs_sup,
                                     wk * std::abs(diff_r(vrp.first, vc.first, vrm.first)));
            dr_ut.lhs_sup = std::max(dr_ut.lhs_sup,
                                     wk * std::abs(diff_r(vrp.second, vc.second, vrm.second)));
            dr_utr.lhs_sup = std::max(
                dr_utr.lhs_sup, wk * std::abs(diff_r(vrp.second / (r + hr), vc.second / r,
                                                     vrm.second / (r - hr))));
            // the theta-derivative statements carry a pointwise envelope factor
            const double dtu = wk * std::abs(diff_t(vtp.first, vc.first, vtm.first)) / r;
            dt_ur.lhs_sup =
                std::max(dt_ur.lhs_sup, dtu / (1.0 + std::pow(r + a, -alpha)));
            dt_ut.lhs_sup = std::max(
                dt_ut.lhs_sup,
                wk * std::abs(diff_t(vtp.second, vc.second, vtm.second)) / r);
        }
    }
    dr_ur.rhs_norm = detail::weighted_norm(w, k, 0, alpha, grid, L) +
                     k * detail::weighted_norm(w, k - 1, 0, alpha, grid, L);
    dt_ur.rhs_norm = detail::weighted_norm(w, 0, k, alpha, grid, L);
    dr_ut.rhs_norm = dr_ur.rhs_norm;
    dt_ut.rhs_norm = detail::weighted_norm(w, 1, k - 1, alpha, grid, L) +
                     detail::weighted_norm(w, 0, k - 1, alpha, grid, L);
    dr_utr.rhs_norm = detail::weighted_norm(w, k + 1, 0, alpha, grid, L) +
                      detail::weighted_norm(w, k, 0, alpha, grid, L);
    for (WeightedDerivativeRow* row : {&dr_ur, &dt_ur, &dr_ut, &dt_ut, &dr_utr}) {
        row->ratio = row->lhs_sup / std::max(row->rhs_norm, 1e-300);
        rep.rows.push_back(*row);
    }
    return rep;
}

}  // namespace sieuler
