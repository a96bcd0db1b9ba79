#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "sieuler/fields.hpp"
#include "sieuler/modes.hpp"
#include "sieuler/quadrature.hpp"
#include "sieuler/sector.hpp"

namespace sieuler {

/// Prefactor/domain variants of the singular kernel representations.  The
/// printed constants and the constants obtained by direct resummation of
/// the mode sums disagree (a factor m for psi, a factor m and the
/// integration domain for the velocities); calibration against the spectral
/// oracle selects one variant operationally, the others stay reported.
struct KernelVariant {
    bool paper_psi_prefactor = false;       // m/(4pi) instead of 1/(4pi)
    bool paper_velocity_prefactor = false;  // m^2/(2pi) instead of m/(2pi)
    bool ur_half_domain = false;            // (0,pi/m) single term, no mirror image

    std::string name() const {
        std::string s = paper_psi_prefactor ? "psi=m/4pi" : "psi=1/4pi";
        s += paper_velocity_prefactor ? " vel=m^2/2pi" : " vel=m/2pi";
        s += ur_half_domain ? " ur=half" : " ur=full";
        return s;
    }
};

namespace detail {

// All kernel integrals are folded onto rho = s/r >= 1 (the s < r branch maps
// through s -> r/rho with Jacobian rho^{-3}); lambda = rho^{-m} < 1 on the
// fold, so every denominator is evaluated in its stable sub-unit form.
struct KernelGeometry {
    double r, th, L;
    int m;
    const PolarScalarField* w;

    double lam(double rho) const { return std::pow(rho, -m); }

    double omega_at(double s, double phi) const {
        if (s < w->support_lo || s > w->support_hi) return 0.0;
        return (*w)(s, phi);
    }
    // bracket of the fold: omega(r rho) rho +/- omega(r/rho) rho^{-3}
    double bracket(double rho, double phi, double sign) const {
        const double a = omega_at(r * rho, phi) * rho;
        const double b = omega_at(r / rho, phi) / (rho * rho * rho);
        return a + sign * b;
    }

    double denom_minus(double lm, double phi) const {
        const double c = std::cos(m * (phi - th));
        return (1.0 - lm) * (1.0 - lm) + 2.0 * lm * (1.0 - c);
    }
    double denom_plus(double lm, double phi) const {
        const double c = std::cos(m * (phi + th));
        return (1.0 - lm) * (1.0 - lm) + 2.0 * lm * (1.0 - c);
    }

    double rho_cap() const {
        double hi = std::max(2.0, w->support_hi / r);
        // the folded s < r branch reaches s = r/rho; support down to 0 needs
        // the full fold, truncated only by the rho^{-(m+2)} kernel decay
        hi = std::max(hi, w->support_lo > 0.0 ? r / w->support_lo : 400.0);
        return std::min(hi, 400.0);  // tail below 1e-12 past this for m >= 3
    }

    // Fixed outer panel edges: graded into the rho = 1 layer (the inner
    // integral has a delta*log(delta) cusp there), geometric in the far
    // field, with support edges of both fold branches inserted.
    std::vector<double> outer_panels(double rho_hi) const {
        std::vector<double> e{1.0};
        for (double d = 1e-6; d < 0.3; d *= 8.0) e.push_back(1.0 + d);
        for (double g = 1.6; g < rho_hi; g *= 1.9) e.push_back(g);
        auto push = [&](double x) {
            if (x > 1.0 && x < rho_hi) e.push_back(x);
        };
        push(w->support_hi / r);
        push(r / w->support_hi);
        if (w->support_lo > 0.0) {
            push(w->support_lo / r);
            push(r / w->support_lo);
        }
        e.push_back(rho_hi);
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        return e;
    }
};

// Variant-independent kernel integrals at one target; every public kernel
// value is a prefactor times one of these (plus the optional mirror term).
struct KernelPieces {
    double psi = 0.0;       // log-ratio integral (both mirror halves built in)
    double ur_diag = 0.0;   // sin(m(phi-theta)) term over (0, pi/m)
    double ur_mirror = 0.0; // sin(m(phi+theta)) image term over (0, pi/m)
    double ut = 0.0;        // folded u^theta integrand (mirror built in)
};

enum KernelPieceMask { kPsiPiece = 1, kUrPiece = 2, kUtPiece = 4 };

inline KernelPieces kernel_pieces(const PolarScalarField& w, double r, double th,
                                  const SectorConfig& cfg, double tol,
                                  int which = kPsiPiece | kUrPiece | kUtPiece) {
    if (r <= 0.0) throw std::invalid_argument("kernel integral: need r > 0");
    if (w.envelope_alpha >= 1.0)
        throw std::invalid_argument("kernel integral: non-integrable envelope");
    KernelGeometry geo{r, th, cfg.sector(), cfg.m, &w, };
    const double L = geo.L;
    const int m = cfg.m;
    const double rho_hi = geo.rho_cap();
    const auto panels = geo.outer_panels(rho_hi);
    const double itol = 0.05 * tol;
    constexpr long kInnerBudget = 20000;  // per inner segment
    // fixed graded panels outside, shallow adaptivity inside each panel
    // a panel contributes only if one of the fold branches meets the support
    auto panel_active = [&](double ra, double rb) {
        const bool up = r * rb >= w.support_lo && r * ra <= w.support_hi;
        const bool dn = r / ra >= w.support_lo && r / rb <= w.support_hi;
        return up || dn;
    };
    auto outer = [&](auto&& f) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
            if (!panel_active(panels[i], panels[i + 1])) continue;
            total += adaptive_gauss(f, panels[i], panels[i + 1], 0.125 * tol, 12, 6000);
        }
        return total;
    };
    KernelPieces out;

    if (which & kPsiPiece) {
        auto inner_psi = [&](double rho) {
            const double lm = geo.lam(rho);
            auto f = [&](double phi) {
                return std::log(geo.denom_minus(lm, phi) / geo.denom_plus(lm, phi)) *
                       geo.bracket(rho, phi, +1.0);
            };
            return adaptive_gauss_split(f, 0.0, L, {th}, itol, kInnerBudget);
        };
        out.psi = outer(inner_psi);
    }

    // u^r diagonal term: odd kernel across phi = theta; the symmetric window
    // is integrated in antisymmetrized form, removing the principal-value
    // head exactly, and the leftover windows never touch the diagonal.
    if (which & kUrPiece) {
    auto inner_ur = [&](double rho) {
        const double lm = geo.lam(rho);
        auto K = [&](double phi) {
            return lm * std::sin(m * (phi - th)) / geo.denom_minus(lm, phi);
        };
        auto B = [&](double phi) { return geo.bracket(rho, phi, +1.0); };
        const double wd = std::min(th, L - th);
        auto folded = [&](double v) { return K(th + v) * (B(th + v) - B(th - v)); };
        double total = adaptive_gauss(folded, 0.0, wd, itol, 48, kInnerBudget);
        if (th - wd > 0.0)
            total += adaptive_gauss([&](double p) { return K(p) * B(p); }, 0.0,
                                    th - wd, itol, 48, kInnerBudget);
        if (th + wd < L)
            total += adaptive_gauss([&](double p) { return K(p) * B(p); }, th + wd,
                                    L, itol, 48, kInnerBudget);
        return total;
    };
    out.ur_diag = outer(inner_ur);

    auto inner_ur_mirror = [&](double rho) {
        const double lm = geo.lam(rho);
        auto f = [&](double phi) {
            return lm * std::sin(m * (phi + th)) / geo.denom_plus(lm, phi) *
                   geo.bracket(rho, phi, +1.0);
        };
        return adaptive_gauss(f, 0.0, L, itol, 48, kInnerBudget);
    };
    out.ur_mirror = outer(inner_ur_mirror);
    }

    // u^theta: the fold pairs s with r^2/s, so the bracket vanishes at
    // rho = 1 and the near-diagonal cancellation is built into the integrand.
    if (which & kUtPiece) {
    auto inner_ut = [&](double rho) {
        const double lm = geo.lam(rho);
        auto f = [&](double phi) {
            const double cm = std::cos(m * (phi - th));
            const double cp = std::cos(m * (phi + th));
            const double K = lm * ((lm - cm) / geo.denom_minus(lm, phi) -
                                   (lm - cp) / geo.denom_plus(lm, phi));
            return K * geo.bracket(rho, phi, -1.0);
        };
        return adaptive_gauss_split(f, 0.0, L, {th}, itol, kInnerBudget);
    };
    out.ut = outer(inner_ut);
    }
    return out;
}

inline double psi_prefactor(const SectorConfig& cfg, const KernelVariant& var) {
    return (var.paper_psi_prefactor ? cfg.m : 1.0) / (4.0 * std::numbers::pi);
}
inline double vel_prefactor(const SectorConfig& cfg, const KernelVariant& var) {
    return (var.paper_velocity_prefactor ? double(cfg.m) * cfg.m : double(cfg.m)) /
           (2.0 * std::numbers::pi);
}

}  // namespace detail

/// Stream function by the singular log-kernel at an interior target.
inline double kernel_psi(const PolarScalarField& w, double r, double th,
                         const SectorConfig& cfg, const KernelVariant& var = {},
                         double tol = 1e-10) {
    const detail::KernelPieces p =
        detail::kernel_pieces(w, r, th, cfg, tol, detail::kPsiPiece);
    return detail::psi_prefactor(cfg, var) * r * r * p.psi;
}

/// Velocity components by singular quadrature (see kernel_pieces for the
/// diagonal treatment).
inline std::pair<double, double> kernel_velocity(const PolarScalarField& w, double r,
                                                 double th, const SectorConfig& cfg,
                                                 const KernelVariant& var = {},
                                                 double tol = 1e-10) {
    const detail::KernelPieces p = detail::kernel_pieces(
        w, r, th, cfg, tol, detail::kUrPiece | detail::kUtPiece);
    const double pref = detail::vel_prefactor(cfg, var);
    const double ur = pref * r * (p.ur_diag + (var.ur_half_domain ? 0.0 : p.ur_mirror));
    const double ut = pref * r * p.ut;
    return {ur, ut};
}

/// Appendix series identities, with both normalizations of the sin-sin sum.
struct IdentityCheck {
    double series_sincos = 0.0;        // sum lambda^k sin(mk phi) cos(mk theta)
    double closed_sincos = 0.0;
    double series_sinsin_paper = 0.0;  // sum with 1/(mk), as printed
    double series_sinsin_unit = 0.0;   // sum with 1/k
    double closed_sinsin = 0.0;        // (1/4) ln(D_+ / D_-)
};

inline IdentityCheck kernel_identity_check(double lambda, int m, double phi,
                                           double theta) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("kernel_identity_check: need 0 <= lambda < 1");
    IdentityCheck out;
    double pw = 1.0;
    for (int k = 1; k < 200000; ++k) {
        pw *= lambda;
        const double sc = pw * std::sin(m * k * phi) * std::cos(m * k * theta);
        const double ss = pw * std::sin(m * k * phi) * std::sin(m * k * theta);
        out.series_sincos += sc;
        out.series_sinsin_unit += ss / k;
        out.series_sinsin_paper += ss / (double(m) * k);
        if (k > 8 && pw < 1e-14 * (std::abs(out.series_sincos) +
                                   std::abs(out.series_sinsin_unit) + 1.0))
            break;
    }
    const double dp = 1.0 - 2.0 * lambda * std::cos(m * (phi + theta)) + lambda * lambda;
    const double dm = 1.0 - 2.0 * lambda * std::cos(m * (phi - theta)) + lambda * lambda;
    out.closed_sincos = 0.5 * (lambda * std::sin(m * (phi + theta)) / dp +
                               lambda * std::sin(m * (phi - theta)) / dm);
    out.closed_sinsin = 0.25 * std::log(dp / dm);
    return out;
}

struct CalibrationEntry {
    std::string variant;
    double residual_psi = 0.0;
    double residual_ur = 0.0;
    double residual_ut = 0.0;
    double residual() const { return std::max({residual_psi, residual_ur, residual_ut}); }
};

struct CalibrationReport {
    KernelVariant selected;
    std::vector<CalibrationEntry> entries;
    double selected_residual = 0.0;
    int variants_below_1e6 = 0;  // uniqueness witness for the acceptance gate
};

/// Runs the single-mode battery (k = 1..3, two radial bumps) against the
/// spectral oracle for every prefactor/domain variant and selects the
/// minimizer.  The variant-independent integrals are computed once per
/// battery point; variants differ only in prefactors and the mirror term.
/// Pure and deterministic: rerunning yields the identical report.
inline CalibrationReport calibrate_kernel_constants(const SectorConfig& cfg,
                                                    double tol = 1e-9) {
    struct Point {
        double psi_o, ur_o, ut_o, scale;
        detail::KernelPieces pieces;
    };
    std::vector<Point> pts;
    const struct { double c, w; } bumps[2] = {{1.5, 0.22}, {0.9, 0.14}};
    const double L = cfg.sector();
    const double radii[2] = {0.45, 1.35};
    const double angles[2] = {0.21 * L, 0.62 * L};
    for (int k = 1; k <= 3; ++k) {
        for (const auto& b : bumps) {
            const PolarScalarField field = sine_mode_field(cfg.m, k, b.c, b.w);
            auto radial = [c = b.c, w = b.w](double s) {
                const double x = (s - c) / w;
                return std::exp(-x * x);
            };
            const RadialModeProfile mode =
                make_mode(k, radial, std::max(0.0, b.c - 6 * b.w), b.c + 6 * b.w);
            const SpectralVelocity oracle = spectral_velocity({mode}, cfg);
            for (double r : radii) {
                for (double a : angles) {
                    Point p;
                    p.psi_o = oracle.psi(r, a);
                    std::tie(p.ur_o, p.ut_o) = oracle(r, a);
                    p.scale = std::max(
                        {std::abs(p.psi_o), std::abs(p.ur_o), std::abs(p.ut_o), 1e-8});
                    p.pieces = detail::kernel_pieces(field, r, a, cfg, tol);
                    p.pieces.psi *= r * r;  // fold in the target geometry
                    p.pieces.ur_diag *= r;
                    p.pieces.ur_mirror *= r;
                    p.pieces.ut *= r;
                    pts.push_back(p);
                }
            }
        }
    }
    CalibrationReport rep;
    double best = 1e300;
    for (int pp = 0; pp < 2; ++pp) {
        for (int pv = 0; pv < 2; ++pv) {
            for (int hd = 0; hd < 2; ++hd) {
                const KernelVariant var{pp == 1, pv == 1, hd == 1};
                CalibrationEntry e;
                e.variant = var.name();
                const double cp = detail::psi_prefactor(cfg, var);
                const double cv = detail::vel_prefactor(cfg, var);
                for (const auto& p : pts) {
                    const double psi_k = cp * p.pieces.psi;
                    const double ur_k =
                        cv * (p.pieces.ur_diag + (var.ur_half_domain ? 0.0 : p.pieces.ur_mirror));
                    const double ut_k = cv * p.pieces.ut;
                    e.residual_psi = std::max(e.residual_psi, std::abs(psi_k - p.psi_o) / p.scale);
                    e.residual_ur = std::max(e.residual_ur, std::abs(ur_k - p.ur_o) / p.scale);
                    e.residual_ut = std::max(e.residual_ut, std::abs(ut_k - p.ut_o) / p.scale);
                }
                if (e.residual() <= 1e-6) ++rep.variants_below_1e6;
                if (e.residual() < best) {
                    best = e.residual();
                    rep.selected = var;
                    rep.selected_residual = e.residual();
                }
                rep.entries.push_back(std::move(e));
            }
        }
    }
    if (rep.selected_residual > 1e-4)
        throw std::runtime_error(
            "calibrate_kernel_constants: no variant reaches 1e-4 residual");
    return rep;
}

}  // namespace sieuler
