#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sieuler/kernels.hpp"
#include "sieuler/parallel.hpp"
#include "sieuler/sector.hpp"

namespace sieuler {

struct CloudDomainError : std::runtime_error {
    int index;
    CloudDomainError(int i, const std::string& what)
        : std::runtime_error(what + " (particle " + std::to_string(i) + ")"), index(i) {}
};

/// 2D Lagrangian vorticity: polar particle positions, carried vorticity
/// values and quadrature weights (area elements at initialization).  Both
/// omega and w are conserved along the incompressible flow; only positions
/// evolve.
struct ParticleCloud {
    SectorConfig cfg;
    double time = 0.0;
    std::vector<double> r;
    std::vector<double> theta;
    std::vector<double> omega;
    std::vector<double> w;      // r dr dtheta per particle, constant in time
    std::vector<double> blob;   // local mollification length per particle
    int nr = 0, na = 0;
    double r_min = 0.0, r_max = 0.0;
    double grading_q = 2.0;

    std::size_t size() const { return r.size(); }
};

/// Tensor particle grid: geometric radial layers on [r_min, r_max] (equal
/// resolution per octave toward the origin) and power-graded angles.
/// Weights are exact cell areas; the per-particle blob length is half the
/// local radial spacing (the design default for the kernel mollification).
inline ParticleCloud init_cloud(const std::function<double(double, double)>& omega0,
                                double r_min, double r_max, int nr, int na,
                                const SectorConfig& cfg, double grading_q = 2.0) {
    if (r_min <= 0.0) throw std::invalid_argument("init_cloud: need r_min > 0");
    if (nr < 16 || na < 16) throw std::invalid_argument("init_cloud: resolution >= 16x16");
    const double L = cfg.sector();
    ParticleCloud c;
    c.cfg = cfg;
    c.nr = nr;
    c.na = na;
    c.r_min = r_min;
    c.r_max = r_max;
    c.grading_q = grading_q;
    std::vector<double> re(nr + 1), te(na + 1);
    for (int i = 0; i <= nr; ++i) re[i] = r_min * std::pow(r_max / r_min, double(i) / nr);
    for (int j = 0; j <= na; ++j) te[j] = L * std::pow(double(j) / na, grading_q);
    c.r.reserve(std::size_t(nr) * na);
    for (int i = 0; i < nr; ++i) {
        const double rc = 0.5 * (re[i] + re[i + 1]);
        const double dr = re[i + 1] - re[i];
        for (int j = 0; j < na; ++j) {
            const double tc = 0.5 * (te[j] + te[j + 1]);
            const double dt = te[j + 1] - te[j];
            c.r.push_back(rc);
            c.theta.push_back(tc);
            c.omega.push_back(omega0(rc, tc));
            c.w.push_back(rc * dr * dt);
            c.blob.push_back(0.5 * dr);
        }
    }
    return c;
}

namespace detail {

// Per-source tables for the pairwise kernel sums.
struct CloudTables {
    std::vector<double> sm;      // s^m
    std::vector<double> cosp;    // cos(m phi)
    std::vector<double> sinp;    // sin(m phi)
    std::vector<double> strength;  // omega * w
    std::vector<double> moll;    // (m * blob / s)^2, dimensionless
};

inline CloudTables cloud_tables(const ParticleCloud& c, double delta) {
    const int m = c.cfg.m;
    CloudTables t;
    const std::size_t n = c.size();
    t.sm.resize(n);
    t.cosp.resize(n);
    t.sinp.resize(n);
    t.strength.resize(n);
    t.moll.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        t.sm[p] = std::pow(c.r[p], m);
        t.cosp[p] = std::cos(m * c.theta[p]);
        t.sinp[p] = std::sin(m * c.theta[p]);
        t.strength[p] = c.omega[p] * c.w[p];
        const double d = delta > 0.0 ? delta : c.blob[p];
        const double u = m * d / c.r[p];
        t.moll[p] = u * u;
    }
    return t;
}

}  // namespace detail

/// Regularized two-term kernel sums over the particles: the image term
/// (phi + theta) carries the odd reflection, the m-fold symmetry lives in
/// the cos(m .) arguments.  delta > 0 mollifies at a fixed physical length;
/// delta = 0 uses each source's own local blob.  Deterministic: sources are
/// summed in index order, parallel only over targets.
inline std::vector<std::pair<double, double>> cloud_velocity(
    const ParticleCloud& c, const std::vector<std::pair<double, double>>& targets,
    double delta, int threads = 1, const KernelVariant& var = {}) {
    const int m = c.cfg.m;
    const detail::CloudTables tab = detail::cloud_tables(c, delta);
    const double pref = detail::vel_prefactor(c.cfg, var);
    std::vector<std::pair<double, double>> out(targets.size());
    parallel_for(targets.size(), threads, [&](std::size_t ti) {
        const double r = targets[ti].first, th = targets[ti].second;
        const double rm = std::pow(r, m);
        const double cmt = std::cos(m * th), smt = std::sin(m * th);
        double ur = 0.0, ut = 0.0;
        const std::size_t n = c.size();
        for (std::size_t p = 0; p < n; ++p) {
            const double sm = tab.sm[p];
            const bool upper = sm > rm;
            const double lam = upper ? rm / sm : sm / rm;
            const double cdm = tab.cosp[p] * cmt + tab.sinp[p] * smt;  // cos(m(phi-th))
            const double sdm = tab.sinp[p] * cmt - tab.cosp[p] * smt;  // sin(m(phi-th))
            const double cpm = tab.cosp[p] * cmt - tab.sinp[p] * smt;  // cos(m(phi+th))
            const double spm = tab.sinp[p] * cmt + tab.cosp[p] * smt;  // sin(m(phi+th))
            const double one_m = (1.0 - lam) * (1.0 - lam);
            const double Am = one_m + 2.0 * lam * (1.0 - cdm) + tab.moll[p];
            const double Ap = one_m + 2.0 * lam * (1.0 - cpm) + tab.moll[p];
            const double str = tab.strength[p] * lam;
            ur += str * (sdm / Am + (var.ur_half_domain ? 0.0 : spm / Ap));
            const double num_m = upper ? lam - cdm : cdm - lam;
            const double num_p = upper ? lam - cpm : cpm - lam;
            ut += str * (num_m / Am - num_p / Ap);
        }
        out[ti] = {pref * ur / r, pref * ut / r};
    });
    return out;
}

/// One classical fourth-order step of the polar particle system
/// d r / d t = u^r,  d theta / d t = u^theta / r, with the velocity
/// re-summed at every stage; omega and w are untouched.
inline ParticleCloud step2d(const ParticleCloud& c, double dt, double delta = 0.0,
                            int threads = 1) {
    const std::size_t n = c.size();
    const double L = c.cfg.sector();
    std::vector<std::pair<double, double>> pos(n);
    auto stage_velocity = [&](const std::vector<std::pair<double, double>>& p) {
        ParticleCloud tmp = c;  // positions replaced, sources move with stages
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i].first <= 0.0)
                throw CloudDomainError(static_cast<int>(i), "step2d: particle reached r <= 0");
            tmp.r[i] = p[i].first;
            tmp.theta[i] = p[i].second;
        }
        return cloud_velocity(tmp, p, delta, threads);
    };
    for (std::size_t i = 0; i < n; ++i) pos[i] = {c.r[i], c.theta[i]};
    auto k1 = stage_velocity(pos);
    std::vector<std::pair<double, double>> stage(n);
    // the angular rate is u^theta / r evaluated at the stage position
    auto rate = [&](const std::vector<std::pair<double, double>>& p,
                    const std::vector<std::pair<double, double>>& v,
                    std::vector<std::pair<double, double>>& out_rate) {
        for (std::size_t i = 0; i < n; ++i)
            out_rate[i] = {v[i].first, v[i].second / p[i].first};
    };
    std::vector<std::pair<double, double>> f1(n), f2(n), f3(n), f4(n);
    rate(pos, k1, f1);
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = {pos[i].first + 0.5 * dt * f1[i].first,
                    pos[i].second + 0.5 * dt * f1[i].second};
    auto k2 = stage_velocity(stage);
    rate(stage, k2, f2);
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = {pos[i].first + 0.5 * dt * f2[i].first,
                    pos[i].second + 0.5 * dt * f2[i].second};
    auto k3 = stage_velocity(stage);
    rate(stage, k3, f3);
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = {pos[i].first + dt * f3[i].first, pos[i].second + dt * f3[i].second};
    auto k4 = stage_velocity(stage);
    rate(stage, k4, f4);

    ParticleCloud out = c;
    out.time = c.time + dt;
    for (std::size_t i = 0; i < n; ++i) {
        out.r[i] = pos[i].first + (dt / 6.0) * (f1[i].first + 2 * f2[i].first +
                                                2 * f3[i].first + f4[i].first);
        out.theta[i] = pos[i].second + (dt / 6.0) * (f1[i].second + 2 * f2[i].second +
                                                     2 * f3[i].second + f4[i].second);
        if (out.r[i] <= 0.0)
            throw CloudDomainError(static_cast<int>(i), "step2d: particle reached r <= 0");
        if (out.theta[i] <= 0.0 || out.theta[i] >= L)
            throw CloudDomainError(static_cast<int>(i), "step2d: particle left the sector");
    }
    return out;
}

/// Angular profile at radius r0 from the particles in the band [r0/2, 2 r0]:
/// locally weighted least squares per probe angle, quadratic in the angle
/// and linear in log radius, so the leading interpolation biases of a curved
/// profile cancel and the value at (r0, a) is the fitted constant term.
inline std::vector<double> ring_profile(const ParticleCloud& c, double r0,
                                        const std::vector<double>& probe_angles) {
    const double lo = 0.5 * r0, hi = 2.0 * r0;
    std::vector<std::size_t> band;
    for (std::size_t p = 0; p < c.size(); ++p)
        if (c.r[p] >= lo && c.r[p] <= hi) band.push_back(p);
    if (band.empty()) throw std::invalid_argument("ring_profile: empty radial band");
    const double wr = 0.35 * std::numbers::ln2;
    const double q = c.grading_q;
    const double L = c.cfg.sector();
    std::vector<double> out(probe_angles.size());
    for (std::size_t k = 0; k < probe_angles.size(); ++k) {
        const double a = probe_angles[k];
        const double local = q * L * std::pow(a / L, 1.0 - 1.0 / q) / c.na;
        const double wa = std::max(2.5 * local, 1e-3 * L);
        // weighted normal equations for omega ~ c0 + c1 x + c2 x^2 + c3 y,
        // x = theta - a, y = log(r/r0)
        double A[4][4] = {};
        double b[4] = {};
        for (std::size_t p : band) {
            const double x = c.theta[p] - a;
            if (std::abs(x) > 4.0 * wa) continue;
            const double y = std::log(c.r[p] / r0);
            const double g = std::exp(-(x / wa) * (x / wa) - (y / wr) * (y / wr));
            const double basis[4] = {1.0, x, x * x, y};
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) A[i][j] += g * basis[i] * basis[j];
                b[i] += g * basis[i] * c.omega[p];
            }
        }
        // Gaussian elimination with partial pivoting on the 4x4 system;
        // fall back to the weighted mean if the band is too thin to fit
        double M[4][5];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) M[i][j] = A[i][j];
            M[i][4] = b[i];
        }
        bool ok = A[0][0] > 1e-12;
        for (int col = 0; col < 4 && ok; ++col) {
            int piv = col;
            for (int i = col + 1; i < 4; ++i)
                if (std::abs(M[i][col]) > std::abs(M[piv][col])) piv = i;
            if (std::abs(M[piv][col]) < 1e-12 * (std::abs(A[col][col]) + 1e-30)) {
                ok = false;
                break;
            }
            std::swap_ranges(M[col], M[col] + 5, M[piv]);
            for (int i = col + 1; i < 4; ++i) {
                const double f = M[i][col] / M[col][col];
                for (int j = col; j < 5; ++j) M[i][j] -= f * M[col][j];
            }
        }
        if (ok) {
            double sol[4];
            for (int i = 3; i >= 0; --i) {
                double s = M[i][4];
                for (int j = i + 1; j < 4; ++j) s -= M[i][j] * sol[j];
                sol[i] = s / M[i][i];
            }
            out[k] = sol[0];
        } else {
            out[k] = A[0][0] > 0.0 ? b[0] / A[0][0] : 0.0;
        }
    }
    return out;
}

/// Checkpoint format: JSON header, a zero byte, then four little-endian
/// double arrays r[], theta[], omega[], w[] of length n each.
inline void save_cloud(const ParticleCloud& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_cloud: cannot open " + path);
    std::string header = "{\"format\":\"sieuler-cloud-v1\",\"n\":" +
                         std::to_string(c.size()) + ",\"m\":" + std::to_string(c.cfg.m) +
                         ",\"alpha\":" + std::to_string(c.cfg.alpha) +
                         ",\"time\":" + std::to_string(c.time) +
                         ",\"layout\":[\"r\",\"theta\",\"omega\",\"w\"]}";
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.put('\0');
    auto dump = [&](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    dump(c.r);
    dump(c.theta);
    dump(c.omega);
    dump(c.w);
}

inline ParticleCloud load_cloud(const std::string& path, const SectorConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_cloud: cannot open " + path);
    std::string header;
    std::getline(in, header, '\0');
    const auto find_num = [&](const std::string& key) {
        const auto pos = header.find("\"" + key + "\":");
        if (pos == std::string::npos)
            throw std::runtime_error("load_cloud: missing header field " + key);
        return std::stod(header.substr(pos + key.size() + 3));
    };
    const std::size_t n = static_cast<std::size_t>(find_num("n"));
    ParticleCloud c;
    c.cfg = cfg;
    c.time = find_num("time");
    auto slurp = [&](std::vector<double>& v) {
        v.resize(n);
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        if (!in) throw std::runtime_error("load_cloud: truncated data in " + path);
    };
    slurp(c.r);
    slurp(c.theta);
    slurp(c.omega);
    slurp(c.w);
    c.blob.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) c.blob[i] = 0.1 * c.r[i];  // refreshed by callers
    return c;
}

}  // namespace sieuler
