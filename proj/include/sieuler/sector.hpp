#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sieuler {

/// Sign convention of the one-dimensional stream law on the sector.
///
///   intro :  (4 + d_theta^2) G =  g
///   blowup:  (4 + d_theta^2) G = -g   (g and G then share a sign)
enum class StreamConvention { intro, blowup };

inline const char* to_string(StreamConvention c) {
    return c == StreamConvention::intro ? "intro" : "blowup";
}

/// Global parameters of every computation: m-fold odd symmetry order and
/// the algebraic singularity exponent alpha of the reference data.
///
/// All angular work lives on the fundamental sector (0, pi/m).
struct SectorConfig {
    int m = 3;
    double alpha = 0.5;
    StreamConvention convention = StreamConvention::blowup;

    double sector() const { return std::numbers::pi / m; }
};

/// Validated constructor. m >= 3 is required throughout (it gives kernel
/// integrability and m^2 - 4 > 0); alpha must lie in [0, 1).
inline SectorConfig make_sector_config(int m, double alpha,
                                       StreamConvention convention) {
    if (m < 3)
        throw std::invalid_argument("sector: symmetry order m must be >= 3, got " +
                                    std::to_string(m));
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("sector: exponent alpha must lie in [0,1), got " +
                                    std::to_string(alpha));
    return SectorConfig{m, alpha, convention};
}

/// Interior nodes of a power-graded partition of (0, pi/m):
/// nodes_j = (pi/m) (j/N)^q for j = 1..N-1.  q >= 1 clusters nodes at
/// theta = 0 where the reference data behaves like theta^{-alpha}.
struct GradedGrid {
    std::vector<double> nodes;  // strictly increasing, interior only
    double q = 1.0;
    int cell_count = 0;  // N: number of cells of the full partition

    /// Cell edges including the pinned endpoints 0 and pi/m.
    std::vector<double> edges(double sector_len) const {
        std::vector<double> e(nodes.size() + 2);
        e.front() = 0.0;
        std::copy(nodes.begin(), nodes.end(), e.begin() + 1);
        e.back() = sector_len;
        return e;
    }
};

inline GradedGrid graded_grid(const SectorConfig& cfg, int N, double q) {
    if (N < 8) throw std::invalid_argument("graded_grid: need N >= 8 cells");
    if (q < 1.0) throw std::invalid_argument("graded_grid: grading exponent q must be >= 1");
    GradedGrid grid;
    grid.q = q;
    grid.cell_count = N;
    grid.nodes.resize(N - 1);
    const double L = cfg.sector();
    for (int j = 1; j < N; ++j)
        grid.nodes[j - 1] = L * std::pow(double(j) / N, q);
    return grid;
}

/// Default grading exponent: q = 2/(1-alpha) resolves theta^{-alpha}
/// endpoint behaviour at the global second-order rate.
inline double default_grading(const SectorConfig& cfg) {
    return 2.0 / (1.0 - cfg.alpha);
}

}  // namespace sieuler
