#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "sieuler/metrics.hpp"
#include "sieuler/quadrature.hpp"
#include "sieuler/sector.hpp"

using namespace sieuler;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("sector config validation") {
    const SectorConfig cfg = make_sector_config(3, 0.5, StreamConvention::blowup);
    CHECK(cfg.m == 3);
    CHECK(cfg.alpha == 0.5);
    CHECK(cfg.sector() == Approx(kPi / 3));
    CHECK_THROWS_AS(make_sector_config(2, 0.5, StreamConvention::blowup),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_sector_config(3, 1.0, StreamConvention::blowup),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_sector_config(3, -0.1, StreamConvention::blowup),
                    std::invalid_argument);
    CHECK_NOTHROW(make_sector_config(3, 0.0, StreamConvention::intro));
}

TEST_CASE("graded grid nodes") {
    const SectorConfig cfg = make_sector_config(3, 0.5, StreamConvention::blowup);
    SECTION("uniform case q=1") {
        // graded_grid enforces N >= 8 in production; the q=1 law is checked
        // at N=12 and the N=4 reference values via the formula directly.
        const GradedGrid g = graded_grid(cfg, 12, 1.0);
        REQUIRE(g.nodes.size() == 11);
        CHECK(g.nodes[2] == Approx(kPi / 12));  // (pi/3)(3/12)
        CHECK(g.nodes[5] == Approx(kPi / 6));
        CHECK(g.nodes[8] == Approx(kPi / 4));
    }
    SECTION("grading law q=2") {
        const GradedGrid g = graded_grid(cfg, 16, 2.0);
        CHECK(g.nodes[3] == Approx((kPi / 3) * std::pow(4.0 / 16, 2)));  // pi/48
        CHECK(g.nodes[7] == Approx((kPi / 3) * 0.25));                   // pi/12
        CHECK(g.nodes[11] == Approx((kPi / 3) * std::pow(0.75, 2)));     // 3pi/16
    }
    SECTION("doubling N halves max spacing for q=1") {
        auto max_gap = [&](int N) {
            const auto e = graded_grid(cfg, N, 1.0).edges(cfg.sector());
            double h = 0;
            for (std::size_t i = 1; i < e.size(); ++i) h = std::max(h, e[i] - e[i - 1]);
            return h;
        };
        CHECK(max_gap(32) == Approx(0.5 * max_gap(16)));
    }
    CHECK_THROWS_AS(graded_grid(cfg, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(graded_grid(cfg, 16, 0.5), std::invalid_argument);
}

TEST_CASE("power-singular quadrature") {
    SECTION("closed forms") {
        auto f = [](double t) { return std::pow(t, -0.5); };
        CHECK(quad_power_singular(f, 0.5, 0.0, 1.0) == Approx(2.0).epsilon(1e-10));
        CHECK(quad_power_singular(f, 0.5, 0.0, kPi / 3) ==
              Approx(2.0 * std::sqrt(kPi / 3)).epsilon(1e-10));
        CHECK(quad_power_singular([](double) { return 1.0; }, 0.5, 0.0, 1.0) ==
              Approx(1.0).epsilon(1e-12));
    }
    SECTION("beta >= 1 rejected") {
        CHECK_THROWS_AS(quad_power_singular([](double) { return 1.0; }, 1.0, 0.0, 1.0),
                        std::invalid_argument);
    }
    SECTION("smooth integrand against endpoint weight") {
        // Int_0^1 t^{-1/2} cos(t) dt = sqrt(2 pi) C(sqrt(2/pi)) (Fresnel);
        // reference computed with a fine fixed rule on the transformed integral
        auto f = [](double t) { return std::pow(t, -0.5) * std::cos(t); };
        const double val = quad_power_singular(f, 0.5, 0.0, 1.0);
        // brute-force oracle: substitution t = v^2, dt = 2v dcv -> 2 Int cos(v^2) dv
        double oracle = 0.0;
        const int M = 200000;
        for (int i = 0; i < M; ++i) {
            const double v = (i + 0.5) / M;
            oracle += 2.0 * std::cos(v * v) / M;
        }
        CHECK(val == Approx(oracle).epsilon(1e-9));
    }
    SECTION("empirical convergence order >= 4 via refinement triples") {
        // rate of the composite scheme on the transformed integrand, measured
        // with two-point Gauss panels so the error stays above rounding
        auto f = [](double t) { return std::pow(t, -0.5) * std::exp(std::sin(9.0 * t)); };
        auto composite = [&](int panels) {
            const double s = 2.0;  // 1/(1-beta) with beta=1/2
            const double x1 = -1.0 / std::sqrt(3.0), x2 = 1.0 / std::sqrt(3.0);
            auto transformed = [&](double v) {
                const double t = std::pow(v, s);
                return f(t) * s * std::pow(v, s - 1.0);
            };
            double total = 0.0;
            for (int j = 0; j < panels; ++j) {
                const double a = double(j) / panels, b = double(j + 1) / panels;
                const double c = 0.5 * (a + b), h = 0.5 * (b - a);
                total += h * (transformed(c + h * x1) + transformed(c + h * x2));
            }
            return total;
        };
        const double exact = quad_power_singular(f, 0.5, 0.0, 1.0, 1e-14);
        const double e1 = std::abs(composite(8) - exact);
        const double e2 = std::abs(composite(16) - exact);
        const double e3 = std::abs(composite(32) - exact);
        CHECK(std::log2(e1 / e2) >= 3.5);
        CHECK(std::log2(e2 / e3) >= 3.5);
        CHECK(0.5 * std::log2(e1 / e3) >= 3.9);  // mean order across the triple
    }
}

TEST_CASE("sphere Lp distance") {
    const SectorConfig cfg = make_sector_config(3, 0.5, StreamConvention::blowup);
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };
    SECTION("identity") {
        auto f = [](double th) { return std::sin(3 * th); };
        CHECK(lp_sphere_distance(f, f, 2.0, cfg) == Approx(0.0).margin(1e-14));
    }
    SECTION("constant over full circle") {
        CHECK(lp_sphere_distance(one, zero, 2.0, cfg) ==
              Approx(std::sqrt(2 * kPi)).epsilon(1e-10));
    }
    SECTION("singular head, p=1") {
        auto f = [](double th) { return std::pow(th, -0.5); };
        CHECK(lp_sphere_distance(f, zero, 1.0, cfg) ==
              Approx(6.0 * 2.0 * std::sqrt(kPi / 3)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(lp_sphere_distance(one, zero, 0.5, cfg), std::invalid_argument);
}

TEST_CASE("Lp_loc ball metric") {
    const SectorConfig cfg = make_sector_config(3, 0.5, StreamConvention::blowup);
    auto zero = [](double) { return 0.0; };
    auto one = [](double) { return 1.0; };
    SECTION("identity") {
        CHECK(lp_loc_distance(one, one, 2.0, 40, cfg) == Approx(0.0).margin(1e-14));
    }
    SECTION("constant: ball averages are the constant, geometric sum is 2") {
        CHECK(lp_loc_distance(one, zero, 2.0, 400, cfg) == Approx(2.0).epsilon(1e-10));
    }
    SECTION("loc/sphere ratio is profile independent") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> amp(-2.0, 2.0);
        const double p = 1.7;
        const double expect = lp_loc_sphere_ratio(p, 40);
        for (int trial = 0; trial < 10; ++trial) {
            const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng), a4 = amp(rng);
            auto f = [=](double th) { return a1 * std::sin(3 * th) + a2 * std::sin(6 * th); };
            auto g = [=](double th) { return a3 * std::sin(3 * th) + a4 * std::pow(th, -0.4); };
            const double ds = lp_sphere_distance(f, g, p, cfg);
            const double dl = lp_loc_distance(f, g, p, 40, cfg);
            CHECK(dl / ds == Approx(expect).epsilon(1e-6));
        }
        // measured constant: 2 (2 pi)^{-1/p}, not 1 -- reported, not forced
        CHECK(expect == Approx(2.0 * std::pow(2 * kPi, -1.0 / p)).epsilon(1e-10));
    }
    SECTION("triangle inequality on random profile triples") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> amp(-1.5, 1.5);
        for (int trial = 0; trial < 10; ++trial) {
            const double c[9] = {amp(rng), amp(rng), amp(rng), amp(rng), amp(rng),
                                 amp(rng), amp(rng), amp(rng), amp(rng)};
            auto f = [&](double th) { return c[0] * std::sin(3 * th) + c[1] * std::cos(th) + c[2]; };
            auto g = [&](double th) { return c[3] * std::sin(3 * th) + c[4] * std::cos(th) + c[5]; };
            auto h = [&](double th) { return c[6] * std::sin(3 * th) + c[7] * std::cos(th) + c[8]; };
            const double fg = lp_sphere_distance(f, g, 2.0, cfg);
            const double gh = lp_sphere_distance(g, h, 2.0, cfg);
            const double fh = lp_sphere_distance(f, h, 2.0, cfg);
            CHECK(fh <= fg + gh + 1e-12);
        }
    }
}
