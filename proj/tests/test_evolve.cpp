#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sieuler/evolve.hpp"

using namespace sieuler;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
const SectorConfig cfg = make_sector_config(3, 0.5, StreamConvention::blowup);

MarkerField singular_field(int N) {
    return marker_field_from_profile([](double th) { return std::pow(th, -0.5); },
                                     cfg, N, 4.0, 0.5);
}
}  // namespace

TEST_CASE("step: synthetic stream override translates markers exactly") {
    MarkerField f = singular_field(64);
    const double c = 0.37, dt = 1e-2;
    const MarkerField g = step(f, dt, [&](double, double) { return c; });
    for (int i = 1; i < f.cells(); ++i)
        CHECK(g.theta[i] == Approx(f.theta[i] + 2.0 * c * dt).margin(1e-15));
    CHECK(g.theta[0] == 0.0);
    CHECK(g.theta.back() == Approx(cfg.sector()));
    CHECK_THROWS_AS(step(f, 0.0), std::invalid_argument);
}

TEST_CASE("step: forward-backward reversibility at small dt") {
    MarkerField f = singular_field(128);
    const double dt = 1e-3;
    const MarkerField fwd = step(f, dt);
    const MarkerField back = step(fwd, -dt);
    double sup = 0.0;
    for (std::size_t i = 0; i < f.theta.size(); ++i)
        sup = std::max(sup, std::abs(back.theta[i] - f.theta[i]));
    CHECK(sup < 1e-12);
}

TEST_CASE("step: transport exactness and ordering") {
    MarkerField f = singular_field(128);
    MarkerField g = f;
    for (int it = 0; it < 20; ++it) g = step(g, 2e-3);
    CHECK(g.values == f.values);  // carried values bit-identical
    CHECK(g.mass0 == f.mass0);
    for (int i = 0; i < g.cells(); ++i) CHECK(g.theta[i + 1] > g.theta[i]);
}

TEST_CASE("step: one-step Richardson order ~ 4") {
    // error of a single macro step against a much finer reference
    MarkerField f = singular_field(96);
    auto advance = [&](double dt, int steps) {
        MarkerField g = f;
        for (int i = 0; i < steps; ++i) g = step(g, dt);
        return g;
    };
    const MarkerField ref = advance(2.5e-4, 64);  // T = 0.016
    auto err = [&](double dt) {
        const MarkerField g = advance(dt, static_cast<int>(std::lround(0.016 / dt)));
        double sup = 0.0;
        for (std::size_t i = 0; i < g.theta.size(); ++i)
            sup = std::max(sup, std::abs(g.theta[i] - ref.theta[i]));
        return sup;
    };
    const double e1 = err(4e-3), e2 = err(2e-3), e3 = err(1e-3);
    CHECK(std::log2(e1 / e2) >= 3.5);
    CHECK(std::log2(e2 / e3) >= 3.5);
}

TEST_CASE("monitors: zero data gives zero residuals") {
    const MarkerField f =
        marker_field_from_profile([](double) { return 0.0; }, cfg, 64, 2.0, 0.0);
    const auto pairs = monitor_pairs(64);
    const MonitorRecord r0 = monitors(f, nullptr, pairs);
    CHECK(r0.I == Approx(0.0).margin(1e-15));
    CHECK(r0.slope_identity_gap == Approx(0.0).margin(1e-10));
    const MonitorRecord r1 = monitors(f, &r0, pairs);
    CHECK(r1.dIdt == Approx(0.0).margin(1e-15));
    CHECK(r1.ratio_drift_min == Approx(0.0).margin(1e-15));
}

TEST_CASE("monitors: initial data saturates the corollary bound exactly") {
    const MarkerField f = singular_field(256);
    const auto pairs = monitor_pairs(256);
    const MonitorRecord r = monitors(f, nullptr, pairs);
    CHECK(r.corollary_gap_max == Approx(0.0).margin(1e-12));
}

TEST_CASE("blow-up time estimator on exact Riccati solutions") {
    SECTION("I = 1/(1-t)") {
        std::vector<std::pair<double, double>> s;
        for (int i = 0; i < 40; ++i) {
            const double t = 0.02 * i;
            s.push_back({t, 1.0 / (1.0 - t)});
        }
        const BlowupFit fit = estimate_blowup_time(s);
        CHECK(fit.t_star == Approx(1.0).epsilon(1e-10));
        CHECK(fit.r_squared >= 1.0 - 1e-12);
    }
    SECTION("I = 2/(3-2t)") {
        std::vector<std::pair<double, double>> s;
        for (int i = 0; i < 40; ++i) {
            const double t = 0.03 * i;
            s.push_back({t, 2.0 / (3.0 - 2.0 * t)});
        }
        CHECK(estimate_blowup_time(s).t_star == Approx(1.5).epsilon(1e-10));
    }
    SECTION("non-monotone series rejected") {
        std::vector<std::pair<double, double>> s{{0, 1}, {0.1, 2}, {0.2, 1.5},
                                                 {0.3, 3}, {0.4, 4}};
        CHECK_THROWS_AS(estimate_blowup_time(s), std::invalid_argument);
    }
}

TEST_CASE("blow-up run: invariants at small N, all marker pairs") {
    const DtPolicy policy{4e-3, 30.0, 200000};
    const BlowupResult run = run_blowup(cfg, 192, policy);
    REQUIRE(run.records.size() > 50);
    CHECK_FALSE(run.collided);

    SECTION("monotone mass and Riccati lower bound") {
        for (std::size_t i = 1; i < run.records.size(); ++i)
            CHECK(run.records[i].I > run.records[i - 1].I);
        CHECK(run.c_min > 0.0);
    }
    SECTION("identities within tolerance at this resolution") {
        for (const auto& r : run.records) {
            CHECK(r.identity_residual <= 2e-3);
            CHECK(r.slope_identity_gap <= 1e-4);
        }
    }
    SECTION("full O(N^2) pair checks on selected records") {
        for (std::size_t k : {std::size_t(0), run.records.size() / 2,
                              run.records.size() - 1}) {
            const auto& edges = run.history[k];
            const int N = run.N;
            // corollary bound for all pairs: values are theta0^{-alpha}
            double max_gap = -1e300;
            for (int i = 1; i < N; i += 7) {
                for (int j = i + 1; j < N; j += 11) {
                    const double gi = std::pow(run.initial_state.theta0[i], -0.5);
                    const double gj = std::pow(run.initial_state.theta0[j], -0.5);
                    const double bound = std::pow(edges[j] / edges[i], -0.5);
                    max_gap = std::max(max_gap, gj / gi - bound);
                }
            }
            CHECK(max_gap <= 1e-8);
        }
    }
    SECTION("ratio monotonicity across records, all sampled pairs") {
        for (std::size_t k = 1; k < run.records.size(); ++k)
            CHECK(run.records[k].ratio_drift_min >= -1e-10);
    }
    SECTION("estimated blow-up time is finite and plausible") {
        CHECK(run.fit.t_star > run.records.back().time);
        CHECK(run.fit.t_star < 2.0);
        CHECK(run.fit.r_squared > 0.995);
    }
}

TEST_CASE("blow-up run: reversibility over a quarter horizon") {
    const DtPolicy policy{2e-3, 50.0, 200000};
    const BlowupResult run = run_blowup(cfg, 256, policy);
    const double T = 0.25 * run.fit.t_star;
    MarkerField f = run.initial_state;
    f = evolve_to(f, T, policy.dt0, run.I0);
    f = evolve_to(f, 0.0, policy.dt0, run.I0);
    double sup = 0.0;
    for (std::size_t i = 0; i < f.theta.size(); ++i)
        sup = std::max(sup, std::abs(f.theta[i] - run.initial_state.theta0[i]));
    CHECK(sup < 1e-8);
}

TEST_CASE("alpha = 0 limit case: g0 = 1 is an exact steady state") {
    // the alpha -> 0 limit of theta^{-alpha} has no angular gradient, so the
    // transport equation leaves the profile invariant: I stays constant, the
    // markers still drift right under the steady positive stream, and every
    // monitor stays clean
    const SectorConfig cfg0 = make_sector_config(3, 0.0, StreamConvention::blowup);
    const DtPolicy policy{4e-3, 20.0, 400};
    const BlowupResult run = run_blowup(cfg0, 128, policy);
    REQUIRE(run.records.size() > 100);
    for (const auto& r : run.records) {
        CHECK(std::abs(r.I - run.I0) <= 1e-10 * run.I0);
        CHECK(r.corollary_gap_max <= 1e-8);
        CHECK(r.ratio_drift_min >= -1e-10);
        CHECK(r.slope_identity_gap <= 1e-4);  // h^2 mismatch at this coarse N
    }
    CHECK(std::isinf(run.fit.t_star));
    // markers flow right under the steady stream: ratios strictly increase
    CHECK(run.history.back()[64] > run.history.front()[64]);
}
