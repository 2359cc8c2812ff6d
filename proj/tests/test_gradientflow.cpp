#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "freebound/gradientflow.hpp"
#include "freebound/linalg.hpp"
#include "freebound/presets.hpp"

using namespace freebound;
namespace gf = freebound::gradientflow;

TEST_CASE("gf_step: zero stays zero") {
    auto u = gf::gf_step(presets::make_uniform(16, 0.0), 0.1);
    for (double x : u.v) CHECK(x == 0.0);
}

TEST_CASE("gf_step: uniform field depletes by k") {
    auto u = gf::gf_step(presets::make_uniform(16, 1.0), 0.25);
    for (double x : u.v) CHECK(x == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("gf_step: positive region satisfies the unconstrained equation") {
    const int n = 64;
    const double k = 1e-3;
    auto u_n = presets::make_field_1d(n, presets::ic_quadratic);
    auto u = gf::gf_step(u_n, k);
    auto lap = linalg::neumann_laplacian_apply(u);
    for (int i = 0; i < n; ++i) {
        if (u.v[i] <= 1e-10) continue;
        const double res = (u.v[i] - u_n.v[i]) / k - lap.v[i] + 1.0;
        CHECK(std::abs(res) < 1e-8);
    }
}

TEST_CASE("discrete_energy basics") {
    CHECK(gf::discrete_energy(presets::make_uniform(10, 0.0)) == 0.0);
    CHECK(gf::discrete_energy(presets::make_uniform(10, 0.7)) == doctest::Approx(0.7));
    CHECK(gf::discrete_energy(presets::make_uniform(12, 0.3, 2)) == doctest::Approx(0.3));

    // u = x on [0,1]: energy -> 1/2 + 1/2
    auto lin = presets::make_field_1d(2048, [](double x) { return x; });
    CHECK(gf::discrete_energy(lin) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("gf_evolve: zero initial data is extinct at step 0") {
    auto traj = gf::gf_evolve(presets::make_uniform(8, 0.0), 0.1, 0.5);
    CHECK(traj.extinct);
    CHECK(traj.extinction_step == 0);
    for (const auto& s : traj.snapshots)
        for (double x : s.v) CHECK(x == 0.0);
}

TEST_CASE("gf_evolve: uniform decay is an arithmetic sequence") {
    auto traj = gf::gf_evolve(presets::make_uniform(8, 1.0), 0.1, 1.5);
    REQUIRE(traj.snapshots.size() == 16);
    for (int j = 0; j <= 15; ++j) {
        const double expect = std::max(0.0, 1.0 - 0.1 * j);
        for (double x : traj.snapshots[j].v) CHECK(x == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(traj.extinct);
    CHECK(traj.extinction_step == 10);
}

TEST_CASE("gf_evolve: standard profile has a monotone front") {
    auto u0 = presets::make_field_1d(128, presets::ic_quadratic);
    auto traj = gf::gf_evolve(u0, 1e-3, 0.05);
    const double tol = gf::default_census_tol(u0);
    double prev = 2.0;
    for (const auto& s : traj.snapshots) {
        auto front = gf::front_position_1d(s, tol);
        if (!front) break;
        CHECK(*front <= prev + u0.h);  // sub-grid estimator jitters within a cell
        prev = std::min(prev, *front);
    }
}

TEST_CASE("gf_evolve: energy trace dissipates") {
    auto traj = gf::gf_evolve(presets::make_field_1d(96, presets::ic_twobump), 1e-3, 0.06);
    const double slack = 1e-10 * (1.0 + std::abs(traj.energy[0]));
    for (std::size_t j = 0; j + 1 < traj.energy.size(); ++j)
        CHECK(traj.energy[j + 1] <= traj.energy[j] + slack);
    for (const auto& s : traj.snapshots) CHECK(s.min() >= 0.0);
}

TEST_CASE("gf_evolve rejects non-multiple horizons") {
    CHECK_THROWS_AS(gf::gf_evolve(presets::make_uniform(8, 1.0), 0.1, 0.55), DomainError);
}

TEST_CASE("interpolate_in_time") {
    auto traj = gf::gf_evolve(presets::make_uniform(8, 1.0), 0.1, 0.4);
    auto a = gf::interpolate_in_time(traj, 0.2);
    for (double x : a.v) CHECK(x == doctest::Approx(0.8).epsilon(1e-10));
    auto b = gf::interpolate_in_time(traj, 0.25);
    for (double x : b.v) CHECK(x == doctest::Approx(0.75).epsilon(1e-10));
    auto c = gf::interpolate_in_time(traj, 0.05);
    for (double x : c.v) CHECK(x == doctest::Approx(0.95).epsilon(1e-10));
    CHECK_THROWS_AS(gf::interpolate_in_time(traj, -0.1), DomainError);
    CHECK_THROWS_AS(gf::interpolate_in_time(traj, 0.41), DomainError);
}

TEST_CASE("free_boundary_census 1D examples") {
    GridField u(6, 1.0 / 6.0);
    u.v = {0, 0, 1, 1, 0, 0};
    auto c = gf::free_boundary_census(u, 1e-8);
    CHECK(c.boundary_nodes == 2);
    CHECK(c.components == 1);

    auto z = gf::free_boundary_census(presets::make_uniform(6, 0.0), 1e-8);
    CHECK(z.boundary_nodes == 0);
    CHECK(z.components == 0);

    GridField w(3, 1.0 / 3.0);
    w.v = {1, 0, 1};
    auto cw = gf::free_boundary_census(w, 1e-8);
    CHECK(cw.boundary_nodes == 1);
    CHECK(cw.components == 2);
}

TEST_CASE("free_boundary_census detects a 2D hole") {
    const int n = 32;
    GridField u(n, n, 1.0 / n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double r = std::hypot(u.x_of(i) - 0.5, u.y_of(j) - 0.5);
            if (r > 0.15 && r < 0.35) u.at(i, j) = 1.0;
        }
    auto c = gf::free_boundary_census(u, 1e-8);
    CHECK(c.components == 1);
    CHECK(c.holes == 1);

    // fill the centre: hole disappears
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double r = std::hypot(u.x_of(i) - 0.5, u.y_of(j) - 0.5);
            if (r <= 0.15) u.at(i, j) = 1.0;
        }
    auto c2 = gf::free_boundary_census(u, 1e-8);
    CHECK(c2.components == 1);
    CHECK(c2.holes == 0);
}

TEST_CASE("discrete contraction of the flow") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const int n = 48;
    for (int trial = 0; trial < 5; ++trial) {
        GridField a(n, 1.0 / n), b(n, 1.0 / n);
        for (int i = 0; i < n; ++i) {
            a.v[i] = dist(rng);
            b.v[i] = dist(rng);
        }
        gf::EvolveOptions opt;
        opt.stop_on_extinction = false;
        auto ta = gf::gf_evolve(a, 0.01, 0.1, opt);
        auto tb = gf::gf_evolve(b, 0.01, 0.1, opt);
        double rhs = 0.0;
        for (int i = 0; i < n; ++i) rhs += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
        rhs = std::sqrt(rhs / n);
        for (std::size_t j = 0; j < ta.snapshots.size(); ++j) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) {
                const double e = ta.snapshots[j].v[i] - tb.snapshots[j].v[i];
                d += e * e;
            }
            CHECK(std::sqrt(d / n) <= rhs + 1e-8);
        }
    }
}

TEST_CASE("vi_residual: the trajectory itself gives zero") {
    auto traj = gf::gf_evolve(presets::make_field_1d(32, presets::ic_quadratic), 1e-3, 0.02);
    std::vector<GridField> self(traj.snapshots.begin(), traj.snapshots.end());
    CHECK(gf::vi_residual_one(traj, self) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("vi_residual: uniform decay against v = 0") {
    auto traj = gf::gf_evolve(presets::make_uniform(16, 1.0), 0.1, 1.0);
    std::vector<GridField> zero(traj.snapshots.size(), presets::make_uniform(16, 0.0));
    CHECK(gf::vi_residual_one(traj, zero) >= -1e-12);
}

TEST_CASE("vi_residual: default trials are near-feasible") {
    auto traj = gf::gf_evolve(presets::make_field_1d(64, presets::ic_quadratic), 1e-3, 0.03);
    const double worst = gf::vi_residual(traj, gf::default_trial_paths(traj));
    CHECK(worst >= -1e-2);  // O(k + h^2) consistency slack
}

TEST_CASE("warm-start evolution matches cold-start evolution") {
    auto u0 = presets::make_field_1d(64, presets::ic_nonmonotone);
    gf::EvolveOptions cold;
    cold.warm_start = false;
    auto tw = gf::gf_evolve(u0, 1e-3, 0.02);
    auto tc = gf::gf_evolve(u0, 1e-3, 0.02, cold);
    REQUIRE(tw.snapshots.size() == tc.snapshots.size());
    for (std::size_t j = 0; j < tw.snapshots.size(); ++j)
        for (std::size_t i = 0; i < tw.snapshots[j].size(); ++i)
            CHECK(std::abs(tw.snapshots[j].v[i] - tc.snapshots[j].v[i]) < 1e-10);
}

TEST_CASE("kkt audit reports clean steps") {
    gf::EvolveOptions opt;
    opt.kkt_audit = true;
    double worst = 0.0;
    opt.worst_kkt = &worst;
    gf::gf_evolve(presets::make_field_1d(48, presets::ic_quadratic), 1e-3, 0.02, opt);
    CHECK(worst < 1e-9);
}
