#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freebound/gradientflow.hpp"
#include "freebound/linalg.hpp"
#include "freebound/presets.hpp"
#include "freebound/regularized.hpp"

using namespace freebound;
namespace reg = freebound::regularized;

namespace {

/// Damped fixed-point oracle: lag the consumption term and iterate linear
/// backward-Euler solves to stagnation. Independent of the semismooth path.
GridField fixed_point_oracle(const GridField& u_n, const reg::RegParams& p) {
    const int n = u_n.nx;
    const double inv_h2 = 1.0 / (u_n.h * u_n.h);
    const double inv_k = 1.0 / p.k;
    const double eps = 1.0 / p.c;

    GridField u = u_n;
    for (int sweep = 0; sweep < 100000; ++sweep) {
        linalg::BandedSystem sys;
        sys.diag.resize(n);
        sys.sub.assign(n - 1, -inv_h2);
        sys.super.assign(n - 1, -inv_h2);
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            const int stencil = (i == 0 || i == n - 1) ? 1 : 2;
            sys.diag[i] = inv_k + stencil * inv_h2;
            rhs[i] = u_n.v[i] * inv_k - reg::f_epsilon(u.v[i], eps);
        }
        auto x = linalg::solve_tridiagonal(sys, rhs);
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            const double blended = 0.5 * u.v[i] + 0.5 * x[i];
            change = std::max(change, std::abs(blended - u.v[i]));
            u.v[i] = blended;
        }
        if (change < 1e-13) break;
    }
    return u;
}

}  // namespace

TEST_CASE("f_epsilon branches") {
    CHECK(reg::f_epsilon(2e-3, 1e-3) == 1.0);
    CHECK(reg::f_epsilon(0.5e-3, 1e-3) == doctest::Approx(0.5));
    CHECK(reg::f_epsilon(0.0, 1e-3) == 0.0);
}

TEST_CASE("reg_step: zero is a fixed point") {
    auto u = reg::reg_step(presets::make_uniform(16, 0.0), {1e3, 0.1});
    for (double x : u.v) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("reg_step: uniform field above the kink depletes by k") {
    auto u = reg::reg_step(presets::make_uniform(16, 5.0), {1e3, 0.25});
    for (double x : u.v) CHECK(x == doctest::Approx(4.75).epsilon(1e-12));
}

TEST_CASE("reg_step matches the damped fixed-point oracle") {
    reg::RegParams p{200.0, 2e-3};
    auto u_n = presets::make_field_1d(24, presets::ic_quadratic);
    auto got = reg::reg_step(u_n, p);
    auto expect = fixed_point_oracle(u_n, p);
    for (int i = 0; i < 24; ++i) CHECK(std::abs(got.v[i] - expect.v[i]) < 1e-8);
}

TEST_CASE("reg_step oracle agreement across the c ladder") {
    auto u_n = presets::make_field_1d(16, presets::ic_twobump);
    for (double c : {50.0, 500.0, 5000.0}) {
        reg::RegParams p{c, 1e-3};
        auto got = reg::reg_step(u_n, p);
        auto expect = fixed_point_oracle(u_n, p);
        for (int i = 0; i < 16; ++i) CHECK(std::abs(got.v[i] - expect.v[i]) < 1e-8);
    }
}

TEST_CASE("reg_evolve: zero stays zero") {
    auto traj = reg::reg_evolve(presets::make_uniform(8, 0.0), {1e3, 0.1}, 0.5);
    for (const auto& s : traj.snapshots)
        for (double x : s.v) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("reg_evolve: uniform decay tracks the gradient flow then stays positive") {
    auto traj = reg::reg_evolve(presets::make_uniform(8, 1.0), {1e6, 0.1}, 1.5);
    for (int j = 0; j <= 9; ++j) {
        const double expect = 1.0 - 0.1 * j;
        if (expect < 2e-6) break;
        for (double x : traj.snapshots[j].v) CHECK(x == doctest::Approx(expect).epsilon(1e-6));
    }
    for (const auto& s : traj.snapshots)
        for (double x : s.v) CHECK(x >= -1e-12);
}

TEST_CASE("monotonicity: identical c gives zero gap") {
    auto u0 = presets::make_field_1d(32, presets::ic_quadratic);
    auto rep = reg::monotonicity_report(u0, {100.0, 100.0}, 1e-3, 0.02);
    CHECK(rep.worst <= 1e-12);
    CHECK(rep.pass);
}

TEST_CASE("monotonicity: uniform field far above every kink") {
    auto u0 = presets::make_uniform(8, 10.0);
    auto rep = reg::monotonicity_report(u0, {100.0, 1000.0}, 1e-2, 0.05);
    CHECK(rep.worst <= 1e-12);
    CHECK(rep.pass);
}

TEST_CASE("monotonicity ladder on the standard profile") {
    auto u0 = presets::make_field_1d(64, presets::ic_quadratic);
    auto rep = reg::monotonicity_report(u0, {1e2, 1e3, 1e4}, 1e-3, 0.05);
    CHECK(rep.pass);
    REQUIRE(rep.runs.size() == 3);

    // gap to the constrained gradient flow shrinks as c grows
    auto gf_traj = gradientflow::gf_evolve(u0, 1e-3, 0.05,
                                           {.warm_start = true, .stop_on_extinction = false});
    std::vector<double> gaps;
    for (const auto& run : rep.runs) {
        double gap = 0.0;
        for (std::size_t j = 0; j < run.snapshots.size(); ++j)
            for (int i = 0; i < 64; ++i)
                gap = std::max(gap, std::abs(run.snapshots[j].v[i] - gf_traj.snapshots[j].v[i]));
        gaps.push_back(gap);
    }
    CHECK(gaps[1] <= gaps[0] + 1e-12);
    CHECK(gaps[2] <= gaps[1] + 1e-12);
}

TEST_CASE("every reg_step output stays essentially nonnegative") {
    auto u0 = presets::make_field_1d(48, presets::ic_nonmonotone);
    auto traj = reg::reg_evolve(u0, {1e3, 1e-3}, 0.1);
    for (const auto& s : traj.snapshots)
        for (double x : s.v) CHECK(x >= -1e-12);
}
