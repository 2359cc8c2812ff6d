#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "freebound/presets.hpp"
#include "freebound/verify.hpp"

using namespace freebound;

TEST_CASE("grid_l2 on simple fields") {
    CHECK(verify::grid_l2(presets::make_uniform(16, 0.0)) == 0.0);
    CHECK(verify::grid_l2(presets::make_uniform(16, 2.0)) == doctest::Approx(2.0));
    CHECK(verify::grid_l2(presets::make_uniform(8, 3.0, 2)) == doctest::Approx(3.0));
}

TEST_CASE("contraction: identical initial conditions") {
    auto u0 = presets::make_field_1d(32, presets::ic_quadratic);
    auto r = verify::contraction_check(u0, u0, 1e-3, 0.01);
    CHECK(r.lhs == 0.0);
    CHECK(r.pass);
}

TEST_CASE("contraction: uniform shift") {
    auto a = presets::make_field_1d(32, presets::ic_quadratic);
    auto b = a;
    for (auto& x : b.v) x += 0.1;
    auto r = verify::contraction_check(a, b, 1e-3, 0.05);
    CHECK(r.rhs == doctest::Approx(0.1));
    CHECK(r.lhs <= 0.1 + 1e-10);
    CHECK(r.pass);
}

TEST_CASE("contraction: random pairs always pass") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        GridField a(64, 1.0 / 64.0), b(64, 1.0 / 64.0);
        for (int i = 0; i < 64; ++i) {
            a.v[i] = dist(rng);
            b.v[i] = dist(rng);
        }
        auto r = verify::contraction_check(a, b, 1e-3, 0.02);
        CHECK(r.pass);
    }
}

TEST_CASE("compare_methods: degenerate run is trivially close") {
    auto cmp = verify::compare_methods([](double) { return 0.0; }, 32, 1e-3, 0.01);
    CHECK(cmp.max_field_gap <= 1e-10);
}

TEST_CASE("compare_methods: standard profile, gap small and refining") {
    auto coarse = verify::compare_methods(presets::ic_quadratic, 128, 1e-4, 0.05);
    CHECK_FALSE(coarse.truncated);
    CHECK(coarse.max_field_gap <= 5e-2);

    auto fine = verify::compare_methods(presets::ic_quadratic, 256, 5e-5, 0.05);
    CHECK(fine.max_field_gap <= coarse.max_field_gap / 2.0);
}

TEST_CASE("compare_methods: nonmonotone front shape agrees") {
    // both methods see the rise-then-fall front
    auto cmp = verify::compare_methods(presets::ic_nonmonotone, 128, 1e-4, 0.1);
    CHECK_FALSE(cmp.truncated);
    CHECK(cmp.max_front_gap < 5e-2);

    auto u0 = presets::make_field_1d(192, presets::ic_nonmonotone, 1.5);
    gradientflow::EvolveOptions opt;
    opt.stop_on_extinction = false;
    auto gf = gradientflow::gf_evolve(u0, 1e-4, 0.1, opt);
    const double tol = gradientflow::default_census_tol(u0);
    std::vector<double> fronts;
    for (const auto& s : gf.snapshots) {
        auto f = gradientflow::front_position_1d(s, tol);
        REQUIRE(f);
        fronts.push_back(*f);
    }
    const auto peak = std::max_element(fronts.begin(), fronts.end());
    CHECK(*peak > fronts.front() + 1e-3);
    CHECK(fronts.back() < *peak - 1e-3);
}
