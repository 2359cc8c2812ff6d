#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "freebound/kernels.hpp"

using namespace freebound;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
    std::mt19937 rng(7);
    // sizes straddle the vector width and remainder handling
    for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 64u, 129u}) {
        auto x = random_vec(n, rng);
        auto y = random_vec(n, rng);

        CHECK(kernels::dot(x, y) == doctest::Approx(kernels::scalar::dot(x, y)).epsilon(1e-13));

        auto y1 = y, y2 = y;
        kernels::axpy(0.37, x, y1);
        kernels::scalar::axpy(0.37, x, y2);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

        std::vector<double> mask(n, 1.0);
        for (std::size_t i = 0; i < n; i += 2) mask[i] = 0.0;
        auto m1 = x, m2 = x;
        kernels::apply_mask(mask, m1);
        kernels::scalar::apply_mask(mask, m2);
        CHECK(m1 == m2);

        std::vector<double> o1(n), o2(n);
        kernels::shifted_laplacian_1d(x, o1, 3.0, 25.0);
        kernels::scalar::shifted_laplacian_1d(x, o2, 3.0, 25.0);
        for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-13));
    }
}

TEST_CASE("2D shifted laplacian variants agree") {
    std::mt19937 rng(11);
    for (auto [nx, ny] : {std::pair{3, 3}, {8, 5}, {17, 9}, {32, 32}}) {
        auto u = random_vec(static_cast<std::size_t>(nx) * ny, rng);
        std::vector<double> o1(u.size()), o2(u.size());
        kernels::shifted_laplacian_2d(u.data(), o1.data(), nx, ny, 2.0, 100.0);
        kernels::scalar::shifted_laplacian_2d(u.data(), o2.data(), nx, ny, 2.0, 100.0);
        for (std::size_t i = 0; i < u.size(); ++i)
            CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-13));
    }
}

#if defined(FREEBOUND_HAVE_AVX2)
TEST_CASE("avx2 variants match scalar when the CPU supports them") {
    if (!__builtin_cpu_supports("avx2")) return;
    std::mt19937 rng(23);
    auto x = random_vec(103, rng);
    auto y = random_vec(103, rng);
    CHECK(kernels::avx2::dot(x, y) ==
          doctest::Approx(kernels::scalar::dot(x, y)).epsilon(1e-13));

    std::vector<double> o1(x.size()), o2(x.size());
    kernels::avx2::shifted_laplacian_1d(x, o1, 1.5, 9.0);
    kernels::scalar::shifted_laplacian_1d(x, o2, 1.5, 9.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-13));
}
#endif
