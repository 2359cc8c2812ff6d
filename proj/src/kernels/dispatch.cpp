#include "freebound/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace freebound::kernels {

namespace {

bool use_avx2() {
#if defined(FREEBOUND_HAVE_AVX2)
    static const bool enabled = [] {
        if (const char* env = std::getenv("FREEBOUND_SIMD"))
            if (std::strcmp(env, "scalar") == 0) return false;
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return enabled;
#else
    return false;
#endif
}

}  // namespace

std::string_view active_isa() { return use_avx2() ? "avx2" : "scalar"; }

double dot(std::span<const double> x, std::span<const double> y) {
#if defined(FREEBOUND_HAVE_AVX2)
    if (use_avx2()) return avx2::dot(x, y);
#endif
    return scalar::dot(x, y);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
#if defined(FREEBOUND_HAVE_AVX2)
    if (use_avx2()) return avx2::axpy(a, x, y);
#endif
    scalar::axpy(a, x, y);
}

void apply_mask(std::span<const double> mask, std::span<double> x) {
#if defined(FREEBOUND_HAVE_AVX2)
    if (use_avx2()) return avx2::apply_mask(mask, x);
#endif
    scalar::apply_mask(mask, x);
}

void shifted_laplacian_1d(std::span<const double> u, std::span<double> out,
                          double inv_k, double inv_h2) {
#if defined(FREEBOUND_HAVE_AVX2)
    if (use_avx2()) return avx2::shifted_laplacian_1d(u, out, inv_k, inv_h2);
#endif
    scalar::shifted_laplacian_1d(u, out, inv_k, inv_h2);
}

void shifted_laplacian_2d(const double* u, double* out, int nx, int ny,
                          double inv_k, double inv_h2) {
#if defined(FREEBOUND_HAVE_AVX2)
    if (use_avx2()) return avx2::shifted_laplacian_2d(u, out, nx, ny, inv_k, inv_h2);
#endif
    scalar::shifted_laplacian_2d(u, out, nx, ny, inv_k, inv_h2);
}

}  // namespace freebound::kernels
