#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by all solvers. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. Set FREEBOUND_SIMD=scalar to force the reference path.

namespace freebound::kernels {

double dot(std::span<const double> x, std::span<const double> y);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// x *= mask componentwise (mask entries are 0 or 1)
void apply_mask(std::span<const double> mask, std::span<double> x);

/// out = u / k - inv_h2 * (3-point second difference of u with mirror ghosts)
void shifted_laplacian_1d(std::span<const double> u, std::span<double> out,
                          double inv_k, double inv_h2);

/// Same with the 5-point stencil on an nx-by-ny grid, mirror ghosts on all sides.
void shifted_laplacian_2d(const double* u, double* out, int nx, int ny,
                          double inv_k, double inv_h2);

/// Name of the variant the dispatcher selected ("avx2" or "scalar").
std::string_view active_isa();

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void apply_mask(std::span<const double> mask, std::span<double> x);
void shifted_laplacian_1d(std::span<const double> u, std::span<double> out,
                          double inv_k, double inv_h2);
void shifted_laplacian_2d(const double* u, double* out, int nx, int ny,
                          double inv_k, double inv_h2);
}  // namespace scalar

#if defined(__x86_64__)
#define FREEBOUND_HAVE_AVX2 1
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void apply_mask(std::span<const double> mask, std::span<double> x);
void shifted_laplacian_1d(std::span<const double> u, std::span<double> out,
                          double inv_k, double inv_h2);
void shifted_laplacian_2d(const double* u, double* out, int nx, int ny,
                          double inv_k, double inv_h2);
}  // namespace avx2
#endif

}  // namespace freebound::kernels
