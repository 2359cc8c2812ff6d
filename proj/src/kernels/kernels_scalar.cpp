#include "freebound/kernels.hpp"

namespace freebound::kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void apply_mask(std::span<const double> mask, std::span<double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= mask[i];
}

void shifted_laplacian_1d(std::span<const double> u, std::span<double> out,
                          double inv_k, double inv_h2) {
    const std::size_t n = u.size();
    if (n == 1) {
        out[0] = u[0] * inv_k;  // mirror ghosts on both sides cancel
        return;
    }
    out[0] = u[0] * inv_k - inv_h2 * (u[1] - u[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = u[i] * inv_k - inv_h2 * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
    out[n - 1] = u[n - 1] * inv_k - inv_h2 * (u[n - 2] - u[n - 1]);
}

void shifted_laplacian_2d(const double* u, double* out, int nx, int ny,
                          double inv_k, double inv_h2) {
    auto idx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double c = u[idx(i, j)];
            const double l = (i > 0) ? u[idx(i - 1, j)] : c;
            const double r = (i + 1 < nx) ? u[idx(i + 1, j)] : c;
            const double d = (j > 0) ? u[idx(i, j - 1)] : c;
            const double t = (j + 1 < ny) ? u[idx(i, j + 1)] : c;
            out[idx(i, j)] = c * inv_k - inv_h2 * (l + r + d + t - 4.0 * c);
        }
    }
}

}  // namespace freebound::kernels::scalar
