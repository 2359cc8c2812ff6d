#include "freebound/kernels.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

namespace freebound::kernels::avx2 {

double dot(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x.data() + i);
        const __m256d b = _mm256_loadu_pd(y.data() + i);
        acc = _mm256_fmadd_pd(a, b, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    const __m256d va = _mm256_set1_pd(a);
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x.data() + i);
        const __m256d vy = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, vx, vy));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void apply_mask(std::span<const double> mask, std::span<double> x) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d m = _mm256_loadu_pd(mask.data() + i);
        const __m256d v = _mm256_loadu_pd(x.data() + i);
        _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(m, v));
    }
    for (; i < n; ++i) x[i] *= mask[i];
}

void shifted_laplacian_1d(std::span<const double> u, std::span<double> out,
                          double inv_k, double inv_h2) {
    const std::size_t n = u.size();
    if (n == 1) {
        out[0] = u[0] * inv_k;
        return;
    }
    out[0] = u[0] * inv_k - inv_h2 * (u[1] - u[0]);
    const __m256d vk = _mm256_set1_pd(inv_k);
    const __m256d vh = _mm256_set1_pd(inv_h2);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        const __m256d c = _mm256_loadu_pd(u.data() + i);
        const __m256d l = _mm256_loadu_pd(u.data() + i - 1);
        const __m256d r = _mm256_loadu_pd(u.data() + i + 1);
        const __m256d lap = _mm256_sub_pd(_mm256_add_pd(l, r), _mm256_mul_pd(two, c));
        _mm256_storeu_pd(out.data() + i,
                         _mm256_fnmadd_pd(vh, lap, _mm256_mul_pd(c, vk)));
    }
    for (; i + 1 < n; ++i)
        out[i] = u[i] * inv_k - inv_h2 * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
    out[n - 1] = u[n - 1] * inv_k - inv_h2 * (u[n - 2] - u[n - 1]);
}

void shifted_laplacian_2d(const double* u, double* out, int nx, int ny,
                          double inv_k, double inv_h2) {
    auto idx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    auto edge = [&](int i, int j) {
        const double c = u[idx(i, j)];
        const double l = (i > 0) ? u[idx(i - 1, j)] : c;
        const double r = (i + 1 < nx) ? u[idx(i + 1, j)] : c;
        const double d = (j > 0) ? u[idx(i, j - 1)] : c;
        const double t = (j + 1 < ny) ? u[idx(i, j + 1)] : c;
        out[idx(i, j)] = c * inv_k - inv_h2 * (l + r + d + t - 4.0 * c);
    };
    const __m256d vk = _mm256_set1_pd(inv_k);
    const __m256d vh = _mm256_set1_pd(inv_h2);
    const __m256d four = _mm256_set1_pd(4.0);
    for (int j = 0; j < ny; ++j) {
        if (j == 0 || j + 1 == ny || nx < 6) {
            for (int i = 0; i < nx; ++i) edge(i, j);
            continue;
        }
        edge(0, j);
        int i = 1;
        const double* row = u + idx(0, j);
        const double* below = u + idx(0, j - 1);
        const double* above = u + idx(0, j + 1);
        double* o = out + idx(0, j);
        for (; i + 4 < nx; i += 4) {
            const __m256d c = _mm256_loadu_pd(row + i);
            const __m256d l = _mm256_loadu_pd(row + i - 1);
            const __m256d r = _mm256_loadu_pd(row + i + 1);
            const __m256d d = _mm256_loadu_pd(below + i);
            const __m256d t = _mm256_loadu_pd(above + i);
            const __m256d sum = _mm256_add_pd(_mm256_add_pd(l, r), _mm256_add_pd(d, t));
            const __m256d lap = _mm256_fnmadd_pd(four, c, sum);
            _mm256_storeu_pd(o + i, _mm256_fnmadd_pd(vh, lap, _mm256_mul_pd(c, vk)));
        }
        for (; i < nx; ++i) edge(i, j);
    }
}

}  // namespace freebound::kernels::avx2

#endif  // __x86_64__
