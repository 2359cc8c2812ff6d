#include "freebound/linalg.hpp"

#include <cmath>

#include "freebound/kernels.hpp"

namespace freebound::linalg {

std::vector<double> solve_tridiagonal(const BandedSystem& sys, std::span<const double> rhs) {
    const int n = sys.n();
    if (n < 1) throw DomainError("solve_tridiagonal: empty system");

    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(sys.diag[i]));
    for (int i = 0; i + 1 < n; ++i)
        scale = std::max({scale, std::abs(sys.sub[i]), std::abs(sys.super[i])});

    std::vector<double> c(n, 0.0), d(rhs.begin(), rhs.end());
    double pivot = sys.diag[0];
    if (std::abs(pivot) <= 1e-14 * scale) throw SingularSystem("solve_tridiagonal: zero pivot");
    c[0] = (n > 1) ? sys.super[0] / pivot : 0.0;
    d[0] /= pivot;
    for (int i = 1; i < n; ++i) {
        pivot = sys.diag[i] - sys.sub[i - 1] * c[i - 1];
        if (std::abs(pivot) <= 1e-14 * scale)
            throw SingularSystem("solve_tridiagonal: zero pivot");
        if (i + 1 < n) c[i] = sys.super[i] / pivot;
        d[i] = (d[i] - sys.sub[i - 1] * d[i - 1]) / pivot;
    }
    for (int i = n - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
    return d;
}

void MaskedSpdOperator::apply(std::span<const double> u, std::span<double> out) const {
    const double inv_h2 = 1.0 / (h * h);
    const double inv_k = 1.0 / k;
    // zero off-I input, full-grid stencil, zero off-I output
    std::vector<double> tmp(u.begin(), u.end());
    kernels::apply_mask(mask, tmp);
    if (ny > 1)
        kernels::shifted_laplacian_2d(tmp.data(), out.data(), nx, ny, inv_k, inv_h2);
    else
        kernels::shifted_laplacian_1d(tmp, out, inv_k, inv_h2);
    kernels::apply_mask(mask, out);
}

std::pair<std::vector<double>, SolveReport> solve_spd(const MaskedSpdOperator& op,
                                                      std::span<const double> rhs,
                                                      double rel_tol, int max_iter) {
    const std::size_t n = op.size();
    SolveReport report;
    std::vector<double> x(n, 0.0);

    const double rhs_norm = std::sqrt(kernels::dot(rhs, rhs));
    if (rhs_norm == 0.0) {
        report.converged = true;
        return {std::move(x), report};
    }
    if (max_iter < 0) {
        std::size_t active = 0;
        for (double m : op.mask) active += (m != 0.0);
        max_iter = static_cast<int>(10 * std::max<std::size_t>(active, 1));
    }

    std::vector<double> r(rhs.begin(), rhs.end());
    std::vector<double> p = r;
    std::vector<double> ap(n, 0.0);
    double rr = kernels::dot(r, r);
    const double tol2 = rel_tol * rel_tol * rhs_norm * rhs_norm;

    while (rr > tol2) {
        if (report.iterations >= max_iter)
            throw NoConvergence("solve_spd: iteration cap exceeded");
        op.apply(p, ap);
        const double alpha = rr / kernels::dot(p, ap);
        kernels::axpy(alpha, p, x);
        kernels::axpy(-alpha, ap, r);
        const double rr_new = kernels::dot(r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        ++report.iterations;
    }
    report.residual = std::sqrt(rr);
    report.converged = true;
    return {std::move(x), report};
}

GridField neumann_laplacian_apply(const GridField& u) {
    GridField out = u;
    const double inv_h2 = 1.0 / (u.h * u.h);
    // shifted kernel with inv_k = 0 gives -Delta_h; negate
    if (u.dim() == 2)
        kernels::shifted_laplacian_2d(u.v.data(), out.v.data(), u.nx, u.ny, 0.0, inv_h2);
    else
        kernels::shifted_laplacian_1d(u.v, out.v, 0.0, inv_h2);
    for (double& x : out.v) x = -x;
    return out;
}

std::vector<double> solve_band_cholesky(SymmetricBandMatrix a, std::span<const double> rhs) {
    const int n = a.n;
    const int bw = a.bw;
    // in-place LL^T within the band
    for (int i = 0; i < n; ++i) {
        double d = a.at(i, 0);
        for (int m = std::max(0, i - bw); m < i; ++m) {
            const double l = a.at(m, i - m);
            d -= l * l;
        }
        if (d <= 0.0) throw SingularSystem("solve_band_cholesky: matrix not SPD");
        d = std::sqrt(d);
        a.at(i, 0) = d;
        for (int j = i + 1; j <= std::min(n - 1, i + bw); ++j) {
            double s = a.at(i, j - i);
            for (int m = std::max({0, i - bw, j - bw}); m < i; ++m)
                s -= a.at(m, i - m) * a.at(m, j - m);
            a.at(i, j - i) = s / d;
        }
    }
    std::vector<double> y(rhs.begin(), rhs.end());
    for (int i = 0; i < n; ++i) {
        double s = y[i];
        for (int m = std::max(0, i - bw); m < i; ++m) s -= a.at(m, i - m) * y[m];
        y[i] = s / a.at(i, 0);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int j = i + 1; j <= std::min(n - 1, i + bw); ++j) s -= a.at(i, j - i) * y[j];
        y[i] = s / a.at(i, 0);
    }
    return y;
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs) {
    const int n = static_cast<int>(rhs.size());
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::abs(at(i, col)) > std::abs(at(piv, col))) piv = i;
        if (std::abs(at(piv, col)) < 1e-300) throw SingularSystem("solve_dense: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(at(piv, j), at(col, j));
            std::swap(rhs[piv], rhs[col]);
        }
        for (int i = col + 1; i < n; ++i) {
            const double f = at(i, col) / at(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) at(i, j) -= f * at(col, j);
            rhs[i] -= f * rhs[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= at(i, j) * x[j];
        x[i] = s / at(i, i);
    }
    return x;
}

}  // namespace freebound::linalg
