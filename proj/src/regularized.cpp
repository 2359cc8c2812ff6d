#include "freebound/regularized.hpp"

#include <cmath>

#include "freebound/kernels.hpp"
#include "freebound/linalg.hpp"

namespace freebound::regularized {

double f_epsilon(double u, double eps) {
    if (eps <= 0.0) throw DomainError("f_epsilon: eps must be positive");
    return u > eps ? 1.0 : u / eps;
}

namespace {

/// Apply u/k - Delta_h u + c * (u on the kink set).
void apply_shifted(const GridField& shape, double k, double c, const std::vector<char>& kink,
                   std::span<const double> u, std::span<double> out) {
    const double inv_h2 = 1.0 / (shape.h * shape.h);
    if (shape.dim() == 2)
        kernels::shifted_laplacian_2d(u.data(), out.data(), shape.nx, shape.ny, 1.0 / k, inv_h2);
    else
        kernels::shifted_laplacian_1d(u, out, 1.0 / k, inv_h2);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (kink[i]) out[i] += c * u[i];
}

std::vector<double> solve_kink_system_1d(const GridField& shape, double k, double c,
                                         const std::vector<char>& kink,
                                         std::span<const double> rhs) {
    const int n = shape.nx;
    const double inv_h2 = 1.0 / (shape.h * shape.h);
    linalg::BandedSystem sys;
    sys.diag.resize(n);
    sys.sub.assign(n - 1, -inv_h2);
    sys.super.assign(n - 1, -inv_h2);
    for (int i = 0; i < n; ++i) {
        const int stencil = (i == 0 || i == n - 1) ? 1 : 2;
        sys.diag[i] = 1.0 / k + stencil * inv_h2 + (kink[i] ? c : 0.0);
    }
    return linalg::solve_tridiagonal(sys, rhs);
}

std::vector<double> solve_kink_system_cg(const GridField& shape, double k, double c,
                                         const std::vector<char>& kink,
                                         std::span<const double> rhs) {
    const std::size_t n = rhs.size();
    std::vector<double> x(n, 0.0);
    const double rhs_norm2 = kernels::dot(rhs, rhs);
    if (rhs_norm2 == 0.0) return x;

    std::vector<double> r(rhs.begin(), rhs.end()), p = r, ap(n, 0.0);
    double rr = kernels::dot(r, r);
    const double tol2 = 1e-28 * rhs_norm2;
    const int cap = static_cast<int>(10 * n);
    for (int it = 0; rr > tol2; ++it) {
        if (it >= cap) throw NoConvergence("reg_step: inner CG cap exceeded");
        apply_shifted(shape, k, c, kink, p, ap);
        const double alpha = rr / kernels::dot(p, ap);
        kernels::axpy(alpha, p, x);
        kernels::axpy(-alpha, ap, r);
        const double rr_new = kernels::dot(r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
    }
    return x;
}

}  // namespace

GridField reg_step(const GridField& u_n, const RegParams& p) {
    const std::size_t n = u_n.size();
    const double c = p.c;

    std::vector<char> kink(n, 0);
    for (std::size_t i = 0; i < n; ++i) kink[i] = (c * u_n.v[i] < 1.0) ? 1 : 0;

    GridField u = u_n;
    for (int it = 0; it < 200; ++it) {
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = u_n.v[i] / p.k - (kink[i] ? 0.0 : 1.0);

        u.v = (u_n.dim() == 1) ? solve_kink_system_1d(u_n, p.k, c, kink, rhs)
                               : solve_kink_system_cg(u_n, p.k, c, kink, rhs);

        std::vector<char> next(n, 0);
        for (std::size_t i = 0; i < n; ++i) next[i] = (c * u.v[i] < 1.0) ? 1 : 0;
        if (next == kink) {
            // residual audit of the nonlinear equation
            std::vector<double> au(n, 0.0);
            std::vector<char> none(n, 0);
            apply_shifted(u_n, p.k, c, none, u.v, au);
            double rmax = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double res =
                    au[i] - u_n.v[i] / p.k + 1.0 + std::min(0.0, -1.0 + c * u.v[i]);
                rmax = std::max(rmax, std::abs(res));
            }
            if (rmax > 1e-11 * std::max(1.0, 1.0 / p.k))
                throw NoConvergence("reg_step: residual above tolerance after kink fixpoint");
            return u;
        }
        kink = std::move(next);
    }
    throw NoConvergence("reg_step: kink-set iteration cap exceeded");
}

gradientflow::Trajectory reg_evolve(const GridField& u0, const RegParams& p, double T) {
    const int steps = static_cast<int>(std::llround(T / p.k));
    const double tol_pos = gradientflow::default_census_tol(u0);

    gradientflow::Trajectory traj;
    traj.k = p.k;
    traj.snapshots.push_back(u0);
    traj.energy.push_back(gradientflow::discrete_energy(u0));
    traj.census.push_back(gradientflow::free_boundary_census(u0, tol_pos));

    GridField u = u0;
    for (int n = 0; n < steps; ++n) {
        u = reg_step(u, p);
        traj.snapshots.push_back(u);
        traj.energy.push_back(gradientflow::discrete_energy(u));
        traj.census.push_back(gradientflow::free_boundary_census(u, tol_pos));
    }
    return traj;
}

MonotonicityReport monotonicity_report(const GridField& u0, std::vector<double> c_list, double k,
                                       double T) {
    if (c_list.size() < 2) throw DomainError("monotonicity_report: need at least two c values");
    for (std::size_t i = 0; i + 1 < c_list.size(); ++i)
        if (c_list[i + 1] < c_list[i]) throw DomainError("monotonicity_report: c_list must ascend");

    MonotonicityReport rep;
    for (double c : c_list) rep.runs.push_back(reg_evolve(u0, RegParams{c, k}, T));

    // weaker regularization (smaller c) must dominate: u^c >= u^b for c <= b
    for (std::size_t p = 0; p + 1 < rep.runs.size(); ++p) {
        const auto& lo = rep.runs[p];      // c
        const auto& hi = rep.runs[p + 1];  // b > c
        double gap = 0.0;
        for (std::size_t s = 0; s < lo.snapshots.size(); ++s)
            for (std::size_t i = 0; i < lo.snapshots[s].size(); ++i)
                gap = std::max(gap, hi.snapshots[s].v[i] - lo.snapshots[s].v[i]);
        rep.pair_violations.push_back(gap);
        rep.worst = std::max(rep.worst, gap);
    }
    rep.pass = rep.worst <= 1e-9;
    return rep;
}

}  // namespace freebound::regularized
