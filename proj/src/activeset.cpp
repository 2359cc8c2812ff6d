#include "freebound/activeset.hpp"

#include <cmath>

#include "freebound/kernels.hpp"
#include "freebound/linalg.hpp"

namespace freebound::activeset {

namespace {

void apply_od_operator(const QpProblem& p, std::span<const double> u, std::span<double> out) {
    const double inv_h2 = 1.0 / (p.h() * p.h());
    const double inv_k = 1.0 / p.k;
    if (p.u_n.dim() == 2)
        kernels::shifted_laplacian_2d(u.data(), out.data(), p.u_n.nx, p.u_n.ny, inv_k, inv_h2);
    else
        kernels::shifted_laplacian_1d(u, out, inv_k, inv_h2);
}

/// A_II u_I = b_I on the 1D grid: the masked rows stay tridiagonal in the
/// compressed ordering of I.
std::vector<double> solve_inactive_1d(const QpProblem& p, const std::vector<char>& in_J,
                                      std::span<const double> b) {
    const int n = p.u_n.nx;
    const double inv_h2 = 1.0 / (p.h() * p.h());
    const double inv_k = 1.0 / p.k;

    std::vector<int> idx;
    idx.reserve(n);
    for (int i = 0; i < n; ++i)
        if (!in_J[i]) idx.push_back(i);

    std::vector<double> u(n, 0.0);
    if (idx.empty()) return u;

    const int m = static_cast<int>(idx.size());
    linalg::BandedSystem sys;
    sys.diag.resize(m);
    sys.sub.assign(m - 1, 0.0);
    sys.super.assign(m - 1, 0.0);
    std::vector<double> rhs(m);
    for (int r = 0; r < m; ++r) {
        const int i = idx[r];
        // mirror ghost: boundary cells couple to one neighbour only
        const int stencil = (i == 0 || i == n - 1) ? 1 : 2;
        sys.diag[r] = inv_k + stencil * inv_h2;
        rhs[r] = b[i];
        if (r + 1 < m && idx[r + 1] == i + 1) {
            sys.super[r] = -inv_h2;
            sys.sub[r] = -inv_h2;
        }
    }
    const auto x = linalg::solve_tridiagonal(sys, rhs);
    for (int r = 0; r < m; ++r) u[idx[r]] = x[r];
    return u;
}

std::vector<double> solve_inactive_2d(const QpProblem& p, const std::vector<char>& in_J,
                                      std::span<const double> b, int* inner_iters) {
    linalg::MaskedSpdOperator op;
    op.nx = p.u_n.nx;
    op.ny = p.u_n.ny;
    op.h = p.h();
    op.k = p.k;
    op.mask.resize(in_J.size());
    for (std::size_t i = 0; i < in_J.size(); ++i) op.mask[i] = in_J[i] ? 0.0 : 1.0;

    std::vector<double> rhs(b.begin(), b.end());
    kernels::apply_mask(op.mask, rhs);
    auto [x, rep] = linalg::solve_spd(op, rhs, 1e-12);
    if (inner_iters) *inner_iters += rep.iterations;

    // CG stops on a relative residual; at large 1/k the absolute defect
    // left on I would leak into the lambda sign tests and the KKT audit.
    // One refinement pass drives it to rounding level.
    std::vector<double> res(rhs.size()), ax(rhs.size());
    op.apply(x, ax);
    for (std::size_t i = 0; i < rhs.size(); ++i) res[i] = rhs[i] - ax[i];
    auto [dx, rep2] = linalg::solve_spd(op, res, 1e-10);
    if (inner_iters) *inner_iters += rep2.iterations;
    for (std::size_t i = 0; i < rhs.size(); ++i) x[i] += dx[i];
    return x;
}

}  // namespace

GridField assemble_rhs(const QpProblem& p) {
    GridField b = p.u_n;
    const double inv_k = 1.0 / p.k;
    for (double& x : b.v) x = x * inv_k - 1.0;
    return b;
}

ActiveSetResult active_set_iterate(
    std::span<const double> b,
    const std::function<void(std::span<const double>, std::span<double>)>& apply_full,
    const std::function<std::vector<double>(const std::vector<char>&, std::span<const double>)>&
        solve_inactive,
    std::vector<double> u0, std::optional<std::vector<char>> warm_J, int cap, double tol_u,
    double tol_lambda) {
    const std::size_t n = b.size();
    std::vector<double> u = std::move(u0);
    std::vector<double> au(n, 0.0), lambda_raw(n, 0.0);

    auto residual_lambda = [&](const std::vector<double>& w) {
        apply_full(w, au);
        for (std::size_t i = 0; i < n; ++i) lambda_raw[i] = b[i] - au[i];
    };

    std::vector<char> J(n, 0);
    if (warm_J) {
        J = std::move(*warm_J);
    } else {
        residual_lambda(u);
        for (std::size_t i = 0; i < n; ++i) {
            const double clamped = std::min(0.0, lambda_raw[i]);
            J[i] = (clamped < -tol_lambda) ? 1 : 0;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!J[i] && u[i] < -tol_u) J[i] = 1;
    }

    ActiveSetResult result;
    for (int m = 0; m < cap; ++m) {
        u = solve_inactive(J, b);
        ++result.iterations;
        residual_lambda(u);

        std::vector<char> next(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (std::min(0.0, lambda_raw[i]) < -tol_lambda) next[i] = 1;
        for (std::size_t i = 0; i < n; ++i)
            if (!next[i] && u[i] < -tol_u) next[i] = 1;

        if (next == J) {
            // lambda lives on J by construction; the I entries of b - Au are
            // inner-solver noise, so complementarity holds exactly
            for (std::size_t i = 0; i < n; ++i)
                lambda_raw[i] = J[i] ? std::min(0.0, lambda_raw[i]) : 0.0;
            result.u = std::move(u);
            result.lambda = lambda_raw;
            result.in_J = std::move(J);
            return result;
        }
        J = std::move(next);
    }
    throw NoConvergence("active_set_iterate: outer iteration cap exceeded");
}

QpSolution active_set_solve(const QpProblem& p, const std::optional<ActiveSetState>& warm,
                            const std::optional<GridField>& u0) {
    const std::size_t n = p.u_n.size();
    const GridField b = assemble_rhs(p);

    const double mag = std::max(1.0, std::max(p.u_n.max_abs(), b.max_abs()));
    const double tol = 1e-12 * mag;

    int inner = 0;
    auto apply_full = [&](std::span<const double> w, std::span<double> out) {
        apply_od_operator(p, w, out);
    };
    auto solve_inactive = [&](const std::vector<char>& in_J, std::span<const double> rhs) {
        return p.u_n.dim() == 2 ? solve_inactive_2d(p, in_J, rhs, &inner)
                                : solve_inactive_1d(p, in_J, rhs);
    };

    std::vector<double> start = u0 ? u0->v : (warm ? p.u_n.v : std::vector<double>(n, 0.0));
    std::optional<std::vector<char>> warm_J;
    if (warm) warm_J = warm->in_J;

    const int cap = std::max(200, static_cast<int>(n));
    ActiveSetResult core;
    try {
        core = active_set_iterate(b.v, apply_full, solve_inactive, std::move(start), warm_J, cap,
                                  tol, tol);
    } catch (const NoConvergence&) {
        if (!warm && !u0) throw;
        // cold start satisfies the finite-convergence hypothesis
        core = active_set_iterate(b.v, apply_full, solve_inactive, std::vector<double>(n, 0.0),
                                  std::nullopt, cap, tol, tol);
    }

    QpSolution sol;
    sol.u = p.u_n;
    sol.u.v = core.u;
    for (double& x : sol.u.v) x = std::max(x, 0.0);  // J entries are exact zeros already
    sol.lambda = std::move(core.lambda);
    sol.state.in_J = std::move(core.in_J);
    sol.state.lambda = sol.lambda;
    sol.report.iterations = core.iterations;
    sol.report.inner_iterations = inner;
    sol.report.converged = true;
    return sol;
}

KktReport kkt_check(const QpProblem& p, const QpSolution& s, double tol) {
    const std::size_t n = s.u.size();
    const GridField b = assemble_rhs(p);
    std::vector<double> au(n, 0.0);
    apply_od_operator(p, s.u.v, au);

    KktReport r;
    r.min_u = s.u.v.empty() ? 0.0 : s.u.v[0];
    for (std::size_t i = 0; i < n; ++i) {
        r.stationarity = std::max(r.stationarity, std::abs(b.v[i] - au[i] - s.lambda[i]));
        r.complementarity = std::max(r.complementarity, std::abs(s.u.v[i] * s.lambda[i]));
        r.min_u = std::min(r.min_u, s.u.v[i]);
        if (!s.state.in_J[i]) r.max_lambda_inactive = std::max(r.max_lambda_inactive, s.lambda[i]);
    }
    r.pass = r.stationarity <= tol && r.complementarity <= tol && r.min_u >= -tol &&
             r.max_lambda_inactive <= tol;
    return r;
}

GridField brute_force_qp(const QpProblem& p) {
    const std::size_t n = p.u_n.size();
    if (n > 16) throw DomainError("brute_force_qp: grid too large for enumeration");
    const GridField b = assemble_rhs(p);

    // dense A by columns
    std::vector<double> a(n * n, 0.0);
    std::vector<double> e(n, 0.0), col(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        apply_od_operator(p, e, col);
        for (std::size_t i = 0; i < n; ++i) a[i * n + j] = col[i];
        e[j] = 0.0;
    }

    const double tol = 1e-9 * std::max(1.0, b.max_abs());
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (!(bits & (std::size_t{1} << i))) idx.push_back(i);

        std::vector<double> u(n, 0.0);
        if (!idx.empty()) {
            const std::size_t m = idx.size();
            std::vector<double> sub(m * m), rhs(m);
            for (std::size_t r = 0; r < m; ++r) {
                rhs[r] = b.v[idx[r]];
                for (std::size_t c = 0; c < m; ++c) sub[r * m + c] = a[idx[r] * n + idx[c]];
            }
            std::vector<double> x;
            try {
                x = linalg::solve_dense(std::move(sub), std::move(rhs));
            } catch (const SingularSystem&) {
                continue;
            }
            for (std::size_t r = 0; r < m; ++r) u[idx[r]] = x[r];
        }

        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            if (!(bits & (std::size_t{1} << i)) && u[i] < -tol) ok = false;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (!(bits & (std::size_t{1} << i))) continue;
            double lam = b.v[i];
            for (std::size_t j = 0; j < n; ++j) lam -= a[i * n + j] * u[j];
            if (lam > tol) ok = false;
        }
        if (ok) {
            GridField out = p.u_n;
            for (std::size_t i = 0; i < n; ++i) out.v[i] = std::max(u[i], 0.0);
            return out;
        }
    }
    throw std::logic_error("brute_force_qp: no KKT-feasible partition (convexity violated?)");
}

double qp_objective(const QpProblem& p, const GridField& u) {
    const double meas = u.cell_measure();
    const double inv_h2 = 1.0 / (u.h * u.h);
    double grad = 0.0;
    if (u.dim() == 2) {
        for (int j = 0; j < u.ny; ++j)
            for (int i = 0; i + 1 < u.nx; ++i) {
                const double d = u.at(i + 1, j) - u.at(i, j);
                grad += d * d;
            }
        for (int j = 0; j + 1 < u.ny; ++j)
            for (int i = 0; i < u.nx; ++i) {
                const double d = u.at(i, j + 1) - u.at(i, j);
                grad += d * d;
            }
    } else {
        for (int i = 0; i + 1 < u.nx; ++i) {
            const double d = u.v[i + 1] - u.v[i];
            grad += d * d;
        }
    }
    double rest = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u.v[i] - p.u_n.v[i];
        rest += d * d / (2.0 * p.k) + u.v[i];
    }
    return meas * (0.5 * grad * inv_h2 + rest);
}

}  // namespace freebound::activeset
