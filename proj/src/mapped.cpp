#include "freebound/mapped.hpp"

#include <cmath>

#include "freebound/linalg.hpp"

namespace freebound::mapped {

std::vector<double> dae_residual(const MappedState& state, std::span<const double> udot,
                                 double Sdot, std::optional<double> ghost_right,
                                 const std::function<double(double, double)>& source) {
    const int N = state.N();
    if (N < 3) throw DomainError("dae_residual: need at least 3 cells");
    if (state.S <= 0.0) throw DomainError("dae_residual: front position must be positive");

    const double h = state.h;
    const double S = state.S;
    const double inv_h2 = 1.0 / (h * h);
    const double gr = ghost_right.value_or(state.u[N - 1]);

    auto val = [&](int j) {  // 1-based with ghosts
        if (j == 0) return state.u[0];
        if (j == N + 1) return gr;
        return state.u[j - 1];
    };

    std::vector<double> r(N + 2, 0.0);
    for (int j = 1; j <= N; ++j) {
        const double y = (j - 0.5) * h;
        const double d2 = (val(j - 1) - 2.0 * val(j) + val(j + 1)) * inv_h2;
        const double d1 = (val(j + 1) - val(j - 1)) / (2.0 * h);
        r[j - 1] = d2 + S * Sdot * y * d1 - S * S * udot[j - 1] - S * S;
        if (source) r[j - 1] -= source(y, state.t);
    }
    r[N] = 0.5 * (gr + state.u[N - 1]);
    r[N + 1] = (gr - state.u[N - 1]) / h;
    return r;
}

namespace {

/// Backward Euler residual in the reduced unknowns z = (u^1..u^{N-1}, S);
/// u^N = u^{N+1} = 0. Rows are the N interior equations.
struct NewtonSystem {
    const MappedState& old;
    double k;
    const MappedOptions& opt;
    double t_new;

    int N() const { return old.N(); }

    void residual(std::span<const double> u, double S, std::span<double> r) const {
        const int n = N();
        const double h = old.h;
        const double inv_h2 = 1.0 / (h * h);
        const double Sdot = (S - old.S) / k;
        auto val = [&](int j) {  // 1-based; u has N-1 entries, u^N = 0
            if (j == 0) return u[0];
            if (j >= n) return 0.0;
            return u[j - 1];
        };
        for (int j = 1; j <= n; ++j) {
            const double y = (j - 0.5) * h;
            const double uj = val(j);
            const double d2 = (val(j - 1) - 2.0 * uj + val(j + 1)) * inv_h2;
            const double d1 = (val(j + 1) - val(j - 1)) / (2.0 * h);
            const double udot = (uj - old.u[j - 1]) / k;
            r[j - 1] = d2 + S * Sdot * y * d1 - S * S * udot - S * S;
            if (opt.source) r[j - 1] -= opt.source(y, t_new);
        }
    }

    /// Arrowhead Jacobian: tridiagonal block over u plus a dense S column.
    void jacobian(std::span<const double> u, double S, linalg::BandedSystem& tri,
                  std::vector<double>& s_col, double& last_row_u, double& last_row_s) const {
        const int n = N();
        const double h = old.h;
        const double inv_h2 = 1.0 / (h * h);
        const double Sdot = (S - old.S) / k;
        auto val = [&](int j) {
            if (j == 0) return u[0];
            if (j >= n) return 0.0;
            return u[j - 1];
        };

        const int m = n - 1;  // u unknowns
        tri.diag.assign(m, 0.0);
        tri.sub.assign(m - 1, 0.0);
        tri.super.assign(m - 1, 0.0);
        s_col.assign(m, 0.0);

        for (int j = 1; j <= n; ++j) {
            const double y = (j - 0.5) * h;
            const double adv = S * Sdot * y / (2.0 * h);
            const double d1 = (val(j + 1) - val(j - 1)) / (2.0 * h);
            const double udot = (val(j) - old.u[j - 1]) / k;
            const double dS = (Sdot + S / k) * y * d1 - 2.0 * S * udot - 2.0 * S;

            if (j < n) {
                double diag = -2.0 * inv_h2 - S * S / k;
                if (j == 1) diag = -inv_h2 - adv - S * S / k;  // mirror ghost u^0 = u^1
                tri.diag[j - 1] = diag;
                if (j >= 2) tri.sub[j - 2] = inv_h2 - adv;
                if (j <= m - 1) tri.super[j - 1] = inv_h2 + adv;
                s_col[j - 1] = dS;
            } else {
                last_row_u = inv_h2 - adv;  // couples u^{N-1} only
                last_row_s = dS;
            }
        }
    }
};

}  // namespace

std::pair<MappedState, SolveReport> implicit_euler_newton(const MappedState& state_n, double k,
                                                          double newton_tol,
                                                          const MappedOptions& opt) {
    const int n = state_n.N();
    if (n < 3) throw DomainError("implicit_euler_newton: need at least 3 cells");
    const int m = n - 1;

    NewtonSystem sys{state_n, k, opt, state_n.t + k};

    std::vector<double> u(state_n.u.begin(), state_n.u.begin() + m);
    double S = state_n.S;

    std::vector<double> r(n, 0.0);
    linalg::BandedSystem tri;
    std::vector<double> s_col;
    SolveReport report;

    for (int it = 0; it <= opt.newton_cap; ++it) {
        sys.residual(u, S, r);
        double rmax = 0.0;
        for (double x : r) rmax = std::max(rmax, std::abs(x));
        report.residual = rmax;
        if (rmax <= newton_tol) {
            report.converged = true;
            break;
        }
        if (it == opt.newton_cap)
            throw NoConvergence("implicit_euler_newton: Newton cap exceeded");

        double row_u = 0.0, row_s = 0.0;
        sys.jacobian(u, S, tri, s_col, row_u, row_s);

        // block elimination of the arrowhead: solve T p = F_u and T q = c
        std::vector<double> fu(r.begin(), r.begin() + m);
        const auto p = linalg::solve_tridiagonal(tri, fu);
        const auto q = linalg::solve_tridiagonal(tri, s_col);
        const double rp = row_u * p[m - 1];
        const double rq = row_u * q[m - 1];
        const double dS = (rp - r[n - 1]) / (row_s - rq);
        S += dS;
        for (int i = 0; i < m; ++i) u[i] += -p[i] - q[i] * dS;
        ++report.iterations;

        if (S <= opt.S_min)
            throw FrontCollapse("implicit_euler_newton: front reached S_min");
    }
    if (S <= opt.S_min) throw FrontCollapse("implicit_euler_newton: front reached S_min");

    MappedState out;
    out.h = state_n.h;
    out.S = S;
    out.t = state_n.t + k;
    out.u = std::move(u);
    out.u.push_back(0.0);  // u^N
    return {std::move(out), report};
}

MappedState sample_initial_state(const std::function<double(double)>& u0, int N, double S0) {
    MappedState s;
    s.h = 1.0 / N;
    s.S = S0;
    s.t = 0.0;
    s.u.resize(N);
    for (int j = 0; j < N; ++j) s.u[j] = u0(s.y_of(j) * S0);
    return s;
}

MappedRun mapped_evolve(const std::function<double(double)>& u0, int N, double k, double T,
                        const MappedOptions& opt) {
    MappedRun run;
    MappedState state = sample_initial_state(u0, N);
    run.track.k = k;
    run.track.t.push_back(0.0);
    run.track.S.push_back(state.S);
    run.snapshots.push_back(state);

    const int steps = static_cast<int>(std::llround(T / k));
    for (int i = 0; i < steps; ++i) {
        try {
            auto [next, rep] = implicit_euler_newton(state, k, opt.newton_tol, opt);
            state = std::move(next);
        } catch (const FrontCollapse&) {
            run.collapsed = true;
            break;
        }
        run.track.t.push_back(state.t);
        run.track.S.push_back(state.S);
        run.snapshots.push_back(state);
    }
    return run;
}

double eval_mapped_y(const MappedState& state, double y) {
    const int N = state.N();
    const double h = state.h;
    // padded sample set: mirror ghost at -h/2, cells, exact zero at y = 1
    auto node_y = [&](int p) { return (p == N + 1) ? 1.0 : (p - 0.5) * h; };
    auto node_u = [&](int p) {
        if (p == 0) return state.u[0];
        if (p == N + 1) return 0.0;
        return state.u[p - 1];
    };
    if (y >= 1.0) return 0.0;

    int c = static_cast<int>(std::floor(y / h + 0.5));  // nearest cell index (1-based-ish)
    int lo = std::clamp(c - 1, 0, N - 2);  // window [lo, lo+3] in padded indices
    double result = 0.0;
    for (int a = lo; a <= lo + 3; ++a) {
        double term = node_u(a);
        for (int b = lo; b <= lo + 3; ++b) {
            if (a == b) continue;
            term *= (y - node_y(b)) / (node_y(a) - node_y(b));
        }
        result += term;
    }
    return result;
}

double eval_physical(const MappedState& state, double x) {
    if (x >= state.S) return 0.0;
    return eval_mapped_y(state, x / state.S);
}

namespace {

double lsq_slope(const std::vector<double>& logx, const std::vector<double>& logy) {
    const std::size_t n = logx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += logx[i];
        my += logy[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (logx[i] - mx) * (logy[i] - my);
        den += (logx[i] - mx) * (logx[i] - mx);
    }
    return num / den;
}

}  // namespace

StudyResult convergence_study(const std::function<double(double)>& u0, std::vector<int> N_list,
                              std::vector<double> k_list, double t_probe,
                              const MappedOptions& opt, double k_spatial, int N_temporal) {
    if (N_list.size() < 3 || k_list.size() < 3)
        throw DomainError("convergence_study: need at least 3 resolutions per axis");
    std::sort(N_list.begin(), N_list.end());
    std::sort(k_list.begin(), k_list.end(), std::greater<>());
    if (k_spatial <= 0.0) k_spatial = k_list.back();
    if (N_temporal <= 0) N_temporal = N_list.back();

    StudyResult res;

    // spatial: fixed small k, finest N is the reference
    {
        std::vector<MappedState> probes;
        for (int N : N_list) {
            auto run = mapped_evolve(u0, N, k_spatial, t_probe, opt);
            if (run.collapsed) throw DomainError("convergence_study: front collapsed before probe");
            probes.push_back(run.snapshots.back());
        }
        // consecutive-pair differences: |u_h - u_{h/2}| ~ 3C h^2, so the
        // log-log slope is unbiased (a fixed fine reference inflates it)
        std::vector<double> lh, le;
        for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
            const MappedState& coarse = probes[i];
            const MappedState& fine = probes[i + 1];
            double err = std::abs(coarse.S - fine.S);
            for (int j = 0; j < coarse.N(); ++j)
                err = std::max(err, std::abs(coarse.u[j] - eval_mapped_y(fine, coarse.y_of(j))));
            res.h_errors.push_back(err);
            lh.push_back(std::log(coarse.h));
            le.push_back(std::log(err));
        }
        res.p_h = lsq_slope(lh, le);
    }

    // temporal: fixed fine grid, smallest k is the reference
    {
        std::vector<MappedState> probes;
        for (double k : k_list) {
            auto run = mapped_evolve(u0, N_temporal, k, t_probe, opt);
            if (run.collapsed) throw DomainError("convergence_study: front collapsed before probe");
            probes.push_back(run.snapshots.back());
        }
        std::vector<double> lk, le;
        for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
            const MappedState& coarse = probes[i];
            const MappedState& fine = probes[i + 1];
            double err = std::abs(coarse.S - fine.S);
            for (int j = 0; j < coarse.N(); ++j)
                err = std::max(err, std::abs(coarse.u[j] - fine.u[j]));
            res.k_errors.push_back(err);
            lk.push_back(std::log(k_list[i]));
            le.push_back(std::log(err));
        }
        res.p_k = lsq_slope(lk, le);
    }
    return res;
}

}  // namespace freebound::mapped
