#include "freebound/gradientflow.hpp"

#include <cmath>
#include <queue>

namespace freebound::gradientflow {

using activeset::QpProblem;

GridField gf_step(const GridField& u_n, double k) {
    QpProblem p{u_n, k};
    return activeset::active_set_solve(p).u;
}

double discrete_energy(const GridField& u) {
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
    double field = 0.0;
    for (double x : u.v) field += x;
    return meas * (0.5 * grad * inv_h2 + field);
}

double default_census_tol(const GridField& u0) { return 1e-8 * std::max(1.0, u0.max_abs()); }

Trajectory gf_evolve(const GridField& u0, double k, double T, const EvolveOptions& opt) {
    const int steps = static_cast<int>(std::llround(T / k));
    if (std::abs(steps * k - T) > 1e-9 * std::max(1.0, T))
        throw DomainError("gf_evolve: T must be an integer multiple of k");

    const double tol_pos = default_census_tol(u0);
    Trajectory traj;
    traj.k = k;
    traj.snapshots.reserve(steps + 1);
    traj.snapshots.push_back(u0);
    traj.energy.push_back(discrete_energy(u0));
    traj.census.push_back(free_boundary_census(u0, tol_pos));

    std::optional<activeset::ActiveSetState> warm;
    GridField u = u0;
    if (u.max_abs() <= tol_pos) {
        traj.extinct = true;
        traj.extinction_step = 0;
    }
    for (int n = 0; n < steps; ++n) {
        if (traj.extinct && opt.stop_on_extinction) {
            // the depleted state is absorbing: pad with zeros
            GridField zero = u;
            std::fill(zero.v.begin(), zero.v.end(), 0.0);
            for (int m = n; m < steps; ++m) {
                traj.snapshots.push_back(zero);
                traj.energy.push_back(0.0);
                traj.census.push_back(CensusRecord{});
            }
            break;
        }
        QpProblem p{u, k};
        activeset::QpSolution sol;
        try {
            sol = activeset::active_set_solve(p, opt.warm_start ? warm : std::nullopt);
        } catch (const NoConvergence&) {
            throw NoConvergence("gf_evolve: step " + std::to_string(n) + " did not converge");
        }
        if (opt.iteration_trace) opt.iteration_trace->push_back(sol.report.iterations);
        if (opt.kkt_audit) {
            const auto kkt = activeset::kkt_check(p, sol, opt.kkt_tol);
            if (opt.worst_kkt) {
                *opt.worst_kkt =
                    std::max({*opt.worst_kkt, kkt.stationarity, kkt.complementarity,
                              std::max(0.0, -kkt.min_u), kkt.max_lambda_inactive});
            }
        }
        warm = sol.state;
        u = std::move(sol.u);
        traj.snapshots.push_back(u);
        traj.energy.push_back(discrete_energy(u));
        traj.census.push_back(free_boundary_census(u, tol_pos));
        if (!traj.extinct && u.max_abs() <= tol_pos) {
            traj.extinct = true;
            traj.extinction_step = n + 1;
        }
    }
    return traj;
}

GridField interpolate_in_time(const Trajectory& traj, double t) {
    const double T = traj.T();
    if (t < -1e-12 || t > T + 1e-12) throw DomainError("interpolate_in_time: t out of range");
    t = std::clamp(t, 0.0, T);
    const int j = std::min(static_cast<int>(t / traj.k), static_cast<int>(traj.snapshots.size()) - 2);
    const double theta = (t - j * traj.k) / traj.k;
    GridField out = traj.snapshots[j];
    const GridField& next = traj.snapshots[j + 1];
    for (std::size_t i = 0; i < out.size(); ++i)
        out.v[i] = (1.0 - theta) * out.v[i] + theta * next.v[i];
    return out;
}

CensusRecord free_boundary_census(const GridField& u, double tol_pos) {
    if (tol_pos <= 0.0) throw DomainError("free_boundary_census: tol_pos must be positive");
    const int nx = u.nx, ny = u.ny;
    auto pos = [&](int i, int j) { return u.at(i, j) > tol_pos; };

    CensusRecord rec;
    auto for_neighbors = [&](int i, int j, auto&& f) {
        if (i > 0) f(i - 1, j);
        if (i + 1 < nx) f(i + 1, j);
        if (j > 0) f(i, j - 1);
        if (j + 1 < ny) f(i, j + 1);
    };

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (pos(i, j)) continue;
            bool boundary = false;
            for_neighbors(i, j, [&](int a, int b) { boundary |= pos(a, b); });
            if (boundary) ++rec.boundary_nodes;
        }

    // components of {u > tol} and bounded components of {u <= tol}
    std::vector<int> label(u.size(), -1);
    auto flood = [&](int si, int sj, bool positive, int id) {
        bool touches_edge = false;
        std::queue<std::pair<int, int>> q;
        q.emplace(si, sj);
        label[static_cast<std::size_t>(sj) * nx + si] = id;
        while (!q.empty()) {
            auto [i, j] = q.front();
            q.pop();
            if (i == 0 || i == nx - 1 || j == 0 || j == ny - 1) touches_edge = true;
            for_neighbors(i, j, [&](int a, int b) {
                const std::size_t id2 = static_cast<std::size_t>(b) * nx + a;
                if (label[id2] == -1 && pos(a, b) == positive) {
                    label[id2] = id;
                    q.emplace(a, b);
                }
            });
        }
        return touches_edge;
    };

    int next_id = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t id = static_cast<std::size_t>(j) * nx + i;
            if (label[id] != -1) continue;
            if (pos(i, j)) {
                flood(i, j, true, next_id++);
                ++rec.components;
            } else {
                const bool edge = flood(i, j, false, next_id++);
                if (!edge) ++rec.holes;
            }
        }
    return rec;
}

std::optional<double> front_position_1d(const GridField& u, double tol_pos) {
    if (u.dim() != 1) throw DomainError("front_position_1d: 1D fields only");
    for (int i = u.nx - 1; i >= 0; --i) {
        if (u.v[i] > tol_pos)
            return u.x_of(i) + std::sqrt(2.0 * u.v[i]);
    }
    return std::nullopt;
}

namespace {

double inner(const GridField& a, const GridField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.v[i] * b.v[i];
    return s * a.cell_measure();
}

double grad_inner(const GridField& a, const GridField& b) {
    const double inv_h2 = 1.0 / (a.h * a.h);
    double s = 0.0;
    if (a.dim() == 2) {
        for (int j = 0; j < a.ny; ++j)
            for (int i = 0; i + 1 < a.nx; ++i)
                s += (a.at(i + 1, j) - a.at(i, j)) * (b.at(i + 1, j) - b.at(i, j));
        for (int j = 0; j + 1 < a.ny; ++j)
            for (int i = 0; i < a.nx; ++i)
                s += (a.at(i, j + 1) - a.at(i, j)) * (b.at(i, j + 1) - b.at(i, j));
    } else {
        for (int i = 0; i + 1 < a.nx; ++i) s += (a.v[i + 1] - a.v[i]) * (b.v[i + 1] - b.v[i]);
    }
    return s * a.cell_measure() * inv_h2;
}

double field_sum(const GridField& a) {
    double s = 0.0;
    for (double x : a.v) s += x;
    return s * a.cell_measure();
}

}  // namespace

double vi_residual_one(const Trajectory& traj, const std::vector<GridField>& trial_path) {
    const std::size_t M = traj.snapshots.size() - 1;
    if (trial_path.size() != traj.snapshots.size())
        throw DomainError("vi_residual: trial path length mismatch");
    for (const auto& v : trial_path)
        if (!v.same_shape(traj.snapshots[0])) throw DomainError("vi_residual: shape mismatch");

    const double k = traj.k;
    double total = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const GridField& uj = traj.snapshots[j];
        const GridField& uj1 = traj.snapshots[j + 1];
        const GridField& vj = trial_path[j];
        const GridField& vj1 = trial_path[j + 1];

        GridField udot = uj1;
        for (std::size_t i = 0; i < udot.size(); ++i) udot.v[i] = (uj1.v[i] - uj.v[i]) / k;

        GridField wj = vj, wj1 = vj1;  // v - u at the two time levels
        for (std::size_t i = 0; i < wj.size(); ++i) {
            wj.v[i] -= uj.v[i];
            wj1.v[i] -= uj1.v[i];
        }
        const double a = 0.5 * (inner(udot, wj) + inner(udot, wj1));
        const double g = 0.5 * (grad_inner(uj, wj) + grad_inner(uj1, wj1));
        const double c = 0.5 * (field_sum(wj) + field_sum(wj1));
        total += k * (a + g + c);
    }
    return total;
}

double vi_residual(const Trajectory& traj, const std::vector<std::vector<GridField>>& trials) {
    double worst = 0.0;
    for (const auto& path : trials) worst = std::min(worst, vi_residual_one(traj, path));
    return worst;
}

std::vector<std::vector<GridField>> default_trial_paths(const Trajectory& traj) {
    const GridField& u0 = traj.snapshots[0];
    std::vector<std::vector<GridField>> trials;

    auto lift = [&](auto&& f) {
        std::vector<GridField> path;
        path.reserve(traj.snapshots.size());
        for (const auto& u : traj.snapshots) path.push_back(f(u));
        trials.push_back(std::move(path));
    };

    lift([](const GridField& u) {
        GridField z = u;
        std::fill(z.v.begin(), z.v.end(), 0.0);
        return z;
    });
    lift([](const GridField& u) {
        GridField w = u;
        for (double& x : w.v) x *= 2.0;
        return w;
    });
    const double amp = std::max(1.0, u0.max_abs());
    for (int b = 0; b < 5; ++b) {
        const double cx = 0.1 + 0.2 * b;
        lift([&, cx](const GridField& u) {
            GridField w = u;
            for (int j = 0; j < w.ny; ++j)
                for (int i = 0; i < w.nx; ++i) {
                    const double dx = w.x_of(i) - cx;
                    const double dy = w.dim() == 2 ? w.y_of(j) - 0.5 : 0.0;
                    const double r2 = (dx * dx + dy * dy) / 0.01;
                    if (r2 < 1.0) w.at(i, j) += amp * (1.0 - r2) * (1.0 - r2);
                }
            return w;
        });
    }
    return trials;
}

}  // namespace freebound::gradientflow
