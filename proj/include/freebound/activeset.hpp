#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "freebound/grid.hpp"

namespace freebound::activeset {

/// One implicit time step of the constrained minimization: data for
/// min over u >= 0 of  h^d sum( |du|^2/2 + (u - u_n)^2/(2k) + u ).
struct QpProblem {
    GridField u_n;
    double k = 1.0;

    double h() const { return u_n.h; }
};

/// Partition of grid indices into the constrained set J (u = 0) and the
/// inactive set I, plus the multiplier field.
struct ActiveSetState {
    std::vector<char> in_J;        // 1 on J, 0 on I
    std::vector<double> lambda;
};

struct QpSolution {
    GridField u;
    std::vector<double> lambda;
    ActiveSetState state;
    SolveReport report;
};

struct KktReport {
    double stationarity = 0.0;       // max |b - A u - lambda|
    double complementarity = 0.0;    // max |u_i * lambda_i|
    double min_u = 0.0;
    double max_lambda_inactive = 0.0;
    bool pass = false;
};

/// b = u_n / k - 1 componentwise.
GridField assemble_rhs(const QpProblem& p);

/// Active-set iteration for the time-step QP. Default start is u = u_n with
/// the warm index sets when provided, else u = 0.
QpSolution active_set_solve(const QpProblem& p,
                            const std::optional<ActiveSetState>& warm = std::nullopt,
                            const std::optional<GridField>& u0 = std::nullopt);

KktReport kkt_check(const QpProblem& p, const QpSolution& s, double tol);

/// Enumeration oracle: tries every (J, I) partition and returns the unique
/// KKT-feasible candidate. Grid size capped at 16.
GridField brute_force_qp(const QpProblem& p);

/// QP objective evaluated exactly (gradient + proximal + linear terms).
double qp_objective(const QpProblem& p, const GridField& u);

/// Generic active-set loop shared with the biharmonic solver. apply_full
/// evaluates the unconstrained SPD operator; solve_inactive solves
/// A_II u_I = b_I with u_J = 0 and returns the full-length vector.
struct ActiveSetResult {
    std::vector<double> u;
    std::vector<double> lambda;
    std::vector<char> in_J;
    int iterations = 0;
};

ActiveSetResult active_set_iterate(
    std::span<const double> b,
    const std::function<void(std::span<const double>, std::span<double>)>& apply_full,
    const std::function<std::vector<double>(const std::vector<char>&, std::span<const double>)>&
        solve_inactive,
    std::vector<double> u0, std::optional<std::vector<char>> warm_J, int cap, double tol_u,
    double tol_lambda);

}  // namespace freebound::activeset
