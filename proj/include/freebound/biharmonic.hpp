#pragma once

#include <optional>
#include <span>
#include <vector>

#include "freebound/activeset.hpp"
#include "freebound/grid.hpp"

namespace freebound::biharmonic {

/// Fourth-order obstacle dynamics on a node-centered grid over [0, L]:
/// u(0) = g0 and u_xx(0) = 0 at the left end, u_x = u_xxx = 0 mirror
/// closure at the right end, constraint u >= 0 on the free nodes.
struct BihProblem {
    double L = 3.0;
    int nodes = 0;
    double k = 1e-3;
    double g0 = 1.0;

    double h() const { return L / (nodes - 1); }
    int free_count() const { return nodes - 1; }  // node 0 is Dirichlet
};

/// Second-difference operator with the stated closures; row 0 vanishes by
/// the antisymmetric ghost.
std::vector<double> second_difference(const BihProblem& p, std::span<const double> u);

/// (I/k + D2^T D2) u on the full node vector (homogeneous value at node 0).
std::vector<double> bih_operator_apply(const BihProblem& p, std::span<const double> u);

struct BihSolution {
    std::vector<double> u;       // full node vector, u[0] = g0
    std::vector<double> lambda;  // free nodes
    std::vector<char> in_J;      // free nodes
    SolveReport report;
};

BihSolution bih_step(const BihProblem& p, std::span<const double> u_n,
                     const std::optional<std::vector<char>>& warm_J = std::nullopt);

double bih_energy(const BihProblem& p, std::span<const double> u);

/// Steady state of the constrained flow: the energy minimizer, a quartic
/// with C^2 contact at s = 24^{1/4}.
struct BihSteady {
    double s;
    double operator()(double x) const;
};

BihSteady bih_steady_analytic();

struct BihRun {
    std::vector<std::vector<double>> snapshots;
    std::vector<double> energy;
    bool steady_reached = false;
    int steps = 0;
};

/// Evolve until T (or until the per-step change drops below steady_tol when
/// positive), warm-starting the active sets.
BihRun bih_evolve(const BihProblem& p, std::vector<double> u0, double T,
                  double steady_tol = 0.0);

/// Contact point estimate: first node with u <= tol.
double contact_point(const BihProblem& p, std::span<const double> u, double tol);

}  // namespace freebound::biharmonic
