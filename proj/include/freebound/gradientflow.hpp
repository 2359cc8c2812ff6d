#pragma once

#include <optional>
#include <vector>

#include "freebound/activeset.hpp"
#include "freebound/grid.hpp"

namespace freebound::gradientflow {

struct CensusRecord {
    int boundary_nodes = 0;   // u <= tol with a neighbour > tol
    int components = 0;       // connected components of {u > tol}
    int holes = 0;            // bounded components of {u <= tol}
};

/// Time-indexed snapshots plus the energy and census traces: the skeleton
/// of the piecewise-linear-in-time interpolant.
struct Trajectory {
    double k = 0.0;
    std::vector<GridField> snapshots;
    std::vector<double> energy;
    std::vector<CensusRecord> census;
    bool extinct = false;
    int extinction_step = -1;

    double T() const { return k * (static_cast<double>(snapshots.size()) - 1.0); }
};

GridField gf_step(const GridField& u_n, double k);

/// h^d-weighted sum of halved squared forward differences plus the field sum.
double discrete_energy(const GridField& u);

struct EvolveOptions {
    bool warm_start = true;
    bool stop_on_extinction = true;
    std::vector<int>* iteration_trace = nullptr;  // outer active-set counts per step
    bool kkt_audit = false;
    double kkt_tol = 1e-9;
    double* worst_kkt = nullptr;
};

Trajectory gf_evolve(const GridField& u0, double k, double T, const EvolveOptions& opt = {});

GridField interpolate_in_time(const Trajectory& traj, double t);

CensusRecord free_boundary_census(const GridField& u, double tol_pos);

double default_census_tol(const GridField& u0);

/// Sub-grid front estimate for 1D fields: last positive cell refined by the
/// local quadratic behaviour u ~ (s - x)^2 / 2. Returns nullopt when u is
/// entirely below tol.
std::optional<double> front_position_1d(const GridField& u, double tol_pos);

/// Discrete residual of the parabolic inequality tested against one trial
/// path (forward differences in time, trapezoid rule for the integrals).
/// Nonnegative values mean the inequality holds for that trial.
double vi_residual_one(const Trajectory& traj, const std::vector<GridField>& trial_path);

/// Worst (most negative) residual over the given trial paths.
double vi_residual(const Trajectory& traj, const std::vector<std::vector<GridField>>& trials);

/// {0, u + bump_i for 5 fixed bumps, 2u} lifted to paths.
std::vector<std::vector<GridField>> default_trial_paths(const Trajectory& traj);

}  // namespace freebound::gradientflow
