#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "freebound/grid.hpp"

namespace freebound::mapped {

/// Cell-centered state on the mapped domain y = x / S(t): interior values
/// u^1..u^N at y_j = (j - 1/2) h with h = 1/N, front position S, time t.
struct MappedState {
    std::vector<double> u;
    double S = 1.0;
    double t = 0.0;
    double h = 0.0;

    int N() const { return static_cast<int>(u.size()); }
    double y_of(int j) const { return (j + 0.5) * h; }  // j is 0-based storage index
};

struct InterfaceTrack {
    double k = 0.0;
    std::vector<double> t;
    std::vector<double> S;
};

struct MappedOptions {
    double S_min = 1e-3;
    int newton_cap = 25;
    double newton_tol = 1e-10;
    /// Optional manufactured-solution forcing added to the interior rows.
    std::function<double(double y, double t)> source;
};

/// Residual of the MoL system: N interior rows followed by the two y = 1
/// boundary rows. Ghosts: u^0 = u^1 (no flux); u^{N+1} defaults to the
/// mirror value u^N unless supplied.
std::vector<double> dae_residual(const MappedState& state, std::span<const double> udot,
                                 double Sdot,
                                 std::optional<double> ghost_right = std::nullopt,
                                 const std::function<double(double, double)>& source = {});

/// One backward Euler step solved by Newton with the analytic Jacobian.
/// Unknowns are u^1..u^{N-1} (u^N = u^{N+1} = 0 eliminated) and S.
std::pair<MappedState, SolveReport> implicit_euler_newton(const MappedState& state_n, double k,
                                                          double newton_tol,
                                                          const MappedOptions& opt = {});

struct MappedRun {
    InterfaceTrack track;
    std::vector<MappedState> snapshots;
    bool collapsed = false;
};

MappedState sample_initial_state(const std::function<double(double)>& u0, int N, double S0 = 1.0);

MappedRun mapped_evolve(const std::function<double(double)>& u0, int N, double k, double T,
                        const MappedOptions& opt = {});

/// Mapped solution evaluated at a physical point x (cubic interpolation in y,
/// zero beyond the front).
double eval_physical(const MappedState& state, double x);

struct StudyResult {
    double p_h = 0.0;
    double p_k = 0.0;
    std::vector<double> h_errors;
    std::vector<double> k_errors;
};

/// Self-convergence against the finest resolution in each list: slope of
/// log error vs log h (k fixed at the smallest entry) and vs log k (h fixed
/// at the largest N).
StudyResult convergence_study(const std::function<double(double)>& u0,
                              std::vector<int> N_list, std::vector<double> k_list,
                              double t_probe, const MappedOptions& opt = {},
                              double k_spatial = 0.0, int N_temporal = 0);

/// Mapped solution evaluated at mapped coordinate y (cubic interpolation).
double eval_mapped_y(const MappedState& state, double y);

}  // namespace freebound::mapped
