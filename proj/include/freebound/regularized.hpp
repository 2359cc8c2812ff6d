#pragma once

#include <vector>

#include "freebound/gradientflow.hpp"
#include "freebound/grid.hpp"

namespace freebound::regularized {

/// Regularization strength c = 1/epsilon plus the discretization parameters.
struct RegParams {
    double c = 1e4;
    double k = 1e-3;
};

/// Piecewise consumption rate: 1 above the kink, u/eps below it.
double f_epsilon(double u, double eps);

/// One backward Euler step of u_t = Delta u - 1 - min(0, -1 + c u), solved
/// by a semismooth iteration on the kink set {c u < 1}.
GridField reg_step(const GridField& u_n, const RegParams& p);

gradientflow::Trajectory reg_evolve(const GridField& u0, const RegParams& p, double T);

struct MonotonicityReport {
    /// max over grid and steps of u^b - u^c for each consecutive pair c < b
    std::vector<double> pair_violations;
    double worst = 0.0;
    bool pass = false;
    std::vector<gradientflow::Trajectory> runs;
};

MonotonicityReport monotonicity_report(const GridField& u0, std::vector<double> c_list, double k,
                                       double T);

}  // namespace freebound::regularized
