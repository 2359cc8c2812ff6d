#pragma once

#include <functional>
#include <vector>

#include "freebound/gradientflow.hpp"
#include "freebound/grid.hpp"
#include "freebound/mapped.hpp"

namespace freebound::verify {

struct MethodComparison {
    double max_front_gap = 0.0;
    double max_field_gap = 0.0;
    bool truncated = false;  // mapped run collapsed before T
    double compared_until = 0.0;
};

/// Runs the front-tracking and gradient-flow methods on matched resolutions
/// and reports the worst field and front discrepancies over time.
MethodComparison compare_methods(const std::function<double(double)>& u0, int N, double k,
                                 double T);

struct ContractionResult {
    double lhs = 0.0;  // max over steps of the grid-L2 trajectory gap
    double rhs = 0.0;  // grid-L2 gap of the initial conditions
    bool pass = false;
};

ContractionResult contraction_check(const GridField& u0_a, const GridField& u0_b, double k,
                                    double T);

double grid_l2(const GridField& a);
double grid_l2_diff(const GridField& a, const GridField& b);

}  // namespace freebound::verify
