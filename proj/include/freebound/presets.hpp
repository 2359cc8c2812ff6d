#pragma once

#include <functional>
#include <string>

#include "freebound/grid.hpp"

namespace freebound::presets {

/// (1 - x)^2 / 2: the standard depletion profile, front moves left.
double ic_quadratic(double x);

/// -x^4 + 3x^3 - 5x^2/2 + 1/2: front moves right, then left.
double ic_nonmonotone(double x);

/// Piecewise profile with a shallow valley near x = 1/3; splits into two
/// intervals before extinction.
double ic_twobump(double x);

GridField make_field_1d(int n, const std::function<double(double)>& f, double domain = 1.0);

GridField make_uniform(int n, double value, int dim = 1);

/// Two tall annulus arcs separated by thin gaps: the arcs merge into a ring
/// enclosing a depleted centre which subsequently fills in.
GridField make_2d_topology_preset(int n);

std::function<double(double)> named_ic(const std::string& name);

}  // namespace freebound::presets
