#include "freebound/presets.hpp"

#include <cmath>

namespace freebound::presets {

double ic_quadratic(double x) {
    if (x >= 1.0) return 0.0;
    return 0.5 * (1.0 - x) * (1.0 - x);
}

double ic_nonmonotone(double x) {
    if (x >= 1.0) return 0.0;
    const double v = -x * x * x * x + 3.0 * x * x * x - 2.5 * x * x + 0.5;
    return std::max(v, 0.0);
}

double ic_twobump(double x) {
    if (x < 0.75) {
        const double a = (1.0 / 3.0 - x);
        const double b = 5.0 / 12.0;
        return (a * a + 0.05) / (b * b + 0.05) / 16.0;
    }
    if (x < 1.0) return (1.0 - x) * (1.0 - x);
    return 0.0;
}

GridField make_field_1d(int n, const std::function<double(double)>& f, double domain) {
    GridField u(n, domain / n);
    for (int i = 0; i < n; ++i) u.v[i] = std::max(0.0, f(u.x_of(i)));
    return u;
}

GridField make_uniform(int n, double value, int dim) {
    GridField u = (dim == 2) ? GridField(n, n, 1.0 / n) : GridField(n, 1.0 / n);
    std::fill(u.v.begin(), u.v.end(), value);
    return u;
}

GridField make_2d_topology_preset(int n) {
    GridField u(n, n, 1.0 / n);
    // sized so the centre stays depleted for several steps after the arcs
    // merge: diffusive supply at the middle must lag the unit consumption
    const double r_mid = 0.36, r_width = 0.08;
    const double gap_half = 0.04;
    const double amp = 0.8;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double x = u.x_of(i) - 0.5;
            const double y = u.y_of(j) - 0.5;
            const double r = std::hypot(x, y);
            const double rad = 1.0 - std::pow((r - r_mid) / r_width, 2);
            if (rad <= 0.0) continue;
            if (std::abs(x) < gap_half) continue;  // vertical gaps split the ring
            u.at(i, j) = amp * rad * rad;
        }
    }
    return u;
}

std::function<double(double)> named_ic(const std::string& name) {
    if (name == "quadratic") return ic_quadratic;
    if (name == "nonmonotone") return ic_nonmonotone;
    if (name == "twobump") return ic_twobump;
    if (name == "uniform") return [](double) { return 1.0; };
    throw DomainError("unknown initial condition preset: " + name);
}

}  // namespace freebound::presets
