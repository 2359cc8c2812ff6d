#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace freebound {

/// Real values on a uniform cell-centered grid, 1D (ny == 1) or 2D,
/// with spacing h. Cell centers sit at (i + 1/2) h.
struct GridField {
    int nx = 0;
    int ny = 1;
    double h = 1.0;
    std::vector<double> v;

    GridField() = default;
    GridField(int nx_, double h_) : nx(nx_), ny(1), h(h_), v(static_cast<std::size_t>(nx_), 0.0) {}
    GridField(int nx_, int ny_, double h_)
        : nx(nx_), ny(ny_), h(h_), v(static_cast<std::size_t>(nx_) * ny_, 0.0) {}

    int dim() const { return ny > 1 ? 2 : 1; }
    std::size_t size() const { return v.size(); }
    double cell_measure() const { return dim() == 2 ? h * h : h; }

    double& at(int i, int j = 0) { return v[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j = 0) const { return v[static_cast<std::size_t>(j) * nx + i]; }

    double x_of(int i) const { return (i + 0.5) * h; }
    double y_of(int j) const { return (j + 0.5) * h; }

    bool same_shape(const GridField& o) const { return nx == o.nx && ny == o.ny; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double min() const {
        double m = v.empty() ? 0.0 : v[0];
        for (double x : v) m = std::min(m, x);
        return m;
    }
};

/// Iteration counts, residual norms, convergence flags for a nonlinear or
/// iterative solve.
struct SolveReport {
    int iterations = 0;
    int inner_iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FrontCollapse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace freebound
