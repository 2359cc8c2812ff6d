#include "freebound/verify.hpp"

#include <cmath>

namespace freebound::verify {

double grid_l2(const GridField& a) {
    double s = 0.0;
    for (double x : a.v) s += x * x;
    return std::sqrt(s * a.cell_measure());
}

double grid_l2_diff(const GridField& a, const GridField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return std::sqrt(s * a.cell_measure());
}

MethodComparison compare_methods(const std::function<double(double)>& u0, int N, double k,
                                 double T) {
    // fixed grid extends past x = 1 at matched spacing: the front may move
    // outward (the mapped method works on the half line)
    const int M = (3 * N) / 2;
    GridField g0(M, 1.0 / N);
    for (int i = 0; i < M; ++i) g0.v[i] = std::max(0.0, u0(g0.x_of(i)));

    const auto gf = gradientflow::gf_evolve(g0, k, T);
    const auto mp = mapped::mapped_evolve(u0, N, k, T);

    const double tol_pos = gradientflow::default_census_tol(g0);

    MethodComparison cmp;
    cmp.truncated = mp.collapsed;
    const std::size_t steps = std::min(gf.snapshots.size(), mp.snapshots.size());
    for (std::size_t s = 0; s < steps; ++s) {
        const GridField& ug = gf.snapshots[s];
        const mapped::MappedState& um = mp.snapshots[s];
        for (int i = 0; i < M; ++i) {
            const double gap = std::abs(ug.v[i] - mapped::eval_physical(um, ug.x_of(i)));
            cmp.max_field_gap = std::max(cmp.max_field_gap, gap);
        }
        const auto front = gradientflow::front_position_1d(ug, tol_pos);
        if (front)
            cmp.max_front_gap = std::max(cmp.max_front_gap, std::abs(*front - um.S));
        cmp.compared_until = s * k;
    }
    return cmp;
}

ContractionResult contraction_check(const GridField& u0_a, const GridField& u0_b, double k,
                                    double T) {
    ContractionResult res;
    res.rhs = grid_l2_diff(u0_a, u0_b);

    gradientflow::EvolveOptions opt;
    opt.stop_on_extinction = false;  // trajectories must stay index-aligned
    const auto ta = gradientflow::gf_evolve(u0_a, k, T, opt);
    const auto tb = gradientflow::gf_evolve(u0_b, k, T, opt);
    for (std::size_t s = 0; s < ta.snapshots.size(); ++s)
        res.lhs = std::max(res.lhs, grid_l2_diff(ta.snapshots[s], tb.snapshots[s]));
    res.pass = res.lhs <= res.rhs + 1e-8;
    return res;
}

}  // namespace freebound::verify
