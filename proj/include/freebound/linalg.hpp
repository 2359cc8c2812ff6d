#pragma once

#include <span>
#include <vector>

#include "freebound/grid.hpp"

namespace freebound::linalg {

/// Tridiagonal system; sub and super have length n-1.
struct BandedSystem {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    int n() const { return static_cast<int>(diag.size()); }
};

/// Thomas elimination with a singular-pivot guard.
std::vector<double> solve_tridiagonal(const BandedSystem& sys, std::span<const double> rhs);

/// u -> u/k - Delta_h u with rows and columns outside the inactive set I
/// removed. The mask is 1 on I, 0 elsewhere; vectors live on the full grid
/// with zeros off I.
struct MaskedSpdOperator {
    int nx = 0;
    int ny = 1;
    double h = 1.0;
    double k = 1.0;
    std::vector<double> mask;

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    void apply(std::span<const double> u, std::span<double> out) const;
};

/// Conjugate gradients on the masked operator. rhs must vanish off I.
std::pair<std::vector<double>, SolveReport> solve_spd(const MaskedSpdOperator& op,
                                                      std::span<const double> rhs,
                                                      double rel_tol = 1e-12,
                                                      int max_iter = -1);

/// 3-point (1D) / 5-point (2D) Laplacian with homogeneous Neumann closure
/// via mirror ghost values.
GridField neumann_laplacian_apply(const GridField& u);

/// Symmetric banded matrix stored by diagonals: bands[d][i] = A(i, i+d),
/// d = 0..bw. Solved by banded Cholesky (requires SPD).
struct SymmetricBandMatrix {
    int n = 0;
    int bw = 0;
    std::vector<std::vector<double>> bands;

    SymmetricBandMatrix(int n_, int bw_)
        : n(n_), bw(bw_), bands(static_cast<std::size_t>(bw_) + 1, std::vector<double>(n_, 0.0)) {}
    double& at(int i, int d) { return bands[d][i]; }
};

std::vector<double> solve_band_cholesky(SymmetricBandMatrix a, std::span<const double> rhs);

/// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs);

}  // namespace freebound::linalg
