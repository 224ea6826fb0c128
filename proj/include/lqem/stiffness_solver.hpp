#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lqem/grid.hpp"

namespace lqem {

/// Direct solver for the trilinear-element stiffness operator
///     K = Kx (x) My (x) Mz + Mx (x) Ky (x) Mz + Mx (x) My (x) Kz
/// on the interior nodes of a uniform box with zero Dirichlet boundary,
/// diagonalized by a sine transform per axis (FFTW RODFT00).
///
/// K is exactly the normal operator of the per-cell Gauss-point gradient map,
/// so this both reconstructs potentials from projected gradient fields and
/// preconditions the descent in electro_grid.
class StiffnessSolver {
public:
    explicit StiffnessSolver(const GridSpec& spec);
    ~StiffnessSolver();

    StiffnessSolver(const StiffnessSolver&) = delete;
    StiffnessSolver& operator=(const StiffnessSolver&) = delete;

    /// Solves K x = b. Inputs/outputs are full-grid nodal arrays; boundary
    /// entries of b are ignored and x gets zero boundary values.
    void solve(const std::vector<double>& b, std::vector<double>& x) const;

    /// Applies K (for residual verification).
    void apply(const std::vector<double>& x, std::vector<double>& out) const;

    const GridSpec& spec() const { return spec_; }

private:
    GridSpec spec_;
    std::array<std::size_t, 3> m_;          // interior counts
    std::vector<double> inv_eigen_;          // 1/lambda, interior-major layout
    std::vector<double> eigen_;
    mutable std::vector<double> work_;
    void* plan_ = nullptr;                   // fftw_plan
    double norm_ = 1.0;                      // RODFT00 round-trip scale

    void gather(const std::vector<double>& full, std::vector<double>& interior) const;
    void scatter(const std::vector<double>& interior, std::vector<double>& full) const;
};

} // namespace lqem
