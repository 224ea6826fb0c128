#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lqem/densities.hpp"
#include "lqem/grid.hpp"
#include "lqem/qexponent.hpp"

namespace lqem {

/// Euclidean projection onto {g' : |g'|^2 + (g'.B)^2 <= 1 + |B|^2}.
/// The constraint matrix I + B B^T has eigenvalues (1, 1, 1+|B|^2) with B as
/// the stretched axis; the projection reduces to a scalar secular equation in
/// the Lagrange multiplier, solved by Newton (convex decreasing, converges
/// from lambda = 0) to 1e-12 relative. Feasible g is returned unchanged.
Vec3 project_ellipsoid(const Vec3& g, const Vec3& B);

/// Same projection onto the radially shrunk set |g'|^2+(g'.B)^2 <= scale2*(1+|B|^2),
/// used to keep solver iterates strictly feasible. scale2 in (0, 1].
Vec3 project_ellipsoid_scaled(const Vec3& g, const Vec3& B, double scale2);

/// KKT diagnostics of a projection result: boundary slack of g' and the angle
/// between g - g' and (I + B B^T) g'. Both ~0 when g' != g is optimal.
struct ProjectionKkt {
    bool moved = false;
    double boundary_slack = 0.0;
    double angle = 0.0;
};
ProjectionKkt projection_kkt_defect(const Vec3& g, const Vec3& B, const Vec3& projected);

/// 3D problem: minimize the constrained action over nodal potentials with
/// phi = 0 on the box faces. rho lives on nodes; B is evaluated at quadrature
/// points (zero when absent).
struct ElectroGridProblem {
    GridSpec spec;
    ScalarField rho;
    std::function<Vec3(const Vec3&)> B;  // null => B = 0
    QExponent q{1.5};

    Vec3 B_at(const Vec3& p) const { return B ? B(p) : Vec3{}; }
    void validate() const;
};

/// Action value of a nodal potential: per-cell 2x2x2 Gauss quadrature of the
/// electrostatic density minus the nodal pairing sum(rho * phi) h^3.
/// Throws a domain error naming the cell on an inadmissible quadrature state.
double energy_IB_grid(const ScalarField& phi, const ElectroGridProblem& prob);

/// Same energy restricted to cells whose centers lie in a ball (plus the
/// pairing restricted to nodes in the ball); used for cross-oracle windows.
double energy_IB_grid_ball(const ScalarField& phi, const ElectroGridProblem& prob,
                           const Vec3& center, double radius);

struct MinimizeIbOptions {
    double tol_energy_rel = 1e-10;  ///< per-sweep energy decrease, relative
    double tol_gradient = 1e-6;     ///< K^{-1}-norm of the energy gradient
    std::size_t max_iters = 4000;
    double feas_margin = 1e-10;     ///< relative slack floor for iterates
    bool verbose = false;
};

struct MinimizeIbReport {
    double initial_energy = 0.0;
    double final_energy = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;             ///< last preconditioned gradient norm
    double energy_decrease = 0.0;       ///< last accepted sweep
    double reconstruction_residual = 0.0;
    std::size_t projected_points = 0;   ///< quadrature points projected, last sweep
    std::vector<double> energy_history;
};

/// Projected-gradient descent with backtracking on the convex discrete action:
/// preconditioned step, per-quadrature-point gradient projection, least-squares
/// potential reconstruction (stiffness solve), feasibility pullback.
std::pair<ScalarField, MinimizeIbReport> minimize_IB(const ElectroGridProblem& prob,
                                                     const ScalarField& init,
                                                     const MinimizeIbOptions& opts = {});

/// Weak-form residual sum(D(grad phi) . grad psi) h^3 - sum(rho psi) h^3.
/// Quadrature states with slack < kSlackMin are excluded and counted.
double weak_residual_grid(const ScalarField& phi, const ScalarField& psi,
                          const ElectroGridProblem& prob, std::size_t* excluded = nullptr);

struct VariationalInequalityResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
    double tolerance = 0.0;
    std::size_t excluded = 0;
};

/// First-order optimality check of the constrained minimizer:
///   sum [ |g|^2+(g.B)^2 - g.gpsi - (g.B)(gpsi.B) ] / s^{1-q/2}  <=  <rho,phi> - <rho,psi>.
VariationalInequalityResult variational_inequality_check(const ScalarField& phi,
                                                         const ScalarField& psi,
                                                         const ElectroGridProblem& prob,
                                                         double tol_rel = 1e-3);

/// Nodal gradient of the discrete action (boundary nodes fixed at zero).
std::vector<double> energy_IB_gradient(const ScalarField& phi, const ElectroGridProblem& prob);

/// Largest t <= 1 such that t*phi has every quadrature gradient admissible
/// with the given relative slack margin, then applied. Utility for building
/// feasible fields and inits.
ScalarField scale_into_feasibility(const ScalarField& phi, const ElectroGridProblem& prob,
                                   double margin = 0.05);

} // namespace lqem
