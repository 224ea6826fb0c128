#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lqem/qexponent.hpp"

namespace lqem {

// Semi-analytic solver for the radial electrostatic problem: with a radial
// charge and a cylindrical magnetic field B = b(|x|)/r * (-x2,x1,0), radial
// potentials satisfy grad(phi).B = 0, so the flux law reduces to a scalar
// constitutive relation per radius and the enclosed-charge balance
//     4*pi*tau^2 * d(tau) = -(Q_point + 4*pi*int_0^tau rho(s) s^2 ds).

/// Radial charge data sampled on a strictly increasing grid of positive radii.
struct RadialChargeSpec {
    double point_charge = 0.0;      ///< total charge of a delta at the origin
    std::vector<double> grid;       ///< tau_0 > 0, strictly increasing
    std::vector<double> density;    ///< rho(tau_i); empty means rho = 0
};

/// Radial profile b(tau) of the cylindrical magnetic field, on the same grid.
struct RadialMagneticProfile {
    std::vector<double> b;          ///< empty means b = 0
};

struct RadialSolution {
    std::vector<double> grid;
    std::vector<double> dphi;       ///< phi'(tau_i)
    std::vector<double> phi;        ///< phi(tau_i), tail-anchored at tau_N
    std::vector<double> flux;       ///< d(tau_i)
    std::vector<double> slack;      ///< 1 + b^2 - dphi^2, kept in factored precision
    double energy = 0.0;            ///< value of the action functional
    double phi_origin = 0.0;        ///< phi(0+) by linear extrapolation
    std::vector<std::string> warnings;

    // Problem data retained for residual / diagnostic evaluation.
    double point_charge = 0.0;
    std::vector<double> rho;
    std::vector<double> b;
};

std::vector<double> make_uniform_grid(double a, double b, std::size_t n);
std::vector<double> make_geometric_grid(double a, double b, std::size_t n);

/// Enclosed-charge flux d(tau_i) with trapezoid quadrature on the grid.
std::vector<double> cumulative_flux(const RadialChargeSpec& spec);

/// Solves y / (1+m-y^2)^{1-q/2} = sigma for the unique y in (-sqrt(1+m), sqrt(1+m)).
/// For q = 2 the law is linear and bounded: |sigma| >= sqrt(1+m) is an error.
double invert_flux(double sigma, double m, const QExponent& q);

/// invert_flux together with the slack 1+m-y^2 evaluated in factored form,
/// which stays accurate when y is within rounding of the saturation bound.
struct FluxInversion {
    double y = 0.0;
    double slack = 0.0;
};
FluxInversion invert_flux_full(double sigma, double m, const QExponent& q);

/// Full radial solve: pointwise inversion of the flux balance, inward
/// integration of the potential from the analytic far-field tail, action value.
RadialSolution solve_radial(const RadialChargeSpec& charge,
                            const RadialMagneticProfile& bprof,
                            const QExponent& q);

/// Weak-form residual  4*pi*int d psi' tau^2 dtau - <rho, psi>  against a test
/// function sampled on the solution grid. The point charge pairs with psi(0+)
/// by linear extrapolation from the two innermost nodes.
double radial_weak_residual(const RadialSolution& sol, const std::vector<double>& psi);

/// tau^2-weighted fraction of the grid where dphi^2 - b^2 >= 1 - delta.
double active_set_fraction(const RadialSolution& sol, double delta);

/// Trapezoid nodal weights for int f(tau) dtau on a nonuniform grid.
std::vector<double> trapezoid_weights(const std::vector<double>& grid);

} // namespace lqem
