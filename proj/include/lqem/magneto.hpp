#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "lqem/grid.hpp"
#include "lqem/qexponent.hpp"

namespace lqem {

// Reduced magnetostatic problem on the (r,z) half-plane. A toroidal potential
// A(x) = u(r,x3)/r * (-x2,x1,0) has
//     curl A = (-x1 dz[a], -x2 dz[a], 2a + r dr[a]),   a = u/r,
// so with a = u/r the curl splits into the meridional scalar cz = dz[u] and
// the axial scalar cm = dr[u] + u/r, and |curl A|^2 = cz^2 + cm^2.

/// Uniform half-plane lattice [0,R] x [-Z,Z]; u(0,z) = 0 is implicit and the
/// stored samples start at the first positive radius.
struct HalfPlaneGrid {
    double r_max = 1.0;
    double z_max = 1.0;
    std::size_t nr = 4;  ///< node count in r including the axis node
    std::size_t nz = 4;  ///< node count in z

    double dr() const { return r_max / static_cast<double>(nr - 1); }
    double dz() const { return 2.0 * z_max / static_cast<double>(nz - 1); }
    double r(std::size_t i) const { return dr() * static_cast<double>(i); }
    double z(std::size_t j) const { return -z_max + dz() * static_cast<double>(j); }
    std::size_t stored() const { return (nr - 1) * nz; }
    std::size_t sindex(std::size_t i, std::size_t j) const { return j * (nr - 1) + (i - 1); }
    bool same_as(const HalfPlaneGrid& o) const;
    void validate() const;
};

/// Scalar samples on the half-plane lattice for i >= 1 (axis value is 0).
struct HalfPlaneField {
    HalfPlaneGrid grid;
    std::vector<double> values;

    HalfPlaneField() = default;
    explicit HalfPlaneField(const HalfPlaneGrid& g) : grid(g), values(g.stored(), 0.0) {}

    double& at(std::size_t i, std::size_t j) { return values[grid.sindex(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return values[grid.sindex(i, j)]; }
    double value(std::size_t i, std::size_t j) const { return i == 0 ? 0.0 : values[grid.sindex(i, j)]; }
    void fill_from(const std::function<double(double, double)>& f);
    void validate() const;
};

using ToroidalPotential = HalfPlaneField;
using CurrentProfile = HalfPlaneField;  ///< J(x) = j(r,z)/r * (-x2,x1,0)

/// Nodal reduced curl per the formulas above: cz by centered z-differences,
/// cm = dr[u] + u/r with the axis value u(0,z)=0 supplying the left neighbor
/// at the first stored radius; one-sided differences at the outer edges.
std::pair<HalfPlaneField, HalfPlaneField> reduced_curl(const ToroidalPotential& u);

/// Reduced action  2*pi * sum [ density(cz,cm) - j*u ] r dr dz  over the nodal
/// lattice with trapezoid weights. The pairing <J,A> collapses to j*u because
/// J.A = (j/r)(u/r)(x1^2+x2^2).
double energy_J(const ToroidalPotential& u, const CurrentProfile& j, const QExponent& q);

struct MinimizeJOptions {
    double tol_energy_rel = 1e-12;
    double tol_gradient = 1e-9;
    std::size_t max_iters = 2000;
    bool verbose = false;
};

struct MinimizeJReport {
    double initial_energy = 0.0;   ///< nodal energy_J at the initial iterate
    double final_energy = 0.0;     ///< nodal energy_J at the minimizer
    double objective = 0.0;        ///< internal element-quadrature objective
    std::size_t iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
    std::vector<double> energy_history;
};

/// Global minimization of the strictly convex reduced action for q in (6/5,2):
/// preconditioned nonlinear conjugate gradients on the element-quadrature
/// discretization, with the quadratic (q=2) operator solved spectrally in z
/// and tridiagonally in r as the preconditioner. Deterministic given init.
std::pair<ToroidalPotential, MinimizeJReport> minimize_J(const CurrentProfile& j,
                                                         const QExponent& q,
                                                         const ToroidalPotential& init,
                                                         const MinimizeJOptions& opts = {});

/// Gradient of the internal element-quadrature objective (for consistency tests).
std::vector<double> energy_J_gradient(const ToroidalPotential& u, const CurrentProfile& j,
                                      const QExponent& q);
double energy_J_element(const ToroidalPotential& u, const CurrentProfile& j, const QExponent& q);

/// Samples the toroidal field alpha(r,z) * (-x2, x1, 0) on a 3D grid.
VectorField lift_toroidal(const std::function<double(double, double)>& alpha, const GridSpec& grid3);

/// Lift of a stored potential: alpha = u/r with bilinear interpolation;
/// below the first stored radius alpha continues as du/dr(0,z).
VectorField lift_to_3d(const ToroidalPotential& u, const GridSpec& grid3);

/// 3D weak-form residual sum H(curl A).(curl Btest) h^3 - sum J.Btest h^3 with
/// centered-difference curls; Btest should be supported inside the box.
double weak_residual_magneto(const VectorField& A, const VectorField& J,
                             const VectorField& Btest, const QExponent& q);

/// Same residual with caller-supplied curls, for fields whose curls are known
/// in closed or reduced form (removes the O(h^2) differencing error).
double weak_residual_magneto_curls(const VectorField& curlA, const VectorField& J,
                                   const VectorField& Btest, const VectorField& curlBtest,
                                   const QExponent& q);

/// Exact curl of the lifted potential, sampled from the reduced scalars:
///     curl A = (-x1 cz/r, -x2 cz/r, cm),  cz = dz[u], cm = dr[u] + u/r,
/// with bilinear interpolation of (cz, cm) in (r, z).
VectorField lift_curl_to_3d(const ToroidalPotential& u, const GridSpec& grid3);

/// Toroidal field alpha(r,z)(-x2,x1,0) and its exact curl from closed-form
/// derivatives: curl = (-x1 dz_alpha, -x2 dz_alpha, 2 alpha + r dr_alpha).
std::pair<VectorField, VectorField> lift_toroidal_with_curl(
    const std::function<double(double, double)>& alpha,
    const std::function<double(double, double)>& dr_alpha,
    const std::function<double(double, double)>& dz_alpha, const GridSpec& grid3);

/// Least-squares slope of log energy_J(t*u, j=0) vs log t over the largest
/// decade of t_list; ~q for large t, ~2 for small t. Needs >= 4 samples.
double coercivity_probe(const ToroidalPotential& u, const QExponent& q,
                        const std::vector<double>& t_list);

} // namespace lqem
