#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "lqem/grid.hpp"
#include "lqem/qexponent.hpp"

namespace lqem {

/// Rotation of a vector field about the x3 axis: (g*A)(x) = g A(g^{-1} x),
/// resampled by trilinear interpolation. Fixed points are the fields
/// equivariant under the rotation group of the axis.
VectorField g_action(const VectorField& field, double angle);

/// The three pointwise-orthogonal pieces of a field off the axis:
/// toroidal (-x2,x1,0), meridional-radial (x1,x2,0), axial (0,0,1) directions.
struct CylComponents {
    VectorField a_tau;
    VectorField a_rho;
    VectorField a_zeta;
};

/// Pointwise orthogonal projections. On the axis (r = 0) the in-plane
/// directions are undefined: a_tau = a_rho = 0 there and only the axial part
/// is kept (continuous equivariant fields vanish in-plane on the axis).
CylComponents decompose(const VectorField& field);

VectorField reconstruct(const CylComponents& c);

/// Sign involution S(A_tau + A_rho + A_zeta) = A_tau - A_rho - A_zeta.
CylComponents s_involution(const CylComponents& c);

/// Max over off-axis interior nodes of |A|^2 - sum |A_c|^2, relative; exact
/// pointwise algebra, so ~1e-16 for any input.
double pointwise_pythagoras_defect(const VectorField& field, const CylComponents& c);

/// Max over off-axis interior nodes of |curl A_rho . curl A_tau| and
/// |curl A_tau . curl A_zeta| (centered differences), scaled by the product of
/// the interior curl maxima. Both vanish for equivariant fields as h -> 0.
std::pair<double, double> curl_orthogonality_check(const CylComponents& c);

/// Max relative defect of |grad A|^2 = sum |grad A_c|^2 over off-axis interior
/// nodes (centered-difference Jacobians).
double nabla_pythagoras_check(const CylComponents& c);

/// O(3)-equivariant field shape A(x) = dpsi(|x|) x/|x|; the origin cell is 0.
VectorField radial_gradient_field(const std::function<double(double)>& dpsi,
                                  const GridSpec& grid3);

/// Sampled-profile variant (linear interpolation in |x|).
VectorField radial_gradient_field(const std::vector<double>& radii,
                                  const std::vector<double>& dpsi_samples,
                                  const GridSpec& grid3);

struct NullityCheck {
    std::vector<double> residuals;   ///< weak residuals against each test field
    std::vector<double> pairings;    ///< <J, Btest> h^3 sums
    double max_residual = 0.0;
    double max_curl_term = 0.0;      ///< curl side alone; ~O(h^2) for radial A
};

/// Radial fields are curl-free, so the weak equation degenerates to
/// <J, Btest> = 0 for all tests: a nonzero current is incompatible with any
/// radial potential. Evaluates the residual for each supplied test field.
NullityCheck symmetry_nullity_check(const std::function<double(double)>& dpsi,
                                    const VectorField& J,
                                    const std::vector<VectorField>& tests,
                                    const QExponent& q);

struct SumSpaceSplit {
    VectorField part6;    ///< field where |field| <= threshold
    VectorField partqs;   ///< field where |field| >  threshold
    double norm6 = 0.0;   ///< L^6 norm of part6
    double normqs = 0.0;  ///< L^{q*} norm of partqs
    double surrogate_norm = 0.0;  ///< norm6 + normqs, upper bound of the sum-space norm
};

/// Threshold split surrogate for the L^6 + L^{q*} sum-space norm.
SumSpaceSplit sum_space_split(const VectorField& field, const QExponent& q, double threshold);

struct SumSpaceSplitScalar {
    ScalarField part6;
    ScalarField partqs;
    double norm6 = 0.0;
    double normqs = 0.0;
    double surrogate_norm = 0.0;
};
SumSpaceSplitScalar sum_space_split(const ScalarField& field, const QExponent& q, double threshold);

/// (sum |v|^p h^3)^{1/p}.
double lp_norm(const VectorField& field, double p);
double lp_norm(const ScalarField& field, double p);

} // namespace lqem
