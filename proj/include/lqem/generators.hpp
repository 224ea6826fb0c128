#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lqem/densities.hpp"
#include "lqem/grid.hpp"
#include "lqem/magneto.hpp"
#include "lqem/qexponent.hpp"

namespace lqem {

// Builtin problem generators and random samplers. All randomness flows
// through std::mt19937_64 so runs are reproducible from the config seed.

using Rng = std::mt19937_64;

/// rho(x) = amplitude * exp(-|x-center|^2 / (2 width^2)).
std::function<double(const Vec3&)> gaussian_charge(double amplitude, double width,
                                                   const Vec3& center = Vec3{});

/// Narrow normalized bump carrying total charge Q (point-charge stand-in).
std::function<double(const Vec3&)> point_approx_charge(double total_charge, double width,
                                                       const Vec3& center = Vec3{});

/// Cylindrical field B(x) = b(|x|)/r * (-x2,x1,0) from a radial profile b.
std::function<Vec3(const Vec3&)> cylindrical_b(const std::function<double(double)>& b_radial);

/// Decaying radial profile b(tau) = amplitude * exp(-tau^2/(2 width^2)).
std::function<double(double)> gaussian_profile(double amplitude, double width);

/// Toroidal ring current density j(r,z) = amplitude * r * exp(-((r-r0)^2+(z-z0)^2)/w^2);
/// the lifted J = j/r (-x2,x1,0) is smooth and divergence-free.
std::function<double(double, double)> ring_current(double amplitude, double r0, double z0,
                                                   double width);

/// Uniform toroidal slab |z| < half_height, r < radius with smooth edges.
std::function<double(double, double)> solenoid_slab_current(double amplitude, double radius,
                                                            double half_height, double edge);

/// Smooth random potential with zero boundary: a few low-order sine modes.
ScalarField random_smooth_potential(const GridSpec& spec, Rng& rng, double amplitude,
                                    int max_mode = 3);

/// Smooth random vector field with zero boundary (componentwise sine modes).
VectorField random_smooth_vector_field(const GridSpec& spec, Rng& rng, double amplitude,
                                       int max_mode = 3);

/// Random equivariant field: alpha, beta, gamma coefficients are smooth random
/// functions of (r^2, z), assembled along the three cylindrical directions.
VectorField random_equivariant_field(const GridSpec& spec, Rng& rng, double amplitude);

/// Random smooth half-plane field with zero Dirichlet boundary (sine modes in
/// z, sine modes in r vanishing at the axis and the outer radius).
HalfPlaneField random_halfplane_field(const HalfPlaneGrid& grid, Rng& rng, double amplitude,
                                      int max_mode = 3);

/// Random admissible state: B uniform in a ball, g uniform in its ellipsoid.
AdmissibleState random_admissible_state(Rng& rng, double b_radius = 2.0);

/// Random vector in the ball of the given radius.
Vec3 random_in_ball(Rng& rng, double radius);

} // namespace lqem
