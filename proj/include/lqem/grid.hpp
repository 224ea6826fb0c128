#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "lqem/vec3.hpp"

namespace lqem {

/// Uniform rectangular grid: node (i,j,k) sits at origin + h*(i,j,k).
struct GridSpec {
    Vec3 origin{0.0, 0.0, 0.0};
    double h = 1.0;
    std::array<std::size_t, 3> dims{4, 4, 4};

    std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (k * dims[1] + j) * dims[0] + i;
    }
    Vec3 position(std::size_t i, std::size_t j, std::size_t k) const {
        return Vec3{origin.x + h * static_cast<double>(i),
                    origin.y + h * static_cast<double>(j),
                    origin.z + h * static_cast<double>(k)};
    }
    bool on_boundary(std::size_t i, std::size_t j, std::size_t k) const {
        return i == 0 || j == 0 || k == 0 ||
               i == dims[0] - 1 || j == dims[1] - 1 || k == dims[2] - 1;
    }
    bool same_as(const GridSpec& o, double tol = 1e-12) const;
    void validate() const;
};

/// Centered cubic grid spanning [-half_width, half_width]^3 with n nodes per axis.
GridSpec make_centered_grid(std::size_t n, double half_width);

struct ScalarField {
    GridSpec spec;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& s) : spec(s), values(s.size(), 0.0) {}

    double& at(std::size_t i, std::size_t j, std::size_t k) { return values[spec.index(i, j, k)]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const { return values[spec.index(i, j, k)]; }

    void fill_from(const std::function<double(const Vec3&)>& f);
    double interpolate(const Vec3& p) const;   ///< trilinear; clamps to the box
    void validate() const;
};

struct VectorField {
    GridSpec spec;
    std::vector<Vec3> values;

    VectorField() = default;
    explicit VectorField(const GridSpec& s) : spec(s), values(s.size(), Vec3{}) {}

    Vec3& at(std::size_t i, std::size_t j, std::size_t k) { return values[spec.index(i, j, k)]; }
    const Vec3& at(std::size_t i, std::size_t j, std::size_t k) const { return values[spec.index(i, j, k)]; }

    void fill_from(const std::function<Vec3(const Vec3&)>& f);
    Vec3 interpolate(const Vec3& p) const;
    void validate() const;
};

/// Central-difference curl at interior nodes; boundary layer set to 0.
VectorField fd_curl(const VectorField& A);

/// Central-difference divergence at interior nodes; boundary layer set to 0.
ScalarField fd_divergence(const VectorField& A);

/// Central-difference gradient of a scalar at interior nodes; boundary 0.
VectorField fd_gradient(const ScalarField& f);

/// Frobenius norm squared of the central-difference Jacobian at a node.
double fd_jacobian_norm2(const VectorField& A, std::size_t i, std::size_t j, std::size_t k);

/// Max |field| over nodes at least `margin` nodes away from every face.
double max_interior_norm(const VectorField& A, std::size_t margin = 1);
double max_interior_abs(const ScalarField& f, std::size_t margin = 1);

/// L2 norm sqrt(sum |.|^2 h^3).
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);

/// Samples phi on a sphere of radius r about the grid center along a fixed
/// Fibonacci direction set; returns the trilinear-interpolated values.
std::vector<double> sample_sphere(const ScalarField& phi, const Vec3& center, double r,
                                  std::size_t directions);

} // namespace lqem
