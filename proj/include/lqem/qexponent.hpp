#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lqem {

/// Interpolation exponent q of the model family: q=1 is the square-root
/// (Born-Infeld) density, q=2 the quadratic (Maxwell) one.
///
/// Validity is checked on construction (1 <= q <= 2). Solver entry points
/// impose their own stricter ranges through require_electro() /
/// require_magneto().
class QExponent {
public:
    explicit QExponent(double q) : q_(q) {
        if (!std::isfinite(q) || q < 1.0 || q > 2.0)
            throw std::domain_error("QExponent: q must lie in [1,2], got " + std::to_string(q));
    }

    double value() const { return q_; }
    double half() const { return 0.5 * q_; }

    /// Critical Sobolev exponent q* = 3q/(3-q) attached to gradients in L^q on R^3.
    double sobolev_conjugate() const { return 3.0 * q_ / (3.0 - q_); }

    /// Electrostatic solvers need q < 2 (at q=2 the constitutive law is linear
    /// and bounded, so the pointwise inversion is not surjective).
    void require_electro(const char* where) const {
        if (q_ >= 2.0)
            throw std::domain_error(std::string(where) + ": requires q < 2, got q=" + std::to_string(q_));
    }

    /// Magnetostatic minimization needs 6/5 < q < 2.
    void require_magneto(const char* where) const {
        if (q_ <= kMagnetoQMin || q_ >= 2.0)
            throw std::domain_error(std::string(where) + ": requires 6/5 < q < 2, got q=" + std::to_string(q_));
    }

    static constexpr double kMagnetoQMin = 6.0 / 5.0;

private:
    double q_;
};

} // namespace lqem
