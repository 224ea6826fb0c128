#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "lqem/qexponent.hpp"
#include "lqem/vec3.hpp"

namespace lqem {

// Pointwise algebra of the interpolated model. The Born-Infeld constant b
// is normalized to 1 throughout; every quantity is dimensionless.
//
// The central quantity is the slack
//     s(g,B) = 1 + |B|^2 - |g|^2 - (g.B)^2,
// whose nonnegativity defines the pointwise constraint set for gradients g
// in the presence of a fixed magnetic field B.

/// Rounding guard: slack values in (-kSlackClamp, 0) are treated as 0.
inline constexpr double kSlackClamp = 1e-12;

/// Flux evaluation requires slack >= kSlackMin (the denominator vanishes on
/// the constraint boundary for q < 2).
inline constexpr double kSlackMin = 1e-12;

/// s(g,B) - 1 = |B|^2 - |g|^2 - (g.B)^2, clamped so that s >= 0 within the
/// rounding guard. Keeping the excess separate from 1 preserves precision for
/// near-zero fields.
inline double slack_excess(const Vec3& g, const Vec3& B) {
    ensure_finite(g, "slack: g");
    ensure_finite(B, "slack: B");
    const double gb = dot(g, B);
    double ds = norm2(B) - norm2(g) - gb * gb;
    if (ds < -1.0 && ds > -1.0 - kSlackClamp) ds = -1.0;
    return ds;
}

/// s(g,B) with the rounding clamp applied. Throws on non-finite input.
inline double slack(const Vec3& g, const Vec3& B) {
    return 1.0 + slack_excess(g, B);
}

/// (1+ds)^e evaluated stably on both sides (ds near 0 and s = 1+ds near 0).
inline double pow1p(double ds, double e) {
    return ds > -0.5 ? std::exp(e * std::log1p(ds)) : std::pow(1.0 + ds, e);
}

/// (1+ds)^e - 1, stable for small ds.
inline double pow1p_m1(double ds, double e) {
    return ds > -0.5 ? std::expm1(e * std::log1p(ds)) : std::pow(1.0 + ds, e) - 1.0;
}

/// Pointwise admissibility: |g|^2 + (g.B)^2 <= 1 + |B|^2. Returns (ok, slack).
inline std::pair<bool, double> admissible(const Vec3& g, const Vec3& B) {
    const double s = slack(g, B);
    return {s >= 0.0, s};
}

[[noreturn]] void throw_inadmissible(const char* where, const Vec3& g, const Vec3& B, double s);

/// A gradient/field pair certified to satisfy the pointwise constraint.
struct AdmissibleState {
    Vec3 g;
    Vec3 B;
    double slack = 1.0;

    static AdmissibleState make(const Vec3& g, const Vec3& B) {
        const double s = lqem::slack(g, B);
        if (s < 0.0) throw_inadmissible("AdmissibleState", g, B, s);
        return {g, B, s};
    }
};

/// Electrostatic energy density (1/q)(1 - s(g,B)^{q/2}).
/// Domain error when s < 0.
inline double electro_density(const Vec3& g, const Vec3& B, const QExponent& q) {
    const double ds = slack_excess(g, B);
    if (ds < -1.0) throw_inadmissible("electro_density", g, B, 1.0 + ds);
    return -pow1p_m1(ds, q.half()) / q.value();
}

/// Constitutive flux D = [g + (g.B)B] / s^{1-q/2}; the g-gradient of
/// electro_density. Requires s >= kSlackMin.
inline Vec3 electro_flux(const Vec3& g, const Vec3& B, const QExponent& q) {
    const double ds = slack_excess(g, B);
    if (1.0 + ds < kSlackMin) throw_inadmissible("electro_flux", g, B, 1.0 + ds);
    const double scale = pow1p(ds, q.half() - 1.0);
    return scale * (g + dot(g, B) * B);
}

/// Magnetostatic density as a function of |c|^2 (used by the reduced 2D functional).
inline double magneto_density_mag2(double c2, const QExponent& q) {
    return pow1p_m1(c2, q.half()) / q.value();
}

/// Magnetostatic energy density (1/q)((1+|c|^2)^{q/2} - 1) of the curl value c.
inline double magneto_density(const Vec3& c, const QExponent& q) {
    ensure_finite(c, "magneto_density: c");
    return magneto_density_mag2(norm2(c), q);
}

/// Constitutive field H = c/(1+|c|^2)^{1-q/2}; the gradient of magneto_density.
inline Vec3 magneto_field(const Vec3& c, const QExponent& q) {
    ensure_finite(c, "magneto_field: c");
    return pow1p(norm2(c), q.half() - 1.0) * c;
}

/// Scalar factor (1+c2)^{q/2-1} so that H = factor * c.
inline double magneto_field_factor(double c2, const QExponent& q) {
    return pow1p(c2, q.half() - 1.0);
}

/// Two-sided growth envelope of f(t) = (1+t^2)^{q/2} - 1:
///     c_used * min(t^2, t^q) <= f(t) <= min(t^2, t^q).
/// The constant c_used = 2^{q/2-1} * min(1, q/2) is an explicit member of the
/// family of constants whose existence the envelope estimate asserts.
struct GrowthBounds {
    double f = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double c_used = 0.0;
};

inline double growth_envelope_constant(const QExponent& q) {
    return std::pow(2.0, q.half() - 1.0) * std::min(1.0, q.half());
}

inline GrowthBounds growth_bounds(double t, const QExponent& q) {
    ensure_finite(t, "growth_bounds: t");
    if (t < 0.0) throw std::domain_error("growth_bounds: t must be >= 0");
    GrowthBounds gb;
    gb.c_used = growth_envelope_constant(q);
    gb.f = pow1p_m1(t * t, q.half());
    const double m = std::min(t * t, std::pow(t, q.value()));
    gb.lo = gb.c_used * m;
    gb.hi = m;
    return gb;
}

/// Fundamental inequality chain for admissible states:
///     1 - |g|^2  <=  s(g,B)^{q/2}  <=  1 + (q/2)(|B|^2 - |g|^2).
struct FundestResult {
    bool lower_ok = false;
    bool upper_ok = false;
};

inline FundestResult fundest_check(const Vec3& g, const Vec3& B, const QExponent& q) {
    const double ds = slack_excess(g, B);
    if (ds < -1.0) throw_inadmissible("fundest_check", g, B, 1.0 + ds);
    const double sq = pow1p(ds, q.half());
    // Equality cases are legitimate; absorb rounding with a relative guard.
    const double eps = 1e-13 * (1.0 + norm2(B) + norm2(g));
    FundestResult r;
    r.lower_ok = (1.0 - norm2(g) <= sq + eps);
    r.upper_ok = (sq <= 1.0 + q.half() * (norm2(B) - norm2(g)) + eps);
    return r;
}

} // namespace lqem
