#include "lqem/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lqem/densities.hpp"
#include "lqem/magneto.hpp"

namespace lqem {

namespace {
constexpr double kAxisTol = 1e-12;

bool off_axis(const Vec3& p) { return std::hypot(p.x, p.y) > kAxisTol * (1.0 + std::abs(p.z)); }
} // namespace

VectorField g_action(const VectorField& field, double angle) {
    field.validate();
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    VectorField out(field.spec);
    out.fill_from([&](const Vec3& p) {
        const Vec3 pre{c * p.x + s * p.y, -s * p.x + c * p.y, p.z};  // g^{-1} x
        const Vec3 a = field.interpolate(pre);
        return Vec3{c * a.x - s * a.y, s * a.x + c * a.y, a.z};      // g a
    });
    return out;
}

CylComponents decompose(const VectorField& field) {
    field.validate();
    CylComponents c{VectorField(field.spec), VectorField(field.spec), VectorField(field.spec)};
    const auto& d = field.spec.dims;
    for (std::size_t k = 0; k < d[2]; ++k)
        for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t i = 0; i < d[0]; ++i) {
                const Vec3 p = field.spec.position(i, j, k);
                const Vec3 v = field.at(i, j, k);
                const double r = std::hypot(p.x, p.y);
                if (r <= kAxisTol * (1.0 + std::abs(p.z))) {
                    c.a_zeta.at(i, j, k) = Vec3{0.0, 0.0, v.z};
                    continue;
                }
                const Vec3 etau{-p.y / r, p.x / r, 0.0};
                const Vec3 erho{p.x / r, p.y / r, 0.0};
                // coefficients at the rounding floor of |v| are division noise
                // from x/r, y/r; snap them so pure components stay pure
                const double snap = 8.0 * std::numeric_limits<double>::epsilon() * norm(v);
                const double vt = dot(v, etau);
                const double vr = dot(v, erho);
                c.a_tau.at(i, j, k) = (std::abs(vt) <= snap ? 0.0 : vt) * etau;
                c.a_rho.at(i, j, k) = (std::abs(vr) <= snap ? 0.0 : vr) * erho;
                c.a_zeta.at(i, j, k) = Vec3{0.0, 0.0, v.z};
            }
    return c;
}

VectorField reconstruct(const CylComponents& c) {
    VectorField out(c.a_tau.spec);
    for (std::size_t n = 0; n < out.values.size(); ++n)
        out.values[n] = c.a_tau.values[n] + c.a_rho.values[n] + c.a_zeta.values[n];
    return out;
}

CylComponents s_involution(const CylComponents& c) {
    CylComponents out{c.a_tau, c.a_rho, c.a_zeta};
    for (Vec3& v : out.a_rho.values) v = -v;
    for (Vec3& v : out.a_zeta.values) v = -v;
    return out;
}

double pointwise_pythagoras_defect(const VectorField& field, const CylComponents& c) {
    const auto& d = field.spec.dims;
    double worst = 0.0;
    for (std::size_t k = 0; k < d[2]; ++k)
        for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t i = 0; i < d[0]; ++i) {
                if (!off_axis(field.spec.position(i, j, k))) continue;
                const double a2 = norm2(field.at(i, j, k));
                const double sum = norm2(c.a_tau.at(i, j, k)) + norm2(c.a_rho.at(i, j, k)) +
                                   norm2(c.a_zeta.at(i, j, k));
                worst = std::max(worst, std::abs(a2 - sum) / (1.0 + a2));
            }
    return worst;
}

std::pair<double, double> curl_orthogonality_check(const CylComponents& c) {
    const VectorField ct = fd_curl(c.a_tau);
    const VectorField cr = fd_curl(c.a_rho);
    const VectorField cz = fd_curl(c.a_zeta);
    const auto& d = ct.spec.dims;
    const double scale1 = max_interior_norm(cr) * max_interior_norm(ct) + 1e-300;
    const double scale2 = max_interior_norm(ct) * max_interior_norm(cz) + 1e-300;
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t k = 1; k + 1 < d[2]; ++k)
        for (std::size_t j = 1; j + 1 < d[1]; ++j)
            for (std::size_t i = 1; i + 1 < d[0]; ++i) {
                if (!off_axis(ct.spec.position(i, j, k))) continue;
                e1 = std::max(e1, std::abs(dot(cr.at(i, j, k), ct.at(i, j, k))));
                e2 = std::max(e2, std::abs(dot(ct.at(i, j, k), cz.at(i, j, k))));
            }
    return {e1 / scale1, e2 / scale2};
}

double nabla_pythagoras_check(const CylComponents& c) {
    const VectorField sum = reconstruct(c);
    const auto& d = sum.spec.dims;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < d[2]; ++k)
        for (std::size_t j = 1; j + 1 < d[1]; ++j)
            for (std::size_t i = 1; i + 1 < d[0]; ++i) {
                if (!off_axis(sum.spec.position(i, j, k))) continue;
                const double full = fd_jacobian_norm2(sum, i, j, k);
                const double parts = fd_jacobian_norm2(c.a_tau, i, j, k) +
                                     fd_jacobian_norm2(c.a_rho, i, j, k) +
                                     fd_jacobian_norm2(c.a_zeta, i, j, k);
                worst = std::max(worst, std::abs(full - parts) / (1.0 + full));
            }
    return worst;
}

VectorField radial_gradient_field(const std::function<double(double)>& dpsi,
                                  const GridSpec& grid3) {
    VectorField out(grid3);
    out.fill_from([&](const Vec3& p) {
        const double r = norm(p);
        if (r <= kAxisTol) return Vec3{};
        return (dpsi(r) / r) * p;
    });
    return out;
}

VectorField radial_gradient_field(const std::vector<double>& radii,
                                  const std::vector<double>& dpsi_samples,
                                  const GridSpec& grid3) {
    if (radii.size() != dpsi_samples.size() || radii.size() < 2)
        throw std::invalid_argument("radial_gradient_field: bad sampled profile");
    auto interp = [&](double r) {
        if (r <= radii.front()) return dpsi_samples.front();
        if (r >= radii.back()) return dpsi_samples.back();
        const auto it = std::upper_bound(radii.begin(), radii.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - radii.begin());
        const double t = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
        return (1.0 - t) * dpsi_samples[i - 1] + t * dpsi_samples[i];
    };
    return radial_gradient_field(interp, grid3);
}

NullityCheck symmetry_nullity_check(const std::function<double(double)>& dpsi,
                                    const VectorField& J,
                                    const std::vector<VectorField>& tests,
                                    const QExponent& q) {
    const VectorField A = radial_gradient_field(dpsi, J.spec);
    const double h3 = J.spec.h * J.spec.h * J.spec.h;
    NullityCheck out;
    for (const VectorField& B : tests) {
        const double res = weak_residual_magneto(A, J, B, q);
        out.residuals.push_back(res);
        double pair = 0.0;
        for (std::size_t n = 0; n < J.values.size(); ++n)
            pair += dot(J.values[n], B.values[n]);
        pair *= h3;
        out.pairings.push_back(pair);
        out.max_residual = std::max(out.max_residual, std::abs(res));
        out.max_curl_term = std::max(out.max_curl_term, std::abs(res + pair));
    }
    return out;
}

SumSpaceSplit sum_space_split(const VectorField& field, const QExponent& q, double threshold) {
    if (!(threshold > 0.0)) throw std::domain_error("sum_space_split: threshold must be > 0");
    field.validate();
    SumSpaceSplit out{VectorField(field.spec), VectorField(field.spec)};
    for (std::size_t n = 0; n < field.values.size(); ++n) {
        if (norm(field.values[n]) <= threshold)
            out.part6.values[n] = field.values[n];
        else
            out.partqs.values[n] = field.values[n];
    }
    out.norm6 = lp_norm(out.part6, 6.0);
    out.normqs = lp_norm(out.partqs, q.sobolev_conjugate());
    out.surrogate_norm = out.norm6 + out.normqs;
    return out;
}

SumSpaceSplitScalar sum_space_split(const ScalarField& field, const QExponent& q,
                                    double threshold) {
    if (!(threshold > 0.0)) throw std::domain_error("sum_space_split: threshold must be > 0");
    field.validate();
    SumSpaceSplitScalar out{ScalarField(field.spec), ScalarField(field.spec)};
    for (std::size_t n = 0; n < field.values.size(); ++n) {
        if (std::abs(field.values[n]) <= threshold)
            out.part6.values[n] = field.values[n];
        else
            out.partqs.values[n] = field.values[n];
    }
    out.norm6 = lp_norm(out.part6, 6.0);
    out.normqs = lp_norm(out.partqs, q.sobolev_conjugate());
    out.surrogate_norm = out.norm6 + out.normqs;
    return out;
}

double lp_norm(const VectorField& field, double p) {
    double s = 0.0;
    for (const Vec3& v : field.values) {
        const double m = norm(v);
        if (m > 0.0) s += std::pow(m, p);
    }
    const double h3 = field.spec.h * field.spec.h * field.spec.h;
    return std::pow(s * h3, 1.0 / p);
}

double lp_norm(const ScalarField& field, double p) {
    double s = 0.0;
    for (double v : field.values) {
        const double m = std::abs(v);
        if (m > 0.0) s += std::pow(m, p);
    }
    const double h3 = field.spec.h * field.spec.h * field.spec.h;
    return std::pow(s * h3, 1.0 / p);
}

} // namespace lqem
