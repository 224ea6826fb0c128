#include "lqem/generators.hpp"

#include <cmath>

#include "lqem/densities.hpp"

namespace lqem {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::function<double(const Vec3&)> gaussian_charge(double amplitude, double width, const Vec3& center) {
    const double inv = 1.0 / (2.0 * width * width);
    return [=](const Vec3& p) { return amplitude * std::exp(-norm2(p - center) * inv); };
}

std::function<double(const Vec3&)> point_approx_charge(double total_charge, double width,
                                                       const Vec3& center) {
    const double amp = total_charge / (std::pow(2.0 * kPi, 1.5) * width * width * width);
    return gaussian_charge(amp, width, center);
}

std::function<Vec3(const Vec3&)> cylindrical_b(const std::function<double(double)>& b_radial) {
    return [b_radial](const Vec3& p) {
        const double r = std::hypot(p.x, p.y);
        if (r < 1e-14) return Vec3{};
        const double b = b_radial(norm(p));
        return (b / r) * Vec3{-p.y, p.x, 0.0};
    };
}

std::function<double(double)> gaussian_profile(double amplitude, double width) {
    const double inv = 1.0 / (2.0 * width * width);
    return [=](double tau) { return amplitude * std::exp(-tau * tau * inv); };
}

std::function<double(double, double)> ring_current(double amplitude, double r0, double z0,
                                                   double width) {
    const double inv = 1.0 / (width * width);
    return [=](double r, double z) {
        return amplitude * r * std::exp(-((r - r0) * (r - r0) + (z - z0) * (z - z0)) * inv);
    };
}

std::function<double(double, double)> solenoid_slab_current(double amplitude, double radius,
                                                            double half_height, double edge) {
    return [=](double r, double z) {
        const double taper_r = 0.5 * (1.0 - std::tanh((r - radius) / edge));
        const double taper_z = 0.5 * (1.0 - std::tanh((std::abs(z) - half_height) / edge));
        return amplitude * r * taper_r * taper_z;
    };
}

ScalarField random_smooth_potential(const GridSpec& spec, Rng& rng, double amplitude, int max_mode) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    struct Mode {
        int kx, ky, kz;
        double a;
    };
    std::vector<Mode> modes;
    for (int kx = 1; kx <= max_mode; ++kx)
        for (int ky = 1; ky <= max_mode; ++ky)
            for (int kz = 1; kz <= max_mode; ++kz)
                modes.push_back({kx, ky, kz, coef(rng) / static_cast<double>(kx * ky * kz)});

    ScalarField out(spec);
    const auto& d = spec.dims;
    for (std::size_t k = 0; k < d[2]; ++k)
        for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t i = 0; i < d[0]; ++i) {
                const double sx = static_cast<double>(i) / static_cast<double>(d[0] - 1);
                const double sy = static_cast<double>(j) / static_cast<double>(d[1] - 1);
                const double sz = static_cast<double>(k) / static_cast<double>(d[2] - 1);
                double v = 0.0;
                for (const Mode& m : modes)
                    v += m.a * std::sin(kPi * m.kx * sx) * std::sin(kPi * m.ky * sy) *
                         std::sin(kPi * m.kz * sz);
                out.at(i, j, k) = amplitude * v;
            }
    return out;
}

VectorField random_smooth_vector_field(const GridSpec& spec, Rng& rng, double amplitude,
                                       int max_mode) {
    VectorField out(spec);
    ScalarField cx = random_smooth_potential(spec, rng, amplitude, max_mode);
    ScalarField cy = random_smooth_potential(spec, rng, amplitude, max_mode);
    ScalarField cz = random_smooth_potential(spec, rng, amplitude, max_mode);
    for (std::size_t n = 0; n < out.values.size(); ++n)
        out.values[n] = Vec3{cx.values[n], cy.values[n], cz.values[n]};
    return out;
}

VectorField random_equivariant_field(const GridSpec& spec, Rng& rng, double amplitude) {
    std::uniform_real_distribution<double> coef(0.3, 1.0);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);
    const double ca = sign(rng), cb = sign(rng), cc = sign(rng);
    const double wa = coef(rng), wb = coef(rng), wc = coef(rng);
    // alpha, beta, gamma must be smooth functions of (r^2, z) for the
    // assembled field to be smooth across the axis.
    auto alpha = [=](double r2, double z) { return ca * std::exp(-(r2 + z * z) / wa); };
    auto beta = [=](double r2, double z) { return cb * z * std::exp(-(r2 + z * z) / wb); };
    auto gamma = [=](double r2, double z) { return cc * (1.0 + r2) * std::exp(-(r2 + z * z) / wc); };
    VectorField out(spec);
    out.fill_from([&](const Vec3& p) {
        const double r2 = p.x * p.x + p.y * p.y;
        const Vec3 tau{-p.y, p.x, 0.0};
        const Vec3 rho{p.x, p.y, 0.0};
        return amplitude * (alpha(r2, p.z) * tau + beta(r2, p.z) * rho +
                            Vec3{0.0, 0.0, gamma(r2, p.z)});
    });
    return out;
}

HalfPlaneField random_halfplane_field(const HalfPlaneGrid& grid, Rng& rng, double amplitude,
                                      int max_mode) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    struct Mode {
        int kr, kz;
        double a;
    };
    std::vector<Mode> modes;
    for (int kr = 1; kr <= max_mode; ++kr)
        for (int kz = 1; kz <= max_mode; ++kz)
            modes.push_back({kr, kz, coef(rng) / static_cast<double>(kr * kz)});
    HalfPlaneField out(grid);
    out.fill_from([&](double r, double z) {
        const double sr = r / grid.r_max;
        const double sz = (z + grid.z_max) / (2.0 * grid.z_max);
        double v = 0.0;
        for (const Mode& m : modes)
            v += m.a * std::sin(kPi * m.kr * sr) * std::sin(kPi * m.kz * sz);
        return amplitude * v;
    });
    return out;
}

Vec3 random_in_ball(Rng& rng, double radius) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (;;) {
        const Vec3 v{unit(rng), unit(rng), unit(rng)};
        if (norm2(v) <= 1.0) return radius * v;
    }
}

AdmissibleState random_admissible_state(Rng& rng, double b_radius) {
    AdmissibleState s;
    s.B = random_in_ball(rng, b_radius);
    // Direction uniform, radius scaled into the ellipsoid section along it:
    // t^2 (1 + (e.B)^2) <= 1 + |B|^2.
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 e{gauss(rng), gauss(rng), gauss(rng)};
    const double en = norm(e);
    if (en < 1e-12) e = Vec3{1.0, 0.0, 0.0};
    else e = (1.0 / en) * e;
    const double eb = dot(e, s.B);
    const double tmax = std::sqrt((1.0 + norm2(s.B)) / (1.0 + eb * eb));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double t = tmax * std::cbrt(u01(rng));
    s.g = t * e;
    s.slack = slack(s.g, s.B);
    return s;
}

} // namespace lqem
