#include "lqem/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqem {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct InterpWeights {
    std::size_t i0, j0, k0;
    double fx, fy, fz;
};

InterpWeights locate(const GridSpec& s, const Vec3& p) {
    auto axis = [](double x, double o, double h, std::size_t n, double& frac) {
        double t = (x - o) / h;
        t = std::clamp(t, 0.0, static_cast<double>(n - 1));
        double base = std::floor(t);
        if (base > static_cast<double>(n - 2)) base = static_cast<double>(n - 2);
        frac = t - base;
        return static_cast<std::size_t>(base);
    };
    InterpWeights w{};
    w.i0 = axis(p.x, s.origin.x, s.h, s.dims[0], w.fx);
    w.j0 = axis(p.y, s.origin.y, s.h, s.dims[1], w.fy);
    w.k0 = axis(p.z, s.origin.z, s.h, s.dims[2], w.fz);
    return w;
}
} // namespace

void GridSpec::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("GridSpec: spacing h must be positive");
    ensure_finite(origin, "GridSpec: origin");
    for (std::size_t d = 0; d < 3; ++d)
        if (dims[d] < 4) throw std::invalid_argument("GridSpec: dims must be >= 4 in each direction");
}

bool GridSpec::same_as(const GridSpec& o, double tol) const {
    return dims == o.dims && std::abs(h - o.h) <= tol * h &&
           norm(origin - o.origin) <= tol * (1.0 + norm(origin));
}

GridSpec make_centered_grid(std::size_t n, double half_width) {
    if (n < 4 || !(half_width > 0.0)) throw std::invalid_argument("make_centered_grid: bad parameters");
    GridSpec s;
    s.dims = {n, n, n};
    s.h = 2.0 * half_width / static_cast<double>(n - 1);
    s.origin = Vec3{-half_width, -half_width, -half_width};
    return s;
}

void ScalarField::fill_from(const std::function<double(const Vec3&)>& f) {
    for (std::size_t k = 0; k < spec.dims[2]; ++k)
        for (std::size_t j = 0; j < spec.dims[1]; ++j)
            for (std::size_t i = 0; i < spec.dims[0]; ++i)
                values[spec.index(i, j, k)] = f(spec.position(i, j, k));
}

void VectorField::fill_from(const std::function<Vec3(const Vec3&)>& f) {
    for (std::size_t k = 0; k < spec.dims[2]; ++k)
        for (std::size_t j = 0; j < spec.dims[1]; ++j)
            for (std::size_t i = 0; i < spec.dims[0]; ++i)
                values[spec.index(i, j, k)] = f(spec.position(i, j, k));
}

void ScalarField::validate() const {
    spec.validate();
    if (values.size() != spec.size()) throw std::invalid_argument("ScalarField: size mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite value");
}

void VectorField::validate() const {
    spec.validate();
    if (values.size() != spec.size()) throw std::invalid_argument("VectorField: size mismatch");
    for (const Vec3& v : values)
        if (!v.finite()) throw std::invalid_argument("VectorField: non-finite value");
}

double ScalarField::interpolate(const Vec3& p) const {
    const InterpWeights w = locate(spec, p);
    double out = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                const double wt = (di ? w.fx : 1.0 - w.fx) * (dj ? w.fy : 1.0 - w.fy) *
                                  (dk ? w.fz : 1.0 - w.fz);
                out += wt * values[spec.index(w.i0 + di, w.j0 + dj, w.k0 + dk)];
            }
    return out;
}

Vec3 VectorField::interpolate(const Vec3& p) const {
    const InterpWeights w = locate(spec, p);
    Vec3 out{};
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                const double wt = (di ? w.fx : 1.0 - w.fx) * (dj ? w.fy : 1.0 - w.fy) *
                                  (dk ? w.fz : 1.0 - w.fz);
                out += wt * values[spec.index(w.i0 + di, w.j0 + dj, w.k0 + dk)];
            }
    return out;
}

VectorField fd_curl(const VectorField& A) {
    VectorField out(A.spec);
    const auto& d = A.spec.dims;
    const double ih2 = 0.5 / A.spec.h;
    for (std::size_t k = 1; k + 1 < d[2]; ++k)
        for (std::size_t j = 1; j + 1 < d[1]; ++j)
            for (std::size_t i = 1; i + 1 < d[0]; ++i) {
                const Vec3 dx = ih2 * (A.at(i + 1, j, k) - A.at(i - 1, j, k));
                const Vec3 dy = ih2 * (A.at(i, j + 1, k) - A.at(i, j - 1, k));
                const Vec3 dz = ih2 * (A.at(i, j, k + 1) - A.at(i, j, k - 1));
                out.at(i, j, k) = Vec3{dy.z - dz.y, dz.x - dx.z, dx.y - dy.x};
            }
    return out;
}

ScalarField fd_divergence(const VectorField& A) {
    ScalarField out(A.spec);
    const auto& d = A.spec.dims;
    const double ih2 = 0.5 / A.spec.h;
    for (std::size_t k = 1; k + 1 < d[2]; ++k)
        for (std::size_t j = 1; j + 1 < d[1]; ++j)
            for (std::size_t i = 1; i + 1 < d[0]; ++i)
                out.at(i, j, k) = ih2 * ((A.at(i + 1, j, k).x - A.at(i - 1, j, k).x) +
                                         (A.at(i, j + 1, k).y - A.at(i, j - 1, k).y) +
                                         (A.at(i, j, k + 1).z - A.at(i, j, k - 1).z));
    return out;
}

VectorField fd_gradient(const ScalarField& f) {
    VectorField out(f.spec);
    const auto& d = f.spec.dims;
    const double ih2 = 0.5 / f.spec.h;
    for (std::size_t k = 1; k + 1 < d[2]; ++k)
        for (std::size_t j = 1; j + 1 < d[1]; ++j)
            for (std::size_t i = 1; i + 1 < d[0]; ++i)
                out.at(i, j, k) = Vec3{ih2 * (f.at(i + 1, j, k) - f.at(i - 1, j, k)),
                                       ih2 * (f.at(i, j + 1, k) - f.at(i, j - 1, k)),
                                       ih2 * (f.at(i, j, k + 1) - f.at(i, j, k - 1))};
    return out;
}

double fd_jacobian_norm2(const VectorField& A, std::size_t i, std::size_t j, std::size_t k) {
    const double ih2 = 0.5 / A.spec.h;
    const Vec3 dx = ih2 * (A.at(i + 1, j, k) - A.at(i - 1, j, k));
    const Vec3 dy = ih2 * (A.at(i, j + 1, k) - A.at(i, j - 1, k));
    const Vec3 dz = ih2 * (A.at(i, j, k + 1) - A.at(i, j, k - 1));
    return norm2(dx) + norm2(dy) + norm2(dz);
}

double max_interior_norm(const VectorField& A, std::size_t margin) {
    const auto& d = A.spec.dims;
    double m = 0.0;
    for (std::size_t k = margin; k + margin < d[2]; ++k)
        for (std::size_t j = margin; j + margin < d[1]; ++j)
            for (std::size_t i = margin; i + margin < d[0]; ++i)
                m = std::max(m, norm(A.at(i, j, k)));
    return m;
}

double max_interior_abs(const ScalarField& f, std::size_t margin) {
    const auto& d = f.spec.dims;
    double m = 0.0;
    for (std::size_t k = margin; k + margin < d[2]; ++k)
        for (std::size_t j = margin; j + margin < d[1]; ++j)
            for (std::size_t i = margin; i + margin < d[0]; ++i)
                m = std::max(m, std::abs(f.at(i, j, k)));
    return m;
}

double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.spec.h * f.spec.h * f.spec.h);
}

double l2_norm(const VectorField& f) {
    double s = 0.0;
    for (const Vec3& v : f.values) s += norm2(v);
    return std::sqrt(s * f.spec.h * f.spec.h * f.spec.h);
}

std::vector<double> sample_sphere(const ScalarField& phi, const Vec3& center, double r,
                                  std::size_t directions) {
    // Fibonacci sphere point set: deterministic, near-uniform.
    std::vector<double> out(directions);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t m = 0; m < directions; ++m) {
        const double zc = 1.0 - 2.0 * (static_cast<double>(m) + 0.5) / static_cast<double>(directions);
        const double rho = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        const double th = golden * static_cast<double>(m);
        const Vec3 p = center + r * Vec3{rho * std::cos(th), rho * std::sin(th), zc};
        out[m] = phi.interpolate(p);
    }
    return out;
}

} // namespace lqem
