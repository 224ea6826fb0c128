#include "lqem/radial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lqem/densities.hpp"

namespace lqem {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;

void validate_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("radial grid needs at least 2 nodes");
    if (!(grid.front() > 0.0)) throw std::invalid_argument("radial grid must start at tau > 0");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("radial grid must be strictly increasing");
        if (!std::isfinite(grid[i + 1]))
            throw std::invalid_argument("radial grid has non-finite node");
    }
}

void validate_samples(const std::vector<double>& v, std::size_t n, const char* what) {
    if (!v.empty() && v.size() != n)
        throw std::invalid_argument(std::string(what) + ": sample count does not match grid");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

double sample_or_zero(const std::vector<double>& v, std::size_t i) {
    return v.empty() ? 0.0 : v[i];
}

} // namespace

std::vector<double> make_uniform_grid(double a, double b, std::size_t n) {
    if (n < 2 || !(a > 0.0) || !(b > a)) throw std::invalid_argument("make_uniform_grid: bad range");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

std::vector<double> make_geometric_grid(double a, double b, std::size_t n) {
    if (n < 2 || !(a > 0.0) || !(b > a)) throw std::invalid_argument("make_geometric_grid: bad range");
    std::vector<double> g(n);
    const double ratio = std::log(b / a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = a * std::exp(ratio * static_cast<double>(i));
    g.front() = a;
    g.back() = b;
    return g;
}

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    validate_grid(grid);
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dh = 0.5 * (grid[i + 1] - grid[i]);
        w[i] += dh;
        w[i + 1] += dh;
    }
    return w;
}

std::vector<double> cumulative_flux(const RadialChargeSpec& spec) {
    validate_grid(spec.grid);
    validate_samples(spec.density, spec.grid.size(), "cumulative_flux: density");
    const std::size_t n = spec.grid.size();
    std::vector<double> d(n);

    // Q_enc(tau) = Q_point + 4*pi*int_0^tau rho s^2 ds, trapezoid on the grid.
    // The leading [0, tau_0] segment extends rho(tau_0) as a constant.
    double qenc = spec.point_charge;
    if (!spec.density.empty()) {
        const double t0 = spec.grid[0];
        qenc += kFourPi * spec.density[0] * t0 * t0 * t0 / 3.0;
    }
    double prev_integrand = sample_or_zero(spec.density, 0) * spec.grid[0] * spec.grid[0];
    d[0] = -qenc / (kFourPi * spec.grid[0] * spec.grid[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double integrand = sample_or_zero(spec.density, i) * spec.grid[i] * spec.grid[i];
        qenc += kFourPi * 0.5 * (prev_integrand + integrand) * (spec.grid[i] - spec.grid[i - 1]);
        prev_integrand = integrand;
        d[i] = -qenc / (kFourPi * spec.grid[i] * spec.grid[i]);
    }
    return d;
}

FluxInversion invert_flux_full(double sigma, double m, const QExponent& q) {
    ensure_finite(sigma, "invert_flux: sigma");
    ensure_finite(m, "invert_flux: m");
    if (m < 0.0) throw std::domain_error("invert_flux: m must be >= 0");

    const double R = std::sqrt(1.0 + m);
    if (q.value() >= 2.0) {
        if (std::abs(sigma) >= R) {
            std::ostringstream os;
            os << "invert_flux: no solution for q=2 with |sigma|=" << std::abs(sigma)
               << " >= sqrt(1+m)=" << R << " (the q=2 law is linear and bounded)";
            throw std::domain_error(os.str());
        }
        return {sigma, (R - sigma) * (R + sigma)};
    }
    if (sigma == 0.0) return {0.0, 1.0 + m};

    const double a = std::abs(sigma);
    const double beta = q.half() - 1.0; // in [-1/2, 0)

    // Root in the gap variable u = R - |y|: G(u) = (R-u) * ((2R-u)u)^beta = a,
    // strictly decreasing on (0, R], G(0+) = +inf, G(R) = 0. The factored slack
    // (2R-u)u stays accurate when u underflows the rounding of R - |y|.
    auto G = [&](double u) { return (R - u) * std::pow((2.0 * R - u) * u, beta); };

    double tlo = std::log(1e-300);
    double thi = std::log(R);
    if (G(std::exp(tlo)) < a)
        throw std::domain_error("invert_flux: sigma magnitude beyond representable saturation gap");
    for (int it = 0; it < 90; ++it) {
        const double tm = 0.5 * (tlo + thi);
        if (G(std::exp(tm)) >= a) tlo = tm; else thi = tm;
    }
    double u = std::exp(0.5 * (tlo + thi));
    // Newton polish in log(u); dG/dt = u * G'(u).
    for (int it = 0; it < 8; ++it) {
        const double s = (2.0 * R - u) * u;
        const double g = (R - u) * std::pow(s, beta);
        const double gp = std::pow(s, beta - 1.0) * (-s + 2.0 * beta * (R - u) * (R - u));
        const double dt = (g - a) / (u * gp);
        double t = std::log(u) - dt;
        t = std::clamp(t, tlo - 1.0, thi + 1.0);
        u = std::exp(t);
    }
    const double resid = std::abs(G(u) - a);
    if (!(resid <= 1e-12 * (1.0 + a))) {
        std::ostringstream os;
        os << "invert_flux: residual " << resid << " exceeds tolerance at sigma=" << sigma
           << ", m=" << m << ", q=" << q.value();
        throw std::runtime_error(os.str());
    }
    const double y = (sigma > 0.0 ? R - u : -(R - u));
    return {y, (2.0 * R - u) * u};
}

double invert_flux(double sigma, double m, const QExponent& q) {
    return invert_flux_full(sigma, m, q).y;
}

RadialSolution solve_radial(const RadialChargeSpec& charge,
                            const RadialMagneticProfile& bprof,
                            const QExponent& q) {
    q.require_electro("solve_radial");
    validate_grid(charge.grid);
    validate_samples(charge.density, charge.grid.size(), "solve_radial: density");
    validate_samples(bprof.b, charge.grid.size(), "solve_radial: b profile");

    const std::size_t n = charge.grid.size();
    RadialSolution sol;
    sol.grid = charge.grid;
    sol.point_charge = charge.point_charge;
    sol.rho = charge.density;
    sol.b = bprof.b;
    sol.flux = cumulative_flux(charge);
    sol.dphi.resize(n);
    sol.slack.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double b = sample_or_zero(bprof.b, i);
        const FluxInversion inv = invert_flux_full(sol.flux[i], b * b, q);
        sol.dphi[i] = inv.y;
        sol.slack[i] = inv.slack;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(sol.dphi[i + 1] - sol.dphi[i]) > 0.5) {
            std::ostringstream os;
            os << "refinement-needed: dphi jumps by " << std::abs(sol.dphi[i + 1] - sol.dphi[i])
               << " between tau=" << sol.grid[i] << " and tau=" << sol.grid[i + 1];
            sol.warnings.push_back(os.str());
            break;
        }
    }

    // Far-field tail: beyond tau_N the law is within O(d^2) of the identity and
    // d(s) = d(tau_N) (tau_N/s)^2, so phi(tau_N) = -int_{tau_N}^inf d = -d(tau_N)*tau_N.
    sol.phi.resize(n);
    sol.phi[n - 1] = -sol.flux[n - 1] * sol.grid[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        const double seg = 0.5 * (sol.dphi[i] + sol.dphi[i + 1]) * (sol.grid[i + 1] - sol.grid[i]);
        sol.phi[i] = sol.phi[i + 1] - seg;
    }
    sol.phi_origin = sol.phi[0] - sol.grid[0] * (sol.phi[1] - sol.phi[0]) / (sol.grid[1] - sol.grid[0]);

    // Action value: 4*pi*int (1/q)(1 - slack^{q/2}) tau^2 dtau - <rho, phi>.
    const std::vector<double> w = trapezoid_weights(sol.grid);
    double density_term = 0.0;
    double pairing = charge.point_charge * sol.phi_origin;
    for (std::size_t i = 0; i < n; ++i) {
        const double tau2 = sol.grid[i] * sol.grid[i];
        density_term += w[i] * tau2 * (1.0 - std::pow(sol.slack[i], q.half())) / q.value();
        pairing += w[i] * tau2 * kFourPi * sample_or_zero(charge.density, i) * sol.phi[i];
    }
    sol.energy = kFourPi * density_term - pairing;
    return sol;
}

double radial_weak_residual(const RadialSolution& sol, const std::vector<double>& psi) {
    const std::vector<double>& g = sol.grid;
    if (psi.size() != g.size())
        throw std::invalid_argument("radial_weak_residual: psi must be sampled on the solution grid");
    const std::size_t n = g.size();

    // Nonuniform central difference quotients for psi'.
    std::vector<double> dpsi(n);
    dpsi[0] = (psi[1] - psi[0]) / (g[1] - g[0]);
    dpsi[n - 1] = (psi[n - 1] - psi[n - 2]) / (g[n - 1] - g[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = g[i] - g[i - 1];
        const double hr = g[i + 1] - g[i];
        dpsi[i] = (hl * hl * psi[i + 1] - hr * hr * psi[i - 1] + (hr * hr - hl * hl) * psi[i]) /
                  (hl * hr * (hl + hr));
    }

    const std::vector<double> w = trapezoid_weights(g);
    double grad_term = 0.0;
    double source_term = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double tau2 = g[i] * g[i];
        grad_term += w[i] * tau2 * sol.flux[i] * dpsi[i];
        source_term += w[i] * tau2 * sample_or_zero(sol.rho, i) * psi[i];
    }
    const double psi_origin = psi[0] - g[0] * (psi[1] - psi[0]) / (g[1] - g[0]);
    return kFourPi * grad_term - (kFourPi * source_term + sol.point_charge * psi_origin);
}

double active_set_fraction(const RadialSolution& sol, double delta) {
    if (!(delta > 0.0) || !(delta <= 1.0))
        throw std::domain_error("active_set_fraction: delta must lie in (0, 1]");
    const std::vector<double> w = trapezoid_weights(sol.grid);
    double total = 0.0;
    double active = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double b = sample_or_zero(sol.b, i);
        const double weight = w[i] * sol.grid[i] * sol.grid[i];
        total += weight;
        if (sol.dphi[i] * sol.dphi[i] - b * b >= 1.0 - delta) active += weight;
    }
    return total > 0.0 ? active / total : 0.0;
}

} // namespace lqem
