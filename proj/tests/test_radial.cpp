#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "lqem/densities.hpp"
#include "lqem/generators.hpp"
#include "lqem/radial.hpp"

using namespace lqem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;

// Test-only adaptive Simpson quadrature, independent of the solver path.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 0) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double s = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    const double lc = 0.5 * (a + c), rc = 0.5 * (c + b);
    const double flc = f(lc), frc = f(rc);
    const double sl = (c - a) / 6.0 * (fa + 4.0 * flc + fc);
    const double sr = (b - c) / 6.0 * (fc + 4.0 * frc + fb);
    if (depth > 40 || std::abs(sl + sr - s) < 15.0 * tol) return sl + sr + (sl + sr - s) / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, c, b, 0.5 * tol, depth + 1);
}

// Born-Infeld point-charge potential (q=1, b=0, Q=4*pi): phi' = -1/sqrt(1+s^4),
// phi(tau) = int_tau^inf ds/sqrt(1+s^4) with an analytic far tail.
double bi_point_charge_phi(double tau) {
    const double T = 50.0;
    const double tail = 1.0 / T - 1.0 / (10.0 * std::pow(T, 5)) + 1.0 / (24.0 * std::pow(T, 9));
    if (tau >= T) return 1.0 / tau - 1.0 / (10.0 * std::pow(tau, 5));
    return adaptive_simpson([](double s) { return 1.0 / std::sqrt(1.0 + s * s * s * s); }, tau, T,
                            1e-13) +
           tail;
}

} // namespace

TEST_CASE("cumulative_flux closed forms") {
    RadialChargeSpec spec;
    spec.grid = make_geometric_grid(0.5, 4.0, 64);

    SUBCASE("no charge at all") {
        const std::vector<double> d = cumulative_flux(spec);
        for (double v : d) CHECK(v == 0.0);
    }

    SUBCASE("pure point charge 4*pi") {
        spec.point_charge = kFourPi;
        const std::vector<double> d = cumulative_flux(spec);
        for (std::size_t i = 0; i < spec.grid.size(); ++i)
            CHECK(d[i] == doctest::Approx(-1.0 / (spec.grid[i] * spec.grid[i])).epsilon(1e-14));
    }

    SUBCASE("grid validation") {
        spec.grid = {0.0, 1.0};
        CHECK_THROWS_AS(cumulative_flux(spec), std::invalid_argument);
        spec.grid = {1.0, 0.5};
        CHECK_THROWS_AS(cumulative_flux(spec), std::invalid_argument);
    }
}

TEST_CASE("invert_flux examples and frozen oracle value") {
    CHECK(invert_flux(0.0, 0.0, QExponent(1.0)) == 0.0);
    CHECK(invert_flux(0.0, 3.7, QExponent(1.8)) == 0.0);

    // q=1, m=0: closed form y = sigma/sqrt(1+sigma^2)
    CHECK(invert_flux(1.0, 0.0, QExponent(1.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));

    // root of y (1-y^2)^{-1/4} = 5, computed to 1e-12 independently
    CHECK(invert_flux(5.0, 0.0, QExponent(1.5)) ==
          doctest::Approx(0.9992022315884368566).epsilon(1e-12));

    // q=2 is the identity inside the saturation bound, an error outside
    CHECK(invert_flux(0.3, 0.0, QExponent(2.0)) == doctest::Approx(0.3));
    CHECK_THROWS_AS(invert_flux(1.5, 0.0, QExponent(2.0)), std::domain_error);
    CHECK_NOTHROW(invert_flux(1.5, 2.0, QExponent(2.0)));

    // saturation-scale input: |y| hugs the bound but the factored slack stays positive
    const FluxInversion big = invert_flux_full(-1e12, 0.0, QExponent(1.0));
    CHECK(big.y == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(big.slack > 0.0);
    CHECK(big.slack < 1e-20);
}

TEST_CASE("invert_flux is odd and strictly increasing; q=1 closed form sweep") {
    Rng rng(42);
    std::uniform_real_distribution<double> mdist(0.0, 4.0);
    std::uniform_real_distribution<double> qdist(1.0, 1.99);
    for (int rep = 0; rep < 50; ++rep) {
        const double m = mdist(rng);
        const QExponent q(qdist(rng));
        const double R = std::sqrt(1.0 + m);
        double prev = -R;
        for (int i = -30; i <= 30; ++i) {
            const double sigma = (i == 0) ? 0.0
                                          : (i > 0 ? std::pow(10.0, -3.0 + 0.2 * i)
                                                   : -std::pow(10.0, -3.0 - 0.2 * i));
            const double y = invert_flux(sigma, m, q);
            // strict growth away from saturation; within a few ulp of the
            // bound, distinct roots collapse to the same double
            if (std::abs(y) < R * (1.0 - 1e-12)) CHECK(y > prev);
            else CHECK(y >= prev);
            prev = y;
            CHECK(invert_flux(-sigma, m, q) == doctest::Approx(-y).epsilon(1e-12));
        }
    }
    for (int i = 0; i < 100; ++i) {
        const double sigma = std::pow(10.0, -5.0 + 0.1 * i);
        const double m = mdist(rng);
        const double closed = sigma * std::sqrt((1.0 + m) / (1.0 + sigma * sigma));
        CHECK(invert_flux(sigma, m, QExponent(1.0)) == doctest::Approx(closed).epsilon(1e-11));
    }
}

TEST_CASE("constitutive round-trip: forward flux map then inversion") {
    Rng rng(99);
    std::uniform_real_distribution<double> mdist(0.0, 4.0);
    std::uniform_real_distribution<double> qdist(1.0, 1.99);
    std::uniform_real_distribution<double> ydist(-0.999, 0.999);
    for (int rep = 0; rep < 2000; ++rep) {
        const double m = mdist(rng);
        const QExponent q(qdist(rng));
        const double y = ydist(rng) * std::sqrt(1.0 + m);
        // radial gradient, cylindrical B orthogonal to it
        const Vec3 g{y, 0.0, 0.0};
        const Vec3 B{0.0, std::sqrt(m), 0.0};
        const Vec3 D = electro_flux(g, B, q);
        CHECK(std::abs(D.y) + std::abs(D.z) == 0.0);
        const double back = invert_flux(D.x, m, q);
        REQUIRE(std::abs(back - y) <= 1e-10 * (1.0 + std::abs(y)));
    }
}

TEST_CASE("solve_radial reproduces the closed-form point charge (q=1, b=0)") {
    RadialChargeSpec charge;
    charge.grid = make_geometric_grid(1e-4, 30.0, 12000);
    charge.point_charge = kFourPi;
    const RadialSolution sol = solve_radial(charge, RadialMagneticProfile{}, QExponent(1.0));

    // dphi(tau) = -1/sqrt(1+tau^4); check at the node nearest tau=1
    std::size_t i1 = 0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        if (std::abs(sol.grid[i] - 1.0) < std::abs(sol.grid[i1] - 1.0)) i1 = i;
    const double t1 = sol.grid[i1];
    CHECK(sol.dphi[i1] ==
          doctest::Approx(-1.0 / std::sqrt(1.0 + t1 * t1 * t1 * t1)).epsilon(1e-10));

    // phi against the independent adaptive-quadrature oracle, 1e-6 relative sup
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); i += 37)
        worst = std::max(worst, std::abs(sol.phi[i] - bi_point_charge_phi(sol.grid[i])));
    CHECK(worst <= 1e-6 * bi_point_charge_phi(sol.grid[0]));

    // phi(0+) approaches the known central value
    CHECK(sol.phi_origin == doctest::Approx(1.854074677301371918).epsilon(1e-6));

    // all nodes strictly admissible via the factored slack
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        REQUIRE(sol.slack[i] > 0.0);
        REQUIRE(sol.dphi[i] * sol.dphi[i] <= 1.0 + 1e-12);
    }
}

TEST_CASE("solve_radial zero charge gives the trivial potential") {
    RadialChargeSpec charge;
    charge.grid = make_uniform_grid(0.1, 5.0, 200);
    RadialMagneticProfile b;
    b.b.assign(charge.grid.size(), 0.0);
    for (std::size_t i = 0; i < charge.grid.size(); ++i)
        b.b[i] = 0.5 * std::exp(-charge.grid[i] * charge.grid[i]);
    const QExponent q(1.5);
    const RadialSolution sol = solve_radial(charge, b, q);
    for (double v : sol.dphi) CHECK(v == 0.0);
    for (double v : sol.phi) CHECK(v == 0.0);

    // energy reduces to the zero-field constant (1/q) int (1 - (1+b^2)^{q/2}) dx
    const std::vector<double> w = trapezoid_weights(charge.grid);
    double expected = 0.0;
    for (std::size_t i = 0; i < charge.grid.size(); ++i)
        expected += w[i] * charge.grid[i] * charge.grid[i] *
                    (1.0 - std::pow(1.0 + b.b[i] * b.b[i], q.half())) / q.value();
    expected *= kFourPi;
    CHECK(sol.energy == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("radial weak residual vanishes for converged solutions") {
    SUBCASE("zero charge: identically zero") {
        RadialChargeSpec charge;
        charge.grid = make_uniform_grid(0.1, 5.0, 100);
        const RadialSolution sol = solve_radial(charge, RadialMagneticProfile{}, QExponent(1.3));
        std::vector<double> psi(sol.grid.size());
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::exp(-sol.grid[i]);
        CHECK(radial_weak_residual(sol, psi) == doctest::Approx(0.0).epsilon(1e-15));
    }

    SUBCASE("constant test function pairs only with the charge") {
        RadialChargeSpec charge;
        charge.grid = make_geometric_grid(1e-3, 10.0, 500);
        charge.point_charge = kFourPi;
        const RadialSolution sol = solve_radial(charge, RadialMagneticProfile{}, QExponent(1.2));
        std::vector<double> psi(sol.grid.size(), 0.7);
        CHECK(radial_weak_residual(sol, psi) == doctest::Approx(-kFourPi * 0.7).epsilon(1e-12));
    }

    SUBCASE("point charge against exp(-tau) on a 4000-node grid") {
        RadialChargeSpec charge;
        charge.grid = make_geometric_grid(1e-6, 20.0, 4000);
        charge.point_charge = kFourPi;
        const RadialSolution sol = solve_radial(charge, RadialMagneticProfile{}, QExponent(1.0));
        std::vector<double> psi(sol.grid.size());
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::exp(-sol.grid[i]);
        CHECK(std::abs(radial_weak_residual(sol, psi)) <= 1e-4);
    }

    SUBCASE("gaussian charge, mixed b, two smooth tests") {
        RadialChargeSpec charge;
        charge.grid = make_geometric_grid(1e-4, 25.0, 6000);
        charge.density.resize(charge.grid.size());
        for (std::size_t i = 0; i < charge.grid.size(); ++i)
            charge.density[i] = 0.8 * std::exp(-charge.grid[i] * charge.grid[i]);
        RadialMagneticProfile b;
        b.b.resize(charge.grid.size());
        for (std::size_t i = 0; i < charge.grid.size(); ++i)
            b.b[i] = 0.4 * std::exp(-0.5 * charge.grid[i] * charge.grid[i]);
        const RadialSolution sol = solve_radial(charge, b, QExponent(1.6));
        for (auto f : {+[](double t) { return std::exp(-t); },
                       +[](double t) { return t * std::exp(-t * t); }}) {
            std::vector<double> psi(sol.grid.size());
            for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = f(sol.grid[i]);
            CHECK(std::abs(radial_weak_residual(sol, psi)) <= 1e-5);
        }
    }
}

TEST_CASE("active_set_fraction diagnostics") {
    RadialChargeSpec nocharge;
    nocharge.grid = make_uniform_grid(0.1, 5.0, 100);
    const RadialSolution trivial = solve_radial(nocharge, RadialMagneticProfile{}, QExponent(1.4));
    CHECK(active_set_fraction(trivial, 1e-3) == 0.0);
    CHECK(active_set_fraction(trivial, 1.0) >= 0.0);
    CHECK(active_set_fraction(trivial, 1.0) <= 1.0);

    RadialChargeSpec charge;
    charge.grid = make_geometric_grid(1e-5, 20.0, 3000);
    charge.point_charge = kFourPi;
    const RadialSolution sol = solve_radial(charge, RadialMagneticProfile{}, QExponent(1.0));
    // the near-saturated set shrinks to measure zero as delta -> 0
    double prev = 1.0;
    for (double delta : {0.5, 1e-1, 1e-2, 1e-3, 1e-4}) {
        const double frac = active_set_fraction(sol, delta);
        CHECK(frac <= prev + 1e-15);
        prev = frac;
    }
    CHECK(active_set_fraction(sol, 1e-3) < 1e-5);
    CHECK_THROWS_AS(active_set_fraction(sol, 0.0), std::domain_error);
}

TEST_CASE("finite point-charge energy as the inner cutoff shrinks") {
    // small version of the acceptance sweep: one q, two cutoffs
    auto energy_with_cutoff = [&](double eps) {
        RadialChargeSpec charge;
        charge.grid = make_geometric_grid(eps, 10.0, 3000);
        charge.point_charge = kFourPi;
        return solve_radial(charge, RadialMagneticProfile{}, QExponent(1.5)).energy;
    };
    const double e1 = energy_with_cutoff(1e-3);
    const double e2 = energy_with_cutoff(5e-4);
    CHECK(std::abs(e2 - e1) <= 1e-4 * std::abs(e1));
}

TEST_CASE("refinement warning on coarse grids") {
    RadialChargeSpec charge;
    charge.grid = make_uniform_grid(0.02, 10.0, 8);  // far too coarse near 0
    charge.point_charge = kFourPi;
    const RadialSolution sol = solve_radial(charge, RadialMagneticProfile{}, QExponent(1.0));
    CHECK(!sol.warnings.empty());
}
