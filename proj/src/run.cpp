#include "lqem/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <stdexcept>

#include "lqem/densities.hpp"
#include "lqem/electro_grid.hpp"
#include "lqem/generators.hpp"
#include "lqem/io.hpp"
#include "lqem/magneto.hpp"
#include "lqem/radial.hpp"
#include "lqem/symmetry.hpp"

namespace lqem {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;

std::string out_path(const RunConfig& rc, const std::string& name) {
    return (std::filesystem::path(rc.out_dir) / name).string();
}

void echo_config(const RunConfig& rc, SolveReport& rep) {
    rep.mode = rc.mode;
    rep.seed = rc.seed;
    for (const auto& [k, v] : rc.raw.entries()) rep.config_echo[k] = v;
}

std::string iso_timestamp() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

// --- radial profiles from config ------------------------------------------------

std::vector<double> radial_grid_from_config(const ConfigMap& cfg) {
    const double tau_min = cfg.get_double("grid1d.tau_min", 1e-4);
    const double tau_max = cfg.get_double("grid1d.tau_max", 20.0);
    const auto nodes = static_cast<std::size_t>(cfg.get_int("grid1d.nodes", 2000));
    const std::string spacing = cfg.get_string("grid1d.spacing", "geometric");
    if (spacing == "geometric") return make_geometric_grid(tau_min, tau_max, nodes);
    if (spacing == "uniform") return make_uniform_grid(tau_min, tau_max, nodes);
    throw std::runtime_error("config: grid1d.spacing must be geometric or uniform");
}

std::vector<double> sampled_profile(const ConfigMap& cfg, const std::string& section,
                                    const std::vector<double>& grid) {
    const std::string profile = cfg.get_string(section + ".profile", "none");
    std::vector<double> out;
    if (profile == "none") return out;
    if (profile == "gaussian") {
        const double amp = cfg.get_double(section + ".amplitude", 1.0);
        const double width = cfg.get_double(section + ".width", 1.0);
        const auto f = gaussian_profile(amp, width);
        out.reserve(grid.size());
        for (double tau : grid) out.push_back(f(tau));
        return out;
    }
    if (profile == "file") {
        const auto [tau, val] = read_profile_csv(cfg.get_string(section + ".path"));
        out.reserve(grid.size());
        // linear interpolation onto the solver grid; zero outside the samples
        for (double t : grid) {
            if (t <= tau.front() || t >= tau.back()) {
                out.push_back(0.0);
                continue;
            }
            const auto it = std::upper_bound(tau.begin(), tau.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - tau.begin());
            const double w = (t - tau[i - 1]) / (tau[i] - tau[i - 1]);
            out.push_back((1.0 - w) * val[i - 1] + w * val[i]);
        }
        return out;
    }
    throw std::runtime_error("config: " + section + ".profile must be none, gaussian or file");
}

// --- mode drivers ------------------------------------------------------------------

SolveReport run_electro_radial(RunConfig& rc) {
    SolveReport rep;
    echo_config(rc, rep);
    const QExponent q(rc.q);
    q.require_electro("electro-radial mode");

    RadialChargeSpec charge;
    charge.grid = radial_grid_from_config(rc.raw);
    charge.point_charge = rc.raw.get_double("charge.point", 0.0);
    charge.density = sampled_profile(rc.raw, "charge", charge.grid);
    RadialMagneticProfile bprof;
    bprof.b = sampled_profile(rc.raw, "bfield", charge.grid);

    const RadialSolution sol = solve_radial(charge, bprof, q);
    rep.initial_energy = rep.final_energy = sol.energy;
    rep.converged = true;
    rep.iterations = 0;

    write_radial_solution_csv(sol, out_path(rc, "solution.csv"));
    write_gnuplot_script(out_path(rc, "solution.gp"), "solution.csv",
                         {{2, "dphi"}, {3, "phi"}, {4, "flux"}}, "tau", "radial solution");
    rep.outputs["solution_csv"] = "solution.csv";
    rep.outputs["plot_script"] = "solution.gp";

    const double tol_w = rc.raw.get_double("tolerances.tol_w", 1e-3);
    if (rc.checks_enabled) {
        double min_slack = 1.0;
        for (double s : sol.slack) min_slack = std::min(min_slack, s);
        rep.add_check("radial.slack_positive", min_slack, 0.0, min_slack > 0.0);
        for (const std::string& warn : sol.warnings)
            rep.add_check("radial.warning: " + warn, 1.0, 0.0, false);

        double rho_scale = std::abs(charge.point_charge);
        const std::vector<double> w = trapezoid_weights(sol.grid);
        for (std::size_t i = 0; i < sol.grid.size(); ++i)
            if (!sol.rho.empty())
                rho_scale += kFourPi * w[i] * std::abs(sol.rho[i]) * sol.grid[i] * sol.grid[i];
        const double scale = std::max(1.0, rho_scale);

        const std::vector<std::pair<std::string, std::function<double(double)>>> tests = {
            {"exp(-tau)", [](double t) { return std::exp(-t); }},
            {"exp(-tau^2)", [](double t) { return std::exp(-t * t); }},
            {"tau*exp(-tau)", [](double t) { return t * std::exp(-t); }}};
        for (const auto& [name, f] : tests) {
            std::vector<double> psi(sol.grid.size());
            for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = f(sol.grid[i]);
            rep.add_residual("radial.weak_residual[" + name + "]",
                             radial_weak_residual(sol, psi), tol_w * scale);
        }
        rep.add_check("radial.active_set_fraction(delta=1e-3)",
                      active_set_fraction(sol, 1e-3), 1.0);
    }
    return rep;
}

ElectroGridProblem grid_problem_from_config(RunConfig& rc) {
    ElectroGridProblem prob{GridSpec{}, ScalarField{}, nullptr, QExponent(rc.q)};
    const auto n = static_cast<std::size_t>(rc.raw.get_int("grid3d.n", 32));
    const double half = rc.raw.get_double("grid3d.half_width", 4.0);
    prob.spec = make_centered_grid(n, half);
    prob.rho = ScalarField(prob.spec);

    const std::string cprofile = rc.raw.get_string("charge.profile", "gaussian");
    if (cprofile == "gaussian") {
        prob.rho.fill_from(gaussian_charge(rc.raw.get_double("charge.amplitude", 1.0),
                                           rc.raw.get_double("charge.width", 0.6)));
    } else if (cprofile == "point-approx") {
        prob.rho.fill_from(point_approx_charge(rc.raw.get_double("charge.amplitude", 1.0),
                                               rc.raw.get_double("charge.width", 0.3)));
    } else if (cprofile == "file") {
        const std::string path = rc.raw.get_string("charge.path");
        prob.rho = path.size() > 4 && path.substr(path.size() - 4) == ".vtk"
                       ? read_scalar_field_vtk(path)
                       : read_scalar_field_csv(path);
        if (!prob.rho.spec.same_as(prob.spec))
            throw std::runtime_error("config: charge.path grid does not match grid3d");
    } else {
        throw std::runtime_error("config: charge.profile must be gaussian, point-approx or file");
    }

    const std::string bprofile = rc.raw.get_string("bfield.profile", "none");
    if (bprofile == "cylindrical-b") {
        prob.B = cylindrical_b(gaussian_profile(rc.raw.get_double("bfield.amplitude", 0.5),
                                                rc.raw.get_double("bfield.width", 1.0)));
    } else if (bprofile == "file") {
        auto field = std::make_shared<VectorField>(
            read_vector_field_vtk(rc.raw.get_string("bfield.path")));
        prob.B = [field](const Vec3& p) { return field->interpolate(p); };
    } else if (bprofile != "none") {
        throw std::runtime_error("config: bfield.profile must be none, cylindrical-b or file");
    }
    return prob;
}

SolveReport run_electro_grid(RunConfig& rc) {
    SolveReport rep;
    echo_config(rc, rep);
    ElectroGridProblem prob = grid_problem_from_config(rc);

    MinimizeIbOptions opts;
    opts.tol_energy_rel = rc.raw.get_double("solver.tol_e", 1e-10);
    opts.tol_gradient = rc.raw.get_double("solver.tol_g", 1e-6);
    opts.max_iters = static_cast<std::size_t>(rc.raw.get_int("solver.max_iters", 4000));

    const auto [phi, mrep] = minimize_IB(prob, ScalarField(prob.spec), opts);
    rep.initial_energy = mrep.initial_energy;
    rep.final_energy = mrep.final_energy;
    rep.iterations = mrep.iterations;
    rep.converged = mrep.converged;

    write_field_vtk(phi, out_path(rc, "phi.vtk"), "phi");
    write_field_csv(phi, out_path(rc, "phi.csv"));
    rep.outputs["phi_vtk"] = "phi.vtk";
    rep.outputs["phi_csv"] = "phi.csv";

    // radial profile of the potential (shell means) for quick plotting
    {
        const double half = 0.5 * prob.spec.h * static_cast<double>(prob.spec.dims[0] - 1);
        std::vector<double> taus, means;
        for (int i = 1; i <= 40; ++i) {
            const double tau = 0.95 * half * i / 40.0;
            const std::vector<double> vals = sample_sphere(phi, Vec3{}, tau, 128);
            double mean = 0.0;
            for (double v : vals) mean += v;
            taus.push_back(tau);
            means.push_back(mean / static_cast<double>(vals.size()));
        }
        write_profile_csv(taus, means, out_path(rc, "profile.csv"), "tau,phi_shell_mean");
        write_gnuplot_script(out_path(rc, "profile.gp"), "profile.csv", {{2, "phi shell mean"}},
                             "tau", "potential profile");
        rep.outputs["profile_csv"] = "profile.csv";
        rep.outputs["plot_script"] = "profile.gp";
    }

    const double tol_w = rc.raw.get_double("tolerances.tol_w", 1e-3);
    const double tol_v = rc.raw.get_double("tolerances.tol_v", 1e-3);
    const auto weak_tests = static_cast<std::size_t>(rc.raw.get_int("checks.weak_tests", 5));
    const auto vi_tests = static_cast<std::size_t>(rc.raw.get_int("checks.vi_tests", 5));
    if (rc.checks_enabled) {
        Rng rng(rc.seed);

        rep.add_check("grid.converged", mrep.converged ? 1.0 : 0.0, 0.0, mrep.converged);
        rep.add_check("grid.grad_norm", mrep.grad_norm, opts.tol_gradient * 10.0);
        bool monotone = true;
        for (std::size_t i = 1; i < mrep.energy_history.size(); ++i)
            monotone = monotone && mrep.energy_history[i] <= mrep.energy_history[i - 1] + 1e-30;
        rep.add_check("grid.energy_monotone", monotone ? 0.0 : 1.0, 0.0, monotone);

        const double h3 = prob.spec.h * prob.spec.h * prob.spec.h;
        double pair_phi = 0.0;
        for (std::size_t n = 0; n < phi.values.size(); ++n)
            pair_phi += prob.rho.values[n] * phi.values[n];
        pair_phi *= h3;
        const double scale = std::max(1.0, std::abs(pair_phi));

        for (std::size_t t = 0; t < weak_tests; ++t) {
            ScalarField psi = random_smooth_potential(prob.spec, rng, 0.3);
            psi = scale_into_feasibility(psi, prob, 0.2);
            std::size_t excluded = 0;
            const double r = weak_residual_grid(phi, psi, prob, &excluded);
            rep.add_residual("grid.weak_residual[" + std::to_string(t) + "]", r, tol_w * scale);
            if (excluded)
                rep.add_check("grid.weak_residual_excluded[" + std::to_string(t) + "]",
                              static_cast<double>(excluded), 0.0, false);
        }
        for (std::size_t t = 0; t < vi_tests; ++t) {
            ScalarField psi = random_smooth_potential(prob.spec, rng, 0.3);
            psi = scale_into_feasibility(psi, prob, 0.2);
            const auto vi = variational_inequality_check(phi, psi, prob, tol_v);
            rep.add_check("grid.variational_inequality[" + std::to_string(t) + "]",
                          vi.lhs - vi.rhs, vi.tolerance, vi.ok);
        }
    }
    return rep;
}

SolveReport run_magneto(RunConfig& rc) {
    SolveReport rep;
    echo_config(rc, rep);
    const QExponent q(rc.q);

    HalfPlaneGrid grid;
    grid.r_max = rc.raw.get_double("grid2d.r_max", 6.0);
    grid.z_max = rc.raw.get_double("grid2d.z_max", 6.0);
    grid.nr = static_cast<std::size_t>(rc.raw.get_int("grid2d.nr", 128));
    grid.nz = static_cast<std::size_t>(rc.raw.get_int("grid2d.nz", 128));
    grid.validate();

    CurrentProfile current(grid);
    const std::string jprofile = rc.raw.get_string("current.profile", "ring");
    if (jprofile == "ring") {
        current.fill_from(ring_current(rc.raw.get_double("current.amplitude", 1.0),
                                       rc.raw.get_double("current.r0", 1.0),
                                       rc.raw.get_double("current.z0", 0.0),
                                       rc.raw.get_double("current.width", 0.4)));
    } else if (jprofile == "solenoid-slab") {
        current.fill_from(solenoid_slab_current(rc.raw.get_double("current.amplitude", 1.0),
                                                rc.raw.get_double("current.radius", 1.0),
                                                rc.raw.get_double("current.half_height", 1.0),
                                                rc.raw.get_double("current.edge", 0.2)));
    } else if (jprofile == "file") {
        current = read_halfplane_csv(rc.raw.get_string("current.path"));
        if (!current.grid.same_as(grid))
            throw std::runtime_error("config: current.path grid does not match grid2d");
    } else if (jprofile == "none") {
        // zero current
    } else {
        throw std::runtime_error("config: current.profile must be ring, solenoid-slab, file or none");
    }

    MinimizeJOptions opts;
    opts.tol_energy_rel = rc.raw.get_double("solver.tol_e", 1e-12);
    opts.tol_gradient = rc.raw.get_double("solver.tol_g", 1e-9);
    opts.max_iters = static_cast<std::size_t>(rc.raw.get_int("solver.max_iters", 2000));

    const auto [u, mrep] = minimize_J(current, q, ToroidalPotential(grid), opts);
    rep.initial_energy = mrep.initial_energy;
    rep.final_energy = mrep.final_energy;
    rep.iterations = mrep.iterations;
    rep.converged = mrep.converged;

    write_halfplane_csv(u, out_path(rc, "u.csv"));
    write_gnuplot_script(out_path(rc, "u.gp"), "u.csv", {{3, "u"}}, "r", "toroidal potential");
    rep.outputs["u_csv"] = "u.csv";
    rep.outputs["plot_script"] = "u.gp";

    const auto lift_n = static_cast<std::size_t>(rc.raw.get_int("lift.n", 48));
    const double lift_half = rc.raw.get_double("lift.half_width", 0.8 * std::min(grid.r_max, grid.z_max));
    const GridSpec grid3 = make_centered_grid(lift_n, lift_half);
    const VectorField A = lift_to_3d(u, grid3);
    write_field_vtk(A, out_path(rc, "A.vtk"), "A");
    write_field_vtk(fd_curl(A), out_path(rc, "curlA.vtk"), "curlA");
    rep.outputs["A_vtk"] = "A.vtk";
    rep.outputs["curlA_vtk"] = "curlA.vtk";

    const double tol_w = rc.raw.get_double("tolerances.tol_w", 1e-3);
    const auto ntests = static_cast<std::size_t>(rc.raw.get_int("checks.weak_tests", 5));
    if (rc.checks_enabled) {
        Rng rng(rc.seed);

        rep.add_check("magneto.converged", mrep.converged ? 1.0 : 0.0, 0.0, mrep.converged);
        rep.add_check("magneto.grad_norm", mrep.grad_norm, opts.tol_gradient * 10.0);
        bool has_current = false;
        for (double v : current.values) has_current = has_current || v != 0.0;
        if (has_current)
            rep.add_check("magneto.energy_negative", rep.final_energy, 0.0,
                          rep.final_energy < 0.0);

        const VectorField curlA = lift_curl_to_3d(u, grid3);
        const VectorField J3 = lift_to_3d(current, grid3);
        std::uniform_real_distribution<double> adist(0.5, 1.5), bdist(-0.5, 0.5),
            zdist(-0.3 * lift_half, 0.3 * lift_half), wdist(0.25 * lift_half, 0.45 * lift_half);
        for (std::size_t t = 0; t < ntests; ++t) {
            // random toroidal test field, smooth in (r^2, z), decaying well
            // inside the box, carrying its closed-form curl
            const double a = adist(rng), b = bdist(rng), z0 = zdist(rng), w = wdist(rng);
            const double iw2 = 1.0 / (w * w);
            auto alpha = [=](double r, double z) {
                return a * (1.0 + b * r * r) * std::exp(-(r * r + (z - z0) * (z - z0)) * iw2);
            };
            auto dr_alpha = [=](double r, double z) {
                return (2.0 * a * b * r - 2.0 * r * iw2 * a * (1.0 + b * r * r)) *
                       std::exp(-(r * r + (z - z0) * (z - z0)) * iw2);
            };
            auto dz_alpha = [=](double r, double z) { return -2.0 * (z - z0) * iw2 * alpha(r, z); };
            const auto [Btest, curlB] = lift_toroidal_with_curl(alpha, dr_alpha, dz_alpha, grid3);
            const double res = weak_residual_magneto_curls(curlA, J3, Btest, curlB, q);
            rep.add_residual("magneto.weak_residual[" + std::to_string(t) + "]", res,
                             tol_w * l2_norm(Btest));
        }
    }
    return rep;
}

SolveReport run_decompose(RunConfig& rc) {
    SolveReport rep;
    echo_config(rc, rep);

    const auto n = static_cast<std::size_t>(rc.raw.get_int("grid3d.n", 32));
    const double half = rc.raw.get_double("grid3d.half_width", 3.0);
    const GridSpec spec = make_centered_grid(n, half);

    VectorField field;
    const std::string source = rc.raw.get_string("field.source", "random-equivariant");
    if (source == "random-equivariant") {
        Rng rng(rc.seed);
        field = random_equivariant_field(spec, rng, 1.0);
    } else if (source == "file") {
        const std::string path = rc.raw.get_string("field.path");
        field = path.size() > 4 && path.substr(path.size() - 4) == ".vtk"
                    ? read_vector_field_vtk(path)
                    : read_vector_field_csv(path);
    } else {
        throw std::runtime_error("config: field.source must be random-equivariant or file");
    }

    const CylComponents c = decompose(field);
    write_field_vtk(c.a_tau, out_path(rc, "a_tau.vtk"), "a_tau");
    write_field_vtk(c.a_rho, out_path(rc, "a_rho.vtk"), "a_rho");
    write_field_vtk(c.a_zeta, out_path(rc, "a_zeta.vtk"), "a_zeta");
    rep.outputs["a_tau_vtk"] = "a_tau.vtk";
    rep.outputs["a_rho_vtk"] = "a_rho.vtk";
    rep.outputs["a_zeta_vtk"] = "a_zeta.vtk";

    if (rc.checks_enabled) {
        const double h = field.spec.h;
        rep.add_check("decompose.pointwise_pythagoras", pointwise_pythagoras_defect(field, c), 1e-12);
        const VectorField sum = reconstruct(c);
        double recon = 0.0;
        const auto& dims = field.spec.dims;
        for (std::size_t k = 0; k < dims[2]; ++k)
            for (std::size_t j = 0; j < dims[1]; ++j)
                for (std::size_t i = 0; i < dims[0]; ++i) {
                    const Vec3 p = field.spec.position(i, j, k);
                    if (std::hypot(p.x, p.y) < 1e-12) continue;  // axis handled separately
                    recon = std::max(recon, norm(sum.at(i, j, k) - field.at(i, j, k)));
                }
        rep.add_check("decompose.reconstruction", recon, 1e-12);
        const auto [e1, e2] = curl_orthogonality_check(c);
        rep.add_check("decompose.curl_orthogonality_rho_tau", e1, 10.0 * h);
        rep.add_check("decompose.curl_orthogonality_tau_zeta", e2, 10.0 * h);
        rep.add_check("decompose.nabla_pythagoras", nabla_pythagoras_check(c), 10.0 * h);
        const CylComponents s2 = s_involution(s_involution(c));
        double sdef = 0.0;
        for (std::size_t i = 0; i < field.values.size(); ++i)
            sdef = std::max({sdef, norm(s2.a_tau.values[i] - c.a_tau.values[i]),
                             norm(s2.a_rho.values[i] - c.a_rho.values[i]),
                             norm(s2.a_zeta.values[i] - c.a_zeta.values[i])});
        rep.add_check("decompose.s_involution", sdef, 0.0, sdef == 0.0);
        rep.add_check("decompose.div_a_tau", max_interior_abs(fd_divergence(c.a_tau)),
                      10.0 * h * h);
    }
    return rep;
}

SolveReport run_verify(RunConfig& rc) {
    SolveReport rep;
    echo_config(rc, rep);
    const auto samples = static_cast<std::size_t>(rc.raw.get_int("verify.samples", 100000));
    const auto kkt_samples = static_cast<std::size_t>(rc.raw.get_int("verify.kkt_samples", 10000));
    Rng rng(rc.seed);

    // Fundamental inequality chain on random admissible states and q values.
    std::uniform_real_distribution<double> qdist(1.0, 2.0);
    std::size_t fundest_fail = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const AdmissibleState a = random_admissible_state(rng);
        const QExponent q(qdist(rng));
        const FundestResult f = fundest_check(a.g, a.B, q);
        if (!f.lower_ok || !f.upper_ok) ++fundest_fail;
    }
    rep.add_check("verify.fundest_violations(" + std::to_string(samples) + ")",
                  static_cast<double>(fundest_fail), 0.0, fundest_fail == 0);

    // Growth envelope on a log sweep for representative q.
    std::size_t growth_fail = 0;
    std::size_t growth_total = 0;
    for (double qv : {1.0, 1.2, 1.5, 1.9, 2.0}) {
        const QExponent q(qv);
        for (int i = 0; i <= 600; ++i) {
            const double t = std::pow(10.0, -6.0 + 12.0 * i / 600.0);
            const GrowthBounds gb = growth_bounds(t, q);
            ++growth_total;
            if (!(gb.lo <= gb.f * (1.0 + 1e-12) && gb.f <= gb.hi * (1.0 + 1e-12))) ++growth_fail;
        }
    }
    rep.add_check("verify.growth_envelope_violations(" + std::to_string(growth_total) + ")",
                  static_cast<double>(growth_fail), 0.0, growth_fail == 0);

    // Projection KKT conditions on random (g, B) pairs.
    std::size_t kkt_fail = 0;
    double worst_angle = 0.0;
    for (std::size_t s = 0; s < kkt_samples; ++s) {
        const Vec3 B = random_in_ball(rng, 2.0);
        const Vec3 g = random_in_ball(rng, 3.0);
        const Vec3 p = project_ellipsoid(g, B);
        const ProjectionKkt kkt = projection_kkt_defect(g, B, p);
        if (kkt.moved) {
            worst_angle = std::max(worst_angle, kkt.angle);
            if (std::abs(kkt.boundary_slack) > 1e-10 || kkt.angle > 1e-6) ++kkt_fail;
        } else if (slack(g, B) < -kSlackClamp) {
            ++kkt_fail;  // infeasible point left unmoved
        }
    }
    rep.add_check("verify.projection_kkt_failures(" + std::to_string(kkt_samples) + ")",
                  static_cast<double>(kkt_fail), 0.0, kkt_fail == 0);
    rep.add_check("verify.projection_worst_angle", worst_angle, 1e-6);

    // Midpoint concavity of g -> slack^{q/2} (strict for distinct points).
    std::size_t concavity_fail = 0;
    for (std::size_t s = 0; s < kkt_samples; ++s) {
        const AdmissibleState a = random_admissible_state(rng);
        AdmissibleState b = random_admissible_state(rng);
        b.B = a.B;
        b.slack = slack(b.g, a.B);
        if (b.slack < 0.0) continue;
        const QExponent q(qdist(rng));
        const Vec3 mid = 0.5 * (a.g + b.g);
        const double lhs = std::pow(slack(mid, a.B), q.half());
        const double rhs = 0.5 * (std::pow(a.slack, q.half()) + std::pow(b.slack, q.half()));
        if (lhs + 1e-12 < rhs) ++concavity_fail;
    }
    rep.add_check("verify.midpoint_concavity_failures", static_cast<double>(concavity_fail), 0.0,
                  concavity_fail == 0);

    // Decomposition identities on a random equivariant field.
    const GridSpec spec = make_centered_grid(24, 3.0);
    const VectorField field = random_equivariant_field(spec, rng, 1.0);
    const CylComponents c = decompose(field);
    rep.add_check("verify.pointwise_pythagoras", pointwise_pythagoras_defect(field, c), 1e-12);
    const auto [e1, e2] = curl_orthogonality_check(c);
    rep.add_check("verify.curl_orthogonality_rho_tau", e1, 10.0 * spec.h);
    rep.add_check("verify.curl_orthogonality_tau_zeta", e2, 10.0 * spec.h);

    // Radial fields are curl-free (discrete order check on two grids).
    auto dpsi = [](double r) { return r * std::exp(-r * r); };
    const double c1 = max_interior_norm(fd_curl(radial_gradient_field(dpsi, make_centered_grid(24, 3.0))));
    const double c2 = max_interior_norm(fd_curl(radial_gradient_field(dpsi, make_centered_grid(48, 3.0))));
    const double order = std::log2(c1 / c2) / std::log2(47.0 / 23.0);
    rep.add_check("verify.radial_curl_refinement_order", order, 0.0, order >= 1.8);

    // invert_flux is odd and strictly increasing on a log sweep (ties allowed
    // only within rounding of the saturation bound).
    bool mono_ok = true;
    const double Rsat = std::sqrt(1.7);
    for (double qv : {1.0, 1.3, 1.7, 1.95}) {
        const QExponent q(qv);
        double prev = -1e18;
        for (int i = -40; i <= 40; ++i) {
            const double sigma = (i == 0) ? 0.0 : ((i > 0) ? std::pow(10.0, -4.0 + 0.2 * i)
                                                           : -std::pow(10.0, -4.0 - 0.2 * i));
            const double y = invert_flux(sigma, 0.7, q);
            const double yneg = invert_flux(-sigma, 0.7, q);
            const bool strict = std::abs(y) < Rsat * (1.0 - 1e-12);
            mono_ok = mono_ok && (strict ? y > prev : y >= prev) &&
                      std::abs(y + yneg) <= 1e-12 * (1.0 + std::abs(y));
            prev = y;
        }
    }
    rep.add_check("verify.invert_flux_monotone_odd", mono_ok ? 0.0 : 1.0, 0.0, mono_ok);

    rep.converged = true;
    std::size_t passed = 0;
    for (const CheckEntry& e : rep.checks) passed += e.pass ? 1 : 0;
    rep.add_check("verify.pass_count", static_cast<double>(passed),
                  static_cast<double>(rep.checks.size()), passed == rep.checks.size());
    return rep;
}

} // namespace

SolveReport run_case(RunConfig& rc) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(rc.out_dir);

    SolveReport rep;
    if (rc.mode == "electro-radial") rep = run_electro_radial(rc);
    else if (rc.mode == "electro-grid") rep = run_electro_grid(rc);
    else if (rc.mode == "magneto") rep = run_magneto(rc);
    else if (rc.mode == "decompose") rep = run_decompose(rc);
    else if (rc.mode == "verify") rep = run_verify(rc);
    else throw std::runtime_error("config: run.mode must be one of electro-radial, electro-grid, "
                                  "magneto, decompose, verify (got '" + rc.mode + "')");

    rc.raw.reject_unused();
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.timestamp = iso_timestamp();
    rep.write(out_path(rc, "report.json"));
    return rep;
}

int exit_status(const RunConfig& rc, const SolveReport& rep) {
    if (!rep.converged) return 2;
    if (rc.checks_enabled && !rep.all_passed()) return 1;
    return 0;
}

} // namespace lqem
