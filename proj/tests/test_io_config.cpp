#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "lqem/config.hpp"
#include "lqem/generators.hpp"
#include "lqem/io.hpp"
#include "lqem/report.hpp"
#include "lqem/run.hpp"

using namespace lqem;

namespace {

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / "lqem_test_io";
    std::filesystem::create_directories(p);
    return p;
}

std::string write_text(const std::string& name, const std::string& text) {
    const auto path = temp_dir() / name;
    std::ofstream os(path);
    os << text;
    return path.string();
}

} // namespace

TEST_CASE("config parsing and key-path errors") {
    const ConfigMap cfg = ConfigMap::parse_string(
        "# comment\n"
        "[run]\n"
        "mode = verify\n"
        "seed = 7\n"
        "q = 1.5  ; trailing comment\n"
        "[solver]\n"
        "tol_e = 1e-10\n",
        "test.ini");
    CHECK(cfg.get_string("run.mode") == "verify");
    CHECK(cfg.get_int("run.seed") == 7);
    CHECK(cfg.get_double("run.q") == doctest::Approx(1.5));
    CHECK(cfg.get_double("solver.tol_e") == doctest::Approx(1e-10));
    CHECK(cfg.get_double("solver.missing", 3.0) == 3.0);

    CHECK_THROWS_WITH_AS(cfg.get_string("solver.absent"),
                         doctest::Contains("solver.absent"), std::runtime_error);

    const ConfigMap bad = ConfigMap::parse_string("[run]\nmode = verify\nseed = banana\n", "t");
    CHECK_THROWS_WITH_AS(bad.get_int("run.seed"), doctest::Contains("run.seed"),
                         std::runtime_error);

    CHECK_THROWS_WITH_AS(ConfigMap::parse_string("[run\nx=1\n", "t"),
                         doctest::Contains(":1"), std::runtime_error);
    CHECK_THROWS_AS(ConfigMap::parse_string("[s]\nkey_without_value\n", "t"), std::runtime_error);
    CHECK_THROWS_WITH_AS(ConfigMap::parse_string("[s]\na=1\na=2\n", "t"),
                         doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("unknown config keys are rejected with their path") {
    const ConfigMap cfg = ConfigMap::parse_string("[run]\nmode = verify\nmystery = 3\n", "t");
    CHECK(cfg.get_string("run.mode") == "verify");
    CHECK_THROWS_WITH_AS(cfg.reject_unused(), doctest::Contains("run.mystery"),
                         std::runtime_error);
}

TEST_CASE("environment overrides") {
    ConfigMap cfg = ConfigMap::parse_string("[run]\nmode = verify\nseed = 1\n", "t");
    ::setenv("LQEM_RUN_SEED", "99", 1);
    ::setenv("LQEM_SOLVER_TOL_E", "1e-4", 1);
    cfg.apply_env_overrides();
    ::unsetenv("LQEM_RUN_SEED");
    ::unsetenv("LQEM_SOLVER_TOL_E");
    CHECK(cfg.get_int("run.seed") == 99);
    CHECK(cfg.get_double("solver.tol_e") == doctest::Approx(1e-4));
}

TEST_CASE("report round trip, unknown keys, schema version") {
    SolveReport rep;
    rep.mode = "magneto";
    rep.seed = 12;
    rep.initial_energy = 0.5;
    rep.final_energy = -0.25;
    rep.iterations = 42;
    rep.converged = true;
    rep.config_echo["run.mode"] = "magneto";
    rep.add_residual("weak[0]", 1e-5, 1e-3);
    rep.add_check("convexity", 0.0, 0.0, true);
    rep.outputs["u_csv"] = "u.csv";
    rep.wall_seconds = 1.25;
    rep.timestamp = "2026-01-01T00:00:00Z";

    const SolveReport back = SolveReport::from_json(rep.to_json());
    CHECK(back.mode == rep.mode);
    CHECK(back.final_energy == rep.final_energy);
    CHECK(back.residuals.size() == 1);
    CHECK(back.residuals[0].pass);
    CHECK(back.checks[0].name == "convexity");

    nlohmann::json j = rep.to_json();
    j["surprise"] = 1;
    CHECK_THROWS_WITH_AS(SolveReport::from_json(j), doctest::Contains("surprise"),
                         std::runtime_error);

    nlohmann::json j2 = rep.to_json();
    j2["schema_version"] = 2;
    CHECK_THROWS_AS(SolveReport::from_json(j2), std::runtime_error);

    // timestamps live outside the deterministic payload
    SolveReport other = rep;
    other.timestamp = "2030-12-31T23:59:59Z";
    other.wall_seconds = 99.0;
    CHECK(rep.stable_dump() == other.stable_dump());
}

TEST_CASE("radial solution CSV schema and round trip") {
    RadialChargeSpec charge;
    charge.grid = make_geometric_grid(0.01, 5.0, 64);
    charge.point_charge = 4.0 * 3.14159265358979323846;
    const RadialSolution sol = solve_radial(charge, RadialMagneticProfile{}, QExponent(1.0));

    const auto path = (temp_dir() / "sol.csv").string();
    write_radial_solution_csv(sol, path);

    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "tau,dphi,phi,flux,slack");

    const RadialSolution back = read_radial_solution_csv(path);
    REQUIRE(back.grid.size() == sol.grid.size());
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        CHECK(back.grid[i] == sol.grid[i]);  // %.17g round-trips doubles exactly
        CHECK(back.dphi[i] == sol.dphi[i]);
        CHECK(back.phi[i] == sol.phi[i]);
        CHECK(back.flux[i] == sol.flux[i]);
        CHECK(back.slack[i] == sol.slack[i]);
    }
}

TEST_CASE("3D field CSV and VTK round trips") {
    const GridSpec spec = make_centered_grid(6, 1.0);
    Rng rng(17);
    ScalarField f = random_smooth_potential(spec, rng, 1.0);
    VectorField v = random_smooth_vector_field(spec, rng, 1.0);

    const auto fcsv = (temp_dir() / "f.csv").string();
    write_field_csv(f, fcsv);
    const ScalarField f2 = read_scalar_field_csv(fcsv);
    REQUIRE(f2.spec.same_as(spec));
    for (std::size_t n = 0; n < f.values.size(); ++n) CHECK(f2.values[n] == f.values[n]);

    const auto vcsv = (temp_dir() / "v.csv").string();
    write_field_csv(v, vcsv);
    const VectorField v2 = read_vector_field_csv(vcsv);
    for (std::size_t n = 0; n < v.values.size(); ++n)
        CHECK(norm(v2.values[n] - v.values[n]) == 0.0);

    const auto fvtk = (temp_dir() / "f.vtk").string();
    write_field_vtk(f, fvtk, "phi");
    const ScalarField f3 = read_scalar_field_vtk(fvtk);
    REQUIRE(f3.spec.same_as(spec));
    for (std::size_t n = 0; n < f.values.size(); ++n) CHECK(f3.values[n] == f.values[n]);

    const auto vvtk = (temp_dir() / "v.vtk").string();
    write_field_vtk(v, vvtk, "A");
    const VectorField v3 = read_vector_field_vtk(vvtk);
    for (std::size_t n = 0; n < v.values.size(); ++n)
        CHECK(norm(v3.values[n] - v.values[n]) == 0.0);

    CHECK_THROWS_WITH_AS(export_field(f, "hdf5", (temp_dir() / "x").string()),
                         doctest::Contains("csv, vtk"), std::invalid_argument);
}

TEST_CASE("half-plane CSV round trip") {
    HalfPlaneGrid g;
    g.r_max = 2.0;
    g.z_max = 1.0;
    g.nr = 9;
    g.nz = 7;
    HalfPlaneField f(g);
    f.fill_from([](double r, double z) { return r * std::exp(-r - z * z); });
    const auto path = (temp_dir() / "hp.csv").string();
    write_halfplane_csv(f, path);
    const HalfPlaneField back = read_halfplane_csv(path);
    REQUIRE(back.grid.same_as(g));
    for (std::size_t j = 0; j < g.nz; ++j)
        for (std::size_t i = 1; i < g.nr; ++i) CHECK(back.at(i, j) == f.at(i, j));
}

TEST_CASE("zero field VTK export has one entry per node") {
    GridSpec spec;
    spec.dims = {4, 4, 4};
    spec.h = 0.5;
    const ScalarField zero(spec);
    const auto path = (temp_dir() / "zero.vtk").string();
    write_field_vtk(zero, path, "phi");
    std::ifstream is(path);
    std::string line;
    std::size_t zeros = 0;
    while (std::getline(is, line))
        if (line == "0") ++zeros;
    CHECK(zeros == 64);
}

TEST_CASE("run_case electro-radial end to end") {
    const std::string cfg_path = write_text("radial.ini",
                                            "[run]\n"
                                            "mode = electro-radial\n"
                                            "q = 1.0\n"
                                            "out = " + (temp_dir() / "radial_out").string() + "\n"
                                            "[grid1d]\n"
                                            "tau_min = 1e-4\n"
                                            "tau_max = 20\n"
                                            "nodes = 1500\n"
                                            "[charge]\n"
                                            "point = 12.566370614359172\n");
    RunConfig rc = load_run_config(cfg_path);
    const SolveReport rep = run_case(rc);
    CHECK(rep.converged);
    CHECK(rep.all_passed());
    CHECK(exit_status(rc, rep) == 0);
    CHECK(std::filesystem::exists(temp_dir() / "radial_out" / "solution.csv"));
    CHECK(std::filesystem::exists(temp_dir() / "radial_out" / "solution.gp"));
    CHECK(std::filesystem::exists(temp_dir() / "radial_out" / "report.json"));

    const SolveReport disk = SolveReport::read((temp_dir() / "radial_out" / "report.json").string());
    CHECK(disk.mode == "electro-radial");
}

TEST_CASE("run_case is deterministic modulo the timing block") {
    const std::string cfg_path = write_text("verify.ini",
                                            "[run]\n"
                                            "mode = verify\n"
                                            "seed = 5\n"
                                            "out = " + (temp_dir() / "verify_out").string() + "\n"
                                            "[verify]\n"
                                            "samples = 2000\n"
                                            "kkt_samples = 500\n");
    RunConfig rc1 = load_run_config(cfg_path);
    const SolveReport r1 = run_case(rc1);
    RunConfig rc2 = load_run_config(cfg_path);
    const SolveReport r2 = run_case(rc2);
    CHECK(r1.stable_dump() == r2.stable_dump());
    CHECK(r1.all_passed());
}

TEST_CASE("run_case rejects malformed configs with key paths") {
    const std::string cfg_path = write_text("bad.ini",
                                            "[run]\n"
                                            "mode = electro-radial\n"
                                            "out = " + (temp_dir() / "bad_out").string() + "\n"
                                            "[grid1d]\n"
                                            "spacing = fancy\n");
    RunConfig rc = load_run_config(cfg_path);
    CHECK_THROWS_WITH_AS(run_case(rc), doctest::Contains("grid1d.spacing"), std::runtime_error);

    const std::string cfg2 = write_text("bad2.ini",
                                        "[run]\n"
                                        "mode = electro-radial\n"
                                        "out = " + (temp_dir() / "bad2_out").string() + "\n"
                                        "[grid1d]\n"
                                        "knots = 100\n");
    RunConfig rc2 = load_run_config(cfg2);
    CHECK_THROWS_WITH_AS(run_case(rc2), doctest::Contains("grid1d.knots"), std::runtime_error);
}

TEST_CASE("run_case decompose mode") {
    const std::string cfg_path = write_text("dec.ini",
                                            "[run]\n"
                                            "mode = decompose\n"
                                            "seed = 3\n"
                                            "out = " + (temp_dir() / "dec_out").string() + "\n"
                                            "[grid3d]\n"
                                            "n = 20\n"
                                            "half_width = 2.5\n");
    RunConfig rc = load_run_config(cfg_path);
    const SolveReport rep = run_case(rc);
    CHECK(rep.all_passed());
    CHECK(std::filesystem::exists(temp_dir() / "dec_out" / "a_tau.vtk"));
}

TEST_CASE("run_case electro-grid and magneto modes end to end") {
    SUBCASE("electro-grid, small box") {
        const std::string cfg_path = write_text("grid.ini",
                                                "[run]\n"
                                                "mode = electro-grid\n"
                                                "q = 1.5\n"
                                                "seed = 2\n"
                                                "out = " + (temp_dir() / "grid_out").string() + "\n"
                                                "[grid3d]\n"
                                                "n = 14\n"
                                                "half_width = 1.5\n"
                                                "[charge]\n"
                                                "profile = gaussian\n"
                                                "amplitude = 1.5\n"
                                                "width = 0.4\n"
                                                "[checks]\n"
                                                "weak_tests = 2\n"
                                                "vi_tests = 2\n");
        RunConfig rc = load_run_config(cfg_path);
        const SolveReport rep = run_case(rc);
        CHECK(rep.converged);
        CHECK(rep.all_passed());
        CHECK(rep.final_energy < 0.0);
        CHECK(std::filesystem::exists(temp_dir() / "grid_out" / "phi.vtk"));
        CHECK(std::filesystem::exists(temp_dir() / "grid_out" / "phi.csv"));
    }

    SUBCASE("magneto, ring current") {
        const std::string cfg_path = write_text("mag.ini",
                                                "[run]\n"
                                                "mode = magneto\n"
                                                "q = 1.5\n"
                                                "out = " + (temp_dir() / "mag_out").string() + "\n"
                                                "[grid2d]\n"
                                                "r_max = 4\n"
                                                "z_max = 4\n"
                                                "nr = 49\n"
                                                "nz = 49\n"
                                                "[current]\n"
                                                "profile = ring\n"
                                                "amplitude = 1\n"
                                                "r0 = 1\n"
                                                "z0 = 0\n"
                                                "width = 0.4\n"
                                                "[lift]\n"
                                                "n = 24\n"
                                                "[checks]\n"
                                                "weak_tests = 2\n");
        RunConfig rc = load_run_config(cfg_path);
        const SolveReport rep = run_case(rc);
        CHECK(rep.converged);
        CHECK(rep.final_energy < 0.0);
        CHECK(std::filesystem::exists(temp_dir() / "mag_out" / "u.csv"));
        CHECK(std::filesystem::exists(temp_dir() / "mag_out" / "A.vtk"));
        CHECK(std::filesystem::exists(temp_dir() / "mag_out" / "curlA.vtk"));
        CHECK(exit_status(rc, rep) == (rep.all_passed() ? 0 : 1));
    }

    SUBCASE("checks can be disabled; config keys stay accepted") {
        const std::string cfg_path = write_text("mag_off.ini",
                                                "[run]\n"
                                                "mode = magneto\n"
                                                "q = 1.5\n"
                                                "check = off\n"
                                                "out = " + (temp_dir() / "mag_off_out").string() + "\n"
                                                "[grid2d]\n"
                                                "r_max = 4\n"
                                                "z_max = 4\n"
                                                "nr = 33\n"
                                                "nz = 33\n"
                                                "[current]\n"
                                                "profile = ring\n"
                                                "[checks]\n"
                                                "weak_tests = 3\n"
                                                "[tolerances]\n"
                                                "tol_w = 1e-3\n");
        RunConfig rc = load_run_config(cfg_path);
        const SolveReport rep = run_case(rc);
        CHECK(rep.checks.empty());
        CHECK(rep.residuals.empty());
        CHECK(exit_status(rc, rep) == 0);
    }
}

TEST_CASE("trivial sources give trivial reports through run_case") {
    SUBCASE("electro-radial with no charge") {
        const std::string cfg_path = write_text("radial0.ini",
                                                "[run]\n"
                                                "mode = electro-radial\n"
                                                "q = 1.5\n"
                                                "out = " + (temp_dir() / "radial0_out").string() + "\n"
                                                "[grid1d]\n"
                                                "nodes = 300\n");
        RunConfig rc = load_run_config(cfg_path);
        const SolveReport rep = run_case(rc);
        CHECK(rep.all_passed());
        const RadialSolution sol =
            read_radial_solution_csv((temp_dir() / "radial0_out" / "solution.csv").string());
        for (double v : sol.phi) CHECK(v == 0.0);
        for (double v : sol.dphi) CHECK(v == 0.0);
    }

    SUBCASE("magneto with no current") {
        const std::string cfg_path = write_text("mag0.ini",
                                                "[run]\n"
                                                "mode = magneto\n"
                                                "q = 1.5\n"
                                                "out = " + (temp_dir() / "mag0_out").string() + "\n"
                                                "[grid2d]\n"
                                                "r_max = 3\n"
                                                "z_max = 3\n"
                                                "nr = 17\n"
                                                "nz = 17\n"
                                                "[current]\n"
                                                "profile = none\n"
                                                "[lift]\n"
                                                "n = 12\n");
        RunConfig rc = load_run_config(cfg_path);
        const SolveReport rep = run_case(rc);
        CHECK(rep.converged);
        CHECK(rep.final_energy == 0.0);
        const HalfPlaneField u = read_halfplane_csv((temp_dir() / "mag0_out" / "u.csv").string());
        for (double v : u.values) CHECK(v == 0.0);
    }
}
