#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lqem/densities.hpp"
#include "lqem/electro_grid.hpp"
#include "lqem/generators.hpp"
#include "lqem/magneto.hpp"
#include "lqem/radial.hpp"
#include "lqem/run.hpp"
#include "lqem/symmetry.hpp"

namespace py = pybind11;
using namespace lqem;

namespace {

Vec3 to_vec3(const std::array<double, 3>& a) { return Vec3{a[0], a[1], a[2]}; }
std::array<double, 3> from_vec3(const Vec3& v) { return {v.x, v.y, v.z}; }

std::vector<double> to_vector(const py::array_t<double>& a) {
    const auto buf = a.request();
    const double* p = static_cast<const double*>(buf.ptr);
    return std::vector<double>(p, p + buf.size);
}

py::array_t<double> from_vector(const std::vector<double>& v) {
    // explicit 1-D shape; scalar-count array_t constructors misbehave on the
    // older pybind11 shipped with the system
    py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    auto w = out.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < w.shape(0); ++i) w(i) = v[static_cast<std::size_t>(i)];
    return out;
}

py::dict radial_solution_to_dict(const RadialSolution& sol) {
    py::dict d;
    d["tau"] = from_vector(sol.grid);
    d["dphi"] = from_vector(sol.dphi);
    d["phi"] = from_vector(sol.phi);
    d["flux"] = from_vector(sol.flux);
    d["slack"] = from_vector(sol.slack);
    d["energy"] = sol.energy;
    d["phi_origin"] = sol.phi_origin;
    d["warnings"] = sol.warnings;
    return d;
}

} // namespace

PYBIND11_MODULE(lqem, m) {
    m.doc() = "Interpolated nonlinear electromagnetostatics: pointwise densities, radial and "
              "grid electrostatic solvers, the reduced magnetostatic solver, and the "
              "cylindrical decomposition checks.";

    // --- pointwise algebra ---------------------------------------------------
    m.def("slack",
          [](std::array<double, 3> g, std::array<double, 3> B) {
              return slack(to_vec3(g), to_vec3(B));
          },
          py::arg("g"), py::arg("B"));
    m.def("admissible",
          [](std::array<double, 3> g, std::array<double, 3> B) {
              return admissible(to_vec3(g), to_vec3(B));
          },
          py::arg("g"), py::arg("B"));
    m.def("electro_density",
          [](std::array<double, 3> g, std::array<double, 3> B, double q) {
              return electro_density(to_vec3(g), to_vec3(B), QExponent(q));
          },
          py::arg("g"), py::arg("B"), py::arg("q"));
    m.def("electro_flux",
          [](std::array<double, 3> g, std::array<double, 3> B, double q) {
              return from_vec3(electro_flux(to_vec3(g), to_vec3(B), QExponent(q)));
          },
          py::arg("g"), py::arg("B"), py::arg("q"));
    m.def("magneto_density",
          [](std::array<double, 3> c, double q) {
              return magneto_density(to_vec3(c), QExponent(q));
          },
          py::arg("c"), py::arg("q"));
    m.def("magneto_field",
          [](std::array<double, 3> c, double q) {
              return from_vec3(magneto_field(to_vec3(c), QExponent(q)));
          },
          py::arg("c"), py::arg("q"));
    m.def("growth_bounds",
          [](double t, double q) {
              const GrowthBounds g = growth_bounds(t, QExponent(q));
              return py::make_tuple(g.f, g.lo, g.hi, g.c_used);
          },
          py::arg("t"), py::arg("q"));
    m.def("fundest_check",
          [](std::array<double, 3> g, std::array<double, 3> B, double q) {
              const FundestResult f = fundest_check(to_vec3(g), to_vec3(B), QExponent(q));
              return py::make_tuple(f.lower_ok, f.upper_ok);
          },
          py::arg("g"), py::arg("B"), py::arg("q"));
    m.def("sobolev_conjugate", [](double q) { return QExponent(q).sobolev_conjugate(); },
          py::arg("q"));

    // --- projection -----------------------------------------------------------
    m.def("project_ellipsoid",
          [](std::array<double, 3> g, std::array<double, 3> B) {
              return from_vec3(project_ellipsoid(to_vec3(g), to_vec3(B)));
          },
          py::arg("g"), py::arg("B"));

    // --- radial solver ----------------------------------------------------------
    m.def("invert_flux",
          [](double sigma, double mval, double q) { return invert_flux(sigma, mval, QExponent(q)); },
          py::arg("sigma"), py::arg("m"), py::arg("q"));
    m.def("invert_flux_array",
          [](py::array_t<double> sigma, double mval, double q) {
              const QExponent qq(q);
              std::vector<double> s = to_vector(sigma);
              for (double& v : s) v = invert_flux(v, mval, qq);
              return from_vector(s);
          },
          py::arg("sigma"), py::arg("m"), py::arg("q"));
    m.def("solve_radial",
          [](py::array_t<double> tau, py::array_t<double> rho, py::array_t<double> b,
             double point_charge, double q) {
              RadialChargeSpec charge;
              charge.grid = to_vector(tau);
              charge.density = to_vector(rho);
              charge.point_charge = point_charge;
              RadialMagneticProfile bprof;
              bprof.b = to_vector(b);
              return radial_solution_to_dict(solve_radial(charge, bprof, QExponent(q)));
          },
          py::arg("tau"), py::arg("rho"), py::arg("b"), py::arg("point_charge"), py::arg("q"));
    m.def("make_geometric_grid",
          [](double a, double b, std::size_t n) { return from_vector(make_geometric_grid(a, b, n)); },
          py::arg("a"), py::arg("b"), py::arg("n"));

    // --- 3D electrostatic solver ---------------------------------------------------
    m.def("minimize_ib",
          [](py::array_t<double> rho, double h, std::array<double, 3> origin, double q,
             double b_amplitude, double b_width, double tol_energy_rel, double tol_gradient,
             std::size_t max_iters) {
              const auto buf = rho.request();
              if (buf.ndim != 3) throw std::invalid_argument("rho must be a 3D array");
              ElectroGridProblem prob{GridSpec{}, ScalarField{}, nullptr, QExponent(q)};
              prob.spec.h = h;
              prob.spec.origin = to_vec3(origin);
              prob.spec.dims = {static_cast<std::size_t>(buf.shape[0]),
                                static_cast<std::size_t>(buf.shape[1]),
                                static_cast<std::size_t>(buf.shape[2])};
              prob.rho = ScalarField(prob.spec);
              const double* p = static_cast<const double*>(buf.ptr);
              // numpy arrays index as [i,j,k] with k fastest; our storage is
              // i fastest, so transpose while copying
              for (std::size_t i = 0; i < prob.spec.dims[0]; ++i)
                  for (std::size_t j = 0; j < prob.spec.dims[1]; ++j)
                      for (std::size_t k = 0; k < prob.spec.dims[2]; ++k)
                          prob.rho.at(i, j, k) =
                              p[(i * prob.spec.dims[1] + j) * prob.spec.dims[2] + k];
              if (b_amplitude != 0.0)
                  prob.B = cylindrical_b(gaussian_profile(b_amplitude, b_width));
              MinimizeIbOptions opts;
              opts.tol_energy_rel = tol_energy_rel;
              opts.tol_gradient = tol_gradient;
              opts.max_iters = max_iters;
              const auto [phi, rep] = minimize_IB(prob, ScalarField(prob.spec), opts);

              py::array_t<double> out({prob.spec.dims[0], prob.spec.dims[1], prob.spec.dims[2]});
              double* o = static_cast<double*>(out.request().ptr);
              for (std::size_t i = 0; i < prob.spec.dims[0]; ++i)
                  for (std::size_t j = 0; j < prob.spec.dims[1]; ++j)
                      for (std::size_t k = 0; k < prob.spec.dims[2]; ++k)
                          o[(i * prob.spec.dims[1] + j) * prob.spec.dims[2] + k] =
                              phi.at(i, j, k);
              py::dict report;
              report["initial_energy"] = rep.initial_energy;
              report["final_energy"] = rep.final_energy;
              report["iterations"] = rep.iterations;
              report["converged"] = rep.converged;
              report["grad_norm"] = rep.grad_norm;
              return py::make_tuple(out, report);
          },
          py::arg("rho"), py::arg("h"), py::arg("origin"), py::arg("q"),
          py::arg("b_amplitude") = 0.0, py::arg("b_width") = 1.0,
          py::arg("tol_energy_rel") = 1e-10, py::arg("tol_gradient") = 1e-6,
          py::arg("max_iters") = 4000);

    // --- reduced magnetostatic solver ------------------------------------------------
    m.def("minimize_j",
          [](py::array_t<double> j, double r_max, double z_max, double q, double tol_gradient,
             std::size_t max_iters) {
              const auto buf = j.request();
              if (buf.ndim != 2) throw std::invalid_argument("j must be a 2D array [nr-1, nz]");
              HalfPlaneGrid grid;
              grid.nr = static_cast<std::size_t>(buf.shape[0]) + 1;
              grid.nz = static_cast<std::size_t>(buf.shape[1]);
              grid.r_max = r_max;
              grid.z_max = z_max;
              grid.validate();
              CurrentProfile current(grid);
              const double* p = static_cast<const double*>(buf.ptr);
              for (std::size_t i = 1; i < grid.nr; ++i)
                  for (std::size_t jz = 0; jz < grid.nz; ++jz)
                      current.at(i, jz) = p[(i - 1) * grid.nz + jz];
              MinimizeJOptions opts;
              opts.tol_gradient = tol_gradient;
              opts.max_iters = max_iters;
              const auto [u, rep] = minimize_J(current, QExponent(q), ToroidalPotential(grid), opts);
              py::array_t<double> out({grid.nr - 1, grid.nz});
              double* o = static_cast<double*>(out.request().ptr);
              for (std::size_t i = 1; i < grid.nr; ++i)
                  for (std::size_t jz = 0; jz < grid.nz; ++jz)
                      o[(i - 1) * grid.nz + jz] = u.at(i, jz);
              py::dict report;
              report["final_energy"] = rep.final_energy;
              report["iterations"] = rep.iterations;
              report["converged"] = rep.converged;
              report["grad_norm"] = rep.grad_norm;
              return py::make_tuple(out, report);
          },
          py::arg("j"), py::arg("r_max"), py::arg("z_max"), py::arg("q"),
          py::arg("tol_gradient") = 1e-9, py::arg("max_iters") = 2000);
    m.def("energy_j",
          [](py::array_t<double> u, py::array_t<double> j, double r_max, double z_max, double q) {
              const auto buf = u.request();
              if (buf.ndim != 2) throw std::invalid_argument("u must be a 2D array [nr-1, nz]");
              HalfPlaneGrid grid;
              grid.nr = static_cast<std::size_t>(buf.shape[0]) + 1;
              grid.nz = static_cast<std::size_t>(buf.shape[1]);
              grid.r_max = r_max;
              grid.z_max = z_max;
              grid.validate();
              ToroidalPotential up(grid);
              CurrentProfile jp(grid);
              const double* pu = static_cast<const double*>(buf.ptr);
              const auto bj = j.request();
              const double* pj = static_cast<const double*>(bj.ptr);
              for (std::size_t i = 1; i < grid.nr; ++i)
                  for (std::size_t jz = 0; jz < grid.nz; ++jz) {
                      up.at(i, jz) = pu[(i - 1) * grid.nz + jz];
                      jp.at(i, jz) = pj[(i - 1) * grid.nz + jz];
                  }
              return energy_J(up, jp, QExponent(q));
          },
          py::arg("u"), py::arg("j"), py::arg("r_max"), py::arg("z_max"), py::arg("q"));

    // --- orchestration ------------------------------------------------------------------
    m.def("run_case",
          [](const std::string& config_path) {
              RunConfig rc = load_run_config(config_path);
              const SolveReport rep = run_case(rc);
              py::dict d;
              d["mode"] = rep.mode;
              d["converged"] = rep.converged;
              d["all_passed"] = rep.all_passed();
              d["initial_energy"] = rep.initial_energy;
              d["final_energy"] = rep.final_energy;
              d["iterations"] = rep.iterations;
              d["exit_status"] = exit_status(rc, rep);
              d["out_dir"] = rc.out_dir;
              return d;
          },
          py::arg("config_path"));
}
