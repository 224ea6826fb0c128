#pragma once

#include <string>
#include <vector>

#include "lqem/grid.hpp"
#include "lqem/magneto.hpp"
#include "lqem/radial.hpp"

namespace lqem {

// All writers format doubles with "%.17g": outputs are bit-stable for
// identical inputs and round-trip exactly. Column orders are fixed and
// documented in the README.

/// Radial solution CSV with header tau,dphi,phi,flux,slack.
void write_radial_solution_csv(const RadialSolution& sol, const std::string& path);
RadialSolution read_radial_solution_csv(const std::string& path);

/// Two-column profile CSV (tau,value); a non-numeric first line is a header.
void write_profile_csv(const std::vector<double>& tau, const std::vector<double>& value,
                       const std::string& path, const std::string& header = "tau,value");
std::pair<std::vector<double>, std::vector<double>> read_profile_csv(const std::string& path);

/// 3D fields as CSV, nodes in x-fastest order: x,y,z,v / x,y,z,vx,vy,vz.
void write_field_csv(const ScalarField& f, const std::string& path);
void write_field_csv(const VectorField& f, const std::string& path);
ScalarField read_scalar_field_csv(const std::string& path);   ///< grid inferred
VectorField read_vector_field_csv(const std::string& path);

/// Half-plane fields as CSV r,z,value (stored radii only, r > 0).
void write_halfplane_csv(const HalfPlaneField& f, const std::string& path);
HalfPlaneField read_halfplane_csv(const std::string& path);   ///< uniform grid inferred

/// VTK structured-points ASCII (legacy format), scalars or vectors.
void write_field_vtk(const ScalarField& f, const std::string& path, const std::string& name);
void write_field_vtk(const VectorField& f, const std::string& path, const std::string& name);
ScalarField read_scalar_field_vtk(const std::string& path);
VectorField read_vector_field_vtk(const std::string& path);

/// Field export with a format switch; formats: "csv", "vtk".
void export_field(const ScalarField& f, const std::string& format, const std::string& path,
                  const std::string& name = "field");
void export_field(const VectorField& f, const std::string& format, const std::string& path,
                  const std::string& name = "field");

/// Emits a gnuplot-compatible plotting script for a previously written CSV.
void write_gnuplot_script(const std::string& script_path, const std::string& csv_path,
                          const std::vector<std::pair<int, std::string>>& columns,
                          const std::string& xlabel, const std::string& title);

std::string format_double(double v);  ///< "%.17g"

} // namespace lqem
