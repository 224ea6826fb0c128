#include "lqem/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lqem {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return is;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            return {};
        }
    }
    return out;
}

std::vector<std::vector<double>> read_rows(const std::string& path, std::size_t ncols,
                                           const char* what) {
    std::ifstream is = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row = parse_row(line);
        if (row.empty()) {
            if (first) {
                first = false;
                continue;  // header line
            }
            throw std::runtime_error(std::string(what) + ": malformed row in " + path + ": " + line);
        }
        first = false;
        if (row.size() != ncols)
            throw std::runtime_error(std::string(what) + ": expected " + std::to_string(ncols) +
                                     " columns in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(std::string(what) + ": no data in " + path);
    return rows;
}

/// Extracts the sorted unique coordinate values of one column (tolerant merge).
std::vector<double> unique_coords(const std::vector<std::vector<double>>& rows, std::size_t col) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[col]);
    std::sort(v.begin(), v.end());
    std::vector<double> u;
    const double span = v.back() - v.front();
    const double tol = 1e-9 * (span > 0 ? span : 1.0);
    for (double x : v)
        if (u.empty() || x - u.back() > tol) u.push_back(x);
    return u;
}

void require_uniform(const std::vector<double>& u, const char* what) {
    if (u.size() < 2) throw std::runtime_error(std::string(what) + ": needs >= 2 distinct coords");
    const double h = u[1] - u[0];
    for (std::size_t i = 1; i + 1 < u.size(); ++i)
        if (std::abs((u[i + 1] - u[i]) - h) > 1e-8 * h)
            throw std::runtime_error(std::string(what) + ": nonuniform spacing in imported grid");
}

} // namespace

std::string format_double(double v) { return fmt(v); }

// --- radial ------------------------------------------------------------------

void write_radial_solution_csv(const RadialSolution& sol, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "tau,dphi,phi,flux,slack\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        os << fmt(sol.grid[i]) << ',' << fmt(sol.dphi[i]) << ',' << fmt(sol.phi[i]) << ','
           << fmt(sol.flux[i]) << ',' << fmt(sol.slack[i]) << '\n';
}

RadialSolution read_radial_solution_csv(const std::string& path) {
    const auto rows = read_rows(path, 5, "radial solution csv");
    RadialSolution sol;
    for (const auto& r : rows) {
        sol.grid.push_back(r[0]);
        sol.dphi.push_back(r[1]);
        sol.phi.push_back(r[2]);
        sol.flux.push_back(r[3]);
        sol.slack.push_back(r[4]);
    }
    return sol;
}

void write_profile_csv(const std::vector<double>& tau, const std::vector<double>& value,
                       const std::string& path, const std::string& header) {
    if (tau.size() != value.size()) throw std::invalid_argument("write_profile_csv: size mismatch");
    std::ofstream os = open_out(path);
    os << header << '\n';
    for (std::size_t i = 0; i < tau.size(); ++i) os << fmt(tau[i]) << ',' << fmt(value[i]) << '\n';
}

std::pair<std::vector<double>, std::vector<double>> read_profile_csv(const std::string& path) {
    const auto rows = read_rows(path, 2, "profile csv");
    std::pair<std::vector<double>, std::vector<double>> out;
    for (const auto& r : rows) {
        out.first.push_back(r[0]);
        out.second.push_back(r[1]);
    }
    return out;
}

// --- 3D CSV --------------------------------------------------------------------

void write_field_csv(const ScalarField& f, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "x,y,z,v\n";
    const auto& d = f.spec.dims;
    for (std::size_t k = 0; k < d[2]; ++k)
        for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t i = 0; i < d[0]; ++i) {
                const Vec3 p = f.spec.position(i, j, k);
                os << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << ',' << fmt(f.at(i, j, k))
                   << '\n';
            }
}

void write_field_csv(const VectorField& f, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "x,y,z,vx,vy,vz\n";
    const auto& d = f.spec.dims;
    for (std::size_t k = 0; k < d[2]; ++k)
        for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t i = 0; i < d[0]; ++i) {
                const Vec3 p = f.spec.position(i, j, k);
                const Vec3& v = f.at(i, j, k);
                os << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << ',' << fmt(v.x) << ','
                   << fmt(v.y) << ',' << fmt(v.z) << '\n';
            }
}

namespace {

GridSpec infer_grid(const std::vector<std::vector<double>>& rows, const char* what) {
    const std::vector<double> xs = unique_coords(rows, 0);
    const std::vector<double> ys = unique_coords(rows, 1);
    const std::vector<double> zs = unique_coords(rows, 2);
    require_uniform(xs, what);
    require_uniform(ys, what);
    require_uniform(zs, what);
    const double hx = xs[1] - xs[0];
    const double hy = ys[1] - ys[0];
    const double hz = zs[1] - zs[0];
    if (std::abs(hx - hy) > 1e-8 * hx || std::abs(hx - hz) > 1e-8 * hx)
        throw std::runtime_error(std::string(what) + ": anisotropic spacing not supported");
    GridSpec s;
    s.origin = Vec3{xs.front(), ys.front(), zs.front()};
    s.h = hx;
    s.dims = {xs.size(), ys.size(), zs.size()};
    s.validate();
    if (rows.size() != s.size())
        throw std::runtime_error(std::string(what) + ": row count does not fill the grid");
    return s;
}

std::size_t row_node_index(const GridSpec& s, const std::vector<double>& row) {
    auto snap = [&](double x, double o) {
        const double t = (x - o) / s.h;
        const long idx = std::lround(t);
        if (std::abs(t - static_cast<double>(idx)) > 1e-6)
            throw std::runtime_error("field csv: node off the inferred lattice");
        return static_cast<std::size_t>(idx);
    };
    return s.index(snap(row[0], s.origin.x), snap(row[1], s.origin.y), snap(row[2], s.origin.z));
}

} // namespace

ScalarField read_scalar_field_csv(const std::string& path) {
    const auto rows = read_rows(path, 4, "scalar field csv");
    ScalarField f(infer_grid(rows, "scalar field csv"));
    for (const auto& r : rows) f.values[row_node_index(f.spec, r)] = r[3];
    return f;
}

VectorField read_vector_field_csv(const std::string& path) {
    const auto rows = read_rows(path, 6, "vector field csv");
    VectorField f(infer_grid(rows, "vector field csv"));
    for (const auto& r : rows) f.values[row_node_index(f.spec, r)] = Vec3{r[3], r[4], r[5]};
    return f;
}

// --- half-plane CSV ---------------------------------------------------------------

void write_halfplane_csv(const HalfPlaneField& f, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "r,z,v\n";
    for (std::size_t j = 0; j < f.grid.nz; ++j)
        for (std::size_t i = 1; i < f.grid.nr; ++i)
            os << fmt(f.grid.r(i)) << ',' << fmt(f.grid.z(j)) << ',' << fmt(f.at(i, j)) << '\n';
}

HalfPlaneField read_halfplane_csv(const std::string& path) {
    const auto rows = read_rows(path, 3, "half-plane csv");
    const std::vector<double> rs = unique_coords(rows, 0);
    const std::vector<double> zs = unique_coords(rows, 1);
    require_uniform(rs, "half-plane csv (r)");
    require_uniform(zs, "half-plane csv (z)");
    const double dr = rs[1] - rs[0];
    if (std::abs(rs.front() - dr) > 1e-8 * dr)
        throw std::runtime_error("half-plane csv: first radius must equal the spacing (axis row implicit)");
    HalfPlaneGrid g;
    g.nr = rs.size() + 1;  // implicit axis node
    g.nz = zs.size();
    g.r_max = rs.back();
    g.z_max = 0.5 * (zs.back() - zs.front());
    if (std::abs(zs.back() + zs.front()) > 1e-8 * (std::abs(zs.back()) + 1.0))
        throw std::runtime_error("half-plane csv: z range must be symmetric about 0");
    g.validate();
    HalfPlaneField f(g);
    for (const auto& row : rows) {
        const std::size_t i = static_cast<std::size_t>(std::lround(row[0] / dr));
        const std::size_t j = static_cast<std::size_t>(std::lround((row[1] - zs.front()) / g.dz()));
        f.at(i, j) = row[2];
    }
    return f;
}

// --- VTK ---------------------------------------------------------------------------

namespace {

void write_vtk_header(std::ofstream& os, const GridSpec& s) {
    os << "# vtk DataFile Version 3.0\n";
    os << "lqem field\n";
    os << "ASCII\n";
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << s.dims[0] << ' ' << s.dims[1] << ' ' << s.dims[2] << '\n';
    os << "ORIGIN " << fmt(s.origin.x) << ' ' << fmt(s.origin.y) << ' ' << fmt(s.origin.z) << '\n';
    os << "SPACING " << fmt(s.h) << ' ' << fmt(s.h) << ' ' << fmt(s.h) << '\n';
    os << "POINT_DATA " << s.size() << '\n';
}

GridSpec read_vtk_header(std::ifstream& is, std::string& data_kind, std::string& name) {
    GridSpec s;
    std::string line;
    bool got_dims = false, got_origin = false, got_spacing = false;
    while (std::getline(is, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "DIMENSIONS") {
            ss >> s.dims[0] >> s.dims[1] >> s.dims[2];
            got_dims = true;
        } else if (key == "ORIGIN") {
            ss >> s.origin.x >> s.origin.y >> s.origin.z;
            got_origin = true;
        } else if (key == "SPACING") {
            double hx, hy, hz;
            ss >> hx >> hy >> hz;
            if (std::abs(hx - hy) > 1e-12 * hx || std::abs(hx - hz) > 1e-12 * hx)
                throw std::runtime_error("vtk import: anisotropic spacing not supported");
            s.h = hx;
            got_spacing = true;
        } else if (key == "SCALARS" || key == "VECTORS") {
            data_kind = key;
            ss >> name;
            if (key == "SCALARS") std::getline(is, line);  // LOOKUP_TABLE line
            break;
        }
    }
    if (!got_dims || !got_origin || !got_spacing)
        throw std::runtime_error("vtk import: missing structured-points header fields");
    s.validate();
    return s;
}

} // namespace

void write_field_vtk(const ScalarField& f, const std::string& path, const std::string& name) {
    std::ofstream os = open_out(path);
    write_vtk_header(os, f.spec);
    os << "SCALARS " << name << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (double v : f.values) os << fmt(v) << '\n';
}

void write_field_vtk(const VectorField& f, const std::string& path, const std::string& name) {
    std::ofstream os = open_out(path);
    write_vtk_header(os, f.spec);
    os << "VECTORS " << name << " double\n";
    for (const Vec3& v : f.values) os << fmt(v.x) << ' ' << fmt(v.y) << ' ' << fmt(v.z) << '\n';
}

ScalarField read_scalar_field_vtk(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string kind, name;
    GridSpec s = read_vtk_header(is, kind, name);
    if (kind != "SCALARS") throw std::runtime_error("vtk import: expected SCALARS in " + path);
    ScalarField f(s);
    for (double& v : f.values)
        if (!(is >> v)) throw std::runtime_error("vtk import: truncated scalar data in " + path);
    return f;
}

VectorField read_vector_field_vtk(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string kind, name;
    GridSpec s = read_vtk_header(is, kind, name);
    if (kind != "VECTORS") throw std::runtime_error("vtk import: expected VECTORS in " + path);
    VectorField f(s);
    for (Vec3& v : f.values)
        if (!(is >> v.x >> v.y >> v.z))
            throw std::runtime_error("vtk import: truncated vector data in " + path);
    return f;
}

void export_field(const ScalarField& f, const std::string& format, const std::string& path,
                  const std::string& name) {
    if (format == "csv") write_field_csv(f, path);
    else if (format == "vtk") write_field_vtk(f, path, name);
    else throw std::invalid_argument("export_field: unsupported format '" + format +
                                     "' (supported: csv, vtk)");
}

void export_field(const VectorField& f, const std::string& format, const std::string& path,
                  const std::string& name) {
    if (format == "csv") write_field_csv(f, path);
    else if (format == "vtk") write_field_vtk(f, path, name);
    else throw std::invalid_argument("export_field: unsupported format '" + format +
                                     "' (supported: csv, vtk)");
}

void write_gnuplot_script(const std::string& script_path, const std::string& csv_path,
                          const std::vector<std::pair<int, std::string>>& columns,
                          const std::string& xlabel, const std::string& title) {
    std::ofstream os = open_out(script_path);
    os << "set datafile separator ','\n";
    os << "set key autotitle columnhead\n";
    os << "set xlabel '" << xlabel << "'\n";
    os << "set title '" << title << "'\n";
    os << "plot ";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os << ", ";
        os << "'" << csv_path << "' using 1:" << columns[i].first << " with lines title '"
           << columns[i].second << "'";
    }
    os << '\n';
}

} // namespace lqem
