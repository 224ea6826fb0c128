#include "lqem/magneto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

#include "lqem/densities.hpp"

namespace lqem {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

/// Trapezoid weight along one axis of the lattice.
inline double axis_weight(std::size_t i, std::size_t n, double h) {
    return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

// --- element quadrature (bilinear cells, 2x2 Gauss) -------------------------

struct Element2D {
    // gauss abscissae in the unit interval and 1D shape values/derivatives
    std::array<double, 2> xi;
    Element2D() {
        xi = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    }
};

/// Internal assembly over cells. DOFs are nodes with 1 <= i <= nr-2,
/// 1 <= j <= nz-2 (u = 0 on the axis and the truncation boundary).
class Assembly2D {
public:
    Assembly2D(const HalfPlaneGrid& g, const QExponent& q) : grid_(g), q_(q) {
        dr_ = g.dr();
        dz_ = g.dz();
    }

    template <class PerGauss>
    void for_each_gauss(const std::vector<double>& u, PerGauss&& f) const {
        // cell (ci, cj) spans [r_ci, r_ci+dr] x [z_cj, z_cj+dz]; corner order
        // a = 0..3 with bit0 = +r, bit1 = +z.
        const Element2D el;
        const double w0 = 0.25 * dr_ * dz_;
        for (std::size_t cj = 0; cj + 1 < grid_.nz; ++cj) {
            for (std::size_t ci = 0; ci + 1 < grid_.nr; ++ci) {
                double uc[4];
                for (int a = 0; a < 4; ++a) {
                    const std::size_t ii = ci + (a & 1);
                    const std::size_t jj = cj + ((a >> 1) & 1);
                    uc[a] = (ii == 0) ? 0.0 : u[grid_.sindex(ii, jj)];
                }
                for (int gz = 0; gz < 2; ++gz)
                    for (int gr = 0; gr < 2; ++gr) {
                        const double xr = el.xi[gr];
                        const double xz = el.xi[gz];
                        const double rg = grid_.r(ci) + xr * dr_;
                        double shape[4], ddr[4], ddz[4];
                        for (int a = 0; a < 4; ++a) {
                            const double sr = (a & 1) ? xr : 1.0 - xr;
                            const double sz = (a & 2) ? xz : 1.0 - xz;
                            const double dsr = (a & 1) ? 1.0 : -1.0;
                            const double dsz = (a & 2) ? 1.0 : -1.0;
                            shape[a] = sr * sz;
                            ddr[a] = dsr * sz / dr_;
                            ddz[a] = sr * dsz / dz_;
                        }
                        double uval = 0.0, ur = 0.0, uz = 0.0;
                        for (int a = 0; a < 4; ++a) {
                            uval += uc[a] * shape[a];
                            ur += uc[a] * ddr[a];
                            uz += uc[a] * ddz[a];
                        }
                        const double cm = ur + uval / rg;
                        const double cz = uz;
                        f(ci, cj, rg, w0 * rg * kTwoPi, cm, cz, shape, ddr, ddz);
                    }
            }
        }
    }

    const HalfPlaneGrid& grid() const { return grid_; }
    const QExponent& q() const { return q_; }
    double dr() const { return dr_; }
    double dz() const { return dz_; }

private:
    HalfPlaneGrid grid_;
    QExponent q_;
    double dr_, dz_;
};

double nodal_pairing(const ToroidalPotential& u, const CurrentProfile& j) {
    if (j.values.empty()) return 0.0;
    const HalfPlaneGrid& g = u.grid;
    double s = 0.0;
    for (std::size_t jz = 0; jz < g.nz; ++jz) {
        const double wz = axis_weight(jz, g.nz, g.dz());
        for (std::size_t i = 1; i < g.nr; ++i) {
            const double wr = axis_weight(i, g.nr, g.dr());
            s += wz * wr * g.r(i) * j.at(i, jz) * u.at(i, jz);
        }
    }
    return kTwoPi * s;
}

/// Exact tensor (q=2) operator: 2*pi*(Ar (x) Mz + Mr (x) Kz) on interior DOFs,
/// with Ar from int (w'+w/r)(v'+v/r) r dr and Mr from int w v r dr, both on the
/// same 2-point Gauss rule as the nonlinear assembly. Solved by a DST in z and
/// tridiagonal (Thomas) solves in r; used as the descent preconditioner.
class QuadraticSolver {
public:
    QuadraticSolver(const HalfPlaneGrid& g) : grid_(g) {
        mr_ = grid_.nr - 2;  // interior radial DOFs i=1..nr-2
        mz_ = grid_.nz - 2;
        const double dr = grid_.dr();
        const double dz = grid_.dz();
        const double x0 = 0.5 - 0.5 / std::sqrt(3.0);
        const double x1 = 0.5 + 0.5 / std::sqrt(3.0);

        // 1D radial matrices over elements [r_e, r_e + dr], e = 0..nr-2.
        Ar_diag_.assign(mr_, 0.0);
        Ar_off_.assign(mr_ > 0 ? mr_ - 1 : 0, 0.0);
        Mr_diag_.assign(mr_, 0.0);
        Mr_off_.assign(mr_ > 0 ? mr_ - 1 : 0, 0.0);
        for (std::size_t e = 0; e + 1 < grid_.nr; ++e) {
            for (double x : {x0, x1}) {
                const double rg = grid_.r(e) + x * dr;
                const double w = 0.5 * dr * rg;
                const double nL = 1.0 - x, nR = x;
                const double aL = -1.0 / dr + nL / rg;
                const double aR = 1.0 / dr + nR / rg;
                // local nodes: left = e, right = e+1; DOF index = i-1
                auto add = [&](std::size_t gi, std::size_t gj, double va, double vm) {
                    if (gi == 0 || gi == grid_.nr - 1 || gj == 0 || gj == grid_.nr - 1) return;
                    const std::size_t a = gi - 1, b = gj - 1;
                    if (a == b) {
                        Ar_diag_[a] += va;
                        Mr_diag_[a] += vm;
                    } else if (a + 1 == b) {
                        Ar_off_[a] += va;
                        Mr_off_[a] += vm;
                    } else if (b + 1 == a) {
                        Ar_off_[b] += va;
                        Mr_off_[b] += vm;
                    }
                };
                add(e, e, w * aL * aL, w * nL * nL);
                add(e + 1, e + 1, w * aR * aR, w * nR * nR);
                add(e, e + 1, w * aL * aR, w * nL * nR);
            }
        }

        kz_.resize(mz_);
        muz_.resize(mz_);
        for (std::size_t k = 0; k < mz_; ++k) {
            const double th = kPi * static_cast<double>(k + 1) / static_cast<double>(mz_ + 1);
            kz_[k] = (2.0 / dz) * (1.0 - std::cos(th));
            muz_[k] = (dz / 6.0) * (4.0 + 2.0 * std::cos(th));
        }
        norm_ = 1.0 / (2.0 * static_cast<double>(mz_ + 1));

        work_.assign(mr_ * mz_, 0.0);
        int n = static_cast<int>(mz_);
        plan_ = fftw_plan_many_r2r(1, &n, static_cast<int>(mr_), work_.data(), nullptr, 1, n,
                                   work_.data(), nullptr, 1, n, &kKind, FFTW_MEASURE);
        if (!plan_) throw std::runtime_error("QuadraticSolver: fftw plan failed");
    }

    ~QuadraticSolver() {
        if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
    QuadraticSolver(const QuadraticSolver&) = delete;
    QuadraticSolver& operator=(const QuadraticSolver&) = delete;

    /// Solves (2*pi)(Ar(x)Mz + Mr(x)Kz) x = b on stored-layout nodal arrays.
    void solve(const std::vector<double>& b, std::vector<double>& x) const {
        const HalfPlaneGrid& g = grid_;
        // gather interior: line a = i-1 holds the z-profile of radius i
        for (std::size_t a = 0; a < mr_; ++a)
            for (std::size_t k = 0; k < mz_; ++k)
                work_[a * mz_ + k] = b[g.sindex(a + 1, k + 1)];
        fftw_execute_r2r(static_cast<fftw_plan>(plan_), work_.data(), work_.data());

        std::vector<double> diag(mr_), off(mr_ > 0 ? mr_ - 1 : 0), rhs(mr_), sol(mr_);
        for (std::size_t k = 0; k < mz_; ++k) {
            for (std::size_t a = 0; a < mr_; ++a) {
                diag[a] = kTwoPi * (Ar_diag_[a] * muz_[k] + Mr_diag_[a] * kz_[k]);
                rhs[a] = work_[a * mz_ + k];
            }
            for (std::size_t a = 0; a + 1 < mr_; ++a)
                off[a] = kTwoPi * (Ar_off_[a] * muz_[k] + Mr_off_[a] * kz_[k]);
            thomas(diag, off, rhs, sol);
            for (std::size_t a = 0; a < mr_; ++a) work_[a * mz_ + k] = sol[a];
        }

        fftw_execute_r2r(static_cast<fftw_plan>(plan_), work_.data(), work_.data());
        x.assign(g.stored(), 0.0);
        for (std::size_t a = 0; a < mr_; ++a)
            for (std::size_t k = 0; k < mz_; ++k)
                x[g.sindex(a + 1, k + 1)] = work_[a * mz_ + k] * norm_;
    }

private:
    static void thomas(std::vector<double> diag, const std::vector<double>& off,
                       std::vector<double> rhs, std::vector<double>& sol) {
        const std::size_t n = diag.size();
        for (std::size_t a = 1; a < n; ++a) {
            const double m = off[a - 1] / diag[a - 1];
            diag[a] -= m * off[a - 1];
            rhs[a] -= m * rhs[a - 1];
        }
        sol.resize(n);
        sol[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t a = n - 1; a-- > 0;)
            sol[a] = (rhs[a] - off[a] * sol[a + 1]) / diag[a];
    }

    HalfPlaneGrid grid_;
    std::size_t mr_ = 0, mz_ = 0;
    std::vector<double> Ar_diag_, Ar_off_, Mr_diag_, Mr_off_;
    std::vector<double> kz_, muz_;
    mutable std::vector<double> work_;
    void* plan_ = nullptr;
    double norm_ = 1.0;
    static inline fftw_r2r_kind kKind = FFTW_RODFT00;
};

void zero_dirichlet(const HalfPlaneGrid& g, std::vector<double>& nodal) {
    for (std::size_t j = 0; j < g.nz; ++j) {
        nodal[g.sindex(g.nr - 1, j)] = 0.0;
        if (j == 0 || j == g.nz - 1)
            for (std::size_t i = 1; i < g.nr; ++i) nodal[g.sindex(i, j)] = 0.0;
    }
}

double dot_all(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
    return s;
}

} // namespace

// --- types -------------------------------------------------------------------

void HalfPlaneGrid::validate() const {
    if (!(r_max > 0.0) || !(z_max > 0.0)) throw std::invalid_argument("HalfPlaneGrid: bad extents");
    if (nr < 4 || nz < 4) throw std::invalid_argument("HalfPlaneGrid: needs at least 4 nodes per axis");
}

bool HalfPlaneGrid::same_as(const HalfPlaneGrid& o) const {
    return nr == o.nr && nz == o.nz && std::abs(r_max - o.r_max) <= 1e-12 * r_max &&
           std::abs(z_max - o.z_max) <= 1e-12 * z_max;
}

void HalfPlaneField::fill_from(const std::function<double(double, double)>& f) {
    for (std::size_t j = 0; j < grid.nz; ++j)
        for (std::size_t i = 1; i < grid.nr; ++i)
            values[grid.sindex(i, j)] = f(grid.r(i), grid.z(j));
}

void HalfPlaneField::validate() const {
    grid.validate();
    if (values.size() != grid.stored()) throw std::invalid_argument("HalfPlaneField: size mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("HalfPlaneField: non-finite value");
}

// --- nodal operations ----------------------------------------------------------

std::pair<HalfPlaneField, HalfPlaneField> reduced_curl(const ToroidalPotential& u) {
    u.validate();
    const HalfPlaneGrid& g = u.grid;
    HalfPlaneField cz(g), cm(g);
    const double dr = g.dr();
    const double dz = g.dz();
    for (std::size_t j = 0; j < g.nz; ++j) {
        for (std::size_t i = 1; i < g.nr; ++i) {
            double duz;
            if (j == 0)
                duz = (u.at(i, 1) - u.at(i, 0)) / dz;
            else if (j == g.nz - 1)
                duz = (u.at(i, j) - u.at(i, j - 1)) / dz;
            else
                duz = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * dz);
            cz.at(i, j) = duz;

            double dur;
            if (i == g.nr - 1)
                dur = (u.at(i, j) - u.at(i - 1, j)) / dr;
            else
                dur = (u.value(i + 1, j) - u.value(i - 1, j)) / (2.0 * dr);
            cm.at(i, j) = dur + u.at(i, j) / g.r(i);
        }
    }
    return {std::move(cz), std::move(cm)};
}

double energy_J(const ToroidalPotential& u, const CurrentProfile& j, const QExponent& q) {
    u.validate();
    if (!j.values.empty() && !j.grid.same_as(u.grid))
        throw std::invalid_argument("energy_J: current grid mismatch");
    const auto [cz, cm] = reduced_curl(u);
    const HalfPlaneGrid& g = u.grid;
    double s = 0.0;
    for (std::size_t jz = 0; jz < g.nz; ++jz) {
        const double wz = axis_weight(jz, g.nz, g.dz());
        for (std::size_t i = 1; i < g.nr; ++i) {
            const double wr = axis_weight(i, g.nr, g.dr());
            const double c2 = cz.at(i, jz) * cz.at(i, jz) + cm.at(i, jz) * cm.at(i, jz);
            const double jj = j.values.empty() ? 0.0 : j.at(i, jz);
            s += wz * wr * g.r(i) * (magneto_density_mag2(c2, q) - jj * u.at(i, jz));
        }
    }
    return kTwoPi * s;
}

double energy_J_element(const ToroidalPotential& u, const CurrentProfile& j, const QExponent& q) {
    Assembly2D asmbl(u.grid, q);
    double density = 0.0;
    asmbl.for_each_gauss(u.values, [&](std::size_t, std::size_t, double, double w, double cm,
                                       double cz, const double*, const double*, const double*) {
        density += w * magneto_density_mag2(cm * cm + cz * cz, q);
    });
    return density - nodal_pairing(u, j);
}

std::vector<double> energy_J_gradient(const ToroidalPotential& u, const CurrentProfile& j,
                                      const QExponent& q) {
    const HalfPlaneGrid& g = u.grid;
    Assembly2D asmbl(g, q);
    std::vector<double> grad(g.stored(), 0.0);
    asmbl.for_each_gauss(u.values, [&](std::size_t ci, std::size_t cj, double rg, double w,
                                       double cm, double cz, const double* shape,
                                       const double* ddr, const double* ddz) {
        const double factor = magneto_field_factor(cm * cm + cz * cz, q);
        const double hm = factor * cm;
        const double hz = factor * cz;
        for (int a = 0; a < 4; ++a) {
            const std::size_t ii = ci + (a & 1);
            if (ii == 0) continue;
            const std::size_t jj = cj + ((a >> 1) & 1);
            grad[g.sindex(ii, jj)] += w * (hm * (ddr[a] + shape[a] / rg) + hz * ddz[a]);
        }
    });
    // linear pairing term, trapezoid weights matching nodal_pairing
    if (!j.values.empty()) {
        for (std::size_t jz = 0; jz < g.nz; ++jz) {
            const double wz = axis_weight(jz, g.nz, g.dz());
            for (std::size_t i = 1; i < g.nr; ++i) {
                const double wr = axis_weight(i, g.nr, g.dr());
                grad[g.sindex(i, jz)] -= kTwoPi * wz * wr * g.r(i) * j.at(i, jz);
            }
        }
    }
    zero_dirichlet(g, grad);
    return grad;
}

// --- minimization ----------------------------------------------------------------

std::pair<ToroidalPotential, MinimizeJReport> minimize_J(const CurrentProfile& j,
                                                         const QExponent& q,
                                                         const ToroidalPotential& init,
                                                         const MinimizeJOptions& opts) {
    q.require_magneto("minimize_J");
    init.validate();
    if (!j.values.empty() && !j.grid.same_as(init.grid))
        throw std::invalid_argument("minimize_J: current grid mismatch");
    const HalfPlaneGrid& g = init.grid;

    ToroidalPotential u = init;
    zero_dirichlet(g, u.values);
    QuadraticSolver precond(g);
    MinimizeJReport report;
    report.initial_energy = energy_J(u, j, q);

    auto objective = [&](const std::vector<double>& vals) {
        ToroidalPotential tmp(g);
        tmp.values = vals;
        return energy_J_element(tmp, j, q);
    };
    auto gradient = [&](const std::vector<double>& vals, std::vector<double>& out) {
        ToroidalPotential tmp(g);
        tmp.values = vals;
        out = energy_J_gradient(tmp, j, q);
    };

    double E = objective(u.values);
    report.energy_history.push_back(E);

    std::vector<double> grad, pgrad, grad_old, dir(g.stored(), 0.0), trial;
    gradient(u.values, grad);
    precond.solve(grad, pgrad);
    double delta = dot_all(grad, pgrad);
    for (std::size_t n = 0; n < dir.size(); ++n) dir[n] = -pgrad[n];

    bool converged = false;
    std::size_t iter = 0;
    double t_prev = 1.0;
    for (; iter < opts.max_iters; ++iter) {
        const double pg_norm = std::sqrt(std::max(0.0, delta));
        report.grad_norm = pg_norm;
        const double escale = std::max({std::abs(report.initial_energy), std::abs(E), 1e-12});
        if (pg_norm < opts.tol_gradient &&
            (iter == 0 || report.energy_history.size() < 2 ||
             std::abs(report.energy_history[report.energy_history.size() - 2] - E) <
                 opts.tol_energy_rel * escale)) {
            converged = true;
            break;
        }

        // Secant line search on phi'(t) = grad(u + t d) . d. Derivatives keep
        // their resolution far below the rounding floor of the objective, so
        // the monotone guard tolerates noise-level energy wiggle.
        const double slope0 = dot_all(grad, dir);
        if (slope0 >= 0.0) {  // lost conjugacy; restart with steepest descent
            for (std::size_t n = 0; n < dir.size(); ++n) dir[n] = -pgrad[n];
        }
        double t0 = 0.0, f0 = dot_all(grad, dir);
        double t1 = t_prev > 0.0 ? t_prev : 1.0;
        double f1 = 0.0;
        trial = u.values;
        for (int ls = 0; ls < 12; ++ls) {
            trial = u.values;
            for (std::size_t n = 0; n < trial.size(); ++n) trial[n] += t1 * dir[n];
            gradient(trial, grad_old);  // reuse buffer for trial gradient
            f1 = dot_all(grad_old, dir);
            if (std::abs(f1) <= 0.05 * std::abs(f0) || std::abs(t1 - t0) < 1e-14 * t1) break;
            const double tn = t1 - f1 * (t1 - t0) / (f1 - f0);
            t0 = t1;
            f0 = f1;
            t1 = (std::isfinite(tn) && tn > 0.0) ? tn : 0.5 * t1;
        }
        const double noiseE = 32.0 * std::numeric_limits<double>::epsilon() * escale;
        double Et = objective(trial);
        int guard = 0;
        while (Et > E + noiseE && guard++ < 50) {  // convexity: small steps decrease
            t1 *= 0.5;
            trial = u.values;
            for (std::size_t n = 0; n < trial.size(); ++n) trial[n] += t1 * dir[n];
            Et = objective(trial);
        }
        if (Et > E + noiseE) break;  // stagnation
        t_prev = t1;

        u.values = trial;
        const double decrease = E - Et;
        E = Et;
        report.energy_history.push_back(E);

        grad_old = grad;
        gradient(u.values, grad);
        precond.solve(grad, pgrad);
        const double delta_new = dot_all(grad, pgrad);
        const double mixed = dot_all(grad_old, pgrad);
        double beta = (delta_new - mixed) / delta;  // preconditioned Polak-Ribiere
        if (!(beta > 0.0) || (iter % 50 == 49)) beta = 0.0;
        for (std::size_t n = 0; n < dir.size(); ++n) dir[n] = -pgrad[n] + beta * dir[n];
        delta = delta_new;

        const double escale2 = std::max({std::abs(report.initial_energy), std::abs(E), 1e-12});
        if (std::abs(decrease) < opts.tol_energy_rel * escale2 &&
            std::sqrt(std::max(0.0, delta)) < opts.tol_gradient) {
            converged = true;
            ++iter;
            break;
        }
    }

    report.iterations = iter;
    report.converged = converged;
    report.objective = E;
    report.final_energy = energy_J(u, j, q);
    report.grad_norm = std::sqrt(std::max(0.0, delta));
    return {u, report};
}

// --- lifting and 3D residuals -------------------------------------------------------

VectorField lift_toroidal(const std::function<double(double, double)>& alpha,
                          const GridSpec& grid3) {
    VectorField A(grid3);
    A.fill_from([&](const Vec3& p) {
        const double r = std::hypot(p.x, p.y);
        const double a = alpha(r, p.z);
        return Vec3{-p.y * a, p.x * a, 0.0};
    });
    return A;
}

VectorField lift_to_3d(const ToroidalPotential& u, const GridSpec& grid3) {
    u.validate();
    const HalfPlaneGrid& g = u.grid;
    const double dr = g.dr();
    const double dz = g.dz();
    auto uval = [&](std::size_t i, std::size_t j) { return u.value(i, j); };
    auto alpha = [&](double r, double z) {
        // clamp into the lattice, bilinear in (r,z); alpha = u/r continues as
        // du/dr(0,z) below the first stored radius
        const double zc = std::clamp(z, -g.z_max, g.z_max);
        double tz = (zc + g.z_max) / dz;
        std::size_t j0 = static_cast<std::size_t>(std::min(tz, static_cast<double>(g.nz - 2)));
        const double fz = tz - static_cast<double>(j0);
        const double rc = std::clamp(r, 0.0, g.r_max);
        if (rc < dr) {
            const double du0 = (uval(1, j0) * (1.0 - fz) + uval(1, j0 + 1) * fz) / dr;
            return du0;
        }
        double tr = rc / dr;
        std::size_t i0 = static_cast<std::size_t>(std::min(tr, static_cast<double>(g.nr - 2)));
        const double fr = tr - static_cast<double>(i0);
        const double uu = uval(i0, j0) * (1.0 - fr) * (1.0 - fz) + uval(i0 + 1, j0) * fr * (1.0 - fz) +
                          uval(i0, j0 + 1) * (1.0 - fr) * fz + uval(i0 + 1, j0 + 1) * fr * fz;
        return uu / rc;
    };
    return lift_toroidal(alpha, grid3);
}

double weak_residual_magneto(const VectorField& A, const VectorField& J,
                             const VectorField& Btest, const QExponent& q) {
    if (!A.spec.same_as(J.spec) || !A.spec.same_as(Btest.spec))
        throw std::invalid_argument("weak_residual_magneto: fields must share a grid");
    return weak_residual_magneto_curls(fd_curl(A), J, Btest, fd_curl(Btest), q);
}

double weak_residual_magneto_curls(const VectorField& curlA, const VectorField& J,
                                   const VectorField& Btest, const VectorField& curlBtest,
                                   const QExponent& q) {
    if (!curlA.spec.same_as(J.spec) || !curlA.spec.same_as(Btest.spec) ||
        !curlA.spec.same_as(curlBtest.spec))
        throw std::invalid_argument("weak_residual_magneto: fields must share a grid");
    const double h3 = curlA.spec.h * curlA.spec.h * curlA.spec.h;
    double s = 0.0;
    for (std::size_t n = 0; n < curlA.values.size(); ++n) {
        const Vec3& c = curlA.values[n];
        const double factor = magneto_field_factor(norm2(c), q);
        s += dot(factor * c, curlBtest.values[n]) - dot(J.values[n], Btest.values[n]);
    }
    return s * h3;
}

VectorField lift_curl_to_3d(const ToroidalPotential& u, const GridSpec& grid3) {
    u.validate();
    const auto [cz, cm] = reduced_curl(u);
    const HalfPlaneGrid& g = u.grid;
    const double dr = g.dr();
    const double dz = g.dz();
    auto sample = [&](const HalfPlaneField& f, double r, double z) {
        const double zc = std::clamp(z, -g.z_max, g.z_max);
        const double rc = std::clamp(r, dr, g.r_max);
        const double tr = rc / dr;
        const double tz = (zc + g.z_max) / dz;
        const std::size_t i0 =
            std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(tr), g.nr - 2));
        const std::size_t j0 = std::min<std::size_t>(static_cast<std::size_t>(tz), g.nz - 2);
        const double fr = tr - static_cast<double>(i0);
        const double fz = tz - static_cast<double>(j0);
        return f.at(i0, j0) * (1.0 - fr) * (1.0 - fz) + f.at(i0 + 1, j0) * fr * (1.0 - fz) +
               f.at(i0, j0 + 1) * (1.0 - fr) * fz + f.at(i0 + 1, j0 + 1) * fr * fz;
    };
    VectorField out(grid3);
    out.fill_from([&](const Vec3& p) {
        const double r = std::hypot(p.x, p.y);
        const double axial = sample(cm, r, p.z);
        // below the first stored radius cz ~ r dz[alpha](0,z), so cz/r
        // continues as cz(dr,z)/dr
        const double mer = sample(cz, r, p.z) / std::max(r, dr);
        return Vec3{-p.x * mer, -p.y * mer, axial};
    });
    return out;
}

std::pair<VectorField, VectorField> lift_toroidal_with_curl(
    const std::function<double(double, double)>& alpha,
    const std::function<double(double, double)>& dr_alpha,
    const std::function<double(double, double)>& dz_alpha, const GridSpec& grid3) {
    VectorField field = lift_toroidal(alpha, grid3);
    VectorField curl(grid3);
    curl.fill_from([&](const Vec3& p) {
        const double r = std::hypot(p.x, p.y);
        const double dza = dz_alpha(r, p.z);
        return Vec3{-p.x * dza, -p.y * dza, 2.0 * alpha(r, p.z) + r * dr_alpha(r, p.z)};
    });
    return {std::move(field), std::move(curl)};
}

double coercivity_probe(const ToroidalPotential& u, const QExponent& q,
                        const std::vector<double>& t_list) {
    if (t_list.size() < 4)
        throw std::invalid_argument("coercivity_probe: need at least 4 scaling samples");
    double tmax = 0.0;
    for (double t : t_list) {
        if (!(t > 0.0)) throw std::invalid_argument("coercivity_probe: t must be positive");
        tmax = std::max(tmax, t);
    }
    CurrentProfile nocurrent;
    std::vector<double> lx, ly;
    for (double t : t_list) {
        if (t < 0.1 * tmax) continue;  // largest decade
        ToroidalPotential tu = u;
        for (double& v : tu.values) v *= t;
        const double e = energy_J(tu, nocurrent, q);
        if (!(e > 0.0)) continue;
        lx.push_back(std::log(t));
        ly.push_back(std::log(e));
    }
    if (lx.size() < 2) throw std::invalid_argument("coercivity_probe: degenerate scaling data");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t n = 0; n < lx.size(); ++n) {
        sx += lx[n];
        sy += ly[n];
        sxx += lx[n] * lx[n];
        sxy += lx[n] * ly[n];
    }
    const double m = static_cast<double>(lx.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace lqem
