#include "lqem/electro_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lqem/stiffness_solver.hpp"

namespace lqem {

namespace {

constexpr double kProjTrigger = 1e-10;  // relative slack below which a point is projected
constexpr double kProjMargin = 1e-8;    // relative slack restored by the projection
constexpr double kIterFloor = 1e-12;    // relative slack every iterate must keep

/// Trilinear element tables at the 2x2x2 Gauss points of the unit cell.
struct ElementTables {
    std::array<std::array<Vec3, 8>, 8> grad;   // [gauss][node], physical units (1/h)
    std::array<std::array<double, 8>, 8> shape;
    std::array<Vec3, 8> xi;                    // gauss coordinates in the unit cell

    explicit ElementTables(double h) {
        const double lo = 0.5 - 0.5 / std::sqrt(3.0);
        const double hi = 0.5 + 0.5 / std::sqrt(3.0);
        for (int g = 0; g < 8; ++g) {
            const double gx = (g & 1) ? hi : lo;
            const double gy = (g & 2) ? hi : lo;
            const double gz = (g & 4) ? hi : lo;
            xi[g] = Vec3{gx, gy, gz};
            for (int a = 0; a < 8; ++a) {
                const double sx = (a & 1) ? gx : 1.0 - gx;
                const double sy = (a & 2) ? gy : 1.0 - gy;
                const double sz = (a & 4) ? gz : 1.0 - gz;
                const double dx = (a & 1) ? 1.0 : -1.0;
                const double dy = (a & 2) ? 1.0 : -1.0;
                const double dz = (a & 4) ? 1.0 : -1.0;
                shape[g][a] = sx * sy * sz;
                grad[g][a] = Vec3{dx * sy * sz / h, sx * dy * sz / h, sx * sy * dz / h};
            }
        }
    }
};

/// Per-solve workspace: cached quadrature-point B values and cell topology.
class Assembly {
public:
    explicit Assembly(const ElectroGridProblem& prob) : prob_(prob), tables_(prob.spec.h) {
        const auto& d = prob.spec.dims;
        cdims_ = {d[0] - 1, d[1] - 1, d[2] - 1};
        ncells_ = cdims_[0] * cdims_[1] * cdims_[2];
        const double h = prob.spec.h;
        w_ = h * h * h / 8.0;
        corner_off_ = {0,
                       1,
                       d[0],
                       d[0] + 1,
                       d[0] * d[1],
                       d[0] * d[1] + 1,
                       d[0] * d[1] + d[0],
                       d[0] * d[1] + d[0] + 1};
        Bq_.resize(ncells_ * 8);
        B2_.resize(ncells_ * 8);
        std::size_t c = 0;
        for (std::size_t k = 0; k < cdims_[2]; ++k)
            for (std::size_t j = 0; j < cdims_[1]; ++j)
                for (std::size_t i = 0; i < cdims_[0]; ++i, ++c) {
                    const Vec3 base = prob.spec.position(i, j, k);
                    for (int g = 0; g < 8; ++g) {
                        const Vec3 p = base + h * tables_.xi[g];
                        const Vec3 B = prob.B_at(p);
                        Bq_[c * 8 + g] = B;
                        B2_[c * 8 + g] = norm2(B);
                    }
                }
    }

    std::size_t ncells() const { return ncells_; }
    double weight() const { return w_; }
    const ElementTables& tables() const { return tables_; }
    const Vec3& B_gp(std::size_t c, int g) const { return Bq_[c * 8 + g]; }
    double B2(std::size_t c, int g) const { return B2_[c * 8 + g]; }
    std::size_t corner_index(std::size_t base, int a) const { return base + corner_off_[a]; }
    const ElectroGridProblem& prob() const { return prob_; }

    std::size_t cell_base(std::size_t c) const {
        const std::size_t i = c % cdims_[0];
        const std::size_t j = (c / cdims_[0]) % cdims_[1];
        const std::size_t k = c / (cdims_[0] * cdims_[1]);
        return prob_.spec.index(i, j, k);
    }

    Vec3 cell_center(std::size_t c) const {
        const std::size_t i = c % cdims_[0];
        const std::size_t j = (c / cdims_[0]) % cdims_[1];
        const std::size_t k = c / (cdims_[0] * cdims_[1]);
        return prob_.spec.position(i, j, k) + (0.5 * prob_.spec.h) * Vec3{1.0, 1.0, 1.0};
    }

    std::string cell_name(std::size_t c) const {
        const std::size_t i = c % cdims_[0];
        const std::size_t j = (c / cdims_[0]) % cdims_[1];
        const std::size_t k = c / (cdims_[0] * cdims_[1]);
        std::ostringstream os;
        os << "(" << i << "," << j << "," << k << ")";
        return os.str();
    }

    void load_corners(const std::vector<double>& phi, std::size_t base, double* out) const {
        for (int a = 0; a < 8; ++a) out[a] = phi[base + corner_off_[a]];
    }

    Vec3 gauss_gradient(const double* corners, int g) const {
        Vec3 gr{};
        for (int a = 0; a < 8; ++a) gr += corners[a] * tables_.grad[g][a];
        return gr;
    }

    void zero_boundary(std::vector<double>& nodal) const {
        const auto& d = prob_.spec.dims;
        for (std::size_t k = 0; k < d[2]; ++k)
            for (std::size_t j = 0; j < d[1]; ++j)
                for (std::size_t i = 0; i < d[0]; ++i)
                    if (prob_.spec.on_boundary(i, j, k)) nodal[prob_.spec.index(i, j, k)] = 0.0;
    }

private:
    const ElectroGridProblem& prob_;
    ElementTables tables_;
    std::array<std::size_t, 3> cdims_{};
    std::size_t ncells_ = 0;
    double w_ = 0.0;
    std::array<std::size_t, 8> corner_off_{};
    std::vector<Vec3> Bq_;
    std::vector<double> B2_;
};

double pairing(const ElectroGridProblem& prob, const std::vector<double>& phi) {
    const double h3 = prob.spec.h * prob.spec.h * prob.spec.h;
    double s = 0.0;
    for (std::size_t n = 0; n < phi.size(); ++n) s += prob.rho.values[n] * phi[n];
    return s * h3;
}

double energy_raw(const Assembly& asmbl, const std::vector<double>& phi) {
    const QExponent& q = asmbl.prob().q;
    const double qh = q.half();
    double corners[8];
    double density_sum = 0.0;
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        asmbl.load_corners(phi, asmbl.cell_base(c), corners);
        for (int g = 0; g < 8; ++g) {
            const Vec3 gr = asmbl.gauss_gradient(corners, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double gb = dot(gr, B);
            double ds = asmbl.B2(c, g) - norm2(gr) - gb * gb;
            if (ds < -1.0) {
                if (ds < -1.0 - kSlackClamp) {
                    std::ostringstream os;
                    os << "energy_IB_grid: inadmissible gradient at cell " << asmbl.cell_name(c)
                       << " quadrature point " << g << " (slack=" << 1.0 + ds << ")";
                    throw std::domain_error(os.str());
                }
                ds = -1.0;
            }
            density_sum -= pow1p_m1(ds, qh);
        }
    }
    return asmbl.weight() * density_sum / q.value() - pairing(asmbl.prob(), phi);
}

void gradient_raw(const Assembly& asmbl, const std::vector<double>& phi, std::vector<double>& grad) {
    const ElectroGridProblem& prob = asmbl.prob();
    const double qh = prob.q.half();
    const double w = asmbl.weight();
    const double h3 = prob.spec.h * prob.spec.h * prob.spec.h;
    grad.assign(prob.spec.size(), 0.0);
    double corners[8];
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        const std::size_t base = asmbl.cell_base(c);
        asmbl.load_corners(phi, base, corners);
        const auto& gradN = asmbl.tables().grad;
        for (int g = 0; g < 8; ++g) {
            const Vec3 gr = asmbl.gauss_gradient(corners, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double gb = dot(gr, B);
            const double ds = asmbl.B2(c, g) - norm2(gr) - gb * gb;
            if (1.0 + ds < kSlackMin) {
                std::ostringstream os;
                os << "energy gradient: flux undefined (slack=" << 1.0 + ds << ") at cell "
                   << asmbl.cell_name(c);
                throw std::domain_error(os.str());
            }
            const Vec3 D = pow1p(ds, qh - 1.0) * (gr + gb * B);
            for (int a = 0; a < 8; ++a)
                grad[asmbl.corner_index(base, a)] += w * dot(D, gradN[g][a]);
        }
    }
    for (std::size_t n = 0; n < grad.size(); ++n) grad[n] -= h3 * prob.rho.values[n];
    asmbl.zero_boundary(grad);
}

/// Minimum over quadrature points of slack / (1 + |B|^2).
double min_rel_slack(const Assembly& asmbl, const std::vector<double>& phi) {
    double corners[8];
    double m = 1.0;
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        asmbl.load_corners(phi, asmbl.cell_base(c), corners);
        for (int g = 0; g < 8; ++g) {
            const Vec3 gr = asmbl.gauss_gradient(corners, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double gb = dot(gr, B);
            const double r = 1.0 + asmbl.B2(c, g);
            m = std::min(m, (r - norm2(gr) - gb * gb) / r);
        }
    }
    return m;
}

/// Builds the projected quadrature-point gradient targets of phi. Returns the
/// number of projected points (0 means phi is safely feasible as-is).
std::size_t build_targets(const Assembly& asmbl, const std::vector<double>& phi,
                          std::vector<Vec3>& targets) {
    targets.resize(asmbl.ncells() * 8);
    double corners[8];
    std::size_t projected = 0;
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        asmbl.load_corners(phi, asmbl.cell_base(c), corners);
        for (int g = 0; g < 8; ++g) {
            const Vec3 gr = asmbl.gauss_gradient(corners, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double gb = dot(gr, B);
            const double r = 1.0 + asmbl.B2(c, g);
            const double s = r - norm2(gr) - gb * gb;
            if (s < kProjTrigger * r) {
                targets[c * 8 + g] = project_ellipsoid_scaled(gr, B, 1.0 - kProjMargin);
                ++projected;
            } else {
                targets[c * 8 + g] = gr;
            }
        }
    }
    return projected;
}

void assemble_divergence(const Assembly& asmbl, const std::vector<Vec3>& targets,
                         std::vector<double>& out) {
    out.assign(asmbl.prob().spec.size(), 0.0);
    const double w = asmbl.weight();
    const auto& gradN = asmbl.tables().grad;
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        const std::size_t base = asmbl.cell_base(c);
        for (int g = 0; g < 8; ++g) {
            const Vec3& T = targets[c * 8 + g];
            for (int a = 0; a < 8; ++a)
                out[asmbl.corner_index(base, a)] += w * dot(T, gradN[g][a]);
        }
    }
    asmbl.zero_boundary(out);
}

double dot_nodal(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
    return s;
}

} // namespace

// --- projection --------------------------------------------------------------

Vec3 project_ellipsoid_scaled(const Vec3& g, const Vec3& B, double scale2) {
    ensure_finite(g, "project_ellipsoid: g");
    ensure_finite(B, "project_ellipsoid: B");
    if (!(scale2 > 0.0) || scale2 > 1.0)
        throw std::invalid_argument("project_ellipsoid_scaled: scale2 must lie in (0,1]");
    const double b2 = norm2(B);
    const double c2 = scale2 * (1.0 + b2);
    const double gb = dot(g, B);
    const double val = norm2(g) + gb * gb;
    if (val <= c2) return g;

    if (b2 < 1e-28) return g * std::sqrt(c2 / norm2(g));

    const double bn = std::sqrt(b2);
    const Vec3 e = (1.0 / bn) * B;
    const double gpar = dot(g, e);
    const Vec3 gperp = g - gpar * e;
    const double p2 = norm2(gperp);
    const double axis = 1.0 + b2;  // eigenvalue of I + B B^T along B

    // f(lambda) = axis*gpar^2/(1+lambda*axis)^2 + p2/(1+lambda)^2 - c2 is convex
    // and decreasing with f(0) > 0; Newton converges monotonically from 0.
    double lam = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double da = 1.0 + lam * axis;
        const double db = 1.0 + lam;
        const double f = axis * gpar * gpar / (da * da) + p2 / (db * db) - c2;
        if (std::abs(f) <= 1e-13 * c2) break;
        const double fp =
            -2.0 * axis * axis * gpar * gpar / (da * da * da) - 2.0 * p2 / (db * db * db);
        lam -= f / fp;
    }
    return (gpar / (1.0 + lam * axis)) * e + (1.0 / (1.0 + lam)) * gperp;
}

Vec3 project_ellipsoid(const Vec3& g, const Vec3& B) {
    return project_ellipsoid_scaled(g, B, 1.0);
}

ProjectionKkt projection_kkt_defect(const Vec3& g, const Vec3& B, const Vec3& projected) {
    ProjectionKkt r;
    const Vec3 diff = g - projected;
    if (norm(diff) <= 1e-14 * (1.0 + norm(g))) return r;
    r.moved = true;
    const double gb = dot(projected, B);
    r.boundary_slack = 1.0 + norm2(B) - norm2(projected) - gb * gb;
    const Vec3 normal = projected + gb * B;  // (I + B B^T) g'
    const double cosang = dot(diff, normal) / (norm(diff) * norm(normal));
    r.angle = std::acos(std::clamp(cosang, -1.0, 1.0));
    return r;
}

// --- problem / energy ----------------------------------------------------------

void ElectroGridProblem::validate() const {
    spec.validate();
    rho.validate();
    if (!rho.spec.same_as(spec)) throw std::invalid_argument("ElectroGridProblem: rho grid mismatch");
}

double energy_IB_grid(const ScalarField& phi, const ElectroGridProblem& prob) {
    prob.validate();
    phi.validate();
    if (!phi.spec.same_as(prob.spec)) throw std::invalid_argument("energy_IB_grid: phi grid mismatch");
    Assembly asmbl(prob);
    return energy_raw(asmbl, phi.values);
}

double energy_IB_grid_ball(const ScalarField& phi, const ElectroGridProblem& prob,
                           const Vec3& center, double radius) {
    prob.validate();
    Assembly asmbl(prob);
    const double qh = prob.q.half();
    double corners[8];
    double density_sum = 0.0;
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        if (norm(asmbl.cell_center(c) - center) > radius) continue;
        asmbl.load_corners(phi.values, asmbl.cell_base(c), corners);
        for (int g = 0; g < 8; ++g) {
            const Vec3 gr = asmbl.gauss_gradient(corners, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double gb = dot(gr, B);
            const double ds = std::max(-1.0, asmbl.B2(c, g) - norm2(gr) - gb * gb);
            density_sum -= pow1p_m1(ds, qh);
        }
    }
    const double h3 = prob.spec.h * prob.spec.h * prob.spec.h;
    double pair = 0.0;
    const auto& d = prob.spec.dims;
    for (std::size_t k = 0; k < d[2]; ++k)
        for (std::size_t j = 0; j < d[1]; ++j)
            for (std::size_t i = 0; i < d[0]; ++i)
                if (norm(prob.spec.position(i, j, k) - center) <= radius)
                    pair += prob.rho.at(i, j, k) * phi.at(i, j, k);
    return asmbl.weight() * density_sum / prob.q.value() - h3 * pair;
}

std::vector<double> energy_IB_gradient(const ScalarField& phi, const ElectroGridProblem& prob) {
    prob.validate();
    Assembly asmbl(prob);
    std::vector<double> grad;
    gradient_raw(asmbl, phi.values, grad);
    return grad;
}

ScalarField scale_into_feasibility(const ScalarField& phi, const ElectroGridProblem& prob,
                                   double margin) {
    Assembly asmbl(prob);
    double corners[8];
    double worst = 0.0;  // max of (|g|^2+(g.B)^2)/(1+|B|^2), quadratic in the scale
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        asmbl.load_corners(phi.values, asmbl.cell_base(c), corners);
        for (int g = 0; g < 8; ++g) {
            const Vec3 gr = asmbl.gauss_gradient(corners, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double gb = dot(gr, B);
            worst = std::max(worst, (norm2(gr) + gb * gb) / (1.0 + asmbl.B2(c, g)));
        }
    }
    ScalarField out = phi;
    if (worst > 1.0 - margin) {
        const double t = std::sqrt((1.0 - margin) / worst);
        for (double& v : out.values) v *= t;
    }
    return out;
}

// --- minimization --------------------------------------------------------------

std::pair<ScalarField, MinimizeIbReport> minimize_IB(const ElectroGridProblem& prob,
                                                     const ScalarField& init,
                                                     const MinimizeIbOptions& opts) {
    prob.validate();
    prob.q.require_electro("minimize_IB");
    if (!init.spec.same_as(prob.spec)) throw std::invalid_argument("minimize_IB: init grid mismatch");

    Assembly asmbl(prob);
    StiffnessSolver stiffness(prob.spec);
    MinimizeIbReport report;

    std::vector<double> phi = init.values;
    asmbl.zero_boundary(phi);
    if (min_rel_slack(asmbl, phi) < kIterFloor) {
        ScalarField tmp = init;
        tmp.values = phi;
        phi = scale_into_feasibility(tmp, prob, kProjMargin).values;
    }

    double energy = energy_raw(asmbl, phi);
    report.initial_energy = energy;
    report.energy_history.push_back(energy);

    std::vector<double> grad, pgrad, rhs, phi_new, trial;
    std::vector<Vec3> targets;
    double alpha = 1.0;
    bool converged = false;
    std::size_t iter = 0;

    for (; iter < opts.max_iters; ++iter) {
        gradient_raw(asmbl, phi, grad);
        stiffness.solve(grad, pgrad);
        const double gKg = dot_nodal(grad, pgrad);
        const double pg_norm = std::sqrt(std::max(0.0, gKg));
        report.grad_norm = pg_norm;

        const double escale = std::max({std::abs(report.initial_energy), std::abs(energy), 1e-12});
        if (pg_norm < opts.tol_gradient && iter > 0 &&
            report.energy_decrease < opts.tol_energy_rel * escale) {
            converged = true;
            break;
        }
        if (pg_norm == 0.0) {
            converged = true;
            break;
        }
        // resolution floor: once the certifiable decrease alpha*gKg drops to
        // rounding noise of the energy sum, the iterate is converged to
        // machine precision and the line search cannot make progress
        if (alpha * gKg < 64.0 * std::numeric_limits<double>::epsilon() * escale) {
            converged = true;
            break;
        }

        bool accepted = false;
        double new_energy = energy;
        for (int bt = 0; bt < 60 && !accepted; ++bt) {
            trial = phi;
            for (std::size_t n = 0; n < trial.size(); ++n) trial[n] -= alpha * pgrad[n];

            const std::size_t projected = build_targets(asmbl, trial, targets);
            report.projected_points = projected;
            if (projected == 0) {
                phi_new = trial;
            } else {
                assemble_divergence(asmbl, targets, rhs);
                stiffness.solve(rhs, phi_new);
                // Reconstruction residual |K phi - rhs| / |rhs| (spectral solve, ~eps).
                std::vector<double> check;
                stiffness.apply(phi_new, check);
                double num = 0.0, den = 0.0;
                for (std::size_t n = 0; n < rhs.size(); ++n) {
                    num += (check[n] - rhs[n]) * (check[n] - rhs[n]);
                    den += rhs[n] * rhs[n];
                }
                report.reconstruction_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
            }

            // Feasibility pullback toward the current (strictly feasible) iterate.
            double beta = 1.0;
            bool feasible = false;
            for (int pb = 0; pb < 60; ++pb) {
                trial = phi;
                for (std::size_t n = 0; n < trial.size(); ++n)
                    trial[n] += beta * (phi_new[n] - phi[n]);
                if (min_rel_slack(asmbl, trial) >= kIterFloor) {
                    feasible = true;
                    break;
                }
                beta *= 0.5;
            }
            if (!feasible) {
                alpha *= 0.5;
                continue;
            }
            phi_new = trial;
            new_energy = energy_raw(asmbl, phi_new);

            const double predicted = alpha * gKg;
            const bool smooth_step = (report.projected_points == 0);
            if ((smooth_step && new_energy <= energy - 1e-4 * predicted) ||
                (!smooth_step && new_energy < energy)) {
                accepted = true;
            } else {
                alpha *= 0.5;
                if (alpha < 1e-16) break;
            }
        }
        if (!accepted) break;  // stagnation: no step produced decrease

        report.energy_decrease = energy - new_energy;
        energy = new_energy;
        phi.swap(phi_new);
        report.energy_history.push_back(energy);
        alpha = std::min(alpha * 1.25, 1e3);

        const double escale2 = std::max({std::abs(report.initial_energy), std::abs(energy), 1e-12});
        if (report.energy_decrease < opts.tol_energy_rel * escale2 &&
            report.grad_norm < opts.tol_gradient) {
            converged = true;
            ++iter;
            break;
        }
    }

    report.iterations = iter;
    report.final_energy = energy;
    report.converged = converged;

    ScalarField out(prob.spec);
    out.values = phi;
    return {out, report};
}

// --- residuals -------------------------------------------------------------------

double weak_residual_grid(const ScalarField& phi, const ScalarField& psi,
                          const ElectroGridProblem& prob, std::size_t* excluded) {
    prob.validate();
    Assembly asmbl(prob);
    const double qh = prob.q.half();
    double corners_phi[8], corners_psi[8];
    double flux_term = 0.0;
    std::size_t skipped = 0;
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        const std::size_t base = asmbl.cell_base(c);
        asmbl.load_corners(phi.values, base, corners_phi);
        asmbl.load_corners(psi.values, base, corners_psi);
        for (int g = 0; g < 8; ++g) {
            const Vec3 gr = asmbl.gauss_gradient(corners_phi, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double gb = dot(gr, B);
            const double ds = asmbl.B2(c, g) - norm2(gr) - gb * gb;
            if (1.0 + ds < kSlackMin) {
                ++skipped;
                continue;
            }
            const Vec3 D = pow1p(ds, qh - 1.0) * (gr + gb * B);
            flux_term += asmbl.weight() * dot(D, asmbl.gauss_gradient(corners_psi, g));
        }
    }
    if (excluded) *excluded = skipped;
    return flux_term - pairing(prob, psi.values);
}

VariationalInequalityResult variational_inequality_check(const ScalarField& phi,
                                                         const ScalarField& psi,
                                                         const ElectroGridProblem& prob,
                                                         double tol_rel) {
    prob.validate();
    Assembly asmbl(prob);
    const double qh = prob.q.half();
    double corners_phi[8], corners_psi[8];
    VariationalInequalityResult res;
    for (std::size_t c = 0; c < asmbl.ncells(); ++c) {
        const std::size_t base = asmbl.cell_base(c);
        asmbl.load_corners(phi.values, base, corners_phi);
        asmbl.load_corners(psi.values, base, corners_psi);
        for (int g = 0; g < 8; ++g) {
            const Vec3 gphi = asmbl.gauss_gradient(corners_phi, g);
            const Vec3 gpsi = asmbl.gauss_gradient(corners_psi, g);
            const Vec3& B = asmbl.B_gp(c, g);
            const double pb = dot(gphi, B);
            const double sb = dot(gpsi, B);
            const double ds = asmbl.B2(c, g) - norm2(gphi) - pb * pb;
            const double num = norm2(gphi) + pb * pb - dot(gphi, gpsi) - pb * sb;
            if (num == 0.0) continue;  // equality case contributes nothing
            if (1.0 + ds < kSlackMin) {
                ++res.excluded;
                continue;
            }
            res.lhs += asmbl.weight() * num * pow1p(ds, qh - 1.0);
        }
    }
    const double pphi = pairing(prob, phi.values);
    const double ppsi = pairing(prob, psi.values);
    res.rhs = pphi - ppsi;
    res.tolerance = tol_rel * (1.0 + std::abs(pphi) + std::abs(ppsi));
    res.ok = res.lhs <= res.rhs + res.tolerance;
    return res;
}

} // namespace lqem
