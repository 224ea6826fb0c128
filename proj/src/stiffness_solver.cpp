#include "lqem/stiffness_solver.hpp"

#include <cmath>
#include <stdexcept>

#include <fftw3.h>

namespace lqem {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

StiffnessSolver::StiffnessSolver(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    for (std::size_t d = 0; d < 3; ++d) m_[d] = spec_.dims[d] - 2;
    const std::size_t n = m_[0] * m_[1] * m_[2];
    work_.assign(n, 0.0);
    inv_eigen_.assign(n, 0.0);
    eigen_.assign(n, 0.0);

    const double h = spec_.h;
    auto stiff = [&](std::size_t k, std::size_t m) {
        const double th = kPi * static_cast<double>(k + 1) / static_cast<double>(m + 1);
        return (2.0 / h) * (1.0 - std::cos(th));
    };
    auto mass = [&](std::size_t k, std::size_t m) {
        const double th = kPi * static_cast<double>(k + 1) / static_cast<double>(m + 1);
        return (h / 6.0) * (4.0 + 2.0 * std::cos(th));
    };
    for (std::size_t k3 = 0; k3 < m_[2]; ++k3)
        for (std::size_t k2 = 0; k2 < m_[1]; ++k2)
            for (std::size_t k1 = 0; k1 < m_[0]; ++k1) {
                const double lam = stiff(k1, m_[0]) * mass(k2, m_[1]) * mass(k3, m_[2]) +
                                   mass(k1, m_[0]) * stiff(k2, m_[1]) * mass(k3, m_[2]) +
                                   mass(k1, m_[0]) * mass(k2, m_[1]) * stiff(k3, m_[2]);
                const std::size_t idx = (k3 * m_[1] + k2) * m_[0] + k1;
                eigen_[idx] = lam;
                inv_eigen_[idx] = 1.0 / lam;
            }

    norm_ = 1.0 / (8.0 * static_cast<double>(m_[0] + 1) * static_cast<double>(m_[1] + 1) *
                   static_cast<double>(m_[2] + 1));
    // In-place 3D DST-I on the interior block. FFTW r2r dims are slowest-first.
    plan_ = fftw_plan_r2r_3d(static_cast<int>(m_[2]), static_cast<int>(m_[1]),
                             static_cast<int>(m_[0]), work_.data(), work_.data(),
                             FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00, FFTW_MEASURE);
    if (!plan_) throw std::runtime_error("StiffnessSolver: fftw plan creation failed");
}

StiffnessSolver::~StiffnessSolver() {
    if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void StiffnessSolver::gather(const std::vector<double>& full, std::vector<double>& interior) const {
    for (std::size_t k = 0; k < m_[2]; ++k)
        for (std::size_t j = 0; j < m_[1]; ++j) {
            const double* src = &full[spec_.index(1, j + 1, k + 1)];
            double* dst = &interior[(k * m_[1] + j) * m_[0]];
            for (std::size_t i = 0; i < m_[0]; ++i) dst[i] = src[i];
        }
}

void StiffnessSolver::scatter(const std::vector<double>& interior, std::vector<double>& full) const {
    full.assign(spec_.size(), 0.0);
    for (std::size_t k = 0; k < m_[2]; ++k)
        for (std::size_t j = 0; j < m_[1]; ++j) {
            const double* src = &interior[(k * m_[1] + j) * m_[0]];
            double* dst = &full[spec_.index(1, j + 1, k + 1)];
            for (std::size_t i = 0; i < m_[0]; ++i) dst[i] = src[i];
        }
}

void StiffnessSolver::solve(const std::vector<double>& b, std::vector<double>& x) const {
    if (b.size() != spec_.size()) throw std::invalid_argument("StiffnessSolver::solve: size mismatch");
    gather(b, work_);
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), work_.data(), work_.data());
    for (std::size_t idx = 0; idx < work_.size(); ++idx) work_[idx] *= inv_eigen_[idx] * norm_;
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), work_.data(), work_.data());
    scatter(work_, x);
}

void StiffnessSolver::apply(const std::vector<double>& x, std::vector<double>& out) const {
    if (x.size() != spec_.size()) throw std::invalid_argument("StiffnessSolver::apply: size mismatch");
    gather(x, work_);
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), work_.data(), work_.data());
    for (std::size_t idx = 0; idx < work_.size(); ++idx) work_[idx] *= eigen_[idx] * norm_;
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), work_.data(), work_.data());
    scatter(work_, out);
}

} // namespace lqem
