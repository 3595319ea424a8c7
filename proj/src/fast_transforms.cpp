#include "swimsim/fast_transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace swimsim {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct SeparableSolver::Plans {
    double* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buffer) fftw_free(buffer);
    }
};

SeparableSolver::SeparableSolver(std::array<int, 3> dims, std::array<AxisBc, 3> bcs, std::array<double, 3> spacing)
    : dims_(dims), plans_(std::make_unique<Plans>()) {
    std::array<fftw_r2r_kind, 3> fwd{}, bwd{};
    for (int a = 0; a < 3; ++a) {
        const int n = dims[a];
        if (n < 1) throw std::invalid_argument("SeparableSolver: empty axis");
        const double h2 = spacing[a] * spacing[a];
        eigen_[a].resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            double theta = 0.0;
            switch (bcs[a]) {
                case AxisBc::Neumann: theta = std::numbers::pi * k / (2.0 * n); break;
                case AxisBc::DirichletCell: theta = std::numbers::pi * (k + 1) / (2.0 * n); break;
                case AxisBc::DirichletNode: theta = std::numbers::pi * (k + 1) / (2.0 * (n + 1)); break;
            }
            const double s = std::sin(theta);
            eigen_[a][k] = -4.0 * s * s / h2;
        }
        switch (bcs[a]) {
            case AxisBc::Neumann:
                fwd[a] = FFTW_REDFT10;
                bwd[a] = FFTW_REDFT01;
                normalisation_ *= 2.0 * n;
                break;
            case AxisBc::DirichletCell:
                fwd[a] = FFTW_RODFT10;
                bwd[a] = FFTW_RODFT01;
                normalisation_ *= 2.0 * n;
                break;
            case AxisBc::DirichletNode:
                fwd[a] = FFTW_RODFT00;
                bwd[a] = FFTW_RODFT00;
                normalisation_ *= 2.0 * (n + 1);
                break;
        }
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->buffer = static_cast<double*>(fftw_malloc(sizeof(double) * size()));
    if (!plans_->buffer) throw std::bad_alloc();
    plans_->forward = fftw_plan_r2r_3d(dims[0], dims[1], dims[2], plans_->buffer, plans_->buffer, fwd[0], fwd[1], fwd[2],
                                       FFTW_ESTIMATE);
    plans_->backward = fftw_plan_r2r_3d(dims[0], dims[1], dims[2], plans_->buffer, plans_->buffer, bwd[0], bwd[1],
                                        bwd[2], FFTW_ESTIMATE);
    if (!plans_->forward || !plans_->backward) throw std::runtime_error("SeparableSolver: FFTW planning failed");
}

SeparableSolver::~SeparableSolver() = default;
SeparableSolver::SeparableSolver(SeparableSolver&&) noexcept = default;
SeparableSolver& SeparableSolver::operator=(SeparableSolver&&) noexcept = default;

std::size_t SeparableSolver::size() const {
    return static_cast<std::size_t>(dims_[0]) * static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(dims_[2]);
}

void SeparableSolver::solve(std::span<double> data, double alpha, double beta) {
    if (data.size() != size()) throw std::invalid_argument("SeparableSolver: size mismatch");
    double* buf = plans_->buffer;
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(plans_->forward);
    std::size_t n = 0;
    for (int i = 0; i < dims_[0]; ++i)
        for (int j = 0; j < dims_[1]; ++j)
            for (int k = 0; k < dims_[2]; ++k, ++n) {
                const double denom = alpha - beta * (eigen_[0][i] + eigen_[1][j] + eigen_[2][k]);
                buf[n] = denom == 0.0 ? 0.0 : buf[n] / (denom * normalisation_);
            }
    fftw_execute(plans_->backward);
    std::copy(buf, buf + size(), data.begin());
}

}  // namespace swimsim
