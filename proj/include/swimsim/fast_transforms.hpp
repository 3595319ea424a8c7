#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace swimsim {

/// Boundary treatment of the 3-point second difference along one axis.
enum class AxisBc {
    Neumann,        ///< cell-centred unknowns, zero flux at the walls (DCT-II basis)
    DirichletCell,  ///< cell-centred unknowns, zero value on the wall via odd reflection (DST-II basis)
    DirichletNode,  ///< node unknowns strictly inside, zero value at the two end nodes (DST-I basis)
};

/// Direct solver for (alpha I - beta Δ_h) x = b on a tensor grid, where Δ_h is the
/// 7-point Laplacian with per-axis boundary treatment. Diagonalised by real-to-real
/// FFTs. Owns its plans and work buffer, so one instance must not be used from two
/// threads at once.
class SeparableSolver {
public:
    SeparableSolver(std::array<int, 3> dims, std::array<AxisBc, 3> bcs, std::array<double, 3> spacing);
    ~SeparableSolver();
    SeparableSolver(SeparableSolver&&) noexcept;
    SeparableSolver& operator=(SeparableSolver&&) noexcept;
    SeparableSolver(const SeparableSolver&) = delete;
    SeparableSolver& operator=(const SeparableSolver&) = delete;

    /// In place. With alpha == 0 and an all-Neumann operator the constant mode is set to zero.
    void solve(std::span<double> data, double alpha, double beta);

    const std::array<int, 3>& dims() const { return dims_; }
    std::size_t size() const;

private:
    struct Plans;
    std::array<int, 3> dims_;
    std::array<std::vector<double>, 3> eigen_;  // eigenvalues of the 1-D second difference
    double normalisation_ = 1.0;
    std::unique_ptr<Plans> plans_;
};

}  // namespace swimsim
