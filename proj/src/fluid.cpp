#include "swimsim/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "swimsim/errors.hpp"
#include "swimsim/pcg.hpp"

namespace swimsim {

namespace {

std::array<int, 3> interior_dims(const GridSpec& g, int comp) {
    std::array<int, 3> d = g.cells;
    d[comp] -= 1;
    return d;
}

void remove_mean(CellField& f) {
    const double mean = std::accumulate(f.data.begin(), f.data.end(), 0.0) / static_cast<double>(f.data.size());
    for (double& v : f.data) v -= mean;
}

}  // namespace

CellField divergence(const GridSpec& g, const FaceField& u) {
    CellField div(g);
    const double ihx = 1.0 / g.h(0), ihy = 1.0 / g.h(1), ihz = 1.0 / g.h(2);
    for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < g.cells[1]; ++j)
            for (int k = 0; k < g.cells[2]; ++k) {
                div.data[g.cell_index(i, j, k)] =
                    (u.comp[0][g.face_index(0, i + 1, j, k)] - u.comp[0][g.face_index(0, i, j, k)]) * ihx +
                    (u.comp[1][g.face_index(1, i, j + 1, k)] - u.comp[1][g.face_index(1, i, j, k)]) * ihy +
                    (u.comp[2][g.face_index(2, i, j, k + 1)] - u.comp[2][g.face_index(2, i, j, k)]) * ihz;
            }
    return div;
}

FaceField gradient(const GridSpec& g, const CellField& phi) {
    FaceField grad(g);
    for (int a = 0; a < 3; ++a) {
        const auto d = g.face_dims(a);
        const double ih = 1.0 / g.h(a);
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    std::array<int, 3> idx{i, j, k};
                    if (idx[a] == 0 || idx[a] == g.cells[a]) continue;
                    const double hi = phi.data[g.cell_index(idx[0], idx[1], idx[2])];
                    idx[a] -= 1;
                    const double lo = phi.data[g.cell_index(idx[0], idx[1], idx[2])];
                    grad.comp[a][g.face_index(a, i, j, k)] = (hi - lo) * ih;
                }
    }
    return grad;
}

CellField neumann_laplacian(const GridSpec& g, const CellField& phi) { return divergence(g, gradient(g, phi)); }

FaceField laplacian(const GridSpec& g, const FaceField& u) {
    FaceField out(g);
    for (int a = 0; a < 3; ++a) {
        const auto d = g.face_dims(a);
        const std::vector<double>& c = u.comp[a];
        std::vector<double>& o = out.comp[a];
        const std::array<std::size_t, 3> stride{static_cast<std::size_t>(d[1]) * d[2], static_cast<std::size_t>(d[2]), 1};
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    const std::array<int, 3> idx{i, j, k};
                    if (idx[a] == 0 || idx[a] == g.cells[a]) continue;
                    const std::size_t n = g.face_index(a, i, j, k);
                    const double centre = c[n];
                    double acc = 0.0;
                    for (int b = 0; b < 3; ++b) {
                        const double ih2 = 1.0 / (g.h(b) * g.h(b));
                        if (b == a) {
                            // node direction: the wall nodes hold zero
                            acc += (c[n + stride[b]] - 2.0 * centre + c[n - stride[b]]) * ih2;
                        } else {
                            const double lo = idx[b] > 0 ? c[n - stride[b]] : -centre;
                            const double hi = idx[b] < d[b] - 1 ? c[n + stride[b]] : -centre;
                            acc += (hi - 2.0 * centre + lo) * ih2;
                        }
                    }
                    o[n] = acc;
                }
    }
    return out;
}

double gradient_norm_squared(const GridSpec& g, const FaceField& u) {
    double sum = 0.0;
    for (int a = 0; a < 3; ++a) {
        const auto d = g.face_dims(a);
        const std::vector<double>& c = u.comp[a];
        const std::array<std::size_t, 3> stride{static_cast<std::size_t>(d[1]) * d[2], static_cast<std::size_t>(d[2]), 1};
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    const std::array<int, 3> idx{i, j, k};
                    const std::size_t n = g.face_index(a, i, j, k);
                    for (int b = 0; b < 3; ++b) {
                        const double ih2 = 1.0 / (g.h(b) * g.h(b));
                        if (idx[b] + 1 < d[b]) {
                            const double diff = c[n + stride[b]] - c[n];
                            sum += diff * diff * ih2;
                        }
                        if (b != a) {
                            // half edges to the wall, where the reflected value is -u
                            if (idx[b] == 0) sum += 2.0 * c[n] * c[n] * ih2;
                            if (idx[b] == d[b] - 1) sum += 2.0 * c[n] * c[n] * ih2;
                        }
                    }
                }
    }
    return sum * g.cell_volume();
}

double relative_divergence(const GridSpec& g, const FaceField& u) {
    const double un = l2_norm(g, u);
    if (un == 0.0) return 0.0;
    return l2_norm(g, divergence(g, u)) / (un / g.min_spacing());
}

namespace {

std::array<SeparableSolver, 3> make_velocity_solvers(const GridSpec& g) {
    auto make = [&g](int a) {
        std::array<AxisBc, 3> bcs{AxisBc::DirichletCell, AxisBc::DirichletCell, AxisBc::DirichletCell};
        bcs[a] = AxisBc::DirichletNode;
        return SeparableSolver(interior_dims(g, a), bcs, {g.h(0), g.h(1), g.h(2)});
    };
    return {make(0), make(1), make(2)};
}

}  // namespace

StokesSolver::StokesSolver(const GridSpec& grid, const FluidParams& params)
    : grid_(grid),
      params_(params),
      pressure_(grid.cells, {AxisBc::Neumann, AxisBc::Neumann, AxisBc::Neumann}, {grid.h(0), grid.h(1), grid.h(2)}),
      velocity_(make_velocity_solvers(grid)) {
    if (!(params.nu > 0.0)) throw ConfigInvalid({"viscosity nu must be positive"});
}

CellField StokesSolver::solve_pressure(const CellField& rhs_in, int& iterations) {
    CellField rhs = rhs_in;
    remove_mean(rhs);
    CellField b = rhs;
    b *= -1.0;
    CellField x(grid_);
    auto apply = [this](const CellField& v) {
        CellField out = neumann_laplacian(grid_, v);
        out *= -1.0;
        return out;
    };
    auto dot = [this](const CellField& p, const CellField& q) { return inner(grid_, p, q); };
    PcgResult res;
    if (params_.poisson == PoissonMethod::Preconditioned) {
        auto precondition = [this](const CellField& r) {
            CellField z = r;
            pressure_.solve(z.data, 0.0, 1.0);
            return z;
        };
        res = pcg(x, b, apply, precondition, dot, params_.pressure_tol, params_.max_iterations);
    } else {
        res = pcg(x, b, apply, [](const CellField& r) { return r; }, dot, params_.pressure_tol, params_.max_iterations);
    }
    iterations += res.iterations;
    if (!res.converged)
        throw SolverDiverged("pressure Poisson solve did not reach tolerance", res.iterations, res.relative_residual);
    remove_mean(x);
    return x;
}

FaceField StokesSolver::project_only(const FaceField& u) {
    const CellField phi = solve_pressure(divergence(grid_, u), stats_.pressure_iterations);
    FaceField out = u;
    out.axpy(-1.0, gradient(grid_, phi));
    return out;
}

Projection StokesSolver::project(const FaceField& u) {
    for (const auto& c : u.comp)
        for (double v : c)
            if (!std::isfinite(v)) throw SolverDiverged("non-finite velocity passed to the projection", 0, INFINITY);
    stats_ = {};
    Projection out;
    out.p = solve_pressure(divergence(grid_, u), stats_.pressure_iterations);
    out.u = u;
    out.u.axpy(-1.0, gradient(grid_, out.p));
    zero_boundary_faces(grid_, out.u);
    out.iterations = stats_.pressure_iterations;
    return out;
}

FaceField StokesSolver::helmholtz_inverse(const FaceField& r, double a) {
    FaceField out(grid_);
    std::vector<double> buf;
    for (int c = 0; c < 3; ++c) {
        const auto d = grid_.face_dims(c);
        buf.clear();
        buf.reserve(velocity_[c].size());
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    const std::array<int, 3> idx{i, j, k};
                    if (idx[c] == 0 || idx[c] == grid_.cells[c]) continue;
                    buf.push_back(r.comp[c][grid_.face_index(c, i, j, k)]);
                }
        velocity_[c].solve(buf, 1.0, a);
        std::size_t n = 0;
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    const std::array<int, 3> idx{i, j, k};
                    if (idx[c] == 0 || idx[c] == grid_.cells[c]) continue;
                    out.comp[c][grid_.face_index(c, i, j, k)] = buf[n++];
                }
    }
    return out;
}

FluidState StokesSolver::step(const FluidState& state, const ForceDensityField& f, double dt) {
    return step_faces(state, cell_to_faces(grid_, f), dt);
}

FluidState StokesSolver::step_faces(const FluidState& state, const FaceField& f, double dt) {
    if (!(dt > 0.0)) throw ConfigInvalid({"time step must be positive"});
    stats_ = {};
    const double a = dt * params_.nu;
    FaceField b = state.u;
    b.axpy(dt, f);
    zero_boundary_faces(grid_, b);

    auto helmholtz = [&](const FaceField& x) {
        FaceField hx = x;
        hx.axpy(-a, laplacian(grid_, x));
        return hx;
    };
    auto apply = [&](const FaceField& x) { return project_only(helmholtz(x)); };
    auto precondition = [&](const FaceField& r) { return project_only(helmholtz_inverse(r, a)); };
    auto dot = [this](const FaceField& p, const FaceField& q) { return inner(grid_, p, q); };

    const FaceField pb = project_only(b);
    FaceField x = precondition(pb);
    const PcgResult res = pcg(x, pb, apply, precondition, dot, params_.stokes_tol, params_.max_iterations,
                              l2_norm(grid_, b));
    stats_.stokes_iterations = res.iterations;
    stats_.stokes_residual = res.relative_residual;
    if (!res.converged)
        throw SolverDiverged("implicit Stokes solve did not reach tolerance", res.iterations, res.relative_residual);

    FluidState out(grid_);
    out.u = project_only(x);
    zero_boundary_faces(grid_, out.u);
    FaceField rest = b;
    rest.axpy(-1.0, helmholtz(out.u));
    out.p = solve_pressure(divergence(grid_, rest), stats_.pressure_iterations);
    out.p *= 1.0 / dt;
    out.t = state.t + dt;
    return out;
}

Vec3 average_velocity(const GridSpec& g, const FaceField& u, const BodyShape& shape, const Vec3& center) {
    if (!closure_inside(shape, center, g.domain)) throw BodyOutsideDomain("averaged body leaves the domain", -1);
    const BodyCoverage cov = covered_cells(g, shape, center);
    if (cov.touches_boundary_layer) throw BodyOutsideDomain("averaged body covers a wall-adjacent cell", -1);
    if (cov.cells.empty()) throw ConfigInvalid({"averaged body covers no cell centre; refine the grid"});
    Vec3 sum;
    const std::size_t nyz = static_cast<std::size_t>(g.cells[1]) * g.cells[2];
    for (std::size_t c : cov.cells) {
        const int i = static_cast<int>(c / nyz);
        const int j = static_cast<int>((c / g.cells[2]) % g.cells[1]);
        const int k = static_cast<int>(c % g.cells[2]);
        sum += cell_velocity(g, u, i, j, k);
    }
    return sum / static_cast<double>(cov.cells.size());
}

EnergyReport energy_report_faces(const GridSpec& g, const FaceField& u, const FaceField& f, double nu) {
    EnergyReport e;
    e.kinetic = 0.5 * inner(g, u, u);
    e.dissipation = nu * gradient_norm_squared(g, u);
    e.power_in = inner(g, f, u);
    return e;
}

EnergyReport energy_report(const GridSpec& g, const FluidState& state, const ForceDensityField& f, double nu) {
    return energy_report_faces(g, state.u, cell_to_faces(g, f), nu);
}

StepEnergyBalance step_energy_balance(const GridSpec& g, const FaceField& u0, const FaceField& u1, const FaceField& f,
                                      double dt, double nu) {
    StepEnergyBalance s;
    const EnergyReport e0 = energy_report_faces(g, u0, f, nu);
    const EnergyReport e1 = energy_report_faces(g, u1, f, nu);
    FaceField du = u1;
    du -= u0;
    s.kinetic_change = e1.kinetic - e0.kinetic;
    s.numerical_dissipation = 0.5 * inner(g, du, du);
    s.viscous_dissipation = dt * e1.dissipation;
    s.work = dt * e1.power_in;
    s.residual = s.kinetic_change + s.numerical_dissipation + s.viscous_dissipation - s.work;
    s.scale = e0.kinetic + e1.kinetic + s.numerical_dissipation + s.viscous_dissipation + std::fabs(s.work);
    return s;
}

void write_vtk(const std::string& path, const GridSpec& g, const FluidState& state) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    char buf[128];
    os << "# vtk DataFile Version 3.0\n";
    std::snprintf(buf, sizeof buf, "swimsim fluid t=%.17g\n", state.t);
    os << buf << "ASCII\nDATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.cells[0] << ' ' << g.cells[1] << ' ' << g.cells[2] << '\n';
    std::snprintf(buf, sizeof buf, "ORIGIN %.17g %.17g %.17g\n", 0.5 * g.h(0), 0.5 * g.h(1), 0.5 * g.h(2));
    os << buf;
    std::snprintf(buf, sizeof buf, "SPACING %.17g %.17g %.17g\n", g.h(0), g.h(1), g.h(2));
    os << buf;
    os << "POINT_DATA " << g.num_cells() << "\nVECTORS velocity double\n";
    for (int k = 0; k < g.cells[2]; ++k)
        for (int j = 0; j < g.cells[1]; ++j)
            for (int i = 0; i < g.cells[0]; ++i) {
                const Vec3 v = cell_velocity(g, state.u, i, j, k);
                std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x, v.y, v.z);
                os << buf;
            }
    os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < g.cells[2]; ++k)
        for (int j = 0; j < g.cells[1]; ++j)
            for (int i = 0; i < g.cells[0]; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g\n", state.p.data[g.cell_index(i, j, k)]);
                os << buf;
            }
}

}  // namespace swimsim
