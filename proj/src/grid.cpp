#include "swimsim/grid.hpp"

#include <algorithm>
#include <cmath>

#include "swimsim/errors.hpp"

namespace swimsim {

GridSpec::GridSpec(const Domain& d, std::array<int, 3> n) : domain(d), cells(n) {
    std::vector<std::string> errors;
    for (int a = 0; a < 3; ++a) {
        if (!(d.extents[a] > 0.0)) errors.push_back("domain extent along axis " + std::to_string(a) + " must be positive");
        if (n[a] < 8) errors.push_back("grid needs at least 8 cells per axis, axis " + std::to_string(a) + " has " + std::to_string(n[a]));
    }
    if (!errors.empty()) throw ConfigInvalid(std::move(errors));
}

double GridSpec::min_spacing() const { return std::min({h(0), h(1), h(2)}); }
double GridSpec::max_spacing() const { return std::max({h(0), h(1), h(2)}); }

FaceField& FaceField::operator+=(const FaceField& o) {
    for (int a = 0; a < 3; ++a)
        std::transform(comp[a].begin(), comp[a].end(), o.comp[a].begin(), comp[a].begin(), std::plus<>());
    return *this;
}

FaceField& FaceField::operator-=(const FaceField& o) {
    for (int a = 0; a < 3; ++a)
        std::transform(comp[a].begin(), comp[a].end(), o.comp[a].begin(), comp[a].begin(), std::minus<>());
    return *this;
}

FaceField& FaceField::operator*=(double s) {
    for (auto& c : comp)
        for (double& v : c) v *= s;
    return *this;
}

void FaceField::axpy(double s, const FaceField& o) {
    for (int a = 0; a < 3; ++a)
        for (std::size_t n = 0; n < comp[a].size(); ++n) comp[a][n] += s * o.comp[a][n];
}

double inner(const GridSpec& g, const FaceField& a, const FaceField& b) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t n = 0; n < a.comp[c].size(); ++n) sum += a.comp[c][n] * b.comp[c][n];
    return sum * g.cell_volume();
}

double l2_norm(const GridSpec& g, const FaceField& a) { return std::sqrt(inner(g, a, a)); }

double inner(const GridSpec& g, const CellField& a, const CellField& b) {
    double sum = 0.0;
    for (std::size_t n = 0; n < a.data.size(); ++n) sum += a.data[n] * b.data[n];
    return sum * g.cell_volume();
}

double l2_norm(const GridSpec& g, const CellField& a) { return std::sqrt(inner(g, a, a)); }

double max_abs(const FaceField& a) {
    double m = 0.0;
    for (const auto& c : a.comp)
        for (double v : c) m = std::max(m, std::fabs(v));
    return m;
}

void zero_boundary_faces(const GridSpec& g, FaceField& u) {
    for (int a = 0; a < 3; ++a) {
        const auto d = g.face_dims(a);
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    const std::array<int, 3> idx{i, j, k};
                    if (idx[a] == 0 || idx[a] == g.cells[a]) u.comp[a][g.face_index(a, i, j, k)] = 0.0;
                }
    }
}

bool boundary_faces_zero(const GridSpec& g, const FaceField& u) {
    for (int a = 0; a < 3; ++a) {
        const auto d = g.face_dims(a);
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    const std::array<int, 3> idx{i, j, k};
                    if ((idx[a] == 0 || idx[a] == g.cells[a]) && u.comp[a][g.face_index(a, i, j, k)] != 0.0) return false;
                }
    }
    return true;
}

Vec3 cell_velocity(const GridSpec& g, const FaceField& u, int i, int j, int k) {
    return {0.5 * (u.comp[0][g.face_index(0, i, j, k)] + u.comp[0][g.face_index(0, i + 1, j, k)]),
            0.5 * (u.comp[1][g.face_index(1, i, j, k)] + u.comp[1][g.face_index(1, i, j + 1, k)]),
            0.5 * (u.comp[2][g.face_index(2, i, j, k)] + u.comp[2][g.face_index(2, i, j, k + 1)])};
}

FaceField cell_to_faces(const GridSpec& g, const ForceDensityField& f) {
    FaceField out(g);
    for (int a = 0; a < 3; ++a) {
        const auto d = g.face_dims(a);
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    std::array<int, 3> idx{i, j, k};
                    if (idx[a] == 0 || idx[a] == g.cells[a]) continue;
                    const double hi = f.data[g.cell_index(idx[0], idx[1], idx[2])][a];
                    idx[a] -= 1;
                    const double lo = f.data[g.cell_index(idx[0], idx[1], idx[2])][a];
                    out.comp[a][g.face_index(a, i, j, k)] = 0.5 * (lo + hi);
                }
    }
    return out;
}

BodyCoverage covered_cells(const GridSpec& g, const BodyShape& shape, const Vec3& center) {
    BodyCoverage out;
    const Vec3 e = shape.bounding_half_extents();
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0, static_cast<int>(std::floor((center[a] - e[a]) / g.h(a) - 0.5)));
        hi[a] = std::min(g.cells[a] - 1, static_cast<int>(std::ceil((center[a] + e[a]) / g.h(a) - 0.5)));
    }
    for (int i = lo[0]; i <= hi[0]; ++i)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int k = lo[2]; k <= hi[2]; ++k) {
                if (!indicator(shape, center, g.cell_center(i, j, k))) continue;
                out.cells.push_back(g.cell_index(i, j, k));
                if (i == 0 || j == 0 || k == 0 || i == g.cells[0] - 1 || j == g.cells[1] - 1 || k == g.cells[2] - 1)
                    out.touches_boundary_layer = true;
            }
    return out;
}

}  // namespace swimsim
