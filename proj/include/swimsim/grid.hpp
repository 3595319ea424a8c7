#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "swimsim/geometry.hpp"
#include "swimsim/vec3.hpp"

namespace swimsim {

/// Uniform cell-centred grid on the box Ω. Cell (i,j,k) spans
/// [i hx, (i+1) hx] x [j hy, (j+1) hy] x [k hz, (k+1) hz].
struct GridSpec {
    Domain domain;
    std::array<int, 3> cells{16, 16, 16};

    GridSpec() = default;
    GridSpec(const Domain& d, std::array<int, 3> n);

    double h(int axis) const { return domain.extents[axis] / cells[axis]; }
    Vec3 spacing() const { return {h(0), h(1), h(2)}; }
    double min_spacing() const;
    double max_spacing() const;
    double cell_volume() const { return h(0) * h(1) * h(2); }
    std::size_t num_cells() const {
        return static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(cells[1]) * static_cast<std::size_t>(cells[2]);
    }
    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * cells[1] + j) * cells[2] + k;
    }
    Vec3 cell_center(int i, int j, int k) const {
        return {(i + 0.5) * h(0), (j + 0.5) * h(1), (k + 0.5) * h(2)};
    }

    /// Extent of the face array holding velocity component `comp`: one extra node along `comp`.
    std::array<int, 3> face_dims(int comp) const {
        std::array<int, 3> d = cells;
        d[comp] += 1;
        return d;
    }
    std::size_t num_faces(int comp) const {
        const auto d = face_dims(comp);
        return static_cast<std::size_t>(d[0]) * d[1] * d[2];
    }
    std::size_t face_index(int comp, int i, int j, int k) const {
        const auto d = face_dims(comp);
        return (static_cast<std::size_t>(i) * d[1] + j) * d[2] + k;
    }
    /// Position of the face carrying component `comp` with face-array index (i,j,k).
    Vec3 face_position(int comp, int i, int j, int k) const {
        Vec3 p = cell_center(i, j, k);
        p[comp] -= 0.5 * h(comp);
        return p;
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.domain.extents == b.domain.extents && a.cells == b.cells;
    }
};

/// Cell-centred scalar.
struct CellField {
    std::vector<double> data;

    CellField() = default;
    explicit CellField(const GridSpec& g) : data(g.num_cells(), 0.0) {}

    CellField& operator*=(double s) {
        for (double& v : data) v *= s;
        return *this;
    }
    /// this += s * o
    void axpy(double s, const CellField& o) {
        for (std::size_t n = 0; n < data.size(); ++n) data[n] += s * o.data[n];
    }
};

/// Staggered (MAC) velocity: component a lives on the faces normal to axis a.
struct FaceField {
    std::array<std::vector<double>, 3> comp;

    FaceField() = default;
    explicit FaceField(const GridSpec& g) {
        for (int a = 0; a < 3; ++a) comp[a].assign(g.num_faces(a), 0.0);
    }

    FaceField& operator+=(const FaceField& o);
    FaceField& operator-=(const FaceField& o);
    FaceField& operator*=(double s);
    /// this += s * o
    void axpy(double s, const FaceField& o);
};

/// Cell-centred 3-vector force density (force per unit volume).
struct ForceDensityField {
    std::vector<Vec3> data;

    ForceDensityField() = default;
    explicit ForceDensityField(const GridSpec& g) : data(g.num_cells(), Vec3{}) {}
};

/// Face-weighted inner products; every face carries the cell volume.
double inner(const GridSpec& g, const FaceField& a, const FaceField& b);
double l2_norm(const GridSpec& g, const FaceField& a);
double inner(const GridSpec& g, const CellField& a, const CellField& b);
double l2_norm(const GridSpec& g, const CellField& a);
double max_abs(const FaceField& a);

/// Zero the faces on the walls of Ω (the no-penetration nodes).
void zero_boundary_faces(const GridSpec& g, FaceField& u);
bool boundary_faces_zero(const GridSpec& g, const FaceField& u);

/// Average of the two faces surrounding each cell.
Vec3 cell_velocity(const GridSpec& g, const FaceField& u, int i, int j, int k);

/// Interpolate a cell-centred force density to faces; wall faces receive zero.
FaceField cell_to_faces(const GridSpec& g, const ForceDensityField& f);

/// Cells whose centres lie inside the translated shape.
struct BodyCoverage {
    std::vector<std::size_t> cells;
    bool touches_boundary_layer = false;  ///< some covered cell is adjacent to a wall
};

BodyCoverage covered_cells(const GridSpec& g, const BodyShape& shape, const Vec3& center);

/// Sample an analytic field on faces (wall faces forced to zero).
template <class Fn>
FaceField sample_faces(const GridSpec& g, Fn&& fn) {
    FaceField u(g);
    for (int a = 0; a < 3; ++a) {
        const auto d = g.face_dims(a);
        for (int i = 0; i < d[0]; ++i)
            for (int j = 0; j < d[1]; ++j)
                for (int k = 0; k < d[2]; ++k) {
                    const std::array<int, 3> idx{i, j, k};
                    if (idx[a] == 0 || idx[a] == g.cells[a]) continue;
                    u.comp[a][g.face_index(a, i, j, k)] = fn(g.face_position(a, i, j, k))[a];
                }
    }
    return u;
}

}  // namespace swimsim
