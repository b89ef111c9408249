#include "magnex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "magnex/error.hpp"

namespace magnex {

GridSpec::GridSpec(std::int64_t nx_, std::int64_t ny_, std::int64_t nz_, double dx_, double dy_,
                   double dz_, Vec3 origin_)
    : nx(nx_), ny(ny_), nz(nz_), dx(dx_), dy(dy_), dz(dz_), origin(origin_) {
    validate();
}

void GridSpec::validate() const {
    if (nx < 1 || ny < 1 || nz < 1) {
        throw Error("grid: cell counts must be >= 1, got " + std::to_string(nx) + "x" +
                    std::to_string(ny) + "x" + std::to_string(nz));
    }
    if (!(dx > 0.0) || !(dy > 0.0) || !(dz > 0.0) || !std::isfinite(dx) || !std::isfinite(dy) ||
        !std::isfinite(dz)) {
        throw Error("grid: cell sizes must be finite and > 0");
    }
    constexpr auto limit = std::numeric_limits<std::int64_t>::max() / 8;
    if (nx > limit / ny || nx * ny > limit / nz) throw Error("grid: cell count overflows index range");
}

VectorField3::VectorField3(const GridSpec& grid) : grid_(grid), data_(3 * grid.cells(), 0.0) {}

VectorField3::VectorField3(const GridSpec& grid, const Vec3& value) : VectorField3(grid) {
    fill(value);
}

void VectorField3::fill(const Vec3& v) {
    for (int c = 0; c < 3; ++c) std::ranges::fill(component(c), v[c]);
}

void VectorField3::set_zero() { std::ranges::fill(data_, 0.0); }

void VectorField3::axpy(double s, const VectorField3& other) {
    const auto src = other.data();
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * src[i];
}

bool VectorField3::all_finite() const {
    return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

double VectorField3::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

MaterialMap::MaterialMap(const GridSpec& g, double Ms_, double A_, double alpha_, double Ku_,
                         double D_)
    : grid(g),
      Ms(g.cells(), Ms_),
      A(g.cells(), A_),
      Ku(g.cells(), Ku_),
      D(g.cells(), D_),
      alpha(g.cells(), alpha_) {}

std::size_t MaterialMap::magnetic_cells() const {
    return static_cast<std::size_t>(std::ranges::count_if(Ms, [](double v) { return v > 0.0; }));
}

void MaterialMap::validate() const {
    grid.validate();
    const std::size_t n = grid.cells();
    if (Ms.size() != n || A.size() != n || Ku.size() != n || D.size() != n || alpha.size() != n) {
        throw Error("material: parameter arrays do not match the grid");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(Ms[i] >= 0.0) || !std::isfinite(Ms[i])) throw Error("material: Ms must be >= 0");
        if (Ms[i] > 0.0 && !(alpha[i] > 0.0)) throw Error("material: alpha must be > 0");
        if (!(A[i] >= 0.0)) throw Error("material: A must be >= 0");
    }
    const bool any_ku = std::ranges::any_of(Ku, [](double v) { return v != 0.0; });
    if (any_ku && std::abs(norm(easy_axis) - 1.0) > 1e-12) {
        throw Error("material: easy axis must be a unit vector");
    }
}

void renormalize(VectorField3& m, const MaterialMap& mat) {
    const std::size_t n = m.cells();
    auto mx = m.component(0);
    auto my = m.component(1);
    auto mz = m.component(2);
    for (std::size_t i = 0; i < n; ++i) {
        const double ms = mat.Ms[i];
        if (ms <= 0.0) {
            mx[i] = my[i] = mz[i] = 0.0;
            continue;
        }
        const double len2 = mx[i] * mx[i] + my[i] * my[i] + mz[i] * mz[i];
        // Already on the sphere to rounding: leave bitwise unchanged so the map is idempotent.
        if (std::abs(len2 - ms * ms) <= 4.0 * std::numeric_limits<double>::epsilon() * ms * ms) continue;
        const double len = std::sqrt(len2);
        if (len == 0.0 || !std::isfinite(len)) {
            throw Error("renormalize: cell " + std::to_string(i) +
                        " has undefined direction (|M| = " + std::to_string(len) + ")");
        }
        const double s = ms / len;
        mx[i] *= s;
        my[i] *= s;
        mz[i] *= s;
    }
}

VectorField3 renormalized(VectorField3 m, const MaterialMap& mat) {
    renormalize(m, mat);
    return m;
}

Vec3 mean_normalized(const VectorField3& m, const MaterialMap& mat) {
    Vec3 sum{};
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.cells(); ++i) {
        if (mat.Ms[i] <= 0.0) continue;
        sum += m.get(i) * (1.0 / mat.Ms[i]);
        ++count;
    }
    if (count == 0) throw Error("mean_normalized: grid has no magnetic cells");
    return sum * (1.0 / static_cast<double>(count));
}

PaddedField::PaddedField(const GridSpec& interior)
    : interior_(interior),
      data_(3 * static_cast<std::size_t>((interior.nx + 2) * (interior.ny + 2) * (interior.nz + 2)),
            0.0) {}

Vec3 PaddedField::at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    const std::size_t n = data_.size() / 3;
    const std::size_t f = flat(i, j, k);
    return {data_[f], data_[n + f], data_[2 * n + f]};
}

void PaddedField::put(std::int64_t i, std::int64_t j, std::int64_t k, const Vec3& v) {
    const std::size_t n = data_.size() / 3;
    const std::size_t f = flat(i, j, k);
    data_[f] = v.x;
    data_[n + f] = v.y;
    data_[2 * n + f] = v.z;
}

PaddedField ghost_fill(const VectorField3& m, const MaterialMap& mat, BoundaryMode mode) {
    const GridSpec& g = m.grid();
    PaddedField out(g);
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) out.put(i, j, k, m.get(g.index(i, j, k)));

    const std::int64_t n[3] = {g.nx, g.ny, g.nz};
    for (int axis = 0; axis < 3; ++axis) {
        const int a1 = (axis + 1) % 3;
        const int a2 = (axis + 2) % 3;
        for (std::int64_t u = 0; u < n[a1]; ++u) {
            for (std::int64_t v = 0; v < n[a2]; ++v) {
                for (int side : {-1, 1}) {
                    std::int64_t c[3];
                    c[axis] = side < 0 ? 0 : n[axis] - 1;
                    c[a1] = u;
                    c[a2] = v;
                    const std::size_t idx = g.index(c[0], c[1], c[2]);
                    const Vec3 interior = m.get(idx);
                    if (mode == BoundaryMode::Chiral && mat.Ms[idx] > 0.0 && mat.D[idx] != 0.0 &&
                        !(mat.A[idx] > 0.0)) {
                        throw Error("ghost_fill: chiral boundary needs A > 0 at boundary cell " +
                                    std::to_string(idx));
                    }
                    Vec3 ghost = boundary_ghost(interior, axis, side, g.h(axis), mat.D[idx],
                                                mat.A[idx], mode);
                    if (mode == BoundaryMode::Periodic) {
                        std::int64_t w[3] = {c[0], c[1], c[2]};
                        w[axis] = side < 0 ? n[axis] - 1 : 0;
                        ghost = m.get(g.index(w[0], w[1], w[2]));
                    }
                    c[axis] += side;
                    out.put(c[0], c[1], c[2], ghost);
                }
            }
        }
    }
    return out;
}

}  // namespace magnex
