#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "magnex/vec3.hpp"

namespace magnex {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMu0 = 4.0e-7 * kPi;
inline constexpr double kGammaElectron = -1.759e11;

/// Uniform cell-centered grid. Cell (i,j,k) has its center at origin + ((i+½)dx, (j+½)dy, (k+½)dz).
struct GridSpec {
    std::int64_t nx = 1, ny = 1, nz = 1;
    double dx = 1.0, dy = 1.0, dz = 1.0;
    Vec3 origin{};

    GridSpec() = default;
    GridSpec(std::int64_t nx_, std::int64_t ny_, std::int64_t nz_, double dx_, double dy_,
             double dz_, Vec3 origin_ = {});

    /// Throws magnex::Error if the invariants (positive counts and sizes, no overflow) fail.
    void validate() const;

    std::size_t cells() const { return static_cast<std::size_t>(nx * ny * nz); }
    std::int64_t n(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
    double h(int axis) const { return axis == 0 ? dx : (axis == 1 ? dy : dz); }
    double cell_volume() const { return dx * dy * dz; }

    std::size_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return static_cast<std::size_t>(i + nx * (j + ny * k));
    }
    Vec3 center(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return {origin.x + (static_cast<double>(i) + 0.5) * dx,
                origin.y + (static_cast<double>(j) + 0.5) * dy,
                origin.z + (static_cast<double>(k) + 0.5) * dz};
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Cell-centered 3-vector field stored as three contiguous component planes, x fastest.
class VectorField3 {
public:
    VectorField3() = default;
    explicit VectorField3(const GridSpec& grid);
    VectorField3(const GridSpec& grid, const Vec3& value);

    const GridSpec& grid() const { return grid_; }
    std::size_t cells() const { return grid_.cells(); }

    std::span<double> component(int c) { return {data_.data() + c * cells(), cells()}; }
    std::span<const double> component(int c) const { return {data_.data() + c * cells(), cells()}; }
    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    Vec3 get(std::size_t idx) const {
        const std::size_t n = cells();
        return {data_[idx], data_[n + idx], data_[2 * n + idx]};
    }
    void set(std::size_t idx, const Vec3& v) {
        const std::size_t n = cells();
        data_[idx] = v.x;
        data_[n + idx] = v.y;
        data_[2 * n + idx] = v.z;
    }

    void fill(const Vec3& v);
    void set_zero();
    /// this += s * other
    void axpy(double s, const VectorField3& other);
    bool all_finite() const;
    double max_abs() const;

    friend bool operator==(const VectorField3& a, const VectorField3& b) {
        return a.grid_ == b.grid_ && a.data_ == b.data_;
    }

private:
    GridSpec grid_{};
    std::vector<double> data_;
};

/// Per-cell material parameters. Ms == 0 marks a vacuum cell.
struct MaterialMap {
    GridSpec grid{};
    std::vector<double> Ms;     // A/m
    std::vector<double> A;      // J/m
    std::vector<double> Ku;     // J/m^3
    std::vector<double> D;      // J/m^2
    std::vector<double> alpha;  // dimensionless
    Vec3 easy_axis{0.0, 0.0, 1.0};
    double gamma = kGammaElectron;  // C/kg

    MaterialMap() = default;
    /// Uniform material over the whole grid.
    MaterialMap(const GridSpec& g, double Ms_, double A_, double alpha_, double Ku_ = 0.0,
                double D_ = 0.0);

    bool magnetic(std::size_t idx) const { return Ms[idx] > 0.0; }
    std::size_t magnetic_cells() const;
    double gamma_llg(std::size_t idx) const { return gamma / (1.0 + alpha[idx] * alpha[idx]); }

    /// Throws magnex::Error when a parameter array has the wrong size or violates its invariant.
    void validate() const;
};

/// Rescales every magnetic cell onto |M| = Ms and zeroes vacuum cells.
/// Throws magnex::Error if a magnetic cell has |M| == 0.
void renormalize(VectorField3& m, const MaterialMap& mat);
VectorField3 renormalized(VectorField3 m, const MaterialMap& mat);

/// Average of M/Ms over magnetic cells.
Vec3 mean_normalized(const VectorField3& m, const MaterialMap& mat);

/// Ghost rule at domain faces and at vacuum neighbours. Periodic wraps the domain and is
/// meant for verification runs.
enum class BoundaryMode { ZeroFlux, Chiral, Periodic };

/// Ghost value across the face of `idx` in direction `axis` with outward sign `side` (+1/-1).
/// Zero-flux copies the interior; Chiral applies ∂M/∂x_k = -(D/2A)(e_z × e_k) × M.
inline Vec3 boundary_ghost(const Vec3& interior, int axis, int side, double h, double D,
                           double A, BoundaryMode mode) {
    if (mode != BoundaryMode::Chiral || D == 0.0 || axis == 2) return interior;
    const Vec3 ez{0.0, 0.0, 1.0};
    const Vec3 grad = cross(cross(ez, unit_vector(axis)), interior) * (-D / (2.0 * A));
    return interior + grad * (static_cast<double>(side) * h);
}

/// Field with one ghost layer on every face. Interior cell (i,j,k) maps to (i+1,j+1,k+1).
class PaddedField {
public:
    PaddedField() = default;
    explicit PaddedField(const GridSpec& interior);

    const GridSpec& interior() const { return interior_; }
    std::int64_t px() const { return interior_.nx + 2; }
    std::int64_t py() const { return interior_.ny + 2; }
    std::int64_t pz() const { return interior_.nz + 2; }

    /// Indices are interior-relative and may range over [-1, n].
    Vec3 at(std::int64_t i, std::int64_t j, std::int64_t k) const;
    void put(std::int64_t i, std::int64_t j, std::int64_t k, const Vec3& v);

private:
    std::size_t flat(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return static_cast<std::size_t>((i + 1) + px() * ((j + 1) + py() * (k + 1)));
    }
    GridSpec interior_{};
    std::vector<double> data_;
};

/// Fills a one-cell ghost layer on the domain faces.
/// Chiral mode requires A > 0 wherever a boundary cell is magnetic and D != 0.
PaddedField ghost_fill(const VectorField3& m, const MaterialMap& mat, BoundaryMode mode);

}  // namespace magnex
