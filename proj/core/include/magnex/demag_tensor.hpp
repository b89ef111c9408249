#pragma once

#include <cstdint>

namespace magnex {

/// Tensor element flavor.
enum class TensorFlavor {
    /// Field averaged over the target cell (Newell f/g functions).
    Newell,
    /// Field evaluated at the target cell center (prism corner sums of atan/log).
    Point,
};

/// Symmetric 3x3 demag tensor block for one cell displacement, in the convention H = N M.
/// The self block has trace -1.
struct TensorElements {
    double xx = 0.0, yy = 0.0, zz = 0.0, xy = 0.0, xz = 0.0, yz = 0.0;

    double operator[](int c) const;
    double trace() const { return xx + yy + zz; }
};

/// Component order used by kernel storage: xx, yy, zz, xy, xz, yz.
inline constexpr int kTensorComponents = 6;

/// Distance, in cell diagonals, beyond which the cell-averaged tensor uses its asymptotic
/// expansion. Further out the long-double Newell sums lose more digits than the expansion's
/// truncation error.
inline constexpr double kDefaultFarFieldDiagonals = 20.0;

/// Tensor block for a source cell displaced by (I, J, K) cells from the target.
/// Beyond `far_field_diagonals` cell diagonals the Newell flavor switches to its asymptotic
/// expansion.
TensorElements tensor_elements(std::int64_t I, std::int64_t J, std::int64_t K, double dx,
                               double dy, double dz, TensorFlavor flavor = TensorFlavor::Newell,
                               double far_field_diagonals = kDefaultFarFieldDiagonals);

/// Self demagnetizing factor of a dx*dy*dz prism along x (positive, in [0, 1]).
long double self_demag_nx(long double x, long double y, long double z);

/// Newell f and g auxiliary functions.
long double newell_f(long double x, long double y, long double z);
long double newell_g(long double x, long double y, long double z);

/// Leading far-field terms of the cell-averaged tensor (returned with H = N M sign).
TensorElements tensor_asymptotic(double x, double y, double z, double dx, double dy, double dz);

}  // namespace magnex
