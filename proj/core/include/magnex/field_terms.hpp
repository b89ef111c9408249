#pragma once

#include <array>
#include <optional>
#include <variant>

#include "magnex/expr.hpp"
#include "magnex/grid.hpp"

namespace magnex {

/// Applied field: a constant vector [A/m] or three expressions of (x, y, z, t).
class BiasSource {
public:
    BiasSource() = default;
    explicit BiasSource(const Vec3& constant) : source_(constant) {}
    explicit BiasSource(std::array<Expr, 3> exprs) : source_(std::move(exprs)) {}

    bool time_dependent() const;
    bool uniform() const;
    /// Value at a single point; only meaningful for uniform sources when position is ignored.
    Vec3 at(const Vec3& r, double t) const;

    const std::variant<Vec3, std::array<Expr, 3>>& source() const { return source_; }

private:
    std::variant<Vec3, std::array<Expr, 3>> source_{Vec3{}};
};

/// Per-cell bias field at cell centers. Expression errors propagate with cell location and t.
VectorField3 bias_field(double t, const GridSpec& grid, const BiasSource& source);
void bias_field(double t, const BiasSource& source, const MaterialMap& mat, VectorField3& out);

/// H_exch = (2 / μ0 Ms²) ∇·(A ∇M); harmonic-mean face coefficients for variable A.
/// Vacuum neighbours and domain faces use the ghost rule of `bc`.
void exchange_field(const VectorField3& m, const MaterialMap& mat, BoundaryMode bc,
                    VectorField3& out);
VectorField3 exchange_field(const VectorField3& m, const MaterialMap& mat,
                            BoundaryMode bc = BoundaryMode::ZeroFlux);

/// H_ani = (2 Ku / μ0 Ms²)(M·e_K) e_K
void anisotropy_field(const VectorField3& m, const MaterialMap& mat, VectorField3& out);
VectorField3 anisotropy_field(const VectorField3& m, const MaterialMap& mat);

/// Interfacial DMI: H = -(2D / μ0 Ms²)[(∂x Mx + ∂y My) e_z - (∂x Mz, ∂y Mz, 0)].
void dmi_field(const VectorField3& m, const MaterialMap& mat, BoundaryMode bc,
               VectorField3& out);
VectorField3 dmi_field(const VectorField3& m, const MaterialMap& mat,
                       BoundaryMode bc = BoundaryMode::Chiral);

/// Volume-averaged energy densities over magnetic cells [J/m³].
struct EnergyBreakdown {
    double e_demag = 0.0;
    double e_exch = 0.0;
    double e_anis = 0.0;
    double e_dmi = 0.0;
    double e_zeeman = 0.0;
    double Km = 0.0;  // 0.5 μ0 Ms², using the largest Ms on the grid

    double total() const { return e_demag + e_exch + e_anis + e_dmi + e_zeeman; }
    double demag_km() const { return e_demag / Km; }
    double exch_km() const { return e_exch / Km; }
    double anis_km() const { return e_anis / Km; }
    double total_km() const { return total() / Km; }
};

/// How the exchange and DMI energies are discretized.
enum class ExchangeEnergyForm {
    /// A |∇m|² and the DMI density with central differences through the active ghost rule
    CentralDifference,
    /// -(μ0/2) M·H for exchange and DMI, the energy whose variation is the discrete field
    FieldConsistent,
};

/// Fields already evaluated for `m`; missing terms contribute zero.
struct TermFields {
    const VectorField3* demag = nullptr;
    const VectorField3* exchange = nullptr;
    const VectorField3* dmi = nullptr;
    const VectorField3* bias = nullptr;
    bool anisotropy = false;
};

EnergyBreakdown energy_breakdown(const VectorField3& m, const TermFields& fields,
                                 const MaterialMap& mat, BoundaryMode bc,
                                 ExchangeEnergyForm form = ExchangeEnergyForm::CentralDifference);

}  // namespace magnex
