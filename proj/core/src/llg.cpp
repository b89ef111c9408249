#include "magnex/llg.hpp"

#include "magnex/error.hpp"

namespace magnex {

void llg_rhs(const VectorField3& m, const VectorField3& h, const MaterialMap& mat,
             const LlgFlags& flags, VectorField3& out) {
    if (!(m.grid() == mat.grid) || !(h.grid() == mat.grid)) throw Error("llg_rhs: grid mismatch");
    if (!(out.grid() == mat.grid) || out.data().size() != m.data().size()) out = VectorField3(mat.grid);
    const auto n = static_cast<std::int64_t>(m.cells());
    const double prec = flags.precession ? 1.0 : 0.0;
    const double damp = flags.damping ? 1.0 : 0.0;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double ms = mat.Ms[idx];
        if (ms <= 0.0) {
            out.set(idx, {});
            continue;
        }
        const Vec3 M = m.get(idx);
        const Vec3 mxh = cross(M, h.get(idx));
        const double g = kMu0 * mat.gamma_llg(idx);
        out.set(idx, mxh * (prec * g) + cross(M, mxh) * (damp * g * mat.alpha[idx] / ms));
    }
}

}  // namespace magnex
