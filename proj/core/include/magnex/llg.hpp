#pragma once

#include "magnex/grid.hpp"

namespace magnex {

struct LlgFlags {
    bool precession = true;
    bool damping = true;
};

/// dM/dt = μ0 γL (M × H) + (α μ0 γL / Ms) M × (M × H), γL = γ / (1 + α²).
/// Vacuum cells get zero.
void llg_rhs(const VectorField3& m, const VectorField3& h, const MaterialMap& mat,
             const LlgFlags& flags, VectorField3& out);

}  // namespace magnex
