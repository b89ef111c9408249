#include <algorithm>
#include <cmath>

#include "magnex/problems.hpp"

namespace magnex {

double magnetostatic_energy_density(double Ms) { return 0.5 * kMu0 * Ms * Ms; }

double exchange_length(double A, double Ms) { return std::sqrt(A / magnetostatic_energy_density(Ms)); }

double stable_dt_estimate(const MaterialMap& mat, bool demag) {
    const GridSpec& g = mat.grid;
    double inv_h2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        if (g.n(a) > 1) inv_h2 += 4.0 / (g.h(a) * g.h(a));
    }
    double lam = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double ms = mat.Ms[i];
        if (ms <= 0.0) continue;
        double h = 2.0 * mat.A[i] / (kMu0 * ms) * inv_h2 + 2.0 * std::abs(mat.Ku[i]) / (kMu0 * ms);
        double inv_h = 0.0;
        for (int a = 0; a < 3; ++a) {
            if (g.n(a) > 1) inv_h += 2.0 / g.h(a);
        }
        h += 2.0 * std::abs(mat.D[i]) / (kMu0 * ms) * inv_h;
        if (demag) h += ms;
        const double a = mat.alpha[i];
        lam = std::max(lam, std::abs(mat.gamma) * kMu0 * h * std::sqrt(1.0 + a * a) / (1.0 + a * a));
    }
    return lam > 0.0 ? 2.0 / lam : 1e-12;
}

void EnergyMonitor::observe(double e, double scale) {
    if (!std::isnan(prev) && e > prev) {
        const double rise = (e - prev) / std::max({std::abs(prev), std::abs(e), scale});
        worst = std::max(worst, rise);
        if (rise > limit) monotone = false;
    }
    prev = e;
}

}  // namespace magnex
