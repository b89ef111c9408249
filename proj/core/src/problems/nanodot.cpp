#include <cmath>

#include "magnex/error.hpp"
#include "magnex/problems.hpp"

namespace magnex {

double critical_dmi(double A, double K) { return 4.0 * std::sqrt(A * K) / std::acos(-1.0); }

MaterialMap nanodot_material(const NanodotOptions& opt) {
    const auto n = static_cast<std::int64_t>(std::ceil(2.0 * opt.R / opt.dx - 1e-9));
    const GridSpec g(n, n, 1, opt.dx, opt.dx, opt.dz);
    MaterialMap mat(g, opt.Ms, opt.A, opt.alpha, opt.Ku, opt.D);
    mat.easy_axis = {0, 0, 1};
    const double c = 0.5 * n * opt.dx;
    for (std::int64_t j = 0; j < n; ++j)
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = (i + 0.5) * opt.dx - c, y = (j + 0.5) * opt.dx - c;
            if (x * x + y * y > opt.R * opt.R) mat.Ms[g.index(i, j, 0)] = 0.0;
        }
    return mat;
}

VectorField3 nanodot_seed(const MaterialMap& mat, int turns, double R, double D) {
    const GridSpec& g = mat.grid;
    const double pi = std::acos(-1.0);
    const double cx = 0.5 * g.nx * g.dx, cy = 0.5 * g.ny * g.dy;
    // Radial in-plane tilt; the sign follows the chirality favoured by D.
    const double chir = D >= 0.0 ? 1.0 : -1.0;
    VectorField3 m(g);
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                const double ms = mat.Ms[idx];
                if (ms <= 0.0) continue;
                const double x = (i + 0.5) * g.dx - cx, y = (j + 0.5) * g.dy - cy;
                const double r = std::hypot(x, y);
                const double th = turns * pi * std::max(0.0, 1.0 - r / R);
                const double cphi = r > 0.0 ? x / r : 1.0, sphi = r > 0.0 ? y / r : 0.0;
                const double s = chir * std::sin(th);
                m.set(idx, Vec3{s * cphi, s * sphi, std::cos(th)} * ms);
            }
    return m;
}

RadialProfile radial_profile(const VectorField3& m, const MaterialMap& mat, double bin) {
    const GridSpec& g = mat.grid;
    const double cx = 0.5 * g.nx * g.dx, cy = 0.5 * g.ny * g.dy;
    const auto nb = static_cast<std::size_t>(std::ceil(std::hypot(cx, cy) / bin)) + 1;
    std::vector<double> sum(nb, 0.0), cnt(nb, 0.0);
    for (std::int64_t j = 0; j < g.ny; ++j)
        for (std::int64_t i = 0; i < g.nx; ++i) {
            const std::size_t idx = g.index(i, j, 0);
            if (!mat.magnetic(idx)) continue;
            const double r = std::hypot((i + 0.5) * g.dx - cx, (j + 0.5) * g.dy - cy);
            const auto b = static_cast<std::size_t>(r / bin);
            sum[b] += m.get(idx).z / mat.Ms[idx];
            cnt[b] += 1.0;
        }
    RadialProfile p;
    for (std::size_t b = 0; b < nb; ++b) {
        if (cnt[b] == 0.0) continue;
        p.r.push_back((b + 0.5) * bin);
        p.mz.push_back(sum[b] / cnt[b]);
    }
    return p;
}

int count_sign_changes(const RadialProfile& p) {
    int n = 0;
    for (std::size_t b = 1; b < p.mz.size(); ++b) {
        if ((p.mz[b - 1] > 0.0) != (p.mz[b] > 0.0)) ++n;
    }
    return n;
}

std::optional<double> first_crossing(const RadialProfile& p) {
    for (std::size_t b = 1; b < p.mz.size(); ++b) {
        const double a = p.mz[b - 1], c = p.mz[b];
        if ((a > 0.0) != (c > 0.0)) return p.r[b - 1] + (p.r[b] - p.r[b - 1]) * a / (a - c);
    }
    return std::nullopt;
}

NanodotState relax_nanodot(const NanodotOptions& opt, int turns) {
    if (turns < 0) throw Error("nanodot: seed turns must be >= 0");
    MaterialMap mat = nanodot_material(opt);
    const GridSpec g = mat.grid;
    PhysicsOptions phys;
    phys.set(Term::Bias, false);
    phys.set(Term::Demag, false);
    phys.set(Term::Anisotropy, true);
    phys.set(Term::Exchange, true);
    phys.set(Term::Dmi, true);
    VectorField3 m0 = nanodot_seed(mat, turns, opt.R, opt.D);
    PartitionedRHS rhs(std::move(mat), phys);
    rhs.all_slow();

    IntegratorSpec spec;
    spec.method = Method::RK4;
    spec.dt = opt.dt > 0.0 ? opt.dt : stable_dt_estimate(rhs.material(), false);
    Simulation sim(rhs, spec, std::move(m0));

    auto torque = [&] {
        VectorField3 h;
        rhs.effective_field(sim.t(), sim.m(), h);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const double ms = rhs.material().Ms[i];
            if (ms > 0.0) worst = std::max(worst, norm(cross(sim.m().get(i) * (1.0 / ms), h.get(i))));
        }
        return worst;
    };

    EnergyMonitor mon;
    const double scale = 1e-3 * opt.Ku;
    SampleOptions so;
    so.interval = 100 * spec.dt;
    so.energies = false;
    so.sink = [&](const Sample& s) {
        mon.observe(rhs.energies(s.t, sim.m(), ExchangeEnergyForm::FieldConsistent).total(), scale);
    };
    if (opt.torque_tol > 0.0) {
        so.on_step = [&](const Simulation& s) { return s.steps() % 100 != 0 || torque() >= opt.torque_tol; };
    }
    StopCondition stop;
    stop.duration = opt.relax_time;
    run_until(sim, stop, so);

    NanodotState out;
    out.profile = radial_profile(sim.m(), rhs.material(), opt.dx);
    out.crossings = count_sign_changes(out.profile);
    out.Rs = first_crossing(out.profile);
    out.residual_torque = torque();
    out.energy = rhs.energies(sim.t(), sim.m()).total();
    out.t = sim.t();
    out.max_norm_ulps = sim.max_norm_ulps();
    out.energy_monotone = mon.monotone;
    out.worst_energy_rise = mon.worst;
    out.m = sim.m();
    return out;
}

}  // namespace magnex
