#include <cmath>
#include <sstream>

#include "magnex/error.hpp"
#include "magnex/problems.hpp"

namespace magnex {

namespace {

StateSummary summarize(PartitionedRHS& rhs, const VectorField3& m, ExchangeEnergyForm form) {
    const EnergyBreakdown e = rhs.energies(0.0, m, form);
    StateSummary s;
    s.e_demag = e.demag_km();
    s.e_exch = e.exch_km();
    s.e_anis = e.anis_km();
    s.e_total = e.total_km();
    s.mean = mean_normalized(m, rhs.material());
    return s;
}

VectorField3 cube_seed(const GridSpec& g, CubeSeed seed, int split_axis, double Ms) {
    VectorField3 m(g);
    const double s = Ms / std::sqrt(3.0);
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) {
                const std::int64_t c[3] = {i, j, k};
                Vec3 v{s, s, s};
                if (seed == CubeSeed::Vortex) v = {2 * c[split_axis] < g.n(split_axis) ? Ms : -Ms, 0.0, 0.0};
                m.set(g.index(i, j, k), v);
            }
    return m;
}

}  // namespace

CubeState relax_cube(double L_lex, CubeSeed seed, const CubeOptions& opt, const VectorField3* start) {
    const double lex = exchange_length(opt.A, opt.Ms);
    const double h = L_lex * lex / opt.n;
    const GridSpec g(opt.n, opt.n, opt.n, h, h, h);
    const double Km = magnetostatic_energy_density(opt.Ms);
    MaterialMap mat(g, opt.Ms, opt.A, opt.alpha, opt.ku_over_km * Km);
    mat.easy_axis = {0, 0, 1};
    PhysicsOptions phys;
    phys.set(Term::Bias, false);
    phys.set(Term::Demag, true);
    phys.set(Term::Anisotropy, true);
    phys.set(Term::Exchange, true);
    PartitionedRHS rhs(std::move(mat), phys, std::make_unique<FftDemagBackend>(g, opt.demag));
    rhs.all_slow();

    IntegratorSpec spec;
    spec.method = Method::RK4;
    spec.dt = opt.dt > 0 ? opt.dt : stable_dt_estimate(rhs.material(), true);
    VectorField3 m0 = start ? *start : cube_seed(g, seed, opt.vortex_split_axis, opt.Ms);
    if (!(m0.grid().nx == g.nx && m0.grid().ny == g.ny && m0.grid().nz == g.nz)) {
        throw Error("relax_cube: starting state has a different grid");
    }
    VectorField3 fixed(g);
    std::copy(m0.data().begin(), m0.data().end(), fixed.data().begin());
    Simulation sim(rhs, spec, std::move(fixed));
    StopCondition stop;
    stop.duration = opt.relax_time;
    if (opt.equilibrium_tol > 0.0) stop.equilibrium_tol = opt.equilibrium_tol;
    EnergyMonitor mon;
    const double scale = 1e-3 * magnetostatic_energy_density(opt.Ms);
    SampleOptions so;
    so.interval = 10e-12;
    so.energies = false;
    so.sink = [&](const Sample& s) {
        mon.observe(rhs.energies(s.t, sim.m(), ExchangeEnergyForm::FieldConsistent).total(), scale);
    };
    const RunResult r = run_until(sim, stop, so);

    CubeState out;
    out.summary = summarize(rhs, sim.m(), opt.energy_form);
    out.summary.steps = r.steps;
    out.summary.converged = r.reason == StopReason::Converged;
    out.m = sim.m();
    out.max_norm_ulps = sim.max_norm_ulps();
    out.energy_monotone = mon.monotone;
    out.worst_energy_rise = mon.worst;
    return out;
}

Richardson richardson(double coarse, double medium, double fine) {
    Richardson r;
    const double ratio = (coarse - medium) / (medium - fine);
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw Error("richardson: sequence is not monotonically convergent");
    r.order = std::log2(ratio);
    r.limit = fine + (fine - medium) / (std::pow(2.0, r.order) - 1.0);
    return r;
}

CrossoverResult cube_crossover(const CubeOptions& opt, double L_lo, double L_hi, double tol,
                               const std::function<void(const std::string&)>& log) {
    CrossoverResult res;
    res.n = opt.n;
    std::optional<VectorField3> last_flower, last_vortex;
    StateSummary fl, vx;

    auto eval = [&](double L) {
        CubeState f = relax_cube(L, CubeSeed::Flower, opt, last_flower ? &*last_flower : nullptr);
        CubeState v = relax_cube(L, CubeSeed::Vortex, opt, last_vortex ? &*last_vortex : nullptr);
        if (std::abs(f.summary.mean.z) < 0.8) {
            throw Error("cube: the flower seed did not relax to a flower state at L = " + std::to_string(L));
        }
        if (std::abs(v.summary.mean.z) > 0.8) {
            throw Error("cube: the vortex seed relaxed to the flower state at L = " + std::to_string(L));
        }
        last_flower = f.m;
        last_vortex = v.m;
        fl = f.summary;
        vx = v.summary;
        const double d = f.summary.e_total - v.summary.e_total;
        res.history.emplace_back(L, d);
        ++res.evaluations;
        if (log) {
            std::ostringstream os;
            os.precision(8);
            os << "N=" << opt.n << " L=" << L << " e_flower=" << f.summary.e_total
               << " e_vortex=" << v.summary.e_total << " dE=" << d << " steps=" << f.summary.steps << "/"
               << v.summary.steps;
            log(os.str());
        }
        return d;
    };

    double a = L_lo, b = L_hi;
    double fa = eval(a), fb = eval(b);
    for (int widen = 0; fa * fb > 0.0; ++widen) {
        if (widen == 4) throw Error("cube: no sign change of the energy difference in the search bracket");
        if (log) log("no sign change in [" + std::to_string(a) + ", " + std::to_string(b) + "]; widening");
        if (fa > 0.0) {
            b = a;
            fb = fa;
            a -= 0.5;
            fa = eval(a);
        } else {
            a = b;
            fa = fb;
            b += 0.5;
            fb = eval(b);
        }
    }
    // Illinois variant of regula falsi: secant steps that keep the bracket.
    double c = b;
    for (int it = 0; it < 40; ++it) {
        c = b - fb * (b - a) / (fb - fa);
        const double fc = eval(c);
        if (fc * fb < 0.0) {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
        if (std::abs(b - a) < tol || fc == 0.0) break;
    }
    res.L = c;
    res.flower = fl;
    res.vortex = vx;
    return res;
}

}  // namespace magnex
