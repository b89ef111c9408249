#include <cmath>
#include <fstream>
#include <sstream>

#include "magnex/error.hpp"
#include "magnex/problems.hpp"

namespace magnex {

namespace {

const Vec3 kDiagonal{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};

/// Signed |H| / Ms along the diagonal where the projected mean changes sign.
std::optional<double> coercivity(const std::vector<HysteresisPoint>& branch, double Ms) {
    for (std::size_t k = 1; k < branch.size(); ++k) {
        const double p0 = dot(branch[k - 1].mean, kDiagonal), p1 = dot(branch[k].mean, kDiagonal);
        if ((p0 > 0.0) != (p1 > 0.0)) {
            const double h0 = dot(branch[k - 1].H, kDiagonal), h1 = dot(branch[k].H, kDiagonal);
            return std::abs(h0 + (h1 - h0) * p0 / (p0 - p1)) / Ms;
        }
    }
    return std::nullopt;
}

}  // namespace

GridSpec platelet_grid(double d_over_lex, double A, double Ms) {
    if (!(d_over_lex > 0.0)) throw Error("platelet: d/lex must be positive");
    const double d = d_over_lex * exchange_length(A, Ms);
    return GridSpec(50, 10, 1, 5.0 * d / 50, d / 10, 0.1 * d);
}

HysteresisResult hysteresis_sweep(const HysteresisOptions& opt,
                                  const std::function<void(const std::string&)>& log) {
    if (opt.increments < 2 || opt.increments % 2) throw Error("hysteresis: increments must be even and >= 2");
    const GridSpec g = platelet_grid(opt.d_over_lex, opt.A, opt.Ms);
    PhysicsOptions phys;
    phys.set(Term::Bias, true);
    phys.set(Term::Demag, true);
    phys.set(Term::Exchange, true);
    phys.llg.precession = false;
    PartitionedRHS rhs(MaterialMap(g, opt.Ms, opt.A, opt.alpha), phys, std::make_unique<FftDemagBackend>(g, opt.demag));
    rhs.all_slow();

    IntegratorSpec spec;
    spec.method = Method::RK4;
    spec.dt = opt.dt > 0.0 ? opt.dt : stable_dt_estimate(rhs.material(), true);
    Simulation sim(rhs, spec, VectorField3(g, kDiagonal * opt.Ms));

    HysteresisResult res;
    res.d_over_lex = opt.d_over_lex;
    EnergyMonitor mon;
    const double km = magnetostatic_energy_density(opt.Ms);
    SampleOptions so;
    so.interval = opt.energy_stride * spec.dt;
    so.energies = false;
    so.sink = [&](const Sample& s) {
        mon.observe(rhs.energies(s.t, sim.m(), ExchangeEnergyForm::FieldConsistent).total(), 1e-3 * km);
    };
    StopCondition stop;
    stop.equilibrium_tol = opt.tol;
    stop.max_steps = opt.max_steps_per_increment;

    for (int branch = 0; branch < 2; ++branch) {
        auto& out = branch == 0 ? res.forward : res.reverse;
        const double sign = branch == 0 ? 1.0 : -1.0;
        for (int k = 0; k <= opt.increments; ++k) {
            const double s = sign * 0.08 * opt.Ms * (1.0 - 2.0 * k / opt.increments);
            const Vec3 H{s, s, s};
            rhs.set_bias(BiasSource(H));
            mon.reset();
            const RunResult r = run_until(sim, stop, so);
            if (!r.ok()) {
                std::ostringstream os;
                os << "hysteresis: d/lex = " << opt.d_over_lex << " did not equilibrate at "
                   << (branch == 0 ? "forward" : "reverse") << " increment " << k << " (last change "
                   << r.last_change << ")";
                throw Error(os.str());
            }
            out.push_back({H, mean_normalized(sim.m(), rhs.material()), r.steps});
            if (log) {
                std::ostringstream os;
                os.precision(6);
                os << (branch == 0 ? "fwd " : "rev ") << k << " H/Ms=" << s / opt.Ms << " m=(" << out.back().mean.x
                   << ", " << out.back().mean.y << ", " << out.back().mean.z << ") steps=" << r.steps;
                log(os.str());
            }
        }
    }

    const int half = opt.increments / 2;
    res.remanence_forward = res.forward[half].mean;
    res.remanence_reverse = res.reverse[half].mean;
    res.coercivity_forward = coercivity(res.forward, opt.Ms);
    res.coercivity_reverse = coercivity(res.reverse, opt.Ms);
    for (std::size_t k = 0; k < res.forward.size(); ++k) {
        const Vec3 d = res.forward[k].mean + res.reverse[k].mean;
        res.antisymmetry = std::max({res.antisymmetry, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
    }
    res.energy_monotone = mon.monotone;
    res.worst_energy_rise = mon.worst;
    res.max_norm_ulps = sim.max_norm_ulps();
    return res;
}

void write_hysteresis_csv(const std::filesystem::path& path, const HysteresisResult& r) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << "branch,increment,hx,hy,hz,mx,my,mz,steps\n";
    for (int b = 0; b < 2; ++b) {
        const auto& pts = b == 0 ? r.forward : r.reverse;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const auto& p = pts[k];
            out << (b == 0 ? "forward" : "reverse") << ',' << k << ',' << p.H.x << ',' << p.H.y << ',' << p.H.z
                << ',' << p.mean.x << ',' << p.mean.y << ',' << p.mean.z << ',' << p.steps << '\n';
        }
    }
}

}  // namespace magnex
