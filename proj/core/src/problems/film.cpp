#include <chrono>
#include <cmath>

#include "magnex/error.hpp"
#include "magnex/problems.hpp"

namespace magnex {

PartitionedRHS film_rhs(const FilmOptions& opt, double alpha) {
    const GridSpec g = film_grid(opt);
    MaterialMap mat(g, opt.Ms, opt.A, alpha);
    PhysicsOptions phys;
    phys.set(Term::Bias, true);
    phys.set(Term::Demag, true);
    phys.set(Term::Exchange, true);
    std::unique_ptr<DemagBackend> demag = opt.demag ? opt.demag(g) : std::make_unique<FftDemagBackend>(g);
    PartitionedRHS rhs(std::move(mat), phys, std::move(demag));
    rhs.all_slow();
    if (opt.method == Method::MriKw3) rhs.assign(Term::Exchange, Partition::Fast);
    return rhs;
}

namespace {

IntegratorSpec film_spec(const FilmOptions& opt, const MaterialMap& mat) {
    IntegratorSpec spec;
    spec.method = opt.method;
    spec.theta = opt.theta;
    if (opt.dt > 0.0) {
        spec.dt = opt.dt;
    } else {
        const double est = stable_dt_estimate(mat, true);
        spec.dt = opt.sample_interval / std::ceil(opt.sample_interval / est);
    }
    return spec;
}

double max_torque(PartitionedRHS& rhs, const VectorField3& m) {
    VectorField3 h;
    rhs.effective_field(0.0, m, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.cells(); ++i) {
        const double ms = rhs.material().Ms[i];
        if (ms <= 0.0) continue;
        worst = std::max(worst, norm(cross(m.get(i) * (1.0 / ms), h.get(i))));
    }
    return worst;
}

}  // namespace

GridSpec film_grid(const FilmOptions& opt) {
    if (opt.refine < 1) throw Error("film: refine must be >= 1");
    const auto base_x = 160 * opt.refine, base_y = 40 * opt.refine;
    const auto nx = std::max<std::int64_t>(1, std::llround(base_x * opt.extent));
    const auto ny = std::max<std::int64_t>(1, std::llround(base_y * opt.extent));
    return GridSpec(nx, ny, 1, opt.Lx / base_x, opt.Ly / base_y, opt.Lz);
}

Vec3 film_field(int field_id) {
    if (field_id == 1) return {-19576.0, 3422.0, 0.0};
    if (field_id == 2) return {-28259.0, -5013.0, 0.0};
    throw Error("film: field id must be 1 or 2, got " + std::to_string(field_id));
}

SStateReport film_s_state(const FilmOptions& opt) {
    PartitionedRHS rhs = film_rhs(opt, opt.s_alpha);
    const Expr ramp = Expr::parse("1e5 * min(1, max(0, (30e-12 - t) / 10e-12))");
    rhs.set_bias(BiasSource(std::array<Expr, 3>{ramp, ramp, ramp}));
    const IntegratorSpec spec = film_spec(opt, rhs.material());
    Simulation sim(rhs, spec, VectorField3(rhs.material().grid, Vec3{opt.Ms, 0.0, 0.0}));

    StopCondition ramp_stop;
    ramp_stop.duration = 30e-12;
    run_until(sim, ramp_stop);

    SStateReport rep;
    rhs.set_bias(BiasSource(Vec3{}));
    EnergyMonitor mon;
    const double km = magnetostatic_energy_density(opt.Ms);
    SampleOptions so;
    so.interval = 10e-12;
    so.energies = false;
    so.sink = [&](const Sample& s) {
        mon.observe(rhs.energies(s.t, sim.m(), ExchangeEnergyForm::FieldConsistent).total(), 1e-3 * km);
    };
    StopCondition relax;
    relax.duration = opt.s_relax;
    run_until(sim, relax, so);

    rep.energy_monotone = mon.monotone;
    rep.worst_energy_rise = mon.worst;
    rep.m = sim.m();
    rep.mean = mean_normalized(sim.m(), rhs.material());
    rep.residual_torque = max_torque(rhs, sim.m());
    rep.max_norm_ulps = sim.max_norm_ulps();
    return rep;
}

FilmRun film_switching(int field_id, const VectorField3& start, const FilmOptions& opt,
                       const std::filesystem::path& csv) {
    PartitionedRHS rhs = film_rhs(opt, opt.alpha);
    rhs.set_bias(BiasSource(film_field(field_id)));
    const IntegratorSpec spec = film_spec(opt, rhs.material());
    if (!(start.grid() == rhs.material().grid)) throw Error("film: starting state has a different grid");
    Simulation sim(rhs, spec, start);

    FilmRun out;
    std::optional<CsvWriter> writer;
    if (!csv.empty()) writer.emplace(csv);
    SampleOptions so;
    so.interval = opt.sample_interval;
    so.energies = !csv.empty();
    so.sink = [&](const Sample& s) {
        out.trace.push_back(s);
        if (writer) writer->write(s);
    };
    double prev_t = sim.t();
    double prev_mx = mean_normalized(sim.m(), rhs.material()).x;
    so.on_step = [&](const Simulation& s) {
        const double mx = mean_normalized(s.m(), s.rhs().material()).x;
        if (!out.crossing_time && prev_mx > 0.0 && mx <= 0.0) {
            out.crossing_time = prev_t + (s.t() - prev_t) * prev_mx / (prev_mx - mx);
            out.crossing_snapshot = s.m();
        }
        prev_mx = mx;
        prev_t = s.t();
        return true;
    };
    StopCondition stop;
    stop.duration = opt.duration;
    const auto t0 = std::chrono::steady_clock::now();
    run_until(sim, stop, so);
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.max_norm_ulps = sim.max_norm_ulps();
    out.counters = rhs.counters();
    return out;
}

double trace_at(const std::vector<Sample>& trace, double t, int c) {
    if (trace.empty()) throw Error("trace_at: empty trace");
    if (t <= trace.front().t) return trace.front().mean[c];
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].t >= t) {
            const double w = (t - trace[i - 1].t) / (trace[i].t - trace[i - 1].t);
            return trace[i - 1].mean[c] * (1.0 - w) + trace[i].mean[c] * w;
        }
    }
    return trace.back().mean[c];
}

Vec3 trace_max_diff(const std::vector<Sample>& a, const std::vector<Sample>& b, double until) {
    Vec3 d{};
    for (const Sample& s : a) {
        if (s.t > until * (1.0 + 1e-12)) break;
        for (int c = 0; c < 3; ++c) d[c] = std::max(d[c], std::abs(s.mean[c] - trace_at(b, s.t, c)));
    }
    return d;
}

VectorField3 resample(const VectorField3& m, const GridSpec& target) {
    const GridSpec& src = m.grid();
    VectorField3 out(target);
    for (std::int64_t k = 0; k < target.nz; ++k)
        for (std::int64_t j = 0; j < target.ny; ++j)
            for (std::int64_t i = 0; i < target.nx; ++i) {
                const auto pick = [](std::int64_t c, std::int64_t nt, std::int64_t ns) {
                    return std::min(ns - 1, static_cast<std::int64_t>((c + 0.5) * ns / nt));
                };
                out.set(target.index(i, j, k),
                        m.get(src.index(pick(i, target.nx, src.nx), pick(j, target.ny, src.ny),
                                        pick(k, target.nz, src.nz))));
            }
    return out;
}

}  // namespace magnex
