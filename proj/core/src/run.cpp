#include "magnex/run.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <omp.h>

#include "magnex/demag.hpp"
#include "magnex/error.hpp"

namespace magnex {

Simulation::Simulation(PartitionedRHS& rhs, const IntegratorSpec& spec, VectorField3 m0, double t0)
    : rhs_(&rhs), integrator_(spec, rhs.material().grid), m_(std::move(m0)), t_(t0) {
    if (!(m_.grid() == rhs.material().grid)) throw Error("simulation: state and material grids differ");
    renormalize(m_, rhs.material());
}

StepInfo Simulation::step(std::optional<double> dt) {
    const double h = dt.value_or(integrator_.spec().dt);
    const StepInfo info = integrator_.step(*rhs_, t_, m_, h);
    t_ += h;
    ++steps_;
    max_drift_ = std::max(max_drift_, info.drift);
    if (check_norm_) max_norm_ulps_ = std::max(max_norm_ulps_, norm_error_ulps(m_, rhs_->material()));
    return info;
}

double norm_error_ulps(const VectorField3& m, const MaterialMap& mat) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.cells(); ++i) {
        const double ms = mat.Ms[i];
        if (ms <= 0.0) continue;
        const double ulp = std::nextafter(ms, std::numeric_limits<double>::infinity()) - ms;
        worst = std::max(worst, std::abs(norm(m.get(i)) - ms) / ulp);
    }
    return worst;
}

std::string_view stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::Duration: return "duration";
        case StopReason::MaxSteps: return "max-steps";
        case StopReason::Converged: return "converged";
        case StopReason::NotConverged: return "not-converged";
        case StopReason::Callback: return "stopped";
    }
    return "?";
}

std::int64_t steps_for_duration(double duration, double dt) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(duration / dt - 1e-9)));
}

RunResult run_until(Simulation& sim, const StopCondition& stop, const SampleOptions& sampling) {
    if (!stop.duration && !stop.max_steps && !stop.equilibrium_tol) {
        throw Error("run_until: no stop condition given");
    }
    const auto start = std::chrono::steady_clock::now();
    const double dt = sim.integrator().spec().dt;
    const double t0 = sim.t();
    const std::optional<std::int64_t> duration_steps =
        stop.duration ? std::optional(steps_for_duration(*stop.duration, dt)) : std::nullopt;
    const auto& mat = sim.rhs().material();

    auto emit = [&] {
        if (!sampling.sink) return;
        Sample s;
        s.t = sim.t();
        s.mean = mean_normalized(sim.m(), mat);
        if (sampling.energies) s.energy = sim.rhs().energies(sim.t(), sim.m());
        s.n_demag_evals = sim.rhs().counters().demag();
        s.n_exch_evals = sim.rhs().counters().exchange();
        s.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        sampling.sink(s);
    };

    RunResult result;
    emit();
    double next_sample = t0 + sampling.interval;
    bool sampled_last = true;
    Vec3 prev = stop.equilibrium_tol ? mean_normalized(sim.m(), mat) : Vec3{};
    std::int64_t n = 0;
    while (true) {
        if (duration_steps && n >= *duration_steps) {
            result.reason = StopReason::Duration;
            break;
        }
        if (stop.max_steps && n >= *stop.max_steps) {
            result.reason = stop.equilibrium_tol ? StopReason::NotConverged : StopReason::MaxSteps;
            break;
        }
        double h = dt;
        if (duration_steps && n + 1 == *duration_steps) h = t0 + *stop.duration - sim.t();
        sim.step(h);
        ++n;

        sampled_last = false;
        if (sampling.interval <= 0.0 || sim.t() >= next_sample - 1e-9 * dt) {
            emit();
            sampled_last = true;
            while (sampling.interval > 0.0 && next_sample <= sim.t() + 1e-9 * dt) next_sample += sampling.interval;
        }
        if (stop.equilibrium_tol) {
            const Vec3 now = mean_normalized(sim.m(), mat);
            const Vec3 d = now - prev;
            result.last_change = std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)});
            prev = now;
            if (result.last_change < *stop.equilibrium_tol) {
                result.reason = StopReason::Converged;
                break;
            }
        }
        if (sampling.on_step && !sampling.on_step(sim)) {
            result.reason = StopReason::Callback;
            break;
        }
    }
    if (!sampled_last) emit();
    result.steps = n;
    result.t = sim.t();
    return result;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
    out_ << header() << '\n';
}

const char* CsvWriter::header() {
    return "t,mx,my,mz,e_demag,e_exch,e_anis,e_total,n_demag_evals,n_exch_evals,wall_s";
}

void CsvWriter::write(const Sample& s) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%lld,%lld,%.6f",
                  s.t, s.mean.x, s.mean.y, s.mean.z, s.energy.e_demag, s.energy.e_exch,
                  s.energy.e_anis, s.energy.total(), static_cast<long long>(s.n_demag_evals),
                  static_cast<long long>(s.n_exch_evals), s.wall_s);
    out_ << buf << '\n';
}

void set_thread_count(int n) {
    if (n < 1) return;
    omp_set_num_threads(n);
    set_fft_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace magnex
