#include <chrono>
#include <cmath>
#include <random>

#include "magnex/error.hpp"
#include "magnex/problems.hpp"

namespace magnex {

VectorField3 perturbed_film_state(const FilmOptions& opt, double perturbation, std::uint64_t seed) {
    const GridSpec g = film_grid(opt);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, perturbation);
    VectorField3 m(g);
    const Vec3 base = Vec3{1.0, 0.1, 0.0} * (1.0 / norm(Vec3{1.0, 0.1, 0.0}));
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const Vec3 d{noise(rng), noise(rng), noise(rng)};
        const Vec3 v = base + d;
        m.set(i, v * (opt.Ms / norm(v)));
    }
    return m;
}

bool stable_at(const FilmOptions& opt, double dt, const StabilityOptions& s) {
    PartitionedRHS rhs = film_rhs(opt, opt.alpha);
    rhs.set_bias(BiasSource(film_field(1)));
    IntegratorSpec spec;
    spec.method = opt.method;
    spec.theta = opt.theta;
    spec.dt = dt;
    Simulation sim(rhs, spec, perturbed_film_state(opt, s.perturbation, s.seed));
    sim.set_norm_check(false);
    const std::int64_t steps = steps_for_duration(s.window, dt);
    try {
        for (std::int64_t n = 0; n < steps; ++n) {
            sim.step();
            if (sim.max_drift() > 0.1) return false;
        }
    } catch (const StepFailure&) {
        return false;
    }
    const Vec3 mean = mean_normalized(sim.m(), rhs.material());
    return std::isfinite(mean.x) && std::isfinite(mean.y) && std::isfinite(mean.z);
}

double max_stable_dt(const FilmOptions& opt, double lo, double hi, const StabilityOptions& s) {
    if (!stable_at(opt, lo, s)) throw Error("max_stable_dt: lower bound is not stable");
    if (stable_at(opt, hi, s)) throw Error("max_stable_dt: upper bound is stable");
    while (hi / lo > 1.0 + s.rel_tol) {
        const double mid = std::sqrt(lo * hi);
        (stable_at(opt, mid, s) ? lo : hi) = mid;
    }
    return lo;
}

IntegratorCost integrator_cost(const FilmOptions& opt, double dt, double interval, int repeats) {
    if (repeats < 1) throw Error("integrator_cost: repeats must be >= 1");
    PartitionedRHS rhs = film_rhs(opt, opt.alpha);
    rhs.set_bias(BiasSource(film_field(1)));
    IntegratorSpec spec;
    spec.method = opt.method;
    spec.theta = opt.theta;
    spec.dt = dt;
    Simulation sim(rhs, spec, perturbed_film_state(opt, 0.0, 0));
    sim.set_norm_check(false);
    StopCondition stop;
    stop.duration = interval;

    IntegratorCost c;
    c.method = opt.method;
    c.dt = dt;
    // Warm-up interval (plans, caches); counters cover the first timed interval only.
    run_until(sim, stop);
    rhs.reset_counters();
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) {
        const RunResult res = run_until(sim, stop);
        if (r == 0) {
            c.steps = res.steps;
            c.exchange_evals = rhs.counters().exchange();
            c.demag_evals = rhs.counters().demag();
        }
    }
    c.wall_per_interval = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
    return c;
}

}  // namespace magnex
