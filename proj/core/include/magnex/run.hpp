#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "magnex/integrator.hpp"
#include "magnex/physics.hpp"

namespace magnex {

/// Magnetization state advanced by one integrator over one partitioned RHS.
class Simulation {
public:
    Simulation(PartitionedRHS& rhs, const IntegratorSpec& spec, VectorField3 m0, double t0 = 0.0);

    PartitionedRHS& rhs() { return *rhs_; }
    const PartitionedRHS& rhs() const { return *rhs_; }
    Integrator& integrator() { return integrator_; }
    const VectorField3& m() const { return m_; }
    VectorField3& m() { return m_; }
    double t() const { return t_; }
    void set_t(double t) { t_ = t; }
    std::int64_t steps() const { return steps_; }

    /// One step of size dt (spec dt by default).
    StepInfo step(std::optional<double> dt = {});

    /// Largest pre-projection drift | |M|/Ms - 1 | over all steps so far.
    double max_drift() const { return max_drift_; }
    /// Largest | |M| - Ms | in units of ulp(Ms) after any step so far.
    double max_norm_ulps() const { return max_norm_ulps_; }
    void set_norm_check(bool on) { check_norm_ = on; }

private:
    PartitionedRHS* rhs_;
    Integrator integrator_;
    VectorField3 m_;
    double t_;
    std::int64_t steps_ = 0;
    double max_drift_ = 0.0;
    double max_norm_ulps_ = 0.0;
    bool check_norm_ = true;
};

/// Largest | |M| - Ms | over magnetic cells in units of ulp(Ms).
double norm_error_ulps(const VectorField3& m, const MaterialMap& mat);

struct StopCondition {
    /// Stop after this much simulated time; the last step is shortened to land on it.
    std::optional<double> duration;
    std::optional<std::int64_t> max_steps;
    /// Stop once every component of the mean of M/Ms changes by less than this over one step.
    std::optional<double> equilibrium_tol;
};

enum class StopReason { Duration, MaxSteps, Converged, NotConverged, Callback };

std::string_view stop_reason_name(StopReason r);

struct RunResult {
    StopReason reason = StopReason::Duration;
    std::int64_t steps = 0;
    double t = 0.0;
    /// Largest component change of the mean of M/Ms over the last step.
    double last_change = 0.0;

    bool ok() const { return reason != StopReason::NotConverged; }
};

struct Sample {
    double t = 0.0;
    Vec3 mean{};
    EnergyBreakdown energy{};
    std::int64_t n_demag_evals = 0;
    std::int64_t n_exch_evals = 0;
    double wall_s = 0.0;
};

struct SampleOptions {
    /// Simulated time between samples; 0 samples every step.
    double interval = 0.0;
    bool energies = true;
    std::function<void(const Sample&)> sink;
    /// Called after every step; returning false stops the run.
    std::function<bool(const Simulation&)> on_step;
};

/// Advances until the stop condition holds. Reaching max_steps while an equilibrium
/// tolerance is set yields NotConverged.
RunResult run_until(Simulation& sim, const StopCondition& stop, const SampleOptions& sampling = {});

/// Steps needed to cover `duration` with step `dt` (last step shortened).
std::int64_t steps_for_duration(double duration, double dt);

/// Time-series writer: t, mx, my, mz, e_demag, e_exch, e_anis, e_total, n_demag_evals,
/// n_exch_evals, wall_s.
/// OpenMP and FFT thread count for subsequent work; n < 1 keeps the runtime default.
void set_thread_count(int n);
/// Current OpenMP thread count.
int thread_count();

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    void write(const Sample& s);
    void flush() { out_.flush(); }

    static const char* header();

private:
    std::ofstream out_;
};

}  // namespace magnex
