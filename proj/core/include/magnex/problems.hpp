#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "magnex/config.hpp"
#include "magnex/run.hpp"

namespace magnex {

/// sqrt(A / Km) with Km = 0.5 mu0 Ms^2.
double exchange_length(double A, double Ms);
double magnetostatic_energy_density(double Ms);

/// Energies in units of Km plus the mean of M/Ms.
struct StateSummary {
    double e_demag = 0.0, e_exch = 0.0, e_anis = 0.0, e_total = 0.0;
    Vec3 mean{};
    std::int64_t steps = 0;
    bool converged = false;
};

// ---- cube single-domain limit -------------------------------------------------------------

enum class CubeSeed { Flower, Vortex };

struct CubeOptions {
    int n = 10;
    double Ms = 8e5;
    double A = 1.005154e-11;
    double alpha = 0.5;
    /// Ku in units of Km.
    double ku_over_km = 0.1;
    /// Relaxation: RK4 for at most `relax_time`, stopping early at `equilibrium_tol`.
    double dt = 0.0;  // 0 picks a stable step from the cell size
    double relax_time = 2e-9;
    double equilibrium_tol = 1e-10;
    ExchangeEnergyForm energy_form = ExchangeEnergyForm::CentralDifference;
    DemagOptions demag;
    /// Axis along which the vortex seed flips between +x and -x.
    int vortex_split_axis = 0;
};

struct CubeState {
    StateSummary summary;
    VectorField3 m;
    double max_norm_ulps = 0.0;
    bool energy_monotone = true;
    double worst_energy_rise = 0.0;
};

/// Relaxes the cube of edge L (in exchange lengths) from a seed or a previous state.
CubeState relax_cube(double L_lex, CubeSeed seed, const CubeOptions& opt,
                     const VectorField3* start = nullptr);

struct CrossoverResult {
    int n = 0;
    double L = 0.0;  // exchange lengths
    StateSummary flower, vortex;
    int evaluations = 0;
    std::vector<std::pair<double, double>> history;  // (L, e_flower - e_vortex)
};

/// L where flower and vortex total energies are equal: bracketing then secant on dE(L).
CrossoverResult cube_crossover(const CubeOptions& opt, double L_lo = 7.5, double L_hi = 9.0,
                               double tol = 1e-3,
                               const std::function<void(const std::string&)>& log = {});

/// Tracks rises of a relaxing total energy between consecutive observations.
struct EnergyMonitor {
    double limit = 1e-6;
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool monotone = true;
    double worst = 0.0;

    void reset() { prev = std::numeric_limits<double>::quiet_NaN(); }
    /// `scale` floors the denominator of the relative rise for energies near zero.
    void observe(double e, double scale);
};

/// Explicit step comfortably inside the RK4 stability region of the stiffest local term.
double stable_dt_estimate(const MaterialMap& mat, bool demag);

/// Richardson extrapolation from three resolutions with ratio 2.
struct Richardson {
    double order = 0.0;
    double limit = 0.0;
};
Richardson richardson(double coarse, double medium, double fine);

// ---- thin-film dynamics (500 x 125 x 3 nm) ---------------------------------------------------

using DemagFactory = std::function<std::unique_ptr<DemagBackend>(const GridSpec&)>;

struct FilmOptions {
    /// Cells per 3.125 nm: 1 gives 160 x 40, 2 gives 320 x 80, 4 gives 640 x 160.
    int refine = 1;
    /// Fraction of the in-plane extent kept (1 = full film); used for reduced-extent cost runs.
    double extent = 1.0;
    double Lx = 500e-9, Ly = 125e-9, Lz = 3e-9;
    double Ms = 8e5, A = 1.3e-11, alpha = 0.02;
    Method method = Method::RK4;
    double dt = 0.0;  // 0 picks a step that divides the sample interval
    double theta = 0.1;
    double sample_interval = 1e-12;
    double duration = 2e-9;
    /// S-state protocol: alpha 0.5, [1e5, 1e5, 1e5] A/m for 20 ps, ramp to zero over 10 ps, relax.
    double s_alpha = 0.5;
    double s_relax = 1e-9;
    DemagFactory demag;  // empty: FFT backend
};

GridSpec film_grid(const FilmOptions& opt);
/// Bias, demag and exchange on the film; MRI puts exchange in the fast partition.
PartitionedRHS film_rhs(const FilmOptions& opt, double alpha);
/// Field 1 = (-19576, 3422, 0) A/m, Field 2 = (-28259, -5013, 0) A/m.
Vec3 film_field(int field_id);

struct SStateReport {
    VectorField3 m;
    Vec3 mean{};
    /// max |m x H_eff| / Ms over the film at the end of the relaxation.
    double residual_torque = 0.0;
    double max_norm_ulps = 0.0;
    bool energy_monotone = true;
    double worst_energy_rise = 0.0;
};

SStateReport film_s_state(const FilmOptions& opt);

struct FilmRun {
    std::vector<Sample> trace;
    std::optional<double> crossing_time;
    VectorField3 crossing_snapshot;
    double max_norm_ulps = 0.0;
    EvalCounters counters;
    double wall_s = 0.0;
};

/// Switching run from `start` under Field `field_id`; samples at opt.sample_interval.
FilmRun film_switching(int field_id, const VectorField3& start, const FilmOptions& opt,
                       const std::filesystem::path& csv = {});

/// Trace component c (0..2) linearly interpolated at time t.
double trace_at(const std::vector<Sample>& trace, double t, int c);
/// Largest |a_c(t) - b_c(t)| over samples of `a` with t <= until.
Vec3 trace_max_diff(const std::vector<Sample>& a, const std::vector<Sample>& b, double until);

/// Cell-centre nearest-neighbour resampling onto a finer or coarser grid of the same extent.
VectorField3 resample(const VectorField3& m, const GridSpec& target);

// ---- platelet hysteresis (L/d = 5, t/d = 0.1, 50 x 10 x 1 cells) ---------------------------------

struct HysteresisOptions {
    double d_over_lex = 3.0;
    /// Field increments per branch; the field runs 0.08 Ms (1,1,1) -> -0.08 Ms (1,1,1).
    int increments = 100;
    double Ms = 8e5, A = 1.005154e-11, alpha = 0.5;
    /// Equilibrium: every component of the mean of M/Ms changes by less than this per step.
    double tol = 1e-9;
    std::int64_t max_steps_per_increment = 2'000'000;
    double dt = 0.0;  // 0 picks a stable step
    /// Steps between energy checks during each relaxation.
    int energy_stride = 50;
    DemagOptions demag;
};

struct HysteresisPoint {
    Vec3 H{};     // A/m
    Vec3 mean{};  // mean of M/Ms
    std::int64_t steps = 0;
};

struct HysteresisResult {
    double d_over_lex = 0.0;
    std::vector<HysteresisPoint> forward, reverse;
    /// Mean of M/Ms at zero field.
    Vec3 remanence_forward{}, remanence_reverse{};
    /// |H| / Ms where the mean projected on (1,1,1) changes sign.
    std::optional<double> coercivity_forward, coercivity_reverse;
    /// max_k max_i |reverse[k].mean_i + forward[k].mean_i|.
    double antisymmetry = 0.0;
    bool energy_monotone = true;
    double worst_energy_rise = 0.0;
    double max_norm_ulps = 0.0;
};

GridSpec platelet_grid(double d_over_lex, double A, double Ms);
HysteresisResult hysteresis_sweep(const HysteresisOptions& opt,
                                  const std::function<void(const std::string&)>& log = {});
void write_hysteresis_csv(const std::filesystem::path& path, const HysteresisResult& r);

// ---- DMI nanodot -------------------------------------------------------------------------------

/// 4 sqrt(A K) / pi.
double critical_dmi(double A, double K);

struct NanodotOptions {
    double R = 50e-9;
    double D = 4.5e-3;
    double A = 16e-12, Ms = 1.1e6, alpha = 0.05, Ku = 5.5e5;
    double dx = 0.78125e-9, dz = 0.25e-9;
    double relax_time = 2e-9;
    /// Stop early once max |m x H_eff| falls below this (A/m); 0 disables. Checked every 100 steps.
    double torque_tol = 0.0;
    double dt = 0.0;  // 0 picks a stable step
};

/// Seeds with theta(r) = turns * pi * (1 - r / R): 0 uniform, 1 skyrmion, 2 and 3 for the 2pi and 3pi states.
VectorField3 nanodot_seed(const MaterialMap& mat, int turns, double R, double D);
MaterialMap nanodot_material(const NanodotOptions& opt);

struct RadialProfile {
    std::vector<double> r, mz;  // bin centres, azimuthal mean of mz
};

/// Azimuthal mean of mz over the magnetic cells of the z = 0 layer, bins of width `bin`.
RadialProfile radial_profile(const VectorField3& m, const MaterialMap& mat, double bin);
int count_sign_changes(const RadialProfile& p);
/// First zero crossing of mz(r), linearly interpolated.
std::optional<double> first_crossing(const RadialProfile& p);

struct NanodotState {
    VectorField3 m;
    RadialProfile profile;
    int crossings = 0;
    std::optional<double> Rs;
    double residual_torque = 0.0;
    double energy = 0.0;  // J/m^3 averaged over the grid
    double t = 0.0;
    double max_norm_ulps = 0.0;
    bool energy_monotone = true;
    double worst_energy_rise = 0.0;
};

NanodotState relax_nanodot(const NanodotOptions& opt, int turns);

// ---- integrator cost accounting ---------------------------------------------------------------

struct StabilityOptions {
    /// Simulated time per trial.
    double window = 5e-12;
    /// Relative random perturbation of the start state that seeds the stiff modes.
    double perturbation = 0.01;
    std::uint64_t seed = 7;
    /// Bisection stops when hi / lo < 1 + rel_tol.
    double rel_tol = 0.02;
};

/// Perturbed uniform film state, deterministic in `seed`.
VectorField3 perturbed_film_state(const FilmOptions& opt, double perturbation, std::uint64_t seed);
/// True when a run of opt.method at `dt` keeps every mean component finite and the pre-projection
/// drift of |M| below 10 %.
bool stable_at(const FilmOptions& opt, double dt, const StabilityOptions& s);
/// Largest stable dt between `lo` (stable) and `hi` (unstable), by bisection in log(dt).
double max_stable_dt(const FilmOptions& opt, double lo, double hi, const StabilityOptions& s);

struct IntegratorCost {
    Method method = Method::RK4;
    double dt_stable = 0.0;
    double dt = 0.0;
    std::int64_t steps = 0;
    std::int64_t exchange_evals = 0, demag_evals = 0;
    /// Mean wall time per `interval`, over `repeats` intervals.
    double wall_per_interval = 0.0;
};

/// Counters and wall time for one method at step `dt` over `interval`, repeated `repeats` times.
IntegratorCost integrator_cost(const FilmOptions& opt, double dt, double interval, int repeats);

// ---- surrogate training data ------------------------------------------------------------------

struct DatasetOptions {
    int runs = 2;
    std::uint64_t seed = 1;
    std::int64_t steps = 400'000;
    double dt = 5e-15;
    int frames = 20;
    /// |mu0 H| range in mT; directions uniform on the sphere, projected into the film plane.
    double b_min_mT = 25.0, b_max_mT = 40.0;
    FilmOptions film;
};

struct DatasetRun {
    int id = 0;
    Vec3 field{};  // A/m
    std::vector<double> times;
    std::vector<std::string> files;
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    std::int64_t steps = 0;
    double dt = 0.0;
    GridSpec grid{};
    std::vector<DatasetRun> runs;
};

/// Field of run `id` for a given seed; independent of the other runs.
Vec3 dataset_field(std::uint64_t seed, int id, double b_min_mT, double b_max_mT);
/// Bytes the dataset will occupy on disk.
std::uintmax_t dataset_bytes(const DatasetOptions& opt);
/// Forward-Euler runs from `start` writing (M, H_demag) MAGF frames plus manifest.json.
/// Throws when the target file system lacks the space.
DatasetManifest generate_dataset(const DatasetOptions& opt, const VectorField3& start,
                                 const std::filesystem::path& out_dir,
                                 const std::function<void(const std::string&)>& log = {});
std::string manifest_json(const DatasetManifest& m);

}  // namespace magnex
