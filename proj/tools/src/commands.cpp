#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "magnex/config.hpp"
#include "magnex/error.hpp"
#include "magnex/fno.hpp"
#include "magnex/magf.hpp"
#include "magnex/problems.hpp"
#include "params.hpp"

namespace magnex::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kStd2 = R"([std2]
sizes = [3]
increments = 100
tol = 1e-9
alpha = 0.5
max_steps = 2000000
reference = ""
)";
constexpr const char* kStd2Paper = R"([std2]
sizes = [3, 6, 9, 12, 15, 18, 21, 24]
increments = 1000
tol = 1e-9
alpha = 0.5
max_steps = 2000000
reference = ""
)";
constexpr const char* kStd3 = R"([std3]
n = [10]
L_lo = 7.5
L_hi = 9.0
tol = 1e-3
relax_time = 2e-9
split_axis = 0
)";
constexpr const char* kStd3Paper = R"([std3]
n = [10, 20, 40]
L_lo = 7.5
L_hi = 9.0
tol = 1e-3
relax_time = 2e-9
split_axis = 0
)";
constexpr const char* kStd4 = R"([std4]
fields = [1, 2]
refine = [1]
duration = 2e-9
method = rk4
sample_interval = 1e-12
s_state = ""
s_torque_warn = 100
agreement = 0.05
reference = ""
)";
constexpr const char* kStd4Paper = R"([std4]
fields = [1, 2]
refine = [1, 2]
duration = 2e-9
method = rk4
sample_interval = 1e-12
s_state = ""
s_torque_warn = 100
agreement = 0.05
reference = ""
)";
constexpr const char* kSkyrmion = R"([skyrmion]
D = 4.5e-3
R = 50e-9
seed = skyrmion
relax_time = 1e-9
Dc = 0
sweep = []
radii = [50e-9]
A = 16e-12
Ms = 1.1e6
Ku = 5.5e5
alpha = 0.05
dx = 0.78125e-9
dz = 0.25e-9
)";
constexpr const char* kSkyrmionPaper = R"([skyrmion]
D = 4.5e-3
R = 50e-9
seed = all
relax_time = 2e-9
Dc = 0
sweep = [0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4]
radii = [25e-9, 50e-9, 75e-9, 100e-9]
A = 16e-12
Ms = 1.1e6
Ku = 5.5e5
alpha = 0.05
dx = 0.78125e-9
dz = 0.25e-9
)";
constexpr const char* kBench = R"([bench]
refine = 4
extent = 0.25
interval = 1.25e-13
repeats = 40
window = 5e-12
dt_rk4 = 2.5e-14
dt_mri = 1.25e-13
lo = 5e-15
hi = 1e-12
theta = 0.1
)";
constexpr const char* kBenchPaper = R"([bench]
refine = 4
extent = 1
interval = 1.25e-13
repeats = 10
window = 5e-12
dt_rk4 = 2.5e-14
dt_mri = 1.25e-13
lo = 5e-15
hi = 1e-12
theta = 0.1
)";
constexpr const char* kDataset = R"([dataset]
runs = 2
steps = 40000
frames = 20
dt = 5e-15
b_min_mT = 25
b_max_mT = 40
refine = 1
s_state = ""
)";
constexpr const char* kDatasetPaper = R"([dataset]
runs = 1000
steps = 400000
frames = 20
dt = 5e-15
b_min_mT = 25
b_max_mT = 40
refine = 1
s_state = ""
)";
constexpr const char* kInfer = R"([infer]
tol = 1e-5
)";

#define SAY(...) (std::printf(__VA_ARGS__), std::fputc('\n', stdout), std::fflush(stdout))

void log_line(const std::string& s) { SAY("  %s", s.c_str()); }

fs::path out_dir(const Common& c, const std::string& sub) {
    fs::path p = fs::path(c.out_dir) / sub;
    fs::create_directories(p);
    return p;
}

Params params(const Common& c, const std::string& section, const std::string& command) {
    return Params(section, defaults_for(command, c.paper_scale), c.config, c.sets);
}

Method parse_method(const std::string& s) {
    if (s == "rk4") return Method::RK4;
    if (s == "mri" || s == "mri-kw3") return Method::MriKw3;
    if (s == "euler") return Method::Euler;
    throw Error("unknown method '" + s + "' (rk4, mri, euler)");
}

const char* pass(bool ok) { return ok ? "ok" : "FAILED"; }

/// Rows of a numeric CSV keyed by header name.
std::map<std::string, std::vector<double>> read_numeric_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
    std::vector<std::string> names;
    std::stringstream hs(line);
    for (std::string n; std::getline(hs, n, ',');) names.push_back(n);
    std::map<std::string, std::vector<double>> cols;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t k = 0;
        for (std::string v; std::getline(ls, v, ','); ++k) {
            if (k < names.size()) cols[names[k]].push_back(std::strtod(v.c_str(), nullptr));
        }
    }
    return cols;
}

}  // namespace

const char* defaults_for(const std::string& command, bool paper) {
    if (command == "std2") return paper ? kStd2Paper : kStd2;
    if (command == "std3") return paper ? kStd3Paper : kStd3;
    if (command == "std4") return paper ? kStd4Paper : kStd4;
    if (command == "skyrmion") return paper ? kSkyrmionPaper : kSkyrmion;
    if (command == "bench-integrators") return paper ? kBenchPaper : kBench;
    if (command == "gen-dataset") return paper ? kDatasetPaper : kDataset;
    if (command == "infer-check") return kInfer;
    throw Error("no defaults for command '" + command + "'");
}

// ---- run ---------------------------------------------------------------------------------------

int cmd_run(const Common& c) {
    ScenarioConfig cfg = load_config(c.config, c.sets);
    for (const auto& w : cfg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (c.out_dir_given) cfg.output_dir = c.out_dir;
    if (cfg.threads > 0 && c.threads == 0) set_thread_count(cfg.threads);
    fs::create_directories(cfg.output_dir);
    std::unique_ptr<PartitionedRHS> rhs = build_rhs(cfg);
    Simulation sim(*rhs, cfg.integrator, build_initial(cfg, rhs->material()));
    CsvWriter csv(cfg.output_dir / "trajectory.csv");
    SampleOptions so;
    so.interval = cfg.sample_interval;
    so.sink = [&](const Sample& s) { csv.write(s); };
    const RunResult r = run_until(sim, cfg.stop, so);
    write_field(cfg.output_dir / "final.magf", sim.m());
    const Vec3 mean = mean_normalized(sim.m(), rhs->material());
    SAY("run: %s after %lld steps, t = %.6g s, <m> = (%.6f, %.6f, %.6f), |M| error %.1f ulp",
        std::string(stop_reason_name(r.reason)).c_str(), static_cast<long long>(r.steps), r.t, mean.x, mean.y,
        mean.z, sim.max_norm_ulps());
    return r.ok() ? 0 : 1;
}

// ---- std2 --------------------------------------------------------------------------------------

int cmd_std2(const Common& c) {
    const Params p = params(c, "std2", "std2");
    const fs::path dir = out_dir(c, "std2");
    HysteresisOptions opt;
    opt.increments = p.integer("increments");
    opt.tol = p.num("tol");
    opt.alpha = p.num("alpha");
    opt.max_steps_per_increment = p.integer("max_steps");
    std::map<double, std::vector<double>> reference;
    if (const std::string ref = p.str("reference"); !ref.empty()) {
        const auto cols = read_numeric_csv(ref);
        for (const char* k : {"d_over_lex", "mx_rem", "my_rem", "hc"}) {
            if (!cols.count(k)) throw Error(ref + ": column '" + k + "' missing");
        }
        for (std::size_t i = 0; i < cols.at("d_over_lex").size(); ++i) {
            reference[cols.at("d_over_lex")[i]] = {cols.at("mx_rem")[i], cols.at("my_rem")[i], cols.at("hc")[i]};
        }
    }

    bool ok = true;
    std::ofstream summary(dir / "summary.csv");
    summary << "d_over_lex,mx_rem_fwd,my_rem_fwd,mx_rem_rev,my_rem_rev,hc_fwd,hc_rev,antisymmetry\n";
    for (double d : p.list("sizes")) {
        opt.d_over_lex = d;
        SAY("std2: d/lex = %g, %d increments per branch", d, opt.increments);
        const HysteresisResult r = hysteresis_sweep(opt);
        char name[64];
        std::snprintf(name, sizeof name, "loop_d%g.csv", d);
        write_hysteresis_csv(dir / name, r);
        const double hf = r.coercivity_forward.value_or(NAN), hr = r.coercivity_reverse.value_or(NAN);
        summary << d << ',' << r.remanence_forward.x << ',' << r.remanence_forward.y << ','
                << r.remanence_reverse.x << ',' << r.remanence_reverse.y << ',' << hf << ',' << hr << ','
                << r.antisymmetry << '\n';
        const bool anti = r.antisymmetry <= 1e-3;
        const bool sym = std::abs(hf - hr) <= 0.01 * std::max(hf, hr);
        const bool norm_ok = r.max_norm_ulps <= 4.0;
        SAY("  remanence (%.5f, %.5f), coercivity |H|/Ms = %.5f / %.5f", r.remanence_forward.x,
            r.remanence_forward.y, hf, hr);
        SAY("  anti-symmetry %.3g [%s], coercivity symmetry [%s], energy monotone [%s], |M| %.1f ulp [%s]",
            r.antisymmetry, pass(anti), pass(sym), pass(r.energy_monotone), r.max_norm_ulps, pass(norm_ok));
        ok = ok && anti && sym && r.energy_monotone && norm_ok;
        if (auto it = reference.find(d); it != reference.end()) {
            const auto& ref = it->second;
            const bool m_ok = std::abs(r.remanence_forward.x - ref[0]) <= 0.05 * std::abs(ref[0]);
            const bool h_ok = std::abs(hf - ref[2]) <= 0.05 * std::abs(ref[2]);
            SAY("  reference: mx_rem %.5f vs %.5f [%s], Hc %.5f vs %.5f [%s]", r.remanence_forward.x, ref[0],
                pass(m_ok), hf, ref[2], pass(h_ok));
            ok = ok && m_ok && h_ok;
        } else {
            SAY("  reference: none supplied for d/lex = %g", d);
        }
    }
    return ok ? 0 : 1;
}

// ---- std3 --------------------------------------------------------------------------------------

int cmd_std3(const Common& c) {
    const Params p = params(c, "std3", "std3");
    const fs::path dir = out_dir(c, "std3");
    std::ofstream csv(dir / "crossover.csv");
    csv.precision(10);
    csv << "n,L,flower_demag,flower_exch,flower_anis,flower_total,flower_mz,vortex_demag,vortex_exch,"
           "vortex_anis,vortex_total,vortex_my,evaluations\n";
    bool ok = true;
    std::vector<double> Ls;
    for (double nd : p.list("n")) {
        CubeOptions opt;
        opt.n = static_cast<int>(nd);
        opt.relax_time = p.num("relax_time");
        opt.equilibrium_tol = 0.0;
        opt.vortex_split_axis = p.integer("split_axis");
        SAY("std3: N = %d", opt.n);
        const CrossoverResult r = cube_crossover(opt, p.num("L_lo"), p.num("L_hi"), p.num("tol"), log_line);
        const auto& f = r.flower;
        const auto& v = r.vortex;
        csv << r.n << ',' << r.L << ',' << f.e_demag << ',' << f.e_exch << ',' << f.e_anis << ',' << f.e_total << ','
            << f.mean.z << ',' << v.e_demag << ',' << v.e_exch << ',' << v.e_anis << ',' << v.e_total << ','
            << v.mean.y << ',' << r.evaluations << '\n';
        const double gap = std::abs(f.e_total - v.e_total);
        SAY("  L* = %.5f lex; flower e = %.5f (%.5f, %.5f, %.5f) <mz> = %.5f; vortex e = %.5f (%.5f, %.5f, %.5f) "
            "<my> = %.5f; |dE| = %.2g Km [%s]",
            r.L, f.e_total, f.e_demag, f.e_exch, f.e_anis, f.mean.z, v.e_total, v.e_demag, v.e_exch, v.e_anis,
            v.mean.y, gap, pass(gap < 1e-4));
        ok = ok && gap < 1e-4;
        Ls.push_back(r.L);
    }
    if (Ls.size() == 3) {
        const Richardson rich = richardson(Ls[0], Ls[1], Ls[2]);
        SAY("  Richardson: order %.3f, L(inf) = %.5f lex", rich.order, rich.limit);
    }
    return ok ? 0 : 1;
}

// ---- std4 --------------------------------------------------------------------------------------

int cmd_std4(const Common& c) {
    const Params p = params(c, "std4", "std4");
    const fs::path dir = out_dir(c, "std4");
    const std::vector<double> fields = p.list("fields"), refines = p.list("refine");
    std::optional<std::map<std::string, std::vector<double>>> reference;
    if (const std::string ref = p.str("reference"); !ref.empty()) reference = read_numeric_csv(ref);
    bool ok = true;
    std::map<int, std::vector<std::vector<Sample>>> traces;
    for (double rd : refines) {
        FilmOptions opt;
        opt.refine = static_cast<int>(rd);
        opt.method = parse_method(p.str("method"));
        opt.duration = p.num("duration");
        opt.sample_interval = p.num("sample_interval");
        const GridSpec g = film_grid(opt);
        VectorField3 s_state;
        if (const std::string path = p.str("s_state"); !path.empty()) {
            s_state = read_field(path);
            if (!(s_state.grid() == g)) s_state = resample(s_state, g);
            SAY("std4: %lld x %lld cells, S-state loaded from %s", static_cast<long long>(g.nx),
                static_cast<long long>(g.ny), path.c_str());
        } else {
            SAY("std4: %lld x %lld cells, relaxing the S-state", static_cast<long long>(g.nx),
                static_cast<long long>(g.ny));
            const SStateReport s = film_s_state(opt);
            SAY("  S-state <m> = (%.5f, %.5f, %.5f), residual torque %.3g A/m, energy monotone [%s]", s.mean.x,
                s.mean.y, s.mean.z, s.residual_torque, pass(s.energy_monotone));
            if (s.residual_torque > p.num("s_torque_warn")) {
                std::fprintf(stderr, "warning: S-state not equilibrated, residual torque %.3g A/m\n",
                             s.residual_torque);
            }
            ok = ok && s.energy_monotone;
            s_state = s.m;
            write_field(dir / ("s_state_r" + std::to_string(opt.refine) + ".magf"), s_state);
        }
        for (double fd : fields) {
            const int f = static_cast<int>(fd);
            const std::string tag = "f" + std::to_string(f) + "_r" + std::to_string(opt.refine);
            const FilmRun run = film_switching(f, s_state, opt, dir / ("trajectory_" + tag + ".csv"));
            if (run.crossing_time) write_field(dir / ("crossing_" + tag + ".magf"), run.crossing_snapshot);
            const bool norm_ok = run.max_norm_ulps <= 4.0;
            SAY("  Field %d: <mx> first crosses zero at %s ns, %lld demag evals, %.1f s, |M| %.1f ulp [%s]", f,
                run.crossing_time ? std::to_string(*run.crossing_time * 1e9).c_str() : "(none)",
                static_cast<long long>(run.counters.demag()), run.wall_s, run.max_norm_ulps, pass(norm_ok));
            ok = ok && run.crossing_time.has_value() && norm_ok;
            if (reference && f == 1) {
                double se[3] = {0, 0, 0};
                const auto& t = reference->at("t");
                for (std::size_t i = 0; i < t.size(); ++i) {
                    for (int k = 0; k < 3; ++k) {
                        const char* col[] = {"mx", "my", "mz"};
                        const double d = trace_at(run.trace, t[i], k) - reference->at(col[k])[i];
                        se[k] += d * d;
                    }
                }
                for (double& s : se) s = std::sqrt(s / std::max<std::size_t>(1, t.size()));
                const bool r_ok = std::max({se[0], se[1], se[2]}) <= 0.05;
                SAY("  reference RMS (%.4f, %.4f, %.4f) [%s]", se[0], se[1], se[2], pass(r_ok));
                ok = ok && r_ok;
            }
            traces[f].push_back(run.trace);
        }
    }
    if (refines.size() > 1) {
        for (auto& [f, tr] : traces) {
            for (std::size_t k = 1; k < tr.size(); ++k) {
                const Vec3 d = trace_max_diff(tr[k], tr[0], p.num("duration"));
                const bool agree = std::max({d.x, d.y, d.z}) <= p.num("agreement");
                SAY("  Field %d: refine %g vs %g max |d<m>| = (%.4f, %.4f, %.4f) [%s]", f, refines[k], refines[0], d.x,
                    d.y, d.z, pass(agree));
                ok = ok && agree;
            }
        }
    }
    return ok ? 0 : 1;
}

// ---- skyrmion ----------------------------------------------------------------------------------

namespace {

int seed_turns(const std::string& s) {
    if (s == "uniform") return 0;
    if (s == "skyrmion") return 1;
    if (s == "2pi") return 2;
    if (s == "3pi") return 3;
    throw Error("unknown seed '" + s + "' (uniform, skyrmion, 2pi, 3pi, all)");
}

void write_profile(const fs::path& path, const RadialProfile& p) {
    std::ofstream out(path);
    out.precision(10);
    out << "r,mz,theta\n";
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        out << p.r[i] << ',' << p.mz[i] << ',' << std::acos(std::clamp(p.mz[i], -1.0, 1.0)) << '\n';
    }
}

}  // namespace

int cmd_skyrmion(const Common& c) {
    const Params p = params(c, "skyrmion", "skyrmion");
    const fs::path dir = out_dir(c, "skyrmion");
    NanodotOptions base;
    base.A = p.num("A");
    base.Ms = p.num("Ms");
    base.Ku = p.num("Ku");
    base.alpha = p.num("alpha");
    base.dx = p.num("dx");
    base.dz = p.num("dz");
    base.relax_time = p.num("relax_time");
    const double dc = p.num("Dc") > 0.0 ? p.num("Dc") : critical_dmi(base.A, base.Ku);
    SAY("skyrmion: Dc = %.6g J/m^2 (%s)", dc, p.num("Dc") > 0.0 ? "given" : "4 sqrt(A Ku) / pi");
    bool ok = true;

    const std::string seed = p.str("seed");
    std::vector<int> seeds;
    if (seed == "all") {
        seeds = {0, 1, 2, 3};
    } else if (seed != "none") {
        seeds = {seed_turns(seed)};
    }
    for (int turns : seeds) {
        NanodotOptions opt = base;
        opt.R = p.num("R");
        opt.D = p.num("D");
        const NanodotState s = relax_nanodot(opt, turns);
        const std::string tag = "seed" + std::to_string(turns) + "_D" + std::to_string(opt.D * 1e3);
        write_profile(dir / ("profile_" + tag + ".csv"), s.profile);
        write_field(dir / ("state_" + tag + ".magf"), s.m);
        const bool same = s.crossings == turns;
        SAY("  D = %.4g (D/Dc = %.3f), seed %d: %d crossings [%s], Rs = %.3f nm, residual torque %.3g A/m", opt.D,
            opt.D / dc, turns, s.crossings, same ? "same class" : "different class", s.Rs.value_or(NAN) * 1e9,
            s.residual_torque);
        ok = ok && same && s.energy_monotone;
    }

    const std::vector<double> sweep = p.list("sweep");
    if (!sweep.empty()) {
        std::ofstream csv(dir / "radius_sweep.csv");
        csv << "R,D,D_over_Dc,crossings,Rs\n";
        for (double R : p.list("radii")) {
            double last = -1.0;
            bool mono = true;
            for (double ratio : sweep) {
                NanodotOptions opt = base;
                opt.R = R;
                opt.D = ratio * dc;
                const NanodotState s = relax_nanodot(opt, 1);
                const double rs = s.Rs.value_or(NAN);
                csv << R << ',' << opt.D << ',' << ratio << ',' << s.crossings << ',' << rs << '\n';
                SAY("  R = %.0f nm, D/Dc = %.2f: %d crossings, Rs = %.3f nm", R * 1e9, ratio, s.crossings, rs * 1e9);
                if (s.crossings == 1) {
                    if (last >= 0.0 && !(rs > last)) mono = false;
                    last = rs;
                }
            }
            SAY("  R = %.0f nm: Rs monotone in D [%s]", R * 1e9, pass(mono));
            ok = ok && mono;
        }
    }
    return ok ? 0 : 1;
}

// ---- bench-integrators -------------------------------------------------------------------------

int cmd_bench_integrators(const Common& c) {
    const Params p = params(c, "bench", "bench-integrators");
    const fs::path dir = out_dir(c, "bench");
    FilmOptions opt;
    opt.refine = p.integer("refine");
    opt.extent = p.num("extent");
    opt.theta = p.num("theta");
    const GridSpec g = film_grid(opt);
    SAY("bench-integrators: %lld x %lld cells of %.5g nm", static_cast<long long>(g.nx),
        static_cast<long long>(g.ny), g.dx * 1e9);
    StabilityOptions so;
    so.window = p.num("window");
    so.seed = c.seed;
    const double interval = p.num("interval");
    std::ofstream csv(dir / "integrators.csv");
    csv << "method,max_stable_dt,dt,steps,exchange_evals,demag_evals,wall_s_per_interval\n";
    IntegratorCost cost[2];
    for (int k = 0; k < 2; ++k) {
        opt.method = k ? Method::MriKw3 : Method::RK4;
        const double stable = max_stable_dt(opt, p.num("lo"), p.num("hi"), so);
        const double dt = p.num(k ? "dt_mri" : "dt_rk4");
        cost[k] = integrator_cost(opt, dt, interval, p.integer("repeats"));
        cost[k].dt_stable = stable;
        const char* name = k ? "MRI" : "RK4";
        csv << name << ',' << stable << ',' << dt << ',' << cost[k].steps << ',' << cost[k].exchange_evals << ','
            << cost[k].demag_evals << ',' << cost[k].wall_per_interval << '\n';
        SAY("  %s: max stable dt %.4g s; at dt %.4g: %lld steps, %lld exchange, %lld demag, %.4g s per interval%s",
            name, stable, dt, static_cast<long long>(cost[k].steps), static_cast<long long>(cost[k].exchange_evals),
            static_cast<long long>(cost[k].demag_evals), cost[k].wall_per_interval,
            dt <= stable ? "" : " (dt above the stable limit)");
    }
    const double ratio = cost[1].dt_stable / cost[0].dt_stable;
    const double wall = cost[1].wall_per_interval / cost[0].wall_per_interval;
    SAY("  stable dt ratio MRI/RK4 = %.3f, wall ratio MRI/RK4 = %.3f", ratio, wall);
    return cost[0].dt <= cost[0].dt_stable && cost[1].dt <= cost[1].dt_stable ? 0 : 1;
}

// ---- gen-dataset -------------------------------------------------------------------------------

int cmd_gen_dataset(const Common& c) {
    const Params p = params(c, "dataset", "gen-dataset");
    const fs::path dir = out_dir(c, "dataset");
    DatasetOptions opt;
    opt.runs = p.integer("runs");
    opt.seed = c.seed;
    opt.steps = p.integer("steps");
    opt.frames = p.integer("frames");
    opt.dt = p.num("dt");
    opt.b_min_mT = p.num("b_min_mT");
    opt.b_max_mT = p.num("b_max_mT");
    opt.film.refine = p.integer("refine");
    SAY("gen-dataset: %d runs x %d frames, %.3g MB", opt.runs, opt.frames, dataset_bytes(opt) / 1e6);
    VectorField3 start;
    if (const std::string path = p.str("s_state"); !path.empty()) {
        start = read_field(path);
    } else {
        SAY("  relaxing the S-state");
        start = film_s_state(opt.film).m;
    }
    const DatasetManifest man = generate_dataset(opt, start, dir, log_line);
    bool ok = true;
    for (const auto& r : man.runs) {
        const double b = norm(r.field) * kMu0 * 1e3;
        ok = ok && static_cast<int>(r.files.size()) == opt.frames && r.field.z == 0.0 && b >= opt.b_min_mT &&
             b <= opt.b_max_mT;
    }
    SAY("  manifest %s [%s]", (dir / "manifest.json").string().c_str(), pass(ok));
    return ok ? 0 : 1;
}

// ---- infer-check -------------------------------------------------------------------------------

int cmd_infer_check(const Common& c, const std::string& pairs) {
    const Params p = params(c, "infer", "infer-check");
    const double tol = p.num("tol");
    const FnoModel model = load_model(c.model, tol);
    SAY("infer-check: %s loaded, embedded parity within %.1g", c.model.c_str(), tol);
    if (pairs.empty()) return 0;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(pairs)) {
        if (e.path().extension() == ".magf") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .magf files in " + pairs);
    bool ok = true;
    for (const auto& f : files) {
        const MagfData d = read_magf(f);
        if (d.components.size() != 6) throw Error(f.string() + ": expected 6 components (M, H)");
        VectorField3 m(d.grid), h_ref(d.grid);
        for (int k = 0; k < 3; ++k) {
            std::copy(d.components[k].begin(), d.components[k].end(), m.component(k).begin());
            std::copy(d.components[k + 3].begin(), d.components[k + 3].end(), h_ref.component(k).begin());
        }
        const VectorField3 h = infer_demag(m, model);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < h.data().size(); ++i) {
            num = std::max(num, std::abs(h.data()[i] - h_ref.data()[i]));
            den = std::max(den, std::abs(h_ref.data()[i]));
        }
        const double err = den > 0.0 ? num / den : num;
        SAY("  %s: relative Linf %.3g [%s]", f.filename().string().c_str(), err, pass(err <= tol));
        ok = ok && err <= tol;
    }
    return ok ? 0 : 1;
}

// ---- plot --------------------------------------------------------------------------------------

int cmd_plot(const std::string& csv, const std::string& out_arg) {
    std::ifstream in(csv);
    if (!in) throw Error("cannot open " + csv);
    std::string header, row;
    if (!std::getline(in, header) || header.empty()) throw Error(csv + ": empty CSV");
    if (!std::getline(in, row) || row.empty()) throw Error(csv + ": no data rows");
    std::vector<std::string> cols;
    std::stringstream hs(header);
    for (std::string s; std::getline(hs, s, ',');) cols.push_back(s);
    auto has = [&](const char* n) { return std::find(cols.begin(), cols.end(), n) != cols.end(); };
    auto need = [&](std::initializer_list<const char*> names) {
        for (const char* n : names) {
            if (!has(n)) throw Error(csv + ": column '" + n + "' missing");
        }
    };

    std::string body;
    if (has("branch")) {
        need({"branch", "hx", "hy", "hz", "mx", "my", "mz"});
        body = R"PY(for branch in ("forward", "reverse"):
    sel = [r for r in rows if r["branch"] == branch]
    h = [(float(r["hx"]) + float(r["hy"]) + float(r["hz"])) / 3 ** 0.5 for r in sel]
    proj = [(float(r["mx"]) + float(r["my"]) + float(r["mz"])) / 3 ** 0.5 for r in sel]
    plt.plot(h, proj, label=branch)
plt.xlabel("H along (1,1,1) [A/m]")
plt.ylabel("<m> along (1,1,1)")
)PY";
    } else if (has("r")) {
        need({"r", "mz"});
        body = R"PY(r = [float(x["r"]) * 1e9 for x in rows]
plt.plot(r, [float(x["mz"]) for x in rows], label="mz")
plt.xlabel("r [nm]")
plt.ylabel("mz")
)PY";
    } else {
        need({"t", "mx", "my", "mz"});
        body = R"PY(t = [float(r["t"]) * 1e9 for r in rows]
for c in ("mx", "my", "mz"):
    plt.plot(t, [float(r[c]) for r in rows], label=c)
plt.xlabel("t [ns]")
plt.ylabel("<m>")
)PY";
    }
    const std::string out = out_arg.empty() ? csv + ".py" : out_arg;
    std::ofstream script(out);
    if (!script) throw Error("cannot write " + out);
    script << "#!/usr/bin/env python3\nimport csv\nimport matplotlib\nmatplotlib.use(\"Agg\")\n"
              "import matplotlib.pyplot as plt\n\n"
           << "with open(" << std::quoted(fs::absolute(csv).string()) << ") as f:\n"
           << "    rows = list(csv.DictReader(f))\n\n"
           << body << "plt.legend()\nplt.savefig(" << std::quoted(fs::absolute(csv).string() + ".png") << ", dpi=150)\n";
    SAY("plot: wrote %s", out.c_str());
    return 0;
}

}  // namespace magnex::cli
