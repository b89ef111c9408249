#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "magnex/error.hpp"
#include "magnex/magf.hpp"
#include "magnex/problems.hpp"

namespace magnex {

Vec3 dataset_field(std::uint64_t seed, int id, double b_min_mT, double b_max_mT) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(id)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> mag(b_min_mT, b_max_mT);
    double hx = 0.0, hy = 0.0, r = 0.0;
    while (r < 1e-6) {
        // Gaussian triples are isotropic; dropping z projects onto the film plane.
        hx = g(rng);
        hy = g(rng);
        g(rng);
        r = std::hypot(hx, hy);
    }
    const double h = mag(rng) * 1e-3 / kMu0;
    return {h * hx / r, h * hy / r, 0.0};
}

std::uintmax_t dataset_bytes(const DatasetOptions& opt) {
    const GridSpec g = film_grid(opt.film);
    const std::uintmax_t frame = 8 + 3 * 8 + 6 * 8 + 8 + 6 * g.cells() * 8;
    return static_cast<std::uintmax_t>(opt.runs) * opt.frames * frame + 4096;
}

DatasetManifest generate_dataset(const DatasetOptions& opt, const VectorField3& start,
                                 const std::filesystem::path& out_dir,
                                 const std::function<void(const std::string&)>& log) {
    if (opt.runs < 1 || opt.frames < 1 || opt.steps < opt.frames || opt.steps % opt.frames) {
        throw Error("dataset: steps must be a positive multiple of frames");
    }
    std::filesystem::create_directories(out_dir);
    const std::uintmax_t need = dataset_bytes(opt);
    const std::uintmax_t avail = std::filesystem::space(out_dir).available;
    if (avail < need) {
        throw Error("dataset: needs " + std::to_string(need) + " bytes but only " + std::to_string(avail) +
                    " are available in " + out_dir.string());
    }

    DatasetManifest man;
    man.seed = opt.seed;
    man.steps = opt.steps;
    man.dt = opt.dt;
    man.grid = film_grid(opt.film);
    const std::int64_t every = opt.steps / opt.frames;
    for (int id = 0; id < opt.runs; ++id) {
        DatasetRun run;
        run.id = id;
        run.field = dataset_field(opt.seed, id, opt.b_min_mT, opt.b_max_mT);
        FilmOptions fo = opt.film;
        fo.method = Method::Euler;
        PartitionedRHS rhs = film_rhs(fo, fo.alpha);
        rhs.set_bias(BiasSource(run.field));
        IntegratorSpec spec;
        spec.method = Method::Euler;
        spec.dt = opt.dt;
        Simulation sim(rhs, spec, start);
        char dir[32];
        std::snprintf(dir, sizeof dir, "run_%04d", id);
        std::filesystem::create_directories(out_dir / dir);
        VectorField3 h;
        for (int f = 0; f < opt.frames; ++f) {
            for (std::int64_t s = 0; s < every; ++s) sim.step();
            rhs.demag_field(sim.m(), h);
            MagfData data;
            data.grid = man.grid;
            for (const VectorField3* v : {&sim.m(), &h}) {
                for (int c = 0; c < 3; ++c) {
                    const auto plane = v->component(c);
                    data.components.emplace_back(plane.begin(), plane.end());
                }
            }
            char name[32];
            std::snprintf(name, sizeof name, "frame_%02d.magf", f);
            write_magf(out_dir / dir / name, data);
            run.times.push_back(opt.dt * every * (f + 1));
            run.files.push_back(std::string(dir) + "/" + name);
        }
        if (log) log("run " + std::to_string(id) + " done");
        man.runs.push_back(std::move(run));
    }
    std::ofstream(out_dir / "manifest.json") << manifest_json(man);
    return man;
}

std::string manifest_json(const DatasetManifest& m) {
    nlohmann::ordered_json j;
    j["seed"] = m.seed;
    j["steps"] = m.steps;
    j["dt"] = m.dt;
    j["grid"] = {{"n", {m.grid.nx, m.grid.ny, m.grid.nz}}, {"h", {m.grid.dx, m.grid.dy, m.grid.dz}}};
    j["components"] = {"mx", "my", "mz", "hx", "hy", "hz"};
    auto& runs = j["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : m.runs) {
        runs.push_back({{"id", r.id},
                        {"field", {r.field.x, r.field.y, r.field.z}},
                        {"times", r.times},
                        {"files", r.files}});
    }
    return j.dump(2) + "\n";
}

}  // namespace magnex
