#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "magnex/error.hpp"
#include "magnex/problems.hpp"

using namespace magnex;

namespace {

std::vector<Sample> ramp_trace() {
    std::vector<Sample> tr;
    for (int k = 0; k <= 10; ++k) {
        Sample s;
        s.t = k * 1e-12;
        s.mean = {1.0 - 0.2 * k, 0.1 * k, 0.0};
        tr.push_back(s);
    }
    return tr;
}

RadialProfile profile(std::vector<double> mz) {
    RadialProfile p;
    for (std::size_t i = 0; i < mz.size(); ++i) p.r.push_back((i + 0.5) * 1e-9);
    p.mz = std::move(mz);
    return p;
}

}  // namespace

TEST_CASE("reference scales") {
    CHECK(exchange_length(1.3e-11, 8e5) == doctest::Approx(5.6858e-9).epsilon(1e-4));
    CHECK(magnetostatic_energy_density(8e5) == doctest::Approx(4.0212e5).epsilon(1e-4));
    CHECK(critical_dmi(16e-12, 5.5e5) == doctest::Approx(3.7773e-3).epsilon(1e-4));
}

TEST_CASE("richardson extrapolation recovers a polynomial limit") {
    // L(h) = 8 + h^2 at h = 4, 2, 1.
    const Richardson r = richardson(24.0, 12.0, 9.0);
    CHECK(r.order == doctest::Approx(2.0));
    CHECK(r.limit == doctest::Approx(8.0));
    CHECK_THROWS_AS(richardson(1.0, 2.0, 1.5), Error);
}

TEST_CASE("energy monitor flags relative rises above the limit") {
    EnergyMonitor mon;
    mon.observe(10.0, 1.0);
    mon.observe(9.0, 1.0);
    mon.observe(9.0 + 5e-7, 1.0);
    CHECK(mon.monotone);
    mon.observe(9.1, 1.0);
    CHECK_FALSE(mon.monotone);
    CHECK(mon.worst == doctest::Approx(0.1 / 9.1).epsilon(1e-3));
    // reset forgets the previous sample only: a jump across it is not a rise.
    const double worst = mon.worst;
    mon.reset();
    mon.observe(100.0, 1.0);
    CHECK(mon.worst == worst);
}

TEST_CASE("trace interpolation and difference") {
    const auto a = ramp_trace();
    CHECK(trace_at(a, 2.5e-12, 0) == doctest::Approx(0.5));
    CHECK(trace_at(a, -1.0, 1) == 0.0);
    CHECK(trace_at(a, 1.0, 1) == doctest::Approx(1.0));
    auto b = a;
    for (auto& s : b) s.mean.y += 0.01;
    const Vec3 d = trace_max_diff(a, b, 5e-12);
    CHECK(d.x == doctest::Approx(0.0));
    CHECK(d.y == doctest::Approx(0.01));
    CHECK_THROWS_AS(trace_at({}, 0.0, 0), Error);
}

TEST_CASE("resample is exact under refinement and coarsening back") {
    const GridSpec coarse(4, 3, 1, 2.0, 2.0, 1.0), fine(8, 6, 1, 1.0, 1.0, 1.0);
    VectorField3 m(coarse);
    for (std::size_t i = 0; i < coarse.cells(); ++i) m.set(i, Vec3{double(i), -double(i), 1.0});
    const VectorField3 up = resample(m, fine);
    CHECK(up.get(fine.index(1, 1, 0)).x == 0.0);
    CHECK(up.get(fine.index(2, 0, 0)).x == 1.0);
    const VectorField3 back = resample(up, coarse);
    for (std::size_t i = 0; i < coarse.cells(); ++i) CHECK(back.get(i).x == m.get(i).x);
}

TEST_CASE("film and platelet grids") {
    FilmOptions f;
    const GridSpec g1 = film_grid(f);
    CHECK(g1.nx == 160);
    CHECK(g1.ny == 40);
    f.refine = 2;
    CHECK(film_grid(f).nx == 320);
    const Vec3 h1 = film_field(1), h2 = film_field(2);
    CHECK(h1.x * kMu0 * 1e3 == doctest::Approx(-24.6).epsilon(1e-3));
    CHECK(h1.y * kMu0 * 1e3 == doctest::Approx(4.3).epsilon(1e-3));
    CHECK(h2.x * kMu0 * 1e3 == doctest::Approx(-35.5).epsilon(1e-3));
    CHECK(h2.y * kMu0 * 1e3 == doctest::Approx(-6.3).epsilon(1e-3));
    CHECK_THROWS_AS(film_field(3), Error);

    const double lex = exchange_length(1.005154e-11, 8e5);
    const GridSpec p = platelet_grid(3.0, 1.005154e-11, 8e5);
    CHECK(p.nx * p.dx == doctest::Approx(15.0 * lex));
    CHECK(p.ny * p.dy == doctest::Approx(3.0 * lex));
    CHECK(p.nz * p.dz == doctest::Approx(0.3 * lex));
    CHECK_THROWS_AS(platelet_grid(0.0, 1e-11, 8e5), Error);
}

TEST_CASE("hysteresis rejects odd increment counts") {
    HysteresisOptions opt;
    opt.increments = 3;
    CHECK_THROWS_AS(hysteresis_sweep(opt), Error);
}

TEST_CASE("radial profile classification") {
    CHECK(count_sign_changes(profile({1, 0.5, -0.5, -1})) == 1);
    CHECK(count_sign_changes(profile({-1, 0.5, -0.5, 1})) == 3);
    CHECK(count_sign_changes(profile({1, 1, 1})) == 0);
    const auto rs = first_crossing(profile({-1.0, -0.5, 0.5, 1.0}));
    REQUIRE(rs);
    CHECK(*rs == doctest::Approx(2e-9));
    CHECK_FALSE(first_crossing(profile({1, 1})));
}

TEST_CASE("nanodot seeds have the requested number of mz sign changes") {
    NanodotOptions opt;
    const MaterialMap mat = nanodot_material(opt);
    CHECK(mat.grid.nx == 128);
    CHECK(mat.magnetic_cells() < mat.grid.cells());
    CHECK(mat.magnetic_cells() > 0.75 * mat.grid.cells());
    for (int turns = 0; turns <= 3; ++turns) {
        const VectorField3 m = nanodot_seed(mat, turns, opt.R, opt.D);
        const RadialProfile p = radial_profile(m, mat, opt.dx);
        CAPTURE(turns);
        CHECK(count_sign_changes(p) == turns);
        CHECK(p.mz.front() * (turns % 2 ? -1.0 : 1.0) > 0.9);
    }
    const VectorField3 sk = nanodot_seed(mat, 1, opt.R, opt.D);
    const auto rs = first_crossing(radial_profile(sk, mat, opt.dx));
    REQUIRE(rs);
    CHECK(*rs == doctest::Approx(0.5 * opt.R).epsilon(0.05));
}

TEST_CASE("dataset fields are deterministic, in range and in plane") {
    for (int id = 0; id < 200; ++id) {
        const Vec3 h = dataset_field(42, id, 25.0, 40.0);
        CHECK(h.z == 0.0);
        const double b = norm(h) * kMu0 * 1e3;
        CHECK(b >= 25.0 - 1e-9);
        CHECK(b <= 40.0 + 1e-9);
        const Vec3 again = dataset_field(42, id, 25.0, 40.0);
        CHECK(again.x == h.x);
        CHECK(again.y == h.y);
    }
    const Vec3 a = dataset_field(1, 0, 25, 40), b = dataset_field(2, 0, 25, 40);
    CHECK(a.x != b.x);
}

TEST_CASE("dataset size estimate and manifest") {
    DatasetOptions opt;
    opt.runs = 3;
    opt.frames = 4;
    const std::uintmax_t frame = 88 + 6 * 160 * 40 * 8;
    CHECK(dataset_bytes(opt) == 12 * frame + 4096);

    DatasetManifest man;
    man.seed = 9;
    man.steps = 100;
    man.dt = 5e-15;
    man.grid = film_grid(FilmOptions{});
    DatasetRun run;
    run.id = 0;
    run.field = {1.0, 2.0, 0.0};
    run.times = {1e-13};
    run.files = {"run_0000/frame_00.magf"};
    man.runs.push_back(run);
    const auto j = nlohmann::json::parse(manifest_json(man));
    CHECK(j["seed"] == 9);
    CHECK(j["runs"].size() == 1);
    CHECK(j["runs"][0]["files"][0] == "run_0000/frame_00.magf");
}

TEST_CASE("dataset generation writes frames and rejects bad step counts") {
    DatasetOptions opt;
    opt.runs = 1;
    opt.steps = 4;
    opt.frames = 2;
    const GridSpec g = film_grid(opt.film);
    const VectorField3 start(g, Vec3{opt.film.Ms, 0.0, 0.0});
    const auto dir = std::filesystem::temp_directory_path() / "magnex_dataset_test";
    std::filesystem::remove_all(dir);
    const DatasetManifest man = generate_dataset(opt, start, dir);
    REQUIRE(man.runs.size() == 1);
    CHECK(man.runs[0].files.size() == 2);
    for (const auto& f : man.runs[0].files) CHECK(std::filesystem::exists(dir / f));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    opt.steps = 5;
    CHECK_THROWS_AS(generate_dataset(opt, start, dir), Error);
    std::filesystem::remove_all(dir);
}
