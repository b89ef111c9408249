#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "magnex/config.hpp"
#include "magnex/error.hpp"
#include "magnex/fno.hpp"

using namespace magnex;

namespace {

const std::filesystem::path kConfigs = MAGNEX_CONFIG_DIR;
const std::filesystem::path kFixtures = MAGNEX_FIXTURE_DIR;

const char* kMinimal = R"(
[grid]
nx = 8
ny = 4
nz = 1
dx = 5e-9
dy = 5e-9
dz = 3e-9
[material]
Ms = 8e5
alpha = 0.5
[integrator]
dt = 1e-13
)";

ScenarioConfig from_text(const std::string& text) { return build_scenario(ConfigDocument::parse(text)); }

}  // namespace

TEST_CASE("standard problem 4 config loads and round-trips") {
    const ConfigDocument doc = ConfigDocument::load(kConfigs / "std4.cfg");
    const ScenarioConfig cfg = build_scenario(doc);
    CHECK(cfg.grid.nx == 160);
    CHECK(cfg.grid.ny == 40);
    CHECK(cfg.grid.nz == 1);
    CHECK(cfg.grid.nx * cfg.grid.dx == doctest::Approx(500e-9));
    CHECK(cfg.grid.ny * cfg.grid.dy == doctest::Approx(125e-9));
    CHECK(cfg.grid.dz == 3e-9);
    CHECK(cfg.material.Ms == 8e5);
    CHECK(cfg.material.alpha == 0.02);
    CHECK(cfg.material.A == 1.3e-11);
    CHECK(cfg.warnings.empty());
    CHECK(cfg.physics.on(Term::Exchange));
    CHECK(cfg.physics.on(Term::Demag));
    CHECK(cfg.physics.on(Term::Bias));
    CHECK_FALSE(cfg.physics.on(Term::Anisotropy));
    CHECK_FALSE(cfg.physics.on(Term::Dmi));

    const ConfigDocument again = ConfigDocument::parse(doc.print());
    CHECK(again.print() == doc.print());
    const ScenarioConfig cfg2 = build_scenario(again);
    CHECK(cfg2.grid.dx == cfg.grid.dx);
    CHECK(cfg2.material.A == cfg.material.A);
    CHECK(cfg2.integrator.dt == cfg.integrator.dt);
    CHECK(build_bias(cfg2).at({}, 0.0).x == -19576.0);
}

TEST_CASE("empty file lists the required keys") {
    try {
        from_text("");
        FAIL("expected an error");
    } catch (const Error& e) {
        const std::string msg = e.what();
        for (const char* key : {"grid.nx", "grid.ny", "grid.nz", "grid.dx", "grid.dy", "grid.dz", "material.Ms",
                                "material.alpha", "integrator.dt"}) {
            CHECK(msg.find(key) != std::string::npos);
        }
    }
}

TEST_CASE("Field 2 bias vector") {
    const ScenarioConfig cfg = from_text(std::string(kMinimal) + "[bias]\nfield = [-28259, -5013, 0]\n");
    const BiasSource b = build_bias(cfg);
    CHECK(b.uniform());
    CHECK_FALSE(b.time_dependent());
    const Vec3 h = b.at({}, 1e-9);
    CHECK(h.x == -28259.0);
    CHECK(h.y == -5013.0);
    CHECK(h.z == 0.0);
}

TEST_CASE("expression bias and initial state") {
    const ScenarioConfig cfg = from_text(std::string(kMinimal) +
                                         "[bias]\nfield = [\"1e5 * min(t/10e-12, 1)\", 0, \"1e5\"]\n"
                                         "[initial]\nm = [\"where(x < 20e-9, 1, -1)\", 0, 0]\n");
    const BiasSource b = build_bias(cfg);
    CHECK(b.time_dependent());
    CHECK(b.at({}, 5e-12).x == doctest::Approx(5e4));
    CHECK(b.at({}, 50e-12).x == doctest::Approx(1e5));
    CHECK(b.at({}, 0).z == 1e5);
    const MaterialMap mat = build_material(cfg);
    const VectorField3 m = build_initial(cfg, mat);
    CHECK(m.get(cfg.grid.index(0, 0, 0)).x == 8e5);
    CHECK(m.get(cfg.grid.index(7, 0, 0)).x == -8e5);
}

TEST_CASE("command-line overrides take precedence") {
    ConfigDocument doc = ConfigDocument::parse(kMinimal);
    doc.apply_override("integrator.dt=2e-13");
    doc.apply_override("integrator.method = mri");
    doc.apply_override("stop.duration=1e-12");
    const ScenarioConfig cfg = build_scenario(doc);
    CHECK(cfg.integrator.dt == 2e-13);
    CHECK(cfg.integrator.method == Method::MriKw3);
    CHECK(cfg.stop.duration == 1e-12);
    CHECK_THROWS_AS(doc.apply_override("nodot=1"), Error);
    CHECK_THROWS_AS(doc.apply_override("grid.nx"), Error);

    const auto path = std::filesystem::temp_directory_path() / "magnex_override.cfg";
    std::ofstream(path) << kMinimal;
    CHECK(load_config(path, {"material.Ms=1e6"}).material.Ms == 1e6);
    std::filesystem::remove(path);
}

TEST_CASE("material regions override the base parameters") {
    const ScenarioConfig cfg = from_text(std::string(kMinimal) +
                                         "[material:hole]\nregion = \"x > 30e-9\"\nMs = 0\n"
                                         "[material:soft]\nregion = \"x < 10e-9\"\nalpha = 0.1\nA = 1e-11\n");
    CHECK(cfg.material.regions.size() == 2);
    CHECK(cfg.physics.on(Term::Exchange));
    const MaterialMap mat = build_material(cfg);
    CHECK(mat.Ms[cfg.grid.index(7, 0, 0)] == 0.0);
    CHECK(mat.Ms[cfg.grid.index(3, 0, 0)] == 8e5);
    CHECK(mat.alpha[cfg.grid.index(0, 0, 0)] == 0.1);
    CHECK(mat.alpha[cfg.grid.index(3, 0, 0)] == 0.5);
    CHECK(mat.A[cfg.grid.index(1, 2, 0)] == 1e-11);
    CHECK(mat.A[cfg.grid.index(3, 0, 0)] == 0.0);
    CHECK_THROWS_AS(from_text(std::string(kMinimal) + "[material:bad]\nMs = 1\n"), Error);
}

TEST_CASE("comments, warnings and malformed input") {
    const ScenarioConfig cfg = from_text(std::string(kMinimal) +
                                         "# full-line comment\n; another\n"
                                         "[stop]\nduration = 2 ; inline\nmax_steps = 10 # inline\n"
                                         "[extra]\nfoo = 1\n[output]\nbogus = 2\n");
    CHECK(cfg.stop.duration == 2.0);
    CHECK(cfg.stop.max_steps == 10);
    const auto has = [&](const std::string& s) {
        for (const auto& w : cfg.warnings) {
            if (w.find(s) != std::string::npos) return true;
        }
        return false;
    };
    CHECK(has("[extra]"));
    CHECK(has("bogus"));
    CHECK(has("stop.duration"));

    CHECK_THROWS_AS(ConfigDocument::parse("[grid\nnx = 1\n"), ParseError);
    CHECK_THROWS_AS(ConfigDocument::parse("nx = 1\n[grid]\n"), ParseError);
    CHECK_THROWS_AS(from_text(std::string(kMinimal) + "[physics]\nboundary = open\n"), Error);
    CHECK_THROWS_AS(from_text(std::string(kMinimal) + "[demag]\nbackend = nn\n"), Error);
    CHECK_THROWS_WITH_AS(from_text(std::string(kMinimal) + "[integrator]\n"), doctest::Contains("duplicate"),
                         ParseError);
}

TEST_CASE("large time step is flagged") {
    ConfigDocument doc = ConfigDocument::parse(kMinimal);
    doc.set("integrator", "dt", "2");
    const ScenarioConfig cfg = build_scenario(doc);
    bool found = false;
    for (const auto& w : cfg.warnings) found |= w.find("integrator.dt") != std::string::npos;
    CHECK(found);
}

TEST_CASE("rhs partitions follow the integrator") {
    ConfigDocument doc = ConfigDocument::parse(kMinimal);
    doc.set("material", "A", "1.3e-11");
    auto rhs = build_rhs(build_scenario(doc));
    CHECK(rhs->partition(Term::Exchange) == Partition::SlowExplicit);
    doc.set("integrator", "method", "mri");
    rhs = build_rhs(build_scenario(doc));
    CHECK(rhs->partition(Term::Exchange) == Partition::Fast);
    CHECK(rhs->partition(Term::Demag) == Partition::SlowExplicit);
    CHECK(rhs->demag_backend()->name() == "fft");
}

TEST_CASE("nn demag backend is built from a weight file") {
    ConfigDocument doc = ConfigDocument::parse(kMinimal);
    doc.set("grid", "nx", "10");
    doc.set("grid", "ny", "6");
    doc.set("demag", "backend", "nn");
    doc.set("demag", "model", (kFixtures / "fno_tiny.magw").string());
    auto rhs = build_rhs(build_scenario(doc));
    CHECK(rhs->demag_backend()->name() == "nn");
    doc.set("grid", "ny", "2");
    CHECK_THROWS_WITH_AS(build_rhs(build_scenario(doc)), doctest::Contains("too small"), Error);
}
