#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "doctest.h"
#include "magnex/error.hpp"
#include "magnex/grid.hpp"
#include "magnex/magf.hpp"

using namespace magnex;

namespace {

double ulp_distance(double a, double b) {
    const double spacing = std::nextafter(std::abs(b), std::numeric_limits<double>::infinity()) - std::abs(b);
    return std::abs(a - b) / spacing;
}

VectorField3 random_field(const GridSpec& g, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    VectorField3 f(g);
    for (double& v : f.data()) v = n(rng);
    return f;
}

}  // namespace

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS(GridSpec(0, 1, 1, 1, 1, 1), Error);
    CHECK_THROWS_AS(GridSpec(1, 1, 1, 1, -1, 1), Error);
    CHECK_THROWS_AS(GridSpec(1, 1, 1, 1, 1, std::nan("")), Error);
    CHECK_THROWS_AS(GridSpec(1ll << 40, 1ll << 40, 1 << 10, 1, 1, 1), Error);
    const GridSpec g(4, 3, 2, 1e-9, 2e-9, 3e-9);
    CHECK(g.cells() == 24);
    CHECK(g.index(1, 2, 1) == 1 + 4 * (2 + 3 * 1));
    CHECK(g.center(0, 0, 0).y == doctest::Approx(1e-9));
}

TEST_CASE("vector field storage is component planar") {
    const GridSpec g(3, 2, 1, 1, 1, 1);
    VectorField3 f(g);
    CHECK(f.data().size() == 18);
    f.set(4, {1, 2, 3});
    CHECK(f.component(0)[4] == 1);
    CHECK(f.component(1)[4] == 2);
    CHECK(f.component(2)[4] == 3);
    CHECK(f.data()[6 + 4] == 2);
}

TEST_CASE("renormalize examples") {
    const GridSpec g(3, 1, 1, 1, 1, 1);
    MaterialMap mat(g, 5.0, 0.0, 0.1);
    mat.Ms[2] = std::sqrt(3.0);
    VectorField3 m(g);
    m.set(0, {3, 4, 0});
    m.set(1, {10, 0, 0});
    m.set(2, {1, 1, 1});
    renormalize(m, mat);
    CHECK(m.get(0) == Vec3{3, 4, 0});
    CHECK(m.get(1) == Vec3{5, 0, 0});
    for (int c = 0; c < 3; ++c) CHECK(ulp_distance(m.get(2)[c], 1.0) <= 4);
}

TEST_CASE("renormalize zeroes vacuum and rejects zero length") {
    const GridSpec g(2, 1, 1, 1, 1, 1);
    MaterialMap mat(g, 1.0, 0.0, 0.1);
    mat.Ms[1] = 0.0;
    VectorField3 m(g, {1, 2, 3});
    renormalize(m, mat);
    CHECK(m.get(1) == Vec3{});
    VectorField3 z(g);
    CHECK_THROWS_AS(renormalize(z, mat), Error);
}

TEST_CASE("renormalize contract and idempotence on random fields") {
    std::mt19937_64 rng(7);
    const GridSpec g(7, 5, 3, 1, 1, 1);
    MaterialMap mat(g, 8e5, 1e-11, 0.1);
    for (int trial = 0; trial < 20; ++trial) {
        VectorField3 m = random_field(g, rng, 1e6);
        renormalize(m, mat);
        for (std::size_t i = 0; i < m.cells(); ++i) CHECK(ulp_distance(norm(m.get(i)), 8e5) <= 4);
        VectorField3 again = renormalized(m, mat);
        for (std::size_t i = 0; i < m.data().size(); ++i) {
            CHECK(ulp_distance(again.data()[i], m.data()[i]) <= 1.0);
        }
        CHECK(norm(mean_normalized(m, mat)) <= 1.0 + 1e-15);
    }
}

TEST_CASE("mean_normalized examples") {
    const GridSpec g(2, 1, 1, 1, 1, 1);
    MaterialMap mat(g, 2.0, 0.0, 0.1);
    VectorField3 m(g);
    m.set(0, {2, 0, 0});
    m.set(1, {0, 2, 0});
    const Vec3 avg = mean_normalized(m, mat);
    CHECK(avg.x == doctest::Approx(0.5));
    CHECK(avg.y == doctest::Approx(0.5));
    CHECK(avg.z == 0.0);

    m.set(1, {-2, 0, 0});
    CHECK(mean_normalized(m, mat) == Vec3{0, 0, 0});

    VectorField3 up(g, {0, 0, 2});
    CHECK(mean_normalized(up, mat) == Vec3{0, 0, 1});

    MaterialMap vacuum(g, 0.0, 0.0, 0.1);
    CHECK_THROWS_AS(mean_normalized(up, vacuum), Error);
}

TEST_CASE("ghost fill zero flux copies interior") {
    const GridSpec g(3, 2, 2, 1, 1, 1);
    MaterialMap mat(g, 1.0, 1e-11, 0.1);
    std::mt19937_64 rng(1);
    VectorField3 m = random_field(g, rng);
    const PaddedField p = ghost_fill(m, mat, BoundaryMode::ZeroFlux);
    CHECK(p.at(-1, 1, 0) == m.get(g.index(0, 1, 0)));
    CHECK(p.at(3, 0, 1) == m.get(g.index(2, 0, 1)));
    CHECK(p.at(1, -1, 1) == m.get(g.index(1, 0, 1)));
    CHECK(p.at(2, 1, 2) == m.get(g.index(2, 1, 1)));
}

TEST_CASE("ghost fill chiral x face from hand evaluation") {
    const double Ms = 1.1e6, A = 1.6e-11, D = 4.5e-3, dx = 0.5e-9;
    const GridSpec g(4, 3, 1, dx, dx, dx);
    MaterialMap mat(g, Ms, A, 0.1, 0.0, D);
    VectorField3 m(g, {0, 0, Ms});
    const PaddedField p = ghost_fill(m, mat, BoundaryMode::Chiral);
    // dM/dx = -(D Ms / 2A) ex
    const double shift = dx * D * Ms / (2 * A);
    const Vec3 hi = p.at(4, 1, 0);
    const Vec3 lo = p.at(-1, 1, 0);
    CHECK(hi.x == doctest::Approx(-shift).epsilon(1e-14));
    CHECK(lo.x == doctest::Approx(shift).epsilon(1e-14));
    CHECK(hi.z == Ms);
    // dM/dy = -(D/2A)(ez x ey) x M = -(D/2A)(-ex x Ms ez) = -(D Ms/2A) ey
    CHECK(p.at(1, 3, 0).y == doctest::Approx(-shift).epsilon(1e-14));
    CHECK(p.at(1, 0, -1) == m.get(g.index(1, 0, 0)));
}

TEST_CASE("ghost fill with D = 0 equals zero flux exactly") {
    const GridSpec g(3, 3, 2, 1e-9, 1e-9, 1e-9);
    MaterialMap mat(g, 1.0, 1e-11, 0.1, 0.0, 0.0);
    std::mt19937_64 rng(3);
    VectorField3 m = random_field(g, rng);
    const PaddedField a = ghost_fill(m, mat, BoundaryMode::Chiral);
    const PaddedField b = ghost_fill(m, mat, BoundaryMode::ZeroFlux);
    for (std::int64_t k = -1; k <= 2; ++k)
        for (std::int64_t j = -1; j <= 3; ++j)
            for (std::int64_t i = -1; i <= 3; ++i) CHECK(a.at(i, j, k) == b.at(i, j, k));
}

TEST_CASE("ghost fill chiral mode requires A > 0") {
    const GridSpec g(2, 2, 1, 1, 1, 1);
    MaterialMap mat(g, 1.0, 0.0, 0.1, 0.0, 1e-3);
    VectorField3 m(g, {0, 0, 1});
    CHECK_THROWS_AS(ghost_fill(m, mat, BoundaryMode::Chiral), Error);
}

TEST_CASE("magf round trip and malformed input") {
    const auto dir = std::filesystem::temp_directory_path() / "magnex_test_grid";
    std::filesystem::create_directories(dir);
    const GridSpec g(5, 4, 3, 1e-9, 2e-9, 3e-9, {1e-9, -2e-9, 0});
    std::mt19937_64 rng(5);
    const VectorField3 f = random_field(g, rng);
    write_field(dir / "f.magf", f);
    const VectorField3 back = read_field(dir / "f.magf");
    CHECK(back == f);

    const auto size = std::filesystem::file_size(dir / "f.magf");
    CHECK(size == 4 + 4 + 24 + 48 + 8 + 3 * 60 * 8);
    std::filesystem::resize_file(dir / "f.magf", size - 8);
    CHECK_THROWS_AS(read_field(dir / "f.magf"), Error);

    std::ofstream(dir / "bad.magf") << "MAGX";
    CHECK_THROWS_AS(read_magf(dir / "bad.magf"), Error);
    std::filesystem::remove_all(dir);
}
