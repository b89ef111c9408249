#include <cmath>
#include <random>

#include "doctest.h"
#include "magnex/error.hpp"
#include "magnex/field_terms.hpp"

using namespace magnex;

namespace {

VectorField3 random_unit_field(const GridSpec& g, const MaterialMap& mat, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    VectorField3 f(g);
    for (double& v : f.data()) v = n(rng);
    renormalize(f, mat);
    return f;
}

double inner(const VectorField3& a, const VectorField3& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

double max_rel_diff(const VectorField3& a, const VectorField3& b) {
    const double scale = std::max(a.max_abs(), b.max_abs());
    double d = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return scale > 0 ? d / scale : d;
}

}  // namespace

TEST_CASE("bias field sources") {
    const GridSpec g(4, 3, 2, 1e-9, 1e-9, 1e-9);
    const BiasSource field1(Vec3{-19576, 3422, 0});
    const VectorField3 h1 = bias_field(3e-9, g, field1);
    for (std::size_t i = 0; i < g.cells(); ++i) CHECK(h1.get(i) == Vec3{-19576, 3422, 0});

    const BiasSource s2({Expr::parse("1e5"), Expr::parse("1e5"), Expr::parse("1e5")});
    CHECK(bias_field(0.7, g, s2).get(5) == Vec3{1e5, 1e5, 1e5});

    const BiasSource ramp({Expr::parse("1e5 * (1 - t/10e-12)"), Expr::parse("0"), Expr::parse("0")});
    CHECK(ramp.time_dependent());
    CHECK(ramp.uniform());
    CHECK(bias_field(5e-12, g, ramp).get(0).x == doctest::Approx(5e4));

    const BiasSource bad({Expr::parse("sqrt(x - 1)"), Expr::parse("0"), Expr::parse("0")});
    CHECK_FALSE(bad.uniform());
    CHECK_THROWS_AS(bias_field(0.0, g, bad), Error);
}

TEST_CASE("exchange of uniform field is zero") {
    const GridSpec g(5, 4, 3, 2e-9, 2e-9, 2e-9);
    MaterialMap mat(g, 8e5, 1.3e-11, 0.02);
    const VectorField3 m(g, {0.6 * 8e5, 0.8 * 8e5, 0});
    for (auto bc : {BoundaryMode::ZeroFlux, BoundaryMode::Periodic}) {
        const VectorField3 h = exchange_field(m, mat, bc);
        CHECK(h.max_abs() == 0.0);
    }
}

TEST_CASE("exchange helix eigenvalue with periodic ghosting") {
    const double Ms = 8e5, A = 1.3e-11, dx = 2e-9;
    const int nx = 16;
    const GridSpec g(nx, 1, 1, dx, dx, dx);
    MaterialMap mat(g, Ms, A, 0.1);
    const double k = 2 * kPi * 3 / (nx * dx);
    VectorField3 m(g);
    for (int i = 0; i < nx; ++i) {
        const double x = (i + 0.5) * dx;
        m.set(i, {Ms * std::cos(k * x), Ms * std::sin(k * x), 0});
    }
    const VectorField3 h = exchange_field(m, mat, BoundaryMode::Periodic);
    const double lambda = -(2 * A / (kMu0 * Ms * Ms)) * (2 - 2 * std::cos(k * dx)) / (dx * dx);
    for (int i = 0; i < nx; ++i) {
        for (int c = 0; c < 3; ++c) {
            CHECK(h.get(i)[c] == doctest::Approx(lambda * m.get(i)[c]).epsilon(1e-12).scale(Ms * std::abs(lambda)));
        }
    }
}

TEST_CASE("exchange two-cell zero-flux hand evaluation") {
    const double Ms = 8e5, A = 1.3e-11, dx = 3e-9;
    const GridSpec g(2, 1, 1, dx, dx, dx);
    MaterialMap mat(g, Ms, A, 0.1);
    VectorField3 m(g);
    m.set(0, {Ms, 0, 0});
    m.set(1, {0, Ms, 0});
    const VectorField3 h = exchange_field(m, mat, BoundaryMode::ZeroFlux);
    const Vec3 expect = (m.get(1) - m.get(0)) * (2 * A / (kMu0 * Ms * Ms) / (dx * dx));
    for (int c = 0; c < 3; ++c) CHECK(h.get(0)[c] == doctest::Approx(expect[c]));
    for (int c = 0; c < 3; ++c) CHECK(h.get(1)[c] == doctest::Approx(-expect[c]));
}

TEST_CASE("exchange treats vacuum neighbours as zero-flux boundaries") {
    const double Ms = 8e5, A = 1.3e-11, dx = 3e-9;
    const GridSpec g(3, 1, 1, dx, dx, dx);
    MaterialMap mat(g, Ms, A, 0.1);
    mat.Ms[2] = 0.0;
    VectorField3 m(g);
    m.set(0, {Ms, 0, 0});
    m.set(1, {0, Ms, 0});
    const VectorField3 h = exchange_field(m, mat, BoundaryMode::ZeroFlux);
    const Vec3 expect = (m.get(0) - m.get(1)) * (2 * A / (kMu0 * Ms * Ms) / (dx * dx));
    for (int c = 0; c < 3; ++c) CHECK(h.get(1)[c] == doctest::Approx(expect[c]));
    CHECK(h.get(2) == Vec3{});
}

TEST_CASE("exchange uses harmonic-mean face coefficients") {
    const double Ms = 1e6, dx = 1e-9;
    const GridSpec g(2, 1, 1, dx, dx, dx);
    MaterialMap mat(g, Ms, 1e-11, 0.1);
    mat.A[1] = 3e-11;
    VectorField3 m(g);
    m.set(0, {Ms, 0, 0});
    m.set(1, {0, Ms, 0});
    const VectorField3 h = exchange_field(m, mat, BoundaryMode::ZeroFlux);
    const double af = 2 * 1e-11 * 3e-11 / 4e-11;
    CHECK(h.get(0).y == doctest::Approx(2 * af / (kMu0 * Ms * dx * dx)));
}

TEST_CASE("uniform-material exchange matches the general stencil") {
    const GridSpec g(9, 7, 3, 2e-9, 3e-9, 1.5e-9);
    const MaterialMap mat(g, 8e5, 1.3e-11, 0.5);
    std::mt19937_64 rng(17);
    const VectorField3 m = random_unit_field(g, mat, rng);
    // D = 0 makes the chiral ghost identical to zero flux, but it takes the general path.
    const VectorField3 fast = exchange_field(m, mat, BoundaryMode::ZeroFlux);
    const VectorField3 general = exchange_field(m, mat, BoundaryMode::Chiral);
    CHECK(max_rel_diff(fast, general) < 1e-14);
}

TEST_CASE("exchange and anisotropy are linear") {
    std::mt19937_64 rng(11);
    const GridSpec g(6, 5, 4, 1e-9, 1.5e-9, 2e-9);
    MaterialMap mat(g, 8e5, 1.3e-11, 0.1, 5e4);
    mat.easy_axis = {0.6, 0.0, 0.8};
    std::normal_distribution<double> n(0.0, 8e5);
    VectorField3 u(g), v(g);
    for (double& x : u.data()) x = n(rng);
    for (double& x : v.data()) x = n(rng);
    const double a = 1.7, b = -0.3;
    VectorField3 w = u;
    for (std::size_t i = 0; i < w.data().size(); ++i) w.data()[i] = a * u.data()[i] + b * v.data()[i];
    for (auto op : {+[](const VectorField3& x, const MaterialMap& mm) { return exchange_field(x, mm); },
                    +[](const VectorField3& x, const MaterialMap& mm) { return anisotropy_field(x, mm); }}) {
        const VectorField3 hu = op(u, mat), hv = op(v, mat), hw = op(w, mat);
        VectorField3 combo = hu;
        for (std::size_t i = 0; i < combo.data().size(); ++i)
            combo.data()[i] = a * hu.data()[i] + b * hv.data()[i];
        CHECK(max_rel_diff(hw, combo) <= 1e-12);
    }
}

TEST_CASE("exchange operator is self-adjoint with periodic ghosting") {
    std::mt19937_64 rng(12);
    const GridSpec g(7, 6, 5, 1e-9, 1.3e-9, 0.7e-9);
    MaterialMap mat(g, 8e5, 1.3e-11, 0.1);
    std::normal_distribution<double> n(0.0, 1.0);
    VectorField3 u(g), v(g);
    for (double& x : u.data()) x = n(rng);
    for (double& x : v.data()) x = n(rng);
    const double lhs = inner(u, exchange_field(v, mat, BoundaryMode::Periodic));
    const double rhs = inner(exchange_field(u, mat, BoundaryMode::Periodic), v);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("anisotropy examples") {
    const GridSpec g(1, 1, 1, 1e-9, 1e-9, 1e-9);
    const double Ms = 8e5;
    const double Ku = 4.021216e4;
    MaterialMap mat(g, Ms, 0.0, 0.1, Ku);
    const VectorField3 up(g, {0, 0, Ms});
    const Vec3 h = anisotropy_field(up, mat).get(0);
    CHECK(h.x == 0.0);
    CHECK(h.y == 0.0);
    CHECK(h.z == doctest::Approx(8e4).epsilon(1e-5));
    CHECK(h.z == doctest::Approx(2 * Ku / (kMu0 * Ms)).epsilon(1e-14));
    MaterialMap exact(g, Ms, 0.0, 0.1, 0.1 * 0.5 * kMu0 * Ms * Ms);
    CHECK(anisotropy_field(up, exact).get(0).z == doctest::Approx(0.1 * Ms).epsilon(1e-14));
    const VectorField3 side(g, {Ms, 0, 0});
    CHECK(anisotropy_field(side, mat).get(0) == Vec3{});
}

TEST_CASE("dmi field of D = 0 and of uniform interior") {
    std::mt19937_64 rng(2);
    const GridSpec g(6, 6, 1, 1e-9, 1e-9, 0.25e-9);
    MaterialMap mat(g, 1.1e6, 1.6e-11, 0.05, 0.0, 0.0);
    const VectorField3 m = random_unit_field(g, mat, rng);
    CHECK(dmi_field(m, mat).max_abs() == 0.0);

    MaterialMap dmat(g, 1.1e6, 1.6e-11, 0.05, 0.0, 4.5e-3);
    const VectorField3 up(g, {0, 0, 1.1e6});
    const VectorField3 h = dmi_field(up, dmat, BoundaryMode::Chiral);
    for (std::int64_t j = 1; j < 5; ++j)
        for (std::int64_t i = 1; i < 5; ++i) CHECK(norm(h.get(g.index(i, j, 0))) == 0.0);
    CHECK(dmi_field(up, dmat, BoundaryMode::ZeroFlux).max_abs() == 0.0);
}

TEST_CASE("dmi three-cell stencil hand evaluation") {
    const double Ms = 1e6, D = 3e-3, dx = 1e-9;
    const GridSpec g(3, 1, 1, dx, dx, dx);
    MaterialMap mat(g, Ms, 1.5e-11, 0.1, 0.0, D);
    VectorField3 m(g);
    // mz ramps along x with compensating mx
    const double s = 0.2;
    m.set(0, Vec3{-s, 0, std::sqrt(1 - s * s)} * Ms);
    m.set(1, Vec3{0, 0, 1} * Ms);
    m.set(2, Vec3{s, 0, std::sqrt(1 - s * s)} * Ms);
    const Vec3 h = dmi_field(m, mat, BoundaryMode::Periodic).get(1);
    const double dmx = (s - (-s)) / (2 * dx);
    const double dmz = 0.0;
    const double pref = -2 * D / (kMu0 * Ms);
    CHECK(h.x == doctest::Approx(-pref * dmz));
    CHECK(h.y == 0.0);
    CHECK(h.z == doctest::Approx(pref * dmx));

    m.set(0, Vec3{0, 0.3, std::sqrt(1 - 0.09)} * Ms);
    m.set(2, Vec3{0, -0.3, std::sqrt(1 - 0.09)} * Ms);
    m.set(1, Vec3{0, 0, 1} * Ms);
    m.set(2, Vec3{0.1, 0, std::sqrt(0.99)} * Ms);
    const Vec3 h2 = dmi_field(m, mat, BoundaryMode::Periodic).get(1);
    const double gx_mz = (std::sqrt(0.99) - std::sqrt(1 - 0.09)) / (2 * dx);
    const double gx_mx = 0.1 / (2 * dx);
    CHECK(h2.x == doctest::Approx(-pref * gx_mz));
    CHECK(h2.z == doctest::Approx(pref * gx_mx));
}

TEST_CASE("energy of uniform state along the easy axis is zero") {
    const GridSpec g(4, 4, 4, 2e-9, 2e-9, 2e-9);
    MaterialMap mat(g, 8e5, 1.3e-11, 0.1, 4e4);
    const VectorField3 m(g, {0, 0, 8e5});
    const VectorField3 hx = exchange_field(m, mat);
    TermFields f;
    f.exchange = &hx;
    f.anisotropy = true;
    for (auto form : {ExchangeEnergyForm::CentralDifference, ExchangeEnergyForm::FieldConsistent}) {
        const EnergyBreakdown e = energy_breakdown(m, f, mat, BoundaryMode::ZeroFlux, form);
        CHECK(e.e_exch == 0.0);
        CHECK(e.e_anis == 0.0);
        CHECK(e.Km == doctest::Approx(0.5 * kMu0 * 8e5 * 8e5));
    }
}

TEST_CASE("exchange and anisotropy energies are non-negative and bounded") {
    std::mt19937_64 rng(21);
    const GridSpec g(6, 5, 4, 2e-9, 2e-9, 2e-9);
    const double Ku = 4e4;
    MaterialMap mat(g, 8e5, 1.3e-11, 0.1, Ku);
    for (int trial = 0; trial < 10; ++trial) {
        const VectorField3 m = random_unit_field(g, mat, rng);
        const VectorField3 hx = exchange_field(m, mat);
        TermFields f;
        f.exchange = &hx;
        f.anisotropy = true;
        for (auto form : {ExchangeEnergyForm::CentralDifference, ExchangeEnergyForm::FieldConsistent}) {
            const EnergyBreakdown e = energy_breakdown(m, f, mat, BoundaryMode::ZeroFlux, form);
            CHECK(e.e_exch >= 0.0);
            CHECK(e.e_anis >= 0.0);
            CHECK(e.e_anis <= Ku);
            CHECK(std::isfinite(e.total()));
        }
    }
}

TEST_CASE("field-consistent exchange energy matches the discrete Dirichlet form") {
    std::mt19937_64 rng(4);
    const GridSpec g(5, 4, 3, 1e-9, 2e-9, 1.5e-9);
    MaterialMap mat(g, 8e5, 1.3e-11, 0.1);
    const VectorField3 m = random_unit_field(g, mat, rng);
    const VectorField3 hx = exchange_field(m, mat);
    TermFields f;
    f.exchange = &hx;
    const double e = energy_breakdown(m, f, mat, BoundaryMode::ZeroFlux, ExchangeEnergyForm::FieldConsistent).e_exch;
    // A sum over interior faces of |m_i - m_j|^2 / h^2, per cell
    double s = 0.0;
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) {
                const Vec3 a = m.get(g.index(i, j, k)) * (1 / 8e5);
                if (i + 1 < g.nx) { const Vec3 d = m.get(g.index(i + 1, j, k)) * (1 / 8e5) - a; s += dot(d, d) / (g.dx * g.dx); }
                if (j + 1 < g.ny) { const Vec3 d = m.get(g.index(i, j + 1, k)) * (1 / 8e5) - a; s += dot(d, d) / (g.dy * g.dy); }
                if (k + 1 < g.nz) { const Vec3 d = m.get(g.index(i, j, k + 1)) * (1 / 8e5) - a; s += dot(d, d) / (g.dz * g.dz); }
            }
    CHECK(e == doctest::Approx(1.3e-11 * s / static_cast<double>(g.cells())).epsilon(1e-12));
}
