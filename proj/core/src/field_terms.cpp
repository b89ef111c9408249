#include "magnex/field_terms.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "magnex/error.hpp"

namespace magnex {

namespace {

struct Cell {
    std::int64_t i, j, k;
};

// Normalized magnetization across face (axis, side) of cell c. Out-of-domain and vacuum neighbours
// are replaced by the ghost rule of `bc`; `face_A` receives the face exchange coefficient.
Vec3 neighbour_m(const VectorField3& m, const MaterialMap& mat, const Cell& c, std::size_t idx,
                 const Vec3& mi, int axis, int side, BoundaryMode bc, double* face_A) {
    const GridSpec& g = m.grid();
    std::int64_t n[3] = {c.i, c.j, c.k};
    n[axis] += side;
    const bool outside = n[axis] < 0 || n[axis] >= g.n(axis);
    if (outside && bc == BoundaryMode::Periodic) n[axis] = (n[axis] + g.n(axis)) % g.n(axis);
    if (!outside || bc == BoundaryMode::Periodic) {
        const std::size_t nb = g.index(n[0], n[1], n[2]);
        if (mat.Ms[nb] > 0.0) {
            if (face_A != nullptr) {
                const double a = mat.A[idx];
                const double b = mat.A[nb];
                *face_A = (a + b) > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
            }
            return m.get(nb) * (1.0 / mat.Ms[nb]);
        }
    }
    if (face_A != nullptr) *face_A = mat.A[idx];
    const BoundaryMode rule = bc == BoundaryMode::Periodic ? BoundaryMode::ZeroFlux : bc;
    if (rule == BoundaryMode::Chiral && mat.D[idx] != 0.0 && !(mat.A[idx] > 0.0)) {
        throw Error("chiral boundary needs A > 0 at cell (" + std::to_string(c.i) + ", " +
                    std::to_string(c.j) + ", " + std::to_string(c.k) + ")");
    }
    return boundary_ghost(mi, axis, side, g.h(axis), mat.D[idx], mat.A[idx], rule);
}

// Central-difference gradient of m along `axis`, through the ghost rule.
Vec3 central_gradient(const VectorField3& m, const MaterialMap& mat, const Cell& c,
                      std::size_t idx, const Vec3& mi, int axis, BoundaryMode bc) {
    const Vec3 up = neighbour_m(m, mat, c, idx, mi, axis, +1, bc, nullptr);
    const Vec3 dn = neighbour_m(m, mat, c, idx, mi, axis, -1, bc, nullptr);
    return (up - dn) * (1.0 / (2.0 * m.grid().h(axis)));
}

template <class F>
void for_each_cell(const GridSpec& g, F&& f) {
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) f(Cell{i, j, k}, g.index(i, j, k));
}

void check_grid(const VectorField3& m, const MaterialMap& mat, const char* what) {
    if (!(m.grid() == mat.grid)) throw Error(std::string(what) + ": field and material grids differ");
}

void prepare(VectorField3& out, const GridSpec& g) {
    if (!(out.grid() == g) || out.data().size() != 3 * g.cells()) out = VectorField3(g);
}

}  // namespace

bool BiasSource::time_dependent() const {
    if (const auto* e = std::get_if<std::array<Expr, 3>>(&source_)) {
        return std::ranges::any_of(*e, [](const Expr& x) { return x.depends_on_time(); });
    }
    return false;
}

bool BiasSource::uniform() const {
    if (const auto* e = std::get_if<std::array<Expr, 3>>(&source_)) {
        return std::ranges::none_of(*e, [](const Expr& x) { return x.depends_on_space(); });
    }
    return true;
}

Vec3 BiasSource::at(const Vec3& r, double t) const {
    if (const auto* v = std::get_if<Vec3>(&source_)) return *v;
    const auto& e = std::get<std::array<Expr, 3>>(source_);
    return {e[0].eval(r.x, r.y, r.z, t), e[1].eval(r.x, r.y, r.z, t), e[2].eval(r.x, r.y, r.z, t)};
}

VectorField3 bias_field(double t, const GridSpec& grid, const BiasSource& source) {
    VectorField3 out(grid);
    if (source.uniform()) {
        out.fill(source.at(grid.center(0, 0, 0), t));
        return out;
    }
    for (std::int64_t k = 0; k < grid.nz; ++k)
        for (std::int64_t j = 0; j < grid.ny; ++j)
            for (std::int64_t i = 0; i < grid.nx; ++i) {
                try {
                    out.set(grid.index(i, j, k), source.at(grid.center(i, j, k), t));
                } catch (const Error& e) {
                    throw Error("bias field at cell (" + std::to_string(i) + ", " +
                                std::to_string(j) + ", " + std::to_string(k) +
                                "), t = " + std::to_string(t) + ": " + e.what());
                }
            }
    return out;
}

void bias_field(double t, const BiasSource& source, const MaterialMap& mat, VectorField3& out) {
    prepare(out, mat.grid);
    if (source.uniform()) {
        out.fill(source.at(mat.grid.center(0, 0, 0), t));
        return;
    }
    out = bias_field(t, mat.grid, source);
}

void exchange_field(const VectorField3& m, const MaterialMap& mat, BoundaryMode bc,
                    VectorField3& out) {
    check_grid(m, mat, "exchange_field");
    const GridSpec& g = m.grid();
    prepare(out, g);
    const double inv_h2[3] = {1.0 / (g.dx * g.dx), 1.0 / (g.dy * g.dy), 1.0 / (g.dz * g.dz)};
    const std::size_t n = g.cells();
    const double* M[3] = {m.component(0).data(), m.component(1).data(), m.component(2).data()};
    double* H[3] = {out.component(0).data(), out.component(1).data(), out.component(2).data()};
    // Uniform material without DMI ghosts: plain Neumann Laplacian of M.
    const bool uniform = bc == BoundaryMode::ZeroFlux && n > 0 && mat.Ms[0] > 0.0 &&
                         std::all_of(mat.Ms.begin(), mat.Ms.end(), [&](double v) { return v == mat.Ms[0]; }) &&
                         std::all_of(mat.A.begin(), mat.A.end(), [&](double v) { return v == mat.A[0]; });
    if (uniform) {
        const double coef = 2.0 * mat.A[0] / (kMu0 * mat.Ms[0] * mat.Ms[0]);
        const std::int64_t nx = g.nx, ny = g.ny, nz = g.nz;
        const double wx = coef * inv_h2[0], wy = coef * inv_h2[1], wz = coef * inv_h2[2];
        for (int c = 0; c < 3; ++c) {
            const double* f = M[c];
            double* h = H[c];
#pragma omp parallel for collapse(2) schedule(static)
            for (std::int64_t k = 0; k < nz; ++k)
                for (std::int64_t j = 0; j < ny; ++j) {
                    const std::size_t row = static_cast<std::size_t>((k * ny + j) * nx);
                    const double* r = f + row;
                    const double* ym = j > 0 ? r - nx : nullptr;
                    const double* yp = j + 1 < ny ? r + nx : nullptr;
                    const double* zm = k > 0 ? r - nx * ny : nullptr;
                    const double* zp = k + 1 < nz ? r + nx * ny : nullptr;
                    double* o = h + row;
                    for (std::int64_t i = 0; i < nx; ++i) {
                        const double v = r[i];
                        double acc = 0.0, accy = 0.0, accz = 0.0;
                        if (i > 0) acc += r[i - 1] - v;
                        if (i + 1 < nx) acc += r[i + 1] - v;
                        if (ym) accy += ym[i] - v;
                        if (yp) accy += yp[i] - v;
                        if (zm) accz += zm[i] - v;
                        if (zp) accz += zp[i] - v;
                        o[i] = wx * acc + wy * accy + wz * accz;
                    }
                }
        }
        return;
    }
    const std::int64_t stride[3] = {1, g.nx, g.nx * g.ny};
    // Unit vectors once per call; in-domain magnetic neighbours read them directly.
    thread_local std::vector<double> unit;
    unit.resize(3 * n);
#pragma omp parallel for schedule(static)
    for (std::size_t idx = 0; idx < n; ++idx) {
        const double inv = mat.Ms[idx] > 0.0 ? 1.0 / mat.Ms[idx] : 0.0;
        for (int c = 0; c < 3; ++c) unit[c * n + idx] = M[c][idx] * inv;
    }
    const double* U = unit.data();
    const double* Ms = mat.Ms.data();
    const double* A = mat.A.data();
    const double k0 = 2.0 / kMu0;
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                const double ms = Ms[idx];
                if (ms <= 0.0) {
                    H[0][idx] = H[1][idx] = H[2][idx] = 0.0;
                    continue;
                }
                const std::int64_t pos[3] = {i, j, k};
                const double ai = A[idx];
                const double mi[3] = {U[idx], U[n + idx], U[2 * n + idx]};
                double acc[3] = {0.0, 0.0, 0.0};
                for (int axis = 0; axis < 3; ++axis) {
                    if (g.n(axis) == 1 && bc != BoundaryMode::Chiral) continue;
                    for (int side = -1; side <= 1; side += 2) {
                        const std::int64_t p = pos[axis] + side;
                        double a_face;
                        double v[3];
                        const std::size_t nb = idx + side * stride[axis];
                        if (p >= 0 && p < g.n(axis) && Ms[nb] > 0.0) {
                            const double an = A[nb];
                            a_face = an == ai ? ai : ((ai + an) > 0.0 ? 2.0 * ai * an / (ai + an) : 0.0);
                            v[0] = U[nb];
                            v[1] = U[n + nb];
                            v[2] = U[2 * n + nb];
                        } else {
                            a_face = 0.0;
                            const Vec3 w = neighbour_m(m, mat, Cell{i, j, k}, idx, {mi[0], mi[1], mi[2]}, axis,
                                                       side, bc, &a_face);
                            v[0] = w.x;
                            v[1] = w.y;
                            v[2] = w.z;
                        }
                        const double f = a_face * inv_h2[axis];
                        for (int c = 0; c < 3; ++c) acc[c] += (v[c] - mi[c]) * f;
                    }
                }
                const double s = k0 / ms;
                for (int c = 0; c < 3; ++c) H[c][idx] = acc[c] * s;
            }
}

VectorField3 exchange_field(const VectorField3& m, const MaterialMap& mat, BoundaryMode bc) {
    VectorField3 out(m.grid());
    exchange_field(m, mat, bc, out);
    return out;
}

void anisotropy_field(const VectorField3& m, const MaterialMap& mat, VectorField3& out) {
    check_grid(m, mat, "anisotropy_field");
    prepare(out, m.grid());
    const Vec3 ek = mat.easy_axis;
    for (std::size_t idx = 0; idx < m.cells(); ++idx) {
        const double ms = mat.Ms[idx];
        const double ku = mat.Ku[idx];
        if (ms <= 0.0 || ku == 0.0) {
            out.set(idx, {});
            continue;
        }
        out.set(idx, ek * (2.0 * ku / (kMu0 * ms * ms) * dot(m.get(idx), ek)));
    }
}

VectorField3 anisotropy_field(const VectorField3& m, const MaterialMap& mat) {
    VectorField3 out(m.grid());
    anisotropy_field(m, mat, out);
    return out;
}

void dmi_field(const VectorField3& m, const MaterialMap& mat, BoundaryMode bc, VectorField3& out) {
    check_grid(m, mat, "dmi_field");
    const GridSpec& g = m.grid();
    prepare(out, g);
    const std::size_t n = g.cells();
    const double* M[3] = {m.component(0).data(), m.component(1).data(), m.component(2).data()};
    double* H[3] = {out.component(0).data(), out.component(1).data(), out.component(2).data()};
    thread_local std::vector<double> unit;
    unit.resize(3 * n);
#pragma omp parallel for schedule(static)
    for (std::size_t idx = 0; idx < n; ++idx) {
        const double inv = mat.Ms[idx] > 0.0 ? 1.0 / mat.Ms[idx] : 0.0;
        for (int c = 0; c < 3; ++c) unit[c * n + idx] = M[c][idx] * inv;
    }
    const double* U = unit.data();
    const double* Ms = mat.Ms.data();
    const std::int64_t stride[2] = {1, g.nx};
    const double inv_2h[2] = {1.0 / (2.0 * g.dx), 1.0 / (2.0 * g.dy)};
    for_each_cell(g, [&](const Cell& c, std::size_t idx) {
        const double ms = Ms[idx];
        const double d = mat.D[idx];
        if (ms <= 0.0 || d == 0.0) {
            H[0][idx] = H[1][idx] = H[2][idx] = 0.0;
            return;
        }
        const Vec3 mi{U[idx], U[n + idx], U[2 * n + idx]};
        const std::int64_t pos[2] = {c.i, c.j};
        Vec3 grad[2];
        for (int axis = 0; axis < 2; ++axis) {
            Vec3 v[2];
            for (int s = 0; s < 2; ++s) {
                const int side = s ? 1 : -1;
                const std::int64_t p = pos[axis] + side;
                const std::size_t nb = idx + side * stride[axis];
                if (p >= 0 && p < g.n(axis) && Ms[nb] > 0.0) {
                    v[s] = {U[nb], U[n + nb], U[2 * n + nb]};
                } else {
                    v[s] = neighbour_m(m, mat, c, idx, mi, axis, side, bc, nullptr);
                }
            }
            grad[axis] = (v[1] - v[0]) * inv_2h[axis];
        }
        const double div = grad[0].x + grad[1].y;
        const Vec3 h = Vec3{-grad[0].z, -grad[1].z, div} * (-2.0 * d / (kMu0 * ms));
        H[0][idx] = h.x;
        H[1][idx] = h.y;
        H[2][idx] = h.z;
    });
}

VectorField3 dmi_field(const VectorField3& m, const MaterialMap& mat, BoundaryMode bc) {
    VectorField3 out(m.grid());
    dmi_field(m, mat, bc, out);
    return out;
}

EnergyBreakdown energy_breakdown(const VectorField3& m, const TermFields& fields,
                                 const MaterialMap& mat, BoundaryMode bc,
                                 ExchangeEnergyForm form) {
    check_grid(m, mat, "energy_breakdown");
    const GridSpec& g = m.grid();
    EnergyBreakdown e;
    const double ms_max = *std::ranges::max_element(mat.Ms);
    e.Km = 0.5 * kMu0 * ms_max * ms_max;
    std::size_t count = 0;
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                const double ms = mat.Ms[idx];
                if (ms <= 0.0) continue;
                ++count;
                const Vec3 M = m.get(idx);
                const Vec3 mi = M * (1.0 / ms);
                const Cell c{i, j, k};
                if (fields.demag != nullptr) e.e_demag += -0.5 * kMu0 * dot(M, fields.demag->get(idx));
                if (fields.bias != nullptr) e.e_zeeman += -kMu0 * dot(M, fields.bias->get(idx));
                if (fields.anisotropy) {
                    const double p = dot(mat.easy_axis, mi);
                    e.e_anis += mat.Ku[idx] * (1.0 - p * p);
                }
                if (fields.exchange != nullptr) {
                    if (form == ExchangeEnergyForm::FieldConsistent) {
                        e.e_exch += -0.5 * kMu0 * dot(M, fields.exchange->get(idx));
                    } else {
                        double s = 0.0;
                        for (int axis = 0; axis < 3; ++axis) {
                            if (g.n(axis) == 1 && bc != BoundaryMode::Chiral) continue;
                            const Vec3 gr = central_gradient(m, mat, c, idx, mi, axis, bc);
                            s += dot(gr, gr);
                        }
                        e.e_exch += mat.A[idx] * s;
                    }
                }
                if (fields.dmi != nullptr && form == ExchangeEnergyForm::FieldConsistent) {
                    e.e_dmi += -0.5 * kMu0 * dot(M, fields.dmi->get(idx));
                } else if (fields.dmi != nullptr && mat.D[idx] != 0.0) {
                    const Vec3 gx = central_gradient(m, mat, c, idx, mi, 0, bc);
                    const Vec3 gy = central_gradient(m, mat, c, idx, mi, 1, bc);
                    const double w = mi.z * (gx.x + gy.y) - (mi.x * gx.z + mi.y * gy.z);
                    e.e_dmi += mat.D[idx] * w;
                }
            }
    if (count > 0) {
        const double inv = 1.0 / static_cast<double>(count);
        e.e_demag *= inv;
        e.e_exch *= inv;
        e.e_anis *= inv;
        e.e_dmi *= inv;
        e.e_zeeman *= inv;
    }
    return e;
}

}  // namespace magnex
