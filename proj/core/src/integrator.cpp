#include "magnex/integrator.hpp"

#include <cmath>
#include <sstream>

#include "magnex/error.hpp"

namespace magnex {

namespace {

using T = Kw3Tableau;

// out = y + s1 * a (+ s2 * b (+ s3 * c))
void combine(VectorField3& out, const VectorField3& y, double s1, const VectorField3& a,
             double s2 = 0.0, const VectorField3* b = nullptr, double s3 = 0.0,
             const VectorField3* c = nullptr) {
    if (!(out.grid() == y.grid()) || out.data().size() != y.data().size()) out = VectorField3(y.grid());
    auto o = out.data();
    const auto yd = y.data();
    const auto ad = a.data();
    const auto n = static_cast<std::int64_t>(o.size());
    const double* bd = b ? b->data().data() : nullptr;
    const double* cd = c ? c->data().data() : nullptr;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        double v = yd[i] + s1 * ad[i];
        if (bd) v += s2 * bd[i];
        if (cd) v += s3 * cd[i];
        o[i] = v;
    }
}

}  // namespace

void OdeSystem::full_rhs(double t, const VectorField3& y, VectorField3& out) {
    if (has_slow()) {
        slow_rhs(t, y, out);
        if (has_fast()) {
            fast_rhs(t, y, scratch_);
            out.axpy(1.0, scratch_);
        }
    } else {
        fast_rhs(t, y, out);
    }
}

Method parse_method(std::string_view name) {
    if (name == "euler") return Method::Euler;
    if (name == "rk4") return Method::RK4;
    if (name == "mri" || name == "mri-kw3") return Method::MriKw3;
    throw Error("unknown integrator '" + std::string(name) + "' (expected euler, rk4 or mri-kw3)");
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::Euler: return "euler";
        case Method::RK4: return "rk4";
        case Method::MriKw3: return "mri-kw3";
    }
    return "?";
}

void IntegratorSpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("integrator: dt must be positive");
    if (!(theta > 0.0 && theta <= 1.0)) throw Error("integrator: theta must lie in (0, 1]");
}

int fast_substeps(double interval, double theta) {
    const double n = std::ceil(interval / theta * (1.0 - 1e-12));
    return std::max(1, static_cast<int>(n));
}

Integrator::Integrator(const IntegratorSpec& spec, const GridSpec& grid) : spec_(spec) {
    spec_.validate();
    for (VectorField3* f : {&k1_, &k2_, &k3_, &k4_, &tmp_, &forcing_, &fk1_, &fk2_, &fk3_, &ftmp_}) {
        *f = VectorField3(grid);
    }
}

StepInfo Integrator::step(OdeSystem& sys, double t, VectorField3& y, double dt) {
    if (!(dt > 0.0)) throw Error("integrator: step size must be positive");
    switch (spec_.method) {
        case Method::Euler: return euler(sys, t, y, dt);
        case Method::RK4: return rk4(sys, t, y, dt);
        case Method::MriKw3: return mri(sys, t, y, dt);
    }
    return {};
}

void Integrator::stage_project(OdeSystem& sys, VectorField3& y) const {
    if (spec_.renormalize_stages) sys.project(y);
}

void Integrator::finish(OdeSystem& sys, VectorField3& y, double t, StepInfo& info) const {
    if (!y.all_finite()) {
        const auto d = y.data();
        std::size_t bad = 0;
        while (bad < d.size() && std::isfinite(d[bad])) ++bad;
        const std::size_t cell = bad % y.cells();
        std::ostringstream msg;
        msg << "non-finite state after step ending at t = " << t << " s, cell " << cell;
        const std::string extra = sys.describe_cell(cell);
        if (!extra.empty()) msg << " (" << extra << ")";
        throw StepFailure(msg.str());
    }
    info.drift = sys.constraint_drift(y);
    if (spec_.renormalize_step) sys.project(y);
}

StepInfo Integrator::euler(OdeSystem& sys, double t, VectorField3& y, double dt) {
    StepInfo info;
    sys.full_rhs(t, y, k1_);
    ++info.slow_evals;
    y.axpy(dt, k1_);
    finish(sys, y, t + dt, info);
    return info;
}

StepInfo Integrator::rk4(OdeSystem& sys, double t, VectorField3& y, double dt) {
    StepInfo info;
    sys.full_rhs(t, y, k1_);
    combine(tmp_, y, 0.5 * dt, k1_);
    stage_project(sys, tmp_);
    sys.full_rhs(t + 0.5 * dt, tmp_, k2_);
    combine(tmp_, y, 0.5 * dt, k2_);
    stage_project(sys, tmp_);
    sys.full_rhs(t + 0.5 * dt, tmp_, k3_);
    combine(tmp_, y, dt, k3_);
    stage_project(sys, tmp_);
    sys.full_rhs(t + dt, tmp_, k4_);
    info.slow_evals = 4;
    k2_.axpy(1.0, k3_);
    combine(tmp_, y, dt / 6.0, k1_, dt / 3.0, &k2_, dt / 6.0, &k4_);
    std::swap(y, tmp_);
    finish(sys, y, t + dt, info);
    return info;
}

int Integrator::fast_solve(OdeSystem& sys, double t0, double len, VectorField3& v,
                           const VectorField3& forcing) {
    if (!sys.has_fast()) {
        v.axpy(len, forcing);
        return 0;
    }
    const int n = fast_substeps(len / current_dt_, spec_.theta);
    const double hs = len / n;
    for (int s = 0; s < n; ++s) {
        const double tau = t0 + s * hs;
        sys.fast_rhs(tau, v, fk1_);
        fk1_.axpy(1.0, forcing);
        combine(ftmp_, v, hs * T::a21, fk1_);
        stage_project(sys, ftmp_);
        sys.fast_rhs(tau + T::c2 * hs, ftmp_, fk2_);
        fk2_.axpy(1.0, forcing);
        combine(ftmp_, v, hs * T::a31, fk1_, hs * T::a32, &fk2_);
        stage_project(sys, ftmp_);
        sys.fast_rhs(tau + T::c3 * hs, ftmp_, fk3_);
        fk3_.axpy(1.0, forcing);
        combine(ftmp_, v, hs * T::b1, fk1_, hs * T::b2, &fk2_, hs * T::b3, &fk3_);
        std::swap(v, ftmp_);
        if (s + 1 < n) stage_project(sys, v);
    }
    return 3 * n;
}

StepInfo Integrator::mri(OdeSystem& sys, double t, VectorField3& y, double dt) {
    StepInfo info;
    current_dt_ = dt;
    const bool slow = sys.has_slow();
    auto slow_eval = [&](double ts, const VectorField3& state, VectorField3& out) {
        if (slow) {
            sys.slow_rhs(ts, state, out);
            ++info.slow_evals;
        } else {
            out.set_zero();
        }
    };

    // Stage 1 is the step start; each later stage integrates the fast ODE from the previous
    // stage with constant slow forcing (1/Δc) Σ_j (a_ij - a_{i-1,j}) f_S(Y_j).
    slow_eval(t, y, k1_);

    forcing_.set_zero();
    combine(forcing_, forcing_, T::a21 / T::c2, k1_);
    info.fast_evals += fast_solve(sys, t, T::c2 * dt, y, forcing_);
    stage_project(sys, y);
    slow_eval(t + T::c2 * dt, y, k2_);

    constexpr double d3 = T::c3 - T::c2;
    forcing_.set_zero();
    combine(forcing_, forcing_, (T::a31 - T::a21) / d3, k1_, T::a32 / d3, &k2_);
    info.fast_evals += fast_solve(sys, t + T::c2 * dt, d3 * dt, y, forcing_);
    stage_project(sys, y);
    slow_eval(t + T::c3 * dt, y, k3_);

    constexpr double d4 = 1.0 - T::c3;
    forcing_.set_zero();
    combine(forcing_, forcing_, (T::b1 - T::a31) / d4, k1_, (T::b2 - T::a32) / d4, &k2_,
            T::b3 / d4, &k3_);
    info.fast_evals += fast_solve(sys, t + T::c3 * dt, d4 * dt, y, forcing_);

    finish(sys, y, t + dt, info);
    return info;
}

}  // namespace magnex
