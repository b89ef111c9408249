#pragma once

#include <string>
#include <string_view>

#include "magnex/grid.hpp"

namespace magnex {

/// Right-hand side split into a slow and a fast part: y' = f_S(t, y) + f_F(t, y).
class OdeSystem {
public:
    virtual ~OdeSystem() = default;

    virtual void slow_rhs(double t, const VectorField3& y, VectorField3& out) = 0;
    virtual void fast_rhs(double t, const VectorField3& y, VectorField3& out) = 0;
    virtual bool has_fast() const = 0;
    virtual bool has_slow() const = 0;
    /// f_S + f_F; systems may override to share work between the parts.
    virtual void full_rhs(double t, const VectorField3& y, VectorField3& out);

    /// Maps a state back onto its constraint manifold (no-op by default).
    virtual void project(VectorField3&) {}
    /// Largest relative constraint violation of a state, e.g. max | |M|/Ms - 1 |.
    virtual double constraint_drift(const VectorField3&) const { return 0.0; }
    /// Diagnostic text for one cell, used in failure reports.
    virtual std::string describe_cell(std::size_t) const { return {}; }

private:
    VectorField3 scratch_;
};

enum class Method { Euler, RK4, MriKw3 };

Method parse_method(std::string_view name);
std::string_view method_name(Method m);

struct IntegratorSpec {
    Method method = Method::RK4;
    double dt = 1e-13;
    /// Fast step as a fraction of the slow step (MRI only).
    double theta = 0.1;
    /// Project intermediate stage states; the step result is always projected.
    bool renormalize_stages = true;
    /// Project the step result.
    bool renormalize_step = true;

    void validate() const;
};

/// Knoth–Wolke three-stage explicit tableau used for both MRI levels.
struct Kw3Tableau {
    static constexpr double a21 = 1.0 / 3.0;
    static constexpr double a31 = -3.0 / 16.0;
    static constexpr double a32 = 15.0 / 16.0;
    static constexpr double b1 = 1.0 / 6.0;
    static constexpr double b2 = 3.0 / 10.0;
    static constexpr double b3 = 8.0 / 15.0;
    static constexpr double c2 = 1.0 / 3.0;
    static constexpr double c3 = 3.0 / 4.0;
};

/// Fast substeps needed to cover a fraction `interval` of the slow step with step theta.
int fast_substeps(double interval, double theta);

struct StepInfo {
    /// Largest constraint drift of the step result before projection.
    double drift = 0.0;
    int slow_evals = 0;
    int fast_evals = 0;
};

/// One-step integrator with preallocated stage storage.
class Integrator {
public:
    Integrator(const IntegratorSpec& spec, const GridSpec& grid);

    const IntegratorSpec& spec() const { return spec_; }
    /// Advances y from t to t + dt. Throws StepFailure on a non-finite result.
    StepInfo step(OdeSystem& sys, double t, VectorField3& y, double dt);

private:
    StepInfo euler(OdeSystem& sys, double t, VectorField3& y, double dt);
    StepInfo rk4(OdeSystem& sys, double t, VectorField3& y, double dt);
    StepInfo mri(OdeSystem& sys, double t, VectorField3& y, double dt);
    /// Advances v' = f_F(v) + forcing over [t0, t0 + len] with the inner KW3 method.
    int fast_solve(OdeSystem& sys, double t0, double len, VectorField3& v,
                   const VectorField3& forcing);
    void stage_project(OdeSystem& sys, VectorField3& y) const;
    void finish(OdeSystem& sys, VectorField3& y, double t, StepInfo& info) const;

    IntegratorSpec spec_;
    double current_dt_ = 0.0;
    VectorField3 k1_, k2_, k3_, k4_, tmp_, forcing_, fk1_, fk2_, fk3_, ftmp_;
};

}  // namespace magnex
