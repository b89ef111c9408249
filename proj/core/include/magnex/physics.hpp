#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "magnex/demag.hpp"
#include "magnex/field_terms.hpp"
#include "magnex/integrator.hpp"
#include "magnex/llg.hpp"

namespace magnex {

enum class Term { Bias, Demag, Anisotropy, Exchange, Dmi };
inline constexpr int kTermCount = 5;

std::string_view term_name(Term t);

/// Right-hand-side partitions. SlowImplicit is reserved; assigning a term to it is rejected.
enum class Partition { SlowExplicit, SlowImplicit, Fast };

struct EvalCounters {
    std::array<std::int64_t, kTermCount> evals{};

    std::int64_t operator[](Term t) const { return evals[static_cast<int>(t)]; }
    std::int64_t demag() const { return (*this)[Term::Demag]; }
    std::int64_t exchange() const { return (*this)[Term::Exchange]; }
};

struct PhysicsOptions {
    std::array<bool, kTermCount> enabled{true, true, false, true, false};
    BiasSource bias;
    LlgFlags llg;
    /// Ghost rule; defaults to Chiral when DMI is enabled and ZeroFlux otherwise.
    std::optional<BoundaryMode> boundary;

    bool on(Term t) const { return enabled[static_cast<int>(t)]; }
    void set(Term t, bool v) { enabled[static_cast<int>(t)] = v; }
};

/// LLG right-hand side with every enabled field term assigned to a partition.
/// Defaults: exchange in the fast partition, everything else slow-explicit.
/// Counted evaluations happen only through the OdeSystem interface.
class PartitionedRHS final : public OdeSystem {
public:
    PartitionedRHS(MaterialMap mat, PhysicsOptions opt, std::unique_ptr<DemagBackend> demag = {});

    void assign(Term t, Partition p);
    Partition partition(Term t) const { return part_[static_cast<int>(t)]; }
    /// Moves every enabled term to the slow-explicit partition.
    void all_slow();

    const MaterialMap& material() const { return mat_; }
    /// Mutable access, e.g. to change damping between phases of a protocol.
    MaterialMap& material() { return mat_; }
    const PhysicsOptions& options() const { return opt_; }
    void set_bias(BiasSource b) { opt_.bias = std::move(b); }
    void set_llg_flags(LlgFlags f) { opt_.llg = f; }
    BoundaryMode boundary() const;
    DemagBackend* demag_backend() { return demag_.get(); }

    const EvalCounters& counters() const { return counters_; }
    void reset_counters() { counters_ = {}; }

    /// Summed field of one partition, counted.
    void field(Partition p, double t, const VectorField3& m, VectorField3& h);

    void slow_rhs(double t, const VectorField3& y, VectorField3& out) override;
    void fast_rhs(double t, const VectorField3& y, VectorField3& out) override;
    void full_rhs(double t, const VectorField3& y, VectorField3& out) override;
    bool has_fast() const override;
    bool has_slow() const override;
    void project(VectorField3& y) override { renormalize(y, mat_); }
    double constraint_drift(const VectorField3& y) const override;
    std::string describe_cell(std::size_t idx) const override;

    /// Energies of `m` at time t. Not counted.
    EnergyBreakdown energies(double t, const VectorField3& m,
                             ExchangeEnergyForm form = ExchangeEnergyForm::CentralDifference);
    /// Total effective field. Not counted.
    void effective_field(double t, const VectorField3& m, VectorField3& h);
    /// Demagnetizing field alone. Not counted.
    void demag_field(const VectorField3& m, VectorField3& h);

private:
    bool in(Term t, Partition p) const { return opt_.on(t) && partition(t) == p; }
    bool any_in(Partition p) const;
    void add_term(Term t, double time, const VectorField3& m, VectorField3& h, bool count);
    void sum_fields(Partition p, bool all, double t, const VectorField3& m, VectorField3& h,
                    bool count);

    MaterialMap mat_;
    PhysicsOptions opt_;
    std::unique_ptr<DemagBackend> demag_;
    std::array<Partition, kTermCount> part_{};
    EvalCounters counters_;
    VectorField3 h_, term_;
};

}  // namespace magnex
