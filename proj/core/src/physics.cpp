#include "magnex/physics.hpp"

#include <cmath>
#include <sstream>

#include "magnex/error.hpp"

namespace magnex {

std::string_view term_name(Term t) {
    switch (t) {
        case Term::Bias: return "bias";
        case Term::Demag: return "demag";
        case Term::Anisotropy: return "anisotropy";
        case Term::Exchange: return "exchange";
        case Term::Dmi: return "dmi";
    }
    return "?";
}

PartitionedRHS::PartitionedRHS(MaterialMap mat, PhysicsOptions opt,
                               std::unique_ptr<DemagBackend> demag)
    : mat_(std::move(mat)), opt_(std::move(opt)), demag_(std::move(demag)) {
    mat_.validate();
    if (opt_.on(Term::Demag) && !demag_) demag_ = std::make_unique<FftDemagBackend>(mat_.grid);
    part_.fill(Partition::SlowExplicit);
    part_[static_cast<int>(Term::Exchange)] = Partition::Fast;
    h_ = VectorField3(mat_.grid);
    term_ = VectorField3(mat_.grid);
}

void PartitionedRHS::assign(Term t, Partition p) {
    if (p == Partition::SlowImplicit) {
        throw Error("partition: the slow-implicit partition is not supported (term " +
                    std::string(term_name(t)) + ")");
    }
    part_[static_cast<int>(t)] = p;
}

void PartitionedRHS::all_slow() { part_.fill(Partition::SlowExplicit); }

BoundaryMode PartitionedRHS::boundary() const {
    if (opt_.boundary) return *opt_.boundary;
    return opt_.on(Term::Dmi) ? BoundaryMode::Chiral : BoundaryMode::ZeroFlux;
}

bool PartitionedRHS::any_in(Partition p) const {
    for (int i = 0; i < kTermCount; ++i) {
        if (in(static_cast<Term>(i), p)) return true;
    }
    return false;
}

bool PartitionedRHS::has_fast() const { return any_in(Partition::Fast); }
bool PartitionedRHS::has_slow() const { return any_in(Partition::SlowExplicit); }

void PartitionedRHS::add_term(Term t, double time, const VectorField3& m, VectorField3& h,
                              bool count) {
    switch (t) {
        case Term::Bias: bias_field(time, opt_.bias, mat_, term_); break;
        case Term::Demag: demag_->compute(m, term_); break;
        case Term::Anisotropy: anisotropy_field(m, mat_, term_); break;
        case Term::Exchange: exchange_field(m, mat_, boundary(), term_); break;
        case Term::Dmi: dmi_field(m, mat_, boundary(), term_); break;
    }
    if (count) ++counters_.evals[static_cast<int>(t)];
    h.axpy(1.0, term_);
}

void PartitionedRHS::sum_fields(Partition p, bool all, double t, const VectorField3& m,
                                VectorField3& h, bool count) {
    if (!(h.grid() == mat_.grid) || h.data().size() != 3 * mat_.grid.cells()) h = VectorField3(mat_.grid);
    h.set_zero();
    for (int i = 0; i < kTermCount; ++i) {
        const auto term = static_cast<Term>(i);
        if (all ? opt_.on(term) : in(term, p)) add_term(term, t, m, h, count);
    }
}

void PartitionedRHS::field(Partition p, double t, const VectorField3& m, VectorField3& h) {
    sum_fields(p, false, t, m, h, true);
}

void PartitionedRHS::slow_rhs(double t, const VectorField3& y, VectorField3& out) {
    sum_fields(Partition::SlowExplicit, false, t, y, h_, true);
    llg_rhs(y, h_, mat_, opt_.llg, out);
}

void PartitionedRHS::fast_rhs(double t, const VectorField3& y, VectorField3& out) {
    sum_fields(Partition::Fast, false, t, y, h_, true);
    llg_rhs(y, h_, mat_, opt_.llg, out);
}

void PartitionedRHS::full_rhs(double t, const VectorField3& y, VectorField3& out) {
    // The LLG right-hand side is linear in H, so one evaluation of the summed field suffices.
    sum_fields(Partition::SlowExplicit, true, t, y, h_, true);
    llg_rhs(y, h_, mat_, opt_.llg, out);
}

double PartitionedRHS::constraint_drift(const VectorField3& y) const {
    double drift = 0.0;
    for (std::size_t i = 0; i < y.cells(); ++i) {
        const double ms = mat_.Ms[i];
        if (ms > 0.0) drift = std::max(drift, std::abs(norm(y.get(i)) / ms - 1.0));
    }
    return drift;
}

std::string PartitionedRHS::describe_cell(std::size_t idx) const {
    std::ostringstream s;
    s << "Ms = " << mat_.Ms[idx] << " A/m, last |H| = " << norm(h_.get(idx))
      << " A/m, last term |H| = " << norm(term_.get(idx)) << " A/m";
    return s.str();
}

void PartitionedRHS::effective_field(double t, const VectorField3& m, VectorField3& h) {
    sum_fields(Partition::SlowExplicit, true, t, m, h, false);
}

void PartitionedRHS::demag_field(const VectorField3& m, VectorField3& h) {
    if (!demag_) demag_ = std::make_unique<FftDemagBackend>(mat_.grid);
    demag_->compute(m, h);
}

EnergyBreakdown PartitionedRHS::energies(double t, const VectorField3& m, ExchangeEnergyForm form) {
    VectorField3 demag, exch, dmi, bias;
    TermFields f;
    if (opt_.on(Term::Demag)) {
        demag_->compute(m, demag);
        f.demag = &demag;
    }
    if (opt_.on(Term::Exchange)) {
        exchange_field(m, mat_, boundary(), exch);
        f.exchange = &exch;
    }
    if (opt_.on(Term::Dmi)) {
        dmi_field(m, mat_, boundary(), dmi);
        f.dmi = &dmi;
    }
    if (opt_.on(Term::Bias)) {
        bias_field(t, opt_.bias, mat_, bias);
        f.bias = &bias;
    }
    f.anisotropy = opt_.on(Term::Anisotropy);
    return energy_breakdown(m, f, mat_, boundary(), form);
}

}  // namespace magnex
