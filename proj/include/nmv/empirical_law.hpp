#pragma once

#include <utility>
#include <vector>

#include "nmv/segment.hpp"

namespace nmv {

/// Uniform empirical measure on N segments, the computable stand-in for a
/// law on C([-tau,0]; R^d).  A Dirac mass is the N = 1 case.
///
/// The head mean is precomputed because mean-field drifts read it every
/// step; the second moment mu(||.||_inf^2) is evaluated on demand (it walks
/// every node of every atom and only the audits need it).
class EmpiricalLaw {
  public:
    explicit EmpiricalLaw(std::vector<Segment> atoms) : atoms_(std::move(atoms)) {
        if (atoms_.empty()) throw config_error("EmpiricalLaw: needs at least one atom");
        for (size_t i = 1; i < atoms_.size(); ++i)
            if (!atoms_[i].same_geometry(atoms_[0]))
                throw config_error("EmpiricalLaw: atoms must share grid geometry");
        mean_head_ = Vec::Zero(atoms_[0].dim());
        for (const Segment& a : atoms_) mean_head_ += a.head();
        mean_head_ /= static_cast<double>(atoms_.size());
    }

    long size() const { return static_cast<long>(atoms_.size()); }
    const Segment& atom(long i) const { return atoms_[static_cast<size_t>(i)]; }
    double weight() const { return 1.0 / static_cast<double>(atoms_.size()); }

    /// Mean of eta(0) over the atoms.
    const Vec& mean_head() const { return mean_head_; }

    /// mu(||.||_inf^2), always finite for an empirical law.
    double second_moment() const {
        double s = 0.0;
        for (const Segment& a : atoms_) {
            const double n = sup_norm(a);
            s += n * n;
        }
        return s / static_cast<double>(atoms_.size());
    }

  private:
    std::vector<Segment> atoms_;
    Vec mean_head_;
};

inline EmpiricalLaw dirac_at(const Segment& seg) { return EmpiricalLaw({seg}); }

/// One Dirac law per node of [0, T].  The frozen-law schemes evaluate
/// dirac(X0 at t) every step of every replica; building the table once per
/// reference path keeps that out of the hot loop.
using LawTable = std::vector<EmpiricalLaw>;

inline LawTable dirac_table(const PathGrid& x0) {
    LawTable t;
    t.reserve(static_cast<size_t>(x0.grid().horizon_steps() + 1));
    for (long k = x0.grid().delay_steps(); k < x0.grid().node_count(); ++k)
        t.push_back(dirac_at(segment_at_node(x0, k)));
    return t;
}

/// Same, with the windows clamped at t_n = floor(nt)/n.
inline LawTable dirac_table_frozen(const PathGrid& x0, long n) {
    const long cpb = x0.grid().cells_per_block(n);
    LawTable t;
    t.reserve(static_cast<size_t>(x0.grid().horizon_steps() + 1));
    for (long k = x0.grid().delay_steps(); k < x0.grid().node_count(); ++k)
        t.push_back(dirac_at(frozen_segment_at_node(x0, k, cpb)));
    return t;
}

}  // namespace nmv
