#pragma once

#include <array>
#include <string>
#include <vector>

#include "nmv/model_spec.hpp"
#include "nmv/sampling.hpp"

namespace nmv {

enum class AuditCondition : int {
    contraction = 0,      // |D(xi)-D(eta)| <= alpha ||xi-eta||, D(0)=0
    drift_one_sided = 1,  // one-sided drift inequality with constant L
    diffusion_lipschitz = 2,
    growth = 3,           // |b(0,mu)|^2 v ||sigma(0,mu)||^2 <= L1 (1 + mu(||.||^2))
    consequence = 4,      // 2<xi(0)-D(xi), b> v ||sigma||^2 <= L2 (1+||xi||^2+mu(||.||^2))
};

constexpr int kAuditConditionCount = 5;

const char* audit_condition_name(AuditCondition c);

struct AuditWitness {
    AuditCondition condition;
    long trial = -1;
    double lhs = 0.0;
    double rhs = 0.0;
    std::vector<double> xi_values;   // sampled segment values, flat
    std::vector<double> eta_values;  // empty for single-segment conditions
};

/// Sample-based verdict on the standing assumptions for one model.  A
/// violated inequality is report content, not an error.
struct AuditReport {
    std::array<bool, kAuditConditionCount> passed{};
    std::array<double, kAuditConditionCount> worst_margin{};  // min of rhs - lhs
    std::vector<AuditWitness> witnesses;                      // one per failed condition
    long trials = 0;
    bool all_passed() const {
        for (bool p : passed)
            if (!p) return false;
        return true;
    }
};

AuditReport audit_assumptions(const ModelSpec& spec, const SegmentSampler& sampler, long trials,
                              int threads = 0);

}  // namespace nmv
