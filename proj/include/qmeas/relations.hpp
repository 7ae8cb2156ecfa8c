#pragma once

#include <array>
#include <string>
#include <vector>

#include "qmeas/error_analysis.hpp"

namespace qmeas {

/// Every tradeoff relation evaluated by the workbench. The first ten are
/// universally valid for any joint measurement; the Cond* entries hold only
/// when their precondition residuals vanish.
enum class RelationId {
    FuzzTradeoff,        // fuzz_A * fuzz_B >= |<[barA, barB]>|/2
    Main,                // fuzz*fuzz + bias*bias + bias_A*sigma_B + sigma_A*bias_B >= c
    Ozawa,               // eps*eps + eps_A*sigma_B + sigma_A*eps_B >= c
    Hall,                // eps*eps + eps_A*sigma_JB + sigma_JA*eps_B >= c
    HallImproved,        // bias*bias + fuzz*fuzz + bias_A*sigma_JB + sigma_JA*bias_B >= c
    Weston,              // eps_A(sigma_JB+sigma_B)/2 + eps_B(sigma_JA+sigma_A)/2 >= c
    WestonImproved,      // fuzz*fuzz + bias_A(sigma_barB+sigma_B)/2 + bias_B(sigma_barA+sigma_A)/2
    RobertsonType,       // sigma_barA*sigma_barB + bias*bias + bias_A*sigma_B + sigma_A*bias_B
    HeisenbergType,      // (bias_A+sigma_barA)(bias_B+sigma_barB) >= c
    RobertsonCommuting,  // sigma_JA*sigma_JB >= |<[barA, barB]>|
    CondUnbiasedA,       // sqrt(eps_A^2+sigma_A^2)*eps_B >= c   [A unbiased]
    CondUnbiasedAProjB,  // eps_B*sigma_A >= c                   [A unbiased, B projective]
    CondBothUnbiased,    // eps_A*eps_B >= c                     [both unbiased]
};

inline constexpr std::array<RelationId, 13> kAllRelations = {
    RelationId::FuzzTradeoff,   RelationId::Main,
    RelationId::Ozawa,          RelationId::Hall,
    RelationId::HallImproved,   RelationId::Weston,
    RelationId::WestonImproved, RelationId::RobertsonType,
    RelationId::HeisenbergType, RelationId::RobertsonCommuting,
    RelationId::CondUnbiasedA,  RelationId::CondUnbiasedAProjB,
    RelationId::CondBothUnbiased,
};

inline constexpr std::array<RelationId, 10> kUniversalRelations = {
    RelationId::FuzzTradeoff,   RelationId::Main,
    RelationId::Ozawa,          RelationId::Hall,
    RelationId::HallImproved,   RelationId::Weston,
    RelationId::WestonImproved, RelationId::RobertsonType,
    RelationId::HeisenbergType, RelationId::RobertsonCommuting,
};

std::string to_string(RelationId id);
bool is_conditional(RelationId id);

struct RelationReport {
    RelationId id;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // lhs - rhs
    bool satisfied = false;
    bool applicable = true;             // false when a precondition fails
    double precondition_residual = 0.0; // 0 for unconditional relations
};

/// Evaluate one relation from scalar summaries. Inputs must come from the
/// same scenario; mismatched provenance tokens raise invalid_argument.
RelationReport evaluate(RelationId id, const ErrorBreakdown& a, const ErrorBreakdown& b,
                        const ScenarioStats& stats);
std::vector<RelationReport> evaluate_all(const ScenarioAnalysis& an);

struct InequalityLink {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;  // slack >= -1e-9
};

struct InequalityChainReport {
    std::vector<InequalityLink> links;
    bool all_hold = true;
};

/// Checks that the improved relations imply the originals: the Schwarz step
/// eps_A*eps_B >= bias_A*bias_B + fuzz_A*fuzz_B, eps >= bias on both sides,
/// and the resulting LHS orderings Main <= Ozawa, HallImproved <= Hall,
/// WestonImproved <= Weston.
InequalityChainReport dominance_check(const ErrorBreakdown& a, const ErrorBreakdown& b,
                                      const ScenarioStats& stats);

/// Verifies the Robertson-term chains behind the Main and WestonImproved
/// relations link by link, using operator-level commutator expectations.
InequalityChainReport derivation_chain_check(const Scenario& s);

/// Closed-form forbidden-region boundary curves at fixed sigma_A, sigma_B,
/// c_AB. BranciardSpecial is the pure-state curve eps_A^2 + eps_B^2 >= 1,
/// valid only for sigma_A = sigma_B = c_AB = 1.
enum class BoundaryCurve {
    Ozawa,
    BranciardSpecial,
    CondBothUnbiased,
    CondUnbiasedAProjB,
    CondUnbiasedA,
};

std::string to_string(BoundaryCurve curve);

struct RegionPoint {
    double eps_a;
    double eps_b_min;  // smallest eps_B satisfying the relation; may be +inf
};

std::vector<RegionPoint> region_boundary(BoundaryCurve curve, const ScenarioStats& stats,
                                         const std::vector<double>& eps_a_grid);

/// lhs - rhs of the curve's relation at the point (eps_a, eps_b).
double region_relation_slack(BoundaryCurve curve, const ScenarioStats& stats, double eps_a,
                             double eps_b);

}  // namespace qmeas
