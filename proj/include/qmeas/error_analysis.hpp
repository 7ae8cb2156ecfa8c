#pragma once

#include <cstdint>

#include "qmeas/models.hpp"

namespace qmeas {

/// Pythagorean decomposition of the RMS error: total^2 = bias^2 + fuzziness^2.
/// All three components are computed independently; construction checks the
/// identity to 1e-10.
struct ErrorBreakdown {
    double total = 0.0;
    double bias = 0.0;
    double fuzziness = 0.0;
    std::uint64_t token = 0;  // scenario provenance; 0 = unknown

    void validate() const;
};

/// Scalar summary of one scenario: standard deviations of the targets (in
/// rho), of the joint observables (in rho (x) rho_a) and of their barred
/// images (in rho), the half-commutator bounds, and the precondition
/// residuals that decide whether the conditional relations apply.
struct ScenarioStats {
    double sigma_a = 0.0;
    double sigma_b = 0.0;
    double sigma_joint_a = 0.0;
    double sigma_joint_b = 0.0;
    double sigma_bar_a = 0.0;
    double sigma_bar_b = 0.0;
    double c_ab = 0.0;        // |<[A,B]>|/2
    double fuzz_bound = 0.0;  // |<[bar A, bar B]>|/2
    double unbiased_residual_a = 0.0;
    double unbiased_residual_b = 0.0;
    double projective_residual_a = 0.0;
    double projective_residual_b = 0.0;
    std::uint64_t token = 0;
};

/// A complete joint-measurement scenario: system state, the commuting pair
/// with its apparatus state, and the two ideal targets. In the
/// error-disturbance reading the B side of the breakdown is the disturbance.
struct Scenario {
    DensityMatrix rho;
    JointObservables joint;
    Operator target_a;
    Operator target_b;
};

struct ScenarioAnalysis {
    ErrorBreakdown a;
    ErrorBreakdown b;
    ScenarioStats stats;
};

/// sqrt of `radicand`, clipping round-off negatives above -1e-10 to zero and
/// raising numerical_error below that.
double sqrt_clipped(double radicand, const char* what);

/// RMS deviation between the joint observable and the ideal target:
/// sqrt(<(obs - target (x) 1)^2>) in rho (x) rho_a.
double total_error(const JointObservables& j, const Operator& target, const DensityMatrix& rho,
                   Side side);

/// sqrt(<bar(obs^2) - bar(obs)^2>) in rho. Target-independent; vanishes for
/// all states iff the measurement is projective.
double fuzziness(const JointObservables& j, const DensityMatrix& rho, Side side);

/// sqrt(<(bar(obs) - target)^2>) in rho. Vanishes for all states iff
/// bar(obs) = target.
double operator_bias(const JointObservables& j, const Operator& target, const DensityMatrix& rho,
                     Side side);

ErrorBreakdown error_breakdown(const JointObservables& j, const Operator& target,
                               const DensityMatrix& rho, Side side);

ScenarioStats scenario_stats(const JointObservables& j, const Operator& target_a,
                             const Operator& target_b, const DensityMatrix& rho);

/// Breakdown for both sides plus stats, stamped with a shared provenance
/// token so relation evaluation can reject mixed scenarios.
ScenarioAnalysis analyze_scenario(const JointObservables& j, const Operator& target_a,
                                  const Operator& target_b, const DensityMatrix& rho);
ScenarioAnalysis analyze_scenario(const Scenario& s);

}  // namespace qmeas
