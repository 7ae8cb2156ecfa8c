#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmeas/error_analysis.hpp"

namespace qmeas {

/// What the reference system is measured with: the same joint POVM as the
/// system (fuzziness run), or the spectral PVM of one of the targets (total
/// error / disturbance run, reference-side unitary switched off).
enum class ReferenceMode { Joint, IdealA, IdealB };

enum class QubitBasis { X, Y };

/// ControlledSwap: prepare rho (x) 1/d (x) |+><+|, apply the qubit-controlled
/// swap of system and reference, measure. SingletProjection (d = 2 only):
/// replace the controlled swap plus X readout by the two-outcome measurement
/// {P_antisym, 1 - P_antisym} on system (x) reference.
enum class CircuitVariant { ControlledSwap, SingletProjection };

struct CircuitConfig {
    DensityMatrix system_state;
    JointObservables model;
    Operator target_a;
    Operator target_b;
    ReferenceMode reference_mode = ReferenceMode::Joint;
    QubitBasis basis = QubitBasis::X;
    CircuitVariant variant = CircuitVariant::ControlledSwap;
    double degeneracy_tol = tol::degeneracy;
};

/// One outcome tuple. ref1 holds alpha' (Joint) or a (IdealA); ref2 holds
/// beta' (Joint) or b (IdealB); unused reference slots are 0. qubit is the
/// +-1 eigenvalue of the X (or Y) readout.
struct OutcomeEntry {
    double alpha;
    double beta;
    double ref1;
    double ref2;
    int qubit;
    double p;
};

struct OutcomeDistribution {
    std::vector<OutcomeEntry> entries;

    void validate() const;  // sum(p) = 1 within 1e-10, p >= -1e-12
    double mean(double (*weight)(const OutcomeEntry&)) const;
};

/// rho (x) 1/d (x) |+><+| on C^d (x) C^d (x) C^2 (qubit least significant).
DensityMatrix build_initial_state(const DensityMatrix& rho, int d);

/// State after the controlled swap, computed by conjugation AND by the
/// closed-form four-block expression; the two must agree within 1e-12.
DensityMatrix final_state(const CircuitConfig& cfg);

/// Exact joint outcome distribution of the controlled-swap circuit.
OutcomeDistribution joint_distribution(const CircuitConfig& cfg);

/// d = 2 alternative: antisymmetric projection {P_as, 1-P_as} on system (x)
/// reference of rho (x) 1/2 (outcome x = -1 on P_as), then the side
/// measurements. Produces the same distribution as the controlled swap.
OutcomeDistribution singlet_variant_distribution(const CircuitConfig& cfg);

/// Dispatch on cfg.variant.
OutcomeDistribution outcome_distribution(const CircuitConfig& cfg);

/// (fuzz_A, fuzz_B) = sqrt(d E[alpha (alpha - alpha') x]), ... . Requires
/// Joint mode and X basis.
std::pair<double, double> estimate_fuzziness_exact(const CircuitConfig& cfg);

/// sqrt(d E[(alpha - a)^2 x]) in IdealA mode, sqrt(d E[(beta - b)^2 x]) in
/// IdealB mode. Requires X basis.
double estimate_error_disturbance_exact(const CircuitConfig& cfg);

/// d |E[alpha beta' y]| = |<[barA, barB]>|/2. Requires Joint mode, Y basis.
double estimate_commutator_bound_exact(const CircuitConfig& cfg);

struct SampleEstimate {
    double value = 0.0;
    double std_error = 0.0;
    bool std_error_defined = false;  // false for shots == 1
    long shots = 0;
    std::uint64_t seed = 0;
};

/// Draw i.i.d. outcome tuples from the exact distribution (inverse CDF over
/// the finite support) and return the empirical estimators the configured run
/// can measure, keyed by quantity name. Deterministic given the seed.
///
/// Standard errors: the underlying per-shot statistic has SE s/sqrt(n). For
/// square-root-derived estimators the delta method applies when the sampled
/// radicand is resolvably positive; otherwise the reported SE is
/// sqrt(SE_radicand), the fluctuation scale of sqrt(max(m, 0)) around zero.
std::vector<std::pair<std::string, SampleEstimate>> sample(const CircuitConfig& cfg, long shots,
                                                           std::uint64_t seed);

}  // namespace qmeas
