#pragma once

#include <vector>

#include "qmeas/operators.hpp"

namespace qmeas {

/// Which of the two commuting joint observables (and the matching target) an
/// operation refers to.
enum class Side { A, B };

/// Indirect measurement model: apparatus prepared in `apparatus_state`, joint
/// unitary `interaction` on system (x) apparatus, projective readout of
/// `meter` on the apparatus.
struct IndirectModel {
    int system_dim;
    int apparatus_dim;
    DensityMatrix apparatus_state;
    Operator interaction;
    Operator meter;

    IndirectModel(int system_dim, int apparatus_dim, DensityMatrix apparatus_state,
                  Operator interaction, Operator meter);
};

/// A pair of commuting Hermitian observables on system (x) apparatus plus the
/// apparatus state. POVMs and scalar error quantities are derived views.
class JointObservables {
public:
    JointObservables(int system_dim, int apparatus_dim, Operator obs_a, Operator obs_b,
                     DensityMatrix apparatus_state);

    int system_dim() const { return system_dim_; }
    int apparatus_dim() const { return apparatus_dim_; }
    const Operator& obs(Side s) const { return s == Side::A ? obs_a_ : obs_b_; }
    const Operator& obs_a() const { return obs_a_; }
    const Operator& obs_b() const { return obs_b_; }
    const DensityMatrix& apparatus_state() const { return apparatus_state_; }

private:
    int system_dim_;
    int apparatus_dim_;
    Operator obs_a_;
    Operator obs_b_;
    DensityMatrix apparatus_state_;
};

/// Outcome-labeled positive effects summing to identity.
struct Povm {
    std::vector<double> outcomes;
    std::vector<Operator> effects;

    void validate() const;
};

/// Apparatus-averaged system observable tr_a[o (1 (x) rho_a)]: the system
/// observable a joint-apparatus observable effectively measures. Unital,
/// positive, and linear in o; the system dimension is inferred from
/// dim(o) / dim(rho_a).
Operator bar_map(const Operator& o, const DensityMatrix& rho_a);

/// Heisenberg-picture joint observables of an indirect model followed by an
/// ideal measurement of `measured_after` on the system:
///   obs_a = U^dag (1 (x) meter) U,  obs_b = U^dag (measured_after (x) 1) U.
/// The two commute for every model because meter and measured_after act on
/// disjoint tensor factors before conjugation; the commutator norm is checked
/// anyway and a non_joint_error raised above 1e-8.
JointObservables joint_from_indirect(const IndirectModel& model, const Operator& measured_after);

/// Spectral-decompose the chosen joint observable and bar each projector.
Povm povm_from_joint(const JointObservables& j, Side side,
                     double degeneracy_tol = tol::degeneracy);

/// Trivial apparatus (dim 1): the generalized measurement IS the projective
/// measurement of `a`. The B-side observable defaults to the identity.
JointObservables projective_model(const Operator& a);
JointObservables projective_model(const Operator& a, const Operator& b);

struct BiasCheck {
    bool unbiased;
    double residual;  // max-abs entry of bar(obs) - target
};

BiasCheck is_unbiased(const JointObservables& j, const Operator& target, Side side);

/// POVM of an indirect model computed through Kraus operators
/// K = sqrt(p_k) (1 (x) <m|) U (1 (x) |k>), bypassing bar_map / partial_trace
/// entirely. Used to cross-check povm_from_joint through an independent route.
Povm povm_from_indirect_kraus(const IndirectModel& model,
                              double degeneracy_tol = tol::degeneracy);

/// Canonical dilation of a POVM: apparatus dimension = number of outcomes,
/// apparatus state |0><0|, interaction built by completing the isometry
/// V psi = sum_k (sqrt(E_k) psi) (x) |k> to a unitary, meter = diag(outcomes).
IndirectModel neumark_dilation(const Povm& p);

}  // namespace qmeas
