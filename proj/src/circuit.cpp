#include "qmeas/circuit.hpp"

#include <algorithm>
#include <cmath>

namespace qmeas {

namespace {

struct SideOutcome {
    double v1;  // alpha (or a on the reference side)
    double v2;  // beta (or b)
    Matrix effect;
};

/// System-side POVM of the commuting pair: joint eigenprojectors
/// R = P_alpha Q_beta barred through the apparatus state. Pairs whose joint
/// eigenspace is empty (trace ~ 0) are dropped so the support stays minimal.
std::vector<SideOutcome> joint_povm_outcomes(const JointObservables& j, double tol_deg) {
    const auto dec_a = spectral_decompose(j.obs_a(), tol_deg);
    const auto dec_b = spectral_decompose(j.obs_b(), tol_deg);
    std::vector<SideOutcome> out;
    for (std::size_t i = 0; i < dec_a.projectors.size(); ++i)
        for (std::size_t k = 0; k < dec_b.projectors.size(); ++k) {
            const Matrix& p = dec_a.projectors[i].mat();
            const Matrix& q = dec_b.projectors[k].mat();
            Matrix r = 0.5 * (p * q + q * p);
            if (r.trace().real() < 0.5) continue;  // rank-0 joint eigenspace
            Matrix effect = bar_map(Operator(std::move(r)), j.apparatus_state()).mat();
            out.push_back(SideOutcome{dec_a.eigenvalues[i], dec_b.eigenvalues[k],
                                      std::move(effect)});
        }
    return out;
}

std::vector<SideOutcome> reference_outcomes(const CircuitConfig& cfg,
                                            const std::vector<SideOutcome>& system_povm) {
    switch (cfg.reference_mode) {
        case ReferenceMode::Joint:
            return system_povm;
        case ReferenceMode::IdealA: {
            const auto dec = spectral_decompose(cfg.target_a, cfg.degeneracy_tol);
            std::vector<SideOutcome> out;
            for (std::size_t i = 0; i < dec.projectors.size(); ++i)
                out.push_back(SideOutcome{dec.eigenvalues[i], 0.0, dec.projectors[i].mat()});
            return out;
        }
        case ReferenceMode::IdealB: {
            const auto dec = spectral_decompose(cfg.target_b, cfg.degeneracy_tol);
            std::vector<SideOutcome> out;
            for (std::size_t i = 0; i < dec.projectors.size(); ++i)
                out.push_back(SideOutcome{0.0, dec.eigenvalues[i], dec.projectors[i].mat()});
            return out;
        }
    }
    throw std::invalid_argument("reference_outcomes: bad mode");
}

Matrix qubit_projector(QubitBasis basis, int sign) {
    Matrix m(2, 2);
    if (basis == QubitBasis::X)
        m << 0.5, 0.5 * sign, 0.5 * sign, 0.5;
    else
        m << Complex(0.5, 0.0), Complex(0.0, -0.5 * sign), Complex(0.0, 0.5 * sign),
            Complex(0.5, 0.0);
    return m;
}

void check_config(const CircuitConfig& cfg) {
    const int d = cfg.system_state.dim();
    if (cfg.model.system_dim() != d)
        throw std::invalid_argument("CircuitConfig: model system dim != state dim");
    if (cfg.target_a.dim() != d || cfg.target_b.dim() != d)
        throw std::invalid_argument("CircuitConfig: target dim mismatch");
    if (cfg.variant == CircuitVariant::SingletProjection) {
        if (d != 2)
            throw std::invalid_argument("CircuitConfig: singlet projection requires d = 2");
        if (cfg.basis != QubitBasis::X)
            throw std::invalid_argument(
                "CircuitConfig: singlet projection replaces the X readout; no Y variant");
    }
}

double clamp_probability(double p, const char* who) {
    if (p < -tol::psd)
        throw numerical_error(std::string(who) + ": probability " + std::to_string(p) +
                              " below -1e-10");
    return std::max(p, 0.0);
}

}  // namespace

void OutcomeDistribution::validate() const {
    double sum = 0.0;
    for (const auto& e : entries) {
        if (e.p < -1e-12)
            throw numerical_error("OutcomeDistribution: entry probability " +
                                  std::to_string(e.p) + " below -1e-12");
        sum += e.p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw numerical_error("OutcomeDistribution: probabilities sum to " + std::to_string(sum));
}

double OutcomeDistribution::mean(double (*weight)(const OutcomeEntry&)) const {
    double acc = 0.0;
    for (const auto& e : entries) acc += e.p * weight(e);
    return acc;
}

DensityMatrix build_initial_state(const DensityMatrix& rho, int d) {
    if (rho.dim() != d) throw std::invalid_argument("build_initial_state: dim mismatch");
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    const Matrix ref = Matrix::Identity(d, d) / static_cast<double>(d);
    return DensityMatrix(kron(kron(rho.mat(), ref), plus));
}

DensityMatrix final_state(const CircuitConfig& cfg) {
    check_config(cfg);
    const int d = cfg.system_state.dim();
    const Matrix rho = cfg.system_state.mat();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix s = swap_operator(d).mat();

    Matrix e00 = Matrix::Zero(2, 2), e01 = Matrix::Zero(2, 2);
    Matrix e10 = Matrix::Zero(2, 2), e11 = Matrix::Zero(2, 2);
    e00(0, 0) = 1.0;
    e01(0, 1) = 1.0;
    e10(1, 0) = 1.0;
    e11(1, 1) = 1.0;

    const Matrix ucs = kron(Matrix::Identity(d * d, d * d), e00) + kron(s, e11);
    const Matrix rho_i = build_initial_state(cfg.system_state, d).mat();
    const Matrix by_conjugation = ucs * rho_i * ucs.adjoint();

    const Matrix rr = kron(rho, id);
    const Matrix closed_form =
        (kron(kron(rho, id), e00) + kron(kron(id, rho), e11) + kron(rr * s, e01) +
         kron(s * rr, e10)) /
        (2.0 * d);

    const double resid = max_abs(by_conjugation - closed_form);
    if (resid > tol::cross_check)
        throw numerical_error("final_state: closed form deviates from conjugation by " +
                              std::to_string(resid));
    return DensityMatrix(by_conjugation);
}

OutcomeDistribution joint_distribution(const CircuitConfig& cfg) {
    check_config(cfg);
    if (cfg.variant != CircuitVariant::ControlledSwap)
        throw std::invalid_argument("joint_distribution: controlled-swap variant only");
    const Matrix rho_f = final_state(cfg).mat();
    const auto sys = joint_povm_outcomes(cfg.model, cfg.degeneracy_tol);
    const auto ref = reference_outcomes(cfg, sys);

    OutcomeDistribution dist;
    for (const auto& ms : sys)
        for (const auto& mr : ref)
            for (int sign : {+1, -1}) {
                const Matrix k = kron(kron(ms.effect, mr.effect), qubit_projector(cfg.basis, sign));
                const double p =
                    clamp_probability(trace_product(k, rho_f).real(), "joint_distribution");
                dist.entries.push_back(OutcomeEntry{ms.v1, ms.v2, mr.v1, mr.v2, sign, p});
            }
    dist.validate();
    return dist;
}

OutcomeDistribution singlet_variant_distribution(const CircuitConfig& cfg) {
    check_config(cfg);
    if (cfg.variant != CircuitVariant::SingletProjection)
        throw std::invalid_argument("singlet_variant_distribution: singlet variant only");
    const int d = cfg.system_state.dim();
    const Matrix id2 = Matrix::Identity(d * d, d * d);
    const Matrix s = swap_operator(d).mat();
    const Matrix rho_sr = kron(cfg.system_state.mat(), Matrix::Identity(d, d)) / d;

    const auto sys = joint_povm_outcomes(cfg.model, cfg.degeneracy_tol);
    const auto ref = reference_outcomes(cfg, sys);

    OutcomeDistribution dist;
    for (int sign : {+1, -1}) {
        // sign = -1 selects the antisymmetric projector (1 - S)/2.
        const Matrix proj = 0.5 * (id2 + static_cast<double>(sign) * s);
        const Matrix collapsed = proj * rho_sr * proj;
        for (const auto& ms : sys)
            for (const auto& mr : ref) {
                const Matrix k = kron(ms.effect, mr.effect);
                const double p = clamp_probability(trace_product(k, collapsed).real(),
                                                   "singlet_variant_distribution");
                dist.entries.push_back(OutcomeEntry{ms.v1, ms.v2, mr.v1, mr.v2, sign, p});
            }
    }
    dist.validate();
    return dist;
}

OutcomeDistribution outcome_distribution(const CircuitConfig& cfg) {
    return cfg.variant == CircuitVariant::SingletProjection ? singlet_variant_distribution(cfg)
                                                            : joint_distribution(cfg);
}

std::pair<double, double> estimate_fuzziness_exact(const CircuitConfig& cfg) {
    if (cfg.reference_mode != ReferenceMode::Joint || cfg.basis != QubitBasis::X)
        throw std::invalid_argument("estimate_fuzziness_exact: requires Joint mode, X basis");
    const auto dist = outcome_distribution(cfg);
    const double d = cfg.system_state.dim();
    const double ma =
        d * dist.mean([](const OutcomeEntry& e) { return e.alpha * (e.alpha - e.ref1) * e.qubit; });
    const double mb =
        d * dist.mean([](const OutcomeEntry& e) { return e.beta * (e.beta - e.ref2) * e.qubit; });
    return {sqrt_clipped(ma, "estimate_fuzziness_exact: A"),
            sqrt_clipped(mb, "estimate_fuzziness_exact: B")};
}

double estimate_error_disturbance_exact(const CircuitConfig& cfg) {
    if (cfg.basis != QubitBasis::X)
        throw std::invalid_argument("estimate_error_disturbance_exact: requires X basis");
    if (cfg.reference_mode == ReferenceMode::Joint)
        throw std::invalid_argument(
            "estimate_error_disturbance_exact: requires IdealA or IdealB reference");
    const auto dist = outcome_distribution(cfg);
    const double d = cfg.system_state.dim();
    if (cfg.reference_mode == ReferenceMode::IdealA) {
        const double m = d * dist.mean([](const OutcomeEntry& e) {
            return (e.alpha - e.ref1) * (e.alpha - e.ref1) * e.qubit;
        });
        return sqrt_clipped(m, "estimate_error_disturbance_exact: A");
    }
    const double m = d * dist.mean([](const OutcomeEntry& e) {
        return (e.beta - e.ref2) * (e.beta - e.ref2) * e.qubit;
    });
    return sqrt_clipped(m, "estimate_error_disturbance_exact: B");
}

double estimate_commutator_bound_exact(const CircuitConfig& cfg) {
    if (cfg.reference_mode != ReferenceMode::Joint || cfg.basis != QubitBasis::Y)
        throw std::invalid_argument("estimate_commutator_bound_exact: requires Joint mode, Y basis");
    const auto dist = outcome_distribution(cfg);
    const double d = cfg.system_state.dim();
    return d * std::abs(dist.mean([](const OutcomeEntry& e) { return e.alpha * e.ref2 * e.qubit; }));
}

namespace {

enum class Transform { SqrtOfMean, AbsOfMeanScaled };

struct Quantity {
    std::string name;
    Transform transform;
    double scale;  // multiplies the per-shot statistic (SqrtOfMean) or the mean (Abs)
    double (*weight)(const OutcomeEntry&);
};

std::vector<Quantity> quantities_for(const CircuitConfig& cfg) {
    std::vector<Quantity> qs;
    if (cfg.reference_mode == ReferenceMode::Joint && cfg.basis == QubitBasis::X) {
        qs.push_back({"fuzziness_a", Transform::SqrtOfMean, 0.0,
                      [](const OutcomeEntry& e) { return e.alpha * (e.alpha - e.ref1) * e.qubit; }});
        qs.push_back({"fuzziness_b", Transform::SqrtOfMean, 0.0,
                      [](const OutcomeEntry& e) { return e.beta * (e.beta - e.ref2) * e.qubit; }});
    } else if (cfg.reference_mode == ReferenceMode::IdealA) {
        qs.push_back({"error_a", Transform::SqrtOfMean, 0.0, [](const OutcomeEntry& e) {
                          return (e.alpha - e.ref1) * (e.alpha - e.ref1) * e.qubit;
                      }});
    } else if (cfg.reference_mode == ReferenceMode::IdealB) {
        qs.push_back({"disturbance_b", Transform::SqrtOfMean, 0.0, [](const OutcomeEntry& e) {
                          return (e.beta - e.ref2) * (e.beta - e.ref2) * e.qubit;
                      }});
    } else {
        qs.push_back({"commutator_bound", Transform::AbsOfMeanScaled, 0.0,
                      [](const OutcomeEntry& e) { return e.alpha * e.ref2 * e.qubit; }});
    }
    return qs;
}

}  // namespace

std::vector<std::pair<std::string, SampleEstimate>> sample(const CircuitConfig& cfg, long shots,
                                                           std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
    if (cfg.reference_mode != ReferenceMode::Joint && cfg.basis == QubitBasis::Y)
        throw std::invalid_argument("sample: Y basis is only used with the Joint reference");

    const auto dist = outcome_distribution(cfg);
    const double d = cfg.system_state.dim();
    auto qs = quantities_for(cfg);
    for (auto& q : qs) q.scale = d;

    // Per-support-point weights; the per-shot statistic for SqrtOfMean
    // estimators is d * w so its mean is the radicand directly.
    const std::size_t nq = qs.size();
    const std::size_t ns = dist.entries.size();
    std::vector<std::vector<double>> w(nq, std::vector<double>(ns));
    std::vector<double> cdf(ns);
    double acc = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        acc += std::max(dist.entries[i].p, 0.0);
        cdf[i] = acc;
        for (std::size_t k = 0; k < nq; ++k) {
            const double raw = qs[k].weight(dist.entries[i]);
            w[k][i] = qs[k].transform == Transform::SqrtOfMean ? d * raw : raw;
        }
    }
    cdf.back() = std::max(cdf.back(), 1.0);

    std::vector<double> s1(nq, 0.0), s2(nq, 0.0);
    Rng rng(seed);
    for (long shot = 0; shot < shots; ++shot) {
        const double u = rng.uniform() * acc;
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const std::size_t i = std::min(idx, ns - 1);
        for (std::size_t k = 0; k < nq; ++k) {
            s1[k] += w[k][i];
            s2[k] += w[k][i] * w[k][i];
        }
    }

    std::vector<std::pair<std::string, SampleEstimate>> out;
    const double n = static_cast<double>(shots);
    for (std::size_t k = 0; k < nq; ++k) {
        const double mean = s1[k] / n;
        SampleEstimate est;
        est.shots = shots;
        est.seed = seed;
        est.std_error_defined = shots > 1;
        double se_mean = 0.0;
        if (shots > 1) {
            const double var = std::max(0.0, (s2[k] - n * mean * mean) / (n - 1.0));
            se_mean = std::sqrt(var / n);
        }
        if (qs[k].transform == Transform::SqrtOfMean) {
            if (mean > se_mean && mean > 0.0) {
                est.value = std::sqrt(mean);
                est.std_error = se_mean / (2.0 * est.value);
            } else {
                est.value = std::sqrt(std::max(mean, 0.0));
                est.std_error = std::sqrt(se_mean);
            }
        } else {
            est.value = qs[k].scale * std::abs(mean);
            est.std_error = qs[k].scale * se_mean;
        }
        if (!est.std_error_defined) est.std_error = 0.0;
        out.emplace_back(qs[k].name, est);
    }
    return out;
}

}  // namespace qmeas
