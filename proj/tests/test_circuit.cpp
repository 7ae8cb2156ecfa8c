#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "qmeas/circuit.hpp"
#include "scenario_gen.hpp"

using namespace qmeas;
using testgen::random_scenario;
using testgen::vienna_scenario;

namespace {

CircuitConfig config_for(const Scenario& sc, ReferenceMode mode, QubitBasis basis,
                         CircuitVariant variant = CircuitVariant::ControlledSwap) {
    return CircuitConfig{sc.rho, sc.joint, sc.target_a, sc.target_b, mode, basis, variant};
}

double mean_of(const OutcomeDistribution& dist, double (*w)(const OutcomeEntry&)) {
    return dist.mean(w);
}

}  // namespace

TEST_CASE("build_initial_state: product structure and marginals") {
    Vector zero(2);
    zero << 1.0, 0.0;
    const DensityMatrix rho = DensityMatrix::pure(zero);
    const DensityMatrix init = build_initial_state(rho, 2);
    CHECK(std::abs(init.mat().trace() - Complex(1.0, 0.0)) < 1e-14);

    const Operator as_op = init.as_operator();
    CHECK(max_abs(partial_trace(as_op, {2, 2, 2}, {0}).mat() - rho.mat()) < 1e-14);
    CHECK(max_abs(partial_trace(as_op, {2, 2, 2}, {1}).mat() - 0.5 * Matrix::Identity(2, 2)) <
          1e-14);
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(max_abs(partial_trace(as_op, {2, 2, 2}, {2}).mat() - plus) < 1e-14);

    // rank(rho (x) 1/2 (x) |+><+|) = 1 * 2 * 1
    Eigen::SelfAdjointEigenSolver<Matrix> es(init.mat(), Eigen::EigenvaluesOnly);
    int rank = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 1e-12) ++rank;
    CHECK(rank == 2);
}

TEST_CASE("final_state: closed form matches conjugation for random states") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(1000 + s);
        const int d = 2 + static_cast<int>(rng.below(3));
        const Scenario base = random_scenario(2000 + s, 3, 3);
        const DensityMatrix rho = random_density(d, rng);
        CircuitConfig cfg{rho,
                          projective_model(Operator::identity(d)),
                          Operator::identity(d),
                          Operator::identity(d),
                          ReferenceMode::Joint,
                          QubitBasis::X,
                          CircuitVariant::ControlledSwap};
        const DensityMatrix rf = final_state(cfg);  // throws if the routes disagree
        REQUIRE(std::abs(rf.mat().trace() - Complex(1.0, 0.0)) < 1e-12);
        (void)base;
    }
}

TEST_CASE("final_state: maximally mixed input gives symmetric marginals") {
    const int d = 3;
    CircuitConfig cfg{DensityMatrix::maximally_mixed(d),
                      projective_model(Operator::identity(d)),
                      Operator::identity(d),
                      Operator::identity(d),
                      ReferenceMode::Joint,
                      QubitBasis::X,
                      CircuitVariant::ControlledSwap};
    const Operator rf = final_state(cfg).as_operator();
    const Matrix sys = partial_trace(rf, {d, d, 2}, {0}).mat();
    const Matrix ref = partial_trace(rf, {d, d, 2}, {1}).mat();
    CHECK(max_abs(sys - Matrix::Identity(d, d) / d) < 1e-13);
    CHECK(max_abs(ref - Matrix::Identity(d, d) / d) < 1e-13);
}

TEST_CASE("joint_distribution: normalization and the trivial-readout mean of x") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        Rng rng(3000 + s);
        const int d = 2 + static_cast<int>(rng.below(3));
        CircuitConfig cfg{random_density(d, rng),
                          projective_model(Operator::identity(d)),
                          Operator::identity(d),
                          Operator::identity(d),
                          ReferenceMode::Joint,
                          QubitBasis::X,
                          CircuitVariant::ControlledSwap};
        const auto dist = joint_distribution(cfg);
        double sum = 0.0, ex = 0.0;
        for (const auto& e : dist.entries) {
            sum += e.p;
            ex += e.p * e.qubit;
        }
        REQUIRE(std::abs(sum - 1.0) < 1e-12);
        REQUIRE(std::abs(ex - 1.0 / d) < 1e-12);
    }
}

TEST_CASE("joint_distribution: x-weighted marginal recovers the system POVM row") {
    // d * E[x ; alpha, beta] = tr(M_alpha_beta rho): the anticommutator trace
    // identity evaluated per outcome pair.
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Scenario sc = random_scenario(4000 + s, 3, 3);
        const auto cfg = config_for(sc, ReferenceMode::Joint, QubitBasis::X);
        const auto dist = joint_distribution(cfg);
        const auto povm = povm_from_joint(sc.joint, Side::A);
        const double d = sc.rho.dim();

        std::map<std::pair<double, double>, double> weighted;
        for (const auto& e : dist.entries) weighted[{e.alpha, e.beta}] += e.p * e.qubit;

        // Sum over beta labels to get the A-side row, then compare.
        std::map<double, double> row;
        for (const auto& [key, v] : weighted) row[key.first] += v;
        for (std::size_t i = 0; i < povm.outcomes.size(); ++i) {
            const double expect = trace_product(povm.effects[i].mat(), sc.rho.mat()).real();
            REQUIRE(std::abs(d * row.at(povm.outcomes[i]) - expect) < 1e-10);
        }
    }
}

TEST_CASE("standalone identity: d E[alpha alpha' x] = <bar(A)^2>") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Scenario sc = random_scenario(5000 + s, 3, 3);
        const auto dist = joint_distribution(config_for(sc, ReferenceMode::Joint, QubitBasis::X));
        const double d = sc.rho.dim();
        const double lhs =
            d * mean_of(dist, [](const OutcomeEntry& e) { return e.alpha * e.ref1 * e.qubit; });
        const Matrix bar_a = bar_map(sc.joint.obs_a(), sc.joint.apparatus_state()).mat();
        const double rhs = trace_product(bar_a * bar_a, sc.rho.mat()).real();
        REQUIRE(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("estimate_fuzziness_exact agrees with the operator route") {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const Scenario sc = random_scenario(6000 + s, 3, 3);
        const auto [fa, fb] = estimate_fuzziness_exact(
            config_for(sc, ReferenceMode::Joint, QubitBasis::X));
        REQUIRE(std::abs(fa - fuzziness(sc.joint, sc.rho, Side::A)) < 1e-10);
        REQUIRE(std::abs(fb - fuzziness(sc.joint, sc.rho, Side::B)) < 1e-10);
    }

    // Projective readout: no fuzziness. The circuit route takes a square
    // root of a round-off radicand, so exact zeros surface as ~sqrt(eps).
    Rng rng(42);
    const Operator a = random_hermitian(3, rng);
    const Scenario sc{random_density(3, rng), projective_model(a), a, Operator::identity(3)};
    const auto [fa, fb] = estimate_fuzziness_exact(
        config_for(sc, ReferenceMode::Joint, QubitBasis::X));
    CHECK(fa < 1e-7);
    CHECK(fb < 1e-7);
}

TEST_CASE("estimate_error_disturbance_exact agrees with the operator route") {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const Scenario sc = random_scenario(7000 + s, 3, 3);
        const double ea = estimate_error_disturbance_exact(
            config_for(sc, ReferenceMode::IdealA, QubitBasis::X));
        REQUIRE(std::abs(ea - total_error(sc.joint, sc.target_a, sc.rho, Side::A)) < 1e-10);
        const double eb = estimate_error_disturbance_exact(
            config_for(sc, ReferenceMode::IdealB, QubitBasis::X));
        REQUIRE(std::abs(eb - total_error(sc.joint, sc.target_b, sc.rho, Side::B)) < 1e-10);
    }
}

TEST_CASE("vienna circuit: error follows 2|sin(phi/2)|, disturbance sqrt(2)|cos(phi)|") {
    for (int k = 0; k <= 12; ++k) {
        const double phi = 2.0 * M_PI * k / 12.0;
        const Scenario sc = vienna_scenario(phi);
        const double oracle_a = 2.0 * std::abs(std::sin(phi / 2.0));
        const double oracle_b = std::sqrt(2.0) * std::abs(std::cos(phi));
        const double ea = estimate_error_disturbance_exact(
            config_for(sc, ReferenceMode::IdealA, QubitBasis::X));
        const double eb = estimate_error_disturbance_exact(
            config_for(sc, ReferenceMode::IdealB, QubitBasis::X));
        // Radicands agree to 1e-10; the values themselves only to sqrt(eps)
        // where the oracle vanishes.
        REQUIRE(std::abs(ea * ea - oracle_a * oracle_a) < 1e-10);
        REQUIRE(std::abs(eb * eb - oracle_b * oracle_b) < 1e-10);
        REQUIRE(std::abs(ea - oracle_a) < 1e-7);
        REQUIRE(std::abs(eb - oracle_b) < 1e-7);
    }
}

TEST_CASE("estimate_commutator_bound_exact matches the operator oracle") {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const Scenario sc = random_scenario(8000 + s, 3, 3);
        const double bound = estimate_commutator_bound_exact(
            config_for(sc, ReferenceMode::Joint, QubitBasis::Y));
        const Matrix bar_a = bar_map(sc.joint.obs_a(), sc.joint.apparatus_state()).mat();
        const Matrix bar_b = bar_map(sc.joint.obs_b(), sc.joint.apparatus_state()).mat();
        const double oracle =
            0.5 * std::abs(trace_product(bar_a * bar_b - bar_b * bar_a, sc.rho.mat()));
        REQUIRE(std::abs(bound - oracle) < 1e-10);

        // Never exceeds the fuzziness product.
        const double fa = fuzziness(sc.joint, sc.rho, Side::A);
        const double fb = fuzziness(sc.joint, sc.rho, Side::B);
        REQUIRE(bound <= fa * fb + 1e-10);
    }

    // Commuting barred pair: bound vanishes.
    const Scenario sc = vienna_scenario(0.9);
    const double bound =
        estimate_commutator_bound_exact(config_for(sc, ReferenceMode::Joint, QubitBasis::Y));
    CHECK(bound < 1e-12);
}

TEST_CASE("singlet variant equals the controlled swap at d = 2") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Scenario sc = random_scenario(9000 + s, 2, 4);
        for (ReferenceMode mode :
             {ReferenceMode::Joint, ReferenceMode::IdealA, ReferenceMode::IdealB}) {
            const auto cswap = joint_distribution(config_for(sc, mode, QubitBasis::X));
            const auto singlet = singlet_variant_distribution(
                config_for(sc, mode, QubitBasis::X, CircuitVariant::SingletProjection));
            REQUIRE(cswap.entries.size() == singlet.entries.size());
            // Same support enumeration order modulo the qubit-sign nesting.
            std::map<std::tuple<double, double, double, double, int>, double> a, b;
            for (const auto& e : cswap.entries)
                a[{e.alpha, e.beta, e.ref1, e.ref2, e.qubit}] += e.p;
            for (const auto& e : singlet.entries)
                b[{e.alpha, e.beta, e.ref1, e.ref2, e.qubit}] += e.p;
            REQUIRE(a.size() == b.size());
            for (const auto& [key, p] : a) REQUIRE(std::abs(p - b.at(key)) < 1e-10);
        }
    }
}

TEST_CASE("singlet variant: P(x = -1) = 1/4 on the maximally mixed qubit") {
    CircuitConfig cfg{DensityMatrix::maximally_mixed(2),
                      projective_model(Operator::identity(2)),
                      Operator::identity(2),
                      Operator::identity(2),
                      ReferenceMode::Joint,
                      QubitBasis::X,
                      CircuitVariant::SingletProjection};
    const auto dist = singlet_variant_distribution(cfg);
    double p_minus = 0.0;
    for (const auto& e : dist.entries)
        if (e.qubit == -1) p_minus += e.p;
    CHECK(std::abs(p_minus - 0.25) < 1e-13);
}

TEST_CASE("singlet variant: estimators computed from either distribution agree") {
    const Scenario sc = random_scenario(987, 2, 3);
    const auto cswap_cfg = config_for(sc, ReferenceMode::Joint, QubitBasis::X);
    const auto singlet_cfg =
        config_for(sc, ReferenceMode::Joint, QubitBasis::X, CircuitVariant::SingletProjection);
    const auto [fa1, fb1] = estimate_fuzziness_exact(cswap_cfg);
    const auto [fa2, fb2] = estimate_fuzziness_exact(singlet_cfg);
    CHECK(std::abs(fa1 - fa2) < 1e-12);
    CHECK(std::abs(fb1 - fb2) < 1e-12);
}

TEST_CASE("singlet variant is rejected off its domain") {
    const Scenario sc = random_scenario(31, 3, 3);  // may be d=3 or d=4... force d=3
    if (sc.rho.dim() != 2) {
        CHECK_THROWS_AS(singlet_variant_distribution(config_for(
                            sc, ReferenceMode::Joint, QubitBasis::X,
                            CircuitVariant::SingletProjection)),
                        std::invalid_argument);
    }
    const Scenario q = random_scenario(9001, 2, 3);
    REQUIRE(q.rho.dim() == 2);
    CHECK_THROWS_AS(singlet_variant_distribution(config_for(q, ReferenceMode::Joint,
                                                            QubitBasis::Y,
                                                            CircuitVariant::SingletProjection)),
                    std::invalid_argument);
}

TEST_CASE("sample: deterministic, near the exact values, degenerate shot count flagged") {
    const Scenario sc = vienna_scenario(M_PI / 2);
    const auto cfg = config_for(sc, ReferenceMode::IdealA, QubitBasis::X);

    const auto est1 = sample(cfg, 200000, 7);
    const auto est2 = sample(cfg, 200000, 7);
    REQUIRE(est1.size() == 1);
    CHECK(est1[0].first == "error_a");
    CHECK(est1[0].second.value == est2[0].second.value);  // bit identical
    CHECK(est1[0].second.std_error == est2[0].second.std_error);

    // err_A = sqrt(2) at phi = pi/2; the sampled value must sit within 5 SE.
    const double exact = std::sqrt(2.0);
    CHECK(std::abs(est1[0].second.value - exact) < 5.0 * est1[0].second.std_error);

    const auto single = sample(cfg, 1, 3);
    CHECK_FALSE(single[0].second.std_error_defined);
}

TEST_CASE("sample: a million shots land within five standard errors (vienna)") {
    const Scenario sc = vienna_scenario(M_PI / 2);
    const auto est = sample(config_for(sc, ReferenceMode::IdealA, QubitBasis::X), 1000000, 99);
    const double exact = std::sqrt(2.0);
    REQUIRE(est[0].second.std_error > 0.0);
    CHECK(std::abs(est[0].second.value - exact) < 5.0 * est[0].second.std_error);

    // Fuzziness on the A side is exactly zero (projective); the estimate must
    // collapse onto it within the near-zero error scale.
    const auto fuzz = sample(config_for(sc, ReferenceMode::Joint, QubitBasis::X), 1000000, 100);
    CHECK(fuzz[0].first == "fuzziness_a");
    CHECK(std::abs(fuzz[0].second.value) < 5.0 * fuzz[0].second.std_error + 1e-12);
}

TEST_CASE("OutcomeDistribution validation") {
    OutcomeDistribution d;
    d.entries.push_back({1.0, 1.0, 1.0, 1.0, 1, 0.6});
    CHECK_THROWS_AS(d.validate(), numerical_error);
    d.entries.push_back({1.0, 1.0, 1.0, 1.0, -1, 0.4});
    CHECK_NOTHROW(d.validate());
    d.entries.push_back({1.0, 1.0, 1.0, 1.0, -1, -1e-9});
    CHECK_THROWS_AS(d.validate(), numerical_error);
}
