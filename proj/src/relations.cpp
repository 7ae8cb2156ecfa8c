#include "qmeas/relations.hpp"

#include <cmath>
#include <limits>

namespace qmeas {

namespace {

void check_provenance(const ErrorBreakdown& a, const ErrorBreakdown& b,
                      const ScenarioStats& stats) {
    const std::uint64_t ts[3] = {a.token, b.token, stats.token};
    std::uint64_t ref = 0;
    for (std::uint64_t t : ts)
        if (t != 0) {
            if (ref == 0) ref = t;
            else if (t != ref)
                throw std::invalid_argument("evaluate: inputs come from different scenarios");
        }
}

InequalityLink make_link(std::string name, double lhs, double rhs) {
    InequalityLink l;
    l.name = std::move(name);
    l.lhs = lhs;
    l.rhs = rhs;
    l.slack = lhs - rhs;
    l.holds = l.slack >= -tol::relation;
    return l;
}

void push_link(InequalityChainReport& rep, std::string name, double lhs, double rhs) {
    rep.links.push_back(make_link(std::move(name), lhs, rhs));
    rep.all_hold = rep.all_hold && rep.links.back().holds;
}

double half_abs_comm_expect(const Matrix& a, const Matrix& b, const Matrix& rho) {
    return 0.5 * std::abs(trace_product(a * b - b * a, rho));
}

}  // namespace

std::string to_string(RelationId id) {
    switch (id) {
        case RelationId::FuzzTradeoff: return "fuzz_tradeoff";
        case RelationId::Main: return "main";
        case RelationId::Ozawa: return "ozawa";
        case RelationId::Hall: return "hall";
        case RelationId::HallImproved: return "hall_improved";
        case RelationId::Weston: return "weston";
        case RelationId::WestonImproved: return "weston_improved";
        case RelationId::RobertsonType: return "robertson_type";
        case RelationId::HeisenbergType: return "heisenberg_type";
        case RelationId::RobertsonCommuting: return "robertson_commuting";
        case RelationId::CondUnbiasedA: return "cond_unbiased_a";
        case RelationId::CondUnbiasedAProjB: return "cond_unbiased_a_proj_b";
        case RelationId::CondBothUnbiased: return "cond_both_unbiased";
    }
    throw std::invalid_argument("to_string: unknown relation id");
}

bool is_conditional(RelationId id) {
    return id == RelationId::CondUnbiasedA || id == RelationId::CondUnbiasedAProjB ||
           id == RelationId::CondBothUnbiased;
}

RelationReport evaluate(RelationId id, const ErrorBreakdown& a, const ErrorBreakdown& b,
                        const ScenarioStats& st) {
    check_provenance(a, b, st);

    RelationReport r;
    r.id = id;
    r.rhs = st.c_ab;
    switch (id) {
        case RelationId::FuzzTradeoff:
            r.lhs = a.fuzziness * b.fuzziness;
            r.rhs = st.fuzz_bound;
            break;
        case RelationId::Main:
            r.lhs = a.fuzziness * b.fuzziness + a.bias * b.bias + a.bias * st.sigma_b +
                    st.sigma_a * b.bias;
            break;
        case RelationId::Ozawa:
            r.lhs = a.total * b.total + a.total * st.sigma_b + st.sigma_a * b.total;
            break;
        case RelationId::Hall:
            r.lhs = a.total * b.total + a.total * st.sigma_joint_b + st.sigma_joint_a * b.total;
            break;
        case RelationId::HallImproved:
            r.lhs = a.bias * b.bias + a.fuzziness * b.fuzziness + a.bias * st.sigma_joint_b +
                    st.sigma_joint_a * b.bias;
            break;
        case RelationId::Weston:
            r.lhs = a.total * 0.5 * (st.sigma_joint_b + st.sigma_b) +
                    b.total * 0.5 * (st.sigma_joint_a + st.sigma_a);
            break;
        case RelationId::WestonImproved:
            r.lhs = a.fuzziness * b.fuzziness + a.bias * 0.5 * (st.sigma_bar_b + st.sigma_b) +
                    b.bias * 0.5 * (st.sigma_bar_a + st.sigma_a);
            break;
        case RelationId::RobertsonType:
            r.lhs = st.sigma_bar_a * st.sigma_bar_b + a.bias * b.bias + a.bias * st.sigma_b +
                    st.sigma_a * b.bias;
            break;
        case RelationId::HeisenbergType:
            r.lhs = (a.bias + st.sigma_bar_a) * (b.bias + st.sigma_bar_b);
            break;
        case RelationId::RobertsonCommuting:
            r.lhs = st.sigma_joint_a * st.sigma_joint_b;
            r.rhs = 2.0 * st.fuzz_bound;
            break;
        case RelationId::CondUnbiasedA:
            r.lhs = std::hypot(a.total, st.sigma_a) * b.total;
            r.precondition_residual = st.unbiased_residual_a;
            break;
        case RelationId::CondUnbiasedAProjB:
            r.lhs = b.total * st.sigma_a;
            r.precondition_residual =
                std::max(st.unbiased_residual_a, st.projective_residual_b);
            break;
        case RelationId::CondBothUnbiased:
            r.lhs = a.total * b.total;
            r.precondition_residual = std::max(st.unbiased_residual_a, st.unbiased_residual_b);
            break;
    }
    r.applicable = !is_conditional(id) || r.precondition_residual < tol::unbiased;
    r.slack = r.lhs - r.rhs;
    r.satisfied = r.slack >= -tol::relation;
    return r;
}

std::vector<RelationReport> evaluate_all(const ScenarioAnalysis& an) {
    std::vector<RelationReport> out;
    out.reserve(kAllRelations.size());
    for (RelationId id : kAllRelations) out.push_back(evaluate(id, an.a, an.b, an.stats));
    return out;
}

InequalityChainReport dominance_check(const ErrorBreakdown& a, const ErrorBreakdown& b,
                                      const ScenarioStats& st) {
    check_provenance(a, b, st);
    InequalityChainReport rep;
    push_link(rep, "schwarz_error_product", a.total * b.total,
              a.bias * b.bias + a.fuzziness * b.fuzziness);
    push_link(rep, "total_dominates_bias_a", a.total, a.bias);
    push_link(rep, "total_dominates_bias_b", b.total, b.bias);

    const auto lhs_of = [&](RelationId id) { return evaluate(id, a, b, st).lhs; };
    push_link(rep, "main_lhs_below_ozawa", lhs_of(RelationId::Ozawa), lhs_of(RelationId::Main));
    push_link(rep, "hall_improved_lhs_below_hall", lhs_of(RelationId::Hall),
              lhs_of(RelationId::HallImproved));
    push_link(rep, "weston_improved_lhs_below_weston", lhs_of(RelationId::Weston),
              lhs_of(RelationId::WestonImproved));
    return rep;
}

InequalityChainReport derivation_chain_check(const Scenario& s) {
    const auto an = analyze_scenario(s);
    const ScenarioStats& st = an.stats;
    const Matrix rho = s.rho.mat();
    const Matrix bar_a = bar_map(s.joint.obs_a(), s.joint.apparatus_state()).mat();
    const Matrix bar_b = bar_map(s.joint.obs_b(), s.joint.apparatus_state()).mat();
    const Matrix da = bar_a - s.target_a.mat();
    const Matrix db = bar_b - s.target_b.mat();

    InequalityChainReport rep;

    // Chain behind the Main relation: four Robertson terms plus the triangle
    // inequality recombining their commutators into c_AB.
    const double t1 = half_abs_comm_expect(bar_a, bar_b, rho);
    const double t2 = half_abs_comm_expect(da, db, rho);
    const double t3 = half_abs_comm_expect(da, s.target_b.mat(), rho);
    const double t4 = half_abs_comm_expect(s.target_a.mat(), db, rho);
    push_link(rep, "main_fuzz_product_robertson", an.a.fuzziness * an.b.fuzziness, t1);
    push_link(rep, "main_bias_product_robertson", an.a.bias * an.b.bias, t2);
    push_link(rep, "main_bias_a_sigma_b_robertson", an.a.bias * st.sigma_b, t3);
    push_link(rep, "main_sigma_a_bias_b_robertson", st.sigma_a * an.b.bias, t4);
    push_link(rep, "main_triangle", t1 + t2 + t3 + t4, st.c_ab);
    push_link(rep, "main_overall", evaluate(RelationId::Main, an.a, an.b, st).lhs, st.c_ab);

    // Chain behind the improved Weston relation: five Robertson terms, then
    // two triangle steps.
    const double u2 = 0.5 * half_abs_comm_expect(da, bar_b, rho);
    const double u3 = 0.5 * half_abs_comm_expect(da, s.target_b.mat(), rho);
    const double u4 = 0.5 * half_abs_comm_expect(bar_a, db, rho);
    const double u5 = 0.5 * half_abs_comm_expect(s.target_a.mat(), db, rho);
    const Matrix comm_targets = s.target_a.mat() * s.target_b.mat() -
                                s.target_b.mat() * s.target_a.mat();
    const Matrix comm_barred = bar_a * bar_b - bar_b * bar_a;
    const double mid = 0.5 * std::abs(trace_product(comm_targets - comm_barred, rho));
    push_link(rep, "weston_fuzz_product_robertson", an.a.fuzziness * an.b.fuzziness, t1);
    push_link(rep, "weston_bias_a_sigma_bar_b_robertson",
              0.5 * an.a.bias * st.sigma_bar_b, u2);
    push_link(rep, "weston_bias_a_sigma_b_robertson", 0.5 * an.a.bias * st.sigma_b, u3);
    push_link(rep, "weston_bias_b_sigma_bar_a_robertson",
              0.5 * an.b.bias * st.sigma_bar_a, u4);
    push_link(rep, "weston_bias_b_sigma_a_robertson", 0.5 * an.b.bias * st.sigma_a, u5);
    push_link(rep, "weston_mid_triangle", u2 + u3 + u4 + u5, mid);
    push_link(rep, "weston_final_triangle", t1 + mid, st.c_ab);
    push_link(rep, "weston_overall",
              evaluate(RelationId::WestonImproved, an.a, an.b, st).lhs, st.c_ab);
    return rep;
}

std::string to_string(BoundaryCurve curve) {
    switch (curve) {
        case BoundaryCurve::Ozawa: return "ozawa";
        case BoundaryCurve::BranciardSpecial: return "branciard_special";
        case BoundaryCurve::CondBothUnbiased: return "both_unbiased";
        case BoundaryCurve::CondUnbiasedAProjB: return "unbiased_a_proj_b";
        case BoundaryCurve::CondUnbiasedA: return "unbiased_a";
    }
    throw std::invalid_argument("to_string: unknown boundary curve");
}

namespace {

void check_region_stats(BoundaryCurve curve, const ScenarioStats& st) {
    if (!(st.sigma_a > 0.0) || !(st.sigma_b > 0.0) || !(st.c_ab > 0.0))
        throw std::invalid_argument("region_boundary: sigma_a, sigma_b, c_ab must be positive");
    if (curve == BoundaryCurve::BranciardSpecial) {
        if (std::abs(st.sigma_a - 1.0) > 1e-12 || std::abs(st.sigma_b - 1.0) > 1e-12 ||
            std::abs(st.c_ab - 1.0) > 1e-12)
            throw std::invalid_argument(
                "region_boundary: branciard_special is only defined for "
                "sigma_a = sigma_b = c_ab = 1");
    }
}

}  // namespace

std::vector<RegionPoint> region_boundary(BoundaryCurve curve, const ScenarioStats& st,
                                         const std::vector<double>& eps_a_grid) {
    check_region_stats(curve, st);
    std::vector<RegionPoint> out;
    out.reserve(eps_a_grid.size());
    for (double e : eps_a_grid) {
        if (e < 0.0) throw std::invalid_argument("region_boundary: eps_a must be >= 0");
        double eb = 0.0;
        switch (curve) {
            case BoundaryCurve::Ozawa: {
                const double num = st.c_ab - e * st.sigma_b;
                eb = num <= 0.0 ? 0.0 : num / (e + st.sigma_a);
                break;
            }
            case BoundaryCurve::BranciardSpecial:
                eb = e >= 1.0 ? 0.0 : std::sqrt(1.0 - e * e);
                break;
            case BoundaryCurve::CondBothUnbiased:
                eb = e == 0.0 ? std::numeric_limits<double>::infinity() : st.c_ab / e;
                break;
            case BoundaryCurve::CondUnbiasedAProjB:
                eb = st.c_ab / st.sigma_a;
                break;
            case BoundaryCurve::CondUnbiasedA:
                eb = st.c_ab / std::hypot(e, st.sigma_a);
                break;
        }
        out.push_back(RegionPoint{e, eb});
    }
    return out;
}

double region_relation_slack(BoundaryCurve curve, const ScenarioStats& st, double eps_a,
                             double eps_b) {
    check_region_stats(curve, st);
    switch (curve) {
        case BoundaryCurve::Ozawa:
            return eps_a * eps_b + eps_a * st.sigma_b + st.sigma_a * eps_b - st.c_ab;
        case BoundaryCurve::BranciardSpecial:
            return eps_a * eps_a + eps_b * eps_b - 1.0;
        case BoundaryCurve::CondBothUnbiased:
            return eps_a * eps_b - st.c_ab;
        case BoundaryCurve::CondUnbiasedAProjB:
            return st.sigma_a * eps_b - st.c_ab;
        case BoundaryCurve::CondUnbiasedA:
            return std::hypot(eps_a, st.sigma_a) * eps_b - st.c_ab;
    }
    throw std::invalid_argument("region_relation_slack: unknown curve");
}

}  // namespace qmeas
