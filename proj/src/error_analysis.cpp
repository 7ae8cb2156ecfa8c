#include "qmeas/error_analysis.hpp"

#include <atomic>
#include <cmath>

namespace qmeas {

namespace {

std::atomic<std::uint64_t> g_scenario_counter{1};

double variance_sqrt(const Matrix& o, const Matrix& rho, const char* what) {
    const double m2 = trace_product(o * o, rho).real();
    const double m1 = trace_product(o, rho).real();
    return sqrt_clipped(m2 - m1 * m1, what);
}

double half_abs_commutator(const Matrix& a, const Matrix& b, const Matrix& rho) {
    return 0.5 * std::abs(trace_product(a * b - b * a, rho));
}

void require_target(const JointObservables& j, const Operator& target, const char* who) {
    if (target.dim() != j.system_dim())
        throw std::invalid_argument(std::string(who) + ": target dim mismatch");
    if (!target.is_hermitian())
        throw std::invalid_argument(std::string(who) + ": target must be Hermitian");
}

void require_state(const JointObservables& j, const DensityMatrix& rho, const char* who) {
    if (rho.dim() != j.system_dim())
        throw std::invalid_argument(std::string(who) + ": state dim mismatch");
}

}  // namespace

double sqrt_clipped(double radicand, const char* what) {
    if (radicand < -tol::radicand)
        throw numerical_error(std::string(what) + ": radicand " + std::to_string(radicand) +
                              " below -1e-10");
    return std::sqrt(std::max(radicand, 0.0));
}

void ErrorBreakdown::validate() const {
    const double resid = total * total - bias * bias - fuzziness * fuzziness;
    if (std::abs(resid) > 1e-10)
        throw numerical_error("ErrorBreakdown: total^2 - bias^2 - fuzziness^2 = " +
                              std::to_string(resid));
}

double total_error(const JointObservables& j, const Operator& target, const DensityMatrix& rho,
                   Side side) {
    require_target(j, target, "total_error");
    require_state(j, rho, "total_error");
    const Matrix id_a = Matrix::Identity(j.apparatus_dim(), j.apparatus_dim());
    const Matrix delta = j.obs(side).mat() - kron(target.mat(), id_a);
    const Matrix rho_joint = kron(rho.mat(), j.apparatus_state().mat());
    return sqrt_clipped(trace_product(delta * delta, rho_joint).real(), "total_error");
}

double fuzziness(const JointObservables& j, const DensityMatrix& rho, Side side) {
    require_state(j, rho, "fuzziness");
    const Operator& o = j.obs(side);
    const Matrix barred = bar_map(o, j.apparatus_state()).mat();
    const Matrix barred_sq = bar_map(o * o, j.apparatus_state()).mat();
    return sqrt_clipped(trace_product(barred_sq - barred * barred, rho.mat()).real(), "fuzziness");
}

double operator_bias(const JointObservables& j, const Operator& target, const DensityMatrix& rho,
                     Side side) {
    require_target(j, target, "operator_bias");
    require_state(j, rho, "operator_bias");
    const Matrix delta = bar_map(j.obs(side), j.apparatus_state()).mat() - target.mat();
    return sqrt_clipped(trace_product(delta * delta, rho.mat()).real(), "operator_bias");
}

ErrorBreakdown error_breakdown(const JointObservables& j, const Operator& target,
                               const DensityMatrix& rho, Side side) {
    ErrorBreakdown out;
    out.total = total_error(j, target, rho, side);
    out.bias = operator_bias(j, target, rho, side);
    out.fuzziness = fuzziness(j, rho, side);
    out.validate();
    return out;
}

ScenarioStats scenario_stats(const JointObservables& j, const Operator& target_a,
                             const Operator& target_b, const DensityMatrix& rho) {
    require_target(j, target_a, "scenario_stats");
    require_target(j, target_b, "scenario_stats");
    require_state(j, rho, "scenario_stats");

    const Matrix rho_joint = kron(rho.mat(), j.apparatus_state().mat());
    const Matrix bar_a = bar_map(j.obs_a(), j.apparatus_state()).mat();
    const Matrix bar_b = bar_map(j.obs_b(), j.apparatus_state()).mat();
    const Matrix bar_a_sq = bar_map(j.obs_a() * j.obs_a(), j.apparatus_state()).mat();
    const Matrix bar_b_sq = bar_map(j.obs_b() * j.obs_b(), j.apparatus_state()).mat();

    ScenarioStats st;
    st.sigma_a = variance_sqrt(target_a.mat(), rho.mat(), "scenario_stats: sigma_a");
    st.sigma_b = variance_sqrt(target_b.mat(), rho.mat(), "scenario_stats: sigma_b");
    st.sigma_joint_a = variance_sqrt(j.obs_a().mat(), rho_joint, "scenario_stats: sigma_joint_a");
    st.sigma_joint_b = variance_sqrt(j.obs_b().mat(), rho_joint, "scenario_stats: sigma_joint_b");
    st.sigma_bar_a = variance_sqrt(bar_a, rho.mat(), "scenario_stats: sigma_bar_a");
    st.sigma_bar_b = variance_sqrt(bar_b, rho.mat(), "scenario_stats: sigma_bar_b");
    st.c_ab = half_abs_commutator(target_a.mat(), target_b.mat(), rho.mat());
    st.fuzz_bound = half_abs_commutator(bar_a, bar_b, rho.mat());
    st.unbiased_residual_a = max_abs(bar_a - target_a.mat());
    st.unbiased_residual_b = max_abs(bar_b - target_b.mat());
    st.projective_residual_a = max_abs(bar_a_sq - bar_a * bar_a);
    st.projective_residual_b = max_abs(bar_b_sq - bar_b * bar_b);
    return st;
}

ScenarioAnalysis analyze_scenario(const JointObservables& j, const Operator& target_a,
                                  const Operator& target_b, const DensityMatrix& rho) {
    ScenarioAnalysis out{error_breakdown(j, target_a, rho, Side::A),
                         error_breakdown(j, target_b, rho, Side::B),
                         scenario_stats(j, target_a, target_b, rho)};
    const std::uint64_t token = g_scenario_counter.fetch_add(1);
    out.a.token = token;
    out.b.token = token;
    out.stats.token = token;
    return out;
}

ScenarioAnalysis analyze_scenario(const Scenario& s) {
    return analyze_scenario(s.joint, s.target_a, s.target_b, s.rho);
}

}  // namespace qmeas
