#include "qmeas/models.hpp"

#include <algorithm>
#include <cmath>

namespace qmeas {

namespace {

void require_unitary(const Matrix& u, const char* who) {
    const Matrix id = Matrix::Identity(u.rows(), u.cols());
    const double resid = max_abs(u * u.adjoint() - id);
    if (resid > tol::unitary)
        throw std::invalid_argument(std::string(who) + ": unitarity residual " +
                                    std::to_string(resid) + " exceeds 1e-10");
}

}  // namespace

IndirectModel::IndirectModel(int system_dim_in, int apparatus_dim_in,
                             DensityMatrix apparatus_state_in, Operator interaction_in,
                             Operator meter_in)
    : system_dim(system_dim_in),
      apparatus_dim(apparatus_dim_in),
      apparatus_state(std::move(apparatus_state_in)),
      interaction(std::move(interaction_in)),
      meter(std::move(meter_in)) {
    if (system_dim < 1 || apparatus_dim < 1)
        throw std::invalid_argument("IndirectModel: dimensions must be >= 1");
    if (apparatus_state.dim() != apparatus_dim)
        throw std::invalid_argument("IndirectModel: apparatus state dim mismatch");
    if (interaction.dim() != system_dim * apparatus_dim)
        throw std::invalid_argument("IndirectModel: interaction dim mismatch");
    if (meter.dim() != apparatus_dim)
        throw std::invalid_argument("IndirectModel: meter dim mismatch");
    if (!meter.is_hermitian())
        throw std::invalid_argument("IndirectModel: meter must be Hermitian");
    require_unitary(interaction.mat(), "IndirectModel");
}

JointObservables::JointObservables(int system_dim, int apparatus_dim, Operator obs_a,
                                   Operator obs_b, DensityMatrix apparatus_state)
    : system_dim_(system_dim),
      apparatus_dim_(apparatus_dim),
      obs_a_(std::move(obs_a)),
      obs_b_(std::move(obs_b)),
      apparatus_state_(std::move(apparatus_state)) {
    if (system_dim_ < 1 || apparatus_dim_ < 1)
        throw std::invalid_argument("JointObservables: dimensions must be >= 1");
    if (obs_a_.dim() != system_dim_ * apparatus_dim_ || obs_b_.dim() != obs_a_.dim())
        throw std::invalid_argument("JointObservables: observable dim mismatch");
    if (apparatus_state_.dim() != apparatus_dim_)
        throw std::invalid_argument("JointObservables: apparatus state dim mismatch");
    if (!obs_a_.is_hermitian() || !obs_b_.is_hermitian())
        throw std::invalid_argument("JointObservables: observables must be Hermitian");
    const double comm = max_abs(obs_a_.mat() * obs_b_.mat() - obs_b_.mat() * obs_a_.mat());
    if (comm > tol::commuting)
        throw non_joint_error("JointObservables: commutator norm " + std::to_string(comm) +
                              " exceeds 1e-10; not a joint measurement");
}

void Povm::validate() const {
    if (outcomes.size() != effects.size() || effects.empty())
        throw std::invalid_argument("Povm: outcome/effect count mismatch");
    const int d = effects[0].dim();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : effects) {
        if (e.dim() != d) throw std::invalid_argument("Povm: effect dim mismatch");
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (e.mat() + e.mat().adjoint()),
                                                 Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol::psd)
            throw std::invalid_argument("Povm: effect minimum eigenvalue " +
                                        std::to_string(es.eigenvalues().minCoeff()) +
                                        " below -1e-10");
        sum += e.mat();
    }
    const double resid = max_abs(sum - Matrix::Identity(d, d));
    if (resid > tol::completeness)
        throw std::invalid_argument("Povm: completeness residual " + std::to_string(resid) +
                                    " exceeds 1e-10");
}

Operator bar_map(const Operator& o, const DensityMatrix& rho_a) {
    const int da = rho_a.dim();
    if (da < 1 || o.dim() % da != 0)
        throw std::invalid_argument("bar_map: operator dim " + std::to_string(o.dim()) +
                                    " not divisible by apparatus dim " + std::to_string(da));
    const int ds = o.dim() / da;
    Matrix out = Matrix::Zero(ds, ds);
    for (int i = 0; i < ds; ++i)
        for (int j = 0; j < ds; ++j) {
            Complex acc(0.0, 0.0);
            for (int k = 0; k < da; ++k)
                for (int l = 0; l < da; ++l)
                    acc += o.mat()(i * da + k, j * da + l) * rho_a.mat()(l, k);
            out(i, j) = acc;
        }
    return Operator(std::move(out));
}

JointObservables joint_from_indirect(const IndirectModel& model, const Operator& measured_after) {
    if (!measured_after.is_hermitian())
        throw std::invalid_argument("joint_from_indirect: measured_after must be Hermitian");
    if (measured_after.dim() != model.system_dim)
        throw std::invalid_argument("joint_from_indirect: measured_after dim mismatch");
    const Matrix& u = model.interaction.mat();
    const Matrix id_s = Matrix::Identity(model.system_dim, model.system_dim);
    const Matrix id_a = Matrix::Identity(model.apparatus_dim, model.apparatus_dim);
    Matrix oa = u.adjoint() * kron(id_s, model.meter.mat()) * u;
    Matrix ob = u.adjoint() * kron(measured_after.mat(), id_a) * u;
    const double comm = max_abs(oa * ob - ob * oa);
    if (comm > 1e-8)
        throw non_joint_error("joint_from_indirect: commutator norm " + std::to_string(comm));
    // Unitary round-off can leave ~1e-15 Hermitian residue; symmetrize.
    oa = 0.5 * (oa + oa.adjoint());
    ob = 0.5 * (ob + ob.adjoint());
    return JointObservables(model.system_dim, model.apparatus_dim, Operator(std::move(oa)),
                            Operator(std::move(ob)), model.apparatus_state);
}

Povm povm_from_joint(const JointObservables& j, Side side, double degeneracy_tol) {
    const auto dec = spectral_decompose(j.obs(side), degeneracy_tol);
    Povm p;
    p.outcomes = dec.eigenvalues;
    p.effects.reserve(dec.projectors.size());
    for (const auto& proj : dec.projectors)
        p.effects.push_back(bar_map(proj, j.apparatus_state()));
    p.validate();
    return p;
}

JointObservables projective_model(const Operator& a) {
    return projective_model(a, Operator::identity(a.dim()));
}

JointObservables projective_model(const Operator& a, const Operator& b) {
    if (!a.is_hermitian() || !b.is_hermitian())
        throw std::invalid_argument("projective_model: observables must be Hermitian");
    Matrix one(1, 1);
    one << 1.0;
    return JointObservables(a.dim(), 1, a, b, DensityMatrix(std::move(one)));
}

BiasCheck is_unbiased(const JointObservables& j, const Operator& target, Side side) {
    if (target.dim() != j.system_dim())
        throw std::invalid_argument("is_unbiased: target dim mismatch");
    const Operator barred = bar_map(j.obs(side), j.apparatus_state());
    const double resid = max_abs(barred.mat() - target.mat());
    return BiasCheck{resid < tol::unbiased, resid};
}

Povm povm_from_indirect_kraus(const IndirectModel& model, double degeneracy_tol) {
    const int ds = model.system_dim;
    const int da = model.apparatus_dim;
    const Matrix& u = model.interaction.mat();

    // Eigenbasis of the apparatus state; drop numerically vanishing weights.
    Eigen::SelfAdjointEigenSolver<Matrix> es_rho(model.apparatus_state.mat());
    Eigen::SelfAdjointEigenSolver<Matrix> es_meter(model.meter.mat());
    const auto& meter_vals = es_meter.eigenvalues();
    const Matrix& meter_vecs = es_meter.eigenvectors();

    // Cluster meter eigenvalues with the same rule spectral_decompose uses so
    // outcome labels line up with the bar-projector route.
    std::vector<std::pair<double, Matrix>> outcome_effects;  // (label, effect)
    int start = 0;
    for (int i = 1; i <= da; ++i) {
        if (i < da && meter_vals(i) - meter_vals(i - 1) <= degeneracy_tol) continue;
        double label = 0.0;
        Matrix effect = Matrix::Zero(ds, ds);
        for (int m = start; m < i; ++m) {
            label += meter_vals(m);
            for (int k = 0; k < da; ++k) {
                const double pk = es_rho.eigenvalues()(k);
                if (pk < 1e-14) continue;
                // K = sqrt(p_k) (1 (x) <m|) U (1 (x) |k>)
                Matrix kmat = Matrix::Zero(ds, ds);
                for (int i_s = 0; i_s < ds; ++i_s)
                    for (int j_s = 0; j_s < ds; ++j_s) {
                        Complex acc(0.0, 0.0);
                        for (int a_row = 0; a_row < da; ++a_row)
                            for (int b_col = 0; b_col < da; ++b_col)
                                acc += std::conj(meter_vecs(a_row, m)) *
                                       u(i_s * da + a_row, j_s * da + b_col) *
                                       es_rho.eigenvectors()(b_col, k);
                        kmat(i_s, j_s) = acc;
                    }
                kmat *= std::sqrt(pk);
                effect += kmat.adjoint() * kmat;
            }
        }
        outcome_effects.emplace_back(label / (i - start), std::move(effect));
        start = i;
    }

    Povm p;
    for (auto& [label, effect] : outcome_effects) {
        p.outcomes.push_back(label);
        p.effects.emplace_back(0.5 * (effect + effect.adjoint()));
    }
    p.validate();
    return p;
}

IndirectModel neumark_dilation(const Povm& p) {
    p.validate();
    const int d = p.effects[0].dim();
    const int n = static_cast<int>(p.effects.size());
    const int dn = d * n;

    // Isometry columns: V e_j = sum_k (sqrt(E_k) e_j) (x) |k>.
    std::vector<Matrix> roots;
    roots.reserve(n);
    for (const auto& e : p.effects) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (e.mat() + e.mat().adjoint()));
        Matrix clipped = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        roots.push_back(es.eigenvectors() * clipped * es.eigenvectors().adjoint());
    }

    Matrix u = Matrix::Zero(dn, dn);
    for (int j = 0; j < d; ++j) {
        Vector col = Vector::Zero(dn);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < d; ++i) col(i * n + k) = roots[k](i, j);
        u.col(j * n) = col;  // basis vector e_j (x) |0> maps to V e_j
    }

    // Complete remaining columns by Gram-Schmidt, candidates drawn from the
    // standard basis first and a seeded random stream if that runs dry.
    std::vector<int> assigned;
    for (int j = 0; j < d; ++j) assigned.push_back(j * n);
    std::vector<int> free_cols;
    for (int j = 0; j < dn; ++j)
        if (j % n != 0) free_cols.push_back(j);

    Rng fallback(0x6d65617375726564ULL);
    std::size_t next = 0;
    for (int cand = 0; cand < 2 * dn && next < free_cols.size(); ++cand) {
        Vector v = Vector::Zero(dn);
        if (cand < dn) {
            v(cand) = 1.0;
        } else {
            for (int i = 0; i < dn; ++i) v(i) = Complex(fallback.normal(), fallback.normal());
        }
        for (int pass = 0; pass < 2; ++pass)
            for (int j : assigned) v -= u.col(j).dot(v) * u.col(j);
        const double nr = v.norm();
        if (nr > 1e-8) {
            u.col(free_cols[next]) = v / nr;
            assigned.push_back(free_cols[next]);
            ++next;
        }
    }
    if (next != free_cols.size())
        throw numerical_error("neumark_dilation: unitary completion failed");

    Matrix meter = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) meter(k, k) = p.outcomes[k];

    Matrix app = Matrix::Zero(n, n);
    app(0, 0) = 1.0;

    return IndirectModel(d, n, DensityMatrix(std::move(app)), Operator(std::move(u)),
                         Operator(std::move(meter)));
}

}  // namespace qmeas
