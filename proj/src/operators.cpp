#include "qmeas/operators.hpp"

#include <algorithm>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace qmeas {

namespace {

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument(std::string(who) + ": matrix must be square with dim >= 1");
}

void require_same_dim(const Operator& a, const Operator& b, const char* who) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

Matrix ginibre(int d, Rng& rng) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            g(i, j) = Complex(rng.normal(), rng.normal());
    return g;
}

}  // namespace

Operator::Operator(Matrix entries) : mat_(std::move(entries)) {
    require_square(mat_, "Operator");
    hermitian_ = qmeas::is_hermitian(mat_);
}

Operator Operator::hermitian(Matrix entries) {
    Operator o(std::move(entries));
    if (!o.is_hermitian())
        throw std::invalid_argument("Operator::hermitian: entries deviate from the conjugate "
                                    "transpose by more than 1e-12");
    return o;
}

Operator Operator::identity(int dim) { return Operator(Matrix::Identity(dim, dim)); }
Operator Operator::zero(int dim) { return Operator(Matrix::Zero(dim, dim)); }

Operator operator+(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator+");
    return Operator(a.mat() + b.mat());
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator-");
    return Operator(a.mat() - b.mat());
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator*");
    return Operator(a.mat() * b.mat());
}

Operator operator*(Complex s, const Operator& a) { return Operator(s * a.mat()); }
Operator operator*(double s, const Operator& a) { return Operator(s * a.mat()); }

DensityMatrix::DensityMatrix(Matrix entries) : mat_(std::move(entries)) {
    require_square(mat_, "DensityMatrix");
    const double herm = max_abs(mat_ - mat_.adjoint());
    if (herm > tol::hermitian)
        throw std::invalid_argument("DensityMatrix: Hermiticity residual " + std::to_string(herm) +
                                    " exceeds 1e-12");
    const double tr_resid = std::abs(mat_.trace() - Complex(1.0, 0.0));
    if (tr_resid > tol::trace_one)
        throw std::invalid_argument("DensityMatrix: trace residual " + std::to_string(tr_resid) +
                                    " exceeds 1e-12");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat_ + mat_.adjoint()),
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol::psd)
        throw std::invalid_argument("DensityMatrix: minimum eigenvalue " + std::to_string(min_eig) +
                                    " below -1e-10");
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
    const double n = psi.norm();
    if (n == 0.0) throw std::invalid_argument("DensityMatrix::pure: zero vector");
    Vector v = psi / n;
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Matrix SpectralDecomposition::reconstruct() const {
    if (projectors.empty()) throw std::invalid_argument("SpectralDecomposition: empty");
    Matrix m = Matrix::Zero(projectors[0].dim(), projectors[0].dim());
    for (std::size_t i = 0; i < projectors.size(); ++i) m += eigenvalues[i] * projectors[i].mat();
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out = Eigen::kroneckerProduct(a, b);
    return out;
}

Operator tensor(const Operator& a, const Operator& b) { return Operator(kron(a.mat(), b.mat())); }

Operator partial_trace(const Operator& o, const std::vector<int>& dims,
                       const std::vector<int>& keep) {
    const int nfac = static_cast<int>(dims.size());
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("partial_trace: factor dimensions must be >= 1");
        total *= d;
    }
    if (total != o.dim())
        throw std::invalid_argument("partial_trace: product of dims " + std::to_string(total) +
                                    " does not match operator dim " + std::to_string(o.dim()));
    std::vector<int> kept(keep);
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw std::invalid_argument("partial_trace: duplicate keep index");
    for (int k : kept)
        if (k < 0 || k >= nfac) throw std::invalid_argument("partial_trace: keep index out of range");

    std::vector<int> traced;
    for (int i = 0; i < nfac; ++i)
        if (!std::binary_search(kept.begin(), kept.end(), i)) traced.push_back(i);

    // Strides for lexicographic ordering, first factor most significant.
    std::vector<long> stride(nfac, 1);
    for (int i = nfac - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    long dim_keep = 1, dim_trace = 1;
    for (int k : kept) dim_keep *= dims[k];
    for (int t : traced) dim_trace *= dims[t];

    auto compose = [&](long keep_idx, long trace_idx) {
        long full = 0;
        for (int i = static_cast<int>(kept.size()) - 1; i >= 0; --i) {
            full += (keep_idx % dims[kept[i]]) * stride[kept[i]];
            keep_idx /= dims[kept[i]];
        }
        for (int i = static_cast<int>(traced.size()) - 1; i >= 0; --i) {
            full += (trace_idx % dims[traced[i]]) * stride[traced[i]];
            trace_idx /= dims[traced[i]];
        }
        return full;
    };

    Matrix out = Matrix::Zero(dim_keep, dim_keep);
    for (long r = 0; r < dim_keep; ++r)
        for (long c = 0; c < dim_keep; ++c) {
            Complex acc(0.0, 0.0);
            for (long t = 0; t < dim_trace; ++t) acc += o.mat()(compose(r, t), compose(c, t));
            out(r, c) = acc;
        }
    return Operator(std::move(out));
}

double expectation(const Operator& o, const DensityMatrix& rho) {
    if (o.dim() != rho.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    const Complex v = trace_product(o.mat(), rho.mat());
    if (std::abs(v.imag()) >= tol::imag_part)
        throw numerical_error("expectation: imaginary part " + std::to_string(v.imag()) +
                              " above 1e-10; operator not Hermitian?");
    return v.real();
}

Operator commutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "commutator");
    return Operator(a.mat() * b.mat() - b.mat() * a.mat());
}

Operator anticommutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "anticommutator");
    return Operator(a.mat() * b.mat() + b.mat() * a.mat());
}

SpectralDecomposition spectral_decompose(const Operator& o, double degeneracy_tol) {
    if (!o.is_hermitian())
        throw std::invalid_argument("spectral_decompose: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (o.mat() + o.mat().adjoint()));
    if (es.info() != Eigen::Success) throw numerical_error("spectral_decompose: solver failed");
    const auto& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    const int n = o.dim();

    SpectralDecomposition out;
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i < n && vals(i) - vals(i - 1) <= degeneracy_tol) continue;
        double mean = 0.0;
        Matrix proj = Matrix::Zero(n, n);
        for (int k = start; k < i; ++k) {
            mean += vals(k);
            proj += vecs.col(k) * vecs.col(k).adjoint();
        }
        out.eigenvalues.push_back(mean / (i - start));
        out.projectors.emplace_back(std::move(proj));
        start = i;
    }
    return out;
}

Operator swap_operator(int d) {
    if (d < 1) throw std::invalid_argument("swap_operator: d must be >= 1");
    Matrix s = Matrix::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) s(l * d + k, k * d + l) = 1.0;
    return Operator(std::move(s));
}

Operator random_hermitian(int d, Rng& rng) {
    Matrix g = ginibre(d, rng);
    return Operator(0.5 * (g + g.adjoint()));
}

DensityMatrix random_density(int d, Rng& rng) {
    Matrix g = ginibre(d, rng);
    Matrix m = g * g.adjoint();
    return DensityMatrix(m / m.trace());
}

Operator random_unitary(int d, Rng& rng) {
    Matrix g = ginibre(d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const Complex rjj = r(j, j);
        if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
    }
    return Operator(std::move(q));
}

Operator random_hermitian(int d, std::uint64_t seed) {
    Rng rng(seed);
    return random_hermitian(d, rng);
}

DensityMatrix random_density(int d, std::uint64_t seed) {
    Rng rng(seed);
    return random_density(d, rng);
}

Operator random_unitary(int d, std::uint64_t seed) {
    Rng rng(seed);
    return random_unitary(d, rng);
}

Operator pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(std::move(m));
}

Operator pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return Operator(std::move(m));
}

Operator pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(std::move(m));
}

Operator x_phi(double phi) {
    return Operator(std::cos(phi) * pauli_x().mat() + std::sin(phi) * pauli_y().mat());
}

}  // namespace qmeas
