#pragma once

#include <cstdint>
#include <vector>

#include "qmeas/common.hpp"

namespace qmeas {

/// Dense complex operator on a finite-dimensional Hilbert space. Immutable
/// after construction. The Hermitian flag is detected at construction (max
/// absolute entry difference against the conjugate transpose, 1e-12) and
/// propagated through tensor products.
class Operator {
public:
    Operator() = default;
    explicit Operator(Matrix entries);

    /// Validating factory: throws std::invalid_argument unless `entries` is
    /// Hermitian within 1e-12.
    static Operator hermitian(Matrix entries);
    static Operator identity(int dim);
    static Operator zero(int dim);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }
    bool is_hermitian() const { return hermitian_; }

    Operator adjoint() const { return Operator(mat_.adjoint()); }

private:
    Matrix mat_;
    bool hermitian_ = false;
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, const Operator& a);
Operator operator*(double s, const Operator& a);

/// Positive unit-trace operator. Construction validates Hermiticity (1e-12),
/// unit trace (1e-12) and positivity (min eigenvalue >= -1e-10); failure
/// messages name the offending residual.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix entries);

    static DensityMatrix pure(const Vector& psi);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }
    Operator as_operator() const { return Operator(mat_); }

private:
    Matrix mat_;
};

/// Eigenvalues strictly increasing; clusters closer than the degeneracy
/// tolerance are merged into one eigenvalue (mean over the cluster's
/// eigenvector slots) with the summed projector.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<Operator> projectors;

    Matrix reconstruct() const;
};

/// Kronecker product; lexicographic basis ordering with the first factor most
/// significant.
Matrix kron(const Matrix& a, const Matrix& b);
Operator tensor(const Operator& a, const Operator& b);

/// Reduce `o` on a tensor-product space (factor dimensions `dims`, same
/// ordering as `tensor`) to the factors listed in `keep` (0-based, ascending).
Operator partial_trace(const Operator& o, const std::vector<int>& dims,
                       const std::vector<int>& keep);

/// tr(o rho); the imaginary part is required to be below 1e-10 and discarded.
double expectation(const Operator& o, const DensityMatrix& rho);

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

SpectralDecomposition spectral_decompose(const Operator& o,
                                         double degeneracy_tol = tol::degeneracy);

/// Swap operator S on C^d (x) C^d: S(u (x) v) = v (x) u.
Operator swap_operator(int d);

Operator random_hermitian(int d, std::uint64_t seed);
DensityMatrix random_density(int d, std::uint64_t seed);
Operator random_unitary(int d, std::uint64_t seed);

Operator random_hermitian(int d, Rng& rng);
DensityMatrix random_density(int d, Rng& rng);
Operator random_unitary(int d, Rng& rng);

// Qubit toolbox.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
/// cos(phi) X + sin(phi) Y.
Operator x_phi(double phi);

}  // namespace qmeas
