#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qmeas {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised when a quantity that theory guarantees to be real, nonnegative, or
/// consistent across two computation routes comes out otherwise. Indicates a
/// bug or corrupted input rather than a state the caller should handle.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a pair of observables handed in as a joint measurement fails
/// to commute.
class non_joint_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on malformed scenario files or CLI input.
class parse_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace_one = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double commuting = 1e-10;
inline constexpr double projector = 1e-10;
inline constexpr double completeness = 1e-10;
inline constexpr double relation = 1e-9;
inline constexpr double radicand = 1e-10;
inline constexpr double degeneracy = 1e-8;
inline constexpr double cross_check = 1e-12;
inline constexpr double unbiased = 1e-10;
inline constexpr double imag_part = 1e-10;
}  // namespace tol

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double t = tol::hermitian) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= t;
}

/// tr(a*b) without forming the product.
inline Complex trace_product(const Matrix& a, const Matrix& b) {
    return a.cwiseProduct(b.transpose()).sum();
}

/// Deterministic RNG for property-test ensembles and shot sampling. All
/// floating-point draws are derived from raw mt19937_64 output so streams are
/// bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

}  // namespace qmeas
