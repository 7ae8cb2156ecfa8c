#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qmeas/circuit.hpp"
#include "qmeas/relations.hpp"
#include "qmeas/scenario.hpp"

namespace qmeas {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRelationViolation = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericalError = 3;

/// One CSV row per applicable relation per sweep point. Returns kExitOk iff
/// every universal relation is satisfied at every point.
int run_verify(const ScenarioSpec& spec, std::ostream& out);

/// Error/disturbance components plus scenario statistics per sweep point.
int run_sweep(const ScenarioSpec& spec, std::ostream& out);

struct RegionOptions {
    double sigma_a = 1.0;
    double sigma_b = 1.0;
    double c_ab = 1.0;
    double grid_start = 0.0;
    double grid_stop = 1.5;
    int grid_count = 151;
    bool force_branciard = false;  // request the curve even off its validity triple
};

/// Forbidden-region boundary curves on a shared eps_A grid. The
/// branciard_special column appears only when sigma_a = sigma_b = c_ab = 1.
int run_region(const RegionOptions& opt, std::ostream& out);

struct CircuitOptions {
    double phi = 0.0;
    bool phi_given = false;
    long shots = 100000;
    std::uint64_t seed = 1;
    enum class Basis { X, Y, Both } basis = Basis::Both;
    CircuitVariant variant = CircuitVariant::ControlledSwap;
};

/// Exact vs operator-route vs sampled estimator values with standard errors.
int run_circuit(const ScenarioSpec& spec, const CircuitOptions& opt, std::ostream& out);

/// Full command-line front end; returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal formatting, C locale, used for all CSV output.
std::string csv_double(double v);

}  // namespace qmeas
