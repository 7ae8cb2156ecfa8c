#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmeas/error_analysis.hpp"

namespace qmeas {

/// A matrix-valued field of a scenario file: either a literal or one of the
/// named operators. Xphi depends on the sweep parameter.
struct MatrixRef {
    enum class Name { Literal, X, Y, Z, I, Xphi };
    Name name = Name::Literal;
    Matrix literal;

    bool needs_phi() const { return name == Name::Xphi; }
    Operator instantiate(double phi) const;
};

struct SweepSpec {
    std::string param = "phi";
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
};

std::vector<double> sweep_grid(const SweepSpec& s);

/// Parsed, validated scenario description. The A-side measurement is either
/// the projective measurement of an observable (realized through a minimal
/// indirect model) or an explicit indirect model; the B side is either the
/// ideal measurement of target B performed after it (error-disturbance
/// reading) or a second observable measured jointly.
struct ScenarioSpec {
    std::string name;
    DensityMatrix state = DensityMatrix::maximally_mixed(2);
    MatrixRef target_a;
    MatrixRef target_b;

    enum class ModelKind { ProjectiveOf, Indirect } model_kind = ModelKind::ProjectiveOf;
    MatrixRef projective_of;
    int apparatus_dim = 0;
    Matrix apparatus_state;
    Matrix interaction;
    Matrix meter;

    enum class BSide { IdealAfter, JointOf } bside = BSide::IdealAfter;
    MatrixRef bside_joint_of;

    std::optional<SweepSpec> sweep;

    bool needs_phi() const;
};

/// Built-in presets (currently "vienna") or a scenario file path.
ScenarioSpec load_scenario(const std::string& path_or_preset);
ScenarioSpec parse_scenario_text(const std::string& text, const std::string& origin);
ScenarioSpec vienna_preset();

/// Indirect realization of the projective measurement of `g`: apparatus
/// dimension = number of distinct eigenvalues, apparatus state |0><0|,
/// interaction shifting the pointer by the outcome index, meter carrying the
/// eigenvalues. Unbiased and fuzziness-free for every state.
IndirectModel projective_indirect_model(const Operator& g, double degeneracy_tol = tol::degeneracy);

/// Build the full operator scenario at sweep parameter `phi` (ignored when
/// nothing references Xphi).
Scenario instantiate(const ScenarioSpec& spec, double phi);

}  // namespace qmeas
