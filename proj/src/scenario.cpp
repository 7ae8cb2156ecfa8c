#include "qmeas/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qmeas {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw parse_error(origin + ":" + std::to_string(line) + ": " + msg);
}

/// Complex literal in the form "a", "a+bi", "a-bi", "bi", "i", "-i".
Complex parse_complex(const std::string& raw, const std::string& origin, int line) {
    std::string s = trim(raw);
    if (s.empty()) fail(origin, line, "empty complex literal");
    const bool has_i = s.back() == 'i' || s.back() == 'I';

    // Split at the last top-level sign that is not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if (s[k] != '+' && s[k] != '-') continue;
        const char prev = s[k - 1];
        if (prev == 'e' || prev == 'E') continue;
        split = k;
        break;
    }

    auto to_double = [&](std::string t) {
        t = trim(t);
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &pos);
        } catch (const std::exception&) {
            fail(origin, line, "bad number '" + t + "'");
        }
        if (pos != t.size()) fail(origin, line, "trailing characters in number '" + t + "'");
        return v;
    };

    if (!has_i) {
        if (split != std::string::npos)
            fail(origin, line, "complex literal '" + s + "' must end in 'i'");
        return Complex(to_double(s), 0.0);
    }
    std::string im = s.substr(0, s.size() - 1);
    if (split == std::string::npos) return Complex(0.0, to_double(im));
    return Complex(to_double(s.substr(0, split)), to_double(im.substr(split)));
}

/// Row-major matrix literal: [ a b ; c d ] with complex entries.
Matrix parse_matrix(const std::string& raw, const std::string& origin, int line) {
    std::string s = trim(raw);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        fail(origin, line, "matrix literal must be enclosed in [ ]");
    s = s.substr(1, s.size() - 2);

    std::vector<std::vector<Complex>> rows;
    std::string row_text;
    std::istringstream in(s);
    while (std::getline(in, row_text, ';')) {
        std::vector<Complex> row;
        for (const auto& tok : split_ws(row_text)) row.push_back(parse_complex(tok, origin, line));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(origin, line, "empty matrix literal");
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != rows[0].size()) fail(origin, line, "ragged matrix literal");
    if (rows[0].size() != n) fail(origin, line, "matrix literal must be square");
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    return m;
}

MatrixRef parse_matrix_ref(const std::string& raw, const std::string& origin, int line) {
    const std::string s = trim(raw);
    MatrixRef ref;
    if (!s.empty() && s.front() == '[') {
        ref.name = MatrixRef::Name::Literal;
        ref.literal = parse_matrix(s, origin, line);
        return ref;
    }
    if (s == "X") ref.name = MatrixRef::Name::X;
    else if (s == "Y") ref.name = MatrixRef::Name::Y;
    else if (s == "Z") ref.name = MatrixRef::Name::Z;
    else if (s == "I") ref.name = MatrixRef::Name::I;
    else if (s == "Xphi") ref.name = MatrixRef::Name::Xphi;
    else fail(origin, line, "expected a matrix literal or one of X, Y, Z, I, Xphi; got '" + s + "'");
    return ref;
}

DensityMatrix parse_state(const std::string& raw, const std::string& origin, int line) {
    const std::string s = trim(raw);
    auto pure2 = [](Complex c0, Complex c1) {
        Vector v(2);
        v << c0, c1;
        return DensityMatrix::pure(v);
    };
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    try {
        if (s == "zplus") return pure2(1.0, 0.0);
        if (s == "zminus") return pure2(0.0, 1.0);
        if (s == "xplus") return pure2(inv_sqrt2, inv_sqrt2);
        if (s == "xminus") return pure2(inv_sqrt2, -inv_sqrt2);
        if (s == "yplus") return pure2(inv_sqrt2, Complex(0.0, inv_sqrt2));
        if (s == "yminus") return pure2(inv_sqrt2, Complex(0.0, -inv_sqrt2));
        if (s == "mixed2") return DensityMatrix::maximally_mixed(2);
        if (!s.empty() && s.front() == '[')
            return DensityMatrix(parse_matrix(s, origin, line));
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception& e) {
        fail(origin, line, std::string("invalid state: ") + e.what());
    }
    fail(origin, line, "expected a state literal or named state; got '" + s + "'");
}

}  // namespace

Operator MatrixRef::instantiate(double phi) const {
    switch (name) {
        case Name::Literal: return Operator(literal);
        case Name::X: return pauli_x();
        case Name::Y: return pauli_y();
        case Name::Z: return pauli_z();
        case Name::I: return Operator::identity(2);
        case Name::Xphi: return x_phi(phi);
    }
    throw std::invalid_argument("MatrixRef: uninitialized");
}

std::vector<double> sweep_grid(const SweepSpec& s) {
    if (s.count < 1) throw std::invalid_argument("sweep_grid: count must be >= 1");
    std::vector<double> g;
    g.reserve(s.count);
    if (s.count == 1) {
        g.push_back(s.start);
        return g;
    }
    for (int i = 0; i < s.count; ++i)
        g.push_back(s.start + (s.stop - s.start) * static_cast<double>(i) / (s.count - 1));
    return g;
}

bool ScenarioSpec::needs_phi() const {
    if (target_a.needs_phi() || target_b.needs_phi()) return true;
    if (model_kind == ModelKind::ProjectiveOf && projective_of.needs_phi()) return true;
    if (bside == BSide::JointOf && bside_joint_of.needs_phi()) return true;
    return false;
}

ScenarioSpec parse_scenario_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    bool have_state = false, have_a = false, have_b = false, have_model = false;
    ScenarioSpec spec;

    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) fail(origin, lineno, "empty value for '" + key + "'");

        if (key == "name") {
            spec.name = value;
        } else if (key == "state") {
            spec.state = parse_state(value, origin, lineno);
            have_state = true;
        } else if (key == "A") {
            spec.target_a = parse_matrix_ref(value, origin, lineno);
            have_a = true;
        } else if (key == "B") {
            spec.target_b = parse_matrix_ref(value, origin, lineno);
            have_b = true;
        } else if (key == "model") {
            const auto toks = split_ws(value);
            if (toks.empty()) fail(origin, lineno, "empty model");
            if (toks[0] == "projective-of") {
                spec.model_kind = ScenarioSpec::ModelKind::ProjectiveOf;
                const std::string rest = trim(value.substr(value.find(toks[0]) + toks[0].size()));
                if (rest.empty()) fail(origin, lineno, "projective-of needs an observable");
                spec.projective_of = parse_matrix_ref(rest, origin, lineno);
            } else if (toks[0] == "indirect") {
                spec.model_kind = ScenarioSpec::ModelKind::Indirect;
            } else {
                fail(origin, lineno, "model must be 'projective-of <obs>' or 'indirect'");
            }
            have_model = true;
        } else if (key == "apparatus_dim") {
            try {
                spec.apparatus_dim = std::stoi(value);
            } catch (const std::exception&) {
                fail(origin, lineno, "apparatus_dim must be an integer");
            }
        } else if (key == "apparatus_state") {
            spec.apparatus_state = parse_matrix(value, origin, lineno);
        } else if (key == "interaction") {
            spec.interaction = parse_matrix(value, origin, lineno);
        } else if (key == "meter") {
            spec.meter = parse_matrix(value, origin, lineno);
        } else if (key == "bside") {
            const auto toks = split_ws(value);
            if (toks[0] == "ideal-after") {
                spec.bside = ScenarioSpec::BSide::IdealAfter;
            } else if (toks[0] == "joint-of") {
                spec.bside = ScenarioSpec::BSide::JointOf;
                const std::string rest = trim(value.substr(value.find(toks[0]) + toks[0].size()));
                if (rest.empty()) fail(origin, lineno, "joint-of needs an observable");
                spec.bside_joint_of = parse_matrix_ref(rest, origin, lineno);
            } else {
                fail(origin, lineno, "bside must be 'ideal-after' or 'joint-of <obs>'");
            }
        } else if (key == "sweep") {
            const auto toks = split_ws(value);
            if (toks.size() != 4) fail(origin, lineno, "sweep needs: <param> <start> <stop> <count>");
            SweepSpec sw;
            sw.param = toks[0];
            try {
                sw.start = std::stod(toks[1]);
                sw.stop = std::stod(toks[2]);
                sw.count = std::stoi(toks[3]);
            } catch (const std::exception&) {
                fail(origin, lineno, "sweep values must be numeric");
            }
            if (sw.count < 1) fail(origin, lineno, "sweep count must be >= 1");
            spec.sweep = sw;
        } else if (key == "dim") {
            // informative only; checked against the state below
        } else {
            fail(origin, lineno, "unknown key '" + key + "'");
        }
    }

    if (!have_state) fail(origin, lineno, "missing 'state'");
    if (!have_a || !have_b) fail(origin, lineno, "missing target 'A' or 'B'");
    if (!have_model) fail(origin, lineno, "missing 'model'");
    if (spec.model_kind == ScenarioSpec::ModelKind::Indirect) {
        if (spec.apparatus_dim < 1)
            fail(origin, lineno, "indirect model needs 'apparatus_dim'");
        if (spec.apparatus_state.size() == 0 || spec.interaction.size() == 0 ||
            spec.meter.size() == 0)
            fail(origin, lineno,
                 "indirect model needs 'apparatus_state', 'interaction' and 'meter'");
    }
    if (spec.needs_phi() && !spec.sweep)
        fail(origin, lineno, "Xphi used without a sweep; add 'sweep = phi <start> <stop> <count>'");
    return spec;
}

ScenarioSpec load_scenario(const std::string& path_or_preset) {
    if (path_or_preset == "vienna") return vienna_preset();
    std::ifstream in(path_or_preset);
    if (!in) throw parse_error("cannot open scenario file '" + path_or_preset + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path_or_preset);
}

ScenarioSpec vienna_preset() {
    const std::string text =
        "name = vienna\n"
        "state = zplus\n"
        "A = X\n"
        "B = Y\n"
        "model = projective-of Xphi\n"
        "bside = ideal-after\n"
        "sweep = phi 0 6.283185307179586 181\n";
    return parse_scenario_text(text, "<vienna>");
}

IndirectModel projective_indirect_model(const Operator& g, double degeneracy_tol) {
    const auto dec = spectral_decompose(g, degeneracy_tol);
    const int d = g.dim();
    const int n = static_cast<int>(dec.eigenvalues.size());

    // Pointer shift conditioned on the outcome: U = sum_i P_i (x) Shift_i.
    Matrix u = Matrix::Zero(d * n, d * n);
    for (int i = 0; i < n; ++i) {
        Matrix shift = Matrix::Zero(n, n);
        for (int k = 0; k < n; ++k) shift((k + i) % n, k) = 1.0;
        u += kron(dec.projectors[i].mat(), shift);
    }
    Matrix meter = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) meter(k, k) = dec.eigenvalues[k];
    Matrix app = Matrix::Zero(n, n);
    app(0, 0) = 1.0;

    return IndirectModel(d, n, DensityMatrix(std::move(app)), Operator(std::move(u)),
                         Operator(std::move(meter)));
}

Scenario instantiate(const ScenarioSpec& spec, double phi) {
    const Operator target_a = spec.target_a.instantiate(phi);
    const Operator target_b = spec.target_b.instantiate(phi);
    if (!target_a.is_hermitian() || !target_b.is_hermitian())
        throw std::invalid_argument("instantiate: targets must be Hermitian");
    if (target_a.dim() != spec.state.dim() || target_b.dim() != spec.state.dim())
        throw std::invalid_argument("instantiate: target dims do not match the state");

    IndirectModel model = [&]() {
        if (spec.model_kind == ScenarioSpec::ModelKind::ProjectiveOf)
            return projective_indirect_model(spec.projective_of.instantiate(phi));
        return IndirectModel(spec.state.dim(), spec.apparatus_dim,
                             DensityMatrix(spec.apparatus_state), Operator(spec.interaction),
                             Operator(spec.meter));
    }();
    if (model.system_dim != spec.state.dim())
        throw std::invalid_argument("instantiate: model system dim does not match the state");

    const Operator measured_after = spec.bside == ScenarioSpec::BSide::IdealAfter
                                        ? target_b
                                        : spec.bside_joint_of.instantiate(phi);
    return Scenario{spec.state, joint_from_indirect(model, measured_after), target_a, target_b};
}

}  // namespace qmeas
