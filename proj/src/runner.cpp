#include "qmeas/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace qmeas {

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<double> scenario_grid(const ScenarioSpec& spec) {
    if (spec.sweep) return sweep_grid(*spec.sweep);
    return {0.0};
}

}  // namespace

int run_verify(const ScenarioSpec& spec, std::ostream& out) {
    out << "phi,relation,lhs,rhs,slack,satisfied,precondition_residual\n";
    bool all_universal_ok = true;
    for (double phi : scenario_grid(spec)) {
        const Scenario sc = instantiate(spec, phi);
        const auto an = analyze_scenario(sc);
        for (const auto& rep : evaluate_all(an)) {
            if (!rep.applicable) continue;
            out << csv_double(phi) << ',' << to_string(rep.id) << ',' << csv_double(rep.lhs) << ','
                << csv_double(rep.rhs) << ',' << csv_double(rep.slack) << ','
                << (rep.satisfied ? 1 : 0) << ',' << csv_double(rep.precondition_residual)
                << '\n';
            if (!rep.satisfied && !is_conditional(rep.id)) all_universal_ok = false;
        }
    }
    return all_universal_ok ? kExitOk : kExitRelationViolation;
}

int run_sweep(const ScenarioSpec& spec, std::ostream& out) {
    out << "phi,error_a,bias_a,fuzz_a,error_b,bias_b,fuzz_b,"
           "sigma_a,sigma_b,sigma_joint_a,sigma_joint_b,sigma_bar_a,sigma_bar_b,"
           "c_ab,fuzz_bound,main_lhs,ozawa_lhs,error_product\n";
    for (double phi : scenario_grid(spec)) {
        const Scenario sc = instantiate(spec, phi);
        const auto an = analyze_scenario(sc);
        const double main_lhs = evaluate(RelationId::Main, an.a, an.b, an.stats).lhs;
        const double ozawa_lhs = evaluate(RelationId::Ozawa, an.a, an.b, an.stats).lhs;
        const double* vals[] = {&an.a.total,
                                &an.a.bias,
                                &an.a.fuzziness,
                                &an.b.total,
                                &an.b.bias,
                                &an.b.fuzziness,
                                &an.stats.sigma_a,
                                &an.stats.sigma_b,
                                &an.stats.sigma_joint_a,
                                &an.stats.sigma_joint_b,
                                &an.stats.sigma_bar_a,
                                &an.stats.sigma_bar_b,
                                &an.stats.c_ab,
                                &an.stats.fuzz_bound};
        out << csv_double(phi);
        for (const double* v : vals) out << ',' << csv_double(*v);
        out << ',' << csv_double(main_lhs) << ',' << csv_double(ozawa_lhs) << ','
            << csv_double(an.a.total * an.b.total) << '\n';
    }
    return kExitOk;
}

int run_region(const RegionOptions& opt, std::ostream& out) {
    if (!(opt.sigma_a > 0.0) || !(opt.sigma_b > 0.0) || !(opt.c_ab > 0.0))
        throw std::invalid_argument("region: sigma_a, sigma_b and c_ab must be positive");
    if (opt.grid_count < 1) throw std::invalid_argument("region: grid count must be >= 1");

    ScenarioStats st;
    st.sigma_a = opt.sigma_a;
    st.sigma_b = opt.sigma_b;
    st.c_ab = opt.c_ab;
    const bool unit_triple = std::abs(opt.sigma_a - 1.0) <= 1e-12 &&
                             std::abs(opt.sigma_b - 1.0) <= 1e-12 &&
                             std::abs(opt.c_ab - 1.0) <= 1e-12;
    if (opt.force_branciard && !unit_triple)
        throw std::invalid_argument(
            "region: branciard_special requested but sigma_a = sigma_b = c_ab = 1 does not hold");
    const bool with_branciard = unit_triple;

    SweepSpec grid_spec{"eps_a", opt.grid_start, opt.grid_stop, opt.grid_count};
    const auto grid = sweep_grid(grid_spec);

    std::vector<BoundaryCurve> curves = {BoundaryCurve::Ozawa};
    if (with_branciard) curves.push_back(BoundaryCurve::BranciardSpecial);
    curves.push_back(BoundaryCurve::CondBothUnbiased);
    curves.push_back(BoundaryCurve::CondUnbiasedAProjB);
    curves.push_back(BoundaryCurve::CondUnbiasedA);

    out << "eps_a";
    for (BoundaryCurve c : curves) out << ",eps_b_" << to_string(c);
    out << '\n';

    std::vector<std::vector<RegionPoint>> columns;
    for (BoundaryCurve c : curves) columns.push_back(region_boundary(c, st, grid));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << csv_double(grid[i]);
        for (const auto& col : columns) out << ',' << csv_double(col[i].eps_b_min);
        out << '\n';
    }
    return kExitOk;
}

namespace {

struct CircuitRow {
    std::string quantity;
    double exact;
    double operator_route;
    SampleEstimate sampled;
};

void emit_rows(const CircuitConfig& cfg, const Scenario& sc, const CircuitOptions& opt,
               std::vector<CircuitRow>& rows) {
    const auto an = analyze_scenario(sc);
    const auto sampled = sample(cfg, opt.shots, opt.seed);
    auto sampled_for = [&](const std::string& name) {
        for (const auto& [n, est] : sampled)
            if (n == name) return est;
        throw std::invalid_argument("run_circuit: missing sampled quantity " + name);
    };

    if (cfg.reference_mode == ReferenceMode::Joint && cfg.basis == QubitBasis::X) {
        const auto [fa, fb] = estimate_fuzziness_exact(cfg);
        rows.push_back({"fuzziness_a", fa, an.a.fuzziness, sampled_for("fuzziness_a")});
        rows.push_back({"fuzziness_b", fb, an.b.fuzziness, sampled_for("fuzziness_b")});
    } else if (cfg.reference_mode == ReferenceMode::IdealA) {
        rows.push_back({"error_a", estimate_error_disturbance_exact(cfg), an.a.total,
                        sampled_for("error_a")});
    } else if (cfg.reference_mode == ReferenceMode::IdealB) {
        rows.push_back({"disturbance_b", estimate_error_disturbance_exact(cfg), an.b.total,
                        sampled_for("disturbance_b")});
    } else {
        rows.push_back({"commutator_bound", estimate_commutator_bound_exact(cfg),
                        an.stats.fuzz_bound, sampled_for("commutator_bound")});
    }
}

}  // namespace

int run_circuit(const ScenarioSpec& spec, const CircuitOptions& opt, std::ostream& out) {
    if (spec.needs_phi() && !opt.phi_given && spec.sweep && spec.sweep->count > 1)
        throw std::invalid_argument(
            "circuit: scenario sweeps a parameter; pick a point with --phi");
    const double phi = opt.phi_given ? opt.phi : (spec.sweep ? spec.sweep->start : 0.0);
    const Scenario sc = instantiate(spec, phi);

    CircuitConfig base{sc.rho,      sc.joint,      sc.target_a,
                       sc.target_b, ReferenceMode::Joint, QubitBasis::X,
                       opt.variant};

    std::vector<CircuitRow> rows;
    const bool want_x = opt.basis != CircuitOptions::Basis::Y;
    const bool want_y = opt.basis != CircuitOptions::Basis::X;
    if (want_y && opt.variant == CircuitVariant::SingletProjection &&
        opt.basis == CircuitOptions::Basis::Y)
        throw std::invalid_argument("circuit: the singlet variant has no Y-basis run");

    if (want_x) {
        CircuitConfig cfg = base;
        cfg.reference_mode = ReferenceMode::Joint;
        emit_rows(cfg, sc, opt, rows);
        cfg.reference_mode = ReferenceMode::IdealA;
        emit_rows(cfg, sc, opt, rows);
        cfg.reference_mode = ReferenceMode::IdealB;
        emit_rows(cfg, sc, opt, rows);
    }
    if (want_y && opt.variant == CircuitVariant::ControlledSwap) {
        CircuitConfig cfg = base;
        cfg.reference_mode = ReferenceMode::Joint;
        cfg.basis = QubitBasis::Y;
        emit_rows(cfg, sc, opt, rows);
    }

    out << "quantity,exact,operator_route,sampled,std_error,shots,seed\n";
    for (const auto& r : rows) {
        out << r.quantity << ',' << csv_double(r.exact) << ',' << csv_double(r.operator_route)
            << ',' << csv_double(r.sampled.value) << ','
            << (r.sampled.std_error_defined ? csv_double(r.sampled.std_error) : std::string("nan"))
            << ',' << r.sampled.shots << ',' << r.sampled.seed << '\n';
    }
    return kExitOk;
}

namespace {

const char* kUsage =
    "usage: qmeas <command> [options]\n"
    "\n"
    "commands:\n"
    "  verify   --scenario <path|vienna> [--out csv]\n"
    "           evaluate every applicable tradeoff relation per sweep point;\n"
    "           exit 0 iff all universal relations hold\n"
    "  sweep    --scenario <path|vienna> [--out csv]\n"
    "           error/disturbance components and statistics per sweep point\n"
    "  region   [--sigma-a v] [--sigma-b v] [--c-ab v] [--grid a:b:n]\n"
    "           [--branciard] [--out csv]\n"
    "           forbidden-region boundary curves on an eps_A grid\n"
    "  circuit  --scenario <path|vienna> [--phi v] [--shots n] [--seed n]\n"
    "           [--basis x|y|both] [--variant cswap|singlet] [--out csv]\n"
    "           controlled-swap estimators: exact, operator-route, sampled\n";

struct ArgReader {
    const std::vector<std::string>& args;
    std::size_t i = 0;

    std::optional<std::string> next() {
        if (i >= args.size()) return std::nullopt;
        return args[i++];
    }
    std::string value(const std::string& flag) {
        if (i >= args.size()) throw parse_error("missing value for " + flag);
        return args[i++];
    }
};

double parse_double_arg(const std::string& flag, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw parse_error("");
        return x;
    } catch (const std::exception&) {
        throw parse_error("bad numeric value '" + v + "' for " + flag);
    }
}

long parse_long_arg(const std::string& flag, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw parse_error("");
        return x;
    } catch (const std::exception&) {
        throw parse_error("bad integer value '" + v + "' for " + flag);
    }
}

void parse_grid_arg(const std::string& v, RegionOptions& opt) {
    std::istringstream in(v);
    std::string a, b, n;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, n))
        throw parse_error("grid must be start:stop:count");
    opt.grid_start = parse_double_arg("--grid", a);
    opt.grid_stop = parse_double_arg("--grid", b);
    opt.grid_count = static_cast<int>(parse_long_arg("--grid", n));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out) {
    ArgReader rd{args};
    const auto cmd = rd.next();
    if (!cmd) throw parse_error("no command given");

    std::string scenario_arg;
    std::string out_path;
    RegionOptions region_opt;
    CircuitOptions circuit_opt;

    while (auto flag = rd.next()) {
        if (*flag == "--scenario") scenario_arg = rd.value(*flag);
        else if (*flag == "--out") out_path = rd.value(*flag);
        else if (*flag == "--sigma-a") region_opt.sigma_a = parse_double_arg(*flag, rd.value(*flag));
        else if (*flag == "--sigma-b") region_opt.sigma_b = parse_double_arg(*flag, rd.value(*flag));
        else if (*flag == "--c-ab") region_opt.c_ab = parse_double_arg(*flag, rd.value(*flag));
        else if (*flag == "--grid") parse_grid_arg(rd.value(*flag), region_opt);
        else if (*flag == "--branciard") region_opt.force_branciard = true;
        else if (*flag == "--phi") {
            circuit_opt.phi = parse_double_arg(*flag, rd.value(*flag));
            circuit_opt.phi_given = true;
        } else if (*flag == "--shots") circuit_opt.shots = parse_long_arg(*flag, rd.value(*flag));
        else if (*flag == "--seed")
            circuit_opt.seed = static_cast<std::uint64_t>(parse_long_arg(*flag, rd.value(*flag)));
        else if (*flag == "--basis") {
            const std::string v = rd.value(*flag);
            if (v == "x") circuit_opt.basis = CircuitOptions::Basis::X;
            else if (v == "y") circuit_opt.basis = CircuitOptions::Basis::Y;
            else if (v == "both") circuit_opt.basis = CircuitOptions::Basis::Both;
            else throw parse_error("bad --basis value '" + v + "' (x, y or both)");
        } else if (*flag == "--variant") {
            const std::string v = rd.value(*flag);
            if (v == "cswap") circuit_opt.variant = CircuitVariant::ControlledSwap;
            else if (v == "singlet") circuit_opt.variant = CircuitVariant::SingletProjection;
            else throw parse_error("bad --variant value '" + v + "' (cswap or singlet)");
        } else {
            throw parse_error("unknown option '" + *flag + "'");
        }
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw parse_error("cannot open output file '" + out_path + "'");
        sink = &file;
    }

    auto need_scenario = [&]() {
        if (scenario_arg.empty()) throw parse_error("missing --scenario");
        return load_scenario(scenario_arg);
    };

    if (*cmd == "verify") return run_verify(need_scenario(), *sink);
    if (*cmd == "sweep") return run_sweep(need_scenario(), *sink);
    if (*cmd == "region") return run_region(region_opt, *sink);
    if (*cmd == "circuit") return run_circuit(need_scenario(), circuit_opt, *sink);
    throw parse_error("unknown command '" + *cmd + "'");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        (args.empty() ? err : out) << kUsage;
        return args.empty() ? kExitInputError : kExitOk;
    }
    try {
        return dispatch(args, out);
    } catch (const numerical_error& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

}  // namespace qmeas
