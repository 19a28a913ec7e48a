#include "vnlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "vnlab/drift_approx.hpp"
#include "vnlab/dyn_lie.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/koopman.hpp"
#include "vnlab/matrix_io.hpp"
#include "vnlab/propagate.hpp"
#include "vnlab/systems.hpp"

namespace vnlab {

using nlohmann::json;

const std::vector<ExperimentKind>& experiment_kinds() {
    static const std::vector<ExperimentKind> kinds{
        {"drift-approx", "SRT convergence sweep of the drift approximation along a dyadic filtration of a torus model",
         {"torus", "levels", "z_grid"}, {}, false},
        {"lie-rank", "dynamical Lie algebra closure and rank verdicts for a control system",
         {"drift", "controls", "algebra"}, {}, false},
        {"product-formula", "Trotter or commutator product-formula error ladder on random skew-Hermitian pairs",
         {"formula", "dim", "pairs", "ladder", "t", "seed"}, {"normalize"}, true},
        {"born", "first-order inhomogeneous solution for a polynomial operator path",
         {"drift", "algebra", "state", "T", "nodes", "path"}, {}, false},
        {"reachable", "random piecewise-constant controls and their endpoints",
         {"drift", "controls", "algebra", "state", "T", "bound", "samples", "seed"}, {}, true},
        {"koopman", "von Neumann algebra generated by sampled Koopman unitaries of a torus flow",
         {"torus"}, {"times"}, false},
        {"jaynes-cummings", "commutation of the Jaynes-Cummings terms with the symmetry V on the truncation interior",
         {"n_max"}, {"omega_a", "omega_i", "omega_c", "interior_levels"}, false},
        {"oscillator", "bracket relations and closure of the harmonic-oscillator example",
         {"n_max"}, {"interior_dim"}, false},
    };
    return kinds;
}

std::string list_experiments() {
    std::ostringstream out;
    for (const auto& k : experiment_kinds()) {
        out << k.name << "\n    " << k.description << "\n    required:";
        for (const auto& f : k.required) out << ' ' << f;
        if (!k.optional.empty()) {
            out << "\n    optional:";
            for (const auto& f : k.optional) out << ' ' << f;
        }
        out << '\n';
    }
    return out.str();
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidArgument, "cli::validate", what); }

const ExperimentKind* find_kind(const std::string& name) {
    for (const auto& k : experiment_kinds())
        if (k.name == name) return &k;
    return nullptr;
}

const json& field(const json& j, const std::string& key) {
    if (!j.contains(key)) invalid("missing field '" + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& key) {
    const json& v = field(j, key);
    if (!v.is_number()) invalid("field '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) invalid("field '" + key + "' must be finite");
    return x;
}

double positive(const json& j, const std::string& key) {
    const double x = number(j, key);
    if (!(x > 0.0)) invalid("field '" + key + "' must be positive");
    return x;
}

long integer(const json& j, const std::string& key, long lo, long hi) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) invalid("field '" + key + "' must be an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi)
        invalid("field '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

std::vector<double> numbers(const json& j, const std::string& key) {
    const json& v = field(j, key);
    if (!v.is_array() || v.empty()) invalid("field '" + key + "' must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) invalid("field '" + key + "' holds a non-number");
        out.push_back(x.get<double>());
    }
    return out;
}

ComplexMatrix matrix(const json& j, const std::string& what) {
    try {
        return matrix_from_json(j);
    } catch (const Error& e) {
        invalid(what + ": " + e.what());
    }
}

// {"full": n}, {"diagonal": n} or the explicit block form.
BlockAlgebra algebra(const json& j, const Tolerances& tol) {
    if (!j.is_object()) invalid("field 'algebra' must be an object");
    if (j.contains("full")) return full_matrix_algebra(integer(j, "full", 1, 256));
    if (j.contains("diagonal")) return diagonal_algebra(integer(j, "diagonal", 1, 256));
    return algebra_from_json(j, tol);
}

// A real array, or {"re": [...], "im": [...]}.
ComplexVector state(const json& j) {
    auto reals = [](const json& a, const char* what) {
        if (!a.is_array() || a.empty()) invalid(std::string("state ") + what + " must be a non-empty array");
        std::vector<double> v;
        for (const auto& x : a) {
            if (!x.is_number()) invalid("state entries must be numbers");
            v.push_back(x.get<double>());
        }
        return v;
    };
    std::vector<double> re, im;
    if (j.is_array()) {
        re = reals(j, "");
        im.assign(re.size(), 0.0);
    } else if (j.is_object()) {
        re = reals(field(j, "re"), "re");
        im = reals(field(j, "im"), "im");
        if (im.size() != re.size()) invalid("state re/im lengths differ");
    } else {
        invalid("field 'state' must be an array or an {re, im} object");
    }
    ComplexVector v(Index(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) v(Index(i)) = Complex(re[i], im[i]);
    return v;
}

TorusModel torus(const json& j) {
    const json& t = field(j, "torus");
    if (!t.is_object()) invalid("field 'torus' must be an object");
    return torus_model_from_json(t);
}

ControlSystem control_system(const json& j, const Tolerances& tol) {
    const BlockAlgebra m = algebra(field(j, "algebra"), tol);
    const ComplexMatrix drift = matrix(field(j, "drift"), "drift");
    const json& cs = field(j, "controls");
    if (!cs.is_array()) invalid("field 'controls' must be an array of matrices");
    std::vector<ComplexMatrix> controls;
    for (const auto& c : cs) controls.push_back(matrix(c, "controls"));
    return make_control_system(drift, controls, m, tol);
}

void check_unit_state(const ComplexVector& xi, Index dim, const Tolerances& tol) {
    if (xi.size() != dim) invalid("state dimension does not match the system");
    if (std::abs(xi.norm() - 1.0) > tol.unit_norm) invalid("state must be a unit vector");
}

std::string join_csv(const std::string& header, const std::vector<std::string>& lines) {
    std::string out = header + "\n";
    for (const auto& l : lines) out += l + "\n";
    return out;
}

// ---------------------------------------------------------------------------

ExperimentResult run_drift_approx(const ExperimentConfig& cfg, unsigned threads) {
    const json& p = cfg.params;
    const TorusModel m = torus(p);
    const int levels = int(integer(p, "levels", 1, 16));
    const std::vector<double> z_grid = numbers(p, "z_grid");
    for (double z : z_grid)
        if (!(z > 0.0)) invalid("z_grid entries must be positive");

    std::vector<ConditionalExpectation> chain;
    json cells = json::array();
    for (const auto& level : dyadic_filtration(m, levels)) {
        cells.push_back(level.size());
        chain.push_back(filtration_expectation(m, level, cfg.tol));
    }
    const SweepTable t = convergence_sweep(generator(m), z_grid, chain, basis_probes(m.ambient_dim()), threads, cfg.tol);

    bool monotone = true;
    json rows = json::array();
    for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
        json row = json::array();
        for (std::size_t r = 0; r < t.refinements; ++r) {
            row.push_back(t.at(zi, r));
            if (r > 0 && t.at(zi, r) > t.at(zi, r - 1) + 1e-12) monotone = false;
        }
        rows.push_back(row);
    }
    const double final_distance = t.rows.back().srt_distance;
    ExperimentResult r;
    r.verdict = monotone && final_distance <= 1e-6;
    r.summary = {{"torus", torus_model_to_json(m)},
                 {"cells_per_level", cells},
                 {"distances", rows},
                 {"rows_non_increasing", monotone},
                 {"final_distance", final_distance}};
    r.csvs.push_back({"sweep.csv", t.to_csv()});
    return r;
}

ExperimentResult run_lie_rank(const ExperimentConfig& cfg, unsigned) {
    const ControlSystem sys = control_system(cfg.params, cfg.tol);
    const LarcReport rep = larc_verdict(sys, cfg.tol);
    ExperimentResult r;
    r.verdict = rep.strong_controllable;
    r.summary = larc_to_json(rep);
    return r;
}

ExperimentResult run_product_formula(const ExperimentConfig& cfg, unsigned) {
    const json& p = cfg.params;
    const std::string formula = field(p, "formula").is_string() ? p.at("formula").get<std::string>() : "";
    if (formula != "trotter" && formula != "commutator") invalid("field 'formula' must be \"trotter\" or \"commutator\"");
    const Index dim = integer(p, "dim", 1, 256);
    const long pairs = integer(p, "pairs", 1, 1000);
    const double t = positive(p, "t");
    const json& ladder_json = field(p, "ladder");
    if (!ladder_json.is_array() || ladder_json.empty()) invalid("field 'ladder' must be a non-empty array");
    std::vector<long> ladder;
    for (const auto& n : ladder_json) {
        if (!n.is_number_integer() || n.get<long>() < 1) invalid("ladder entries must be positive integers");
        ladder.push_back(n.get<long>());
    }
    bool normalize = false;
    if (p.contains("normalize")) {
        if (!p.at("normalize").is_boolean()) invalid("field 'normalize' must be a boolean");
        normalize = p.at("normalize").get<bool>();
    }
    const ProductFormula kind = formula == "trotter" ? ProductFormula::trotter : ProductFormula::commutator;

    std::mt19937_64 rng(*cfg.seed);
    std::normal_distribution<double> normal;
    auto random_skew = [&] {
        ComplexMatrix a(dim, dim);
        for (Index j = 0; j < dim; ++j)
            for (Index i = 0; i < dim; ++i) {
                const double re = normal(rng);
                a(i, j) = Complex(re, normal(rng));
            }
        ComplexMatrix s = 0.5 * (a - a.adjoint());
        if (normalize) s /= op_norm(s);
        return s;
    };

    ExperimentResult r;
    r.verdict = true;
    json per_pair = json::array();
    std::vector<std::string> lines;
    for (long k = 0; k < pairs; ++k) {
        const ComplexMatrix a = random_skew();
        const ComplexMatrix b = random_skew();
        const auto errs = product_formula_errors(a, b, t, ladder, kind, cfg.tol);
        json e = json::array(), ratios = json::array();
        bool ok = true;
        for (std::size_t i = 0; i < errs.size(); ++i) {
            e.push_back(errs[i].error);
            lines.push_back(std::to_string(k) + "," + std::to_string(errs[i].n) + "," + format_double(errs[i].error));
            if (i == 0) continue;
            const double ratio = errs[i].error / errs[i - 1].error;
            ratios.push_back(ratio);
            // trotter ladders are expected to double n; commutator errors must shrink
            if (kind == ProductFormula::trotter) ok = ok && ratio >= 0.35 && ratio <= 0.65;
            else ok = ok && errs[i].error < errs[i - 1].error;
        }
        r.verdict = r.verdict && ok;
        per_pair.push_back({{"errors", e}, {"ratios", ratios}, {"ok", ok}});
    }
    r.summary = {{"formula", formula}, {"ladder", ladder}, {"pairs", per_pair}};
    r.csvs.push_back({"product_formula.csv", join_csv("pair,n,error", lines)});
    return r;
}

ExperimentResult run_born(const ExperimentConfig& cfg, unsigned) {
    const json& p = cfg.params;
    const BlockAlgebra m = algebra(field(p, "algebra"), cfg.tol);
    const ControlSystem sys = make_control_system(matrix(field(p, "drift"), "drift"), {}, m, cfg.tol);
    const ComplexVector xi = state(field(p, "state"));
    check_unit_state(xi, sys.dim(), cfg.tol);
    const double T = positive(p, "T");
    const int nodes = int(integer(p, "nodes", 3, 1 << 20));
    const json& path_json = field(p, "path");
    if (!path_json.is_object() || !path_json.contains("coefficients") || !path_json.at("coefficients").is_array() ||
        path_json.at("coefficients").empty())
        invalid("field 'path' must be {\"coefficients\": [matrix, ...]}");
    std::vector<ComplexMatrix> coeffs;
    for (const auto& c : path_json.at("coefficients")) {
        coeffs.push_back(matrix(c, "path coefficient"));
        if (coeffs.back().rows() != sys.dim()) invalid("path coefficient dimension does not match the system");
    }
    // V(s) = sum_k s^k C_k, Horner
    const OperatorPath path = [&coeffs](double s) {
        ComplexMatrix v = coeffs.back();
        for (std::size_t k = coeffs.size() - 1; k-- > 0;) v = (s * v + coeffs[k]).eval();
        return v;
    };
    const BornTrajectory b = born_solution(sys, path, xi, T, nodes, cfg.tol);
    const ComplexVector psi = psi_map(sys, path, xi, T, nodes, cfg.tol);

    std::vector<std::string> lines;
    for (Index i = 0; i < xi.size(); ++i)
        lines.push_back(std::to_string(i) + "," + format_double(b.final_state(i).real()) + "," +
                        format_double(b.final_state(i).imag()) + "," + format_double(psi(i).real()) + "," +
                        format_double(psi(i).imag()));
    ExperimentResult r;
    r.verdict = std::isfinite(b.estimated_error);
    r.summary = {{"nodes", b.quadrature_nodes},
                 {"estimated_error", b.estimated_error},
                 {"final_norm", b.final_state.norm()},
                 {"psi_norm", psi.norm()}};
    r.csvs.push_back({"born.csv", join_csv("component,final_re,final_im,psi_re,psi_im", lines)});
    return r;
}

ExperimentResult run_reachable(const ExperimentConfig& cfg, unsigned) {
    const json& p = cfg.params;
    const ControlSystem sys = control_system(p, cfg.tol);
    const ComplexVector xi = state(field(p, "state"));
    check_unit_state(xi, sys.dim(), cfg.tol);
    const double T = positive(p, "T");
    const double bound = number(p, "bound");
    if (bound < 0.0) invalid("field 'bound' must be non-negative");
    const long samples = integer(p, "samples", 1, 100000);

    const auto out = sample_reachable(sys, xi, T, bound, std::size_t(samples), *cfg.seed, cfg.tol);
    double worst_norm = 0.0, worst_affiliation = 0.0;
    for (const auto& s : out) {
        worst_norm = std::max(worst_norm, std::abs(s.final_state.norm() - 1.0));
        worst_affiliation = std::max(worst_affiliation, affiliation_residual(propagate_unitary(sys, s.control, cfg.tol), sys.algebra));
    }
    ExperimentResult r;
    r.verdict = worst_norm <= 1e-9 && worst_affiliation <= cfg.tol.affiliation;
    r.summary = {{"samples", samples},
                 {"max_norm_deviation", worst_norm},
                 {"max_propagator_affiliation_residual", worst_affiliation}};
    r.csvs.push_back({"trajectories.csv", trajectory_csv(out)});
    return r;
}

ExperimentResult run_koopman(const ExperimentConfig& cfg, unsigned) {
    const json& p = cfg.params;
    const TorusModel m = torus(p);
    SampleTimes times;
    if (p.contains("times")) {
        times.times = numbers(p, "times");
    } else {
        times = generic_sample_times(m);
    }
    const BlockAlgebra a = koopman_algebra(m, times.times, cfg.tol);
    const double gen_residual = affiliation_residual(generator(m), a);

    std::vector<std::string> lines;
    std::multiset<Index> mult;
    for (std::size_t k = 0; k < a.blocks().size(); ++k) {
        const Block& b = a.blocks()[k];
        lines.push_back(std::to_string(k) + "," + std::to_string(b.size) + "," + std::to_string(b.multiplicity));
        mult.insert(b.multiplicity);
    }
    ExperimentResult r;
    r.verdict = gen_residual <= cfg.tol.affiliation;
    r.summary = {{"torus", torus_model_to_json(m)},
                 {"times", times.times},
                 {"notes", times.notes},
                 {"block_count", a.blocks().size()},
                 {"multiplicities", std::vector<Index>(mult.begin(), mult.end())},
                 {"algebra_dim", a.algebra_dim()},
                 {"commutant_dim", a.commutant_dim()},
                 {"generator_affiliation_residual", gen_residual},
                 {"generator_affiliated", r.verdict}};
    r.csvs.push_back({"blocks.csv", join_csv("block,size,multiplicity", lines)});
    return r;
}

ExperimentResult run_jaynes_cummings(const ExperimentConfig& cfg, unsigned) {
    const json& p = cfg.params;
    const Index n_max = integer(p, "n_max", 3, 128);
    auto omega = [&](const char* key) { return p.contains(key) ? number(p, key) : 1.0; };
    JaynesCummingsModel m = build_jaynes_cummings(n_max, omega("omega_a"), omega("omega_i"), omega("omega_c"), cfg.tol);
    if (p.contains("interior_levels")) m.interior_levels = integer(p, "interior_levels", 1, n_max);
    const SymmetryReport rep = verify_symmetry(m, cfg.tol);

    std::vector<std::string> lines;
    for (int k = 0; k < 3; ++k) {
        const HamiltonianCheck& c = rep.h[k];
        lines.push_back("H" + std::to_string(k + 1) + "," + format_double(c.interior_residual) + "," +
                        format_double(c.edge_residual) + "," + format_double(c.affiliation_residual) + "," +
                        format_double(c.excitation_residual));
    }
    ExperimentResult r;
    r.verdict = rep.verdict;
    r.summary = symmetry_to_json(rep);
    r.summary["n_max"] = n_max;
    r.summary["interior_levels"] = m.interior_levels;
    r.csvs.push_back({"residuals.csv",
                      join_csv("term,interior_residual,edge_residual,affiliation_residual,excitation_residual", lines)});
    return r;
}

ExperimentResult run_oscillator(const ExperimentConfig& cfg, unsigned) {
    const json& p = cfg.params;
    const Index n_max = integer(p, "n_max", 8, 256);
    const Index interior = p.contains("interior_dim") ? integer(p, "interior_dim", 1, n_max) : 0;
    const OscillatorModel m = build_oscillator(n_max, interior);
    const OscillatorReport rep = verify_oscillator_brackets(m, cfg.tol);
    ExperimentResult r;
    r.verdict = rep.brackets_ok && rep.closure_dim == 4 && rep.commutant_dim == 1;
    r.summary = oscillator_to_json(rep);
    r.summary["n_max"] = n_max;
    r.summary["interior_dim"] = m.interior_dim;
    return r;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) invalid("config must be a JSON object");
    const json& kind_json = field(j, "kind");
    if (!kind_json.is_string()) invalid("field 'kind' must be a string");
    ExperimentConfig cfg;
    cfg.kind = kind_json.get<std::string>();
    const ExperimentKind* kind = find_kind(cfg.kind);
    if (!kind) invalid("unknown experiment kind '" + cfg.kind + "'");

    std::set<std::string> allowed{"kind", "seed", "output_dir", "tolerances"};
    allowed.insert(kind->required.begin(), kind->required.end());
    allowed.insert(kind->optional.begin(), kind->optional.end());
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) invalid("unexpected field '" + key + "' for kind " + cfg.kind);
    for (const auto& key : kind->required)
        if (!j.contains(key)) invalid("missing field '" + key + "' for kind " + cfg.kind);

    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            invalid("field 'seed' must be a non-negative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (kind->randomized && !cfg.seed) invalid("field 'seed' is mandatory for kind " + cfg.kind);
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) invalid("field 'output_dir' must be a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    cfg.tol = default_tolerances();
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (!t.is_object()) invalid("field 'tolerances' must be an object");
        const json known = default_tolerances();
        for (const auto& [key, value] : t.items()) {
            if (!known.contains(key)) invalid("unknown tolerance '" + key + "'");
            if (!value.is_number()) invalid("tolerance '" + key + "' must be a number");
        }
        try {
            from_json(t, cfg.tol);
        } catch (const json::exception& e) {
            invalid(std::string("tolerances: ") + e.what());
        }
    }
    cfg.params = j;
    return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    threads = std::max(1u, threads);
    try {
        if (cfg.kind == "drift-approx") return run_drift_approx(cfg, threads);
        if (cfg.kind == "lie-rank") return run_lie_rank(cfg, threads);
        if (cfg.kind == "product-formula") return run_product_formula(cfg, threads);
        if (cfg.kind == "born") return run_born(cfg, threads);
        if (cfg.kind == "reachable") return run_reachable(cfg, threads);
        if (cfg.kind == "koopman") return run_koopman(cfg, threads);
        if (cfg.kind == "jaynes-cummings") return run_jaynes_cummings(cfg, threads);
        if (cfg.kind == "oscillator") return run_oscillator(cfg, threads);
    } catch (const json::exception& e) {
        invalid(e.what());
    }
    invalid("unknown experiment kind '" + cfg.kind + "'");
}

json result_document(const ExperimentConfig& cfg, const ExperimentResult& r, const std::string& version) {
    json names = json::array();
    for (const auto& a : r.csvs) names.push_back(a.name);
    json doc{{"kind", cfg.kind},
             {"version", version},
             {"tolerances", cfg.tol},
             {"verdict", r.verdict},
             {"summary", r.summary},
             {"artifacts", names}};
    doc["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    return doc;
}

}  // namespace vnlab
