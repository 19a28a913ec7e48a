#include "vnlab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vnlab/errors.hpp"

namespace vnlab {

ComplexMatrix annihilation(Index n_max) {
    ComplexMatrix a = ComplexMatrix::Zero(n_max, n_max);
    for (Index n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

Index default_interior_levels(Index n_max) { return n_max - n_max / 4; }

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix selection_frame(Index n, const std::vector<Index>& coords) {
    ComplexMatrix q = ComplexMatrix::Zero(n, Index(coords.size()));
    for (std::size_t c = 0; c < coords.size(); ++c) q(coords[c], Index(c)) = 1.0;
    return q;
}

// Coordinates of a diagonal operator grouped by (numerically) equal value.
std::vector<std::vector<Index>> level_sets(const RealVector& values, const std::vector<Index>& coords) {
    std::map<long long, std::vector<Index>> groups;
    for (Index c : coords) groups[std::llround(values(c) * 1e6)].push_back(c);
    std::vector<std::vector<Index>> out;
    for (auto& [key, g] : groups) out.push_back(std::move(g));
    return out;
}

// max over level sets of the diagonal `values` (restricted to coords) of |[H, P]|_op,
// with H already expressed on coords (rows/cols in coords order).
double projection_residual(const ComplexMatrix& h, const RealVector& values, const std::vector<Index>& coords) {
    std::vector<Index> position(static_cast<std::size_t>(values.size()), -1);
    for (std::size_t k = 0; k < coords.size(); ++k) position[std::size_t(coords[k])] = Index(k);
    double worst = 0.0;
    for (const auto& set : level_sets(values, coords)) {
        ComplexMatrix p = ComplexMatrix::Zero(h.rows(), h.cols());
        for (Index c : set) p(position[std::size_t(c)], position[std::size_t(c)]) = 1.0;
        worst = std::max(worst, op_norm(h * p - p * h));
    }
    return worst;
}

RealVector real_diagonal(const ComplexMatrix& d) { return d.diagonal().real(); }

}  // namespace

std::vector<Index> JaynesCummingsModel::interior_coordinates() const {
    std::vector<Index> coords;
    for (Index spin = 0; spin < 2; ++spin)
        for (Index n = 0; n < interior_levels; ++n) coords.push_back(spin * n_max + n);
    return coords;
}

ComplexMatrix JaynesCummingsModel::interior_frame() const {
    return selection_frame(ambient_dim(), interior_coordinates());
}

JaynesCummingsModel build_jaynes_cummings(Index n_max, double omega_a, double omega_i, double omega_c,
                                          const Tolerances& tol) {
    if (n_max < 3) throw Error(ErrorKind::BadCutoff, "build_jaynes_cummings", "Fock cutoff must be at least 3");
    for (double w : {omega_a, omega_i, omega_c})
        if (!std::isfinite(w) || w == 0.0)
            throw Error(ErrorKind::InvalidArgument, "build_jaynes_cummings", "frequencies must be finite and non-zero");

    ComplexMatrix s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, -kI, kI, 0;
    s3 << 1, 0, 0, -1;
    const ComplexMatrix s_plus = s1 + kI * s2;
    const ComplexMatrix s_minus = s1 - kI * s2;
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix idf = ComplexMatrix::Identity(n_max, n_max);

    const ComplexMatrix a = annihilation(n_max);
    const ComplexMatrix number = a.adjoint() * a;
    const ComplexMatrix h1 = kron(s3, idf) / 2.0;
    const ComplexMatrix h2 = (kron(s_plus, a) + kron(s_minus, a.adjoint())) / 2.0;
    const ComplexMatrix h3 = kron(id2, number);
    const ComplexMatrix v = kron(s3, idf) + kron(id2, number);
    return JaynesCummingsModel{n_max,
                               omega_a,
                               omega_i,
                               omega_c,
                               default_interior_levels(n_max),
                               a,
                               h1,
                               h2,
                               h3,
                               v,
                               omega_a * h1 + omega_i * h2 + omega_c * h3,
                               eigenspace_algebra(v, tol)};
}

SymmetryReport verify_symmetry(const JaynesCummingsModel& m, const Tolerances& tol) {
    const std::vector<Index> interior = m.interior_coordinates();
    const ComplexMatrix q = m.interior_frame();
    const RealVector v_values = real_diagonal(m.v);
    const RealVector n_values = real_diagonal(m.h1 + m.h3);  // sigma3/2 (x) 1 + 1 (x) a*a

    std::vector<Index> all(static_cast<std::size_t>(m.ambient_dim()));
    for (Index c = 0; c < m.ambient_dim(); ++c) all[std::size_t(c)] = c;
    std::vector<bool> inside(all.size(), false);
    for (Index c : interior) inside[std::size_t(c)] = true;
    std::vector<std::vector<Index>> edge_sets;
    for (const auto& set : level_sets(v_values, all))
        if (std::any_of(set.begin(), set.end(), [&](Index c) { return !inside[std::size_t(c)]; })) edge_sets.push_back(set);

    const ComplexMatrix v_int = q.adjoint() * m.v * q;
    const BlockAlgebra v_blocks = eigenspace_algebra(v_int, tol);
    const BlockAlgebra n_blocks = eigenspace_algebra(q.adjoint() * (m.h1 + m.h3) * q, tol);

    SymmetryReport r;
    const ComplexMatrix* hs[3] = {&m.h1, &m.h2, &m.h3};
    bool all_ok = true;
    for (int k = 0; k < 3; ++k) {
        const ComplexMatrix& h = *hs[k];
        const ComplexMatrix h_int = q.adjoint() * h * q;
        HamiltonianCheck& c = r.h[k];
        c.interior_residual = projection_residual(h_int, v_values, interior);
        for (const auto& set : edge_sets) {
            ComplexMatrix p = ComplexMatrix::Zero(m.ambient_dim(), m.ambient_dim());
            for (Index x : set) p(x, x) = 1.0;
            c.edge_residual = std::max(c.edge_residual, op_norm(h * p - p * h));
        }
        c.verdict = c.interior_residual <= 1e-8;
        c.affiliation_residual = affiliation_residual(h_int, v_blocks);
        c.affiliated = c.affiliation_residual <= tol.affiliation;
        c.excitation_residual = projection_residual(h_int, n_values, interior);
        all_ok = all_ok && c.verdict && c.affiliated;
    }

    LieOptions options;
    options.interior = q;
    const LieBasis closure = generate_lie_algebra({kI * m.h1, kI * m.h2, kI * m.h3}, options, tol);
    r.closure_dim = closure.dim_real;
    for (const auto& b : closure.elements) {
        r.closure_affiliation_residual = std::max(r.closure_affiliation_residual, affiliation_residual(b, v_blocks));
        r.closure_excitation_residual = std::max(r.closure_excitation_residual, affiliation_residual(b, n_blocks));
    }
    r.closure_verdict = r.closure_affiliation_residual <= 1e-7;

    // interior eigenvalues of V are the integers n + 1 (spin up) and n - 1 (spin down)
    const auto s = eig_hermitian(v_int, Symmetry::hermitian, tol);
    std::vector<long long> expected, found;
    for (Index n = 0; n < m.interior_levels; ++n) {
        expected.push_back(n + 1);
        expected.push_back(n - 1);
    }
    std::sort(expected.begin(), expected.end());
    r.interior_ladder_ok = true;
    for (Index k = 0; k < s.dim(); ++k) {
        const double lambda = s.eigenvalues(k);
        if (std::abs(lambda - std::round(lambda)) > 1e-9) r.interior_ladder_ok = false;
        found.push_back(std::llround(lambda));
    }
    r.interior_ladder_ok = r.interior_ladder_ok && found == expected;
    r.verdict = all_ok && r.closure_verdict && r.interior_ladder_ok;
    return r;
}

nlohmann::json symmetry_to_json(const SymmetryReport& r) {
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& c : r.h)
        hs.push_back({{"interior_residual", c.interior_residual},
                      {"edge_residual", c.edge_residual},
                      {"verdict", c.verdict},
                      {"affiliation_residual", c.affiliation_residual},
                      {"affiliated", c.affiliated},
                      {"excitation_number_residual", c.excitation_residual}});
    double edge = 0.0;
    for (const auto& c : r.h) edge = std::max(edge, c.edge_residual);
    return {{"hamiltonians", hs},
            {"edge_residual", edge},
            {"dim", r.closure_dim},
            {"closure_affiliation_residual", r.closure_affiliation_residual},
            {"closure_verdict", r.closure_verdict},
            {"closure_excitation_number_residual", r.closure_excitation_residual},
            {"interior_ladder_ok", r.interior_ladder_ok},
            {"verdict", r.verdict}};
}

ComplexMatrix OscillatorModel::interior_frame() const {
    std::vector<Index> coords;
    for (Index n = 0; n < interior_dim; ++n) coords.push_back(n);
    return selection_frame(n_max, coords);
}

OscillatorModel build_oscillator(Index n_max, Index interior_dim) {
    if (n_max < 8) throw Error(ErrorKind::BadCutoff, "build_oscillator", "Fock cutoff must be at least 8");
    if (interior_dim == 0) interior_dim = default_interior_levels(n_max);
    if (interior_dim < 1 || interior_dim > n_max)
        throw Error(ErrorKind::InvalidArgument, "build_oscillator", "interior dimension out of range");
    OscillatorModel m;
    m.n_max = n_max;
    m.interior_dim = interior_dim;
    const ComplexMatrix a = annihilation(n_max);
    const double r2 = std::sqrt(2.0);
    m.x = (a + a.adjoint()) / r2;
    m.p = kI * (a.adjoint() - a) / r2;
    m.v0 = -(kI / 2.0) * (m.p * m.p - m.x * m.x);
    m.v_plus = (m.p - m.x) / r2;
    m.v_minus = -(m.p + m.x) / r2;
    m.v1 = m.v_plus - m.v_minus;
    m.v2 = kI * (m.v_plus + m.v_minus);
    return m;
}

OscillatorReport verify_oscillator_brackets(const OscillatorModel& m, const Tolerances& tol) {
    const ComplexMatrix q = m.interior_frame();
    auto inner = [&](const ComplexMatrix& x) -> ComplexMatrix { return q.adjoint() * x * q; };
    auto rel = [&](const ComplexMatrix& residual, const ComplexMatrix& scale) {
        return inner(residual).norm() / inner(scale).norm();
    };
    const ComplexMatrix id = ComplexMatrix::Identity(m.n_max, m.n_max);

    OscillatorReport r;
    r.v0_vplus = rel(bracket(m.v0, m.v_plus) - m.v_plus, m.v_plus);
    r.v0_vminus = rel(bracket(m.v0, m.v_minus) + m.v_minus, m.v_minus);
    r.vplus_vminus = rel(bracket(m.v_plus, m.v_minus) + id, id);
    r.vplus_vminus_i = rel(bracket(m.v_plus, m.v_minus) - kI * id, id);

    const ComplexMatrix ccr = bracket(m.x, m.p) - kI * id;
    r.ccr_interior = ccr.topLeftCorner(m.n_max - 1, m.n_max - 1).norm();
    r.ccr_corner = std::abs(ccr(m.n_max - 1, m.n_max - 1));
    r.v1_identity = (m.v1 - (2.0 / std::sqrt(2.0)) * m.p).norm();
    r.v2_identity = (m.v2 + (2.0 * kI / std::sqrt(2.0)) * m.x).norm();

    LieOptions options;
    options.interior = q;
    r.closure_dim = generate_lie_algebra({m.v0, kI * m.v1, m.v2}, options, tol).dim_real;

    const auto sx = eig_hermitian(inner(m.x), Symmetry::hermitian, tol);
    const auto sp = eig_hermitian(inner(m.p), Symmetry::hermitian, tol);
    std::vector<ComplexMatrix> samples;
    for (double t : {0.1, 0.25}) {
        samples.push_back(apply_spectral_function(sx, [t](double l) { return Complex(std::exp(t * l)); }));
        samples.push_back(apply_spectral_function(sp, [t](double l) { return Complex(std::exp(t * l)); }));
    }
    r.commutant_dim = Index(commutant(samples, tol).size());
    r.brackets_ok = r.v0_vplus <= r.bracket_tolerance && r.v0_vminus <= r.bracket_tolerance &&
                    r.vplus_vminus <= r.bracket_tolerance;
    return r;
}

nlohmann::json oscillator_to_json(const OscillatorReport& r) {
    return {{"v0_vplus_relative_error", r.v0_vplus},
            {"v0_vminus_relative_error", r.v0_vminus},
            {"vplus_vminus_plus_identity_relative_error", r.vplus_vminus},
            {"vplus_vminus_minus_i_identity_relative_error", r.vplus_vminus_i},
            {"ccr_interior_residual", r.ccr_interior},
            {"edge_residual", r.ccr_corner},
            {"v1_identity_residual", r.v1_identity},
            {"v2_identity_residual", r.v2_identity},
            {"dim", r.closure_dim},
            {"commutant_dim", r.commutant_dim},
            {"brackets_ok", r.brackets_ok}};
}

}  // namespace vnlab
