#pragma once

// Truncated Jaynes-Cummings model and the harmonic-oscillator example, with
// verifiers that separate the interior of the Fock truncation from its edge.

#include <vector>

#include <json.hpp>

#include "vnlab/algebra.hpp"
#include "vnlab/dyn_lie.hpp"
#include "vnlab/lin_core.hpp"

namespace vnlab {

// Truncated annihilation operator, a(n-1, n) = sqrt(n).
ComplexMatrix annihilation(Index n_max);

// Fock levels kept by default: n < n_max - n_max/4.
Index default_interior_levels(Index n_max);

struct JaynesCummingsModel {
    Index n_max = 0;
    double omega_a = 1.0, omega_i = 1.0, omega_c = 1.0;
    Index interior_levels = 0;
    // C^2 (x) C^{n_max}, coordinate spin * n_max + n
    ComplexMatrix a, h1, h2, h3, v, h_jc;
    BlockAlgebra eigenblock_algebra;

    Index ambient_dim() const noexcept { return 2 * n_max; }
    std::vector<Index> interior_coordinates() const;
    // Orthonormal columns selecting the interior coordinates.
    ComplexMatrix interior_frame() const;
};

// Throws BadCutoff for n_max < 3.
JaynesCummingsModel build_jaynes_cummings(Index n_max, double omega_a, double omega_i, double omega_c,
                                          const Tolerances& tol = default_tolerances());

struct HamiltonianCheck {
    // max over interior eigenprojections P of V of |[H, P]|_op, on the interior compression
    double interior_residual = 0.0;
    // same, for eigenprojections touching excluded Fock levels, on the full truncation
    double edge_residual = 0.0;
    bool verdict = false;
    // affiliation of Q* H Q with the eigenblock algebra of Q* V Q
    double affiliation_residual = 0.0;
    bool affiliated = false;
    // interior residual against the excitation number sigma3/2 (x) 1 + 1 (x) a*a
    double excitation_residual = 0.0;
};

struct SymmetryReport {
    HamiltonianCheck h[3];
    Index closure_dim = 0;
    double closure_affiliation_residual = 0.0;
    bool closure_verdict = false;
    double closure_excitation_residual = 0.0;
    bool interior_ladder_ok = false;
    bool verdict = false;
};

SymmetryReport verify_symmetry(const JaynesCummingsModel& m, const Tolerances& tol = default_tolerances());
nlohmann::json symmetry_to_json(const SymmetryReport& r);

struct OscillatorModel {
    Index n_max = 0;
    Index interior_dim = 0;
    ComplexMatrix x, p, v0, v_plus, v_minus, v1, v2;

    ComplexMatrix interior_frame() const;
};

// Throws BadCutoff for n_max < 8. interior_dim 0 picks the default.
OscillatorModel build_oscillator(Index n_max, Index interior_dim = 0);

struct OscillatorReport {
    double v0_vplus = 0.0;    // |[V0,V+] - V+| / |V+| on the interior
    double v0_vminus = 0.0;   // |[V0,V-] + V-| / |V-|
    double vplus_vminus = 0.0;  // |[V+,V-] + I| / |I|
    double vplus_vminus_i = 0.0;  // |[V+,V-] - iI| / |I|
    double ccr_interior = 0.0;  // |[x,p] - iI| on levels below n_max - 1
    double ccr_corner = 0.0;    // deviation at the top corner entry
    double v1_identity = 0.0;   // |V1 - sqrt2 p|
    double v2_identity = 0.0;   // |V2 + sqrt2 i x|
    Index closure_dim = 0;
    Index commutant_dim = 0;
    double bracket_tolerance = 1e-6;
    bool brackets_ok = false;
};

OscillatorReport verify_oscillator_brackets(const OscillatorModel& m, const Tolerances& tol = default_tolerances());
nlohmann::json oscillator_to_json(const OscillatorReport& r);

}  // namespace vnlab
