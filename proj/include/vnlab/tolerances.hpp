#pragma once

#include <json.hpp>

namespace vnlab {

// Numerical thresholds used across the library. One record so that
// experiments can report (and override) the full resolved set.
struct Tolerances {
    // Symmetry residual allowed for (skew-)Hermitian inputs, relative to max(1, |A|_F).
    double symmetry = 1e-8;
    // Jacobi stops when the off-diagonal Frobenius norm drops below this times |A|_F.
    double jacobi_offdiag = 1e-12;
    int jacobi_max_sweeps = 100;
    // Minimum distance (relative to max(1, |A|)) between a resolvent point and the spectrum.
    double spectrum_hit = 1e-12;
    // Singular values below this times max(1, sigma_max) span a nullspace.
    double nullspace = 1e-9;
    // Affiliation / membership verdict threshold.
    double affiliation = 1e-8;
    // Relative eigenvalue gap separating clusters in block detection.
    double cluster_gap = 1e-7;
    // Trace weights must sum to one within this.
    double weight_sum = 1e-12;
    // Relative admission threshold for new Lie algebra elements.
    double lie_admission = 1e-7;
    // Spectral clamp slack for q_z inversion.
    double clamp_slack = 1e-9;
    double clamp_overshoot = 1e-6;
    // Compressed eigenvalues below this times 1/(2z) invert to exactly zero.
    double reconstruct_zero = 1e-12;
    // Unit-norm checks on state vectors.
    double unit_norm = 1e-10;
};

const Tolerances& default_tolerances() noexcept;

void to_json(nlohmann::json& j, const Tolerances& t);
// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, Tolerances& t);

}  // namespace vnlab
