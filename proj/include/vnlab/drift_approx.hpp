#pragma once

// Two-parameter approximation of a skew-Hermitian drift: compactify the
// spectrum with q_z(i w) = i w / (z^2 + w^2), compress with a trace-preserving
// conditional expectation, then invert q_z on the branch |w| >= z.

#include <string>
#include <vector>

#include "vnlab/algebra.hpp"
#include "vnlab/lin_core.hpp"

namespace vnlab {

// Scalar maps on the imaginary axis, written on the real coordinate w of i*w.
double q_z(double omega, double z);
// Inverse branch with values in |w| >= z; 0 maps to 0.
double q_z_inverse(double u, double z);

ComplexMatrix q_z_map(const ComplexMatrix& v0, double z, const Tolerances& tol = default_tolerances());

ComplexMatrix compress(const ComplexMatrix& qz, const ConditionalExpectation& e,
                       const Tolerances& tol = default_tolerances());

// Throws ClampExceeded when an eigenvalue of -iC leaves [-1/(2z), 1/(2z)] by
// more than tol.clamp_overshoot.
ComplexMatrix reconstruct(const ComplexMatrix& c, double z, const Tolerances& tol = default_tolerances());

struct DriftApproxParams {
    double z = 1.0;
    ConditionalExpectation expectation;
    std::vector<ComplexVector> probes;
};

ComplexMatrix drift_approximation(const ComplexMatrix& v0, const DriftApproxParams& params,
                                  const Tolerances& tol = default_tolerances());

// max over probes of |(-iA - i)^{-1} xi - (-iB - i)^{-1} xi|.
double srt_probe_distance(const ComplexMatrix& a, const ComplexMatrix& b,
                          const std::vector<ComplexVector>& probes,
                          const Tolerances& tol = default_tolerances());

struct SweepRow {
    double z = 0.0;
    std::size_t refinement_index = 0;
    double srt_distance = 0.0;
};

struct SweepTable {
    std::vector<double> z_grid;
    std::size_t refinements = 0;
    std::vector<SweepRow> rows;  // z outer, refinement inner

    double at(std::size_t z_index, std::size_t refinement) const {
        return rows.at(z_index * refinements + refinement).srt_distance;
    }
    std::string to_csv() const;
};

// chain must be non-empty, each entry refining the previous one, and end
// with the identity expectation. threads == 0 means hardware concurrency.
SweepTable convergence_sweep(const ComplexMatrix& v0, const std::vector<double>& z_grid,
                             const std::vector<ConditionalExpectation>& chain,
                             const std::vector<ComplexVector>& probes, unsigned threads = 1,
                             const Tolerances& tol = default_tolerances());

// Standard basis vectors of C^n.
std::vector<ComplexVector> basis_probes(Index n);

}  // namespace vnlab
