#pragma once

// Dynamical Lie algebras by bracket closure, and the rank condition against
// u(M) for control systems affiliated with a block algebra.

#include <optional>
#include <vector>

#include <json.hpp>

#include "vnlab/algebra.hpp"
#include "vnlab/lin_core.hpp"

namespace vnlab {

ComplexMatrix bracket(const ComplexMatrix& a, const ComplexMatrix& b);

struct LieOptions {
    // Orthonormal columns Q. When set, inner products and admission are
    // measured on Q* X Q while brackets use the full matrices (truncated
    // models whose edge rows are unreliable).
    std::optional<ComplexMatrix> interior;
    // 0 means the dimension of u(n) for the measured space.
    Index max_dim = 0;
};

struct LieBasis {
    // Orthonormal under hs_inner_real (on the interior when one is set).
    std::vector<ComplexMatrix> elements;
    // Full representatives, equal to elements without an interior frame.
    std::vector<ComplexMatrix> full_elements;
    Index dim_real = 0;
    // False only when max_dim stopped the closure early.
    bool complete = true;
};

// Breadth-first bracket closure with Gram-Schmidt in Re Tr(A*B). A candidate
// is admitted when its residual exceeds tol.lie_admission times its norm.
LieBasis generate_lie_algebra(const std::vector<ComplexMatrix>& gens, const LieOptions& options = {},
                              const Tolerances& tol = default_tolerances());

// Largest norm of the part of [b_i, b_j] outside span(basis), over all pairs.
double closure_residual(const LieBasis& basis, const LieOptions& options = {});

struct ControlSystem {
    ComplexMatrix drift;                  // i V0
    std::vector<ComplexMatrix> controls;  // i V_j
    BlockAlgebra algebra;

    Index dim() const noexcept { return drift.rows(); }
    Index control_count() const noexcept { return static_cast<Index>(controls.size()); }
};

// Checks dimensions, skew-Hermiticity and affiliation (NotAffiliated).
ControlSystem make_control_system(ComplexMatrix drift, std::vector<ComplexMatrix> controls, BlockAlgebra algebra,
                                  const Tolerances& tol = default_tolerances());

struct LarcReport {
    Index dim = 0;
    Index dim_uM = 0;
    bool strong_controllable = false;
    bool is_factor = false;
    bool pure_state_obstruction = false;
    double max_affiliation_residual = 0.0;
};

LarcReport larc_verdict(const ControlSystem& sys, const Tolerances& tol = default_tolerances());

nlohmann::json larc_to_json(const LarcReport& r);

}  // namespace vnlab
