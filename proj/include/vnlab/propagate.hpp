#pragma once

// Time evolution for bilinear systems (hbar = 1): piecewise-constant control
// flows, the first-order inhomogeneous (Born) solution and its control-to-state
// map, product formulas, and reachable-set sampling.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vnlab/dyn_lie.hpp"
#include "vnlab/lin_core.hpp"

namespace vnlab {

struct PiecewiseConstantControl {
    std::vector<double> breakpoints;  // 0 = t0 < t1 < ... < tm = T
    std::vector<RealVector> values;   // one coefficient vector per segment
    double bound = 0.0;

    std::size_t segments() const noexcept { return values.size(); }
    double final_time() const { return breakpoints.back(); }
};

// Throws BadControl unless the invariants hold for control_count controls.
void validate_control(const PiecewiseConstantControl& ctrl, Index control_count);

// Appends a zero segment up to new_final_time (> T).
PiecewiseConstantControl extend_by_zero(const PiecewiseConstantControl& ctrl, double new_final_time);

// prod over segments of exp(-dt (drift + sum_j u_j controls_j)), latest on the left.
ComplexMatrix propagate_unitary(const ControlSystem& sys, const PiecewiseConstantControl& ctrl,
                                const Tolerances& tol = default_tolerances());
ComplexVector propagate_pwc(const ControlSystem& sys, const PiecewiseConstantControl& ctrl, const ComplexVector& xi0,
                            const Tolerances& tol = default_tolerances());

using OperatorPath = std::function<ComplexMatrix(double)>;

struct BornTrajectory {
    ComplexVector final_state;
    int quadrature_nodes = 0;
    double estimated_error = 0.0;
};

// U^T xi0 + int_0^T U^{T-s} V(s) U^s xi0 ds with U^t = exp(-t drift), by
// composite Simpson on `nodes` points (odd, >= 3). The error estimate is the
// Richardson difference against the grid with halved spacing.
BornTrajectory born_solution(const ControlSystem& sys, const OperatorPath& path, const ComplexVector& xi0, double T,
                             int nodes, const Tolerances& tol = default_tolerances());
// Integral term only.
ComplexVector psi_map(const ControlSystem& sys, const OperatorPath& path, const ComplexVector& xi0, double T,
                      int nodes, const Tolerances& tol = default_tolerances());

// (e^{ta/n} e^{tb/n})^n
ComplexMatrix trotter_product(const ComplexMatrix& a, const ComplexMatrix& b, double t, long n,
                              const Tolerances& tol = default_tolerances());
// (e^{-ha} e^{-hb} e^{ha} e^{hb})^{n^2} with h = sqrt(t)/n, converging to e^{t[a,b]}.
ComplexMatrix commutator_product(const ComplexMatrix& a, const ComplexMatrix& b, double t, long n,
                                 const Tolerances& tol = default_tolerances());

enum class ProductFormula { trotter, commutator };

struct ProductFormulaPoint {
    long n = 0;
    double error = 0.0;
};

// Operator-norm distance to e^{t(a+b)} (trotter) or e^{t[a,b]} (commutator).
std::vector<ProductFormulaPoint> product_formula_errors(const ComplexMatrix& a, const ComplexMatrix& b, double t,
                                                        const std::vector<long>& ladder, ProductFormula kind,
                                                        const Tolerances& tol = default_tolerances());
std::string product_formula_csv(const std::vector<ProductFormulaPoint>& points);

struct ReachableSample {
    std::uint64_t seed = 0;
    PiecewiseConstantControl control;
    ComplexVector final_state;
};

// Random admissible controls: 1-8 segments at sorted uniform cut points,
// values uniform in [-bound, bound]. Sample k uses seed + k.
PiecewiseConstantControl random_control(Index control_count, double T, double bound, std::uint64_t seed);

std::vector<ReachableSample> sample_reachable(const ControlSystem& sys, const ComplexVector& xi0, double T,
                                              double bound, std::size_t samples, std::uint64_t seed,
                                              const Tolerances& tol = default_tolerances());
std::string trajectory_csv(const std::vector<ReachableSample>& samples);

}  // namespace vnlab
