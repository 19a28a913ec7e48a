#include "vnlab/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vnlab/errors.hpp"
#include "vnlab/matrix_io.hpp"

namespace vnlab {

void validate_control(const PiecewiseConstantControl& ctrl, Index control_count) {
    const char* where = "validate_control";
    if (ctrl.values.empty()) throw Error(ErrorKind::BadControl, where, "at least one segment is required");
    if (ctrl.breakpoints.size() != ctrl.values.size() + 1)
        throw Error(ErrorKind::BadControl, where, "need one more breakpoint than segments");
    if (ctrl.breakpoints.front() != 0.0) throw Error(ErrorKind::BadControl, where, "first breakpoint must be 0");
    for (std::size_t k = 1; k < ctrl.breakpoints.size(); ++k)
        if (!(ctrl.breakpoints[k] > ctrl.breakpoints[k - 1]) || !std::isfinite(ctrl.breakpoints[k]))
            throw Error(ErrorKind::BadControl, where, "breakpoints must be strictly increasing");
    if (!(ctrl.bound >= 0.0)) throw Error(ErrorKind::BadControl, where, "bound must be non-negative");
    for (const RealVector& u : ctrl.values) {
        if (u.size() != control_count)
            throw Error(ErrorKind::BadControl, where, "coefficient vector length differs from the control count");
        if (!u.allFinite() || (u.size() > 0 && u.cwiseAbs().maxCoeff() > ctrl.bound))
            throw Error(ErrorKind::BadControl, where, "coefficient exceeds the admissible bound");
    }
}

PiecewiseConstantControl extend_by_zero(const PiecewiseConstantControl& ctrl, double new_final_time) {
    if (!(new_final_time > ctrl.final_time()))
        throw Error(ErrorKind::BadControl, "extend_by_zero", "extension must end after the current final time");
    PiecewiseConstantControl out = ctrl;
    out.breakpoints.push_back(new_final_time);
    out.values.push_back(RealVector::Zero(ctrl.values.front().size()));
    return out;
}

namespace {

void require_unit(const ComplexVector& xi0, Index n, const char* where, const Tolerances& tol) {
    if (xi0.size() != n) throw Error(ErrorKind::InvalidArgument, where, "initial state has the wrong dimension");
    if (std::abs(xi0.norm() - 1.0) > tol.unit_norm)
        throw Error(ErrorKind::InvalidArgument, where, "initial state must have unit norm");
}

ComplexMatrix matrix_power(ComplexMatrix base, unsigned long long k) {
    ComplexMatrix result = ComplexMatrix::Identity(base.rows(), base.cols());
    while (k > 0) {
        if (k & 1ULL) result = result * base;
        k >>= 1ULL;
        if (k > 0) base = base * base;
    }
    return result;
}

// Simpson weights times h/3 applied to samples f(s_k), s_k = k T / (nodes - 1).
template <class F>
ComplexVector simpson(const F& f, double T, int nodes) {
    const double h = T / double(nodes - 1);
    ComplexVector sum = f(0.0) + f(T);
    for (int k = 1; k < nodes - 1; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * f(double(k) * h);
    return (h / 3.0) * sum;
}

struct DriftFlow {
    SpectralDecomposition spectrum;  // of the skew drift, eigenvalues omega of i*omega

    // U^t v = exp(-t drift) v
    ComplexVector apply(double t, const ComplexVector& v) const {
        ComplexVector c = spectrum.unitary.adjoint() * v;
        for (Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * t * spectrum.eigenvalues(k));
        return spectrum.unitary * c;
    }
};

struct BornParts {
    ComplexVector free_part;
    ComplexVector integral;
    double estimated_error = 0.0;
};

BornParts born_parts(const ControlSystem& sys, const OperatorPath& path, const ComplexVector& xi0, double T, int nodes,
                     const Tolerances& tol) {
    const char* where = "born_solution";
    require_unit(xi0, sys.dim(), where, tol);
    if (nodes < 3 || nodes % 2 == 0) throw Error(ErrorKind::InvalidArgument, where, "nodes must be odd and at least 3");
    if (!(T >= 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidArgument, where, "T must be non-negative");

    const DriftFlow flow{eig_hermitian(sys.drift, Symmetry::skew_hermitian, tol)};
    auto integrand = [&](double s) -> ComplexVector {
        const ComplexMatrix v = path(s);
        if (v.rows() != sys.dim() || v.cols() != sys.dim())
            throw Error(ErrorKind::InvalidArgument, where, "path value has the wrong dimension");
        if (affiliation_residual(v, sys.algebra) > tol.affiliation)
            throw Error(ErrorKind::NotAffiliated, where, "path value is not a member of the algebra");
        return flow.apply(T - s, v * flow.apply(s, xi0));
    };

    BornParts out;
    out.free_part = flow.apply(T, xi0);
    if (T == 0.0) {
        out.integral = ComplexVector::Zero(sys.dim());
        return out;
    }
    out.integral = simpson(integrand, T, nodes);
    const ComplexVector fine = simpson(integrand, T, 2 * nodes - 1);
    out.estimated_error = (16.0 / 15.0) * (fine - out.integral).norm();

    // Refinement must shrink the two-grid estimate; compare with the coarser pair.
    if ((nodes - 1) % 4 == 0) {
        const ComplexVector coarse = simpson(integrand, T, (nodes + 1) / 2);
        const double coarse_error = (16.0 / 15.0) * (out.integral - coarse).norm();
        const double floor = 1e-12 * std::max(1.0, out.integral.norm());
        if (out.estimated_error > coarse_error + floor)
            throw Error(ErrorKind::QuadratureDiverged, where,
                        "two-grid error estimate grew from " + format_double(coarse_error) + " to " +
                            format_double(out.estimated_error));
    }
    return out;
}

}  // namespace

ComplexMatrix propagate_unitary(const ControlSystem& sys, const PiecewiseConstantControl& ctrl, const Tolerances& tol) {
    validate_control(ctrl, sys.control_count());
    const Index n = sys.dim();
    ComplexMatrix u = ComplexMatrix::Identity(n, n);
    for (std::size_t s = 0; s < ctrl.segments(); ++s) {
        ComplexMatrix gen = sys.drift;
        for (Index j = 0; j < sys.control_count(); ++j) gen += ctrl.values[s](j) * sys.controls[std::size_t(j)];
        const double dt = ctrl.breakpoints[s + 1] - ctrl.breakpoints[s];
        u = expm_skew(-dt * gen, tol) * u;
    }
    return u;
}

ComplexVector propagate_pwc(const ControlSystem& sys, const PiecewiseConstantControl& ctrl, const ComplexVector& xi0,
                            const Tolerances& tol) {
    require_unit(xi0, sys.dim(), "propagate_pwc", tol);
    return propagate_unitary(sys, ctrl, tol) * xi0;
}

BornTrajectory born_solution(const ControlSystem& sys, const OperatorPath& path, const ComplexVector& xi0, double T,
                             int nodes, const Tolerances& tol) {
    const BornParts p = born_parts(sys, path, xi0, T, nodes, tol);
    return BornTrajectory{p.free_part + p.integral, nodes, p.estimated_error};
}

ComplexVector psi_map(const ControlSystem& sys, const OperatorPath& path, const ComplexVector& xi0, double T,
                      int nodes, const Tolerances& tol) {
    return born_parts(sys, path, xi0, T, nodes, tol).integral;
}

ComplexMatrix trotter_product(const ComplexMatrix& a, const ComplexMatrix& b, double t, long n, const Tolerances& tol) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "trotter_product", "n must be at least 1");
    const double step = t / double(n);
    return matrix_power(expm_skew(step * a, tol) * expm_skew(step * b, tol), static_cast<unsigned long long>(n));
}

ComplexMatrix commutator_product(const ComplexMatrix& a, const ComplexMatrix& b, double t, long n,
                                 const Tolerances& tol) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "commutator_product", "n must be at least 1");
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "commutator_product", "t must be positive");
    const double h = std::sqrt(t) / double(n);
    const ComplexMatrix step = expm_skew(-h * a, tol) * expm_skew(-h * b, tol) * expm_skew(h * a, tol) *
                               expm_skew(h * b, tol);
    return matrix_power(step, static_cast<unsigned long long>(n) * static_cast<unsigned long long>(n));
}

std::vector<ProductFormulaPoint> product_formula_errors(const ComplexMatrix& a, const ComplexMatrix& b, double t,
                                                        const std::vector<long>& ladder, ProductFormula kind,
                                                        const Tolerances& tol) {
    const ComplexMatrix target =
        kind == ProductFormula::trotter ? expm_skew(t * (a + b), tol) : expm_skew(t * bracket(a, b), tol);
    std::vector<ProductFormulaPoint> out;
    for (long n : ladder) {
        const ComplexMatrix approx =
            kind == ProductFormula::trotter ? trotter_product(a, b, t, n, tol) : commutator_product(a, b, t, n, tol);
        out.push_back({n, op_norm(approx - target)});
    }
    return out;
}

std::string product_formula_csv(const std::vector<ProductFormulaPoint>& points) {
    std::string out = "n,error\n";
    for (const auto& p : points) out += std::to_string(p.n) + "," + format_double(p.error) + "\n";
    return out;
}

PiecewiseConstantControl random_control(Index control_count, double T, double bound, std::uint64_t seed) {
    if (!(T > 0.0)) throw Error(ErrorKind::BadControl, "random_control", "T must be positive");
    std::mt19937_64 rng(seed);
    const int segments = std::uniform_int_distribution<int>(1, 8)(rng);
    std::uniform_real_distribution<double> time(0.0, T);
    std::vector<double> cuts;
    while (static_cast<int>(cuts.size()) < segments - 1) {
        const double c = time(rng);
        if (c > 0.0 && std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());

    PiecewiseConstantControl ctrl;
    ctrl.bound = bound;
    ctrl.breakpoints.push_back(0.0);
    ctrl.breakpoints.insert(ctrl.breakpoints.end(), cuts.begin(), cuts.end());
    ctrl.breakpoints.push_back(T);
    std::uniform_real_distribution<double> value(-bound, bound);
    for (int s = 0; s < segments; ++s) {
        RealVector u(control_count);
        for (Index j = 0; j < control_count; ++j) u(j) = bound > 0.0 ? value(rng) : 0.0;
        ctrl.values.push_back(std::move(u));
    }
    return ctrl;
}

std::vector<ReachableSample> sample_reachable(const ControlSystem& sys, const ComplexVector& xi0, double T,
                                              double bound, std::size_t samples, std::uint64_t seed,
                                              const Tolerances& tol) {
    if (samples < 1) throw Error(ErrorKind::InvalidArgument, "sample_reachable", "samples must be at least 1");
    require_unit(xi0, sys.dim(), "sample_reachable", tol);
    std::vector<ReachableSample> out;
    for (std::size_t k = 0; k < samples; ++k) {
        ReachableSample s;
        s.seed = seed + k;
        s.control = random_control(sys.control_count(), T, bound, s.seed);
        s.final_state = propagate_pwc(sys, s.control, xi0, tol);
        out.push_back(std::move(s));
    }
    return out;
}

std::string trajectory_csv(const std::vector<ReachableSample>& samples) {
    std::string out = "seed,segment_count,T";
    const Index n = samples.empty() ? 0 : samples.front().final_state.size();
    for (Index i = 0; i < n; ++i) out += ",final_re_" + std::to_string(i);
    for (Index i = 0; i < n; ++i) out += ",final_im_" + std::to_string(i);
    out += "\n";
    for (const auto& s : samples) {
        out += std::to_string(s.seed) + "," + std::to_string(s.control.segments()) + "," +
               format_double(s.control.final_time());
        for (Index i = 0; i < n; ++i) out += "," + format_double(s.final_state(i).real());
        for (Index i = 0; i < n; ++i) out += "," + format_double(s.final_state(i).imag());
        out += "\n";
    }
    return out;
}

}  // namespace vnlab
