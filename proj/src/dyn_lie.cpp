#include "vnlab/dyn_lie.hpp"

#include <algorithm>
#include <cmath>

#include "vnlab/errors.hpp"

namespace vnlab {

ComplexMatrix bracket(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorKind::InvalidArgument, "bracket", "operands differ in dimension");
    return a * b - b * a;
}

namespace {

ComplexMatrix measured(const ComplexMatrix& x, const LieOptions& options) {
    if (options.interior) return options.interior->adjoint() * x * (*options.interior);
    return x;
}

struct Closure {
    const LieOptions& options;
    double admission;
    LieBasis basis;

    // Gram-Schmidt against the current basis, applied twice.
    bool admit(ComplexMatrix full) {
        const double full_norm = full.norm();
        if (full_norm == 0.0) return false;
        ComplexMatrix m = measured(full, options);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < basis.elements.size(); ++k) {
                const double c = hs_inner_real(basis.elements[k], m);
                m -= c * basis.elements[k];
                full -= c * basis.full_elements[k];
            }
        const double r = m.norm();
        if (r <= admission * full_norm) return false;
        basis.elements.push_back(m / r);
        basis.full_elements.push_back(full / r);
        return true;
    }
};

}  // namespace

LieBasis generate_lie_algebra(const std::vector<ComplexMatrix>& gens, const LieOptions& options,
                              const Tolerances& tol) {
    if (gens.empty()) throw Error(ErrorKind::InvalidArgument, "generate_lie_algebra", "no generators");
    const Index n = gens.front().rows();
    for (const auto& g : gens) {
        require_square(g, "generate_lie_algebra");
        if (g.rows() != n) throw Error(ErrorKind::InvalidArgument, "generate_lie_algebra", "generators differ in dimension");
        if (!is_skew_hermitian(g, tol))
            throw Error(ErrorKind::NotNormal, "generate_lie_algebra", "generators must be skew-Hermitian");
    }
    const Index measured_dim = options.interior ? options.interior->cols() : n;
    if (options.interior && options.interior->rows() != n)
        throw Error(ErrorKind::InvalidArgument, "generate_lie_algebra", "interior frame has the wrong row count");
    const Index cap = options.max_dim > 0 ? options.max_dim : measured_dim * measured_dim;

    Closure c{options, tol.lie_admission, {}};
    for (const auto& g : gens) {
        const double norm = g.norm();
        if (norm == 0.0) continue;
        c.admit(g / norm);
        if (Index(c.basis.elements.size()) >= cap) break;
    }

    bool capped = Index(c.basis.elements.size()) >= cap;
    for (std::size_t i = 1; i < c.basis.elements.size() && !capped; ++i)
        for (std::size_t j = 0; j < i && !capped; ++j) {
            c.admit(bracket(c.basis.full_elements[i], c.basis.full_elements[j]));
            capped = Index(c.basis.elements.size()) >= cap;
        }

    c.basis.dim_real = Index(c.basis.elements.size());
    // Reaching dim u(n) exhausts the space, so the result is closed anyway.
    c.basis.complete = !capped || c.basis.dim_real >= measured_dim * measured_dim;
    return c.basis;
}

double closure_residual(const LieBasis& basis, const LieOptions& options) {
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.full_elements.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            ComplexMatrix m = measured(bracket(basis.full_elements[i], basis.full_elements[j]), options);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis.elements) m -= hs_inner_real(b, m) * b;
            worst = std::max(worst, m.norm());
        }
    return worst;
}

ControlSystem make_control_system(ComplexMatrix drift, std::vector<ComplexMatrix> controls, BlockAlgebra algebra,
                                  const Tolerances& tol) {
    require_square(drift, "make_control_system");
    const Index n = drift.rows();
    if (n != algebra.ambient_dim())
        throw Error(ErrorKind::InvalidArgument, "make_control_system", "drift and algebra differ in dimension");
    auto check = [&](const ComplexMatrix& a, const std::string& name) {
        require_square(a, "make_control_system");
        if (a.rows() != n) throw Error(ErrorKind::InvalidArgument, "make_control_system", name + " has the wrong dimension");
        if (!is_skew_hermitian(a, tol))
            throw Error(ErrorKind::NotNormal, "make_control_system", name + " is not skew-Hermitian");
        if (!check_affiliated(a, algebra, tol).verdict)
            throw Error(ErrorKind::NotAffiliated, "make_control_system", name + " is not affiliated with the algebra");
    };
    check(drift, "drift");
    for (std::size_t j = 0; j < controls.size(); ++j) check(controls[j], "control " + std::to_string(j + 1));
    return ControlSystem{std::move(drift), std::move(controls), std::move(algebra)};
}

LarcReport larc_verdict(const ControlSystem& sys, const Tolerances& tol) {
    std::vector<ComplexMatrix> gens{sys.drift};
    gens.insert(gens.end(), sys.controls.begin(), sys.controls.end());
    for (std::size_t k = 0; k < gens.size(); ++k)
        if (!check_affiliated(gens[k], sys.algebra, tol).verdict)
            throw Error(ErrorKind::NotAffiliated, "larc_verdict",
                        k == 0 ? "drift is not affiliated" : "control " + std::to_string(k) + " is not affiliated");

    const LieBasis basis = generate_lie_algebra(gens, {}, tol);
    LarcReport r;
    r.dim = basis.dim_real;
    r.dim_uM = sys.algebra.algebra_dim();
    bool all_affiliated = true;
    for (const auto& b : basis.elements) {
        const double res = affiliation_residual(b, sys.algebra);
        r.max_affiliation_residual = std::max(r.max_affiliation_residual, res);
        all_affiliated = all_affiliated && res <= tol.affiliation;
    }
    r.strong_controllable = r.dim == r.dim_uM && all_affiliated;
    const CenterReport center = center_and_factor(sys.algebra);
    r.is_factor = center.is_factor;
    r.pure_state_obstruction = !center.is_factor;
    return r;
}

nlohmann::json larc_to_json(const LarcReport& r) {
    return {{"dim", r.dim},
            {"dim_uM", r.dim_uM},
            {"strong_controllable", r.strong_controllable},
            {"is_factor", r.is_factor},
            {"pure_state_obstruction", r.pure_state_obstruction},
            {"max_affiliation_residual", r.max_affiliation_residual}};
}

}  // namespace vnlab
