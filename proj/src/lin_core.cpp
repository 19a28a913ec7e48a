#include "vnlab/lin_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "vnlab/errors.hpp"

namespace vnlab {

namespace {

double frobenius_offdiag(const ComplexMatrix& a) {
    double s = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// One two-sided rotation zeroing a(p,q) of a Hermitian matrix; v accumulates
// the eigenvectors. The rotation is D R D* with D = diag(1, e^{-i phi}) and R
// the real symmetric Jacobi rotation for |a_pq|.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, Index p, Index q) {
    const Complex apq = a(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;
    const Complex phase = apq / mag;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double theta = (aqq - app) / (2.0 * mag);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const Complex jpq = s * phase;             // J(p,q)
    const Complex jqp = -s * std::conj(phase);  // J(q,p)

    // columns: A <- A J
    for (Index k = 0; k < a.rows(); ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * c + akq * jqp;
        a(k, q) = akp * jpq + akq * c;
    }
    // rows: A <- J* A
    for (Index k = 0; k < a.cols(); ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = c * apk + std::conj(jqp) * aqk;
        a(q, k) = std::conj(jpq) * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();

    for (Index k = 0; k < v.rows(); ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * c + vkq * jqp;
        v(k, q) = vkp * jpq + vkq * c;
    }
}

}  // namespace

void require_square(const ComplexMatrix& a, const char* where) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw Error(ErrorKind::InvalidArgument, where,
                    "expected a nonempty square matrix, got " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
    if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, where, "matrix has non-finite entries");
}

double symmetry_residual(const ComplexMatrix& a, Symmetry symmetry) {
    if (symmetry == Symmetry::hermitian) return (a - a.adjoint()).norm();
    return (a + a.adjoint()).norm();
}

bool is_skew_hermitian(const ComplexMatrix& a, const Tolerances& tol) {
    return a.rows() == a.cols() &&
           symmetry_residual(a, Symmetry::skew_hermitian) <= tol.symmetry * std::max(1.0, a.norm());
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
    ComplexMatrix out = unitary * eigenvalues.cast<Complex>().asDiagonal() * unitary.adjoint();
    if (symmetry == Symmetry::skew_hermitian) out *= kI;
    return out;
}

ComplexMatrix SpectralDecomposition::projector(const std::vector<Index>& columns) const {
    ComplexMatrix p = ComplexMatrix::Zero(dim(), dim());
    for (Index c : columns) p.noalias() += unitary.col(c) * unitary.col(c).adjoint();
    return p;
}

SpectralDecomposition eig_hermitian(const ComplexMatrix& input, Symmetry symmetry, const Tolerances& tol) {
    require_square(input, "eig_hermitian");
    const double scale = input.norm();
    if (symmetry_residual(input, symmetry) > tol.symmetry * std::max(1.0, scale))
        throw Error(ErrorKind::NotNormal, "eig_hermitian",
                    symmetry == Symmetry::hermitian ? "input is not Hermitian" : "input is not skew-Hermitian");

    const Index n = input.rows();
    ComplexMatrix a = symmetry == Symmetry::hermitian ? ComplexMatrix(input) : ComplexMatrix(-kI * input);
    a = 0.5 * (a + a.adjoint()).eval();
    ComplexMatrix v = ComplexMatrix::Identity(n, n);

    const double target = tol.jacobi_offdiag * scale;
    bool converged = frobenius_offdiag(a) <= target;
    for (int sweep = 0; sweep < tol.jacobi_max_sweeps && !converged; ++sweep) {
        for (Index p = 0; p < n - 1; ++p)
            for (Index q = p + 1; q < n; ++q)
                if (std::abs(a(p, q)) > 0.0) jacobi_rotate(a, v, p, q);
        converged = frobenius_offdiag(a) <= target;
    }
    if (!converged)
        throw Error(ErrorKind::NoConvergence, "eig_hermitian",
                    "off-diagonal mass above threshold after " + std::to_string(tol.jacobi_max_sweeps) +
                        " sweeps");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index x, Index y) { return a(x, x).real() < a(y, y).real(); });

    SpectralDecomposition out;
    out.symmetry = symmetry;
    out.eigenvalues.resize(n);
    out.unitary.resize(n, n);
    for (Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = a(order[k], order[k]).real();
        out.unitary.col(k) = v.col(order[k]);
    }
    return out;
}

ComplexMatrix apply_spectral_function(const SpectralDecomposition& s, const SpectralFunction& f) {
    ComplexVector values(s.dim());
    for (Index k = 0; k < s.dim(); ++k) {
        Complex fk;
        try {
            fk = f(s.eigenvalues(k));
        } catch (const std::domain_error& e) {
            throw Error(ErrorKind::DomainError, "apply_spectral_function", e.what());
        }
        if (!std::isfinite(fk.real()) || !std::isfinite(fk.imag()))
            throw Error(ErrorKind::DomainError, "apply_spectral_function",
                        "function undefined at eigenvalue " + std::to_string(s.eigenvalues(k)));
        values(k) = fk;
    }
    return s.unitary * values.asDiagonal() * s.unitary.adjoint();
}

ComplexMatrix expm_skew(const ComplexMatrix& a, const Tolerances& tol) {
    require_square(a, "expm_skew");
    if (!is_skew_hermitian(a, tol)) throw Error(ErrorKind::NotNormal, "expm_skew", "input is not skew-Hermitian");
    const ComplexMatrix skew = 0.5 * (a - a.adjoint());
    return skew.exp();
}

ComplexMatrix resolvent(const ComplexMatrix& a, Complex z, const Tolerances& tol) {
    require_square(a, "resolvent");
    const Index n = a.rows();
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NoConvergence, "resolvent", "eigenvalue computation failed");
    const double threshold = tol.spectrum_hit * std::max(1.0, a.norm());
    for (Index k = 0; k < n; ++k)
        if (std::abs(solver.eigenvalues()(k) - z) <= threshold)
            throw Error(ErrorKind::SpectrumHit, "resolvent", "resolvent point lies on the spectrum");
    const ComplexMatrix shifted = a - z * ComplexMatrix::Identity(n, n);
    return shifted.partialPivLu().solve(ComplexMatrix::Identity(n, n));
}

ComplexMatrix column_nullspace(const ComplexMatrix& m, const Tolerances& tol) {
    const Index k = m.cols();
    if (k == 0) return ComplexMatrix(0, 0);
    if (m.rows() == 0) return ComplexMatrix::Identity(k, k);
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const RealVector& sigma = svd.singularValues();
    const double threshold = tol.nullspace * std::max(1.0, sigma.size() > 0 ? sigma(0) : 0.0);
    Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > threshold) ++rank;
    return svd.matrixV().rightCols(k - rank);
}

std::vector<ComplexMatrix> nullspace_basis(const ComplexMatrix& superop, const Tolerances& tol) {
    if (superop.rows() != superop.cols())
        throw Error(ErrorKind::InvalidArgument, "nullspace_basis", "superoperator must be square");
    const auto dim = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(superop.rows()))));
    if (dim * dim != superop.rows())
        throw Error(ErrorKind::InvalidArgument, "nullspace_basis", "size is not a perfect square");
    const ComplexMatrix kernel = column_nullspace(superop, tol);
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(kernel.cols()));
    for (Index c = 0; c < kernel.cols(); ++c) out.push_back(unvectorize(kernel.col(c), dim));
    return out;
}

double op_norm(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    const ComplexMatrix gram = a.adjoint() * a;
    const SpectralDecomposition s = eig_hermitian(0.5 * (gram + gram.adjoint()), Symmetry::hermitian);
    return std::sqrt(std::max(0.0, s.eigenvalues(s.dim() - 1)));
}

double hs_inner_real(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

ComplexMatrix commutator_superoperator(const ComplexMatrix& a) {
    const Index n = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix out = ComplexMatrix::Zero(n * n, n * n);
    // vec(aX) = (I (x) a) vec X, vec(Xa) = (a^T (x) I) vec X
    for (Index j = 0; j < n; ++j)
        for (Index l = 0; l < n; ++l) {
            out.block(j * n, l * n, n, n) = (j == l ? a : ComplexMatrix::Zero(n, n)) - a(l, j) * id;
        }
    return out;
}

ComplexVector vectorize(const ComplexMatrix& x) {
    return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, Index dim) {
    return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

std::vector<std::vector<Index>> cluster_sorted(const RealVector& ascending, double rel_gap) {
    std::vector<std::vector<Index>> groups;
    if (ascending.size() == 0) return groups;
    const double scale = std::max(ascending.cwiseAbs().maxCoeff(), 1e-300);
    const double gap = ascending.cwiseAbs().maxCoeff() > 0.0 ? rel_gap * scale : rel_gap;
    groups.push_back({0});
    for (Index k = 1; k < ascending.size(); ++k) {
        if (ascending(k) - ascending(k - 1) > gap)
            groups.push_back({k});
        else
            groups.back().push_back(k);
    }
    return groups;
}

}  // namespace vnlab
