#pragma once

// Dense complex linear algebra shared by every other module: the Jacobi
// Hermitian eigensolver, functional calculus, skew-Hermitian exponentials,
// resolvents, nullspaces and norms.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "vnlab/tolerances.hpp"

namespace vnlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

enum class Symmetry { hermitian, skew_hermitian };

// Eigenvalues are real. For skew-Hermitian input they are the omegas of the
// eigenvalues i*omega.
struct SpectralDecomposition {
    Symmetry symmetry = Symmetry::hermitian;
    RealVector eigenvalues;  // ascending
    ComplexMatrix unitary;   // columns are eigenvectors

    Index dim() const noexcept { return eigenvalues.size(); }

    // U diag(lambda) U*, multiplied back by i for skew decompositions.
    ComplexMatrix reconstruct() const;

    // Orthogonal projector onto the span of the listed eigenvector columns.
    ComplexMatrix projector(const std::vector<Index>& columns) const;
};

// Cyclic complex Jacobi. Throws NotNormal when the input is not
// (skew-)Hermitian to tolerance and NoConvergence after the sweep cap.
SpectralDecomposition eig_hermitian(const ComplexMatrix& a,
                                    Symmetry symmetry = Symmetry::hermitian,
                                    const Tolerances& tol = default_tolerances());

using SpectralFunction = std::function<Complex(double)>;

// U diag(f(lambda_k)) U*. Throws DomainError if f is non-finite (or throws
// std::domain_error) at some eigenvalue.
ComplexMatrix apply_spectral_function(const SpectralDecomposition& s, const SpectralFunction& f);

ComplexMatrix expm_skew(const ComplexMatrix& a, const Tolerances& tol = default_tolerances());

// (a - zI)^{-1}; throws SpectrumHit when z is numerically an eigenvalue.
ComplexMatrix resolvent(const ComplexMatrix& a, Complex z,
                        const Tolerances& tol = default_tolerances());

// HS-orthonormal basis of {X : L vec(X) = 0} for a dim^2 x dim^2 matrix L
// acting on column-major vectorizations.
std::vector<ComplexMatrix> nullspace_basis(const ComplexMatrix& superop,
                                           const Tolerances& tol = default_tolerances());

// Orthonormal columns spanning the kernel of a rectangular matrix.
ComplexMatrix column_nullspace(const ComplexMatrix& m, const Tolerances& tol = default_tolerances());

double op_norm(const ComplexMatrix& a);

// Re Tr(A* B)
double hs_inner_real(const ComplexMatrix& a, const ComplexMatrix& b);

double hs_norm(const ComplexMatrix& a);

// |A - A*|_F for hermitian, |A + A*|_F for skew.
double symmetry_residual(const ComplexMatrix& a, Symmetry symmetry);

bool is_skew_hermitian(const ComplexMatrix& a, const Tolerances& tol = default_tolerances());

// Throws InvalidArgument unless the matrix is square, nonempty and finite.
void require_square(const ComplexMatrix& a, const char* where);

// Matrix of X -> aX - Xa on column-major vec(X).
ComplexMatrix commutator_superoperator(const ComplexMatrix& a);

ComplexVector vectorize(const ComplexMatrix& x);
ComplexMatrix unvectorize(const ComplexVector& v, Index dim);

// Groups consecutive entries of an ascending vector; a new group starts when
// the gap exceeds rel_gap * max(|values|) (or rel_gap when all are zero).
std::vector<std::vector<Index>> cluster_sorted(const RealVector& ascending, double rel_gap);

}  // namespace vnlab
