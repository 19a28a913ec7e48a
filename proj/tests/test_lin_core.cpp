#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/lin_core.hpp"
#include "vnlab/matrix_io.hpp"

using namespace vnlab;
using testsupport::Gen;

namespace {

ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("eig_hermitian on fixed inputs") {
    SUBCASE("already diagonal") {
        const auto s = eig_hermitian(testsupport::diag({3.0, 1.0}));
        CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
        CHECK(s.eigenvalues(1) == doctest::Approx(3.0));
        CHECK(std::abs(s.unitary(1, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(s.unitary(0, 1)) == doctest::Approx(1.0));
    }
    SUBCASE("sigma_x") {
        const auto s = eig_hermitian(testsupport::pauli_x());
        CHECK(s.eigenvalues(0) == doctest::Approx(-1.0));
        CHECK(s.eigenvalues(1) == doctest::Approx(1.0));
    }
    SUBCASE("zero matrix") {
        const auto s = eig_hermitian(ComplexMatrix::Zero(4, 4));
        CHECK(s.eigenvalues.norm() == 0.0);
        CHECK((s.unitary - identity(4)).norm() == 0.0);
    }
    SUBCASE("skew input stores omegas") {
        Gen g(11);
        const ComplexMatrix a = g.skew(6);
        const auto s = eig_hermitian(a, Symmetry::skew_hermitian);
        for (Index k = 0; k < 6; ++k)
            CHECK((a * s.unitary.col(k) - kI * s.eigenvalues(k) * s.unitary.col(k)).norm() < 1e-10);
        CHECK((s.reconstruct() - a).norm() <= 1e-9 * a.norm());
    }
    SUBCASE("errors") {
        CHECK(kind_of([] { eig_hermitian(testsupport::pauli_y() * kI); }) == ErrorKind::NotNormal);
        CHECK(kind_of([] { eig_hermitian(testsupport::pauli_x(), Symmetry::skew_hermitian); }) ==
              ErrorKind::NotNormal);
        Tolerances t;
        t.jacobi_max_sweeps = 0;
        CHECK(kind_of([&] { eig_hermitian(testsupport::pauli_x(), Symmetry::hermitian, t); }) ==
              ErrorKind::NoConvergence);
    }
}

TEST_CASE("eig_hermitian roundtrip on random Hermitian matrices") {
    Gen g(20240101);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = g.index(1, 32);
        const ComplexMatrix a = g.hermitian(n);
        const auto s = eig_hermitian(a);
        CHECK((s.unitary.adjoint() * s.unitary - identity(n)).norm() <= 1e-10 * std::sqrt(double(n)));
        CHECK((s.reconstruct() - a).norm() <= 1e-9 * a.norm());
        for (Index k = 1; k < n; ++k) CHECK(s.eigenvalues(k - 1) <= s.eigenvalues(k));
        // oracle: Eigen's tridiagonal QR solver
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> oracle(a);
        CHECK((oracle.eigenvalues() - s.eigenvalues).norm() <= 1e-10 * std::max(1.0, a.norm()));
    }
}

TEST_CASE("apply_spectral_function") {
    Gen g(7);
    const ComplexMatrix a = g.hermitian(6);
    const auto s = eig_hermitian(a);
    CHECK((apply_spectral_function(s, [](double x) { return Complex(x); }) - a).norm() < 1e-9 * a.norm());

    const ComplexMatrix k = g.skew(5);
    const auto sk = eig_hermitian(k, Symmetry::skew_hermitian);
    const ComplexMatrix u = apply_spectral_function(sk, [](double w) { return std::exp(kI * w * 0.7); });
    CHECK((u.adjoint() * u - identity(5)).norm() < 1e-10);

    // q_z with z = 0.5 on diag(i): 1/(0.25 + 1) = 0.8
    const auto one = eig_hermitian(testsupport::diag({kI}), Symmetry::skew_hermitian);
    const ComplexMatrix q = apply_spectral_function(one, [](double w) { return kI * w / (0.25 + w * w); });
    CHECK(std::abs(q(0, 0) - Complex(0.0, 0.8)) < 1e-15);

    const ComplexMatrix fa = apply_spectral_function(s, [](double x) { return Complex(std::sin(x)); });
    CHECK((fa * a - a * fa).norm() < 1e-9);

    SUBCASE("homomorphism") {
        auto f = [](double x) { return Complex(std::cos(x), x); };
        auto h = [](double x) { return Complex(x * x - 1.0, 0.5); };
        auto fh = [&](double x) { return f(x) * h(x); };
        CHECK((apply_spectral_function(s, fh) - apply_spectral_function(s, f) * apply_spectral_function(s, h)).norm() <
              1e-9 * std::max(1.0, apply_spectral_function(s, fh).norm()));
    }
    SUBCASE("domain errors") {
        CHECK(kind_of([&] { apply_spectral_function(s, [](double x) { return Complex(1.0 / (x - x)); }); }) ==
              ErrorKind::DomainError);
        CHECK(kind_of([&] {
                  apply_spectral_function(s, [](double) -> Complex { throw std::domain_error("undefined"); });
              }) == ErrorKind::DomainError);
    }
}

TEST_CASE("expm_skew") {
    CHECK((expm_skew(ComplexMatrix::Zero(3, 3)) - identity(3)).norm() == 0.0);
    const ComplexMatrix e = expm_skew(testsupport::diag({kI * std::numbers::pi, -kI * std::numbers::pi}));
    CHECK((e - testsupport::diag({-1.0, -1.0})).norm() < 1e-14);

    Gen g(99);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = g.skew(8);
        const ComplexMatrix u = expm_skew(a);
        CHECK((u.adjoint() * u - identity(8)).norm() <= 1e-9);
        CHECK((u * expm_skew(-a) - identity(8)).norm() <= 1e-9);
        // oracle: spectral route
        const auto s = eig_hermitian(a, Symmetry::skew_hermitian);
        const ComplexMatrix oracle = apply_spectral_function(s, [](double w) { return std::exp(kI * w); });
        CHECK((u - oracle).norm() <= 1e-9);
    }
    CHECK(kind_of([] { expm_skew(testsupport::pauli_x()); }) == ErrorKind::NotNormal);
}

TEST_CASE("resolvent") {
    CHECK((resolvent(ComplexMatrix::Zero(3, 3), -1.0) - identity(3)).norm() < 1e-15);
    CHECK(std::abs(resolvent(testsupport::diag({2.0}), 1.0)(0, 0) - 1.0) < 1e-15);
    CHECK(kind_of([] { resolvent(testsupport::diag({2.0, 3.0}), 3.0); }) == ErrorKind::SpectrumHit);

    Gen g(5);
    const ComplexMatrix a = g.skew(7);
    const double radius = op_norm(a);
    const Complex z = kI * (radius + 0.5);
    CHECK((( a - z * identity(7)) * resolvent(a, z) - identity(7)).norm() < 1e-9);

    SUBCASE("resolvent identity on normal matrices") {
        for (int trial = 0; trial < 10; ++trial) {
            const ComplexMatrix u = g.unitary(6);
            ComplexVector d(6);
            for (Index i = 0; i < 6; ++i) d(i) = g.complex();
            const ComplexMatrix n = u * d.asDiagonal() * u.adjoint();
            const Complex zz(3.5, 0.2), w(-0.3, 3.1);
            const ComplexMatrix rz = resolvent(n, zz), rw = resolvent(n, w);
            CHECK((rz - rw - (zz - w) * rz * rw).norm() <= 1e-8 * std::max(1.0, rz.norm()));
        }
    }
}

TEST_CASE("nullspace_basis") {
    CHECK(nullspace_basis(ComplexMatrix::Zero(4, 4)).size() == 4);
    CHECK(nullspace_basis(identity(4)).empty());

    const ComplexMatrix d = testsupport::diag({1.0, 2.0});
    const auto basis = nullspace_basis(commutator_superoperator(d));
    REQUIRE(basis.size() == 2);
    for (const auto& x : basis) {
        CHECK(std::abs(x(0, 1)) < 1e-12);
        CHECK(std::abs(x(1, 0)) < 1e-12);
        CHECK((d * x - x * d).norm() <= 1e-8);
    }
    CHECK(std::abs((basis[0].adjoint() * basis[1]).trace()) < 1e-12);

    Gen g(3);
    const ComplexMatrix a = g.matrix(5);
    const ComplexMatrix x = g.matrix(5);
    CHECK((unvectorize(commutator_superoperator(a) * vectorize(x), 5) - (a * x - x * a)).norm() < 1e-12);
}

TEST_CASE("norms and inner products") {
    CHECK(op_norm(identity(3)) == doctest::Approx(1.0));
    CHECK(op_norm(testsupport::diag({3.0, -4.0})) == doctest::Approx(4.0));
    CHECK(std::abs(hs_inner_real(kI * testsupport::pauli_x(), kI * testsupport::pauli_y())) < 1e-15);

    Gen g(8);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = g.matrix(6), b = g.matrix(6), c = g.matrix(6);
        CHECK(hs_inner_real(a, b) == doctest::Approx(hs_inner_real(b, a)));
        CHECK(hs_inner_real(a, 2.0 * b + c) == doctest::Approx(2.0 * hs_inner_real(a, b) + hs_inner_real(a, c)));
        Eigen::JacobiSVD<ComplexMatrix> svd(a);
        CHECK(op_norm(a) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
    }
}

TEST_CASE("matrix json roundtrip") {
    Gen g(4);
    const ComplexMatrix a = g.matrix(3);
    const auto j = matrix_to_json(a);
    CHECK(j.at("dim") == 3);
    CHECK(j.at("re").size() == 9);
    CHECK(j.at("re")[1].get<double>() == a(0, 1).real());
    CHECK((matrix_from_json(j) - a).norm() == 0.0);
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("tolerance json keeps defaults for missing keys") {
    nlohmann::json j = {{"affiliation", 1e-6}};
    Tolerances t = j.get<Tolerances>();
    CHECK(t.affiliation == 1e-6);
    CHECK(t.jacobi_max_sweeps == 100);
    nlohmann::json back = t;
    CHECK(back.at("cluster_gap").get<double>() == 1e-7);
}
