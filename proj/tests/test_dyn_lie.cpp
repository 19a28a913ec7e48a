#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vnlab/dyn_lie.hpp"
#include "vnlab/errors.hpp"

using namespace vnlab;
using testsupport::Gen;
using testsupport::pauli_x;
using testsupport::pauli_y;
using testsupport::pauli_z;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

// Dimension of the real span of a list, by rank of the stacked real coordinates.
Index real_rank(const std::vector<ComplexMatrix>& xs) {
    if (xs.empty()) return 0;
    const Index n = xs.front().size();
    Eigen::MatrixXd m(2 * n, Index(xs.size()));
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const ComplexVector v = vectorize(xs[k]);
        m.col(Index(k)) << v.real(), v.imag();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-9);
    return lu.rank();
}

// Brute-force closure oracle: keep bracketing everything until the real rank stops growing.
Index brute_closure_dim(std::vector<ComplexMatrix> span) {
    Index rank = real_rank(span);
    for (;;) {
        std::vector<ComplexMatrix> next = span;
        for (std::size_t i = 0; i < span.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) {
                ComplexMatrix b = bracket(span[i], span[j]);
                if (b.norm() > 1e-12) next.push_back(b / b.norm());
            }
        // keep only an independent subset
        std::vector<ComplexMatrix> kept;
        for (const auto& x : next) {
            kept.push_back(x);
            if (real_rank(kept) < Index(kept.size())) kept.pop_back();
        }
        const Index r = Index(kept.size());
        if (r == rank) return r;
        rank = r;
        span = kept;
    }
}

}  // namespace

TEST_CASE("bracket") {
    Gen g(1);
    const ComplexMatrix a = g.skew(4), b = g.skew(4), c = g.skew(4);
    CHECK(bracket(a, a).norm() == 0.0);
    CHECK((bracket(kI * pauli_x() / 2.0, kI * pauli_y() / 2.0) + kI * pauli_z() / 2.0).norm() < 1e-15);
    CHECK((bracket(2.0 * a + b, c) - 2.0 * bracket(a, c) - bracket(b, c)).norm() < 1e-12);
    CHECK(is_skew_hermitian(bracket(a, b)));
}

TEST_CASE("generate_lie_algebra examples") {
    CHECK(generate_lie_algebra({kI * pauli_z()}).dim_real == 1);
    CHECK(generate_lie_algebra({kI * pauli_x(), kI * pauli_z()}).dim_real == 3);
    CHECK(generate_lie_algebra({kI * testsupport::diag({1, 2}), kI * testsupport::diag({3, 5})}).dim_real == 2);
    CHECK(kind_of([] { generate_lie_algebra({pauli_x()}); }) == ErrorKind::NotNormal);
    CHECK(kind_of([] { generate_lie_algebra({}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("generate_lie_algebra properties") {
    Gen g(314);
    for (int trial = 0; trial < 12; ++trial) {
        const Index n = g.index(2, 4);
        std::vector<ComplexMatrix> gens;
        // sparse-ish generators so the closure is often a proper subalgebra
        const Index count = g.index(1, 3);
        for (Index k = 0; k < count; ++k) {
            ComplexMatrix h = ComplexMatrix::Zero(n, n);
            const Index i = g.index(0, n - 1), j = g.index(0, n - 1);
            h(i, j) += g.complex();
            h(i, i) += g.normal();
            h = 0.5 * (h + h.adjoint()).eval();
            gens.push_back(kI * h);
        }
        const LieBasis basis = generate_lie_algebra(gens);
        CHECK(basis.complete);
        CHECK(basis.dim_real == brute_closure_dim(gens));
        for (std::size_t i = 0; i < basis.elements.size(); ++i) {
            CHECK(is_skew_hermitian(basis.elements[i]));
            for (std::size_t j = 0; j <= i; ++j)
                CHECK(std::abs(hs_inner_real(basis.elements[i], basis.elements[j]) - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
        CHECK(closure_residual(basis) <= 1e-6);
        // idempotence and monotonicity
        CHECK(generate_lie_algebra(basis.elements).dim_real == basis.dim_real);
        auto more = gens;
        more.push_back(g.skew(n));
        CHECK(generate_lie_algebra(more).dim_real >= basis.dim_real);
        // Jacobi identity on basis triples
        if (basis.elements.size() >= 3) {
            const auto& x = basis.elements[0];
            const auto& y = basis.elements[1];
            const auto& z = basis.elements[2];
            const ComplexMatrix jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
            CHECK(jac.norm() <= 1e-8);
        }
    }
}

TEST_CASE("affiliation is preserved by the closure") {
    Gen g(2718);
    for (int trial = 0; trial < 8; ++trial) {
        const std::vector<Block> blocks{{2, 1}, {1, 2}, {2, 2}};
        const BlockAlgebra m =
            make_block_algebra(blocks, BlockAlgebra::counting_weights(blocks), g.permutation(8));
        std::vector<ComplexMatrix> gens;
        for (int k = 0; k < 2; ++k) {
            std::vector<ComplexMatrix> comps;
            for (const auto& b : blocks) comps.push_back(g.skew(b.size));
            gens.push_back(m.assemble(comps));
        }
        const LieBasis basis = generate_lie_algebra(gens);
        for (const auto& b : basis.elements) CHECK(affiliation_residual(b, m) <= 1e-7);
    }
}

TEST_CASE("interior frame closure") {
    // generators that agree on the first two coordinates but differ below
    ComplexMatrix a = ComplexMatrix::Zero(3, 3), b = ComplexMatrix::Zero(3, 3);
    a.topLeftCorner(2, 2) = kI * pauli_z();
    b.topLeftCorner(2, 2) = kI * pauli_z();
    b(2, 2) = kI;
    LieOptions opt;
    opt.interior = ComplexMatrix::Identity(3, 2);
    CHECK(generate_lie_algebra({a, b}).dim_real == 2);
    CHECK(generate_lie_algebra({a, b}, opt).dim_real == 1);
}

TEST_CASE("larc_verdict") {
    const BlockAlgebra m2 = full_matrix_algebra(2);
    const ControlSystem su2 = make_control_system(kI * pauli_x(), {kI * pauli_z(), kI * ComplexMatrix::Identity(2, 2)}, m2);
    const LarcReport r = larc_verdict(su2);
    CHECK(r.dim == 4);
    CHECK(r.dim_uM == 4);
    CHECK(r.strong_controllable);
    CHECK(r.is_factor);
    CHECK_FALSE(r.pure_state_obstruction);
    const auto j = larc_to_json(r);
    CHECK(j.at("strong_controllable") == true);
    CHECK(j.at("dim_uM") == 4);

    const ControlSystem abelian =
        make_control_system(kI * testsupport::diag({1, 2}), {kI * testsupport::diag({3, 5})}, diagonal_algebra(2));
    const LarcReport ra = larc_verdict(abelian);
    CHECK(ra.dim == 2);
    CHECK(ra.strong_controllable);
    CHECK(ra.pure_state_obstruction);

    const ControlSystem short_of =
        make_control_system(kI * testsupport::diag({1, 2, 3, 4}), {}, diagonal_algebra(4));
    CHECK_FALSE(larc_verdict(short_of).strong_controllable);

    CHECK(kind_of([&] { make_control_system(kI * pauli_x(), {}, diagonal_algebra(2)); }) == ErrorKind::NotAffiliated);
    CHECK(kind_of([&] { make_control_system(pauli_z(), {}, diagonal_algebra(2)); }) == ErrorKind::NotNormal);
}
