#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/propagate.hpp"

using namespace vnlab;
using testsupport::Gen;

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

PiecewiseConstantControl one_segment(double T, std::initializer_list<double> u, double bound) {
    RealVector v(Index(u.size()));
    Index k = 0;
    for (double x : u) v(k++) = x;
    return PiecewiseConstantControl{{0.0, T}, {v}, bound};
}

ControlSystem random_system(Gen& g, Index n, Index controls) {
    std::vector<ComplexMatrix> cs;
    for (Index j = 0; j < controls; ++j) cs.push_back(g.skew(n));
    return make_control_system(g.skew(n), cs, full_matrix_algebra(n));
}

// Block-diagonal system on a two-block algebra.
ControlSystem block_system(Gen& g) {
    const std::vector<Block> blocks{{2, 1}, {1, 2}};
    const BlockAlgebra m = make_block_algebra(blocks, BlockAlgebra::counting_weights(blocks), g.permutation(4));
    auto member = [&] {
        std::vector<ComplexMatrix> comps{g.skew(2), g.skew(1)};
        return m.assemble(comps);
    };
    return make_control_system(member(), {member(), member()}, m);
}

}  // namespace

TEST_CASE("propagate_pwc") {
    Gen g(1);
    const ControlSystem sys = random_system(g, 4, 1);
    const ComplexVector xi = g.unit_vector(4);
    const ComplexVector zero = propagate_pwc(sys, one_segment(0.8, {0.0}, 1.0), xi);
    CHECK((zero - expm_skew(-0.8 * sys.drift) * xi).norm() < 1e-12);

    const ControlSystem pauli =
        make_control_system(ComplexMatrix::Zero(2, 2), {kI * testsupport::pauli_x()}, full_matrix_algebra(2));
    const ComplexVector out =
        propagate_pwc(pauli, one_segment(1.0, {std::numbers::pi / 2}, 2.0), ComplexVector::Unit(2, 0));
    CHECK(std::abs(out(0)) < 1e-14);
    CHECK(std::abs(out(1) + kI) < 1e-14);

    for (int trial = 0; trial < 100; ++trial) {
        const auto ctrl = random_control(1, 2.0, 3.0, 1000 + trial);
        CHECK(std::abs(propagate_pwc(sys, ctrl, xi).norm() - 1.0) < 1e-9);
    }

    SUBCASE("segment unitaries are affiliated") {
        const ControlSystem bs = block_system(g);
        for (int trial = 0; trial < 10; ++trial) {
            const auto ctrl = random_control(2, 1.5, 2.0, 77 + trial);
            CHECK(check_affiliated(propagate_unitary(bs, ctrl), bs.algebra).verdict);
        }
    }
    SUBCASE("control validation") {
        CHECK(kind_of([&] { propagate_pwc(sys, one_segment(1.0, {2.0}, 1.0), xi); }) == ErrorKind::BadControl);
        CHECK(kind_of([&] { propagate_pwc(sys, PiecewiseConstantControl{{0.0, 1.0, 1.0}, {RealVector::Zero(1), RealVector::Zero(1)}, 1.0}, xi); }) ==
              ErrorKind::BadControl);
        CHECK(kind_of([&] { propagate_pwc(sys, one_segment(1.0, {0.0, 0.0}, 1.0), xi); }) == ErrorKind::BadControl);
        CHECK(kind_of([&] { propagate_pwc(sys, PiecewiseConstantControl{{0.0}, {}, 1.0}, xi); }) == ErrorKind::BadControl);
        CHECK(kind_of([&] { propagate_pwc(sys, one_segment(1.0, {0.0}, 1.0), 2.0 * xi); }) == ErrorKind::InvalidArgument);
    }
}

TEST_CASE("born_solution and psi_map") {
    Gen g(2);
    const ControlSystem sys = random_system(g, 4, 0);
    const ComplexVector xi = g.unit_vector(4);
    const OperatorPath zero_path = [](double) { return ComplexMatrix::Zero(4, 4); };
    const BornTrajectory free = born_solution(sys, zero_path, xi, 1.3, 5);
    CHECK((free.final_state - expm_skew(-1.3 * sys.drift) * xi).norm() < 1e-12);
    CHECK(psi_map(sys, zero_path, xi, 1.3, 5).norm() == 0.0);

    const ControlSystem still = make_control_system(ComplexMatrix::Zero(4, 4), {}, full_matrix_algebra(4));
    const ComplexMatrix v = g.matrix(4);
    const BornTrajectory lin = born_solution(still, [&](double) { return v; }, xi, 0.7, 3);
    CHECK((lin.final_state - (xi + 0.7 * v * xi)).norm() < 1e-13);

    SUBCASE("dense-grid oracle for V(s) = s D") {
        const ControlSystem diag_sys = make_control_system(
            kI * testsupport::diag({0.3, -1.1, 2.0, 0.7}), {}, diagonal_algebra(4));
        const ComplexMatrix d = testsupport::diag({1.0, -2.0, 0.5, 3.0});
        const OperatorPath path = [&](double s) { return ComplexMatrix(s * d); };
        const ComplexVector phi = psi_map(diag_sys, path, xi, 1.0, 129);
        // oracle: 1e5-point midpoint rule on the same integrand, computed entrywise
        const int m = 100000;
        ComplexVector oracle = ComplexVector::Zero(4);
        const double w[4] = {0.3, -1.1, 2.0, 0.7};
        for (int k = 0; k < m; ++k) {
            const double s = (k + 0.5) / m;
            for (Index i = 0; i < 4; ++i)
                oracle(i) += std::exp(-kI * (1.0 - s) * w[i]) * s * d(i, i) * std::exp(-kI * s * w[i]) * xi(i) / double(m);
        }
        CHECK((phi - oracle).norm() <= 1e-8);
    }
    SUBCASE("error estimate shrinks by about 16 under doubling") {
        const ComplexMatrix h = g.hermitian(4);
        const OperatorPath path = [&](double s) { return ComplexMatrix(std::sin(3.0 * s) * h); };
        const BornTrajectory coarse = born_solution(sys, path, xi, 2.0, 17);
        const BornTrajectory fine = born_solution(sys, path, xi, 2.0, 33);
        CHECK(fine.estimated_error / coarse.estimated_error <= 0.2);
        CHECK(fine.estimated_error / coarse.estimated_error >= 0.03);
        CHECK(fine.quadrature_nodes == 33);
    }
    SUBCASE("convex-linearity and scaling") {
        for (int trial = 0; trial < 5; ++trial) {
            const ComplexMatrix a = g.hermitian(4), b = g.hermitian(4);
            const OperatorPath p = [&](double s) { return ComplexMatrix(std::cos(s) * a); };
            const OperatorPath q = [&](double s) { return ComplexMatrix(s * s * b); };
            const double theta = g.uniform(0, 1);
            const OperatorPath mix = [&](double s) { return ComplexMatrix(theta * p(s) + (1 - theta) * q(s)); };
            const OperatorPath twice = [&](double s) { return ComplexMatrix(2.0 * p(s)); };
            const ComplexVector pp = psi_map(sys, p, xi, 1.0, 21), pq = psi_map(sys, q, xi, 1.0, 21);
            CHECK((psi_map(sys, mix, xi, 1.0, 21) - theta * pp - (1 - theta) * pq).norm() <= 1e-10);
            CHECK((psi_map(sys, twice, xi, 1.0, 21) - 2.0 * pp).norm() <= 1e-10);
        }
    }
    SUBCASE("errors") {
        CHECK(kind_of([&] { born_solution(sys, zero_path, xi, 1.0, 4); }) == ErrorKind::InvalidArgument);
        CHECK(kind_of([&] { born_solution(sys, zero_path, xi, 1.0, 1); }) == ErrorKind::InvalidArgument);
        const ControlSystem ds = make_control_system(ComplexMatrix::Zero(2, 2), {}, diagonal_algebra(2));
        CHECK(kind_of([&] {
                  born_solution(ds, [](double) { return testsupport::pauli_x(); }, ComplexVector::Unit(2, 0), 1.0, 5);
              }) == ErrorKind::NotAffiliated);
        // a path with a kink the coarse grid straddles makes the estimate grow
        const ComplexMatrix h = g.hermitian(4);
        const OperatorPath rough = [&](double s) {
            return ComplexMatrix((s < 0.5 + 1e-3 ? 0.0 : 1.0) * std::sin(4000.0 * s) * h);
        };
        bool diverged = false;
        for (int nodes : {5, 9, 17, 33, 65}) {
            try {
                born_solution(sys, rough, xi, 1.0, nodes);
            } catch (const Error& e) {
                diverged = diverged || e.kind() == ErrorKind::QuadratureDiverged;
            }
        }
        CHECK(diverged);
    }
}

TEST_CASE("trotter_product") {
    Gen g(3);
    const ComplexMatrix d1 = kI * testsupport::diag({0.3, -1.0, 2.0});
    const ComplexMatrix d2 = kI * testsupport::diag({1.5, 0.2, -0.7});
    for (long n : {1L, 3L, 10L}) CHECK((trotter_product(d1, d2, 1.0, n) - expm_skew(d1 + d2)).norm() < 1e-10);
    const ComplexMatrix b = g.skew(3);
    for (long n : {1L, 4L}) CHECK((trotter_product(ComplexMatrix::Zero(3, 3), b, 0.6, n) - expm_skew(0.6 * b)).norm() < 1e-10);

    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix a = g.skew(8), c = g.skew(8);
        const auto errs = product_formula_errors(a, c, 1.0, {8, 16, 32, 64}, ProductFormula::trotter);
        for (std::size_t k = 1; k < errs.size(); ++k) {
            const double ratio = errs[k].error / errs[k - 1].error;
            CHECK(ratio >= 0.35);
            CHECK(ratio <= 0.65);
        }
        const ComplexMatrix u = trotter_product(a, c, 1.0, 16);
        CHECK((u.adjoint() * u - ComplexMatrix::Identity(8, 8)).norm() < 1e-10);
    }
}

TEST_CASE("commutator_product") {
    const ComplexMatrix d1 = kI * testsupport::diag({0.3, -1.0});
    const ComplexMatrix d2 = kI * testsupport::diag({1.5, 0.2});
    CHECK((commutator_product(d1, d2, 1.0, 5) - ComplexMatrix::Identity(2, 2)).norm() < 1e-9);

    const ComplexMatrix a = kI * testsupport::pauli_x() / 2.0, b = kI * testsupport::pauli_y() / 2.0;
    const auto errs = product_formula_errors(a, b, 1.0, {8, 32}, ProductFormula::commutator);
    CHECK(errs[1].error < errs[0].error);
    // the target e^{[a,b]} = e^{-i sigma_z / 2}
    CHECK((expm_skew(bracket(a, b)) - expm_skew(-kI * testsupport::pauli_z() / 2.0)).norm() < 1e-14);

    Gen g(4);
    for (int trial = 0; trial < 5; ++trial) {
        ComplexMatrix x = g.skew(6), y = g.skew(6);
        x /= op_norm(x);
        y /= op_norm(y);
        const auto e = product_formula_errors(x, y, 1.0, {8, 16, 32, 64}, ProductFormula::commutator);
        for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k].error < e[k - 1].error);
        CHECK(e.back().error <= 0.05);
    }
    CHECK(product_formula_csv({{8, 0.5}}) == "n,error\n8,0.5\n");
}

TEST_CASE("sample_reachable") {
    Gen g(5);
    const ControlSystem sys = block_system(g);
    ComplexVector xi = ComplexVector::Unit(4, 0);

    const auto single = sample_reachable(sys, xi, 1.2, 0.0, 1, 9);
    REQUIRE(single.size() == 1);
    CHECK((single[0].final_state - expm_skew(-1.2 * sys.drift) * xi).norm() < 1e-12);

    const auto batch = sample_reachable(sys, xi, 1.0, 2.0, 20, 100);
    const auto again = sample_reachable(sys, xi, 1.0, 2.0, 20, 100);
    CHECK(trajectory_csv(batch) == trajectory_csv(again));
    for (const auto& s : batch) {
        CHECK(std::abs(s.final_state.norm() - 1.0) < 1e-9);
        CHECK(s.control.segments() >= 1);
        CHECK(s.control.segments() <= 8);
        const ComplexMatrix u = propagate_unitary(sys, s.control);
        CHECK(check_affiliated(u, sys.algebra).verdict);
        CHECK((u * xi - s.final_state).norm() < 1e-12);
        // zero extension: re-propagation equals the free flow applied to the endpoint
        const auto ext = extend_by_zero(random_control(2, 1.0, 2.0, s.seed), 1.7);
        CHECK((propagate_pwc(sys, ext, xi) - expm_skew(-0.7 * sys.drift) * s.final_state).norm() <= 1e-9);
    }
    const std::string csv = trajectory_csv(batch);
    CHECK(csv.rfind("seed,segment_count,T,final_re_0,final_re_1,final_re_2,final_re_3,final_im_0", 0) == 0);
}
