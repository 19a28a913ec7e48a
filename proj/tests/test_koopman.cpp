#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "support.hpp"
#include "vnlab/drift_approx.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/koopman.hpp"

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

// Oracle: multiplicities of alpha.xi, grouped with a relative tolerance.
std::vector<Index> frequency_multiplicities(const TorusModel& m) {
    std::vector<double> f;
    for (Index c = 0; c < m.ambient_dim(); ++c) {
        const MultiIndex xi = m.multi_index(c);
        double s = 0.0;
        for (int j = 0; j < m.d; ++j) s += m.alpha[std::size_t(j)] * double(xi[std::size_t(j)]);
        f.push_back(s);
    }
    std::sort(f.begin(), f.end());
    std::vector<Index> mult;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i > 0 && std::abs(f[i] - f[i - 1]) <= 1e-9) ++mult.back();
        else mult.push_back(1);
    }
    std::sort(mult.begin(), mult.end());
    return mult;
}

std::vector<Index> block_multiplicities(const BlockAlgebra& a) {
    std::vector<Index> mult;
    for (const auto& b : a.blocks()) {
        CHECK(b.size == 1);
        mult.push_back(b.multiplicity);
    }
    std::sort(mult.begin(), mult.end());
    return mult;
}

}  // namespace

TEST_CASE("torus model indexing") {
    const TorusModel m = build_torus_model(2, {1.0, std::sqrt(2.0)}, 2);
    CHECK(m.ambient_dim() == 25);
    CHECK(m.index_of({-2, -2}) == 0);
    CHECK(m.index_of({-2, -1}) == 1);
    CHECK(m.index_of({2, 2}) == 24);
    for (Index c = 0; c < 25; ++c) CHECK(m.index_of(m.multi_index(c)) == c);
    CHECK(m.frequencies()(m.index_of({1, -1})) == doctest::Approx(1.0 - std::sqrt(2.0)));

    CHECK(kind_of([] { build_torus_model(1, {1.0}, 0); }) == ErrorKind::BadCutoff);
    CHECK(kind_of([] { build_torus_model(4, {1, 2, 3, 4}, 5); }) == ErrorKind::BadCutoff);
    CHECK(kind_of([] { build_torus_model(2, {1.0}, 1); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { m.index_of({3, 0}); }) == ErrorKind::InvalidArgument);

    const TorusModel back = torus_model_from_json(torus_model_to_json(m));
    CHECK(back.d == 2);
    CHECK(back.K == 2);
    CHECK(back.alpha == m.alpha);
    CHECK(kind_of([] { torus_model_from_json(nlohmann::json{{"d", 1}}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("koopman_unitary") {
    const TorusModel m = build_torus_model(2, {0.7, -1.3}, 2);
    const ComplexMatrix g = generator(m);
    CHECK(is_skew_hermitian(g));
    CHECK((koopman_unitary(m, 0.0) - ComplexMatrix::Identity(25, 25)).norm() == 0.0);
    Gen gen(44);
    for (int trial = 0; trial < 10; ++trial) {
        const double s = gen.uniform(-3, 3), t = gen.uniform(-3, 3);
        const ComplexMatrix us = koopman_unitary(m, s), ut = koopman_unitary(m, t);
        CHECK((koopman_unitary(m, s + t) - us * ut).norm() <= 1e-12);
        CHECK((us.adjoint() * us - ComplexMatrix::Identity(25, 25)).norm() <= 1e-12);
        CHECK((us - expm_skew(s * g)).norm() <= 1e-11);
        // central difference against the generator
        const double h = 1e-5;
        const ComplexMatrix fd = (koopman_unitary(m, t + h) - koopman_unitary(m, t - h)) / (2 * h);
        CHECK((fd - g * ut).norm() <= 1e-8);
    }
    // single-mode check: xi = (1, 0) picks up e^{i t alpha_1}
    const Index c = m.index_of({1, 0});
    CHECK(std::abs(koopman_unitary(m, 2.0)(c, c) - std::exp(kI * 1.4)) < 1e-14);
}

TEST_CASE("koopman_algebra") {
    SUBCASE("rationally independent frequencies give a maximal abelian algebra") {
        const TorusModel m = build_torus_model(2, {1.0, std::sqrt(2.0)}, 2);
        const BlockAlgebra a = koopman_algebra(m, generic_sample_times(m).times);
        CHECK(a.blocks().size() == 25);
        CHECK(a.algebra_dim() == 25);
        CHECK(a.commutant_dim() == 25);
    }
    SUBCASE("resonant frequencies give multiplicities") {
        const TorusModel m = build_torus_model(2, {1.0, 1.0}, 1);
        const BlockAlgebra a = koopman_algebra(m, generic_sample_times(m).times);
        CHECK(block_multiplicities(a) == std::vector<Index>{1, 1, 2, 2, 3});
        CHECK(a.commutant_dim() == 19);
    }
    SUBCASE("matches the frequency oracle and is independent of the generic times") {
        Gen g(9);
        for (int trial = 0; trial < 6; ++trial) {
            const int d = int(g.index(1, 2));
            std::vector<double> alpha;
            for (int j = 0; j < d; ++j) alpha.push_back(g.index(0, 1) ? double(g.index(1, 3)) : g.uniform(0.3, 2.0));
            const TorusModel m = build_torus_model(d, alpha, d == 1 ? 4 : 2);
            const auto oracle = frequency_multiplicities(m);
            const auto times = generic_sample_times(m).times;
            CHECK(block_multiplicities(koopman_algebra(m, times)) == oracle);
            const std::vector<double> other{times[0] * 0.6180339887, times[1] * 0.7071};
            CHECK(block_multiplicities(koopman_algebra(m, other)) == oracle);
        }
    }
    SUBCASE("single sample with a full-period phase collapses the algebra") {
        const TorusModel m = build_torus_model(1, {1.0}, 1);
        const BlockAlgebra a = koopman_algebra(m, {2.0 * std::numbers::pi});
        CHECK(a.algebra_dim() == 1);
    }
    CHECK(kind_of([] {
              const TorusModel m = build_torus_model(1, {1.0}, 1);
              koopman_algebra(m, {});
          }) == ErrorKind::InvalidArgument);
}

TEST_CASE("generic_sample_times") {
    const TorusModel m = build_torus_model(1, {2.0}, 2);
    const SampleTimes s = generic_sample_times(m);
    REQUIRE(s.times.size() == 2);
    CHECK(s.times[0] == doctest::Approx(0.25));
    CHECK(s.times[1] == doctest::Approx(std::sqrt(2.0) * 0.25));
    CHECK(s.notes.empty());
}

TEST_CASE("dyadic_filtration") {
    const TorusModel m = build_torus_model(1, {1.0}, 8);
    const auto chain = dyadic_filtration(m, 4);
    REQUIRE(chain.size() == 4);
    CHECK(chain.back().size() == 17);
    // zero cell, then chunks of width 8, 4, 2 on each side
    CHECK(chain[0].size() == 3);
    CHECK(chain[1].size() == 5);
    CHECK(chain[2].size() == 9);
    std::vector<ConditionalExpectation> es;
    for (const auto& cells : chain) es.push_back(filtration_expectation(m, cells));
    CHECK(es.back().is_identity());
    for (std::size_t k = 1; k < es.size(); ++k) CHECK(es[k].refines(es[k - 1]));
    // every level partitions the coordinates
    for (const auto& cells : chain) {
        std::vector<Index> all;
        for (const auto& c : cells) all.insert(all.end(), c.begin(), c.end());
        std::sort(all.begin(), all.end());
        CHECK(all.size() == 17);
        CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    }

    SUBCASE("sweep over the chain is monotone and converges") {
        const SweepTable t = convergence_sweep(generator(m), {1.0, 0.5, 0.25}, es, basis_probes(17));
        for (std::size_t zi = 0; zi < 3; ++zi) {
            for (std::size_t r = 1; r < es.size(); ++r) CHECK(t.at(zi, r) <= t.at(zi, r - 1) + 1e-12);
            CHECK(t.at(zi, es.size() - 1) <= 1e-6);
        }
    }
    CHECK(kind_of([&] { dyadic_filtration(m, 0); }) == ErrorKind::InvalidArgument);
    CHECK(dyadic_filtration(m, 1).front().size() == 17);
}
