#pragma once

// Seeded generators and small helpers shared by the test binaries.

#include <cstdint>
#include <random>
#include <vector>

#include "vnlab/algebra.hpp"
#include "vnlab/lin_core.hpp"

namespace testsupport {

using vnlab::Complex;
using vnlab::ComplexMatrix;
using vnlab::ComplexVector;
using vnlab::Index;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double normal() { return normal_(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    Index index(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng_); }
    Complex complex() { return {normal(), normal()}; }

    ComplexMatrix matrix(Index n, Index m) {
        ComplexMatrix a(n, m);
        for (Index j = 0; j < m; ++j)
            for (Index i = 0; i < n; ++i) a(i, j) = complex();
        return a;
    }
    ComplexMatrix matrix(Index n) { return matrix(n, n); }

    ComplexMatrix hermitian(Index n) {
        const ComplexMatrix a = matrix(n);
        return 0.5 * (a + a.adjoint());
    }
    ComplexMatrix skew(Index n) {
        const ComplexMatrix a = matrix(n);
        return 0.5 * (a - a.adjoint());
    }
    ComplexMatrix unitary(Index n) {
        Eigen::HouseholderQR<ComplexMatrix> qr(matrix(n));
        return qr.householderQ() * ComplexMatrix::Identity(n, n);
    }
    ComplexVector unit_vector(Index n) {
        ComplexVector v(n);
        for (Index i = 0; i < n; ++i) v(i) = complex();
        return v.normalized();
    }
    std::vector<Index> permutation(Index n) {
        std::vector<Index> p(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
        std::shuffle(p.begin(), p.end(), rng_);
        return p;
    }

    // A random member of m: independent Gaussian components per block.
    ComplexMatrix member(const vnlab::BlockAlgebra& m) {
        std::vector<ComplexMatrix> comps;
        for (const auto& b : m.blocks()) comps.push_back(matrix(b.size));
        return m.assemble(comps);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

inline ComplexMatrix pauli_x() {
    ComplexMatrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}
inline ComplexMatrix pauli_y() {
    ComplexMatrix s(2, 2);
    s << 0, Complex(0, -1), Complex(0, 1), 0;
    return s;
}
inline ComplexMatrix pauli_z() {
    ComplexMatrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

inline ComplexMatrix diag(std::initializer_list<Complex> d) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    Index i = 0;
    for (Complex x : d) {
        m(i, i) = x;
        ++i;
    }
    return m;
}

}  // namespace testsupport
