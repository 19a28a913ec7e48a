#pragma once

// Truncated Koopman models of linear flows on the d-torus, in the Fourier
// basis e^{i xi.x} with |xi_j| <= K.

#include <string>
#include <vector>

#include <json.hpp>

#include "vnlab/algebra.hpp"
#include "vnlab/lin_core.hpp"

namespace vnlab {

using MultiIndex = std::vector<long>;

struct TorusModel {
    int d = 1;
    std::vector<double> alpha;
    long K = 1;

    Index ambient_dim() const;
    // Lexicographic order, first coordinate most significant, each running -K..K.
    Index index_of(const MultiIndex& xi) const;
    MultiIndex multi_index(Index coordinate) const;
    // alpha . xi for every ambient coordinate.
    RealVector frequencies() const;
    BlockAlgebra diagonal() const;
};

// Throws BadCutoff when K < 1, InvalidArgument for a bad alpha.
TorusModel build_torus_model(int d, std::vector<double> alpha, long K);
TorusModel torus_model_from_json(const nlohmann::json& j);
nlohmann::json torus_model_to_json(const TorusModel& m);

// diag(i alpha.xi)
ComplexMatrix generator(const TorusModel& m);
// diag(e^{i t alpha.xi})
ComplexMatrix koopman_unitary(const TorusModel& m, double t);

struct SampleTimes {
    std::vector<double> times;
    std::vector<std::string> notes;
};

// {1, sqrt 2} / max|alpha.xi|, re-drawn when two distinct frequencies give
// phases that agree mod 2 pi at every sample.
SampleTimes generic_sample_times(const TorusModel& m);

BlockAlgebra koopman_algebra(const TorusModel& m, const std::vector<double>& t_samples,
                             const Tolerances& tol = default_tolerances());

// Averages diagonal entries over cells of coordinates with uniform weights.
ConditionalExpectation filtration_expectation(const TorusModel& m, std::vector<std::vector<Index>> cells,
                                              const Tolerances& tol = default_tolerances());

// Coarsest-to-finest chain of `levels` partitions ending at singletons. The
// zero-frequency modes are a cell of their own; positive and negative
// frequencies, each sorted by |alpha.xi|, are cut into aligned chunks whose
// width halves from level to level.
std::vector<std::vector<std::vector<Index>>> dyadic_filtration(const TorusModel& m, int levels);

}  // namespace vnlab
