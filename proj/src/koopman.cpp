#include "vnlab/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vnlab/errors.hpp"
#include "vnlab/matrix_io.hpp"

namespace vnlab {

Index TorusModel::ambient_dim() const {
    Index n = 1;
    for (int j = 0; j < d; ++j) n *= 2 * K + 1;
    return n;
}

Index TorusModel::index_of(const MultiIndex& xi) const {
    if (static_cast<int>(xi.size()) != d) throw Error(ErrorKind::InvalidArgument, "TorusModel::index_of", "wrong arity");
    Index c = 0;
    for (long x : xi) {
        if (x < -K || x > K) throw Error(ErrorKind::InvalidArgument, "TorusModel::index_of", "index beyond cutoff");
        c = c * (2 * K + 1) + (x + K);
    }
    return c;
}

MultiIndex TorusModel::multi_index(Index coordinate) const {
    if (coordinate < 0 || coordinate >= ambient_dim())
        throw Error(ErrorKind::InvalidArgument, "TorusModel::multi_index", "coordinate out of range");
    MultiIndex xi(static_cast<std::size_t>(d));
    for (int j = d - 1; j >= 0; --j) {
        xi[static_cast<std::size_t>(j)] = static_cast<long>(coordinate % (2 * K + 1)) - K;
        coordinate /= 2 * K + 1;
    }
    return xi;
}

RealVector TorusModel::frequencies() const {
    const Index n = ambient_dim();
    RealVector f(n);
    for (Index c = 0; c < n; ++c) {
        const MultiIndex xi = multi_index(c);
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += alpha[std::size_t(j)] * double(xi[std::size_t(j)]);
        f(c) = s;
    }
    return f;
}

BlockAlgebra TorusModel::diagonal() const { return diagonal_algebra(ambient_dim()); }

TorusModel build_torus_model(int d, std::vector<double> alpha, long K) {
    if (K < 1) throw Error(ErrorKind::BadCutoff, "build_torus_model", "Fourier cutoff K must be at least 1");
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "build_torus_model", "dimension d must be at least 1");
    if (static_cast<int>(alpha.size()) != d)
        throw Error(ErrorKind::InvalidArgument, "build_torus_model", "alpha must have d entries");
    for (double a : alpha)
        if (!std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "build_torus_model", "frequencies must be finite");
    const double dim = std::pow(double(2 * K + 1), double(d));
    if (dim > 4096.0) throw Error(ErrorKind::BadCutoff, "build_torus_model", "ambient dimension above 4096");
    return TorusModel{d, std::move(alpha), K};
}

TorusModel torus_model_from_json(const nlohmann::json& j) {
    try {
        return build_torus_model(j.at("d").get<int>(), j.at("alpha").get<std::vector<double>>(), j.at("K").get<long>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, "torus_model_from_json", e.what());
    }
}

nlohmann::json torus_model_to_json(const TorusModel& m) { return {{"d", m.d}, {"alpha", m.alpha}, {"K", m.K}}; }

ComplexMatrix generator(const TorusModel& m) {
    const RealVector f = m.frequencies();
    ComplexMatrix g = ComplexMatrix::Zero(f.size(), f.size());
    for (Index c = 0; c < f.size(); ++c) g(c, c) = kI * f(c);
    return g;
}

ComplexMatrix koopman_unitary(const TorusModel& m, double t) {
    const RealVector f = m.frequencies();
    ComplexMatrix u = ComplexMatrix::Zero(f.size(), f.size());
    for (Index c = 0; c < f.size(); ++c) u(c, c) = std::exp(kI * t * f(c));
    return u;
}

namespace {

double wrapped(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(x, two_pi);
    if (r > std::numbers::pi) r -= two_pi;
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

// Two frequencies that differ but whose phases agree at every sample.
bool collides(const RealVector& f, const std::vector<double>& times) {
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    for (Index a = 0; a < f.size(); ++a)
        for (Index b = a + 1; b < f.size(); ++b) {
            if (std::abs(f(a) - f(b)) <= 1e-9 * scale) continue;
            bool all_equal = true;
            for (double t : times)
                if (std::abs(wrapped(t * (f(a) - f(b)))) > 1e-9) {
                    all_equal = false;
                    break;
                }
            if (all_equal) return true;
        }
    return false;
}

}  // namespace

SampleTimes generic_sample_times(const TorusModel& m) {
    const RealVector f = m.frequencies();
    const double top = f.cwiseAbs().maxCoeff();
    const double scale = top > 0.0 ? 1.0 / top : 1.0;
    SampleTimes s{{scale, std::sqrt(2.0) * scale}, {}};
    for (int attempt = 1; attempt <= 8 && collides(f, s.times); ++attempt) {
        const double stretch = 1.0 + attempt * (std::numbers::phi - 1.0) / 7.0;
        s.notes.push_back("phase collision at t = {" + format_double(s.times[0]) + ", " + format_double(s.times[1]) +
                          "}; resampled with factor " + format_double(stretch));
        s.times = {scale / stretch, std::sqrt(2.0) * scale / stretch};
    }
    return s;
}

BlockAlgebra koopman_algebra(const TorusModel& m, const std::vector<double>& t_samples, const Tolerances& tol) {
    if (t_samples.empty()) throw Error(ErrorKind::InvalidArgument, "koopman_algebra", "no sample times");
    std::vector<ComplexMatrix> s;
    for (double t : t_samples) s.push_back(koopman_unitary(m, t));
    return bicommutant_algebra(s, tol);
}

ConditionalExpectation filtration_expectation(const TorusModel& m, std::vector<std::vector<Index>> cells,
                                              const Tolerances& tol) {
    return conditional_expectation(m.diagonal(), std::move(cells), tol);
}

std::vector<std::vector<std::vector<Index>>> dyadic_filtration(const TorusModel& m, int levels) {
    if (levels < 1) throw Error(ErrorKind::InvalidArgument, "dyadic_filtration", "need at least one level");
    const RealVector f = m.frequencies();
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    std::vector<Index> zero, positive, negative;
    for (Index c = 0; c < f.size(); ++c) {
        if (std::abs(f(c)) <= 1e-12 * scale)
            zero.push_back(c);
        else
            (f(c) > 0 ? positive : negative).push_back(c);
    }
    auto by_magnitude = [&](Index a, Index b) {
        return std::abs(f(a)) != std::abs(f(b)) ? std::abs(f(a)) < std::abs(f(b)) : a < b;
    };
    std::stable_sort(positive.begin(), positive.end(), by_magnitude);
    std::stable_sort(negative.begin(), negative.end(), by_magnitude);

    std::vector<std::vector<std::vector<Index>>> chain;
    for (int level = 0; level < levels; ++level) {
        const std::size_t width = std::size_t{1} << (levels - 1 - level);
        std::vector<std::vector<Index>> cells;
        if (level == levels - 1) {
            for (Index c = 0; c < f.size(); ++c) cells.push_back({c});
        } else {
            if (!zero.empty()) cells.push_back(zero);
            for (const auto* half : {&negative, &positive})
                for (std::size_t start = 0; start < half->size(); start += width)
                    cells.emplace_back(half->begin() + static_cast<std::ptrdiff_t>(start),
                                       half->begin() + static_cast<std::ptrdiff_t>(std::min(start + width, half->size())));
        }
        for (auto& cell : cells) std::sort(cell.begin(), cell.end());
        std::sort(cells.begin(), cells.end());
        chain.push_back(std::move(cells));
    }
    return chain;
}

}  // namespace vnlab
