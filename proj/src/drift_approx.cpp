#include "vnlab/drift_approx.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "vnlab/errors.hpp"
#include "vnlab/matrix_io.hpp"

namespace vnlab {

namespace {

void require_positive_z(double z, const char* where) {
    if (!(z > 0.0) || !std::isfinite(z)) throw Error(ErrorKind::InvalidArgument, where, "z must be positive");
}

void require_skew(const ComplexMatrix& a, const char* where, const Tolerances& tol) {
    require_square(a, where);
    if (!is_skew_hermitian(a, tol)) throw Error(ErrorKind::NotNormal, where, "operator is not skew-Hermitian");
}

}  // namespace

double q_z(double omega, double z) { return omega / (z * z + omega * omega); }

double q_z_inverse(double u, double z) {
    if (u == 0.0) return 0.0;
    const double disc = std::max(0.0, 1.0 - 4.0 * z * z * u * u);
    return (1.0 + std::sqrt(disc)) / (2.0 * u);
}

ComplexMatrix q_z_map(const ComplexMatrix& v0, double z, const Tolerances& tol) {
    require_positive_z(z, "q_z_map");
    require_skew(v0, "q_z_map", tol);
    const auto s = eig_hermitian(v0, Symmetry::skew_hermitian, tol);
    return apply_spectral_function(s, [z](double w) { return kI * q_z(w, z); });
}

ComplexMatrix compress(const ComplexMatrix& qz, const ConditionalExpectation& e, const Tolerances& tol) {
    require_skew(qz, "compress", tol);
    const ComplexMatrix c = apply_expectation(e, qz, tol);
    return 0.5 * (c - c.adjoint());
}

ComplexMatrix reconstruct(const ComplexMatrix& c, double z, const Tolerances& tol) {
    require_positive_z(z, "reconstruct");
    require_skew(c, "reconstruct", tol);
    const double edge = 1.0 / (2.0 * z);
    const double zero = tol.reconstruct_zero * edge;
    const auto s = eig_hermitian(c, Symmetry::skew_hermitian, tol);
    for (Index k = 0; k < s.dim(); ++k)
        if (std::abs(s.eigenvalues(k)) > edge + tol.clamp_overshoot * std::max(1.0, edge))
            throw Error(ErrorKind::ClampExceeded, "reconstruct",
                        "eigenvalue " + format_double(s.eigenvalues(k)) + " outside the range of q_z");
    return apply_spectral_function(s, [&](double u) {
        if (std::abs(u) <= zero) return Complex(0.0);
        return kI * q_z_inverse(std::clamp(u, -edge, edge), z);
    });
}

ComplexMatrix drift_approximation(const ComplexMatrix& v0, const DriftApproxParams& params, const Tolerances& tol) {
    const ComplexMatrix qz = q_z_map(v0, params.z, tol);
    const ComplexMatrix c = compress(qz, params.expectation, tol);
    return reconstruct(c, params.z, tol);
}

double srt_probe_distance(const ComplexMatrix& a, const ComplexMatrix& b, const std::vector<ComplexVector>& probes,
                          const Tolerances& tol) {
    require_skew(a, "srt_probe_distance", tol);
    require_skew(b, "srt_probe_distance", tol);
    if (a.rows() != b.rows())
        throw Error(ErrorKind::InvalidArgument, "srt_probe_distance", "operators differ in dimension");
    if (probes.empty()) throw Error(ErrorKind::InvalidArgument, "srt_probe_distance", "no probe vectors");
    for (const auto& p : probes)
        if (p.size() != a.rows() || std::abs(p.norm() - 1.0) > tol.unit_norm)
            throw Error(ErrorKind::InvalidArgument, "srt_probe_distance", "probes must be unit vectors of matching size");
    const ComplexMatrix ra = resolvent(-kI * a, kI, tol);
    const ComplexMatrix rb = resolvent(-kI * b, kI, tol);
    double worst = 0.0;
    for (const auto& p : probes) worst = std::max(worst, ((ra - rb) * p).norm());
    return worst;
}

std::string SweepTable::to_csv() const {
    std::string out = "z,refinement_index,srt_distance\n";
    for (const SweepRow& r : rows)
        out += format_double(r.z) + "," + std::to_string(r.refinement_index) + "," + format_double(r.srt_distance) + "\n";
    return out;
}

SweepTable convergence_sweep(const ComplexMatrix& v0, const std::vector<double>& z_grid,
                             const std::vector<ConditionalExpectation>& chain, const std::vector<ComplexVector>& probes,
                             unsigned threads, const Tolerances& tol) {
    if (z_grid.empty()) throw Error(ErrorKind::InvalidArgument, "convergence_sweep", "empty z grid");
    if (chain.empty()) throw Error(ErrorKind::InvalidArgument, "convergence_sweep", "empty refinement chain");
    for (std::size_t k = 1; k < chain.size(); ++k)
        if (!chain[k].refines(chain[k - 1]))
            throw Error(ErrorKind::BadPartition, "convergence_sweep",
                        "expectation " + std::to_string(k) + " does not refine its predecessor");
    if (!chain.back().is_identity())
        throw Error(ErrorKind::BadPartition, "convergence_sweep", "refinement chain must end at the identity");
    for (double z : z_grid) require_positive_z(z, "convergence_sweep");

    SweepTable table;
    table.z_grid = z_grid;
    table.refinements = chain.size();
    table.rows.resize(z_grid.size() * chain.size());

    const std::size_t cells = table.rows.size();
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t idx = next++; idx < cells; idx = next++) {
            const std::size_t zi = idx / chain.size();
            const std::size_t ri = idx % chain.size();
            try {
                const DriftApproxParams params{z_grid[zi], chain[ri], probes};
                const ComplexMatrix approx = drift_approximation(v0, params, tol);
                table.rows[idx] = SweepRow{z_grid[zi], ri, srt_probe_distance(approx, v0, probes, tol)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

std::vector<ComplexVector> basis_probes(Index n) {
    std::vector<ComplexVector> out;
    for (Index i = 0; i < n; ++i) out.push_back(ComplexVector::Unit(n, i));
    return out;
}

}  // namespace vnlab
