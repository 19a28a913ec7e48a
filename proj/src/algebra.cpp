#include "vnlab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "vnlab/errors.hpp"
#include "vnlab/matrix_io.hpp"

namespace vnlab {

// ---------------------------------------------------------------------------
// BlockAlgebra

std::shared_ptr<BlockAlgebra::Data> BlockAlgebra::prepare(std::vector<Block> blocks,
                                                          std::vector<double> weights,
                                                          const Tolerances& tol) {
    if (blocks.empty()) throw Error(ErrorKind::InvalidArgument, "make_block_algebra", "no blocks");
    for (const Block& b : blocks)
        if (b.size < 1 || b.multiplicity < 1)
            throw Error(ErrorKind::InvalidArgument, "make_block_algebra", "block sizes must be positive");
    if (weights.size() != blocks.size())
        throw Error(ErrorKind::BadWeights, "make_block_algebra", "one weight per block required");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw Error(ErrorKind::BadWeights, "make_block_algebra", "weights must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > tol.weight_sum)
        throw Error(ErrorKind::BadWeights, "make_block_algebra", "weights must sum to 1");

    auto d = std::make_shared<Data>();
    d->blocks = std::move(blocks);
    d->weights = std::move(weights);
    d->offsets.push_back(0);
    d->atom_offsets.push_back(0);
    for (const Block& b : d->blocks) {
        d->offsets.push_back(d->offsets.back() + b.size * b.multiplicity);
        d->atom_offsets.push_back(d->atom_offsets.back() + b.size);
    }
    d->ambient_dim = d->offsets.back();
    return d;
}

BlockAlgebra BlockAlgebra::from_permutation(std::vector<Block> blocks, std::vector<double> weights,
                                            std::vector<Index> perm, const Tolerances& tol) {
    auto d = prepare(std::move(blocks), std::move(weights), tol);
    const Index n = d->ambient_dim;
    if (static_cast<Index>(perm.size()) != n)
        throw Error(ErrorKind::BadPermutation, "make_block_algebra", "basis map length must equal ambient dim");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (Index p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
            throw Error(ErrorKind::BadPermutation, "make_block_algebra", "basis map is not a permutation");
        seen[static_cast<std::size_t>(p)] = true;
    }
    d->frame = ComplexMatrix::Zero(n, n);
    for (Index c = 0; c < n; ++c) d->frame(perm[static_cast<std::size_t>(c)], c) = 1.0;
    d->perm = std::move(perm);
    return BlockAlgebra(std::move(d));
}

BlockAlgebra BlockAlgebra::from_frame(std::vector<Block> blocks, std::vector<double> weights,
                                      ComplexMatrix frame, const Tolerances& tol) {
    auto d = prepare(std::move(blocks), std::move(weights), tol);
    const Index n = d->ambient_dim;
    if (frame.rows() != n || frame.cols() != n)
        throw Error(ErrorKind::InvalidArgument, "BlockAlgebra::from_frame", "frame size mismatch");
    if ((frame.adjoint() * frame - ComplexMatrix::Identity(n, n)).norm() > 1e-8 * std::sqrt(double(n)))
        throw Error(ErrorKind::InvalidArgument, "BlockAlgebra::from_frame", "frame is not unitary");

    // Record a basis map when the frame is a permutation.
    std::vector<Index> perm(static_cast<std::size_t>(n));
    bool is_perm = true;
    for (Index c = 0; c < n && is_perm; ++c) {
        Index row = 0;
        frame.col(c).cwiseAbs().maxCoeff(&row);
        if (std::abs(frame(row, c) - Complex(1.0)) > 1e-12 ||
            frame.col(c).squaredNorm() - std::norm(frame(row, c)) > 1e-24)
            is_perm = false;
        perm[static_cast<std::size_t>(c)] = row;
    }
    d->frame = std::move(frame);
    if (is_perm) d->perm = std::move(perm);
    return BlockAlgebra(std::move(d));
}

std::vector<double> BlockAlgebra::counting_weights(const std::vector<Block>& blocks) {
    double total = 0.0;
    for (const Block& b : blocks) total += double(b.size * b.multiplicity);
    std::vector<double> w;
    for (const Block& b : blocks) w.push_back(double(b.size * b.multiplicity) / total);
    // absorb rounding so the weights sum to one exactly enough for validation
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    w.back() += 1.0 - s;
    return w;
}

std::pair<std::size_t, Index> BlockAlgebra::atom(Index a) const {
    const auto& ao = data_->atom_offsets;
    if (a < 0 || a >= ao.back()) throw Error(ErrorKind::InvalidArgument, "BlockAlgebra::atom", "atom out of range");
    const auto it = std::upper_bound(ao.begin(), ao.end(), a);
    const auto k = static_cast<std::size_t>(std::distance(ao.begin(), it) - 1);
    return {k, a - ao[k]};
}

Index BlockAlgebra::algebra_dim() const noexcept {
    Index s = 0;
    for (const Block& b : data_->blocks) s += b.size * b.size;
    return s;
}

Index BlockAlgebra::commutant_dim() const noexcept {
    Index s = 0;
    for (const Block& b : data_->blocks) s += b.multiplicity * b.multiplicity;
    return s;
}

ComplexMatrix BlockAlgebra::to_canonical(const ComplexMatrix& a) const {
    if (data_->perm) {
        const auto& p = *data_->perm;
        const Index n = ambient_dim();
        ComplexMatrix out(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) out(i, j) = a(p[std::size_t(i)], p[std::size_t(j)]);
        return out;
    }
    return data_->frame.adjoint() * a * data_->frame;
}

ComplexMatrix BlockAlgebra::from_canonical(const ComplexMatrix& a) const {
    if (data_->perm) {
        const auto& p = *data_->perm;
        const Index n = ambient_dim();
        ComplexMatrix out(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) out(p[std::size_t(i)], p[std::size_t(j)]) = a(i, j);
        return out;
    }
    return data_->frame * a * data_->frame.adjoint();
}

std::vector<ComplexMatrix> BlockAlgebra::components(const ComplexMatrix& a) const {
    const ComplexMatrix c = to_canonical(a);
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < block_count(); ++k) {
        const Block& b = data_->blocks[k];
        ComplexMatrix comp = ComplexMatrix::Zero(b.size, b.size);
        for (Index r = 0; r < b.multiplicity; ++r)
            for (Index j = 0; j < b.size; ++j)
                for (Index i = 0; i < b.size; ++i)
                    comp(i, j) += c(canonical_index(k, i, r), canonical_index(k, j, r));
        out.push_back(comp / double(b.multiplicity));
    }
    return out;
}

ComplexMatrix BlockAlgebra::assemble(const std::vector<ComplexMatrix>& comps) const {
    if (comps.size() != block_count())
        throw Error(ErrorKind::InvalidArgument, "BlockAlgebra::assemble", "component count mismatch");
    const Index n = ambient_dim();
    ComplexMatrix c = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < block_count(); ++k) {
        const Block& b = data_->blocks[k];
        if (comps[k].rows() != b.size || comps[k].cols() != b.size)
            throw Error(ErrorKind::InvalidArgument, "BlockAlgebra::assemble", "component size mismatch");
        for (Index r = 0; r < b.multiplicity; ++r)
            for (Index j = 0; j < b.size; ++j)
                for (Index i = 0; i < b.size; ++i)
                    c(canonical_index(k, i, r), canonical_index(k, j, r)) = comps[k](i, j);
    }
    return from_canonical(c);
}

std::vector<ComplexMatrix> BlockAlgebra::generators() const {
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < block_count(); ++k) {
        const Block& b = data_->blocks[k];
        for (Index i = 0; i < b.size; ++i)
            for (Index j = 0; j < b.size; ++j) {
                std::vector<ComplexMatrix> comps;
                for (std::size_t l = 0; l < block_count(); ++l)
                    comps.push_back(ComplexMatrix::Zero(data_->blocks[l].size, data_->blocks[l].size));
                comps[k](i, j) = 1.0;
                out.push_back(assemble(comps));
            }
    }
    return out;
}

std::vector<ComplexMatrix> BlockAlgebra::commutant_generators() const {
    const Index n = ambient_dim();
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < block_count(); ++k) {
        const Block& b = data_->blocks[k];
        for (Index r = 0; r < b.multiplicity; ++r)
            for (Index s = 0; s < b.multiplicity; ++s) {
                ComplexMatrix c = ComplexMatrix::Zero(n, n);
                for (Index i = 0; i < b.size; ++i) c(canonical_index(k, i, r), canonical_index(k, i, s)) = 1.0;
                out.push_back(from_canonical(c));
            }
    }
    return out;
}

ComplexMatrix BlockAlgebra::central_projection(std::size_t k) const {
    const Index n = ambient_dim();
    ComplexMatrix c = ComplexMatrix::Zero(n, n);
    for (Index x = data_->offsets.at(k); x < data_->offsets.at(k + 1); ++x) c(x, x) = 1.0;
    return from_canonical(c);
}

BlockAlgebra make_block_algebra(std::vector<Block> blocks, std::vector<double> weights,
                                std::vector<Index> perm, const Tolerances& tol) {
    return BlockAlgebra::from_permutation(std::move(blocks), std::move(weights), std::move(perm), tol);
}

BlockAlgebra diagonal_algebra(Index n) {
    std::vector<Block> blocks(static_cast<std::size_t>(n), Block{1, 1});
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    return make_block_algebra(blocks, BlockAlgebra::counting_weights(blocks), perm);
}

BlockAlgebra full_matrix_algebra(Index n) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    return make_block_algebra({Block{n, 1}}, {1.0}, perm);
}

BlockAlgebra eigenspace_algebra(const ComplexMatrix& hermitian, const Tolerances& tol) {
    const SpectralDecomposition s = eig_hermitian(hermitian, Symmetry::hermitian, tol);
    const auto clusters = cluster_sorted(s.eigenvalues, tol.cluster_gap);
    std::vector<Block> blocks;
    ComplexMatrix frame(s.dim(), s.dim());
    Index col = 0;
    for (const auto& cl : clusters) {
        blocks.push_back(Block{static_cast<Index>(cl.size()), 1});
        for (Index idx : cl) frame.col(col++) = s.unitary.col(idx);
    }
    const auto weights = BlockAlgebra::counting_weights(blocks);
    return BlockAlgebra::from_frame(std::move(blocks), weights, std::move(frame), tol);
}

nlohmann::json algebra_to_json(const BlockAlgebra& m) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const Block& b : m.blocks()) blocks.push_back({b.size, b.multiplicity});
    nlohmann::json j{{"blocks", blocks}, {"weights", m.weights()}};
    if (m.permutation())
        j["perm"] = *m.permutation();
    else
        j["frame"] = matrix_to_json(m.frame());
    return j;
}

BlockAlgebra algebra_from_json(const nlohmann::json& j, const Tolerances& tol) {
    try {
        std::vector<Block> blocks;
        for (const auto& b : j.at("blocks")) blocks.push_back(Block{b.at(0).get<Index>(), b.at(1).get<Index>()});
        auto weights = j.at("weights").get<std::vector<double>>();
        if (j.contains("frame"))
            return BlockAlgebra::from_frame(std::move(blocks), std::move(weights), matrix_from_json(j.at("frame")), tol);
        return make_block_algebra(std::move(blocks), std::move(weights), j.at("perm").get<std::vector<Index>>(), tol);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, "algebra_from_json", e.what());
    }
}

// ---------------------------------------------------------------------------
// trace and affiliation

double affiliation_residual(const ComplexMatrix& a, const BlockAlgebra& m) {
    require_square(a, "check_affiliated");
    if (a.rows() != m.ambient_dim())
        throw Error(ErrorKind::InvalidArgument, "check_affiliated", "dimension mismatch with algebra");
    const double norm_a = op_norm(a);
    if (norm_a == 0.0) return 0.0;
    const ComplexMatrix c = m.to_canonical(a);
    const Index n = m.ambient_dim();

    // [c, G] for G = sum_i e_{p_i} e_{q_i}^T, p_i = (k,i,r), q_i = (k,i,s):
    // cG has columns q_i equal to c(:, p_i); Gc has rows p_i equal to c(q_i, :).
    double worst = 0.0;
    ComplexMatrix comm(n, n);
    for (std::size_t k = 0; k < m.block_count(); ++k) {
        const Block& b = m.blocks()[k];
        for (Index r = 0; r < b.multiplicity; ++r)
            for (Index s = 0; s < b.multiplicity; ++s) {
                comm.setZero();
                for (Index i = 0; i < b.size; ++i) {
                    const Index p = m.canonical_index(k, i, r);
                    const Index q = m.canonical_index(k, i, s);
                    comm.col(q) += c.col(p);
                    comm.row(p) -= c.row(q);
                }
                worst = std::max(worst, comm.norm() / norm_a);
            }
    }
    return worst;
}

AffiliationCertificate check_affiliated(const ComplexMatrix& a, const BlockAlgebra& m, const Tolerances& tol) {
    AffiliationCertificate cert{a, m, affiliation_residual(a, m), false};
    cert.verdict = cert.max_commutator_residual <= tol.affiliation;
    return cert;
}

Complex trace_of(const ComplexMatrix& a, const BlockAlgebra& m, const Tolerances& tol) {
    if (affiliation_residual(a, m) > tol.affiliation)
        throw Error(ErrorKind::NotMember, "trace_of", "operator is not a member of the algebra");
    const auto comps = m.components(a);
    Complex t = 0.0;
    for (std::size_t k = 0; k < comps.size(); ++k)
        t += m.weights()[k] * comps[k].trace() / double(m.blocks()[k].size);
    return t;
}

// ---------------------------------------------------------------------------
// commutant and bicommutant

namespace {

struct HermitianPart {
    SpectralDecomposition spectrum;
    std::vector<std::vector<Index>> clusters;
    ComplexMatrix op;
};

std::vector<HermitianPart> hermitian_parts(const std::vector<ComplexMatrix>& s, const Tolerances& tol) {
    std::vector<HermitianPart> parts;
    for (const ComplexMatrix& a : s) {
        const ComplexMatrix re = 0.5 * (a + a.adjoint());
        const ComplexMatrix im = (a - a.adjoint()) / (2.0 * kI);
        for (const ComplexMatrix* h : {&re, &im}) {
            if (h->norm() <= 1e-14 * std::max(1.0, a.norm())) continue;
            SpectralDecomposition sd = eig_hermitian(*h, Symmetry::hermitian, tol);
            auto clusters = cluster_sorted(sd.eigenvalues, tol.cluster_gap);
            if (clusters.size() <= 1) continue;  // a scalar imposes nothing
            parts.push_back({std::move(sd), std::move(clusters), *h});
        }
    }
    // Most clusters first keeps the working basis small.
    std::stable_sort(parts.begin(), parts.end(),
                     [](const HermitianPart& x, const HermitianPart& y) { return x.clusters.size() > y.clusters.size(); });
    return parts;
}

}  // namespace

std::vector<ComplexMatrix> commutant(const std::vector<ComplexMatrix>& s, const Tolerances& tol) {
    if (s.empty()) throw Error(ErrorKind::InvalidArgument, "commutant", "empty operator set");
    const Index n = s.front().rows();
    for (const auto& a : s) {
        require_square(a, "commutant");
        if (a.rows() != n) throw Error(ErrorKind::InvalidArgument, "commutant", "operators differ in dimension");
    }

    const auto parts = hermitian_parts(s, tol);
    std::vector<ComplexMatrix> basis;
    if (parts.empty()) {
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) {
                ComplexMatrix e = ComplexMatrix::Zero(n, n);
                e(i, j) = 1.0;
                basis.push_back(std::move(e));
            }
        return basis;
    }

    // Commutant of the first part: block matrices in its eigenbasis.
    const HermitianPart& first = parts.front();
    for (const auto& cl : first.clusters)
        for (Index i : cl)
            for (Index j : cl) basis.push_back(first.spectrum.unitary.col(i) * first.spectrum.unitary.col(j).adjoint());

    // Intersect with the commutant of each remaining part inside the current span.
    for (std::size_t p = 1; p < parts.size(); ++p) {
        const ComplexMatrix& h = parts[p].op;
        ComplexMatrix images(n * n, static_cast<Index>(basis.size()));
        for (std::size_t k = 0; k < basis.size(); ++k)
            images.col(static_cast<Index>(k)) = vectorize(h * basis[k] - basis[k] * h);
        const ComplexMatrix kernel = column_nullspace(images, tol);
        if (kernel.cols() == static_cast<Index>(basis.size())) continue;
        std::vector<ComplexMatrix> next;
        for (Index c = 0; c < kernel.cols(); ++c) {
            ComplexMatrix x = ComplexMatrix::Zero(n, n);
            for (std::size_t k = 0; k < basis.size(); ++k) x += kernel(static_cast<Index>(k), c) * basis[k];
            next.push_back(std::move(x));
        }
        basis = std::move(next);
    }
    return basis;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

ComplexMatrix random_member(const std::vector<ComplexMatrix>& basis, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix x = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (const auto& b : basis) x += Complex(g(rng), g(rng)) * b;
    return x;
}

// Replaces a column that is a phase times a coordinate vector by the exact coordinate vector.
void snap_coordinate_column(ComplexMatrix& frame, Index c) {
    Index row = 0;
    const double peak = frame.col(c).cwiseAbs().maxCoeff(&row);
    if (std::abs(peak - 1.0) < 1e-10 && frame.col(c).squaredNorm() - peak * peak < 1e-20) {
        frame.col(c).setZero();
        frame(row, c) = 1.0;
    }
}

std::optional<BlockAlgebra> try_bicommutant(const std::vector<ComplexMatrix>& s,
                                            const std::vector<ComplexMatrix>& comm, std::uint64_t seed,
                                            const Tolerances& tol) {
    const Index n = s.front().rows();
    std::mt19937_64 rng(seed);
    ComplexMatrix x = random_member(comm, rng);
    ComplexMatrix h = 0.5 * (x + x.adjoint());
    h /= std::max(h.norm(), 1e-300);
    const SpectralDecomposition sd = eig_hermitian(h, Symmetry::hermitian, tol);
    const auto clusters = cluster_sorted(sd.eigenvalues, tol.cluster_gap);

    std::vector<ComplexMatrix> spaces;
    for (const auto& cl : clusters) {
        ComplexMatrix e(n, static_cast<Index>(cl.size()));
        for (std::size_t i = 0; i < cl.size(); ++i) e.col(static_cast<Index>(i)) = sd.unitary.col(cl[i]);
        spaces.push_back(std::move(e));
    }

    // Eigenspaces linked by the commutant belong to the same block.
    const ComplexMatrix link1 = random_member(comm, rng);
    const ComplexMatrix link2 = random_member(comm, rng);
    const double link_scale = std::max(link1.norm(), link2.norm());
    UnionFind uf(spaces.size());
    for (std::size_t a = 0; a < spaces.size(); ++a)
        for (std::size_t b = a + 1; b < spaces.size(); ++b) {
            const double w = std::max((spaces[a].adjoint() * link1 * spaces[b]).norm(),
                                      (spaces[a].adjoint() * link2 * spaces[b]).norm());
            if (w > 1e-6 * link_scale) uf.join(a, b);
        }

    std::vector<std::vector<std::size_t>> groups;
    {
        std::vector<std::size_t> root_to_group(spaces.size(), spaces.size());
        for (std::size_t a = 0; a < spaces.size(); ++a) {
            const std::size_t r = uf.find(a);
            if (root_to_group[r] == spaces.size()) {
                root_to_group[r] = groups.size();
                groups.emplace_back();
            }
            groups[root_to_group[r]].push_back(a);
        }
    }

    // Align each multiplicity copy with the group's reference copy.
    struct BlockFrame {
        Index size = 0;
        std::vector<ComplexMatrix> copies;
        Index key = 0;
    };
    std::vector<BlockFrame> frames;
    for (const auto& g : groups) {
        BlockFrame bf;
        bf.size = spaces[g.front()].cols();
        for (std::size_t a : g)
            if (spaces[a].cols() != bf.size) return std::nullopt;  // unequal copies: unlucky sample
        const ComplexMatrix& ref = spaces[g.front()];
        bf.copies.push_back(ref);
        for (std::size_t idx = 1; idx < g.size(); ++idx) {
            const ComplexMatrix& er = spaces[g[idx]];
            ComplexMatrix best;
            double best_norm = -1.0;
            for (const ComplexMatrix* link : {&link1, &link2}) {
                ComplexMatrix t = er * (er.adjoint() * (*link) * ref);
                const double tn = t.norm();
                if (tn > best_norm) {
                    best_norm = tn;
                    best = std::move(t);
                }
            }
            if (best_norm <= 1e-9) return std::nullopt;
            bf.copies.push_back(best / (best_norm / std::sqrt(double(bf.size))));
        }
        frames.push_back(std::move(bf));
    }

    // Deterministic ordering: copies and blocks by their leading ambient coordinate.
    auto leading = [](const ComplexMatrix& e) {
        Index best = e.rows();
        for (Index c = 0; c < e.cols(); ++c)
            for (Index r = 0; r < e.rows(); ++r)
                if (std::abs(e(r, c)) > 1e-6) {
                    best = std::min(best, r);
                    break;
                }
        return best;
    };
    for (auto& bf : frames) {
        std::stable_sort(bf.copies.begin(), bf.copies.end(),
                         [&](const ComplexMatrix& p, const ComplexMatrix& q) { return leading(p) < leading(q); });
        bf.key = leading(bf.copies.front());
    }
    std::stable_sort(frames.begin(), frames.end(), [](const BlockFrame& p, const BlockFrame& q) { return p.key < q.key; });

    std::vector<Block> blocks;
    ComplexMatrix frame(n, n);
    Index offset = 0;
    for (const auto& bf : frames) {
        const auto m = static_cast<Index>(bf.copies.size());
        blocks.push_back(Block{bf.size, m});
        for (Index i = 0; i < bf.size; ++i)
            for (Index r = 0; r < m; ++r) frame.col(offset + i * m + r) = bf.copies[static_cast<std::size_t>(r)].col(i);
        offset += bf.size * m;
    }
    if (offset != n) return std::nullopt;
    for (Index c = 0; c < n; ++c) snap_coordinate_column(frame, c);

    const auto weights = BlockAlgebra::counting_weights(blocks);
    BlockAlgebra out = BlockAlgebra::from_frame(std::move(blocks), weights, std::move(frame), tol);
    for (const auto& a : s)
        if (affiliation_residual(a, out) > tol.affiliation) return std::nullopt;
    return out;
}

}  // namespace

BlockAlgebra bicommutant_algebra(const std::vector<ComplexMatrix>& s, const Tolerances& tol) {
    const auto comm = commutant(s, tol);
    for (std::uint64_t seed : {0x5eedULL, 0xbadc0ffeeULL, 0x12345678ULL}) {
        if (auto m = try_bicommutant(s, comm, seed, tol)) return *m;
    }
    throw Error(ErrorKind::NoConvergence, "bicommutant_algebra",
                "could not resolve a block structure reproducing the generators");
}

CenterReport center_and_factor(const BlockAlgebra& m) {
    CenterReport r;
    r.center_dim = static_cast<Index>(m.block_count());
    r.is_factor = m.block_count() == 1;
    if (!r.is_factor)
        r.witness = std::make_pair(ComplexVector(m.frame().col(m.block_offset(0))),
                                   ComplexVector(m.frame().col(m.block_offset(1))));
    return r;
}

// ---------------------------------------------------------------------------
// conditional expectations

ConditionalExpectation::ConditionalExpectation(BlockAlgebra algebra, std::vector<std::vector<Index>> cells,
                                               const Tolerances&)
    : algebra_(std::move(algebra)), cells_(std::move(cells)) {
    const Index atoms = algebra_.atom_count();
    std::vector<int> seen(static_cast<std::size_t>(atoms), 0);
    for (const auto& cell : cells_) {
        if (cell.empty()) throw Error(ErrorKind::BadPartition, "conditional_expectation", "empty cell");
        for (Index a : cell) {
            if (a < 0 || a >= atoms)
                throw Error(ErrorKind::BadPartition, "conditional_expectation", "atom index out of range");
            if (seen[static_cast<std::size_t>(a)]++)
                throw Error(ErrorKind::BadPartition, "conditional_expectation", "cells overlap");
        }
        const std::size_t k0 = algebra_.atom(cell.front()).first;
        single_block_.push_back(std::all_of(cell.begin(), cell.end(),
                                            [&](Index a) { return algebra_.atom(a).first == k0; }));
    }
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c == 0; }))
        throw Error(ErrorKind::BadPartition, "conditional_expectation", "cells do not cover all atoms");
}

ComplexMatrix ConditionalExpectation::apply_unchecked(const ComplexMatrix& a) const {
    const auto comps = algebra_.components(a);
    std::vector<ComplexMatrix> out;
    for (const auto& c : comps) out.push_back(ComplexMatrix::Zero(c.rows(), c.cols()));

    for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
        const auto& cell = cells_[ci];
        if (single_block_[ci]) {
            const std::size_t k = algebra_.atom(cell.front()).first;
            for (Index x : cell)
                for (Index y : cell) {
                    const Index i = algebra_.atom(x).second;
                    const Index j = algebra_.atom(y).second;
                    out[k](i, j) = comps[k](i, j);
                }
            continue;
        }
        Complex acc = 0.0;
        double mass = 0.0;
        for (Index x : cell) {
            const auto [k, i] = algebra_.atom(x);
            const double w = algebra_.weights()[k] / double(algebra_.blocks()[k].size);
            acc += w * comps[k](i, i);
            mass += w;
        }
        for (Index x : cell) {
            const auto [k, i] = algebra_.atom(x);
            out[k](i, i) = acc / mass;
        }
    }
    return algebra_.assemble(out);
}

bool ConditionalExpectation::is_identity() const {
    for (const auto& cell : cells_) {
        const std::size_t k = algebra_.atom(cell.front()).first;
        const Index size = algebra_.blocks()[k].size;
        if (static_cast<Index>(cell.size()) != size) return false;
        if (!std::all_of(cell.begin(), cell.end(), [&](Index a) { return algebra_.atom(a).first == k; })) return false;
    }
    return true;
}

bool ConditionalExpectation::refines(const ConditionalExpectation& coarser) const {
    if (coarser.algebra_.atom_count() != algebra_.atom_count()) return false;
    std::vector<std::size_t> owner(static_cast<std::size_t>(algebra_.atom_count()));
    for (std::size_t c = 0; c < coarser.cells_.size(); ++c)
        for (Index a : coarser.cells_[c]) owner[static_cast<std::size_t>(a)] = c;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& cell = cells_[c];
        const std::size_t o = owner[static_cast<std::size_t>(cell.front())];
        for (Index a : cell)
            if (owner[static_cast<std::size_t>(a)] != o) return false;
        // an abelian (averaging) cell cannot refine a pinching cell into a
        // larger matrix piece, but a pinching cell refines an averaging one
        if (single_block_[c] && cell.size() > 1 && !coarser.single_block_[o]) return false;
    }
    return true;
}

ConditionalExpectation conditional_expectation(const BlockAlgebra& m, std::vector<std::vector<Index>> cells,
                                               const Tolerances& tol) {
    return ConditionalExpectation(m, std::move(cells), tol);
}

ConditionalExpectation identity_expectation(const BlockAlgebra& m) {
    std::vector<std::vector<Index>> cells;
    for (std::size_t k = 0; k < m.block_count(); ++k) {
        std::vector<Index> cell(static_cast<std::size_t>(m.blocks()[k].size));
        std::iota(cell.begin(), cell.end(), m.atom_offset(k));
        cells.push_back(std::move(cell));
    }
    return ConditionalExpectation(m, std::move(cells));
}

ComplexMatrix apply_expectation(const ConditionalExpectation& e, const ComplexMatrix& a, const Tolerances& tol) {
    if (affiliation_residual(a, e.algebra()) > tol.affiliation)
        throw Error(ErrorKind::NotMember, "apply_expectation", "operator is not a member of the algebra");
    return e.apply_unchecked(a);
}

// ---------------------------------------------------------------------------
// GNS

GnsRepresentation::GnsRepresentation(BlockAlgebra algebra) : algebra_(std::move(algebra)) {
    offsets_.push_back(0);
    for (const Block& b : algebra_.blocks()) offsets_.push_back(offsets_.back() + b.size * b.size);
    dim_ = offsets_.back();
    cyclic_ = ComplexVector::Zero(dim_);
    for (std::size_t k = 0; k < algebra_.block_count(); ++k) {
        const Index nk = algebra_.blocks()[k].size;
        const double scale = std::sqrt(algebra_.weights()[k] / double(nk));
        for (Index i = 0; i < nk; ++i) cyclic_(offsets_[k] + i * nk + i) = scale;
    }
}

ComplexMatrix GnsRepresentation::represent(const ComplexMatrix& a) const {
    const auto comps = algebra_.components(a);
    ComplexMatrix pi = ComplexMatrix::Zero(dim_, dim_);
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const Index nk = algebra_.blocks()[k].size;
        // a * e_{ij} = sum_l a_{li} e_{lj}: basis (l, j) <- (i, j) with weight a_{li}
        for (Index l = 0; l < nk; ++l)
            for (Index i = 0; i < nk; ++i)
                for (Index j = 0; j < nk; ++j) pi(offsets_[k] + l * nk + j, offsets_[k] + i * nk + j) = comps[k](l, i);
    }
    return pi;
}

ComplexVector GnsRepresentation::embed(const ComplexMatrix& a) const { return represent(a) * cyclic_; }

GnsRepresentation gns_standard_form(const BlockAlgebra& m) { return GnsRepresentation(m); }

// ---------------------------------------------------------------------------
// generalized singular numbers

double SingularValueFunction::step_length(std::size_t k) const {
    const double end = k + 1 < steps.size() ? steps[k + 1].start : 1.0;
    return end - steps[k].start;
}

double SingularValueFunction::value_at(double t) const {
    if (steps.empty() || t < 0.0 || t >= 1.0) return 0.0;
    double v = steps.front().value;
    for (const Step& s : steps) {
        if (s.start > t) break;
        v = s.value;
    }
    return v;
}

double SingularValueFunction::integral() const {
    double s = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) s += steps[k].value * step_length(k);
    return s;
}

SingularValueFunction singular_value_function(const ComplexMatrix& a, const BlockAlgebra& m, const Tolerances& tol) {
    if (affiliation_residual(a, m) > tol.affiliation)
        throw Error(ErrorKind::NotMember, "singular_value_function", "operator is not a member of the algebra");
    const auto comps = m.components(a);
    std::vector<std::pair<double, double>> values;  // (singular value, measure)
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const ComplexMatrix gram = comps[k].adjoint() * comps[k];
        const SpectralDecomposition sd = eig_hermitian(0.5 * (gram + gram.adjoint()), Symmetry::hermitian, tol);
        const double measure = m.weights()[k] / double(m.blocks()[k].size);
        for (Index i = 0; i < sd.dim(); ++i) values.emplace_back(std::sqrt(std::max(0.0, sd.eigenvalues(i))), measure);
    }
    std::stable_sort(values.begin(), values.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

    SingularValueFunction f;
    const double scale = values.empty() ? 0.0 : values.front().first;
    double t = 0.0;
    for (const auto& [value, measure] : values) {
        if (f.steps.empty() || std::abs(f.steps.back().value - value) > 1e-12 * std::max(1.0, scale))
            f.steps.push_back({t, value});
        t += measure;
    }
    return f;
}

}  // namespace vnlab
