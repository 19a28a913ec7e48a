#pragma once

// Finite-dimensional surrogates for finite von Neumann algebras.
//
// A BlockAlgebra is M = (+)_k M_{n_k} (x) I_{m_k} written in an orthonormal
// "canonical" frame W: canonical index o_k + i*m_k + r (block k, internal
// index i, multiplicity copy r) is the ambient vector W.col(o_k + i*m_k + r).
// When W is a permutation matrix it is stored as the basis map perm with
// W(perm[c], c) = 1. The trace is tau(A) = sum_k c_k tr(A_k)/n_k with
// sum_k c_k = 1.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vnlab/lin_core.hpp"

namespace vnlab {

struct Block {
    Index size = 1;          // n_k
    Index multiplicity = 1;  // m_k

    friend bool operator==(const Block&, const Block&) = default;
};

class BlockAlgebra {
public:
    // Throws BadWeights / BadPermutation.
    static BlockAlgebra from_permutation(std::vector<Block> blocks, std::vector<double> weights,
                                         std::vector<Index> perm,
                                         const Tolerances& tol = default_tolerances());
    // frame must be unitary of size sum n_k m_k.
    static BlockAlgebra from_frame(std::vector<Block> blocks, std::vector<double> weights,
                                   ComplexMatrix frame, const Tolerances& tol = default_tolerances());

    // The trace weights of the normalized counting measure, c_k = n_k m_k / N.
    static std::vector<double> counting_weights(const std::vector<Block>& blocks);

    const std::vector<Block>& blocks() const noexcept { return data_->blocks; }
    const std::vector<double>& weights() const noexcept { return data_->weights; }
    const ComplexMatrix& frame() const noexcept { return data_->frame; }
    const std::optional<std::vector<Index>>& permutation() const noexcept { return data_->perm; }
    Index ambient_dim() const noexcept { return data_->ambient_dim; }
    std::size_t block_count() const noexcept { return data_->blocks.size(); }

    Index block_offset(std::size_t k) const { return data_->offsets.at(k); }
    Index canonical_index(std::size_t k, Index internal, Index copy) const {
        return data_->offsets.at(k) + internal * data_->blocks[k].multiplicity + copy;
    }
    // Atoms are (block, internal index) pairs numbered block by block.
    Index atom_count() const noexcept { return data_->atom_offsets.back(); }
    Index atom_offset(std::size_t k) const { return data_->atom_offsets.at(k); }
    std::pair<std::size_t, Index> atom(Index a) const;

    // sum_k n_k^2 = dim_C M = dim_R u(M)
    Index algebra_dim() const noexcept;
    // sum_k m_k^2 = dim_C M'
    Index commutant_dim() const noexcept;

    ComplexMatrix to_canonical(const ComplexMatrix& a) const;
    ComplexMatrix from_canonical(const ComplexMatrix& a) const;

    // A_k read off the canonical frame, averaged over multiplicity copies.
    std::vector<ComplexMatrix> components(const ComplexMatrix& a) const;
    // (+)_k A_k (x) I_{m_k} in the ambient basis.
    ComplexMatrix assemble(const std::vector<ComplexMatrix>& components) const;

    // Matrix units of M (sum n_k^2 of them) in the ambient basis.
    std::vector<ComplexMatrix> generators() const;
    // Matrix units of M' (sum m_k^2 of them) in the ambient basis.
    std::vector<ComplexMatrix> commutant_generators() const;
    ComplexMatrix central_projection(std::size_t k) const;

private:
    struct Data {
        std::vector<Block> blocks;
        std::vector<double> weights;
        ComplexMatrix frame;
        std::optional<std::vector<Index>> perm;
        std::vector<Index> offsets;       // canonical offsets, size blocks+1
        std::vector<Index> atom_offsets;  // size blocks+1
        Index ambient_dim = 0;
    };
    explicit BlockAlgebra(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
    static std::shared_ptr<Data> prepare(std::vector<Block> blocks, std::vector<double> weights,
                                         const Tolerances& tol);

    std::shared_ptr<const Data> data_;
};

// Public constructor: weights must be positive and sum to one, perm a permutation.
BlockAlgebra make_block_algebra(std::vector<Block> blocks, std::vector<double> weights,
                                std::vector<Index> perm, const Tolerances& tol = default_tolerances());

// Diagonal algebra C^n, uniform weights.
BlockAlgebra diagonal_algebra(Index n);
// Full matrix algebra M_n, one block.
BlockAlgebra full_matrix_algebra(Index n);

// {H}' for a Hermitian H: one full block per eigenspace (clustered at tol.cluster_gap).
BlockAlgebra eigenspace_algebra(const ComplexMatrix& hermitian,
                                const Tolerances& tol = default_tolerances());

nlohmann::json algebra_to_json(const BlockAlgebra& m);
BlockAlgebra algebra_from_json(const nlohmann::json& j, const Tolerances& tol = default_tolerances());

// Weighted normalized trace. Throws NotMember if a is not in M.
Complex trace_of(const ComplexMatrix& a, const BlockAlgebra& m,
                 const Tolerances& tol = default_tolerances());

struct AffiliationCertificate {
    ComplexMatrix op;
    BlockAlgebra algebra;
    double max_commutator_residual = 0.0;
    bool verdict = false;
};

// max_j |[a, G_j]|_HS / (|a|_op |G_j|_op) over commutant matrix units G_j.
double affiliation_residual(const ComplexMatrix& a, const BlockAlgebra& m);
AffiliationCertificate check_affiliated(const ComplexMatrix& a, const BlockAlgebra& m,
                                        const Tolerances& tol = default_tolerances());

// HS-orthonormal basis of {X : XA = AX, XA* = A*X for all A in s}.
std::vector<ComplexMatrix> commutant(const std::vector<ComplexMatrix>& s,
                                     const Tolerances& tol = default_tolerances());

// Block structure of s'' found by simultaneously block-diagonalizing s'.
BlockAlgebra bicommutant_algebra(const std::vector<ComplexMatrix>& s,
                                 const Tolerances& tol = default_tolerances());

struct CenterReport {
    Index center_dim = 0;
    bool is_factor = false;
    // Unit vectors in two different central subspaces when not a factor.
    std::optional<std::pair<ComplexVector, ComplexVector>> witness;
};

CenterReport center_and_factor(const BlockAlgebra& m);

// Trace-preserving conditional expectation onto the subalgebra described by a
// partition of the atoms of M. A cell inside a single block keeps the
// corresponding diagonal sub-block (pinching); a cell touching several blocks
// becomes one abelian summand whose value is the trace-weighted mean of the
// diagonal entries it covers.
class ConditionalExpectation {
public:
    ConditionalExpectation(BlockAlgebra algebra, std::vector<std::vector<Index>> cells,
                           const Tolerances& tol = default_tolerances());

    const BlockAlgebra& algebra() const noexcept { return algebra_; }
    const std::vector<std::vector<Index>>& cells() const noexcept { return cells_; }

    // Applies E to the block components of a member, without a membership check.
    ComplexMatrix apply_unchecked(const ComplexMatrix& a) const;

    bool is_identity() const;
    // Every cell of this lies inside a cell of coarser.
    bool refines(const ConditionalExpectation& coarser) const;

private:
    BlockAlgebra algebra_;
    std::vector<std::vector<Index>> cells_;
    std::vector<bool> single_block_;
};

ConditionalExpectation conditional_expectation(const BlockAlgebra& m,
                                               std::vector<std::vector<Index>> cells,
                                               const Tolerances& tol = default_tolerances());
ConditionalExpectation identity_expectation(const BlockAlgebra& m);
// Throws NotMember when a is not in the expectation's algebra.
ComplexMatrix apply_expectation(const ConditionalExpectation& e, const ComplexMatrix& a,
                                const Tolerances& tol = default_tolerances());

// Left-regular representation of M on L^2(M, tau) in the orthonormal basis
// e^{(k)}_{ij} / sqrt(c_k / n_k), ordered (k, i, j).
class GnsRepresentation {
public:
    explicit GnsRepresentation(BlockAlgebra algebra);

    Index dim() const noexcept { return dim_; }
    const ComplexVector& cyclic_vector() const noexcept { return cyclic_; }
    const BlockAlgebra& algebra() const noexcept { return algebra_; }

    ComplexMatrix represent(const ComplexMatrix& a) const;
    // pi(a) xi_tau, the image of a in L^2(M, tau).
    ComplexVector embed(const ComplexMatrix& a) const;

private:
    BlockAlgebra algebra_;
    Index dim_ = 0;
    std::vector<Index> offsets_;
    ComplexVector cyclic_;
};

GnsRepresentation gns_standard_form(const BlockAlgebra& m);

// Right-continuous non-increasing step function t -> mu_t on [0, 1).
struct SingularValueFunction {
    struct Step {
        double start = 0.0;
        double value = 0.0;
    };
    std::vector<Step> steps;

    double value_at(double t) const;
    double integral() const;
    double total_measure() const noexcept { return 1.0; }
    double step_length(std::size_t k) const;
};

SingularValueFunction singular_value_function(const ComplexMatrix& a, const BlockAlgebra& m,
                                              const Tolerances& tol = default_tolerances());

}  // namespace vnlab
