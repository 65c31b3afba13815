#pragma once

#include <optional>

#include "herm2/lattice.hpp"

namespace herm2 {

/**
 * One pi^i-modular constituent of a splitting.
 * The stored slice is a hermitian Gram of minimum entry valuation slice_scale;
 * slice_scale >= 0, slice_scale == index mod 2. For splittings produced from a
 * Gram matrix slice_scale == index; assembled data may place a block at a
 * formally shifted index, negative ones included.
 */
struct JordanBlock {
    int index = 0;
    int rank = 0;
    int slice_scale = 0;
    BMat slice;

    // classification data, filled by classify_blocks
    bool own_norm_max = false; ///< norm_exp(slice) equals the smallest value parity allows
    bool type_one = false;     ///< resolved type: I when true, II when false
    bool rank_odd = false;
    bool bound = false;        ///< has a type I neighbor per the parity rules
};

struct JordanDecomposition {
    std::vector<JordanBlock> blocks; ///< ascending index, every rank >= 1
    BMat transform;                  ///< sigma(U)^t G U block diagonal; empty when assembled
    RingPtr ring;
    int total_rank = 0;
    int min_index = 0;
    int bound_index = 0; ///< smallest N with no block at any index >= N
};

/** Split a lattice along pivot valuations. Throws Degenerate, PrecisionExhausted. */
JordanDecomposition jordan_split(const Lattice& L);

/** Wrap externally given blocks (index, Gram at its own scale) and classify. */
JordanDecomposition assemble_blocks(const RingPtr& R,
                                    std::vector<std::pair<int, BMat>> blocks);

/** Fill the type, subtype and boundness fields. Even indices resolve first. */
void classify_blocks(JordanDecomposition& dec);

/** Block at a given index, or null. */
const JordanBlock* block_at(const JordanDecomposition& dec, int index);

/**
 * Shift all indices by a uniform even amount so every index is nonnegative
 * and every slice sits at its index's scale; the shift is the smallest one
 * meeting both constraints without dividing any slice. Type data is unchanged.
 */
JordanDecomposition normalize_indices(const JordanDecomposition& dec);

/** Block-diagonal Gram of a normalized decomposition. */
Lattice assemble_lattice(const JordanDecomposition& dec);

/** The canonical rank <= 2 residual piece accompanying the hyperbolic part. */
enum class KTag {
    none,          ///< block is a sum of hyperbolic planes
    diag_unit,     ///< (a), a unit
    unit_pair,     ///< A(1, 2b, 1)
    even_pair,     ///< A(2d, 2b, 1), d the ring parameter
    trace_pair,    ///< A(2, 2b, pi)
    radicand_pair, ///< A(4a, 2d, pi)
};

std::string ktag_name(KTag t);

struct BlockCanonicalForm {
    int index = 0;
    int hyperbolic_count = 0; ///< number of H(index mod 2) summands
    KTag k_tag = KTag::none;
    std::vector<BElem> k_params; ///< parameters of the residual piece, in tag order
    BMat canonical_gram;         ///< the canonical Gram at scale index mod 2
    /**
     * sigma(W)^t * S * W congruent to canonical_gram, S the slice brought down
     * to scale index mod 2. Empty when a neighbor rewrite was needed instead.
     */
    BMat witness;
    /**
     * Present when a neighbor pivot was borrowed to absorb the last residual
     * piece into a hyperbolic plane; holds the rewritten splitting.
     */
    std::optional<JordanDecomposition> rewritten;
};

/**
 * Canonical form of one block. Covers ranks <= 3 directly and larger blocks
 * through piecewise splitting; throws CanonFail outside the supported shapes.
 */
BlockCanonicalForm canonicalize_block(const JordanDecomposition& dec, int index);

/* canonical Gram builders at scale i (0 or 1) */
BMat gram_hyperbolic(const RingPtr& R, int i);
/** A(a, b, c) = [[a, c], [sigma(c), b]]. */
BMat gram_pair(const BElem& a, const BElem& b, const BElem& c);

} // namespace herm2
