#pragma once

#include "herm2/matrix.hpp"

namespace herm2 {

/**
 * A hermitian lattice of full rank, presented by its Gram matrix.
 * The form is conjugate-linear in the first argument.
 * Canonical storage: G = sigma(G)^t entrywise, and diagonal entries carry an
 * exactly zero pi-coordinate.
 */
struct Lattice {
    BMat gram;
    RingPtr ring;
};

/** Validate and wrap a Gram matrix; throws NotHermitian. */
Lattice make_lattice(const RingPtr& R, BMat gram);

int lat_rank(const Lattice& L);

/** h(x, y) = sigma(x)^t G y for coordinate column vectors. */
BElem h_eval(const BMat& G, const std::vector<BElem>& x, const std::vector<BElem>& y);

/** Minimum valuation of a Gram entry. Throws PrecisionExhausted when uncertain. */
int scale_exp(const Lattice& L);

/**
 * Valuation of the ideal generated by the values h(x, x).
 * Computed from diagonal entries and the traces of g_jk and pi * g_jk.
 * Always even. Throws PrecisionExhausted when uncertain.
 */
int norm_exp(const Lattice& L);
int norm_exp_gram(const BMat& G);

/** Gram scaled by w^j, j >= 0; indices of a splitting shift by 2j. */
Lattice rescale(const Lattice& L, int j);

/** The lattice with Gram sigma(U)^t G U. */
Lattice base_change(const Lattice& L, const BMat& U);

} // namespace herm2
