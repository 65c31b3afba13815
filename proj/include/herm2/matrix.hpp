#pragma once

#include <vector>

#include "herm2/ring.hpp"

namespace herm2 {

/** Small dense row-major matrix over B. */
struct BMat {
    int rows = 0, cols = 0;
    std::vector<BElem> a;

    BMat() = default;
    BMat(int r, int c, const BElem& fill) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    BElem& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const BElem& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

BMat bm_zero(const RingPtr& R, int rows, int cols);
BMat bm_identity(const RingPtr& R, int n);
BMat bm_mul(const BMat& A, const BMat& B);
BMat bm_add(const BMat& A, const BMat& B);
BMat bm_sub(const BMat& A, const BMat& B);
/** Conjugate transpose, sigma applied entrywise. */
BMat bm_sigma_t(const BMat& A);
BMat bm_scale(const BElem& c, const BMat& A);
/** sigma(U)^t G U. */
BMat bm_conj(const BMat& G, const BMat& U);

/** Division-free determinant, exact to the entries' precision. */
BElem bm_det(const BMat& A);

/** Minimum pi-valuation over all entries; nullopt when every entry vanishes. */
std::optional<int> bm_min_val(const BMat& A);

bool bm_eq(const BMat& A, const BMat& B);
/** Entrywise val(A - B) >= depth. */
bool bm_congruent(const BMat& A, const BMat& B, int pi_depth);

/** Entrywise residue mod pi. */
KMat bm_residue(const BMat& A);

} // namespace herm2
