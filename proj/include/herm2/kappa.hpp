#pragma once

#include <cstdint>
#include <vector>

#include "herm2/errors.hpp"

namespace herm2 {

using KElem = std::uint16_t; ///< bitmask of a polynomial in t of degree < r
using KVec  = std::vector<KElem>;

/**
 * The residue field of 2^r elements, F_2[t] modulo a fixed Conway polynomial.
 * Elements are bitmasks; bit i is the coefficient of t^i.
 */
class Kappa {
public:
    explicit Kappa(int r);

    int degree() const { return r_; }
    int size() const { return 1 << r_; }
    /** Defining polynomial as a bitmask, top bit t^r included. */
    std::uint32_t modulus() const { return mod_; }

    KElem add(KElem a, KElem b) const { return a ^ b; }
    KElem mul(KElem a, KElem b) const;
    KElem pow(KElem a, unsigned long long e) const;
    /** Inverse of a nonzero element. */
    KElem inv(KElem a) const;
    KElem frob(KElem a) const { return mul(a, a); }
    /** The unique square root, frob applied r-1 times. */
    KElem sqrt(KElem a) const;
    /** Absolute trace down to F_2, returns 0 or 1. */
    KElem abs_trace(KElem a) const;

    bool operator==(const Kappa& o) const { return r_ == o.r_; }

private:
    int r_;
    std::uint32_t mod_;
};

/* Row-major linear algebra over Kappa, sized for quotient-space work. */

struct KMat {
    int rows = 0, cols = 0;
    std::vector<KElem> a;

    KMat() = default;
    KMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}

    KElem& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    KElem at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

KMat km_mul(const Kappa& k, const KMat& A, const KMat& B);
KMat km_transpose(const KMat& A);
KVec km_apply(const Kappa& k, const KMat& A, const KVec& x);

/** Reduce A to row echelon form in place; returns the pivot column list. */
std::vector<int> km_rref(const Kappa& k, KMat& A);
int km_rank(const Kappa& k, KMat A);
/** Basis of the right kernel of A, one KVec per basis vector. */
std::vector<KVec> km_kernel(const Kappa& k, KMat A);
/** A particular solution of A x = b, or empty if inconsistent. */
bool km_solve(const Kappa& k, KMat A, KVec b, KVec& out);

/** Columns of A restricted to the subspace spanned by basis (as columns). */
KMat km_restrict(const Kappa& k, const KMat& form, const std::vector<KVec>& basis);

/**
 * Extend the span of `have` by vectors from `pool`, greedily in pool order.
 * Returns the indices of the chosen pool vectors.
 */
std::vector<int> km_extend_basis(const Kappa& k, const std::vector<KVec>& have,
                                 const std::vector<KVec>& pool, int ambient_dim);

} // namespace herm2
