#pragma once

#include <random>
#include <vector>

#include "herm2/jordan.hpp"
#include "herm2/lattice.hpp"

namespace herm2::test {

inline RingPtr ring1(int r = 1, int k = 16, long long u = 1) {
    return make_ring(Case::unit_radicand, r, k, u);
}

inline RingPtr ring2(int r = 1, int k = 16, long long d = 1) {
    return make_ring(Case::even_radicand, r, k, d);
}

inline BElem bi(const RingPtr& R, long long c) { return b_from_int(R, c); }

/** a + b * pi from small integers. */
inline BElem be(const RingPtr& R, long long a, long long b) {
    Avec a0(static_cast<size_t>(R->r), cpp_int(0)), a1 = a0;
    a0[0] = a;
    a1[0] = b;
    return b_from_coeffs(R, a0, a1);
}

/** Gram from integer entry pairs (a, b) meaning a + b * pi. */
inline BMat gm(const RingPtr& R, std::vector<std::vector<std::pair<long long, long long>>> rows) {
    int n = static_cast<int>(rows.size());
    BMat G = bm_zero(R, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G.at(i, j) = be(R, rows[i][j].first, rows[i][j].second);
    return G;
}

inline Lattice lat(const RingPtr& R, std::vector<std::vector<std::pair<long long, long long>>> rows) {
    return make_lattice(R, gm(R, std::move(rows)));
}

inline BElem random_elem(const RingPtr& R, std::mt19937_64& rng) {
    Avec a0(static_cast<size_t>(R->r)), a1 = a0;
    for (int i = 0; i < R->r; ++i) {
        a0[i] = cpp_int(rng()) & ((cpp_int(1) << R->k) - 1);
        a1[i] = cpp_int(rng()) & ((cpp_int(1) << R->k) - 1);
    }
    return b_from_coeffs(R, a0, a1);
}

/** Random unimodular matrix: unit lower times unit upper triangular. */
inline BMat random_unimodular(const RingPtr& R, int n, std::mt19937_64& rng) {
    BMat Lo = bm_identity(R, n), Up = bm_identity(R, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i > j) Lo.at(i, j) = random_elem(R, rng);
            if (i < j) Up.at(i, j) = random_elem(R, rng);
        }
    // scale a diagonal entry by a random unit to leave triangular shape behind
    BMat U = bm_mul(Lo, Up);
    BElem unit = random_elem(R, rng);
    unit.a0[0] |= 1;
    for (int i = 0; i < n; ++i) U.at(i, 0) = b_mul(U.at(i, 0), unit);
    return U;
}

/** Direct-sum Gram out of diagonal blocks. */
inline BMat direct_sum(const RingPtr& R, const std::vector<BMat>& parts) {
    int n = 0;
    for (const BMat& p : parts) n += p.rows;
    BMat G = bm_zero(R, n, n);
    int off = 0;
    for (const BMat& p : parts) {
        for (int i = 0; i < p.rows; ++i)
            for (int j = 0; j < p.cols; ++j) G.at(off + i, off + j) = p.at(i, j);
        off += p.rows;
    }
    return G;
}

} // namespace herm2::test
