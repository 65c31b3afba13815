#include "herm2/lattice.hpp"

#include <algorithm>

namespace herm2 {

namespace {

const RingPtr& mat_ring(const BMat& A) {
    if (A.a.empty() || !A.a.front().ring) throw Error("matrix without a ring context");
    return A.a.front().ring;
}

} // namespace

BMat bm_zero(const RingPtr& R, int rows, int cols) { return BMat(rows, cols, b_zero(R)); }

BMat bm_identity(const RingPtr& R, int n) {
    BMat M = bm_zero(R, n, n);
    for (int i = 0; i < n; ++i) M.at(i, i) = b_one(R);
    return M;
}

BMat bm_mul(const BMat& A, const BMat& B) {
    if (A.cols != B.rows) throw Error("bm_mul shape mismatch");
    const RingPtr& R = mat_ring(A);
    BMat C = bm_zero(R, A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const BElem& aik = A.at(i, k);
            if (b_is_zero(aik)) continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) = b_add(C.at(i, j), b_mul(aik, B.at(k, j)));
        }
    return C;
}

BMat bm_add(const BMat& A, const BMat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw Error("bm_add shape mismatch");
    BMat C = A;
    for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = b_add(A.a[i], B.a[i]);
    return C;
}

BMat bm_sub(const BMat& A, const BMat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw Error("bm_sub shape mismatch");
    BMat C = A;
    for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = b_sub(A.a[i], B.a[i]);
    return C;
}

BMat bm_sigma_t(const BMat& A) {
    BMat C(A.cols, A.rows, A.a.front());
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) C.at(j, i) = b_sigma(A.at(i, j));
    return C;
}

BMat bm_scale(const BElem& c, const BMat& A) {
    BMat C = A;
    for (BElem& e : C.a) e = b_mul(c, e);
    return C;
}

BMat bm_conj(const BMat& G, const BMat& U) { return bm_mul(bm_sigma_t(U), bm_mul(G, U)); }

BElem bm_det(const BMat& A) {
    if (A.rows != A.cols) throw Error("bm_det on a non-square matrix");
    const RingPtr& R = mat_ring(A);
    int n = A.rows;
    if (n == 0) return b_one(R);
    // Laplace expansion, memoized over column subsets: division-free, and the
    // subset count stays tiny at the ranks that occur here.
    std::vector<BElem> memo(static_cast<size_t>(1) << n, b_zero(R));
    std::vector<bool> have(static_cast<size_t>(1) << n, false);
    // det of the square block on rows [n - |S|, n) and column set S
    auto minor_det = [&](auto&& self, unsigned cols_left) -> BElem {
        if (have[cols_left]) return memo[cols_left];
        BElem acc = cols_left ? b_zero(R) : b_one(R);
        int row = n - __builtin_popcount(cols_left);
        int sign = 1;
        for (int j = 0; j < n; ++j) {
            if (!((cols_left >> j) & 1)) continue;
            const BElem& e = A.at(row, j);
            if (!b_is_zero(e)) {
                BElem term = b_mul(e, self(self, cols_left & ~(1u << j)));
                acc = (sign > 0) ? b_add(acc, term) : b_sub(acc, term);
            }
            sign = -sign;
        }
        memo[cols_left] = acc;
        have[cols_left] = true;
        return acc;
    };
    return minor_det(minor_det, (1u << n) - 1);
}

std::optional<int> bm_min_val(const BMat& A) {
    std::optional<int> best;
    for (const BElem& e : A.a) {
        auto v = b_val(e);
        if (v && (!best || *v < *best)) best = v;
    }
    return best;
}

bool bm_eq(const BMat& A, const BMat& B) {
    if (A.rows != B.rows || A.cols != B.cols) return false;
    for (size_t i = 0; i < A.a.size(); ++i)
        if (!b_eq(A.a[i], B.a[i])) return false;
    return true;
}

bool bm_congruent(const BMat& A, const BMat& B, int pi_depth) {
    if (A.rows != B.rows || A.cols != B.cols) return false;
    for (size_t i = 0; i < A.a.size(); ++i) {
        auto v = b_val(b_sub(A.a[i], B.a[i]));
        if (v && *v < pi_depth) return false;
    }
    return true;
}

KMat bm_residue(const BMat& A) {
    KMat M(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) M.at(i, j) = b_residue(A.at(i, j));
    return M;
}

Lattice make_lattice(const RingPtr& R, BMat gram) {
    if (gram.rows != gram.cols) throw NotHermitian("Gram matrix must be square");
    for (const BElem& e : gram.a)
        if (!e.ring || !(e.ring == R || e.ring->same_structure(*R))) throw ContextMismatch();
    for (int i = 0; i < gram.rows; ++i) {
        for (int j = 0; j < gram.cols; ++j)
            if (!b_eq(gram.at(i, j), b_sigma(gram.at(j, i))))
                throw NotHermitian("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") does not match the conjugate of its mirror");
        for (const cpp_int& c : gram.at(i, i).a1)
            if (mod_pow2(c, gram.at(i, i).prec) != 0)
                throw NotHermitian("diagonal entry " + std::to_string(i) +
                                   " is not fixed by the involution");
    }
    return Lattice{std::move(gram), R};
}

int lat_rank(const Lattice& L) { return L.gram.rows; }

BElem h_eval(const BMat& G, const std::vector<BElem>& x, const std::vector<BElem>& y) {
    if (static_cast<int>(x.size()) != G.rows || static_cast<int>(y.size()) != G.cols)
        throw Error("h_eval dimension mismatch");
    const RingPtr& R = mat_ring(G);
    BElem acc = b_zero(R);
    for (int i = 0; i < G.rows; ++i) {
        if (b_is_zero(x[i])) continue;
        BElem sx = b_sigma(x[i]);
        for (int j = 0; j < G.cols; ++j)
            acc = b_add(acc, b_mul(sx, b_mul(G.at(i, j), y[j])));
    }
    return acc;
}

int scale_exp(const Lattice& L) {
    auto v = bm_min_val(L.gram);
    if (!v) throw PrecisionExhausted("scale_exp");
    return *v;
}

int norm_exp_gram(const BMat& G) {
    const RingPtr& R = mat_ring(G);
    BElem pi = b_pi(R);
    std::optional<int> best;
    auto feed = [&](const BElem& e) {
        auto v = b_val(e);
        if (v && (!best || *v < *best)) best = v;
        return v.has_value();
    };
    bool any_certain = true;
    for (int j = 0; j < G.rows; ++j) any_certain &= feed(G.at(j, j));
    for (int j = 0; j < G.rows; ++j)
        for (int k = j + 1; k < G.cols; ++k) {
            any_certain &= feed(b_trace(G.at(j, k)));
            any_certain &= feed(b_trace(b_mul(pi, G.at(j, k))));
        }
    if (!best) {
        if (!any_certain) throw PrecisionExhausted("norm_exp");
        throw Degenerate("norm ideal vanishes");
    }
    return *best;
}

int norm_exp(const Lattice& L) { return norm_exp_gram(L.gram); }

Lattice rescale(const Lattice& L, int j) {
    if (j < 0) throw Error("rescale wants a nonnegative exponent");
    BMat G = L.gram;
    for (BElem& e : G.a) e = b_mul_w(e, j);
    return Lattice{std::move(G), L.ring};
}

Lattice base_change(const Lattice& L, const BMat& U) {
    return make_lattice(L.ring, bm_conj(L.gram, U));
}

} // namespace herm2
