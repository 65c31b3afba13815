#include "herm2/kappa.hpp"

namespace herm2 {

namespace {

// Conway polynomials for F_{2^r}, bitmask with the t^r bit set.
constexpr std::uint32_t kConway[9] = {
    0,     // unused
    0x3,   // t + 1
    0x7,   // t^2 + t + 1
    0xB,   // t^3 + t + 1
    0x13,  // t^4 + t + 1
    0x25,  // t^5 + t^2 + 1
    0x57,  // t^6 + t^4 + t^2 + t + 1
    0x83,  // t^7 + t + 1
    0x11D, // t^8 + t^4 + t^3 + t^2 + 1
};

} // namespace

Kappa::Kappa(int r) : r_(r) {
    if (r < 1 || r > 8) throw UnsupportedDegree(r);
    mod_ = kConway[r];
}

KElem Kappa::mul(KElem a, KElem b) const {
    std::uint32_t acc = 0, x = a;
    for (std::uint32_t y = b; y; y >>= 1) {
        if (y & 1) acc ^= x;
        x <<= 1;
        if (x & (1u << r_)) x ^= mod_;
    }
    return static_cast<KElem>(acc);
}

KElem Kappa::pow(KElem a, unsigned long long e) const {
    KElem acc = 1, base = a;
    while (e) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

KElem Kappa::inv(KElem a) const {
    // a^(2^r - 2); the field is small enough that pow is fine
    return pow(a, static_cast<unsigned long long>(size()) - 2);
}

KElem Kappa::sqrt(KElem a) const {
    KElem x = a;
    for (int i = 0; i < r_ - 1; ++i) x = frob(x);
    return x;
}

KElem Kappa::abs_trace(KElem a) const {
    KElem acc = 0, x = a;
    for (int i = 0; i < r_; ++i) {
        acc ^= x;
        x = frob(x);
    }
    // the trace lands in F_2
    return acc & 1;
}

KMat km_mul(const Kappa& k, const KMat& A, const KMat& B) {
    KMat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int l = 0; l < A.cols; ++l) {
            KElem v = A.at(i, l);
            if (!v) continue;
            for (int j = 0; j < B.cols; ++j)
                C.at(i, j) ^= k.mul(v, B.at(l, j));
        }
    return C;
}

KMat km_transpose(const KMat& A) {
    KMat T(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
    return T;
}

KVec km_apply(const Kappa& k, const KMat& A, const KVec& x) {
    KVec y(A.rows, 0);
    for (int i = 0; i < A.rows; ++i) {
        KElem acc = 0;
        for (int j = 0; j < A.cols; ++j) acc ^= k.mul(A.at(i, j), x[j]);
        y[i] = acc;
    }
    return y;
}

std::vector<int> km_rref(const Kappa& k, KMat& A) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < A.cols && row < A.rows; ++col) {
        int sel = -1;
        for (int i = row; i < A.rows; ++i)
            if (A.at(i, col)) { sel = i; break; }
        if (sel < 0) continue;
        if (sel != row)
            for (int j = 0; j < A.cols; ++j) std::swap(A.at(sel, j), A.at(row, j));
        KElem piv = k.inv(A.at(row, col));
        for (int j = 0; j < A.cols; ++j) A.at(row, j) = k.mul(A.at(row, j), piv);
        for (int i = 0; i < A.rows; ++i) {
            if (i == row || !A.at(i, col)) continue;
            KElem f = A.at(i, col);
            for (int j = 0; j < A.cols; ++j) A.at(i, j) ^= k.mul(f, A.at(row, j));
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

int km_rank(const Kappa& k, KMat A) {
    return static_cast<int>(km_rref(k, A).size());
}

std::vector<KVec> km_kernel(const Kappa& k, KMat A) {
    std::vector<int> pivots = km_rref(k, A);
    std::vector<bool> is_pivot(A.cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<KVec> basis;
    for (int free = 0; free < A.cols; ++free) {
        if (is_pivot[free]) continue;
        KVec v(A.cols, 0);
        v[free] = 1;
        for (size_t p = 0; p < pivots.size(); ++p)
            v[pivots[p]] = A.at(static_cast<int>(p), free);
        basis.push_back(v);
    }
    return basis;
}

bool km_solve(const Kappa& k, KMat A, KVec b, KVec& out) {
    KMat aug(A.rows, A.cols + 1);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) aug.at(i, j) = A.at(i, j);
        aug.at(i, A.cols) = b[i];
    }
    std::vector<int> pivots = km_rref(k, aug);
    for (int c : pivots)
        if (c == A.cols) return false;
    out.assign(A.cols, 0);
    for (size_t p = 0; p < pivots.size(); ++p)
        out[pivots[p]] = aug.at(static_cast<int>(p), A.cols);
    return true;
}

KMat km_restrict(const Kappa& k, const KMat& form, const std::vector<KVec>& basis) {
    int d = static_cast<int>(basis.size());
    KMat R(d, d);
    for (int i = 0; i < d; ++i) {
        KVec fi = km_apply(k, form, basis[i]);
        for (int j = 0; j < d; ++j) {
            KElem acc = 0;
            for (int t = 0; t < form.cols; ++t) acc ^= k.mul(basis[j][t], fi[t]);
            R.at(i, j) = acc;
        }
    }
    return R;
}

std::vector<int> km_extend_basis(const Kappa& k, const std::vector<KVec>& have,
                                 const std::vector<KVec>& pool, int ambient_dim) {
    std::vector<int> chosen;
    // greedy: accept a pool vector when it raises the rank of the stack so far
    KMat acc(static_cast<int>(have.size()), ambient_dim);
    for (size_t i = 0; i < have.size(); ++i)
        for (int j = 0; j < ambient_dim; ++j) acc.at(static_cast<int>(i), j) = have[i][j];
    int cur = km_rank(k, acc);
    for (size_t p = 0; p < pool.size(); ++p) {
        KMat trial(acc.rows + 1, ambient_dim);
        for (int i = 0; i < acc.rows; ++i)
            for (int j = 0; j < ambient_dim; ++j) trial.at(i, j) = acc.at(i, j);
        for (int j = 0; j < ambient_dim; ++j) trial.at(acc.rows, j) = pool[p][j];
        if (km_rank(k, trial) > cur) {
            acc = trial;
            ++cur;
            chosen.push_back(static_cast<int>(p));
        }
    }
    return chosen;
}

} // namespace herm2
