#include "herm2/quotient.hpp"

#include <algorithm>

namespace herm2 {

namespace {

std::vector<BElem> lift_vec(const RingPtr& R, const KVec& v) {
    std::vector<BElem> out;
    out.reserve(v.size());
    for (KElem c : v) out.push_back(b_lift(R, c));
    return out;
}

/** h(lift x, lift y) against the companion Gram; lifts are sigma-fixed. */
BElem pair_eval(const RingPtr& R, const BMat& M, const KVec& x, const KVec& y) {
    std::vector<BElem> lx = lift_vec(R, x), ly = lift_vec(R, y);
    BElem acc = b_zero(R);
    for (int j = 0; j < M.rows; ++j) {
        if (!x[static_cast<size_t>(j)]) continue;
        for (int k = 0; k < M.cols; ++k) {
            if (!y[static_cast<size_t>(k)]) continue;
            acc = b_add(acc, b_mul(b_mul(lx[static_cast<size_t>(j)], M.at(j, k)),
                                   ly[static_cast<size_t>(k)]));
        }
    }
    return acc;
}

KElem residue_div2(const BElem& x, int e) { return b_residue(b_div2(x, e)); }

KVec axpy_span(const Kappa& kap, const std::vector<KVec>& span, const KVec& mu, int n) {
    KVec out(static_cast<size_t>(n), 0);
    for (size_t t = 0; t < span.size(); ++t)
        for (int c = 0; c < n; ++c)
            out[static_cast<size_t>(c)] = kap.add(
                out[static_cast<size_t>(c)], kap.mul(mu[t], span[t][static_cast<size_t>(c)]));
    return out;
}

/**
 * Kernel of the semilinear functional x = sum mu_t span_t -> sum mu_t^2 vals_t,
 * returned as ambient vectors. Linear in nu = mu^2 because Frobenius is a
 * field automorphism.
 */
std::vector<KVec> semilinear_kernel(const Kappa& kap, const std::vector<KVec>& span,
                                    const KVec& vals, int n) {
    KMat row(1, static_cast<int>(span.size()));
    for (size_t t = 0; t < span.size(); ++t) row.at(0, static_cast<int>(t)) = vals[t];
    std::vector<KVec> out;
    for (const KVec& nu : km_kernel(kap, row)) {
        KVec mu(nu.size());
        for (size_t t = 0; t < nu.size(); ++t) mu[t] = kap.sqrt(nu[t]);
        out.push_back(axpy_span(kap, span, mu, n));
    }
    return out;
}

std::vector<KVec> identity_basis(int n) {
    std::vector<KVec> out;
    for (int j = 0; j < n; ++j) {
        KVec e(static_cast<size_t>(n), 0);
        e[static_cast<size_t>(j)] = 1;
        out.push_back(std::move(e));
    }
    return out;
}

bool quadratic_active(const RingPtr& R, int row) {
    bool odd = (row % 2) != 0;
    return (R->cse == Case::unit_radicand) ? odd : !odd;
}

} // namespace

SublatticeChain sublattice_chain(const JordanDecomposition& dec, int row) {
    const RingPtr& R = dec.ring;
    const JordanBlock* own = block_at(dec, row);
    if (!own) throw Error("no block at row " + std::to_string(row));
    if (dec.min_index < 0) throw Error("sublattice chain requires nonnegative indices");
    for (const auto& b : dec.blocks)
        if (b.slice_scale != b.index) throw Error("sublattice chain requires normalized slices");

    SublatticeChain ch;
    ch.row = row;
    ch.l = row;
    ch.m = (row + 1) / 2;
    ch.ring = R;

    // own block first, the rest by distance, nearer and lower first
    std::vector<const JordanBlock*> order{own};
    for (const auto& b : dec.blocks)
        if (b.index != row) order.push_back(&b);
    std::sort(order.begin() + 1, order.end(), [&](const JordanBlock* x, const JordanBlock* y) {
        int dx = std::abs(x->index - row), dy = std::abs(y->index - row);
        return dx != dy ? dx < dy : x->index < y->index;
    });

    int n = 0;
    for (const JordanBlock* b : order) n += b->rank;
    ch.ambient_dim = n;

    ch.companion_gram = bm_zero(R, n, n);
    int off = 0;
    for (const JordanBlock* b : order) {
        int c = std::max(0, row - b->index);
        for (int i = 0; i < b->rank; ++i) {
            ch.coord_block.push_back(b->index);
            for (int j = 0; j < b->rank; ++j)
                ch.companion_gram.at(off + i, off + j) = b_mul_w(b->slice.at(i, j), c);
        }
        off += b->rank;
    }

    const Kappa& kap = R->kappa;
    const BMat& M = ch.companion_gram;
    bool even = (row % 2) == 0;

    // symmetric residue of h scaled down to the working valuation
    ch.sym_residue = KMat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            BElem e = even ? M.at(i, j) : b_mul(M.at(i, j), b_pi(R));
            ch.sym_residue.at(i, j) = b_residue(b_div_w(e, ch.m));
        }

    KVec p(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) p[static_cast<size_t>(j)] = residue_div2(M.at(j, j), ch.m);

    bool additive = even || R->cse == Case::even_radicand;
    if (additive) {
        ch.basis_B = semilinear_kernel(kap, identity_basis(n), p, n);
    } else {
        ch.nonadditive_branch = true;
        ch.basis_B = identity_basis(n);
    }

    ch.basis_X = km_kernel(kap, ch.sym_residue);

    if (even) {
        bool trivial = std::all_of(p.begin(), p.end(), [](KElem c) { return c == 0; });
        KVec e(static_cast<size_t>(n), 0);
        if (!trivial) {
            KMat S2(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) S2.at(i, j) = kap.frob(ch.sym_residue.at(i, j));
            KVec z;
            if (!km_solve(kap, S2, p, z)) throw NoSolution("special vector");
            for (size_t t = 0; t < z.size(); ++t) e[t] = kap.sqrt(z[t]);
        }
        ch.special_vector = e;
        ch.basis_W = ch.basis_X;
        for (int pick : km_extend_basis(kap, ch.basis_W, {e}, n)) {
            (void)pick;
            ch.basis_W.push_back(e);
        }
    } else {
        ch.basis_W = ch.basis_X;
    }

    if (!quadratic_active(R, row)) {
        KMat SB = km_restrict(kap, ch.sym_residue, ch.basis_B);
        for (const KVec& mu : km_kernel(kap, SB))
            ch.basis_Y.push_back(axpy_span(kap, ch.basis_B, mu, n));
        ch.basis_Z = ch.basis_Y;
    } else {
        int dq = (R->cse == Case::unit_radicand) ? ch.m : ch.m + 1;
        const std::vector<KVec>& V =
            (R->cse == Case::unit_radicand) ? identity_basis(n) : ch.basis_B;
        int d = static_cast<int>(V.size());
        KMat polar(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                polar.at(a, b) = residue_div2(
                    b_trace(pair_eval(R, M, V[static_cast<size_t>(a)], V[static_cast<size_t>(b)])),
                    dq);
        for (const KVec& mu : km_kernel(kap, polar))
            ch.basis_Y.push_back(axpy_span(kap, V, mu, n));

        ch.sectioned = R->cse == Case::even_radicand && own->type_one;
        KVec qvals(ch.basis_Y.size());
        for (size_t t = 0; t < ch.basis_Y.size(); ++t)
            qvals[t] = residue_div2(pair_eval(R, M, ch.basis_Y[t], ch.basis_Y[t]), dq);
        ch.basis_Z = semilinear_kernel(kap, ch.basis_Y, qvals, n);
    }

    return ch;
}

ResidueForm induced_symplectic(const SublatticeChain& chain, const JordanDecomposition& dec) {
    const RingPtr& R = chain.ring;
    (void)dec;
    if (quadratic_active(R, chain.row)) throw CaseMismatch("row parity does not carry this residue form");
    const Kappa& kap = R->kappa;

    ResidueForm out;
    out.kind = FormKind::symplectic;
    for (int pick : km_extend_basis(kap, chain.basis_Y, chain.basis_B, chain.ambient_dim))
        out.quotient_basis.push_back(chain.basis_B[static_cast<size_t>(pick)]);
    out.dim = static_cast<int>(out.quotient_basis.size());
    out.matrix = km_restrict(kap, chain.sym_residue, out.quotient_basis);
    return out;
}

ResidueForm induced_quadratic(const SublatticeChain& chain, const JordanDecomposition& dec) {
    const RingPtr& R = chain.ring;
    if (!quadratic_active(R, chain.row)) throw CaseMismatch("row parity does not carry this residue form");
    const Kappa& kap = R->kappa;
    const JordanBlock* own = block_at(dec, chain.row);
    if (!own) throw Error("decomposition does not match the chain");

    ResidueForm out;
    out.kind = FormKind::quadratic;

    if (chain.sectioned) {
        // values depend on the section; only the dimension is well-posed,
        // and the polar rank pins it against the block label
        out.sectioned = true;
        out.dim = own->rank_odd ? own->rank : own->rank - 1;
        int polar_rank = static_cast<int>(chain.basis_B.size() - chain.basis_Y.size());
        int expect = own->rank_odd ? own->rank - 1 : own->rank - 2;
        if (polar_rank != expect) throw Error("sectioned row fails the polar rank check");
        return out;
    }

    int dq = (R->cse == Case::unit_radicand) ? chain.m : chain.m + 1;
    const std::vector<KVec> V = (R->cse == Case::unit_radicand)
                                    ? identity_basis(chain.ambient_dim)
                                    : chain.basis_B;
    for (int pick : km_extend_basis(kap, chain.basis_Z, V, chain.ambient_dim))
        out.quotient_basis.push_back(V[static_cast<size_t>(pick)]);
    out.dim = static_cast<int>(out.quotient_basis.size());

    const BMat& M = chain.companion_gram;
    out.matrix = KMat(out.dim, out.dim);
    for (int a = 0; a < out.dim; ++a)
        for (int b = 0; b < out.dim; ++b)
            out.matrix.at(a, b) =
                residue_div2(b_trace(pair_eval(R, M, out.quotient_basis[static_cast<size_t>(a)],
                                               out.quotient_basis[static_cast<size_t>(b)])),
                             dq);
    for (int a = 0; a < out.dim; ++a)
        out.diag.push_back(residue_div2(
            pair_eval(R, M, out.quotient_basis[static_cast<size_t>(a)],
                      out.quotient_basis[static_cast<size_t>(a)]),
            dq));
    return out;
}

KElem quad_eval(const Kappa& kappa, const ResidueForm& form, const KVec& x) {
    if (form.kind != FormKind::quadratic || form.sectioned)
        throw Error("form carries no quadratic values");
    KElem acc = 0;
    for (int a = 0; a < form.dim; ++a) {
        KElem xa = x[static_cast<size_t>(a)];
        if (!xa) continue;
        acc = kappa.add(acc, kappa.mul(kappa.frob(xa), form.diag[static_cast<size_t>(a)]));
        for (int b = a + 1; b < form.dim; ++b)
            acc = kappa.add(acc,
                            kappa.mul(kappa.mul(xa, x[static_cast<size_t>(b)]), form.matrix.at(a, b)));
    }
    return acc;
}

std::optional<int> arf_invariant(const ResidueForm& form, const Kappa& kappa) {
    if (form.kind != FormKind::quadratic || form.sectioned) return std::nullopt;
    if (form.dim % 2 != 0) return std::nullopt;
    if (km_rank(kappa, form.matrix) != form.dim) return std::nullopt;
    if (form.dim == 0) return 0;

    auto pol = [&](const KVec& x, const KVec& y) {
        KElem acc = 0;
        for (int a = 0; a < form.dim; ++a)
            for (int b = 0; b < form.dim; ++b)
                acc = kappa.add(acc, kappa.mul(kappa.mul(x[static_cast<size_t>(a)],
                                                         y[static_cast<size_t>(b)]),
                                               form.matrix.at(a, b)));
        return acc;
    };

    std::vector<KVec> work = [&] {
        std::vector<KVec> w;
        for (int j = 0; j < form.dim; ++j) {
            KVec e(static_cast<size_t>(form.dim), 0);
            e[static_cast<size_t>(j)] = 1;
            w.push_back(std::move(e));
        }
        return w;
    }();

    KElem value = 0;
    while (!work.empty()) {
        KVec u = work.front();
        work.erase(work.begin());
        size_t iv = work.size();
        for (size_t t = 0; t < work.size(); ++t)
            if (pol(u, work[t]) != 0) {
                iv = t;
                break;
            }
        if (iv == work.size()) throw Error("polar form degenerated during reduction");
        KVec v = work[iv];
        work.erase(work.begin() + static_cast<long>(iv));
        KElem c = kappa.inv(pol(u, v));
        for (auto& x : v) x = kappa.mul(x, c);
        for (KVec& w : work) {
            KElem cu = pol(w, v), cv = pol(w, u);
            for (int j = 0; j < form.dim; ++j)
                w[static_cast<size_t>(j)] =
                    kappa.add(w[static_cast<size_t>(j)],
                              kappa.add(kappa.mul(cu, u[static_cast<size_t>(j)]),
                                        kappa.mul(cv, v[static_cast<size_t>(j)])));
        }
        value = kappa.add(value, kappa.mul(quad_eval(kappa, form, u), quad_eval(kappa, form, v)));
    }
    return kappa.abs_trace(value);
}

long long quad_zero_count(const Kappa& kappa, const ResidueForm& form) {
    int f = kappa.size();
    long long total = 1;
    for (int a = 0; a < form.dim; ++a) {
        total *= f;
        if (total > (1 << 22)) throw Error("zero count space is too large");
    }
    long long zeros = 0;
    KVec x(static_cast<size_t>(form.dim), 0);
    for (long long idx = 0; idx < total; ++idx) {
        long long rest = idx;
        for (int a = 0; a < form.dim; ++a) {
            x[static_cast<size_t>(a)] = static_cast<KElem>(rest % f);
            rest /= f;
        }
        if (quad_eval(kappa, form, x) == 0) ++zeros;
    }
    return zeros;
}

cpp_int quad_zero_count_formula(int dim, int f, int eps) {
    if (dim == 0) return 1;
    cpp_int fp = 1;
    for (int t = 0; t < dim - 1; ++t) fp *= f;
    if (dim % 2 != 0) return fp;
    cpp_int half = 1, halfm = 1;
    for (int t = 0; t < dim / 2; ++t) half *= f;
    for (int t = 0; t < dim / 2 - 1; ++t) halfm *= f;
    return fp + eps * (half - halfm);
}

} // namespace herm2
