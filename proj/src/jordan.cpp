#include "herm2/jordan.hpp"

#include <algorithm>
#include <array>
#include <climits>

#include "herm2/oracle.hpp"

namespace herm2 {

namespace {

/* elementary moves shared by the splitting and the canonical-form search */

/** Basis move b_dst += lam * b_src on a Gram matrix: column then conjugate row. */
void herm_op(BMat& W, int dst, int src, const BElem& lam) {
    for (int r = 0; r < W.rows; ++r) W.at(r, dst) = b_add(W.at(r, dst), b_mul(lam, W.at(r, src)));
    BElem sl = b_sigma(lam);
    for (int c = 0; c < W.cols; ++c) W.at(dst, c) = b_add(W.at(dst, c), b_mul(sl, W.at(src, c)));
}

void col_op(BMat& U, int dst, int src, const BElem& lam) {
    for (int r = 0; r < U.rows; ++r) U.at(r, dst) = b_add(U.at(r, dst), b_mul(lam, U.at(r, src)));
}

void herm_swap(BMat& W, int i, int j) {
    if (i == j) return;
    for (int r = 0; r < W.rows; ++r) std::swap(W.at(r, i), W.at(r, j));
    for (int c = 0; c < W.cols; ++c) std::swap(W.at(i, c), W.at(j, c));
}

void col_swap(BMat& U, int i, int j) {
    if (i == j) return;
    for (int r = 0; r < U.rows; ++r) std::swap(U.at(r, i), U.at(r, j));
}

BElem zero_with_prec(const RingPtr& R, int prec) {
    if (prec < 1) throw PrecisionExhausted("jordan pivot");
    BElem z = b_zero(R);
    z.prec = std::min(prec, R->k);
    return z;
}

BMat submatrix(const BMat& W, int pos, int size) {
    BMat S(size, size, W.at(pos, pos));
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) S.at(i, j) = W.at(pos + i, pos + j);
    return S;
}

int active_norm_exp(const BMat& W, int pos) {
    return norm_exp_gram(submatrix(W, pos, W.rows - pos));
}

std::optional<int> active_min_val(const BMat& W, int pos) {
    std::optional<int> best;
    for (int i = pos; i < W.rows; ++i)
        for (int j = pos; j < W.cols; ++j) {
            auto v = b_val(W.at(i, j));
            if (v && (!best || *v < *best)) best = v;
        }
    return best;
}

struct PivotResult {
    BMat W;                                ///< block diagonal, cells of size 1 and 2
    BMat U;                                ///< sigma(U)^t G U == W
    std::vector<std::array<int, 3>> cells; ///< position, size, valuation
};

/** Divide by a pivot determinant d = 2^v * unit; exact, loses v digits. */
BElem div_by_unit_shift(const BElem& x, const BElem& unit_inv, int v) {
    return b_div2(b_mul(x, unit_inv), v);
}

PivotResult pivot_split(const RingPtr& R, BMat W) {
    int n = W.rows;
    PivotResult res;
    res.U = bm_identity(R, n);
    int pos = 0, last_v = INT_MIN;
    BElem pi = b_pi(R);
    while (pos < n) {
        auto vopt = active_min_val(W, pos);
        if (!vopt) throw PrecisionExhausted("jordan pivot search");
        int v = *vopt;
        if (v < last_v) throw Error("pivot valuations decreased, matrix was not hermitian");
        last_v = v;
        int ne = active_norm_exp(W, pos);

        if (ne == v) {
            // rank-1 pivot: some vector attains the norm ideal exactly
            int piv = -1;
            for (int j = pos; j < n && piv < 0; ++j)
                if (b_val(W.at(j, j)) == ne) piv = j;
            if (piv < 0) {
                const BElem cand[4] = {b_one(R), b_neg(b_one(R)), pi, b_neg(pi)};
                for (int j = pos; j < n && piv < 0; ++j)
                    for (int k = j + 1; k < n && piv < 0; ++k)
                        for (const BElem& lam : cand) {
                            BElem val = b_add(W.at(j, j),
                                              b_add(b_mul(b_norm(lam), W.at(k, k)),
                                                    b_trace(b_mul(lam, W.at(j, k)))));
                            if (b_val(val) == ne) {
                                herm_op(W, j, k, lam);
                                col_op(res.U, j, k, lam);
                                piv = j;
                                break;
                            }
                        }
            }
            if (piv < 0) throw Error("norm ideal not attained by any short combination");
            herm_swap(W, pos, piv);
            col_swap(res.U, pos, piv);

            BElem d = W.at(pos, pos);
            for (int i = pos + 1; i < n; ++i) {
                if (b_is_zero(W.at(pos, i))) continue;
                BElem c = b_neg(b_div(W.at(pos, i), d));
                herm_op(W, i, pos, c);
                col_op(res.U, i, pos, c);
            }
            for (int i = pos + 1; i < n; ++i) {
                if (!b_is_zero(W.at(pos, i)) || !b_is_zero(W.at(i, pos)))
                    throw Error("pivot row failed to clear");
                int p = std::min(W.at(pos, i).prec, W.at(i, pos).prec);
                W.at(pos, i) = zero_with_prec(R, p);
                W.at(i, pos) = zero_with_prec(R, p);
            }
            res.cells.push_back({pos, 1, v});
            pos += 1;
        } else {
            // rank-2 pivot on the first off-diagonal entry of minimal valuation
            int pj = -1, pk = -1;
            for (int j = pos; j < n && pj < 0; ++j)
                for (int k = j + 1; k < n; ++k)
                    if (b_val(W.at(j, k)) == v) {
                        pj = j;
                        pk = k;
                        break;
                    }
            if (pj < 0) throw Error("no off-diagonal entry attains the scale");
            herm_swap(W, pos, pj);
            col_swap(res.U, pos, pj);
            if (pk == pos) pk = pj;
            herm_swap(W, pos + 1, pk);
            col_swap(res.U, pos + 1, pk);

            const BElem &a = W.at(pos, pos), &b = W.at(pos, pos + 1);
            const BElem &bs = W.at(pos + 1, pos), &d = W.at(pos + 1, pos + 1);
            BElem det = b_sub(b_mul(a, d), b_mul(b, bs));
            auto dv = b_val(det);
            if (!dv) throw PrecisionExhausted("pivot pair determinant");
            if (*dv != 2 * v) throw Error("pivot pair determinant has the wrong valuation");
            BElem unit_inv = b_inv(b_div2(det, v));

            for (int i = pos + 2; i < n; ++i) {
                BElem y1 = W.at(pos, i), y2 = W.at(pos + 1, i);
                if (b_is_zero(y1) && b_is_zero(y2)) continue;
                BElem c1 = div_by_unit_shift(b_sub(b_mul(d, y1), b_mul(b, y2)), unit_inv, v);
                BElem c2 = div_by_unit_shift(b_sub(b_mul(a, y2), b_mul(bs, y1)), unit_inv, v);
                herm_op(W, i, pos, b_neg(c1));
                col_op(res.U, i, pos, b_neg(c1));
                herm_op(W, i, pos + 1, b_neg(c2));
                col_op(res.U, i, pos + 1, b_neg(c2));
            }
            for (int i = pos + 2; i < n; ++i)
                for (int p : {pos, pos + 1}) {
                    if (!b_is_zero(W.at(p, i)) || !b_is_zero(W.at(i, p)))
                        throw Error("pivot pair failed to clear");
                    int pr = std::min(W.at(p, i).prec, W.at(i, p).prec);
                    W.at(p, i) = zero_with_prec(R, pr);
                    W.at(i, p) = zero_with_prec(R, pr);
                }
            res.cells.push_back({pos, 2, v});
            pos += 2;
        }
    }
    res.W = std::move(W);
    return res;
}

const JordanBlock* neighbor(const JordanDecomposition& dec, int index, int offset) {
    return block_at(dec, index + offset);
}

bool is_type_one(const JordanBlock* b) { return b && b->type_one; }

void refresh_summary(JordanDecomposition& dec) {
    dec.total_rank = 0;
    for (const JordanBlock& b : dec.blocks) dec.total_rank += b.rank;
    dec.min_index = dec.blocks.empty() ? 0 : dec.blocks.front().index;
    dec.bound_index = dec.blocks.empty() ? 0 : dec.blocks.back().index + 1;
}

} // namespace

JordanDecomposition jordan_split(const Lattice& L) {
    const RingPtr& R = L.ring;
    int n = lat_rank(L);
    JordanDecomposition dec;
    dec.ring = R;
    if (n == 0) {
        refresh_summary(dec);
        return dec;
    }

    BElem det = bm_det(L.gram);
    auto vd = b_val(det);
    if (!vd) throw Degenerate("Gram determinant vanishes to working precision");
    if (*vd > 2 * det.prec - 4)
        throw PrecisionExhausted("determinant valuation is too close to the precision window");

    PivotResult pr = pivot_split(R, L.gram);
    for (size_t c = 0; c < pr.cells.size();) {
        int v = pr.cells[c][2], start = pr.cells[c][0], size = 0;
        while (c < pr.cells.size() && pr.cells[c][2] == v) {
            size += pr.cells[c][1];
            ++c;
        }
        JordanBlock blk;
        blk.index = v;
        blk.rank = size;
        blk.slice_scale = v;
        blk.slice = submatrix(pr.W, start, size);
        dec.blocks.push_back(std::move(blk));
    }
    dec.transform = std::move(pr.U);
    classify_blocks(dec);
    return dec;
}

JordanDecomposition assemble_blocks(const RingPtr& R, std::vector<std::pair<int, BMat>> blocks) {
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    JordanDecomposition dec;
    dec.ring = R;
    int prev = INT_MIN;
    for (auto& [index, gram] : blocks) {
        if (index == prev) throw Error("two blocks share one index");
        prev = index;
        Lattice part = make_lattice(R, std::move(gram));
        int s = scale_exp(part);
        if (((s - index) % 2 + 2) % 2 != 0)
            throw Error("block scale does not match the parity of its index");
        auto dv = b_val(bm_det(part.gram));
        if (!dv || *dv != part.gram.rows * s)
            throw Error("block at index " + std::to_string(index) + " is not modular");
        JordanBlock blk;
        blk.index = index;
        blk.rank = part.gram.rows;
        blk.slice_scale = s;
        blk.slice = std::move(part.gram);
        dec.blocks.push_back(std::move(blk));
    }
    classify_blocks(dec);
    return dec;
}

void classify_blocks(JordanDecomposition& dec) {
    for (JordanBlock& b : dec.blocks) {
        int par = ((b.index % 2) + 2) % 2;
        int ne = norm_exp_gram(b.slice);
        b.own_norm_max = (ne == b.slice_scale + par);
        b.rank_odd = (b.rank % 2 != 0);
        b.type_one = false;
        b.bound = false;
    }
    // even indices resolve from their own norm; odd ones may inherit type I
    for (JordanBlock& b : dec.blocks)
        if (b.index % 2 == 0) b.type_one = b.own_norm_max;
    for (JordanBlock& b : dec.blocks)
        if (b.index % 2 != 0) {
            if (dec.ring->cse == Case::unit_radicand)
                b.type_one = false;
            else
                b.type_one = b.own_norm_max || is_type_one(neighbor(dec, b.index, -1)) ||
                             is_type_one(neighbor(dec, b.index, +1));
        }
    for (JordanBlock& b : dec.blocks) {
        if (b.index % 2 == 0)
            b.bound = b.type_one ? (is_type_one(neighbor(dec, b.index, -2)) ||
                                    is_type_one(neighbor(dec, b.index, +2)))
                                 : (is_type_one(neighbor(dec, b.index, -1)) ||
                                    is_type_one(neighbor(dec, b.index, +1)));
        else
            b.bound = is_type_one(neighbor(dec, b.index, -1)) ||
                      is_type_one(neighbor(dec, b.index, +1));
    }
    refresh_summary(dec);
}

const JordanBlock* block_at(const JordanDecomposition& dec, int index) {
    for (const JordanBlock& b : dec.blocks)
        if (b.index == index) return &b;
    return nullptr;
}

namespace {

/** Shift a Gram between scales: d half-steps up (w-multiplications) or down. */
BMat shift_scale(const BMat& M, int d) {
    BMat S = M;
    for (BElem& e : S.a) e = (d >= 0) ? b_mul_w(e, d) : b_div_w(e, -d);
    return S;
}

} // namespace

JordanDecomposition normalize_indices(const JordanDecomposition& dec) {
    if (dec.blocks.empty()) return dec;
    int t = INT_MIN;
    for (const JordanBlock& b : dec.blocks) {
        int i = b.index;
        int up = (i % 2 == 0) ? -(i / 2) : ((-i + 1) / 2); // smallest t with i + 2t >= 0
        int sc = (b.slice_scale - i) / 2;                  // smallest t avoiding any division
        t = std::max({t, up, sc});
    }
    JordanDecomposition out;
    out.ring = dec.ring;
    for (const JordanBlock& b : dec.blocks) {
        JordanBlock nb = b;
        nb.index = b.index + 2 * t;
        nb.slice = shift_scale(b.slice, (nb.index - b.slice_scale) / 2);
        nb.slice_scale = nb.index;
        out.blocks.push_back(std::move(nb));
    }
    classify_blocks(out);
    return out;
}

Lattice assemble_lattice(const JordanDecomposition& dec) {
    const RingPtr& R = dec.ring;
    for (const JordanBlock& b : dec.blocks)
        if (b.slice_scale != b.index)
            throw Error("assemble_lattice needs slices at their index's scale");
    int n = dec.total_rank;
    BMat G = bm_zero(R, n, n);
    int off = 0;
    for (const JordanBlock& b : dec.blocks) {
        for (int i = 0; i < b.rank; ++i)
            for (int j = 0; j < b.rank; ++j) G.at(off + i, off + j) = b.slice.at(i, j);
        off += b.rank;
    }
    return make_lattice(R, std::move(G));
}

std::string ktag_name(KTag t) {
    switch (t) {
        case KTag::none: return "none";
        case KTag::diag_unit: return "diag_unit";
        case KTag::unit_pair: return "unit_pair";
        case KTag::even_pair: return "even_pair";
        case KTag::trace_pair: return "trace_pair";
        case KTag::radicand_pair: return "radicand_pair";
    }
    return "?";
}

BMat gram_hyperbolic(const RingPtr& R, int i) {
    BElem p = b_one(R);
    for (int j = 0; j < i; ++j) p = b_mul(p, b_pi(R));
    BMat H = bm_zero(R, 2, 2);
    H.at(0, 1) = p;
    H.at(1, 0) = b_sigma(p);
    return H;
}

BMat gram_pair(const BElem& a, const BElem& b, const BElem& c) {
    BMat M = bm_zero(a.ring, 2, 2);
    M.at(0, 0) = a;
    M.at(1, 1) = b;
    M.at(0, 1) = c;
    M.at(1, 0) = b_sigma(c);
    return M;
}

namespace {

constexpr int kMatchDepth = 10; ///< pi-adic depth for canonical matching

struct Piece {
    BMat gram;                            // exact Gram, at the working scale
    std::vector<std::vector<BElem>> cols; // columns in the coordinates of the slice
    KTag tag = KTag::none;
    std::vector<BElem> params;
};

/** Grid of unit lifts x + 2y, x a nonzero residue. */
std::vector<BElem> unit_grid(const RingPtr& R) {
    std::vector<BElem> out;
    int f = R->kappa.size();
    for (int x = 1; x < f; ++x)
        for (int y = 0; y < f; ++y)
            out.push_back(b_add(b_lift(R, static_cast<KElem>(x)),
                                b_mul(b_from_int(R, 2), b_lift(R, static_cast<KElem>(y)))));
    return out;
}

std::vector<BElem> residue_grid(const RingPtr& R) {
    std::vector<BElem> out;
    for (int y = 0; y < R->kappa.size(); ++y) out.push_back(b_lift(R, static_cast<KElem>(y)));
    return out;
}

struct Target {
    BMat gram;
    KTag tag;
    std::vector<BElem> params;
};

std::vector<Target> rank2_targets(const RingPtr& R, int ipar, int ne) {
    std::vector<Target> out;
    BElem two = b_from_int(R, 2);
    if (ipar == 0) {
        if (ne == 0)
            for (const BElem& b : residue_grid(R))
                out.push_back({gram_pair(b_one(R), b_mul(two, b), b_one(R)), KTag::unit_pair, {b}});
        if (ne == 2 && R->cse == Case::even_radicand) {
            BElem td = b_mul(two, b_param(R));
            for (const BElem& b : residue_grid(R))
                out.push_back({gram_pair(td, b_mul(two, b), b_one(R)), KTag::even_pair, {b}});
        }
    } else {
        if (R->cse == Case::unit_radicand) {
            for (const BElem& b : residue_grid(R))
                out.push_back({gram_pair(two, b_mul(two, b), b_pi(R)), KTag::trace_pair, {b}});
        } else {
            BElem td = b_mul(two, b_param(R));
            std::vector<BElem> grid = residue_grid(R);
            std::vector<BElem> full;
            int f = R->kappa.size();
            for (int x = 0; x < f; ++x)
                for (int y = 0; y < f; ++y)
                    full.push_back(b_add(b_lift(R, static_cast<KElem>(x)),
                                         b_mul(two, b_lift(R, static_cast<KElem>(y)))));
            for (const BElem& a : full)
                out.push_back(
                    {gram_pair(b_mul(b_from_int(R, 4), a), td, b_pi(R)), KTag::radicand_pair, {a}});
        }
    }
    return out;
}

Piece transformed_piece(const Piece& p, const BMat& gram, const BMat& u, KTag tag,
                        std::vector<BElem> params) {
    Piece out;
    out.gram = gram;
    out.tag = tag;
    out.params = std::move(params);
    int n = static_cast<int>(p.cols.front().size());
    out.cols.assign(static_cast<size_t>(u.cols), std::vector<BElem>());
    for (int j = 0; j < u.cols; ++j) {
        std::vector<BElem> col(static_cast<size_t>(n), b_zero(p.gram.a.front().ring));
        for (int i = 0; i < u.rows; ++i)
            for (int r = 0; r < n; ++r)
                col[r] = b_add(col[r], b_mul(u.at(i, j), p.cols[i][r]));
        out.cols[j] = std::move(col);
    }
    return out;
}

Piece merge_pieces(const Piece& p, const Piece& q) {
    const RingPtr& R = p.gram.a.front().ring;
    Piece s;
    int rp = p.gram.rows, rq = q.gram.rows;
    s.gram = bm_zero(R, rp + rq, rp + rq);
    for (int i = 0; i < rp; ++i)
        for (int j = 0; j < rp; ++j) s.gram.at(i, j) = p.gram.at(i, j);
    for (int i = 0; i < rq; ++i)
        for (int j = 0; j < rq; ++j) s.gram.at(rp + i, rp + j) = q.gram.at(i, j);
    s.cols = p.cols;
    s.cols.insert(s.cols.end(), q.cols.begin(), q.cols.end());
    return s;
}

std::optional<BMat> match(const RingPtr& R, const BMat& from, const BMat& to) {
    return isometry_search(make_lattice(R, from), make_lattice(R, to), kMatchDepth, {});
}

} // namespace

BlockCanonicalForm canonicalize_block(const JordanDecomposition& dec, int index) {
    const JordanBlock* blk = block_at(dec, index);
    if (!blk) throw Error("no block at index " + std::to_string(index));
    const RingPtr& R = dec.ring;
    int ipar = ((index % 2) + 2) % 2;
    int down = (blk->slice_scale - ipar) / 2;
    BMat G0 = shift_scale(blk->slice, -down);
    int n = G0.rows;

    PivotResult pr = pivot_split(R, G0);
    std::vector<Piece> pieces;
    for (const auto& cell : pr.cells) {
        Piece p;
        p.gram = submatrix(pr.W, cell[0], cell[1]);
        for (int j = 0; j < cell[1]; ++j) {
            std::vector<BElem> col;
            for (int r = 0; r < n; ++r) col.push_back(pr.U.at(r, cell[0] + j));
            p.cols.push_back(std::move(col));
        }
        pieces.push_back(std::move(p));
    }

    BMat H = gram_hyperbolic(R, ipar);
    int ne_h = norm_exp_gram(H);
    std::vector<Piece> hyper;

    // direct hyperbolic matches first, so the hyperbolic count is maximal
    for (auto it = pieces.begin(); it != pieces.end();) {
        if (it->gram.rows == 2 && norm_exp_gram(it->gram) == ne_h) {
            if (auto u = match(R, it->gram, H)) {
                hyper.push_back(transformed_piece(*it, H, *u, KTag::none, {}));
                it = pieces.erase(it);
                continue;
            }
        }
        ++it;
    }

    auto absorb_rank2 = [&](Piece&& s) {
        int ne = norm_exp_gram(s.gram);
        if (ne == ne_h) {
            if (auto u = match(R, s.gram, H)) {
                hyper.push_back(transformed_piece(s, H, *u, KTag::none, {}));
                return;
            }
        }
        for (const Target& t : rank2_targets(R, ipar, ne)) {
            if (auto u = match(R, s.gram, t.gram)) {
                pieces.push_back(transformed_piece(s, t.gram, *u, t.tag, t.params));
                return;
            }
        }
        throw CanonFail("rank-2 remainder matches no canonical pair");
    };

    while (pieces.size() >= 2) {
        // recombine the largest piece with the smallest, so a rank-2 remainder
        // is always paired with a line rather than with another rank-2 piece
        size_t ia = 0;
        for (size_t i = 1; i < pieces.size(); ++i)
            if (pieces[i].gram.rows > pieces[ia].gram.rows) ia = i;
        size_t ib = (ia == 0) ? 1 : 0;
        for (size_t i = 0; i < pieces.size(); ++i)
            if (i != ia && pieces[i].gram.rows < pieces[ib].gram.rows) ib = i;
        if (ib < ia) std::swap(ia, ib);
        Piece s = merge_pieces(pieces[ia], pieces[ib]);
        int rs = s.gram.rows;
        if (rs > 3) throw CanonFail("two rank-2 remainders cannot be reduced pairwise");
        pieces.erase(pieces.begin() + static_cast<long>(ib));
        pieces.erase(pieces.begin() + static_cast<long>(ia));
        if (rs == 2) {
            absorb_rank2(std::move(s));
        } else {
            if (ipar != 0) throw Error("rank-1 cell at an odd scale");
            bool done = false;
            for (const BElem& a : unit_grid(R)) {
                BMat tg = bm_zero(R, 3, 3);
                tg.at(0, 1) = b_one(R);
                tg.at(1, 0) = b_one(R);
                tg.at(2, 2) = a;
                if (auto u = match(R, s.gram, tg)) {
                    Piece t = transformed_piece(s, tg, *u, KTag::none, {});
                    Piece h, k;
                    h.gram = H;
                    h.cols = {t.cols[0], t.cols[1]};
                    k.gram = bm_zero(R, 1, 1);
                    k.gram.at(0, 0) = a;
                    k.tag = KTag::diag_unit;
                    k.params = {a};
                    k.cols = {t.cols[2]};
                    hyper.push_back(std::move(h));
                    pieces.push_back(std::move(k));
                    done = true;
                    break;
                }
            }
            if (!done) throw CanonFail("rank-3 remainder is not a plane plus a line");
        }
    }

    BlockCanonicalForm out;
    out.index = index;

    std::optional<Piece> K;
    if (pieces.size() == 1) {
        Piece p = std::move(pieces.front());
        pieces.clear();
        if (p.tag != KTag::none) {
            K = std::move(p);
        } else if (p.gram.rows == 1) {
            bool done = false;
            for (const BElem& a : unit_grid(R)) {
                BMat tg = bm_zero(R, 1, 1);
                tg.at(0, 0) = a;
                if (auto u = match(R, p.gram, tg)) {
                    K = transformed_piece(p, tg, *u, KTag::diag_unit, {a});
                    done = true;
                    break;
                }
            }
            if (!done) throw CanonFail("line matches no canonical unit");
        } else {
            int ne = norm_exp_gram(p.gram);
            if (ne == ne_h) {
                if (auto u = match(R, p.gram, H)) {
                    hyper.push_back(transformed_piece(p, H, *u, KTag::none, {}));
                    p.cols.clear();
                }
            }
            if (!p.cols.empty()) {
                bool done = false;
                for (const Target& t : rank2_targets(R, ipar, ne)) {
                    if (auto u = match(R, p.gram, t.gram)) {
                        K = transformed_piece(p, t.gram, *u, t.tag, t.params);
                        done = true;
                        break;
                    }
                }
                if (!done) throw CanonFail("rank-2 remainder matches no canonical pair");
            }
        }
    }

    // bound blocks at odd indices absorb a radicand pair into a plane by
    // borrowing a short vector from the even neighbor one step up
    if (K && K->tag == KTag::radicand_pair && blk->bound &&
        R->cse == Case::even_radicand) {
        const JordanBlock* nb = block_at(dec, index + 1);
        if (!nb || !nb->type_one)
            throw CanonFail("bound block with no usable neighbor above");
        // in the frame where this block sits at scale 1, the neighbor sits at 2
        BMat NB = shift_scale(nb->slice, (2 - nb->slice_scale) / 2);
        PivotResult npr = pivot_split(R, NB);
        int cell1 = -1;
        for (size_t ci = 0; ci < npr.cells.size(); ++ci)
            if (npr.cells[ci][1] == 1) {
                cell1 = static_cast<int>(ci);
                break;
            }
        if (cell1 < 0) throw CanonFail("neighbor has no short vector to borrow");
        int cpos = npr.cells[static_cast<size_t>(cell1)][0];
        BElem e = npr.W.at(cpos, cpos);
        if (b_val(e) != 2) throw Error("borrowed vector has the wrong length");
        BElem c = b_div2(e, 1);

        const BElem& a = K->params.front();
        BElem delta = b_param(R), di = b_inv(delta);
        BElem pi = b_pi(R), two = b_from_int(R, 2);
        BMat M3 = bm_zero(R, 3, 3);
        BMat A2 = gram_pair(b_mul(b_from_int(R, 4), a), b_mul(two, delta), pi);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) M3.at(i, j) = A2.at(i, j);
        M3.at(2, 2) = e;
        BMat U3 = bm_zero(R, 3, 3);
        U3.at(0, 0) = b_one(R);
        U3.at(1, 0) = b_neg(b_mul(b_mul(two, a), b_mul(di, pi)));
        U3.at(1, 1) = b_one(R);
        U3.at(2, 1) = b_one(R);
        U3.at(0, 2) = b_mul(c, b_mul(di, pi));
        U3.at(2, 2) = b_one(R);
        BMat G3 = bm_conj(M3, U3);
        for (int i = 0; i < 2; ++i)
            if (!b_is_zero(G3.at(i, 2)) || !b_is_zero(G3.at(2, i)))
                throw Error("borrow rewrite failed to split");
        BMat Q2 = submatrix(G3, 0, 2);
        if (!match(R, Q2, gram_hyperbolic(R, 1)))
            throw CanonFail("borrowed plane is not hyperbolic");
        BElem cp = b_div2(G3.at(2, 2), 1);

        int hyper_count = static_cast<int>(hyper.size()) + 1;
        JordanDecomposition rew;
        rew.ring = R;
        for (const JordanBlock& b : dec.blocks) {
            JordanBlock nb2 = b;
            if (b.index == index) {
                BMat HH = bm_zero(R, 2 * hyper_count, 2 * hyper_count);
                for (int hstep = 0; hstep < hyper_count; ++hstep) {
                    BMat h1 = gram_hyperbolic(R, 1);
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j)
                            HH.at(2 * hstep + i, 2 * hstep + j) = h1.at(i, j);
                }
                nb2.slice = shift_scale(HH, down);
                nb2.rank = 2 * hyper_count;
                nb2.slice_scale = blk->slice_scale;
            } else if (b.index == index + 1) {
                BMat NW = npr.W;
                NW.at(cpos, cpos) = b_mul(two, cp);
                nb2.slice = shift_scale(NW, (nb->slice_scale - 2) / 2);
                nb2.slice_scale = nb->slice_scale;
            }
            rew.blocks.push_back(std::move(nb2));
        }
        classify_blocks(rew);

        out.hyperbolic_count = hyper_count;
        out.k_tag = KTag::none;
        out.canonical_gram = bm_zero(R, 2 * hyper_count, 2 * hyper_count);
        for (int hstep = 0; hstep < hyper_count; ++hstep) {
            BMat h1 = gram_hyperbolic(R, 1);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    out.canonical_gram.at(2 * hstep + i, 2 * hstep + j) = h1.at(i, j);
        }
        out.rewritten = std::move(rew);
        return out;
    }

    out.hyperbolic_count = static_cast<int>(hyper.size());
    if (K) {
        out.k_tag = K->tag;
        out.k_params = K->params;
    }
    int kr = K ? K->gram.rows : 0;
    int total = 2 * out.hyperbolic_count + kr;
    if (total != n) throw Error("canonical piece ranks do not add up");
    out.canonical_gram = bm_zero(R, n, n);
    out.witness = bm_zero(R, n, n);
    int off = 0;
    auto place = [&](const Piece& p) {
        for (int i = 0; i < p.gram.rows; ++i)
            for (int j = 0; j < p.gram.rows; ++j)
                out.canonical_gram.at(off + i, off + j) = p.gram.at(i, j);
        for (int j = 0; j < static_cast<int>(p.cols.size()); ++j)
            for (int r = 0; r < n; ++r) out.witness.at(r, off + j) = p.cols[static_cast<size_t>(j)][static_cast<size_t>(r)];
        off += p.gram.rows;
    };
    for (const Piece& p : hyper) place(p);
    if (K) place(*K);
    return out;
}

} // namespace herm2
