#include "herm2/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>

namespace herm2 {

namespace {

/*
 * The enumeration works in a fixed-width image of the ring: every A
 * coefficient becomes one uint64 of the entry's leading two-adic digits.
 * Wraparound is harmless because every test is "valuation at least l" with
 * l inside the retained window.
 */

constexpr int kVanish = 1 << 20; ///< valuation reported for stored-zero entries
constexpr uint32_t kMaxFan = 1u << 20;
constexpr uint32_t kCacheFan = 1u << 13; ///< per-digit Gram caches up to this fan-out

using OA = std::array<uint64_t, 8>;

struct ORing {
    int cse = 1, r = 1, kw = 0;
    uint64_t mask = 0;
    uint64_t low = 0; ///< folding bits of the Conway polynomial, t^r excluded
    OA tparam{};      ///< 2 * param
};

struct OElem {
    OA a0{}, a1{};
};

void amul(const ORing& O, const OA& x, const OA& y, OA& z) {
    uint64_t buf[16] = {};
    for (int i = 0; i < O.r; ++i) {
        if (!x[i]) continue;
        for (int j = 0; j < O.r; ++j) buf[i + j] += x[i] * y[j];
    }
    for (int d = 2 * O.r - 2; d >= O.r; --d) {
        uint64_t c = buf[d];
        if (!c) continue;
        for (int i = 0; i < O.r; ++i)
            if ((O.low >> i) & 1) buf[d - O.r + i] -= c;
    }
    for (int i = 0; i < O.r; ++i) z[i] = buf[i];
}

OElem omul(const ORing& O, const OElem& x, const OElem& y) {
    OA t00, t11, t01, t10, s;
    amul(O, x.a0, y.a0, t00);
    amul(O, x.a1, y.a1, t11);
    amul(O, x.a0, y.a1, t01);
    amul(O, x.a1, y.a0, t10);
    amul(O, t11, O.tparam, s);
    OElem z;
    for (int i = 0; i < O.r; ++i) {
        z.a0[i] = t00[i] + s[i];
        z.a1[i] = t01[i] + t10[i] + (O.cse == 1 ? 2 * t11[i] : 0);
    }
    return z;
}

/** x times a residue lift (a1 = 0, sigma-fixed); two base products suffice. */
OElem omul_lift(const ORing& O, const OElem& x, const OElem& lf) {
    OElem z;
    amul(O, x.a0, lf.a0, z.a0);
    amul(O, x.a1, lf.a0, z.a1);
    return z;
}

void oacc(const ORing& O, OElem& x, const OElem& y) {
    for (int i = 0; i < O.r; ++i) {
        x.a0[i] += y.a0[i];
        x.a1[i] += y.a1[i];
    }
}

OElem oadd(const ORing& O, const OElem& x, const OElem& y) {
    OElem z = x;
    oacc(O, z, y);
    return z;
}

OElem oneg(const ORing& O, const OElem& x) {
    OElem z;
    for (int i = 0; i < O.r; ++i) {
        z.a0[i] = 0 - x.a0[i];
        z.a1[i] = 0 - x.a1[i];
    }
    return z;
}

OElem osigma(const ORing& O, const OElem& x) {
    OElem z;
    for (int i = 0; i < O.r; ++i) {
        z.a0[i] = (O.cse == 1) ? x.a0[i] + 2 * x.a1[i] : x.a0[i];
        z.a1[i] = 0 - x.a1[i];
    }
    return z;
}

int oval(const ORing& O, const OElem& x) {
    int m0 = 99, m1 = 99;
    for (int i = 0; i < O.r; ++i) {
        uint64_t c0 = x.a0[i] & O.mask, c1 = x.a1[i] & O.mask;
        if (c0) m0 = std::min(m0, std::countr_zero(c0));
        if (c1) m1 = std::min(m1, std::countr_zero(c1));
    }
    int v0 = (m0 < 99) ? 2 * m0 : kVanish;
    int v1 = (m1 < 99) ? 2 * m1 + 1 : kVanish;
    return std::min(v0, v1);
}

uint64_t low_bits(const cpp_int& c, int kw) {
    cpp_int m = c & ((cpp_int(1) << kw) - 1);
    return m.convert_to<uint64_t>();
}

using OMat = std::array<OElem, 9>;

/** Shared digit-enumeration engine for counting and first-isometry search. */
struct Engine {
    ORing O;
    int n = 0, levels = 0;
    uint32_t fan = 0;
    long long budget = 0, expanded = 0;
    bool record = false, cached = false;

    OMat G{};      ///< left Gram
    OMat target{}; ///< right-hand side of the congruence
    std::vector<std::array<KElem, 9>> digits;
    std::vector<OElem> lifts;       ///< residue lifts, indexed by kappa value
    std::vector<OMat> gd, qd;       ///< per digit: G*Delta and Delta^t*G*Delta
    std::vector<OElem> pl, spl, wl; ///< per level: pi^l, sigma(pi)^l, w^l

    std::vector<cpp_int> level_counts;
    std::vector<std::vector<long long>> histo;
    std::vector<uint32_t> choice; ///< successful digit string, search mode

    Engine(const Lattice& L, const BMat& target_gram, int levels_, const OracleOptions& opt,
           bool record_multiplicity) {
        const RingPtr& R = L.ring;
        n = L.gram.rows;
        levels = levels_;
        budget = opt.budget;
        record = record_multiplicity;

        int prec = R->k;
        for (const BElem& e : L.gram.a) prec = std::min(prec, e.prec);
        for (const BElem& e : target_gram.a) prec = std::min(prec, e.prec);
        O.kw = std::min(prec, 60);
        if (levels > 2 * O.kw - 2) throw PrecisionExhausted("oracle digit depth");
        O.cse = (R->cse == Case::unit_radicand) ? 1 : 2;
        O.r = R->r;
        O.mask = (1ull << O.kw) - 1;
        O.low = R->kappa.modulus() ^ (1u << O.r);
        for (int i = 0; i < O.r; ++i)
            O.tparam[static_cast<size_t>(i)] = 2 * low_bits(R->param[static_cast<size_t>(i)], O.kw);

        uint64_t f = 1ull << O.r;
        uint64_t fcheck = 1;
        for (int m = 0; m < n * n; ++m) {
            fcheck *= f;
            if (fcheck > kMaxFan) throw Error("oracle digit fan-out is too large");
        }
        fan = static_cast<uint32_t>(fcheck);
        cached = fan <= kCacheFan;

        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                G[idx(i, j)] = import(L.gram.at(i, j));
                target[idx(i, j)] = import(target_gram.at(i, j));
            }

        lifts.resize(f);
        for (uint64_t v = 0; v < f; ++v)
            for (int i = 0; i < O.r; ++i) lifts[v].a0[static_cast<size_t>(i)] = (v >> i) & 1;

        digits.resize(fan);
        for (uint32_t c = 0; c < fan; ++c) {
            uint32_t rest = c;
            for (int m = n * n - 1; m >= 0; --m) {
                digits[c][static_cast<size_t>(m)] = static_cast<KElem>(rest % f);
                rest = static_cast<uint32_t>(rest / f);
            }
        }

        if (cached) {
            gd.resize(fan);
            qd.resize(fan);
            for (uint32_t c = 0; c < fan; ++c) digit_gram(c, gd[c], qd[c]);
        }

        OElem pi{}, one{};
        pi.a1[0] = 1;
        one.a0[0] = 1;
        OElem w = omul(O, osigma(O, pi), pi);
        pl.assign(static_cast<size_t>(levels), one);
        spl.assign(static_cast<size_t>(levels), one);
        wl.assign(static_cast<size_t>(levels), one);
        for (int l = 1; l < levels; ++l) {
            pl[static_cast<size_t>(l)] = omul(O, pl[static_cast<size_t>(l - 1)], pi);
            spl[static_cast<size_t>(l)] = osigma(O, pl[static_cast<size_t>(l)]);
            wl[static_cast<size_t>(l)] = omul(O, wl[static_cast<size_t>(l - 1)], w);
        }

        level_counts.assign(static_cast<size_t>(levels) + 1, cpp_int(0));
        if (record) histo.assign(static_cast<size_t>(levels), std::vector<long long>(fan + 1, 0));
    }

    size_t idx(int i, int j) const { return static_cast<size_t>(i * n + j); }

    OElem import(const BElem& e) const {
        OElem z;
        for (int i = 0; i < O.r; ++i) {
            z.a0[static_cast<size_t>(i)] = low_bits(e.a0[static_cast<size_t>(i)], O.kw);
            z.a1[static_cast<size_t>(i)] = low_bits(e.a1[static_cast<size_t>(i)], O.kw);
        }
        return z;
    }

    void digit_gram(uint32_t c, OMat& g, OMat& q) const {
        const auto& dg = digits[c];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                OElem acc{};
                for (int m = 0; m < n; ++m)
                    if (KElem dm = dg[idx(m, j)]) oacc(O, acc, omul_lift(O, G[idx(i, m)], lifts[dm]));
                g[idx(i, j)] = acc;
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                OElem acc{};
                for (int m = 0; m < n; ++m)
                    if (KElem dm = dg[idx(m, i)]) oacc(O, acc, omul_lift(O, g[idx(m, j)], lifts[dm]));
                q[idx(i, j)] = acc;
            }
    }

    /**
     * Defect after appending digit c at the given level; false as soon as an
     * entry fails to vanish one level deeper than before.
     */
    bool child_defect(int depth, const OMat& D, const OMat& M, uint32_t c, const OMat& q,
                      OMat& out) const {
        const auto& dg = digits[c];
        OMat T{};
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i) {
                KElem dmi = dg[idx(m, i)];
                if (!dmi) continue;
                const OElem& lf = lifts[dmi];
                for (int j = 0; j < n; ++j) oacc(O, T[idx(i, j)], omul_lift(O, M[idx(m, j)], lf));
            }
        const OElem &p = pl[static_cast<size_t>(depth)], &sp = spl[static_cast<size_t>(depth)],
                    &w = wl[static_cast<size_t>(depth)];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                OElem v = oadd(O, D[idx(i, j)], omul(O, sp, T[idx(i, j)]));
                oacc(O, v, omul(O, p, osigma(O, T[idx(j, i)])));
                oacc(O, v, omul(O, w, q[idx(i, j)]));
                if (oval(O, v) < depth + 1) return false;
                out[idx(i, j)] = v;
            }
        return true;
    }

    void bump_expanded() {
        if (++expanded > budget) throw BudgetExceeded(budget);
    }

    void step_m(int depth, const OMat& M, const OMat& g, OMat& out) const {
        for (int t = 0; t < n * n; ++t)
            out[static_cast<size_t>(t)] =
                oadd(O, M[static_cast<size_t>(t)],
                     omul(O, pl[static_cast<size_t>(depth)], g[static_cast<size_t>(t)]));
    }

    void count(int depth, const OMat& D, const OMat& M) {
        ++level_counts[static_cast<size_t>(depth)];
        if (depth == levels) return;
        bump_expanded();
        OMat Dp, Mp, gbuf, qbuf;
        long long surv = 0;
        for (uint32_t c = 0; c < fan; ++c) {
            if (!cached) digit_gram(c, gbuf, qbuf);
            const OMat& g = cached ? gd[c] : gbuf;
            const OMat& q = cached ? qd[c] : qbuf;
            if (!child_defect(depth, D, M, c, q, Dp)) continue;
            ++surv;
            step_m(depth, M, g, Mp);
            count(depth + 1, Dp, Mp);
        }
        if (record) ++histo[static_cast<size_t>(depth)][static_cast<size_t>(surv)];
    }

    bool search(int depth, const OMat& D, const OMat& M) {
        if (depth == levels) return true;
        bump_expanded();
        OMat Dp, Mp, gbuf, qbuf;
        for (uint32_t c = 0; c < fan; ++c) {
            if (!cached) digit_gram(c, gbuf, qbuf);
            const OMat& g = cached ? gd[c] : gbuf;
            const OMat& q = cached ? qd[c] : qbuf;
            if (!child_defect(depth, D, M, c, q, Dp)) continue;
            step_m(depth, M, g, Mp);
            choice.push_back(c);
            if (search(depth + 1, Dp, Mp)) return true;
            choice.pop_back();
        }
        return false;
    }

    OMat initial_defect() const {
        OMat D{};
        for (int t = 0; t < n * n; ++t)
            D[static_cast<size_t>(t)] = oneg(O, target[static_cast<size_t>(t)]);
        return D;
    }
};

void check_rank(const Lattice& L, int max_rank, const char* what) {
    if (L.gram.rows > max_rank)
        throw Error(std::string(what) + " supports rank <= " + std::to_string(max_rank));
}

} // namespace

cpp_int congruence_count(const Lattice& L, int d, const OracleOptions& opt) {
    check_rank(L, 2, "congruence counting");
    if (d <= 0 || L.gram.rows == 0) return 1;
    Engine e(L, L.gram, 2 * d, opt, false);
    OMat M{};
    e.count(0, e.initial_defect(), M);
    return e.level_counts[static_cast<size_t>(2 * d)];
}

OracleProfile oracle_profile(const Lattice& L, int d_max, const OracleOptions& opt) {
    check_rank(L, 2, "congruence counting");
    if (d_max < 1) throw Error("profile depth must be positive");
    OracleProfile out;
    out.rank = L.gram.rows;
    out.f = L.ring->kappa.size();
    out.d_max = d_max;
    if (out.rank == 0) {
        out.raw.assign(static_cast<size_t>(d_max), 1);
        out.normalized.assign(static_cast<size_t>(d_max), 1);
        out.stabilized = true;
        out.stable_value = 1;
        return out;
    }
    Engine e(L, L.gram, 2 * d_max, opt, opt.record_multiplicity);
    OMat M{};
    e.count(0, e.initial_defect(), M);
    cpp_int fpow = 1, step = 1;
    for (int t = 0; t < out.rank * out.rank; ++t) step *= out.f;
    for (int d = 1; d <= d_max; ++d) {
        fpow *= step;
        out.raw.push_back(e.level_counts[static_cast<size_t>(2 * d)]);
        out.normalized.emplace_back(out.raw.back(), fpow);
    }
    out.states_expanded = e.expanded;
    if (d_max >= 2 && out.normalized[static_cast<size_t>(d_max - 1)] ==
                          out.normalized[static_cast<size_t>(d_max - 2)]) {
        out.stabilized = true;
        out.stable_value = out.normalized.back();
    }
    if (opt.record_multiplicity) {
        out.child_multiplicity.resize(e.histo.size());
        for (size_t l = 0; l < e.histo.size(); ++l) {
            const auto& h = e.histo[l];
            size_t last = h.size();
            while (last > 0 && h[last - 1] == 0) --last;
            out.child_multiplicity[l].assign(h.begin(), h.begin() + static_cast<long>(last));
        }
    }
    return out;
}

std::optional<BMat> isometry_search(const Lattice& L1, const Lattice& L2, int pi_depth,
                                    const OracleOptions& opt) {
    check_rank(L1, 3, "isometry search");
    if (L1.gram.rows != L2.gram.rows) return std::nullopt;
    if (!L1.ring->same_structure(*L2.ring)) throw ContextMismatch();
    int n = L1.gram.rows;
    if (n == 0) return bm_identity(L1.ring, 0);
    if (pi_depth < 1) return bm_identity(L1.ring, n);

    Engine e(L1, L2.gram, pi_depth, opt, false);
    OMat M{};
    if (!e.search(0, e.initial_defect(), M)) return std::nullopt;

    const RingPtr& R = L1.ring;
    BMat U = bm_zero(R, n, n);
    BElem p = b_one(R);
    for (int l = 0; l < pi_depth; ++l) {
        const auto& dg = e.digits[e.choice[static_cast<size_t>(l)]];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                KElem d = dg[static_cast<size_t>(i * n + j)];
                if (d) U.at(i, j) = b_add(U.at(i, j), b_mul(p, b_lift(R, d)));
            }
        p = b_mul(p, b_pi(R));
    }
    return U;
}

} // namespace herm2
