#include "herm2/ring.hpp"

#include <sstream>

namespace herm2 {

namespace {

Avec a_zero(int r) { return Avec(static_cast<size_t>(r), cpp_int(0)); }

void ctx_check(const BElem& x, const BElem& y) {
    if (x.ring.get() == y.ring.get() && x.ring) return;
    if (!x.ring || !y.ring || !x.ring->same_structure(*y.ring)) throw ContextMismatch();
}

Avec a_sub(const RingContext& R, const Avec& x, const Avec& y, int prec) {
    Avec z(static_cast<size_t>(R.r));
    for (int i = 0; i < R.r; ++i) z[i] = mod_pow2(x[i] - y[i], prec);
    return z;
}

Avec a_scale(const RingContext& R, const cpp_int& c, const Avec& x, int prec) {
    Avec z(static_cast<size_t>(R.r));
    for (int i = 0; i < R.r; ++i) z[i] = mod_pow2(c * x[i], prec);
    return z;
}

Avec a_pow(const RingContext& R, const Avec& x, int e, int prec) {
    Avec acc = a_zero(R.r);
    acc[0] = 1;
    for (int i = 0; i < e; ++i) acc = a_mul(R, acc, x, prec);
    return acc;
}

/** Shift every coefficient right by e bits; all must be divisible. */
Avec a_shr(const Avec& x, int e, const char* where) {
    Avec z(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (mod_pow2(x[i], e) != 0)
            throw Error(std::string("inexact division by 2^e in ") + where);
        z[i] = x[i] >> e;
    }
    return z;
}

KElem a_residue(const Avec& x) {
    KElem m = 0;
    for (size_t i = 0; i < x.size(); ++i)
        if ((x[i] & 1) != 0) m |= static_cast<KElem>(1u << i);
    return m;
}

Avec a_from_kappa(int r, KElem m) {
    Avec z = a_zero(r);
    for (int i = 0; i < r; ++i)
        if (m & (1u << i)) z[i] = 1;
    return z;
}

} // namespace

cpp_int mod_pow2(const cpp_int& x, int prec) {
    if (prec <= 0) return 0;
    cpp_int m = cpp_int(1) << prec;
    cpp_int v = x % m;
    if (v < 0) v += m;
    return v;
}

std::optional<int> avec_v2(const Avec& a, int prec) {
    int best = -1;
    for (const cpp_int& c : a) {
        cpp_int v = mod_pow2(c, prec);
        if (v == 0) continue;
        int w = static_cast<int>(boost::multiprecision::lsb(v));
        if (best < 0 || w < best) best = w;
    }
    if (best < 0) return std::nullopt;
    return best;
}

Avec a_add(const RingContext& R, const Avec& x, const Avec& y, int prec) {
    Avec z(static_cast<size_t>(R.r));
    for (int i = 0; i < R.r; ++i) z[i] = mod_pow2(x[i] + y[i], prec);
    return z;
}

Avec a_mul(const RingContext& R, const Avec& x, const Avec& y, int prec) {
    int r = R.r;
    std::vector<cpp_int> buf(static_cast<size_t>(2 * r - 1), cpp_int(0));
    for (int i = 0; i < r; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < r; ++j) buf[i + j] += x[i] * y[j];
    }
    // fold degrees >= r using t^r = -(low part of the defining polynomial)
    std::uint32_t low = R.kappa.modulus() & ((1u << r) - 1);
    for (int d = 2 * r - 2; d >= r; --d) {
        if (buf[d] == 0) continue;
        cpp_int c = buf[d];
        buf[d] = 0;
        for (int b = 0; b < r; ++b)
            if (low & (1u << b)) buf[d - r + b] -= c;
    }
    Avec z(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) z[i] = mod_pow2(buf[i], prec);
    return z;
}

Avec a_inv(const RingContext& R, const Avec& x, int prec) {
    KElem res = a_residue(x);
    if (res == 0) throw Error("a_inv: not a unit");
    Avec inv = a_from_kappa(R.r, R.kappa.inv(res));
    // Newton step doubles the number of valid digits each round
    Avec two = a_zero(R.r);
    two[0] = 2;
    for (int digits = 1; digits < prec; digits *= 2) {
        Avec t = a_sub(R, two, a_mul(R, x, inv, prec), prec);
        inv = a_mul(R, inv, t, prec);
    }
    return inv;
}

RingContext::RingContext(Case c, int r_, int k_, Avec param_)
    : cse(c), r(r_), k(k_), kappa(r_), param(std::move(param_)) {
    if (k < 2) throw Error("working precision must be at least 2");
    if (static_cast<int>(param.size()) != r) throw Error("param coefficient count must equal r");
    for (cpp_int& c0 : param) c0 = mod_pow2(c0, k);
    if (a_residue(param) == 0) throw NonUnitParam();
    param_inv = a_inv(*this, param, k);
}

bool RingContext::same_structure(const RingContext& o) const {
    return cse == o.cse && r == o.r && k == o.k && param == o.param;
}

RingPtr make_ring(Case c, int r, int k, const Avec& param) {
    return std::make_shared<const RingContext>(c, r, k, param);
}

RingPtr make_ring(Case c, int r, int k, long long param_const) {
    if (r < 1 || r > 8) throw UnsupportedDegree(r);
    Avec p = a_zero(r);
    p[0] = param_const;
    return make_ring(c, r, k, p);
}

BElem b_zero(const RingPtr& R) { return BElem{a_zero(R->r), a_zero(R->r), R->k, R}; }

BElem b_one(const RingPtr& R) {
    BElem x = b_zero(R);
    x.a0[0] = 1;
    return x;
}

BElem b_pi(const RingPtr& R) {
    BElem x = b_zero(R);
    x.a1[0] = 1;
    return x;
}

BElem b_param(const RingPtr& R) { return BElem{R->param, a_zero(R->r), R->k, R}; }

BElem b_from_int(const RingPtr& R, const cpp_int& c) {
    BElem x = b_zero(R);
    x.a0[0] = mod_pow2(c, R->k);
    return x;
}

BElem b_from_coeffs(const RingPtr& R, Avec a0, Avec a1) {
    a0.resize(static_cast<size_t>(R->r), cpp_int(0));
    a1.resize(static_cast<size_t>(R->r), cpp_int(0));
    for (cpp_int& c : a0) c = mod_pow2(c, R->k);
    for (cpp_int& c : a1) c = mod_pow2(c, R->k);
    return BElem{std::move(a0), std::move(a1), R->k, R};
}

BElem b_lift(const RingPtr& R, KElem c) {
    return BElem{a_from_kappa(R->r, c), a_zero(R->r), R->k, R};
}

BElem b_add(const BElem& x, const BElem& y) {
    ctx_check(x, y);
    int p = std::min(x.prec, y.prec);
    return BElem{a_add(*x.ring, x.a0, y.a0, p), a_add(*x.ring, x.a1, y.a1, p), p, x.ring};
}

BElem b_sub(const BElem& x, const BElem& y) {
    ctx_check(x, y);
    int p = std::min(x.prec, y.prec);
    return BElem{a_sub(*x.ring, x.a0, y.a0, p), a_sub(*x.ring, x.a1, y.a1, p), p, x.ring};
}

BElem b_neg(const BElem& x) {
    const RingContext& R = *x.ring;
    Avec z = a_zero(R.r);
    return BElem{a_sub(R, z, x.a0, x.prec), a_sub(R, z, x.a1, x.prec), x.prec, x.ring};
}

BElem b_mul(const BElem& x, const BElem& y) {
    ctx_check(x, y);
    const RingContext& R = *x.ring;
    int p = std::min(x.prec, y.prec);
    Avec cross = a_mul(R, x.a1, y.a1, p);
    Avec c0, c1;
    if (R.cse == Case::unit_radicand) {
        // pi^2 = 2 pi + 2u
        Avec tu = a_scale(R, 2, a_mul(R, R.param, cross, p), p);
        c0 = a_add(R, a_mul(R, x.a0, y.a0, p), tu, p);
        c1 = a_add(R, a_add(R, a_mul(R, x.a0, y.a1, p), a_mul(R, x.a1, y.a0, p), p),
                   a_scale(R, 2, cross, p), p);
    } else {
        // pi^2 = 2 delta
        Avec td = a_scale(R, 2, a_mul(R, R.param, cross, p), p);
        c0 = a_add(R, a_mul(R, x.a0, y.a0, p), td, p);
        c1 = a_add(R, a_mul(R, x.a0, y.a1, p), a_mul(R, x.a1, y.a0, p), p);
    }
    return BElem{std::move(c0), std::move(c1), p, x.ring};
}

BElem b_sigma(const BElem& x) {
    const RingContext& R = *x.ring;
    Avec z = a_zero(R.r);
    Avec na1 = a_sub(R, z, x.a1, x.prec);
    if (R.cse == Case::unit_radicand)
        return BElem{a_add(R, x.a0, a_scale(R, 2, x.a1, x.prec), x.prec), std::move(na1),
                     x.prec, x.ring};
    return BElem{x.a0, std::move(na1), x.prec, x.ring};
}

BElem b_trace(const BElem& x) {
    const RingContext& R = *x.ring;
    Avec t;
    if (R.cse == Case::unit_radicand)
        t = a_scale(R, 2, a_add(R, x.a0, x.a1, x.prec), x.prec);
    else
        t = a_scale(R, 2, x.a0, x.prec);
    return BElem{std::move(t), a_zero(R.r), x.prec, x.ring};
}

BElem b_norm(const BElem& x) {
    const RingContext& R = *x.ring;
    int p = x.prec;
    Avec sq0 = a_mul(R, x.a0, x.a0, p);
    Avec sq1 = a_mul(R, x.a1, x.a1, p);
    Avec n;
    if (R.cse == Case::unit_radicand) {
        // a0^2 + 2 a0 a1 - 2u a1^2
        Avec mid = a_scale(R, 2, a_mul(R, x.a0, x.a1, p), p);
        n = a_sub(R, a_add(R, sq0, mid, p), a_scale(R, 2, a_mul(R, R.param, sq1, p), p), p);
    } else {
        // a0^2 - 2 delta a1^2
        n = a_sub(R, sq0, a_scale(R, 2, a_mul(R, R.param, sq1, p), p), p);
    }
    return BElem{std::move(n), a_zero(R.r), p, x.ring};
}

bool b_eq(const BElem& x, const BElem& y) {
    ctx_check(x, y);
    int p = std::min(x.prec, y.prec);
    for (int i = 0; i < x.ring->r; ++i) {
        if (mod_pow2(x.a0[i] - y.a0[i], p) != 0) return false;
        if (mod_pow2(x.a1[i] - y.a1[i], p) != 0) return false;
    }
    return true;
}

bool b_is_zero(const BElem& x) {
    for (const cpp_int& c : x.a0)
        if (mod_pow2(c, x.prec) != 0) return false;
    for (const cpp_int& c : x.a1)
        if (mod_pow2(c, x.prec) != 0) return false;
    return true;
}

std::optional<int> b_val(const BElem& x) {
    std::optional<int> v0 = avec_v2(x.a0, x.prec);
    std::optional<int> v1 = avec_v2(x.a1, x.prec);
    if (!v0 && !v1) return std::nullopt;
    int best = v0 ? 2 * *v0 : 2 * x.prec;
    if (v1) best = std::min(best, 2 * *v1 + 1);
    return best;
}

KElem b_residue(const BElem& x) {
    KElem m = 0;
    for (int i = 0; i < x.ring->r; ++i)
        if ((x.a0[i] & 1) != 0) m |= static_cast<KElem>(1u << i);
    return m;
}

BElem b_inv(const BElem& x) {
    if (b_residue(x) == 0) throw Error("b_inv: not a unit");
    const RingContext& R = *x.ring;
    BElem n = b_norm(x);
    Avec ninv = a_inv(R, n.a0, x.prec);
    BElem s = b_sigma(x);
    return BElem{a_mul(R, s.a0, ninv, x.prec), a_mul(R, s.a1, ninv, x.prec), x.prec, x.ring};
}

BElem b_div2(const BElem& x, int e) {
    if (e == 0) return x;
    if (e < 0 || e >= x.prec) throw PrecisionExhausted("b_div2");
    return BElem{a_shr(x.a0, e, "b_div2"), a_shr(x.a1, e, "b_div2"), x.prec - e, x.ring};
}

BElem b_div_pi(const BElem& x) {
    const RingContext& R = *x.ring;
    if (x.prec < 2) throw PrecisionExhausted("b_div_pi");
    Avec t = a_mul(R, x.a0, R.param_inv, x.prec);
    Avec b1 = a_shr(t, 1, "b_div_pi");
    int p = x.prec - 1;
    Avec b0;
    if (R.cse == Case::unit_radicand)
        b0 = a_sub(R, x.a1, t, p);
    else
        b0 = x.a1;
    for (cpp_int& c : b0) c = mod_pow2(c, p);
    for (cpp_int& c : b1) c = mod_pow2(c, p);
    return BElem{std::move(b0), std::move(b1), p, x.ring};
}

BElem b_div(const BElem& x, const BElem& y) {
    ctx_check(x, y);
    const RingContext& R = *x.ring;
    BElem z = b_mul(x, b_sigma(y));
    BElem n = b_norm(y);
    std::optional<int> v = avec_v2(n.a0, n.prec);
    if (!v) throw PrecisionExhausted("b_div");
    Avec eta = a_shr(n.a0, *v, "b_div");
    int p = z.prec - *v;
    if (p < 1) throw PrecisionExhausted("b_div");
    Avec einv = a_inv(R, eta, p);
    Avec c0 = a_shr(a_mul(R, z.a0, einv, z.prec), *v, "b_div");
    Avec c1 = a_shr(a_mul(R, z.a1, einv, z.prec), *v, "b_div");
    for (cpp_int& c : c0) c = mod_pow2(c, p);
    for (cpp_int& c : c1) c = mod_pow2(c, p);
    return BElem{std::move(c0), std::move(c1), p, x.ring};
}

BElem b_mul_w(const BElem& x, int j) {
    if (j == 0) return x;
    const RingContext& R = *x.ring;
    int p = std::min(x.prec + j, R.k);
    Avec pw = a_pow(R, R.param, j, p);
    cpp_int sh = cpp_int(1) << j;
    if (j & 1) sh = -sh; // w = -2 * param
    Avec c0 = a_scale(R, sh, a_mul(R, x.a0, pw, p), p);
    Avec c1 = a_scale(R, sh, a_mul(R, x.a1, pw, p), p);
    return BElem{std::move(c0), std::move(c1), p, x.ring};
}

BElem b_div_w(const BElem& x, int j) {
    if (j == 0) return x;
    const RingContext& R = *x.ring;
    if (x.prec <= j) throw PrecisionExhausted("b_div_w");
    Avec pw = a_pow(R, R.param_inv, j, x.prec);
    cpp_int sign = (j & 1) ? -1 : 1;
    Avec c0 = a_shr(a_scale(R, sign, a_mul(R, x.a0, pw, x.prec), x.prec), j, "b_div_w");
    Avec c1 = a_shr(a_scale(R, sign, a_mul(R, x.a1, pw, x.prec), x.prec), j, "b_div_w");
    int p = x.prec - j;
    for (cpp_int& c : c0) c = mod_pow2(c, p);
    for (cpp_int& c : c1) c = mod_pow2(c, p);
    return BElem{std::move(c0), std::move(c1), p, x.ring};
}

std::string b_to_string(const BElem& x) {
    std::ostringstream ss;
    auto coeffs = [&](const Avec& a) {
        ss << "[";
        for (size_t i = 0; i < a.size(); ++i) {
            if (i) ss << ",";
            ss << a[i];
        }
        ss << "]";
    };
    coeffs(x.a0);
    ss << "+";
    coeffs(x.a1);
    ss << "*pi (prec " << x.prec << ")";
    return ss.str();
}

} // namespace herm2
