#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "herm2/errors.hpp"
#include "herm2/kappa.hpp"

namespace herm2 {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

/** Coefficient vector of an element of A = W(kappa), length r, entries mod 2^prec. */
using Avec = std::vector<cpp_int>;

/**
 * Which ramified quadratic extension B/A is in play.
 *
 * unit_radicand:     B = A[pi], pi = 1 + sqrt(1 + 2u),  pi^2 = 2 pi + 2u,  sigma(pi) = 2 - pi
 * even_radicand:     B = A[pi], pi = sqrt(2 delta),     pi^2 = 2 delta,    sigma(pi) = -pi
 *
 * In both cases val(pi) = 1, val(2) = 2, and sigma(pi) * pi = -2 * param.
 */
enum class Case { unit_radicand = 1, even_radicand = 2 };

struct RingContext {
    Case cse;
    int r;        ///< residue degree, kappa has 2^r elements
    int k;        ///< working precision: coefficients carry up to k two-adic digits
    Kappa kappa;
    Avec param;     ///< u or delta, a unit, stored mod 2^k
    Avec param_inv; ///< its inverse mod 2^k

    RingContext(Case c, int r_, int k_, Avec param_);
    bool same_structure(const RingContext& o) const;
};

using RingPtr = std::shared_ptr<const RingContext>;

/** Build a ring context; param given by its coefficient vector (constant first). */
RingPtr make_ring(Case c, int r, int k, const Avec& param);
RingPtr make_ring(Case c, int r, int k, long long param_const = 1);

/**
 * An element a0 + a1 * pi of B, with both coordinates in A.
 * Coefficients are canonical representatives in [0, 2^prec); prec is the
 * number of valid two-adic digits and never exceeds the ring's k.
 */
struct BElem {
    Avec a0, a1;
    int prec = 0;
    RingPtr ring;
};

/* construction */
BElem b_zero(const RingPtr& R);
BElem b_one(const RingPtr& R);
BElem b_pi(const RingPtr& R);
BElem b_param(const RingPtr& R);
BElem b_from_int(const RingPtr& R, const cpp_int& c);
BElem b_from_coeffs(const RingPtr& R, Avec a0, Avec a1);
/** Canonical lift of a residue class: 0/1 coefficients, a1 = 0, full precision. */
BElem b_lift(const RingPtr& R, KElem c);

/* arithmetic; binary operations require matching contexts and take min precision */
BElem b_add(const BElem& x, const BElem& y);
BElem b_sub(const BElem& x, const BElem& y);
BElem b_neg(const BElem& x);
BElem b_mul(const BElem& x, const BElem& y);
BElem b_sigma(const BElem& x);
/** x + sigma(x); the a1 coordinate of the result is exactly zero. */
BElem b_trace(const BElem& x);
/** x * sigma(x); the a1 coordinate of the result is exactly zero. */
BElem b_norm(const BElem& x);

/** Stored representatives agree modulo 2^min(prec). */
bool b_eq(const BElem& x, const BElem& y);
bool b_is_zero(const BElem& x);

/**
 * pi-adic valuation, min(2 v2(a0), 2 v2(a1) + 1).
 * Certain values lie in [0, 2 prec - 1]; nullopt means the element vanishes
 * to working precision and its valuation is at least 2 prec.
 */
std::optional<int> b_val(const BElem& x);

/** Residue class mod pi, the image of a0 in kappa. */
KElem b_residue(const BElem& x);

/** Inverse of a unit (nonzero residue); full Hensel lift, no precision loss. */
BElem b_inv(const BElem& x);

/** Exact division by 2^e; throws if a stored coefficient is not divisible. */
BElem b_div2(const BElem& x, int e);
/** Exact division by pi; costs one digit of precision. */
BElem b_div_pi(const BElem& x);
/** Exact division x / y for val(x) >= val(y); costs v2(norm(y)) digits. */
BElem b_div(const BElem& x, const BElem& y);

/**
 * Multiply by w^j where w = sigma(pi) * pi = -2 * param, exactly.
 * w is known exactly, so precision grows by j (capped at the ring's k).
 */
BElem b_mul_w(const BElem& x, int j);
/** Exact division by w^j; costs j digits. */
BElem b_div_w(const BElem& x, int j);

std::string b_to_string(const BElem& x);

/* A-coordinate helpers shared with the rest of the library */
cpp_int mod_pow2(const cpp_int& x, int prec);
std::optional<int> avec_v2(const Avec& a, int prec);
Avec a_mul(const RingContext& R, const Avec& x, const Avec& y, int prec);
Avec a_add(const RingContext& R, const Avec& x, const Avec& y, int prec);
Avec a_inv(const RingContext& R, const Avec& x, int prec);

} // namespace herm2
