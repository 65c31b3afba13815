#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "herm2/lattice.hpp"
#include "support.hpp"

using namespace herm2;
using namespace herm2::test;

namespace {

BMat random_mat(const RingPtr& R, int n, std::mt19937_64& rng) {
    BMat M = bm_zero(R, n, n);
    for (BElem& e : M.a) e = random_elem(R, rng);
    return M;
}

/** sigma(M)^t M, hermitian by construction. */
BMat random_hermitian(const RingPtr& R, int n, std::mt19937_64& rng) {
    BMat M = random_mat(R, n, rng);
    return bm_mul(bm_sigma_t(M), M);
}

} // namespace

TEST_CASE("determinant against hand values and multiplicativity") {
    RingPtr R = ring1(1, 16);
    BMat A = gm(R, {{{1, 0}, {0, 1}}, {{0, -1}, {3, 0}}});
    // det = 1 * 3 - pi * (-pi) = 3 + pi^2 = 3 + 2 pi + 2
    CHECK(b_eq(bm_det(A), be(R, 5, 2)));

    BMat H = gm(R, {{{0, 0}, {0, 1}}, {{2, -1}, {0, 0}}});
    CHECK(b_eq(bm_det(H), bi(R, 2))); // -pi sigma(pi) = 2u

    std::mt19937_64 rng(21);
    for (Case c : {Case::unit_radicand, Case::even_radicand}) {
        RingPtr S = make_ring(c, 2, 12, Avec{1, 1});
        for (int trial = 0; trial < 20; ++trial) {
            BMat X = random_mat(S, 3, rng), Y = random_mat(S, 3, rng);
            CHECK(b_eq(bm_det(bm_mul(X, Y)), b_mul(bm_det(X), bm_det(Y))));
            CHECK(b_eq(bm_det(bm_sigma_t(X)), b_sigma(bm_det(X))));
            CHECK(b_val(bm_det(random_unimodular(S, 4, rng))) == 0);
        }
    }
}

TEST_CASE("conjugation composes contravariantly") {
    std::mt19937_64 rng(22);
    RingPtr R = ring2(2, 12);
    BMat G = random_hermitian(R, 3, rng);
    BMat U = random_mat(R, 3, rng), V = random_mat(R, 3, rng);
    CHECK(bm_eq(bm_conj(G, bm_mul(U, V)), bm_conj(bm_conj(G, U), V)));
    CHECK(bm_eq(bm_conj(G, bm_identity(R, 3)), G));
}

TEST_CASE("lattice validation") {
    RingPtr R = ring1(1, 16);
    CHECK_NOTHROW(lat(R, {{{3, 0}, {0, 1}}, {{2, -1}, {4, 0}}}));
    // mirror entry not conjugate
    CHECK_THROWS_AS(lat(R, {{{3, 0}, {0, 1}}, {{0, 1}, {4, 0}}}), NotHermitian);
    // diagonal moved by the involution
    CHECK_THROWS_AS(lat(R, {{{3, 1}, {0, 1}}, {{2, -1}, {4, 0}}}), NotHermitian);

    std::mt19937_64 rng(23);
    for (Case c : {Case::unit_radicand, Case::even_radicand}) {
        RingPtr S = make_ring(c, 1, 12, 1);
        for (int trial = 0; trial < 30; ++trial)
            CHECK_NOTHROW(make_lattice(S, random_hermitian(S, 3, rng)));
    }
}

TEST_CASE("form evaluation matches the Gram and is conjugate-linear on the left") {
    std::mt19937_64 rng(24);
    RingPtr R = ring1(2, 12);
    BMat G = random_hermitian(R, 3, rng);
    std::vector<BElem> x, y;
    for (int i = 0; i < 3; ++i) {
        x.push_back(random_elem(R, rng));
        y.push_back(random_elem(R, rng));
    }
    BElem lam = random_elem(R, rng);

    std::vector<BElem> e0 = {b_one(R), b_zero(R), b_zero(R)};
    std::vector<BElem> e2 = {b_zero(R), b_zero(R), b_one(R)};
    CHECK(b_eq(h_eval(G, e0, e2), G.at(0, 2)));

    std::vector<BElem> lx = x, ly = y;
    for (BElem& e : lx) e = b_mul(lam, e);
    for (BElem& e : ly) e = b_mul(lam, e);
    CHECK(b_eq(h_eval(G, lx, y), b_mul(b_sigma(lam), h_eval(G, x, y))));
    CHECK(b_eq(h_eval(G, x, ly), b_mul(lam, h_eval(G, x, y))));
    CHECK(b_eq(h_eval(G, y, x), b_sigma(h_eval(G, x, y))));
}

TEST_CASE("scale and norm exponents on catalog grams") {
    RingPtr R1 = ring1(1, 16);
    RingPtr R2 = ring2(1, 16);

    Lattice unit1 = lat(R1, {{{1, 0}}});
    CHECK(scale_exp(unit1) == 0);
    CHECK(norm_exp(unit1) == 0);

    Lattice h0 = lat(R1, {{{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}});
    CHECK(scale_exp(h0) == 0);
    CHECK(norm_exp(h0) == 2);

    // hyperbolic-type plane at scale 1: off-diagonal pi
    Lattice h1c1 = lat(R1, {{{0, 0}, {0, 1}}, {{2, -1}, {0, 0}}});
    CHECK(scale_exp(h1c1) == 1);
    CHECK(norm_exp(h1c1) == 2);

    Lattice h1c2 = lat(R2, {{{0, 0}, {0, 1}}, {{0, -1}, {0, 0}}});
    CHECK(scale_exp(h1c2) == 1);
    CHECK(norm_exp(h1c2) == 4);

    Lattice a2 = lat(R2, {{{2, 0}, {0, 0}}, {{0, 0}, {2, 0}}});
    CHECK(scale_exp(a2) == 2);
    CHECK(norm_exp(a2) == 2);

    Lattice two1 = lat(R1, {{{2, 0}}});
    CHECK(scale_exp(two1) == 2);
    CHECK(norm_exp(two1) == 2);
}

TEST_CASE("norm exponent is always even") {
    std::mt19937_64 rng(25);
    for (Case c : {Case::unit_radicand, Case::even_radicand}) {
        RingPtr R = make_ring(c, 2, 12, Avec{1, 0});
        for (int trial = 0; trial < 60; ++trial) {
            BMat G = random_hermitian(R, 2 + static_cast<int>(rng() % 3), rng);
            try {
                CHECK(norm_exp_gram(G) % 2 == 0);
            } catch (const Error&) {
                // degenerate draw, nothing to check
            }
        }
    }
}

TEST_CASE("rescaling shifts both exponents by twice the step") {
    std::mt19937_64 rng(26);
    for (Case c : {Case::unit_radicand, Case::even_radicand}) {
        RingPtr R = make_ring(c, 1, 16, 1);
        BElem w = b_mul(b_sigma(b_pi(R)), b_pi(R));
        for (int trial = 0; trial < 20; ++trial) {
            Lattice L = make_lattice(R, random_hermitian(R, 3, rng));
            Lattice Lw = rescale(L, 2);
            CHECK(bm_eq(Lw.gram, bm_scale(b_mul(w, w), L.gram)));
            try {
                CHECK(scale_exp(Lw) == scale_exp(L) + 4);
                CHECK(norm_exp(Lw) == norm_exp(L) + 4);
            } catch (const Error&) {
            }
        }
    }
}

TEST_CASE("valuation of the determinant is a base-change invariant") {
    std::mt19937_64 rng(27);
    for (Case c : {Case::unit_radicand, Case::even_radicand}) {
        RingPtr R = make_ring(c, 1, 14, 1);
        for (int trial = 0; trial < 20; ++trial) {
            Lattice L = make_lattice(R, random_hermitian(R, 3, rng));
            auto v = b_val(bm_det(L.gram));
            if (!v) continue;
            BMat U = random_unimodular(R, 3, rng);
            CHECK(b_val(bm_det(base_change(L, U).gram)) == v);
        }
    }
}

TEST_CASE("congruence depth") {
    RingPtr R = ring1(1, 16);
    BMat A = gm(R, {{{5, 0}}});
    BMat B = gm(R, {{{5 + 8, 0}}});
    CHECK(bm_congruent(A, B, 6));   // difference 8 has valuation 6
    CHECK(!bm_congruent(A, B, 7));
}
