#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "herm2/jordan.hpp"
#include "herm2/oracle.hpp"
#include "support.hpp"

using namespace herm2;
using namespace herm2::test;

namespace {

struct TypeRow {
    int index, rank;
    bool type_one, bound;
};

std::vector<TypeRow> type_rows(const JordanDecomposition& dec) {
    std::vector<TypeRow> out;
    for (const auto& b : dec.blocks) out.push_back({b.index, b.rank, b.type_one, b.bound});
    return out;
}

bool operator==(const TypeRow& x, const TypeRow& y) {
    return x.index == y.index && x.rank == y.rank && x.type_one == y.type_one &&
           x.bound == y.bound;
}

JordanDecomposition from_grams(const RingPtr& R, std::vector<std::pair<int, BMat>> blocks) {
    return assemble_blocks(R, std::move(blocks));
}

} // namespace

TEST_CASE("splitting recovers a conjugated block-diagonal structure") {
    auto R = ring1();
    std::mt19937_64 rng(1009);
    BMat D = direct_sum(R, {gm(R, {{{1, 0}}}), gram_hyperbolic(R, 1), gm(R, {{{4, 0}}})});
    for (int trial = 0; trial < 8; ++trial) {
        BMat U = random_unimodular(R, 4, rng);
        Lattice L = make_lattice(R, bm_conj(D, U));
        auto dec = jordan_split(L);
        REQUIRE(dec.blocks.size() == 3);
        CHECK(dec.blocks[0].index == 0);
        CHECK(dec.blocks[0].rank == 1);
        CHECK(dec.blocks[1].index == 1);
        CHECK(dec.blocks[1].rank == 2);
        CHECK(dec.blocks[2].index == 4);
        CHECK(dec.blocks[2].rank == 1);
        CHECK(dec.total_rank == 4);
        CHECK(dec.min_index == 0);
        CHECK(dec.bound_index == 5);

        // the recorded transform takes the input Gram to the exact direct sum
        BMat split = bm_conj(L.gram, dec.transform);
        CHECK(bm_eq(split, assemble_lattice(dec).gram));
        for (const auto& b : dec.blocks) CHECK(b.slice_scale == b.index);
    }
}

TEST_CASE("classification fixtures, unit radicand") {
    auto R = ring1();
    auto d11 = jordan_split(lat(R, {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}}));
    CHECK(type_rows(d11) == std::vector<TypeRow>{{0, 2, true, false}});
    CHECK_FALSE(d11.blocks[0].rank_odd);

    auto h0 = jordan_split(make_lattice(R, gram_hyperbolic(R, 0)));
    CHECK(type_rows(h0) == std::vector<TypeRow>{{0, 2, false, false}});

    auto h1 = jordan_split(make_lattice(R, gram_hyperbolic(R, 1)));
    CHECK(type_rows(h1) == std::vector<TypeRow>{{1, 2, false, false}});

    auto d12 = jordan_split(lat(R, {{{1, 0}, {0, 0}}, {{0, 0}, {2, 0}}}));
    CHECK(type_rows(d12) == std::vector<TypeRow>{{0, 1, true, true}, {2, 1, true, true}});

    auto mix = jordan_split(
        make_lattice(R, direct_sum(R, {gm(R, {{{1, 0}}}), gram_hyperbolic(R, 1)})));
    CHECK(type_rows(mix) == std::vector<TypeRow>{{0, 1, true, false}, {1, 2, false, true}});
}

TEST_CASE("classification fixtures, even radicand") {
    auto R = ring2();
    auto h1 = jordan_split(make_lattice(R, gram_hyperbolic(R, 1)));
    CHECK(type_rows(h1) == std::vector<TypeRow>{{1, 2, false, false}});

    // a type I unit neighbor drags the pi-modular plane to type I
    auto h1u = jordan_split(
        make_lattice(R, direct_sum(R, {gram_hyperbolic(R, 1), gm(R, {{{1, 0}}})})));
    CHECK(type_rows(h1u) == std::vector<TypeRow>{{0, 1, true, false}, {1, 2, true, true}});

    auto d12 = jordan_split(lat(R, {{{1, 0}, {0, 0}}, {{0, 0}, {2, 0}}}));
    CHECK(type_rows(d12) == std::vector<TypeRow>{{0, 1, true, true}, {2, 1, true, true}});

    auto a201 = jordan_split(lat(R, {{{2, 0}, {1, 0}}, {{1, 0}, {0, 0}}}));
    CHECK(type_rows(a201) == std::vector<TypeRow>{{0, 2, false, false}});

    auto rad = jordan_split(lat(R, {{{4, 0}, {0, 1}}, {{0, -1}, {2, 0}}}));
    CHECK(type_rows(rad) == std::vector<TypeRow>{{1, 2, true, false}});
}

TEST_CASE("type data is a base-change invariant") {
    std::mt19937_64 rng(4242);
    for (auto& R : {ring1(), ring2()}) {
        std::vector<BMat> shapes = {
            direct_sum(R, {gm(R, {{{1, 0}}}), gm(R, {{{2, 0}}})}),
            direct_sum(R, {gram_hyperbolic(R, 1), gm(R, {{{1, 0}}})}),
            direct_sum(R, {gm(R, {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}}), gram_hyperbolic(R, 0)}),
        };
        for (const BMat& G : shapes) {
            auto base = type_rows(jordan_split(make_lattice(R, G)));
            for (int trial = 0; trial < 10; ++trial) {
                BMat U = random_unimodular(R, G.rows, rng);
                auto moved = type_rows(jordan_split(make_lattice(R, bm_conj(G, U))));
                CHECK(moved == base);
            }
        }
    }
}

TEST_CASE("index normalization lifts shifted blocks onto their own scale") {
    auto R = ring1();
    auto dec = from_grams(R, {{-2, gm(R, {{{1, 0}}})}, {1, gram_hyperbolic(R, 1)}});
    CHECK(dec.min_index == -2);
    auto base = type_rows(dec);

    auto norm = normalize_indices(dec);
    REQUIRE(norm.blocks.size() == 2);
    CHECK(norm.blocks[0].index == 0);
    CHECK(norm.blocks[0].slice_scale == 0);
    CHECK(bm_eq(norm.blocks[0].slice, gm(R, {{{1, 0}}})));
    CHECK(norm.blocks[1].index == 3);
    CHECK(norm.blocks[1].slice_scale == 3);
    BElem w = b_mul_w(b_one(R), 1);
    CHECK(bm_eq(norm.blocks[1].slice, bm_scale(w, gram_hyperbolic(R, 1))));

    // shifting the whole configuration leaves the classification alone
    auto shifted = type_rows(norm);
    for (size_t t = 0; t < base.size(); ++t) {
        CHECK(shifted[t].type_one == base[t].type_one);
        CHECK(shifted[t].bound == base[t].bound);
    }

    // already normalized data is a fixed point
    auto again = normalize_indices(norm);
    for (size_t t = 0; t < norm.blocks.size(); ++t)
        CHECK(again.blocks[t].index == norm.blocks[t].index);

    auto round = jordan_split(assemble_lattice(norm));
    CHECK(type_rows(round) == shifted);
}

TEST_CASE("assembled data is validated") {
    auto R = ring1();
    CHECK_THROWS_AS(from_grams(R, {{0, gm(R, {{{1, 0}}})}, {0, gm(R, {{{2, 0}}})}}), Error);
    // scale parity must match the index parity
    CHECK_THROWS_AS(from_grams(R, {{1, gm(R, {{{2, 0}}})}}), Error);
    // a slice whose determinant valuation exceeds rank * scale is not modular
    CHECK_THROWS_AS(from_grams(R, {{0, gm(R, {{{1, 0}, {0, 0}}, {{0, 0}, {2, 0}}})}}), Error);
    CHECK_THROWS_AS(jordan_split(lat(R, {{{1, 0}, {1, 0}}, {{1, 0}, {1, 0}}})), Degenerate);
}

TEST_CASE("canonical forms of the small catalogue") {
    auto R1 = ring1();
    auto R2 = ring2();

    auto unit = canonicalize_block(jordan_split(lat(R1, {{{1, 0}}})), 0);
    CHECK(unit.hyperbolic_count == 0);
    CHECK(unit.k_tag == KTag::diag_unit);

    auto pair11 = canonicalize_block(jordan_split(lat(R1, {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}})), 0);
    CHECK(pair11.hyperbolic_count == 0);
    CHECK(pair11.k_tag == KTag::unit_pair);

    auto hyp = canonicalize_block(jordan_split(make_lattice(R1, gram_hyperbolic(R1, 0))), 0);
    CHECK(hyp.hyperbolic_count == 1);
    CHECK(hyp.k_tag == KTag::none);

    // A(2, 0, pi) collapses onto the pi-modular hyperbolic plane
    auto a20 = canonicalize_block(jordan_split(lat(R1, {{{2, 0}, {0, 1}}, {{2, -1}, {0, 0}}})), 1);
    CHECK(a20.hyperbolic_count == 1);
    CHECK(a20.k_tag == KTag::none);

    // A(2, 2, pi) does not; its residue form has the other Arf invariant
    auto a22 = canonicalize_block(jordan_split(lat(R1, {{{2, 0}, {0, 1}}, {{2, -1}, {2, 0}}})), 1);
    CHECK(a22.hyperbolic_count == 0);
    CHECK(a22.k_tag == KTag::trace_pair);
    REQUIRE(a22.k_params.size() == 1);
    CHECK(b_residue(a22.k_params[0]) == 1);

    auto h1c2 = canonicalize_block(jordan_split(make_lattice(R2, gram_hyperbolic(R2, 1))), 1);
    CHECK(h1c2.hyperbolic_count == 1);
    CHECK(h1c2.k_tag == KTag::none);

    auto rad = canonicalize_block(jordan_split(lat(R2, {{{4, 0}, {0, 1}}, {{0, -1}, {2, 0}}})), 1);
    CHECK(rad.hyperbolic_count == 0);
    CHECK(rad.k_tag == KTag::radicand_pair);
}

TEST_CASE("witness columns reproduce the canonical Gram") {
    std::mt19937_64 rng(515);
    auto R = ring1();
    BMat D = direct_sum(R, {gm(R, {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}}), gram_hyperbolic(R, 0)});
    for (int trial = 0; trial < 4; ++trial) {
        BMat U = random_unimodular(R, 4, rng);
        auto dec = jordan_split(make_lattice(R, bm_conj(D, U)));
        auto cf = canonicalize_block(dec, 0);
        CHECK(cf.hyperbolic_count == 1);
        CHECK(cf.k_tag == KTag::unit_pair);
        REQUIRE(cf.witness.rows == 4);
        const BMat& S = dec.blocks[0].slice;
        CHECK(bm_congruent(bm_conj(S, cf.witness), cf.canonical_gram, 10));
    }
}

TEST_CASE("odd unimodular rank splits off one diagonal unit") {
    auto R = ring1();
    auto dec = jordan_split(
        lat(R, {{{1, 0}, {0, 0}, {0, 0}}, {{0, 0}, {1, 0}, {0, 0}}, {{0, 0}, {0, 0}, {1, 0}}}));
    auto cf = canonicalize_block(dec, 0);
    CHECK(cf.hyperbolic_count == 1);
    CHECK(cf.k_tag == KTag::diag_unit);
    REQUIRE(cf.witness.rows == 3);
    CHECK(bm_congruent(bm_conj(dec.blocks[0].slice, cf.witness), cf.canonical_gram, 10));
}

TEST_CASE("a bound radicand pair borrows a pivot from the block above") {
    auto R = ring2();
    auto dec = from_grams(R, {{1, lat(R, {{{4, 0}, {0, 1}}, {{0, -1}, {2, 0}}}).gram},
                              {2, gm(R, {{{2, 0}}})}});
    REQUIRE(dec.blocks.size() == 2);
    CHECK(dec.blocks[0].type_one);
    CHECK(dec.blocks[0].bound);

    auto cf = canonicalize_block(dec, 1);
    CHECK(cf.hyperbolic_count == 1);
    CHECK(cf.k_tag == KTag::none);
    CHECK(bm_eq(cf.canonical_gram, gram_hyperbolic(R, 1)));
    REQUIRE(cf.rewritten.has_value());

    const auto& rw = *cf.rewritten;
    REQUIRE(rw.blocks.size() == 2);
    CHECK(bm_eq(rw.blocks[0].slice, gram_hyperbolic(R, 1)));
    CHECK(bm_eq(rw.blocks[1].slice, gm(R, {{{-6, 0}}})));
    CHECK(rw.blocks[1].type_one);

    // the rewrite preserves the isometry class of the assembled lattice
    auto before = assemble_lattice(dec);
    auto after = assemble_lattice(rw);
    auto U = isometry_search(before, after, 8);
    REQUIRE(U.has_value());
    CHECK(bm_congruent(bm_conj(before.gram, *U), after.gram, 8));

    // without a type I block above, the residual piece cannot be absorbed
    auto stuck = from_grams(R, {{0, gm(R, {{{1, 0}}})},
                                {1, lat(R, {{{4, 0}, {0, 1}}, {{0, -1}, {2, 0}}}).gram}});
    CHECK(stuck.blocks[1].bound);
    CHECK_THROWS_AS(canonicalize_block(stuck, 1), CanonFail);
}
