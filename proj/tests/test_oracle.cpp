#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "herm2/oracle.hpp"
#include "support.hpp"

using namespace herm2;
using namespace herm2::test;

namespace {

std::vector<cpp_rational> normalized_profile(const Lattice& L, int d_max) {
    return oracle_profile(L, d_max).normalized;
}

std::vector<cpp_rational> rationals(std::vector<long long> v) {
    return std::vector<cpp_rational>(v.begin(), v.end());
}

} // namespace

TEST_CASE("unit rank-1 congruence count by hand") {
    // Case 1, f = 2: x with N(x) = 1 mod 2 forces the unit digit of x only,
    // leaving the pi digit free.
    auto L = lat(ring1(), {{{1, 0}}});
    CHECK(congruence_count(L, 1) == 2);
    CHECK(congruence_count(L, 2) == 8);
    CHECK(congruence_count(L, 0) == 1);
}

TEST_CASE("stable profiles of the four rank-1 generators") {
    auto p11 = oracle_profile(lat(ring1(), {{{1, 0}}}), 5);
    CHECK(p11.normalized == rationals({1, 2, 2, 2, 2}));
    CHECK(p11.stabilized);
    CHECK(p11.stable_value == 2);
    CHECK(p11.states_expanded > 0);

    auto p12 = oracle_profile(lat(ring1(), {{{2, 0}}}), 5);
    CHECK(p12.normalized == rationals({2, 2, 4, 4, 4}));
    CHECK(p12.stable_value == 4);

    auto p21 = oracle_profile(lat(ring2(), {{{1, 0}}}), 5);
    CHECK(p21.normalized == rationals({1, 1, 2, 2, 2}));
    CHECK(p21.stable_value == 2);

    auto p22 = oracle_profile(lat(ring2(), {{{2, 0}}}), 5);
    CHECK(p22.normalized == rationals({2, 2, 2, 4, 4}));
    CHECK(p22.stable_value == 4);
}

TEST_CASE("a shallow plateau is reported as stable; deeper counting moves it") {
    // Case 2, gram (1): the normalized count sits at 1 for two depths before
    // reaching its true limit 2. Stabilization is a statement about the tail
    // that was actually computed, nothing more.
    auto L = lat(ring2(), {{{1, 0}}});
    auto shallow = oracle_profile(L, 2);
    CHECK(shallow.stabilized);
    CHECK(shallow.stable_value == 1);
    auto deep = oracle_profile(L, 5);
    CHECK(deep.stabilized);
    CHECK(deep.stable_value == 2);
}

TEST_CASE("doubling the gram shifts the normalized profile one depth up") {
    for (auto& R : {ring1(), ring2(), ring1(2), ring2(2)}) {
        cpp_int f = R->kappa.size();
        auto one = normalized_profile(lat(R, {{{1, 0}}}), 4);
        auto two = normalized_profile(lat(R, {{{2, 0}}}), 5);
        for (int d = 2; d <= 5; ++d)
            CHECK(two[static_cast<size_t>(d - 1)] == f * one[static_cast<size_t>(d - 2)]);
    }
}

TEST_CASE("rank-2 profile stabilizes and matches the hyperbolic plane") {
    auto L = lat(ring1(), {{{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}});
    auto p = oracle_profile(L, 4);
    CHECK(p.stabilized);
    CHECK(p.stable_value > 0);
    // survivor bookkeeping: children of one level are the nodes of the next
    auto q = oracle_profile(L, 3, {.budget = 1LL << 24, .record_multiplicity = true});
    std::vector<cpp_int> nodes(q.child_multiplicity.size() + 1, cpp_int(0));
    nodes[0] = 1;
    for (size_t l = 0; l < q.child_multiplicity.size(); ++l) {
        cpp_int parents = 0, children = 0;
        for (size_t c = 0; c < q.child_multiplicity[l].size(); ++c) {
            parents += q.child_multiplicity[l][c];
            children += cpp_int(c) * q.child_multiplicity[l][c];
        }
        CHECK(parents == nodes[l]);
        nodes[l + 1] = children;
    }
    CHECK(nodes[2] == q.raw[0]);
}

TEST_CASE("degenerate inputs and guard rails") {
    auto R = ring1();
    Lattice empty = make_lattice(R, bm_zero(R, 0, 0));
    CHECK(congruence_count(empty, 3) == 1);
    auto pe = oracle_profile(empty, 3);
    CHECK(pe.stabilized);
    CHECK(pe.stable_value == 1);

    auto L3 = lat(R, {{{1, 0}, {0, 0}, {0, 0}},
                      {{0, 0}, {1, 0}, {0, 0}},
                      {{0, 0}, {0, 0}, {1, 0}}});
    CHECK_THROWS_AS(congruence_count(L3, 2), Error);

    auto L = lat(R, {{{1, 0}}});
    CHECK_THROWS_AS(congruence_count(L, 3, {.budget = 5, .record_multiplicity = false}),
                    BudgetExceeded);

    auto shallow = lat(ring1(1, 3), {{{1, 0}}});
    CHECK(congruence_count(shallow, 2) == 8);
    CHECK_THROWS_AS(congruence_count(shallow, 3), PrecisionExhausted);
}

TEST_CASE("isometry search separates unit and even rank-1 lattices at full depth") {
    // mod pi^4 the grams (1) and (2) are still congruent: x = pi v gives
    // N(x) = -2 N(v) and -2 = 2 mod pi^4. One digit deeper they separate.
    auto R = ring1();
    auto L1 = lat(R, {{{1, 0}}});
    auto L2 = lat(R, {{{2, 0}}});
    auto shallow = isometry_search(L1, L2, 4);
    REQUIRE(shallow.has_value());
    CHECK(bm_congruent(bm_conj(L1.gram, *shallow), L2.gram, 4));
    CHECK(!isometry_search(L1, L2, 5).has_value());
}

TEST_CASE("isometry search certifies an even pair against the hyperbolic plane") {
    auto R = ring1();
    auto A = lat(R, {{{2, 0}, {0, 1}}, {{2, -1}, {0, 0}}});   // A(2, 0, pi)
    auto H = lat(R, {{{0, 0}, {0, 1}}, {{2, -1}, {0, 0}}});   // H(1)
    auto U = isometry_search(A, H, 10);
    REQUIRE(U.has_value());
    CHECK(bm_congruent(bm_conj(A.gram, *U), H.gram, 10));
}

TEST_CASE("isometry search finds a witness between unimodularly equivalent grams") {
    auto R = ring1();
    std::mt19937_64 rng(271828);
    auto D = lat(R, {{{1, 0}, {0, 0}}, {{0, 0}, {2, 0}}});
    for (int trial = 0; trial < 3; ++trial) {
        BMat U = random_unimodular(R, 2, rng);
        Lattice Lc = make_lattice(R, bm_conj(D.gram, U));
        auto V = isometry_search(D, Lc, 6);
        REQUIRE(V.has_value());
        CHECK(bm_congruent(bm_conj(D.gram, *V), Lc.gram, 6));
    }
    CHECK_THROWS_AS(isometry_search(D, D, 6, {.budget = 3, .record_multiplicity = false}),
                    BudgetExceeded);
    CHECK_THROWS_AS(isometry_search(D, lat(ring2(), {{{1, 0}, {0, 0}}, {{0, 0}, {2, 0}}}), 4),
                    ContextMismatch);
}
