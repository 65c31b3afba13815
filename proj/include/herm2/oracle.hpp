#pragma once

#include "herm2/lattice.hpp"

namespace herm2 {

struct OracleOptions {
    long long budget = 1LL << 24; ///< cap on states expanded for further digits
    bool record_multiplicity = false;
};

/**
 * Depth-first count of the congruence solutions
 *   S_d = { X in M_n(B / 2^d) : val(sigma(X)^t G X - G) >= 2d entrywise },
 * enumerated one pi-digit at a time with the defect carried incrementally.
 * Exhaustive; restricted to rank <= 2.
 */
cpp_int congruence_count(const Lattice& L, int d, const OracleOptions& opt = {});

struct OracleProfile {
    int rank = 0, f = 0, d_max = 0;
    std::vector<cpp_int> raw;            ///< raw[t] = |S_(t+1)|, t = 0 .. d_max-1
    std::vector<cpp_rational> normalized;///< raw / f^(d n^2)
    bool stabilized = false;             ///< final two normalized values agree
    cpp_rational stable_value;           ///< meaningful when stabilized
    long long states_expanded = 0;
    /** histogram[level][c] = parents at this pi-level with c surviving children */
    std::vector<std::vector<long long>> child_multiplicity;
};

/**
 * Counts along one enumeration tree for d = 1 .. d_max.
 * Stabilization is judged on the final tail only; an early plateau that later
 * moves does not count.
 */
OracleProfile oracle_profile(const Lattice& L, int d_max, const OracleOptions& opt = {});

/**
 * First U with sigma(U)^t G1 U = G2 mod pi^depth, by the same digit search.
 * nullopt when the tree is exhausted, which certifies there is none.
 * Ranks <= 3.
 */
std::optional<BMat> isometry_search(const Lattice& L1, const Lattice& L2, int pi_depth,
                                    const OracleOptions& opt = {});

} // namespace herm2
