#pragma once

#include <json.hpp>

#include "herm2/density.hpp"
#include "herm2/oracle.hpp"

namespace herm2 {

using json = nlohmann::json;

/**
 * Parsed form of a lattice file. The document carries the ring description
 * plus exactly one of "gram" (a hermitian matrix) or "jordan_blocks"
 * (a list of {"index", "gram"} constituents at their own scales).
 */
struct ParsedInput {
    json raw; ///< original document, kept for reparsing at higher precision
    RingPtr ring;
    std::optional<Lattice> lattice;
    std::optional<JordanDecomposition> blocks;
};

/**
 * Parse and validate a lattice document.
 * Default working precision is half the pi-adic window 2 * maxval + 6,
 * that is maxval + 3 two-adic digits over the largest entry valuation.
 */
ParsedInput parse_lattice_file(const json& doc, std::optional<int> precision_override = {});

/** The splitting of the parsed input, from either presentation. */
JordanDecomposition input_decomposition(const ParsedInput& in);

json element_to_json(const BElem& x);
json matrix_to_json(const BMat& A);
json decomposition_to_json(const JordanDecomposition& dec);
json density_to_json(const DensityResult& d);
json profile_to_json(const OracleProfile& p);

/**
 * Parse, split and evaluate the density, reparsing the exact file integers at
 * doubled precision up to two times when the digit window runs out.
 */
struct DensityRun {
    ParsedInput in;
    JordanDecomposition dec;
    DensityResult density;
    int used_precision = 0;
    int retries = 0;
};
DensityRun run_density(const json& doc, std::optional<int> precision_override = {});

} // namespace herm2
