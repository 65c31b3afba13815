#pragma once

#include <stdexcept>
#include <string>

namespace herm2 {

/** Base class for all library errors. */
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/** Residue degree outside the supported table (1 <= r <= 8). */
struct UnsupportedDegree : Error {
    explicit UnsupportedDegree(int r)
        : Error("residue degree " + std::to_string(r) + " not supported (need 1..8)") {}
};

/** Ring parameter (u or delta) reduces to zero in the residue field. */
struct NonUnitParam : Error {
    NonUnitParam() : Error("ring parameter must be a unit") {}
};

/** Elements from structurally different rings were combined. */
struct ContextMismatch : Error {
    ContextMismatch() : Error("ring contexts differ") {}
};

/** A valuation or exact division fell outside the tracked digit window. */
struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& where)
        : Error("precision exhausted in " + where) {}
};

/** Input Gram matrix is not hermitian in canonical storage. */
struct NotHermitian : Error {
    explicit NotHermitian(const std::string& why) : Error("not hermitian: " + why) {}
};

/** Gram determinant valuation too large for the working precision. */
struct Degenerate : Error {
    explicit Degenerate(const std::string& why) : Error("degenerate lattice: " + why) {}
};

/** A residue form of the wrong kind was requested for this row. */
struct CaseMismatch : Error {
    explicit CaseMismatch(const std::string& why) : Error(why) {}
};

/** An internal solve that must succeed did not; indicates a bug. */
struct NoSolution : Error {
    explicit NoSolution(const std::string& where)
        : Error("internal solve failed in " + where) {}
};

/** Search state budget was exceeded. */
struct BudgetExceeded : Error {
    explicit BudgetExceeded(long long budget)
        : Error("state budget " + std::to_string(budget) + " exceeded") {}
};

/** Block canonicalization outside the supported shapes. */
struct CanonFail : Error {
    explicit CanonFail(const std::string& why) : Error("canonicalization failed: " + why) {}
};

/** Malformed lattice file. */
struct ParseError : Error {
    explicit ParseError(const std::string& why) : Error("parse error: " + why) {}
};

} // namespace herm2
