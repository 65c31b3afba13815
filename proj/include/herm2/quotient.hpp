#pragma once

#include "herm2/jordan.hpp"

namespace herm2 {

/**
 * The residue-space data of one row i of a splitting: inside the companion
 * lattice M = (+)_j pi^max(0, i-j) L_j, reduced mod pi, sit the nested
 * kernels A >= B >= W >= X and B >= Y >= Z. All spaces are kappa-subspaces
 * of A_i / pi A_i, written in block coordinates ordered own block first,
 * then neighbors by distance.
 */
struct SublatticeChain {
    int row = 0;      ///< i
    int l = 0;        ///< valuation of the scale of A_i; equals i
    int m = 0;        ///< l = 2m or l = 2m - 1
    int ambient_dim = 0;
    RingPtr ring;

    std::vector<int> coord_block;  ///< owning block index of each coordinate
    BMat companion_gram;           ///< Gram of M in these coordinates
    KMat sym_residue;              ///< (1 / pi^l) h mod pi, symmetric

    std::vector<KVec> basis_B;
    std::vector<KVec> basis_X;
    std::vector<KVec> basis_W;
    std::vector<KVec> basis_Y;
    std::vector<KVec> basis_Z;
    std::optional<KVec> special_vector; ///< e with S(v, e)^2 = P(v); even rows only

    bool nonadditive_branch = false; ///< odd row where the half-norm is not additive; B = A
    bool sectioned = false;          ///< quadratic values depend on the canonical section
};

/**
 * Chain at row i of a normalized decomposition (min index >= 0, slices at
 * their index scale). The row must carry a block.
 */
SublatticeChain sublattice_chain(const JordanDecomposition& dec, int row);

enum class FormKind { symplectic, quadratic };

/**
 * A residue bilinear or quadratic space over kappa.
 * Quadratic spaces carry the values on a basis plus the polar form;
 * sectioned ones report only their dimension.
 */
struct ResidueForm {
    FormKind kind = FormKind::symplectic;
    int dim = 0;
    KMat matrix;               ///< symplectic: the alternating form; quadratic: the polar
    KVec diag;                 ///< quadratic values on the quotient basis
    bool sectioned = false;
    std::vector<KVec> quotient_basis; ///< representatives inside the chain's coordinates
};

/**
 * Alternating residue form on B/Y. Defined on even rows in the unit_radicand
 * case and odd rows in the even_radicand case; otherwise throws CaseMismatch.
 */
ResidueForm induced_symplectic(const SublatticeChain& chain, const JordanDecomposition& dec);

/**
 * Quadratic residue form: on A/Z for odd unit_radicand rows, on B/Z for even
 * even_radicand rows; otherwise throws CaseMismatch. Rows whose values are
 * section-dependent come back with the tabulated dimension only.
 */
ResidueForm induced_quadratic(const SublatticeChain& chain, const JordanDecomposition& dec);

/**
 * Arf invariant of an even-dimensional nondegenerate quadratic space, as an
 * element of F_2. nullopt for odd dimension or sectioned forms.
 */
std::optional<int> arf_invariant(const ResidueForm& form, const Kappa& kappa);

/** Evaluate a quadratic residue form at a coefficient vector. */
KElem quad_eval(const Kappa& kappa, const ResidueForm& form, const KVec& x);

/** Number of zeros of the form by direct enumeration; for small spaces. */
long long quad_zero_count(const Kappa& kappa, const ResidueForm& form);

/** f^(d-1) + eps (f^(d/2) - f^(d/2-1)), the zero count of a nondegenerate form. */
cpp_int quad_zero_count_formula(int dim, int f, int eps);

} // namespace herm2
