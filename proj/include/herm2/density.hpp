#pragma once

#include "herm2/quotient.hpp"

namespace herm2 {

/* orders and dimensions of the finite classical groups over F_f */

cpp_int sp_order(int dim, int f);          ///< Sp(2m, f); dim must be even
long long sp_dim(int dim);                 ///< m (2m + 1)
cpp_int orth_even_order(int dim, int eps, int f); ///< O^eps(2m, f), eps = +-1
long long orth_even_dim(int dim);          ///< m (2m - 1)
cpp_int so_odd_order(int dim, int f);      ///< order of Sp(dim - 1, f); dim odd
long long so_odd_dim(int dim);

enum class FactorKind { symplectic, orth_plus, orth_minus, odd_orth };

/** One reductive factor of the special fiber. */
struct ReductiveFactor {
    int index = 0;       ///< row it comes from
    FactorKind kind = FactorKind::symplectic;
    int space_dim = 0;   ///< dimension of the residue space it acts on
    long long group_dim = 0;
    cpp_int order;
    std::string name;    ///< e.g. "Sp(4)", "O-(2)", "SOodd(3)"
};

struct DensityResult {
    int f = 0;
    int rank = 0;

    long long N = 0, N_M = 0, N_H = 0;
    int beta = 0;                 ///< power of 2 from the component group
    long long dim_G1 = 0;         ///< dimension of the smooth model's fiber
    long long l_prime = 0;
    long long dim_unipotent = 0;  ///< unipotent radical of the special fiber
    std::vector<ReductiveFactor> factors;

    cpp_int mantissa;      ///< product of factor orders times 2^beta
    long long f_exponent = 0; ///< density = mantissa * f^f_exponent
    cpp_rational value;
};

/** The local density of the hermitian lattice underlying the splitting. */
DensityResult local_density(const JordanDecomposition& dec);

/** Number of type I constituents whose next blocks satisfy the count rule. */
int component_beta(const JordanDecomposition& dec);

} // namespace herm2
