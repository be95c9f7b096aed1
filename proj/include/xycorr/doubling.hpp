#pragma once

#include "xycorr/gibbs.hpp"

#include <vector>

namespace xycorr {

/// a ⊗ 1 + sign · 1 ⊗ a on the doubled space; sign must be +1 or -1.
Eigen::MatrixXcd lift(const Eigen::MatrixXcd& a, int sign);

/// Both sides of the identity <a;b>_s - <a><b> = (1/2) <<a_-; b_->>_s, where
/// the double angle bracket is the Schwinger function of the doubled
/// Hamiltonian h ⊗ 1 + 1 ⊗ h.
struct DoublingIdentity {
    double single_copy = 0.0;
    double doubled = 0.0;
    double residual = 0.0;
};

DoublingIdentity doubled_truncation_identity(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& a,
                                             const Eigen::MatrixXcd& b, double beta, double s);

/// max-abs residual of (ab)_sign = (1/2) a_+ b_sign + (1/2) a_- b_(-sign).
double lifted_product_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, int sign);

/// Orthogonal 4x4 change of basis on C^2 ⊗ C^2 (one site, both copies).
/// Columns are the Bell-type vectors p+, q+, p-, q- in which the lifted
/// operators S^x_+, S^x_-, S^z_+, -S^z_- all have nonnegative entries.
Eigen::MatrixXd ginibre_pair_basis();

/// Integer-scaled variant: ginibre_pair_basis() times sqrt(2). Entries are
/// exactly {0, 1, -1}, so conjugation can be carried out in exact dyadic
/// arithmetic.
Eigen::MatrixXd ginibre_pair_basis_scaled();

/// Permutation taking the copy-major doubled index i * 2^n + j to the
/// site-paired index in which the two copies of each site sit side by side.
std::vector<Eigen::Index> pair_interleave_permutation(int nsites);

/// Conjugates an operator on the doubled space of an nsites spin-1/2 system
/// into the per-site Ginibre basis. The input must be real up to 1e-12
/// (valid for axis-(1,3) Hamiltonians and their lifted observables). The
/// scaling by powers of two keeps dyadic inputs exact.
Eigen::MatrixXd to_ginibre_basis(const Eigen::MatrixXcd& m, int nsites);

/// Smallest entry of the Ginibre-basis representation; >= 0 (up to roundoff)
/// certifies the positivity structure that drives the correlation
/// inequalities.
struct GinibreEntryReport {
    double min_entry = 0.0;
    double max_entry = 0.0;
};

GinibreEntryReport ginibre_entry_report(const Eigen::MatrixXcd& m, int nsites);

}  // namespace xycorr
