#pragma once

#include "xycorr/gibbs.hpp"

#include <map>
#include <string>
#include <vector>

namespace xycorr {

/// Pair-of-spin-1/2 representation of a spin-1 system: every base site x hosts
/// two spin-1/2 copies (x,1), (x,2), kept adjacent (site-major) so that the
/// symmetrized pair operators act on contiguous tensor factors.
class ExtendedLattice {
public:
    explicit ExtendedLattice(Lattice spin_one_base);

    const Lattice& base() const { return base_; }
    const Lattice& extended() const { return extended_; }

    std::string copy_label(const std::string& base_site, int copy) const;
    /// Base site owning an extended label; throws for unknown labels.
    const std::string& base_of(const std::string& extended_site) const;
    /// Image of an extended-lattice subset under the copy -> base projection.
    SiteSet support_of(const SiteSet& extended_subset) const;
    /// True when no base site contributes more than one copy to the subset.
    bool admissible(const SiteSet& extended_subset) const;

private:
    Lattice base_;
    Lattice extended_;
    std::map<std::string, std::string> base_of_;
};

/// All subsets of the extended lattice in which each base site appears at most
/// once (the empty set included): exactly 3^{|base|} of them.
std::vector<SiteSet> admissible_subsets(const ExtendedLattice& ext);

/// The admissible subsets whose projection is exactly `base_subset`
/// (2^{|base_subset|} of them).
std::vector<SiteSet> admissible_subsets_with_support(const ExtendedLattice& ext,
                                                     const SiteSet& base_subset);

/// One interaction term over the extended lattice in the Pauli convention:
/// the strength multiplies a product of sigma matrices (sigma = 2S).
struct ExtendedCoupling {
    SiteSet subset;
    Axis axis = Axis::X;
    double strength = 0.0;
};

/// Maps base couplings J_A to extended ones: each choice of one copy per site
/// of A receives strength 2^{-|A|} J_A on the corresponding sigma-product.
std::vector<ExtendedCoupling> extend_couplings(const ExtendedLattice& ext,
                                               const CouplingSet& base_cs);

/// Rewrites Pauli-convention extended couplings in the spin-operator
/// convention used by build_hamiltonian (each strength gains a factor 2^{|X|}).
CouplingSet extended_to_spin_half(const std::vector<ExtendedCoupling>& entries,
                                  AxisPair axis_pair);

/// Symmetrized pair operator (sigma^i x 1 + 1 x sigma^i)/2 on C^2 x C^2.
Eigen::MatrixXcd r_operator(Axis axis);

/// r_operator embedded at a base site of the extended Hilbert space.
Eigen::MatrixXcd r_site(const ExtendedLattice& ext, const std::string& base_site, Axis axis);

/// Product of r_site over a base subset; empty subset gives the identity.
Eigen::MatrixXcd r_subset_product(const ExtendedLattice& ext, const SiteSet& base_subset,
                                  Axis axis);

/// Projector onto the symmetric (triplet) subspace of C^2 x C^2.
Eigen::MatrixXcd triplet_projector();

/// 4x3 isometry V with V^dagger V = 1, V V^dagger = triplet projector; columns
/// ordered by descending eigenvalue of the pair operator for axis 3, so that
/// V^dagger r_operator(axis) V equals spin_matrix(Spin::One, axis).
Eigen::MatrixXcd triplet_isometry();

/// Tensor products of the site-local projector / isometry over the base sites.
Eigen::MatrixXcd lattice_triplet_projector(const ExtendedLattice& ext);
Eigen::MatrixXcd lattice_isometry(const ExtendedLattice& ext);

/// Pair Hamiltonian -sum_A (J_A^1 prod R^1 + J_A^3 prod R^3), built two
/// independent ways (R-operator products vs expanded sigma-products) and
/// cross-checked to 1e-12 before returning. Couplings must use axes (1,3).
Eigen::MatrixXcd build_tilde_hamiltonian(const ExtendedLattice& ext, const CouplingSet& base_cs);

/// Projector onto triplet at every site of `base_subset` and singlet at every
/// other base site.
Eigen::MatrixXcd q_projector(const ExtendedLattice& ext, const SiteSet& base_subset);

/// max over axes i and base sites x of ||[R_x^i, Q]||_max.
double q_commutation_defect(const ExtendedLattice& ext, const SiteSet& base_subset);

/// Residual of Q_A H-tilde = -Q_A sum_{B subset A} (J_B^1 prod R^1 + J_B^3 prod R^3):
/// couplings reaching outside A are annihilated by the singlet factors.
double ham_in_subspace_residual(const ExtendedLattice& ext, const CouplingSet& base_cs,
                                const SiteSet& base_subset);

/// Checks V^dagger R^i V against the spin-1 matrices and evaluates a spin-1
/// observable both directly and through the triplet-projected pair Gibbs state.
struct CorrespondenceReport {
    double spin_matrix_defect = 0.0;  // max over axes of ||V^dagger R^i V - S^i||
    double direct_value = 0.0;        // <a> in the spin-1 Gibbs state
    double projected_value = 0.0;     // <V a V^dagger>' in the pair model
    double residual = 0.0;
};

CorrespondenceReport correspondence_check(const Lattice& spin_one_lat, const CouplingSet& cs,
                                          const Eigen::MatrixXcd& a, double beta);

/// Ground-energy drop after strengthening one term, plus the nonnegativity
/// evidence behind it: the smallest entry of 1 + tau(shift - H-tilde) in the
/// product basis, which must be >= 0 for the Perron-Frobenius argument.
struct GroundShiftReport {
    double energy_before = 0.0;
    double energy_after = 0.0;
    double margin = 0.0;  // energy_before - energy_after, positive when strict
    double pf_min_entry = 0.0;
};

/// Bumps the base coupling J_A^axis by epsilon.
GroundShiftReport ground_energy_coupling_bump(const ExtendedLattice& ext,
                                              const CouplingSet& base_cs,
                                              const SiteSet& base_subset, Axis axis,
                                              double epsilon);

/// Subtracts epsilon times a sigma-product over an admissible extended subset.
GroundShiftReport ground_energy_sigma_bump(const ExtendedLattice& ext,
                                           const CouplingSet& base_cs,
                                           const SiteSet& extended_subset, Axis axis,
                                           double epsilon);

/// Certifies that the pair model's ground space lies inside the triplet
/// sector. Base sites carrying no coupling are excluded first (their sectors
/// are exactly degenerate) and reported.
struct TripletGroundReport {
    std::vector<std::string> excluded_sites;
    int degeneracy = 0;
    double first_gap = 0.0;
    double residual = 0.0;  // ||P_triplet P_0 - P_0||_max
};

/// gap_tol < 0 selects default_gap_tol(E_0).
TripletGroundReport ground_in_triplet_check(const Lattice& spin_one_lat, const CouplingSet& cs,
                                            double gap_tol = -1.0);

/// Ground-state (beta -> infinity) truncated correlation of two spin-1 product
/// observables, computed directly on the spin-1 model and through the pair
/// decomposition 2^{-|A|-|B|} sum over copy choices of sigma-correlations.
struct TwoRouteCorrelation {
    double direct = 0.0;
    double decomposed = 0.0;
    double residual = 0.0;
};

TwoRouteCorrelation ground_truncated_correlation(const Lattice& spin_one_lat,
                                                 const CouplingSet& cs, const SiteSet& subset_a,
                                                 Axis axis_a, const SiteSet& subset_b, Axis axis_b,
                                                 double gap_tol = -1.0);

}  // namespace xycorr
