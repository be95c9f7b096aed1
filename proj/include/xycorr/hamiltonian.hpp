#pragma once

#include "xycorr/spin_algebra.hpp"

#include <utility>
#include <vector>

namespace xycorr {

/// Which two spin directions carry the interactions.
enum class AxisPair { XY, XZ };

std::pair<Axis, Axis> axes_of(AxisPair p);
bool pair_contains(AxisPair p, Axis a);
AxisPair axis_pair_from_string(const std::string& s);
std::string to_string(AxisPair p);

/// One interaction term: subset A, direction, nonnegative strength J_A.
struct Coupling {
    SiteSet subset;
    Axis axis = Axis::X;
    double strength = 0.0;
};

/// Full interaction specification of a Hamiltonian. At most one entry per
/// (subset, axis) key; subsets nonempty; strengths >= 0.
struct CouplingSet {
    AxisPair axis_pair = AxisPair::XY;
    std::vector<Coupling> couplings;
};

/// Throws std::invalid_argument on any violated invariant. Set allow_negative
/// to admit hypothesis-violating strengths (demonstration runs only).
void validate_coupling_set(const CouplingSet& cs, const Lattice& lat, bool allow_negative = false);

/// Same couplings moved from directions (1,2) to (1,3); spectra are unitarily
/// equivalent under a site-local rotation about axis 1.
CouplingSet to_axis_pair_xz(const CouplingSet& cs);

/// Inner volume, its R-neighbourhood, and the exterior boundary between them.
struct BoundaryGeometry {
    Lattice inner;
    Lattice enlarged;
    int range = 0;

    BoundaryGeometry(Lattice inner_lat, Lattice enlarged_lat, int r);
    SiteSet boundary() const;
};

/// H = -sum_A sum_i J_A^i prod_{x in A} S_x^i on the lattice Hilbert space.
Eigen::MatrixXcd build_hamiltonian(const Lattice& lat, const CouplingSet& cs,
                                   bool allow_negative = false);

/// Bulk Hamiltonian on the enlarged volume plus a field -eta sum_{x in boundary} S_x^1.
Eigen::MatrixXcd build_boundary_hamiltonian(const BoundaryGeometry& geom, const CouplingSet& cs,
                                            double eta);

/// The eta -> infinity effective Hamiltonian on the inner volume only: bulk terms
/// untouched, boundary-crossing axis-1 terms projected with weight 2^{-|A n boundary|},
/// crossing terms on the transverse axis dropped. Pure-boundary subsets survive as
/// additive multiples of the identity.
Eigen::MatrixXcd build_plus_hamiltonian(const BoundaryGeometry& geom, const CouplingSet& cs);

/// H (x) 1 + 1 (x) H on the doubled space.
Eigen::MatrixXcd build_doubled_hamiltonian(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd build_doubled_hamiltonian(const Lattice& lat, const CouplingSet& cs);

}  // namespace xycorr
