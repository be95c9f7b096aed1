#pragma once

#include "xycorr/hamiltonian.hpp"

#include <stdexcept>

namespace xycorr {

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

/// Diagonalizes and verifies the reconstruction U D U^dagger against the input.
SpectralDecomposition diagonalize(const Eigen::MatrixXcd& h);

/// Thermal state at inverse temperature beta. All Boltzmann factors are taken
/// relative to the ground energy so that beta up to ~10^3 stays finite.
class GibbsState {
public:
    GibbsState(const Eigen::MatrixXcd& h, double beta);
    GibbsState(SpectralDecomposition es, double beta);

    double beta() const { return beta_; }
    double log_z() const { return log_z_; }
    const SpectralDecomposition& decomposition() const { return es_; }

    cplx expectation(const Eigen::MatrixXcd& a) const;
    /// Real-valued expectation; throws if the imaginary part exceeds 1e-10.
    double expectation_real(const Eigen::MatrixXcd& a) const;

    /// <a;b>_s = Tr(a e^{-s beta H} b e^{-(1-s) beta H}) / Z for s in [0,1];
    /// equals <ab> at s=0 and <ba> at s=1.
    cplx schwinger(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double s) const;

    /// <a;b>_s - <a><b>.
    cplx truncated_schwinger(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double s) const;
    double truncated_schwinger_real(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                    double s) const;

private:
    SpectralDecomposition es_;
    double beta_;
    Eigen::VectorXd weights_;  // e^{-beta (E_k - E_0)}
    double weight_sum_;
    double log_z_;
};

double log_partition_function(const Eigen::MatrixXcd& h, double beta);

/// Ground-energy eigenspace. `first_gap` is the distance from E_0 to the first
/// level outside the space (infinity when the whole spectrum is degenerate).
struct GroundSpace {
    double energy = 0.0;
    int degeneracy = 0;
    Eigen::MatrixXcd projector;
    double first_gap = 0.0;
};

double default_gap_tol(double ground_energy);

/// Thrown when a level sits too close to the gap_tol cutoff for ground-space
/// membership to be decided reliably. Callers running randomized campaigns
/// catch this and resample the instance.
class AmbiguousGroundSpace : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Levels within gap_tol of E_0 span the space. Throws AmbiguousGroundSpace if
/// the first excluded level sits within 10x gap_tol of E_0.
GroundSpace ground_space(const SpectralDecomposition& es, double gap_tol);
GroundSpace ground_space(const Eigen::MatrixXcd& h, double gap_tol);

/// tr(a P_0) / degeneracy: the beta -> infinity limit of the Gibbs expectation.
cplx ground_expectation(const GroundSpace& gs, const Eigen::MatrixXcd& a);

/// tr(P_0 a P_0 b) / degeneracy: the beta -> infinity limit of <a;b>_s for
/// s strictly inside (0,1).
cplx ground_schwinger(const GroundSpace& gs, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Derivative of <prod_B S^j> in the coupling J_A^i, computed two independent
/// ways: a second-order finite-difference stencil (one-sided at the J=0
/// boundary so couplings stay nonnegative) and beta times the 32-node
/// Gauss-Legendre integral of the truncated Schwinger function over s.
struct DuhamelDerivative {
    double finite_difference = 0.0;
    double quadrature = 0.0;
    double observable_value = 0.0;
};

DuhamelDerivative coupling_derivative(const Lattice& lat, const CouplingSet& cs, double beta,
                                      const SiteSet& target_subset, Axis target_axis,
                                      const SiteSet& observable_subset, Axis observable_axis,
                                      double fd_step = 1e-4);

}  // namespace xycorr
