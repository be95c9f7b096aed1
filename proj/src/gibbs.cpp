#include "xycorr/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace xycorr {

SpectralDecomposition diagonalize(const Eigen::MatrixXcd& h) {
    require_hermitian(h, "diagonalize");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("diagonalize: eigensolver failed to converge");
    }
    SpectralDecomposition es;
    es.eigenvalues = solver.eigenvalues();
    es.eigenvectors = solver.eigenvectors();

    const double scale = std::max(1.0, max_abs(h));
    const Eigen::MatrixXcd rebuilt = es.eigenvectors *
                                     es.eigenvalues.asDiagonal().toDenseMatrix().cast<cplx>() *
                                     es.eigenvectors.adjoint();
    const double residual = max_abs(rebuilt - h);
    if (residual > 1e-10 * scale) {
        std::ostringstream msg;
        msg << "diagonalize: reconstruction residual " << residual << " exceeds tolerance "
            << 1e-10 * scale;
        throw std::runtime_error(msg.str());
    }
    const Eigen::MatrixXcd gram = es.eigenvectors.adjoint() * es.eigenvectors;
    const double unitarity =
        max_abs(gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()));
    if (unitarity > 1e-10) {
        std::ostringstream msg;
        msg << "diagonalize: eigenvector basis deviates from unitarity by " << unitarity;
        throw std::runtime_error(msg.str());
    }
    return es;
}

namespace {

void require_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("GibbsState: beta must be positive and finite");
    }
}

}  // namespace

GibbsState::GibbsState(const Eigen::MatrixXcd& h, double beta)
    : GibbsState(diagonalize(h), beta) {}

GibbsState::GibbsState(SpectralDecomposition es, double beta) : es_(std::move(es)), beta_(beta) {
    require_beta(beta);
    if (es_.dim() == 0) {
        throw std::invalid_argument("GibbsState: empty spectrum");
    }
    const double e0 = es_.eigenvalues(0);
    weights_ = (-beta_ * (es_.eigenvalues.array() - e0)).exp().matrix();
    weight_sum_ = weights_.sum();
    log_z_ = -beta_ * e0 + std::log(weight_sum_);
}

cplx GibbsState::expectation(const Eigen::MatrixXcd& a) const {
    if (a.rows() != es_.dim() || a.cols() != es_.dim()) {
        throw std::invalid_argument("GibbsState::expectation: dimension mismatch");
    }
    cplx acc = 0.0;
    for (Eigen::Index k = 0; k < es_.dim(); ++k) {
        const auto v = es_.eigenvectors.col(k);
        acc += weights_(k) * (v.adjoint() * a * v)(0, 0);
    }
    return acc / weight_sum_;
}

double GibbsState::expectation_real(const Eigen::MatrixXcd& a) const {
    return require_real(expectation(a), 1e-10, "GibbsState::expectation_real");
}

cplx GibbsState::schwinger(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double s) const {
    if (s < 0.0 || s > 1.0) {
        throw std::invalid_argument("GibbsState::schwinger: s must lie in [0,1]");
    }
    if (a.rows() != es_.dim() || a.cols() != es_.dim() || b.rows() != es_.dim() ||
        b.cols() != es_.dim()) {
        throw std::invalid_argument("GibbsState::schwinger: dimension mismatch");
    }
    const Eigen::MatrixXcd at = es_.eigenvectors.adjoint() * a * es_.eigenvectors;
    const Eigen::MatrixXcd bt = es_.eigenvectors.adjoint() * b * es_.eigenvectors;
    const Eigen::ArrayXd delta = es_.eigenvalues.array() - es_.eigenvalues(0);
    const Eigen::VectorXcd u = (-s * beta_ * delta).exp().matrix().cast<cplx>();
    const Eigen::VectorXcd v = (-(1.0 - s) * beta_ * delta).exp().matrix().cast<cplx>();
    // Tr(a e^{-s beta H} b e^{-(1-s) beta H}) = sum_{mn} a_mn b_nm u_n v_m
    const cplx raw = v.transpose() * at.cwiseProduct(bt.transpose()) * u;
    return raw / weight_sum_;
}

cplx GibbsState::truncated_schwinger(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                     double s) const {
    return schwinger(a, b, s) - expectation(a) * expectation(b);
}

double GibbsState::truncated_schwinger_real(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                            double s) const {
    return require_real(truncated_schwinger(a, b, s), 1e-10,
                        "GibbsState::truncated_schwinger_real");
}

double log_partition_function(const Eigen::MatrixXcd& h, double beta) {
    return GibbsState(h, beta).log_z();
}

double default_gap_tol(double ground_energy) {
    return 1e-8 * std::max(1.0, std::abs(ground_energy));
}

GroundSpace ground_space(const SpectralDecomposition& es, double gap_tol) {
    if (es.dim() == 0) {
        throw std::invalid_argument("ground_space: empty spectrum");
    }
    if (!(gap_tol >= 0.0) || !std::isfinite(gap_tol)) {
        throw std::invalid_argument("ground_space: gap_tol must be nonnegative and finite");
    }
    const double e0 = es.eigenvalues(0);
    Eigen::Index d0 = 1;
    while (d0 < es.dim() && es.eigenvalues(d0) - e0 <= gap_tol) {
        ++d0;
    }
    GroundSpace gs;
    gs.energy = e0;
    gs.degeneracy = static_cast<int>(d0);
    if (d0 < es.dim()) {
        gs.first_gap = es.eigenvalues(d0) - e0;
        if (gs.first_gap <= 10.0 * gap_tol) {
            std::ostringstream msg;
            msg << "ground_space: first excluded level is only " << gs.first_gap
                << " above the ground energy, within 10x the membership tolerance " << gap_tol
                << "; the ground space is numerically ambiguous";
            throw AmbiguousGroundSpace(msg.str());
        }
    } else {
        gs.first_gap = std::numeric_limits<double>::infinity();
    }
    const Eigen::MatrixXcd basis = es.eigenvectors.leftCols(d0);
    gs.projector = basis * basis.adjoint();
    return gs;
}

GroundSpace ground_space(const Eigen::MatrixXcd& h, double gap_tol) {
    return ground_space(diagonalize(h), gap_tol);
}

cplx ground_expectation(const GroundSpace& gs, const Eigen::MatrixXcd& a) {
    if (a.rows() != gs.projector.rows() || a.cols() != gs.projector.cols()) {
        throw std::invalid_argument("ground_expectation: dimension mismatch");
    }
    return (a * gs.projector).trace() / static_cast<double>(gs.degeneracy);
}

cplx ground_schwinger(const GroundSpace& gs, const Eigen::MatrixXcd& a,
                      const Eigen::MatrixXcd& b) {
    if (a.rows() != gs.projector.rows() || b.rows() != gs.projector.rows()) {
        throw std::invalid_argument("ground_schwinger: dimension mismatch");
    }
    return (gs.projector * a * gs.projector * b).trace() / static_cast<double>(gs.degeneracy);
}

namespace {

/// Copy of `cs` with the strength of (subset, axis) replaced by `strength`,
/// appending the coupling when it is not already present.
CouplingSet with_strength(const CouplingSet& cs, const SiteSet& subset, Axis axis,
                          double strength) {
    CouplingSet out = cs;
    const SiteSet canon = canonical_subset(subset);
    for (auto& c : out.couplings) {
        if (c.axis == axis && canonical_subset(c.subset) == canon) {
            c.strength = strength;
            return out;
        }
    }
    out.couplings.push_back(Coupling{canon, axis, strength});
    return out;
}

double current_strength(const CouplingSet& cs, const SiteSet& subset, Axis axis) {
    const SiteSet canon = canonical_subset(subset);
    for (const auto& c : cs.couplings) {
        if (c.axis == axis && canonical_subset(c.subset) == canon) {
            return c.strength;
        }
    }
    return 0.0;
}

}  // namespace

DuhamelDerivative coupling_derivative(const Lattice& lat, const CouplingSet& cs, double beta,
                                      const SiteSet& target_subset, Axis target_axis,
                                      const SiteSet& observable_subset, Axis observable_axis,
                                      double fd_step) {
    require_beta(beta);
    if (!(fd_step > 0.0) || !std::isfinite(fd_step)) {
        throw std::invalid_argument("coupling_derivative: fd_step must be positive and finite");
    }
    if (!pair_contains(cs.axis_pair, target_axis)) {
        throw std::invalid_argument(
            "coupling_derivative: target axis does not belong to the model's axis pair");
    }
    const Eigen::MatrixXcd obs = subset_product(lat, observable_subset, observable_axis);
    const Eigen::MatrixXcd tgt = subset_product(lat, target_subset, target_axis);

    const auto value_at = [&](double strength) {
        const CouplingSet varied = with_strength(cs, target_subset, target_axis, strength);
        const Eigen::MatrixXcd h = build_hamiltonian(lat, varied);
        return GibbsState(h, beta).expectation_real(obs);
    };

    const double j0 = current_strength(cs, target_subset, target_axis);
    DuhamelDerivative result;
    if (j0 >= fd_step) {
        result.finite_difference =
            (value_at(j0 + fd_step) - value_at(j0 - fd_step)) / (2.0 * fd_step);
    } else {
        // One-sided second-order stencil keeps every evaluation at J >= 0.
        result.finite_difference = (-3.0 * value_at(j0) + 4.0 * value_at(j0 + fd_step) -
                                    value_at(j0 + 2.0 * fd_step)) /
                                   (2.0 * fd_step);
    }

    const GibbsState state(build_hamiltonian(lat, cs), beta);
    result.observable_value = state.expectation_real(obs);
    const auto integrand = [&](double s) {
        return state.truncated_schwinger_real(obs, tgt, s);
    };
    result.quadrature =
        beta * boost::math::quadrature::gauss<double, 32>::integrate(integrand, 0.0, 1.0);
    return result;
}

}  // namespace xycorr
