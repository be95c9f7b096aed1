#include "xycorr/spin_one.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace xycorr {

namespace {

Lattice make_extended(const Lattice& base) {
    std::vector<std::string> labels;
    labels.reserve(2 * base.sites().size());
    for (const auto& s : base.sites()) {
        labels.push_back(s + ":1");
        labels.push_back(s + ":2");
    }
    return Lattice(std::move(labels), 2);
}

}  // namespace

ExtendedLattice::ExtendedLattice(Lattice spin_one_base)
    : base_(std::move(spin_one_base)), extended_(make_extended(base_)) {
    if (base_.spin() != Spin::One) {
        throw std::invalid_argument("ExtendedLattice: base lattice must carry spin 1");
    }
    for (const auto& s : base_.sites()) {
        base_of_[s + ":1"] = s;
        base_of_[s + ":2"] = s;
    }
}

std::string ExtendedLattice::copy_label(const std::string& base_site, int copy) const {
    base_.index_of(base_site);  // validates the label
    if (copy != 1 && copy != 2) {
        throw std::invalid_argument("ExtendedLattice::copy_label: copy must be 1 or 2");
    }
    return base_site + ":" + std::to_string(copy);
}

const std::string& ExtendedLattice::base_of(const std::string& extended_site) const {
    const auto it = base_of_.find(extended_site);
    if (it == base_of_.end()) {
        throw std::invalid_argument("ExtendedLattice::base_of: unknown site " + extended_site);
    }
    return it->second;
}

SiteSet ExtendedLattice::support_of(const SiteSet& extended_subset) const {
    SiteSet out;
    out.reserve(extended_subset.size());
    for (const auto& s : extended_subset) {
        out.push_back(base_of(s));
    }
    return canonical_subset(std::move(out));
}

bool ExtendedLattice::admissible(const SiteSet& extended_subset) const {
    std::set<std::string> seen;
    for (const auto& s : extended_subset) {
        if (!seen.insert(base_of(s)).second) {
            return false;
        }
    }
    return true;
}

std::vector<SiteSet> admissible_subsets(const ExtendedLattice& ext) {
    const auto& base_sites = ext.base().sites();
    std::vector<SiteSet> out;
    out.emplace_back();  // empty choice at every site
    for (const auto& site : base_sites) {
        std::vector<SiteSet> next;
        next.reserve(out.size() * 3);
        for (const auto& prefix : out) {
            next.push_back(prefix);
            for (int copy : {1, 2}) {
                SiteSet with = prefix;
                with.push_back(ext.copy_label(site, copy));
                next.push_back(canonical_subset(std::move(with)));
            }
        }
        out = std::move(next);
    }
    return out;
}

std::vector<SiteSet> admissible_subsets_with_support(const ExtendedLattice& ext,
                                                     const SiteSet& base_subset) {
    const SiteSet canon = canonical_subset(base_subset);
    for (const auto& s : canon) {
        ext.base().index_of(s);
    }
    const std::size_t n = canon.size();
    if (n > 30) {
        throw std::invalid_argument("admissible_subsets_with_support: subset too large");
    }
    std::vector<SiteSet> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        SiteSet subset;
        subset.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            subset.push_back(ext.copy_label(canon[k], (mask >> k) & 1 ? 2 : 1));
        }
        out.push_back(canonical_subset(std::move(subset)));
    }
    return out;
}

std::vector<ExtendedCoupling> extend_couplings(const ExtendedLattice& ext,
                                               const CouplingSet& base_cs) {
    validate_coupling_set(base_cs, ext.base());
    std::vector<ExtendedCoupling> out;
    for (const auto& c : base_cs.couplings) {
        const double weight = std::ldexp(c.strength, -static_cast<int>(c.subset.size()));
        for (auto& choice : admissible_subsets_with_support(ext, c.subset)) {
            out.push_back(ExtendedCoupling{std::move(choice), c.axis, weight});
        }
    }
    return out;
}

CouplingSet extended_to_spin_half(const std::vector<ExtendedCoupling>& entries,
                                  AxisPair axis_pair) {
    CouplingSet out;
    out.axis_pair = axis_pair;
    out.couplings.reserve(entries.size());
    for (const auto& e : entries) {
        // sigma = 2S at each of the |X| factors.
        out.couplings.push_back(Coupling{
            e.subset, e.axis, std::ldexp(e.strength, static_cast<int>(e.subset.size()))});
    }
    return out;
}

Eigen::MatrixXcd r_operator(Axis axis) {
    const Eigen::MatrixXcd s = spin_matrix(Spin::Half, axis);
    const Eigen::MatrixXcd one = identity(2);
    return kron(s, one) + kron(one, s);
}

Eigen::MatrixXcd r_site(const ExtendedLattice& ext, const std::string& base_site, Axis axis) {
    const Eigen::MatrixXcd s = spin_matrix(Spin::Half, axis);
    return embed_site(s, ext.copy_label(base_site, 1), ext.extended()) +
           embed_site(s, ext.copy_label(base_site, 2), ext.extended());
}

Eigen::MatrixXcd r_subset_product(const ExtendedLattice& ext, const SiteSet& base_subset,
                                  Axis axis) {
    Eigen::MatrixXcd out = identity(ext.extended().dim());
    for (const auto& site : canonical_subset(base_subset)) {
        out = out * r_site(ext, site, axis);
    }
    return out;
}

Eigen::MatrixXcd triplet_projector() {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4, 4);
    p(0, 0) = 1.0;
    p(1, 1) = 0.5;
    p(1, 2) = 0.5;
    p(2, 1) = 0.5;
    p(2, 2) = 0.5;
    p(3, 3) = 1.0;
    return p;
}

Eigen::MatrixXcd triplet_isometry() {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(4, 3);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    v(0, 0) = 1.0;             // |++>
    v(1, 1) = inv_sqrt2;       // (|+-> + |-+>)/sqrt(2)
    v(2, 1) = inv_sqrt2;
    v(3, 2) = 1.0;             // |-->
    return v;
}

Eigen::MatrixXcd lattice_triplet_projector(const ExtendedLattice& ext) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < ext.base().size(); ++i) {
        out = kron(out, triplet_projector());
    }
    return out;
}

Eigen::MatrixXcd lattice_isometry(const ExtendedLattice& ext) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < ext.base().size(); ++i) {
        out = kron(out, triplet_isometry());
    }
    return out;
}

namespace {

Eigen::MatrixXcd tilde_from_r_products(const ExtendedLattice& ext, const CouplingSet& base_cs) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ext.extended().dim(), ext.extended().dim());
    for (const auto& c : base_cs.couplings) {
        h -= c.strength * r_subset_product(ext, c.subset, c.axis);
    }
    return h;
}

}  // namespace

Eigen::MatrixXcd build_tilde_hamiltonian(const ExtendedLattice& ext, const CouplingSet& base_cs) {
    validate_coupling_set(base_cs, ext.base());
    if (base_cs.axis_pair != AxisPair::XZ) {
        throw std::invalid_argument(
            "build_tilde_hamiltonian: couplings must use the (1,3) axis pair");
    }
    const Eigen::MatrixXcd via_r = tilde_from_r_products(ext, base_cs);
    const Eigen::MatrixXcd via_sigma = build_hamiltonian(
        ext.extended(), extended_to_spin_half(extend_couplings(ext, base_cs), base_cs.axis_pair));
    const double residual = max_abs(via_r - via_sigma);
    const double tol = 1e-12 * std::max(1.0, max_abs(via_r));
    if (residual > tol) {
        std::ostringstream msg;
        msg << "build_tilde_hamiltonian: the pair-operator and expanded-coupling constructions "
               "disagree by "
            << residual << " (tolerance " << tol << ")";
        throw std::logic_error(msg.str());
    }
    return via_r;
}

Eigen::MatrixXcd q_projector(const ExtendedLattice& ext, const SiteSet& base_subset) {
    const SiteSet canon = canonical_subset(base_subset);
    for (const auto& s : canon) {
        ext.base().index_of(s);
    }
    const Eigen::MatrixXcd p = triplet_projector();
    const Eigen::MatrixXcd p_bar = identity(4) - p;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& site : ext.base().sites()) {
        const bool in_subset = std::binary_search(canon.begin(), canon.end(), site);
        out = kron(out, in_subset ? p : p_bar);
    }
    return out;
}

double q_commutation_defect(const ExtendedLattice& ext, const SiteSet& base_subset) {
    const Eigen::MatrixXcd q = q_projector(ext, base_subset);
    double defect = 0.0;
    for (const auto& site : ext.base().sites()) {
        for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
            const Eigen::MatrixXcd r = r_site(ext, site, axis);
            defect = std::max(defect, max_abs(r * q - q * r));
        }
    }
    return defect;
}

double ham_in_subspace_residual(const ExtendedLattice& ext, const CouplingSet& base_cs,
                                const SiteSet& base_subset) {
    const SiteSet canon = canonical_subset(base_subset);
    const Eigen::MatrixXcd h = build_tilde_hamiltonian(ext, base_cs);
    const Eigen::MatrixXcd q = q_projector(ext, canon);

    CouplingSet inside;
    inside.axis_pair = base_cs.axis_pair;
    for (const auto& c : base_cs.couplings) {
        const SiteSet cc = canonical_subset(c.subset);
        if (std::includes(canon.begin(), canon.end(), cc.begin(), cc.end())) {
            inside.couplings.push_back(c);
        }
    }
    const Eigen::MatrixXcd h_inside = tilde_from_r_products(ext, inside);
    return max_abs(q * h - q * h_inside);
}

CorrespondenceReport correspondence_check(const Lattice& spin_one_lat, const CouplingSet& cs,
                                          const Eigen::MatrixXcd& a, double beta) {
    if (spin_one_lat.spin() != Spin::One) {
        throw std::invalid_argument("correspondence_check: lattice must carry spin 1");
    }
    if (a.rows() != spin_one_lat.dim() || a.cols() != spin_one_lat.dim()) {
        throw std::invalid_argument("correspondence_check: observable dimension mismatch");
    }
    CorrespondenceReport report;
    for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
        const Eigen::MatrixXcd v = triplet_isometry();
        const Eigen::MatrixXcd reduced = v.adjoint() * r_operator(axis) * v;
        report.spin_matrix_defect = std::max(report.spin_matrix_defect,
                                             max_abs(reduced - spin_matrix(Spin::One, axis)));
    }

    const GibbsState direct(build_hamiltonian(spin_one_lat, cs), beta);
    report.direct_value = direct.expectation_real(a);

    const ExtendedLattice ext(spin_one_lat);
    const Eigen::MatrixXcd h_tilde = build_tilde_hamiltonian(ext, cs);
    const SpectralDecomposition es = diagonalize(h_tilde);
    const Eigen::VectorXd weights =
        (-beta * (es.eigenvalues.array() - es.eigenvalues(0))).exp().matrix();
    const Eigen::MatrixXcd boltzmann = es.eigenvectors *
                                       weights.asDiagonal().toDenseMatrix().cast<cplx>() *
                                       es.eigenvectors.adjoint();
    const Eigen::MatrixXcd v_lat = lattice_isometry(ext);
    const Eigen::MatrixXcd p_lat = lattice_triplet_projector(ext);
    const cplx num = (v_lat * a * v_lat.adjoint() * p_lat * boltzmann).trace();
    const cplx den = (p_lat * boltzmann).trace();
    report.projected_value =
        require_real(num, 1e-9, "correspondence_check: projected numerator") /
        require_real(den, 1e-9, "correspondence_check: projected normalisation");
    report.residual = std::abs(report.direct_value - report.projected_value);
    return report;
}

namespace {

void require_epsilon(double epsilon) {
    if (epsilon < 0.0 || !std::isfinite(epsilon)) {
        throw std::invalid_argument("ground energy shift: epsilon must be nonnegative and finite");
    }
}

/// Smallest entry of 1 + tau (shift - H) in the product basis; nonnegative
/// whenever -H has nonnegative off-diagonal entries, which is the
/// Perron-Frobenius structure behind the strict ground-energy decrease.
double pf_min_entry(const Eigen::MatrixXcd& h) {
    const double scale = std::max(1.0, max_abs(h));
    if (h.imag().cwiseAbs().maxCoeff() > 1e-12 * scale) {
        return -max_abs(h);  // complex entries: no nonnegative-matrix structure
    }
    const Eigen::MatrixXd real = h.real();
    const double shift = real.diagonal().maxCoeff();
    const double tau = 0.5 / (1.0 + scale + std::abs(shift));
    const Eigen::MatrixXd m =
        Eigen::MatrixXd::Identity(real.rows(), real.cols()) +
        tau * (shift * Eigen::MatrixXd::Identity(real.rows(), real.cols()) - real);
    return m.minCoeff();
}

GroundShiftReport ground_shift(const Eigen::MatrixXcd& before, const Eigen::MatrixXcd& after) {
    GroundShiftReport report;
    report.energy_before = diagonalize(before).eigenvalues(0);
    report.energy_after = diagonalize(after).eigenvalues(0);
    report.margin = report.energy_before - report.energy_after;
    report.pf_min_entry = pf_min_entry(before);
    return report;
}

}  // namespace

GroundShiftReport ground_energy_coupling_bump(const ExtendedLattice& ext,
                                              const CouplingSet& base_cs,
                                              const SiteSet& base_subset, Axis axis,
                                              double epsilon) {
    require_epsilon(epsilon);
    const SiteSet canon = canonical_subset(base_subset);
    if (canon.empty()) {
        throw std::invalid_argument("ground_energy_coupling_bump: empty subset");
    }
    CouplingSet bumped = base_cs;
    bool found = false;
    for (auto& c : bumped.couplings) {
        if (c.axis == axis && canonical_subset(c.subset) == canon) {
            c.strength += epsilon;
            found = true;
            break;
        }
    }
    if (!found) {
        bumped.couplings.push_back(Coupling{canon, axis, epsilon});
    }
    return ground_shift(build_tilde_hamiltonian(ext, base_cs),
                        build_tilde_hamiltonian(ext, bumped));
}

GroundShiftReport ground_energy_sigma_bump(const ExtendedLattice& ext,
                                           const CouplingSet& base_cs,
                                           const SiteSet& extended_subset, Axis axis,
                                           double epsilon) {
    require_epsilon(epsilon);
    if (axis == Axis::Y) {
        throw std::invalid_argument(
            "ground_energy_sigma_bump: only axes 1 and 3 preserve the nonnegative structure");
    }
    if (!ext.admissible(extended_subset)) {
        throw std::invalid_argument(
            "ground_energy_sigma_bump: subset takes both copies of a base site; only "
            "admissible sigma-products arise from spin-1 observables");
    }
    const Eigen::MatrixXcd before = build_tilde_hamiltonian(ext, base_cs);
    const Eigen::MatrixXcd after =
        before - epsilon * pauli_subset_product(ext.extended(), extended_subset, axis);
    return ground_shift(before, after);
}

TripletGroundReport ground_in_triplet_check(const Lattice& spin_one_lat, const CouplingSet& cs,
                                            double gap_tol) {
    validate_coupling_set(cs, spin_one_lat);
    std::set<std::string> coupled;
    for (const auto& c : cs.couplings) {
        if (c.strength > 0.0) {
            coupled.insert(c.subset.begin(), c.subset.end());
        }
    }
    TripletGroundReport report;
    std::vector<std::string> kept;
    for (const auto& s : spin_one_lat.sites()) {
        if (coupled.count(s)) {
            kept.push_back(s);
        } else {
            report.excluded_sites.push_back(s);
        }
    }
    if (kept.empty()) {
        // Fully decoupled system: every sector is exactly degenerate and the
        // statement is empty. Report the restriction and stop.
        report.degeneracy = 0;
        report.first_gap = std::numeric_limits<double>::infinity();
        report.residual = 0.0;
        return report;
    }
    const Lattice restricted(kept, 3);
    CouplingSet active;
    active.axis_pair = cs.axis_pair;
    for (const auto& c : cs.couplings) {
        if (c.strength > 0.0) {
            active.couplings.push_back(c);
        }
    }
    const ExtendedLattice ext(restricted);
    const SpectralDecomposition es = diagonalize(build_tilde_hamiltonian(ext, active));
    const double tol = gap_tol < 0.0 ? default_gap_tol(es.eigenvalues(0)) : gap_tol;
    const GroundSpace gs = ground_space(es, tol);
    const Eigen::MatrixXcd p_lat = lattice_triplet_projector(ext);
    report.degeneracy = gs.degeneracy;
    report.first_gap = gs.first_gap;
    report.residual = max_abs(p_lat * gs.projector - gs.projector);
    return report;
}

TwoRouteCorrelation ground_truncated_correlation(const Lattice& spin_one_lat,
                                                 const CouplingSet& cs, const SiteSet& subset_a,
                                                 Axis axis_a, const SiteSet& subset_b, Axis axis_b,
                                                 double gap_tol) {
    if (spin_one_lat.spin() != Spin::One) {
        throw std::invalid_argument("ground_truncated_correlation: lattice must carry spin 1");
    }
    TwoRouteCorrelation out;

    const SpectralDecomposition es = diagonalize(build_hamiltonian(spin_one_lat, cs));
    const double tol = gap_tol < 0.0 ? default_gap_tol(es.eigenvalues(0)) : gap_tol;
    const GroundSpace gs = ground_space(es, tol);
    const Eigen::MatrixXcd a = subset_product(spin_one_lat, subset_a, axis_a);
    const Eigen::MatrixXcd b = subset_product(spin_one_lat, subset_b, axis_b);
    out.direct = require_real(
        ground_schwinger(gs, a, b) - ground_expectation(gs, a) * ground_expectation(gs, b), 1e-9,
        "ground_truncated_correlation: direct route");

    const ExtendedLattice ext(spin_one_lat);
    const SpectralDecomposition es_tilde = diagonalize(build_tilde_hamiltonian(ext, cs));
    const double tol_tilde =
        gap_tol < 0.0 ? default_gap_tol(es_tilde.eigenvalues(0)) : gap_tol;
    const GroundSpace gs_tilde = ground_space(es_tilde, tol_tilde);

    const auto choices_a = admissible_subsets_with_support(ext, subset_a);
    const auto choices_b = admissible_subsets_with_support(ext, subset_b);
    const double prefactor = std::ldexp(
        1.0, -static_cast<int>(canonical_subset(subset_a).size() +
                               canonical_subset(subset_b).size()));
    double sum = 0.0;
    for (const auto& x : choices_a) {
        const Eigen::MatrixXcd sx = pauli_subset_product(ext.extended(), x, axis_a);
        const cplx ex = ground_expectation(gs_tilde, sx);
        for (const auto& y : choices_b) {
            const Eigen::MatrixXcd sy = pauli_subset_product(ext.extended(), y, axis_b);
            const cplx term = ground_schwinger(gs_tilde, sx, sy) -
                              ex * ground_expectation(gs_tilde, sy);
            sum += require_real(term, 1e-9, "ground_truncated_correlation: pair route term");
        }
    }
    out.decomposed = prefactor * sum;
    out.residual = std::abs(out.direct - out.decomposed);
    return out;
}

}  // namespace xycorr
