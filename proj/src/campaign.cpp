#include "xycorr/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "xycorr/doubling.hpp"
#include "xycorr/gibbs.hpp"
#include "xycorr/spin_one.hpp"
#include "xycorr/volume_limits.hpp"

namespace xycorr {

namespace {

using nlohmann::json;

// Pinned check tolerances. cfg.tolerance covers the generic inequality checks
// (truncated-correlation signs, volume steps); everything with a sharper
// numerical story gets its own constant here.
constexpr double kAgreementAbs = 1e-6;          // |FD - quadrature| floor
constexpr double kAgreementRel = 1e-4;          // ... relative part
constexpr double kDerivativeSignTol = 1e-8;     // Duhamel derivative signs
constexpr double kIdentityTol = 1e-9;           // doubled-truncation identity
constexpr double kExactLemmaTol = 1e-12;        // algebraic operator identities
constexpr double kGinibreEntryTol = 1e-12;      // basis-entry nonnegativity
constexpr double kStructureTol = 1e-12;         // spin-1 structural identities
constexpr double kTwoRouteTol = 1e-9;           // finite-beta route agreement
constexpr double kTripletTol = 1e-9;            // ground-in-triplet residual
constexpr double kGroundRouteTol = 1e-8;        // ground-state route agreement
constexpr double kEtaFinalTol = 1e-6;           // top-of-grid eta deviation
// Deviations hit the numerical floor once the field dominates: the spectral
// error of H^eta scales like eta * eps * dim, so consecutive deviations can
// wiggle by a few 1e-12 at the top of the grid. A genuine slow tail would be
// orders of magnitude larger.
constexpr double kEtaStepSlack = 1e-11;
constexpr double kNormBoundSlack = 1e-9;        // |<prod S>| <= 2^-|A| slack
constexpr double kSmallBump = 1e-3;
constexpr double kLargeBump = 0.1;
constexpr int kMaxResampleAttempts = 8;

const std::vector<double>& default_eta_grid() {
    static const std::vector<double> grid{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
    return grid;
}

const std::vector<int>& default_chain_ladder() {
    static const std::vector<int> lengths{2, 4, 6};
    return lengths;
}

void add_quantity(InstanceRecord& rec, const std::string& name, double v) {
    rec.quantities.emplace_back(name, v);
}

void add_margin(InstanceRecord& rec, const std::string& name, double v) {
    rec.margins.emplace_back(name, v);
}

json site_set_to_json(const SiteSet& s) { return json(s); }

SiteSet site_set_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw std::invalid_argument(what + ": expected an array of site labels");
    SiteSet out;
    for (const auto& e : j) {
        if (!e.is_string()) throw std::invalid_argument(what + ": site labels must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// theorem1: signs of truncated two-point Schwinger functions, swept over s.

void evaluate_theorem1(const CampaignConfig& cfg, const RandomInstance& inst,
                       InstanceRecord& rec) {
    const auto h = build_hamiltonian(inst.lattice, inst.couplings, cfg.allow_violating_hypotheses);
    const GibbsState gibbs(h, inst.beta);
    const auto [ax1, ax2] = axes_of(inst.couplings.axis_pair);
    const auto a1 = subset_product(inst.lattice, inst.subset_a, ax1);
    const auto b1 = subset_product(inst.lattice, inst.subset_b, ax1);
    const auto b2 = subset_product(inst.lattice, inst.subset_b, ax2);

    const std::vector<double> s_grid = cfg.s_grid.empty() ? std::vector<double>{inst.s} : cfg.s_grid;
    double min_same = std::numeric_limits<double>::infinity();
    double max_cross = -std::numeric_limits<double>::infinity();
    for (double s : s_grid) {
        const double same = gibbs.truncated_schwinger_real(a1, b1, s);
        const double cross = gibbs.truncated_schwinger_real(a1, b2, s);
        min_same = std::min(min_same, same);
        max_cross = std::max(max_cross, cross);
        rec.sweeps.push_back({"s-same", double(inst.lattice.size()), s, same, same + cfg.tolerance});
        rec.sweeps.push_back({"s-cross", double(inst.lattice.size()), s, cross, cfg.tolerance - cross});
    }
    add_quantity(rec, "min_same_axis", min_same);
    add_quantity(rec, "max_cross_axis", max_cross);
    add_margin(rec, "same_axis_nonnegative", min_same + cfg.tolerance);
    add_margin(rec, "cross_axis_nonpositive", cfg.tolerance - max_cross);
}

// ---------------------------------------------------------------------------
// corollary: finite-difference vs quadrature coupling derivative, plus sign.

void evaluate_corollary(const CampaignConfig& cfg, const RandomInstance& inst,
                        const json& payload, InstanceRecord& rec) {
    (void)cfg;
    const SiteSet target = site_set_from_json(payload.at("target_subset"), "target_subset");
    const Axis target_axis = axis_from_int(payload.at("target_axis").get<int>());
    const SiteSet obs = site_set_from_json(payload.at("observable_subset"), "observable_subset");
    const Axis obs_axis = axis_from_int(payload.at("observable_axis").get<int>());

    const DuhamelDerivative dd = coupling_derivative(inst.lattice, inst.couplings, inst.beta,
                                                     target, target_axis, obs, obs_axis);
    add_quantity(rec, "finite_difference", dd.finite_difference);
    add_quantity(rec, "quadrature", dd.quadrature);
    add_quantity(rec, "observable_value", dd.observable_value);

    const double agree_tol =
        std::max(kAgreementAbs, kAgreementRel * std::abs(dd.quadrature));
    add_margin(rec, "fd_quadrature_agreement",
               agree_tol - std::abs(dd.finite_difference - dd.quadrature));
    if (target_axis == obs_axis) {
        add_margin(rec, "derivative_sign", dd.quadrature + kDerivativeSignTol);
    } else {
        add_margin(rec, "derivative_sign", kDerivativeSignTol - dd.quadrature);
    }
}

// ---------------------------------------------------------------------------
// doubling-lemmas: the doubled-truncation identity, the product expansion of
// lifted operators, and entrywise nonnegativity in the per-site pair basis.

void evaluate_doubling(const CampaignConfig& cfg, const RandomInstance& inst,
                       const json& payload, InstanceRecord& rec) {
    const auto h = build_hamiltonian(inst.lattice, inst.couplings);
    const auto [ax1, ax2] = axes_of(inst.couplings.axis_pair);
    const Axis b_axis = axis_from_int(payload.at("b_axis").get<int>());
    const auto a = subset_product(inst.lattice, inst.subset_a, ax1);
    const auto b = subset_product(inst.lattice, inst.subset_b, b_axis);

    const std::vector<double> s_grid = cfg.s_grid.empty() ? std::vector<double>{inst.s} : cfg.s_grid;
    double identity_residual = 0.0;
    for (double s : s_grid) {
        const auto id = doubled_truncation_identity(h, a, b, inst.beta, s);
        identity_residual = std::max(identity_residual, std::abs(id.residual));
        rec.sweeps.push_back(
            {"s-identity", double(inst.lattice.size()), s, id.single_copy, std::abs(id.residual)});
    }
    add_quantity(rec, "identity_residual", identity_residual);
    add_margin(rec, "doubled_identity", kIdentityTol - identity_residual);

    const double lifted =
        std::max(lifted_product_residual(a, b, +1), lifted_product_residual(a, b, -1));
    add_quantity(rec, "lifted_product_residual", lifted);
    add_margin(rec, "lifted_product_expansion", kExactLemmaTol - lifted);

    // Entrywise structure of minus the doubled Hamiltonian, in the axis-(1,3)
    // frame where everything is real.
    const CouplingSet real_cs =
        inst.couplings.axis_pair == AxisPair::XZ ? inst.couplings : to_axis_pair_xz(inst.couplings);
    const auto hz = build_hamiltonian(inst.lattice, real_cs);
    const auto hd = build_doubled_hamiltonian(hz);
    const auto ham_report = ginibre_entry_report(-hd, inst.lattice.size());
    add_quantity(rec, "doubled_ham_min_entry", ham_report.min_entry);
    add_margin(rec, "doubled_ham_nonnegative", ham_report.min_entry + kGinibreEntryTol);

    // The four single-site operator families on one- and two-site lattices.
    double op_min_entry = std::numeric_limits<double>::infinity();
    double imag_defect = 0.0;
    for (int nsites = 1; nsites <= 2; ++nsites) {
        std::vector<std::string> labels;
        for (int i = 0; i < nsites; ++i) labels.push_back("g" + std::to_string(i));
        const Lattice latg(labels, 2);
        for (const auto& site : latg.sites()) {
            const struct {
                Axis axis;
                int sign;
                double orient;
            } family[] = {{Axis::X, +1, +1.0}, {Axis::X, -1, +1.0}, {Axis::Z, +1, +1.0},
                          {Axis::Z, -1, -1.0}};
            for (const auto& f : family) {
                const Eigen::MatrixXcd op =
                    lift(embed_site(spin_matrix(Spin::Half, f.axis), site, latg), f.sign);
                imag_defect = std::max(imag_defect, max_abs(Eigen::MatrixXcd(op.imag())));
                const auto r = ginibre_entry_report(f.orient * op, nsites);
                op_min_entry = std::min(op_min_entry, r.min_entry);
            }
        }
    }
    add_quantity(rec, "operator_min_entry", op_min_entry);
    add_quantity(rec, "operator_imag_residual", imag_defect);
    add_margin(rec, "operator_entries_nonnegative", op_min_entry + kGinibreEntryTol);
    add_margin(rec, "operator_entries_real", kGinibreEntryTol - imag_defect);
}

// ---------------------------------------------------------------------------
// spin1: structural identities of the pair representation, the two-route Gibbs
// correspondence, ground-energy monotonicity, and the triplet ground sector.

void evaluate_spin1(const CampaignConfig& cfg, const RandomInstance& inst, const json& payload,
                    InstanceRecord& rec) {
    (void)cfg;
    const ExtendedLattice ext(inst.lattice);
    const CouplingSet& cs = inst.couplings;
    const int n = inst.lattice.size();

    const Eigen::MatrixXcd viso = triplet_isometry();
    const double iso_defect = std::max(
        max_abs(Eigen::MatrixXcd(viso.adjoint() * viso - Eigen::MatrixXcd::Identity(3, 3))),
        max_abs(Eigen::MatrixXcd(viso * viso.adjoint() - triplet_projector())));

    const double q_defect = q_commutation_defect(ext, inst.subset_a);
    const double subspace_residual = ham_in_subspace_residual(ext, cs, inst.subset_a);

    std::int64_t expected_admissible = 1;
    for (int i = 0; i < n; ++i) expected_admissible *= 3;
    const double count_defect =
        std::abs(double(admissible_subsets(ext).size()) - double(expected_admissible)) +
        std::abs(double(admissible_subsets_with_support(ext, inst.subset_a).size()) -
                 std::ldexp(1.0, int(inst.subset_a.size())));

    const Axis obs_axis = axis_from_int(payload.at("observable_axis").get<int>());
    const auto a = subset_product(inst.lattice, inst.subset_a, obs_axis);
    const auto corr = correspondence_check(inst.lattice, cs, a, inst.beta);

    const double structure = std::max({iso_defect, q_defect, subspace_residual, count_defect,
                                       corr.spin_matrix_defect});
    add_quantity(rec, "structure_residual", structure);
    add_margin(rec, "structure_identities", kStructureTol - structure);

    add_quantity(rec, "direct_value", corr.direct_value);
    add_quantity(rec, "projected_value", corr.projected_value);
    add_quantity(rec, "two_route_residual", std::abs(corr.residual));
    add_margin(rec, "two_route_agreement", kTwoRouteTol - std::abs(corr.residual));

    const SiteSet sigma_subset = site_set_from_json(payload.at("sigma_subset"), "sigma_subset");
    const Axis bump_axis = axis_from_int(payload.at("bump_axis").get<int>());
    double pf_min = std::numeric_limits<double>::infinity();
    for (const auto& [tag, eps] :
         {std::pair<const char*, double>{"small", kSmallBump}, {"large", kLargeBump}}) {
        const auto rc = ground_energy_coupling_bump(ext, cs, inst.subset_a, bump_axis, eps);
        const auto rs = ground_energy_sigma_bump(ext, cs, sigma_subset, bump_axis, eps);
        add_quantity(rec, std::string("ground_drop_coupling_") + tag, rc.margin);
        add_quantity(rec, std::string("ground_drop_sigma_") + tag, rs.margin);
        add_margin(rec, std::string("ground_drop_coupling_") + tag, rc.margin);
        add_margin(rec, std::string("ground_drop_sigma_") + tag, rs.margin);
        pf_min = std::min({pf_min, rc.pf_min_entry, rs.pf_min_entry});
    }
    add_quantity(rec, "pf_min_entry", pf_min);
    add_margin(rec, "pf_premise", pf_min + kGinibreEntryTol);

    const auto triplet = ground_in_triplet_check(inst.lattice, cs);
    add_quantity(rec, "triplet_residual", triplet.residual);
    add_quantity(rec, "ground_degeneracy", double(triplet.degeneracy));
    add_margin(rec, "ground_in_triplet", kTripletTol - triplet.residual);
}

// ---------------------------------------------------------------------------
// theorem2: spin-1 ground-state truncated correlations, two routes.

void evaluate_theorem2(const CampaignConfig& cfg, const RandomInstance& inst,
                       InstanceRecord& rec) {
    const auto same = ground_truncated_correlation(inst.lattice, inst.couplings, inst.subset_a,
                                                   Axis::X, inst.subset_b, Axis::X);
    const auto cross = ground_truncated_correlation(inst.lattice, inst.couplings, inst.subset_a,
                                                    Axis::X, inst.subset_b, Axis::Z);
    add_quantity(rec, "same_axis_value", same.direct);
    add_quantity(rec, "cross_axis_value", cross.direct);
    const double route = std::max(std::abs(same.residual), std::abs(cross.residual));
    add_quantity(rec, "route_residual", route);
    add_margin(rec, "same_axis_nonnegative", same.direct + cfg.tolerance);
    add_margin(rec, "cross_axis_nonpositive", cfg.tolerance - cross.direct);
    add_margin(rec, "route_agreement", kGroundRouteTol - route);
}

// ---------------------------------------------------------------------------
// volume-limits: payload encodes a translation-invariant chain model.

json template_to_json(const CouplingTemplate& tpl) {
    json terms = json::array();
    for (const auto& t : tpl.terms) {
        json offsets = json::array();
        for (const auto& o : t.offsets) offsets.push_back(json::array({o[0], o[1]}));
        terms.push_back(
            json{{"offsets", offsets}, {"axis", axis_to_int(t.axis)}, {"strength", t.strength}});
    }
    return json{{"axis_pair", to_string(tpl.axis_pair)}, {"terms", terms}};
}

CouplingTemplate template_from_json(const json& j) {
    CouplingTemplate tpl;
    tpl.axis_pair = axis_pair_from_string(j.at("axis_pair").get<std::string>());
    for (const auto& t : j.at("terms")) {
        TemplateTerm term;
        for (const auto& o : t.at("offsets")) {
            term.offsets.push_back(GridPoint{o.at(0).get<int>(), o.at(1).get<int>()});
        }
        term.axis = axis_from_int(t.at("axis").get<int>());
        term.strength = t.at("strength").get<double>();
        tpl.terms.push_back(std::move(term));
    }
    return tpl;
}

void evaluate_volume(const CampaignConfig& cfg, const json& payload, InstanceRecord& rec) {
    const int range = payload.at("range").get<int>();
    const int inner_length = payload.at("inner_length").get<int>();
    const AxisPair pair = axis_pair_from_string(payload.at("axis_pair").get<std::string>());
    const CouplingSet eta_cs = coupling_set_from_json(payload.at("eta_couplings"), pair);
    const CouplingTemplate tpl = template_from_json(payload.at("ladder_template"));
    validate_template(tpl, range);
    const SiteSet subset = site_set_from_json(payload.at("subset"), "subset");
    const Axis axis = axis_from_int(payload.at("axis").get<int>());
    const SiteSet ladder_subset = site_set_from_json(payload.at("ladder_subset"), "ladder_subset");
    const Axis ladder_axis = axis_from_int(payload.at("ladder_axis").get<int>());
    std::vector<double> eta_grid;
    for (const auto& e : payload.at("eta_grid")) eta_grid.push_back(e.get<double>());

    rec.descriptor = "chain(" + std::to_string(inner_length) + "), range " +
                     std::to_string(range) + ", " + std::to_string(eta_cs.couplings.size()) +
                     " couplings, " + std::to_string(tpl.terms.size()) + " template terms";

    const auto region = chain(inner_length);
    const auto geom = grid_geometry(region, range);

    const auto conv = eta_limit_check(geom, eta_cs, subset, axis, eta_grid);
    double min_step = std::numeric_limits<double>::infinity();
    double prev_dev = std::numeric_limits<double>::infinity();
    for (const auto& row : conv.rows) {
        const double step =
            std::isfinite(prev_dev) ? prev_dev - row.deviation + kEtaStepSlack : prev_dev;
        min_step = std::min(min_step, step);
        rec.sweeps.push_back(
            {"eta", double(geom.enlarged.size()), row.eta, row.value, row.deviation});
        prev_dev = row.deviation;
    }
    add_quantity(rec, "limit_value", conv.limit_value);
    add_quantity(rec, "final_eta_deviation", conv.final_deviation());
    add_margin(rec, "eta_deviation_monotone", min_step);
    add_margin(rec, "eta_final_deviation", kEtaFinalTol - conv.final_deviation());
    add_margin(rec, "norm_bound",
               std::ldexp(1.0, -int(subset.size())) + kNormBoundSlack -
                   std::abs(conv.limit_value));

    VolumeSequence seq;
    seq.range = range;
    seq.tpl = tpl;
    for (const auto& len : payload.at("chain_lengths")) seq.volumes.push_back(chain(len.get<int>()));
    const auto rows = volume_monotonicity(seq, ladder_subset, ladder_axis);
    double min_volume_step = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        min_volume_step = std::min(min_volume_step, row.step_margin);
        rec.sweeps.push_back(
            {"volume", double(row.volume_size), double(row.index), row.value, row.step_margin});
    }
    add_quantity(rec, "min_volume_step_margin", min_volume_step);
    add_margin(rec, "volume_monotone", min_volume_step + cfg.tolerance);

    const CouplingSet working_cs =
        coupling_set_from_json(payload.at("consistency_couplings"), pair);
    const auto consistency =
        volume_eta_consistency(seq.volumes.front(), seq.volumes.at(1), range, working_cs,
                               ladder_subset, ladder_axis, eta_grid.back());
    add_quantity(rec, "field_vs_projected_deviation", consistency.deviation);
    add_margin(rec, "field_projection_consistency", kEtaFinalTol - consistency.deviation);
}

// ---------------------------------------------------------------------------
// Payload sampling.

// Random range-1 coupling set on a 1D interval [lo, hi]. Transverse terms are
// confined to strict_interior = [ilo, ihi]: a transverse factor on a fielded
// site survives the strong-field projection only as an O(1/eta^2) resolvent
// correction, so the exponential top-of-grid deviation bound holds exactly
// when every coupling meeting the fielded sites is longitudinal. Longitudinal
// terms are exactly block-diagonal with the field and may sit anywhere.
CouplingSet sample_chain_couplings(std::mt19937_64& eng, AxisPair pair, int lo, int hi, int ilo,
                                   int ihi, int nterms, double strength_max) {
    const auto [ax1, ax2] = axes_of(pair);
    std::vector<SiteSet> candidates;
    for (int i = lo; i <= hi; ++i) {
        candidates.push_back({grid_label(GridPoint{i, 0})});
        if (i < hi) {
            candidates.push_back(canonical_subset(
                {grid_label(GridPoint{i, 0}), grid_label(GridPoint{i + 1, 0})}));
        }
    }
    std::vector<bool> interior;
    for (int i = lo; i <= hi; ++i) {
        interior.push_back(i >= ilo && i <= ihi);
        if (i < hi) interior.push_back(i >= ilo && i + 1 <= ihi);
    }
    std::map<std::pair<SiteSet, int>, double> merged;
    for (int t = 0; t < nterms; ++t) {
        const auto k = uniform_index(eng, 0, candidates.size() - 1);
        const Axis axis =
            interior[k] && uniform_index(eng, 0, 1) == 1 ? ax2 : ax1;
        merged[{candidates[k], axis_to_int(axis)}] += uniform_real(eng, 0.0, strength_max);
    }
    CouplingSet cs;
    cs.axis_pair = pair;
    for (const auto& [key, strength] : merged) {
        cs.couplings.push_back(Coupling{key.first, axis_from_int(key.second), strength});
    }
    return cs;
}

json sample_volume_payload(const CampaignConfig& cfg, int trial, int attempt) {
    const std::uint64_t sub_seed = mix_seed(cfg.seed, std::uint64_t(trial), std::uint64_t(attempt));
    std::mt19937_64 eng(sub_seed);
    const auto [ax1, ax2] = axes_of(cfg.axis_pair);

    const int inner_length = int(uniform_index(eng, 1, 6));
    const int nterms = int(uniform_index(eng, 2, std::uint64_t(inner_length) + 3));
    const CouplingSet eta_cs = sample_chain_couplings(eng, cfg.axis_pair, -1, inner_length, 0,
                                                      inner_length - 1, nterms, cfg.strength_max);

    const auto region = chain(inner_length);
    const int subset_size = int(uniform_index(eng, 1, std::min(2, inner_length)));
    std::vector<int> idx(region.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
    for (int i = 0; i < subset_size; ++i) {
        const auto j = uniform_index(eng, std::uint64_t(i), std::uint64_t(idx.size() - 1));
        std::swap(idx[std::size_t(i)], idx[j]);
    }
    SiteSet subset;
    for (int i = 0; i < subset_size; ++i) subset.push_back(grid_label(region[std::size_t(idx[std::size_t(i)])]));
    subset = canonical_subset(std::move(subset));
    const Axis axis = uniform_index(eng, 0, 1) == 0 ? ax1 : ax2;

    // Volume ladder: a translation-invariant template with free axes. These
    // checks compare exact projected Hamiltonians, so no confinement of the
    // transverse terms is needed.
    CouplingTemplate tpl;
    tpl.axis_pair = cfg.axis_pair;
    const int ntpl = int(uniform_index(eng, 1, 3));
    for (int t = 0; t < ntpl; ++t) {
        TemplateTerm term;
        if (uniform_index(eng, 0, 1) == 0) {
            term.offsets = {GridPoint{0, 0}};
        } else {
            term.offsets = {GridPoint{0, 0}, GridPoint{1, 0}};
        }
        term.axis = uniform_index(eng, 0, 1) == 0 ? ax1 : ax2;
        term.strength = uniform_real(eng, 0.0, cfg.strength_max);
        tpl.terms.push_back(std::move(term));
    }

    const auto base = chain(default_chain_ladder().front());
    SiteSet ladder_subset;
    switch (uniform_index(eng, 0, 2)) {
        case 0: ladder_subset = {grid_label(base[0])}; break;
        case 1: ladder_subset = {grid_label(base[1])}; break;
        default: ladder_subset = {grid_label(base[0]), grid_label(base[1])}; break;
    }
    ladder_subset = canonical_subset(std::move(ladder_subset));
    const Axis ladder_axis = uniform_index(eng, 0, 1) == 0 ? ax1 : ax2;

    // Field-vs-projection consistency on the first two ladder volumes: axis-1
    // terms stamped over the whole working volume, transverse terms confined
    // to the inner region for the same rate reason as above.
    const int inner_len = default_chain_ladder()[0];
    const int larger_len = default_chain_ladder()[1];
    CouplingTemplate tpl1;
    tpl1.axis_pair = cfg.axis_pair;
    const int ncons = int(uniform_index(eng, 1, 2));
    for (int t = 0; t < ncons; ++t) {
        TemplateTerm term;
        if (uniform_index(eng, 0, 1) == 0) {
            term.offsets = {GridPoint{0, 0}};
        } else {
            term.offsets = {GridPoint{0, 0}, GridPoint{1, 0}};
        }
        term.axis = ax1;
        term.strength = uniform_real(eng, 0.0, cfg.strength_max);
        tpl1.terms.push_back(std::move(term));
    }
    const CouplingSet stamped = stamp_couplings(tpl1, enlarge_region(chain(larger_len), 1));
    const CouplingSet inner_extra = sample_chain_couplings(
        eng, cfg.axis_pair, 0, inner_len - 1, 0, inner_len - 1,
        int(uniform_index(eng, 1, 2)), cfg.strength_max);
    std::map<std::pair<SiteSet, int>, double> merged;
    for (const auto& c : stamped.couplings) merged[{c.subset, axis_to_int(c.axis)}] += c.strength;
    for (const auto& c : inner_extra.couplings) {
        merged[{canonical_subset(c.subset), axis_to_int(c.axis)}] += c.strength;
    }
    CouplingSet working_cs;
    working_cs.axis_pair = cfg.axis_pair;
    for (const auto& [key, strength] : merged) {
        working_cs.couplings.push_back(Coupling{key.first, axis_from_int(key.second), strength});
    }

    return json{{"kind", "volume"},
                {"sub_seed", sub_seed},
                {"range", 1},
                {"inner_length", inner_length},
                {"axis_pair", to_string(cfg.axis_pair)},
                {"eta_couplings", coupling_set_to_json(eta_cs)},
                {"subset", site_set_to_json(subset)},
                {"axis", axis_to_int(axis)},
                {"ladder_template", template_to_json(tpl)},
                {"ladder_subset", site_set_to_json(ladder_subset)},
                {"ladder_axis", axis_to_int(ladder_axis)},
                {"consistency_couplings", coupling_set_to_json(working_cs)},
                {"eta_grid", default_eta_grid()},
                {"chain_lengths", default_chain_ladder()}};
}

json sample_payload(const CampaignConfig& cfg, const std::string& mode, int trial, int attempt) {
    if (mode == "volume-limits") return sample_volume_payload(cfg, trial, attempt);

    const bool spin_one = (mode == "spin1" || mode == "theorem2");
    const RandomInstance inst = spin_one
                                    ? generate_spin_one_instance(cfg, std::uint64_t(trial),
                                                                 std::uint64_t(attempt))
                                    : generate_instance(cfg, std::uint64_t(trial),
                                                        std::uint64_t(attempt));
    json payload = instance_to_json(inst);

    std::mt19937_64 aux(mix_seed(inst.sub_seed, 0xA0Bu, 1));
    const auto [ax1, ax2] = axes_of(inst.couplings.axis_pair);
    if (mode == "corollary") {
        SiteSet target;
        Axis target_axis = ax1;
        if (!inst.couplings.couplings.empty() && uniform_index(aux, 0, 1) == 0) {
            const auto& c =
                inst.couplings.couplings[uniform_index(aux, 0, inst.couplings.couplings.size() - 1)];
            target = c.subset;
            target_axis = c.axis;
        } else {
            const int k = int(uniform_index(aux, 1, std::min(3, inst.lattice.size())));
            target = random_subset(aux, inst.lattice, k);
            target_axis = uniform_index(aux, 0, 1) == 0 ? ax1 : ax2;
        }
        payload["target_subset"] = site_set_to_json(target);
        payload["target_axis"] = axis_to_int(target_axis);
        payload["observable_subset"] = site_set_to_json(inst.subset_b);
        payload["observable_axis"] = axis_to_int(uniform_index(aux, 0, 1) == 0 ? ax1 : ax2);
    } else if (mode == "doubling-lemmas") {
        payload["b_axis"] = axis_to_int(uniform_index(aux, 0, 1) == 0 ? ax1 : ax2);
    } else if (mode == "spin1") {
        const ExtendedLattice ext(inst.lattice);
        const auto choices = admissible_subsets_with_support(ext, inst.subset_a);
        payload["sigma_subset"] =
            site_set_to_json(choices[uniform_index(aux, 0, choices.size() - 1)]);
        payload["bump_axis"] = axis_to_int(uniform_index(aux, 0, 1) == 0 ? Axis::X : Axis::Z);
        payload["observable_axis"] = axis_to_int(uniform_index(aux, 0, 1) == 0 ? Axis::X : Axis::Z);
    }
    return payload;
}

}  // namespace

bool CampaignOutcome::all_passed() const {
    for (const auto& res : results) {
        if (res.failed != 0) return false;
    }
    return !results.empty();
}

json instance_to_json(const RandomInstance& inst) {
    return json{{"kind", "instance"},
                {"sub_seed", inst.sub_seed},
                {"lattice",
                 json{{"sites", inst.lattice.sites()}, {"local_dim", inst.lattice.local_dim()}}},
                {"axis_pair", to_string(inst.couplings.axis_pair)},
                {"couplings", coupling_set_to_json(inst.couplings)},
                {"subset_a", site_set_to_json(inst.subset_a)},
                {"subset_b", site_set_to_json(inst.subset_b)},
                {"beta", inst.beta},
                {"s", inst.s}};
}

RandomInstance instance_from_json(const json& payload) {
    const AxisPair pair = axis_pair_from_string(payload.at("axis_pair").get<std::string>());
    RandomInstance inst{
        Lattice(payload.at("lattice").at("sites").get<std::vector<std::string>>(),
                payload.at("lattice").at("local_dim").get<int>()),
        coupling_set_from_json(payload.at("couplings"), pair),
        site_set_from_json(payload.at("subset_a"), "subset_a"),
        site_set_from_json(payload.at("subset_b"), "subset_b"),
        payload.at("beta").get<double>(),
        payload.at("s").get<double>(),
        payload.value("sub_seed", std::uint64_t(0))};
    return inst;
}

InstanceRecord evaluate_payload(const CampaignConfig& cfg, const std::string& mode,
                                const json& payload, int trial) {
    InstanceRecord rec;
    rec.trial = trial;
    rec.sub_seed = payload.value("sub_seed", std::uint64_t(0));
    rec.payload = payload;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (payload.value("kind", "instance") == "volume") {
            evaluate_volume(cfg, payload, rec);
        } else {
            const RandomInstance inst = instance_from_json(payload);
            rec.descriptor = describe_instance(inst);
            if (mode == "theorem1") {
                evaluate_theorem1(cfg, inst, rec);
            } else if (mode == "corollary") {
                evaluate_corollary(cfg, inst, payload, rec);
            } else if (mode == "doubling-lemmas") {
                evaluate_doubling(cfg, inst, payload, rec);
            } else if (mode == "spin1") {
                evaluate_spin1(cfg, inst, payload, rec);
            } else if (mode == "theorem2") {
                evaluate_theorem2(cfg, inst, rec);
            } else {
                throw ConfigError("unknown mode '" + mode + "'");
            }
        }
        rec.pass = true;
        for (const auto& [name, margin] : rec.margins) {
            (void)name;
            if (!(margin >= 0.0)) rec.pass = false;
        }
    } catch (const AmbiguousGroundSpace&) {
        throw;  // the caller resamples
    } catch (const std::exception& e) {
        rec.pass = false;
        rec.failure = e.what();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

InstanceRecord run_trial(const CampaignConfig& cfg, const std::string& mode, int trial) {
    for (int attempt = 0;; ++attempt) {
        json payload;
        try {
            payload = sample_payload(cfg, mode, trial, attempt);
        } catch (const std::exception& e) {
            InstanceRecord rec;
            rec.trial = trial;
            rec.attempt = attempt;
            rec.pass = false;
            rec.failure = std::string("instance generation failed: ") + e.what();
            return rec;
        }
        try {
            InstanceRecord rec = evaluate_payload(cfg, mode, payload, trial);
            rec.attempt = attempt;
            return rec;
        } catch (const AmbiguousGroundSpace& e) {
            if (attempt + 1 >= kMaxResampleAttempts) {
                InstanceRecord rec;
                rec.trial = trial;
                rec.sub_seed = payload.value("sub_seed", std::uint64_t(0));
                rec.attempt = attempt;
                rec.payload = payload;
                rec.pass = false;
                rec.failure = std::string("resample budget exhausted: ") + e.what();
                return rec;
            }
        }
    }
}

CampaignResult run_mode(const CampaignConfig& cfg, const std::string& mode) {
    const auto t0 = std::chrono::steady_clock::now();
    CampaignResult res;
    res.mode = mode;
    res.trials = cfg.trials;
    res.records.resize(std::size_t(cfg.trials));

    unsigned workers = cfg.jobs > 0 ? unsigned(cfg.jobs) : std::thread::hardware_concurrency();
    if (workers == 0) workers = 4;
    workers = std::min<unsigned>(workers, unsigned(cfg.trials));
    workers = std::min<unsigned>(workers, 64);

    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.trials) return;
            res.records[std::size_t(i)] = run_trial(cfg, mode, i);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (const auto& rec : res.records) {
        if (rec.pass) {
            ++res.passed;
        } else {
            ++res.failed;
        }
        for (const auto& [name, margin] : rec.margins) {
            if (margin < res.min_margin) {
                res.min_margin = margin;
                res.min_margin_name = name;
                res.min_margin_trial = rec.trial;
            }
        }
        for (const auto& [name, value] : rec.quantities) {
            if (name.find("residual") != std::string::npos && std::abs(value) > res.max_residual) {
                res.max_residual = std::abs(value);
                res.max_residual_name = name;
            }
        }
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

CampaignOutcome run_campaign(const CampaignConfig& cfg) {
    if (cfg.mode.empty()) throw ConfigError("no mode selected");
    CampaignOutcome outcome;
    if (cfg.mode == "all") {
        for (const auto& mode : known_modes()) {
            if (mode == "all") continue;
            outcome.results.push_back(run_mode(cfg, mode));
        }
    } else {
        outcome.results.push_back(run_mode(cfg, cfg.mode));
    }
    return outcome;
}

json record_to_json(const InstanceRecord& rec) {
    json quantities = json::object();
    for (const auto& [name, value] : rec.quantities) quantities[name] = value;
    json margins = json::object();
    for (const auto& [name, value] : rec.margins) margins[name] = value;
    json j{{"trial", rec.trial},
           {"sub_seed", rec.sub_seed},
           {"attempt", rec.attempt},
           {"pass", rec.pass},
           {"wall_seconds", rec.wall_seconds},
           {"descriptor", rec.descriptor},
           {"payload", rec.payload},
           {"quantities", quantities},
           {"margins", margins}};
    if (!rec.failure.empty()) j["failure"] = rec.failure;
    return j;
}

json outcome_to_json(const CampaignOutcome& outcome, const CampaignConfig& cfg) {
    json summary = json::array();
    json instances = json::array();
    int total_trials = 0;
    int total_failed = 0;
    for (const auto& res : outcome.results) {
        total_trials += res.trials;
        total_failed += res.failed;
        json s{{"mode", res.mode},
               {"trials", res.trials},
               {"passed", res.passed},
               {"failed", res.failed},
               {"wall_seconds", res.wall_seconds},
               {"max_residual", res.max_residual},
               {"max_residual_name", res.max_residual_name}};
        if (std::isfinite(res.min_margin)) {
            s["min_margin"] = res.min_margin;
            s["min_margin_name"] = res.min_margin_name;
            s["min_margin_trial"] = res.min_margin_trial;
        }
        summary.push_back(std::move(s));
        for (const auto& rec : res.records) {
            json r = record_to_json(rec);
            r["mode"] = res.mode;
            instances.push_back(std::move(r));
        }
    }
    return json{{"config", config_to_json(cfg)},
                {"summary", summary},
                {"instances", instances},
                {"overall", json{{"passed", outcome.all_passed()},
                                 {"total_trials", total_trials},
                                 {"total_failed", total_failed}}}};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_reports(const CampaignOutcome& outcome, const CampaignConfig& cfg) {
    if (!cfg.report_path.empty()) {
        std::ofstream out(cfg.report_path);
        if (!out) throw ConfigError("cannot write report file '" + cfg.report_path + "'");
        out << outcome_to_json(outcome, cfg).dump(2) << "\n";
    }
    if (!cfg.csv_path.empty()) {
        std::ofstream out(cfg.csv_path);
        if (!out) throw ConfigError("cannot write csv file '" + cfg.csv_path + "'");
        out << "mode,trial,table,size,parameter,value,margin\n";
        for (const auto& res : outcome.results) {
            for (const auto& rec : res.records) {
                for (const auto& row : rec.sweeps) {
                    out << res.mode << ',' << rec.trial << ',' << row.table << ','
                        << std::llround(row.size) << ',' << format_double(row.parameter) << ','
                        << format_double(row.value) << ',' << format_double(row.margin) << "\n";
                }
            }
        }
    }
}

}  // namespace xycorr
