#include "xycorr/volume_limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace xycorr {

std::string grid_label(const GridPoint& p) {
    return std::to_string(p[0]) + "," + std::to_string(p[1]);
}

int chebyshev_distance(const GridPoint& a, const GridPoint& b) {
    return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

std::vector<GridPoint> grid_box(const GridPoint& lo, const GridPoint& hi) {
    if (lo[0] > hi[0] || lo[1] > hi[1]) {
        throw std::invalid_argument("grid_box: empty box");
    }
    std::vector<GridPoint> out;
    for (int x = lo[0]; x <= hi[0]; ++x) {
        for (int y = lo[1]; y <= hi[1]; ++y) {
            out.push_back(GridPoint{x, y});
        }
    }
    return out;
}

std::vector<GridPoint> chain(int length) {
    if (length < 1) {
        throw std::invalid_argument("chain: length must be positive");
    }
    return grid_box(GridPoint{0, 0}, GridPoint{length - 1, 0});
}

std::vector<GridPoint> enlarge_region(const std::vector<GridPoint>& region, int range) {
    if (range < 0) {
        throw std::invalid_argument("enlarge_region: range must be nonnegative");
    }
    if (region.empty()) {
        throw std::invalid_argument("enlarge_region: empty region");
    }
    bool spans_x = false;
    bool spans_y = false;
    for (const auto& p : region) {
        spans_x = spans_x || p[0] != region.front()[0];
        spans_y = spans_y || p[1] != region.front()[1];
    }
    if (!spans_x && !spans_y) spans_x = true;  // lone point: interval on the x axis
    const int rx = spans_x ? range : 0;
    const int ry = spans_y ? range : 0;
    std::set<GridPoint> out;
    for (const auto& p : region) {
        for (int dx = -rx; dx <= rx; ++dx) {
            for (int dy = -ry; dy <= ry; ++dy) {
                out.insert(GridPoint{p[0] + dx, p[1] + dy});
            }
        }
    }
    return std::vector<GridPoint>(out.begin(), out.end());
}

Lattice grid_lattice(const std::vector<GridPoint>& points) {
    std::set<GridPoint> sorted(points.begin(), points.end());
    if (sorted.size() != points.size()) {
        throw std::invalid_argument("grid_lattice: duplicate grid points");
    }
    std::vector<std::string> labels;
    labels.reserve(sorted.size());
    for (const auto& p : sorted) {
        labels.push_back(grid_label(p));
    }
    return Lattice(std::move(labels), 2);
}

void validate_template(const CouplingTemplate& tpl, int range) {
    for (std::size_t i = 0; i < tpl.terms.size(); ++i) {
        const auto& term = tpl.terms[i];
        const std::string where = "coupling template term " + std::to_string(i);
        if (term.offsets.empty()) {
            throw std::invalid_argument(where + ": empty offset list");
        }
        std::set<GridPoint> distinct(term.offsets.begin(), term.offsets.end());
        if (distinct.size() != term.offsets.size()) {
            throw std::invalid_argument(where + ": repeated offsets");
        }
        for (const auto& a : term.offsets) {
            for (const auto& b : term.offsets) {
                if (chebyshev_distance(a, b) > range) {
                    std::ostringstream msg;
                    msg << where << ": offset diameter exceeds the interaction range " << range;
                    throw std::invalid_argument(msg.str());
                }
            }
        }
        if (!pair_contains(tpl.axis_pair, term.axis)) {
            throw std::invalid_argument(where + ": axis outside the declared pair");
        }
        if (!(term.strength >= 0.0) || !std::isfinite(term.strength)) {
            throw std::invalid_argument(where + ": strength must be nonnegative and finite");
        }
    }
}

CouplingSet stamp_couplings(const CouplingTemplate& tpl, const std::vector<GridPoint>& region) {
    const std::set<GridPoint> member(region.begin(), region.end());
    std::map<std::pair<SiteSet, Axis>, double> merged;
    for (const auto& term : tpl.terms) {
        std::set<GridPoint> anchors;
        for (const auto& q : member) {
            for (const auto& o : term.offsets) {
                anchors.insert(GridPoint{q[0] - o[0], q[1] - o[1]});
            }
        }
        for (const auto& p : anchors) {
            SiteSet subset;
            bool inside = true;
            for (const auto& o : term.offsets) {
                const GridPoint site{p[0] + o[0], p[1] + o[1]};
                if (!member.count(site)) {
                    inside = false;
                    break;
                }
                subset.push_back(grid_label(site));
            }
            if (inside) {
                merged[{canonical_subset(std::move(subset)), term.axis}] += term.strength;
            }
        }
    }
    CouplingSet out;
    out.axis_pair = tpl.axis_pair;
    out.couplings.reserve(merged.size());
    for (const auto& [key, strength] : merged) {
        out.couplings.push_back(Coupling{key.first, key.second, strength});
    }
    return out;
}

BoundaryGeometry grid_geometry(const std::vector<GridPoint>& region, int range) {
    return BoundaryGeometry(grid_lattice(region), grid_lattice(enlarge_region(region, range)),
                            range);
}

namespace {

void require_inner_subset(const BoundaryGeometry& geom, const SiteSet& subset,
                          const char* what) {
    for (const auto& s : subset) {
        if (!geom.inner.contains(s)) {
            throw std::invalid_argument(std::string(what) + ": site " + s +
                                        " lies outside the inner volume");
        }
    }
}

double norm_bound_checked(double value, std::size_t subset_size, const char* what) {
    const double bound = std::ldexp(1.0, -static_cast<int>(subset_size));
    if (std::abs(value) > bound + 1e-9) {
        std::ostringstream msg;
        msg << what << ": value " << value << " breaks the operator norm bound " << bound;
        throw std::logic_error(msg.str());
    }
    return value;
}

constexpr double kSectionBeta = 1.0;

}  // namespace

double plus_state_expectation(const BoundaryGeometry& geom, const CouplingSet& cs,
                              const SiteSet& subset, Axis axis) {
    const SiteSet canon = canonical_subset(subset);
    require_inner_subset(geom, canon, "plus_state_expectation");
    const GibbsState state(build_plus_hamiltonian(geom, cs), kSectionBeta);
    const double value = state.expectation_real(subset_product(geom.inner, canon, axis));
    return norm_bound_checked(value, canon.size(), "plus_state_expectation");
}

bool EtaConvergence::deviations_nonincreasing(double slack) const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].deviation > rows[i - 1].deviation + slack) {
            return false;
        }
    }
    return true;
}

double EtaConvergence::final_deviation() const {
    return rows.empty() ? 0.0 : rows.back().deviation;
}

EtaConvergence eta_limit_check(const BoundaryGeometry& geom, const CouplingSet& cs,
                               const SiteSet& subset, Axis axis,
                               const std::vector<double>& eta_grid) {
    if (eta_grid.empty()) {
        throw std::invalid_argument("eta_limit_check: eta grid must not be empty");
    }
    if (!std::is_sorted(eta_grid.begin(), eta_grid.end())) {
        throw std::invalid_argument("eta_limit_check: eta grid must be ascending");
    }
    const SiteSet canon = canonical_subset(subset);
    require_inner_subset(geom, canon, "eta_limit_check");
    EtaConvergence out;
    out.limit_value = plus_state_expectation(geom, cs, canon, axis);
    const Eigen::MatrixXcd obs = subset_product(geom.enlarged, canon, axis);
    for (double eta : eta_grid) {
        const GibbsState state(build_boundary_hamiltonian(geom, cs, eta), kSectionBeta);
        EtaConvergenceRow row;
        row.eta = eta;
        row.value =
            norm_bound_checked(state.expectation_real(obs), canon.size(), "eta_limit_check");
        row.deviation = std::abs(row.value - out.limit_value);
        out.rows.push_back(row);
    }
    return out;
}

void validate_volume_sequence(const VolumeSequence& seq) {
    if (seq.volumes.empty()) {
        throw std::invalid_argument("volume sequence: no volumes");
    }
    if (seq.range < 0) {
        throw std::invalid_argument("volume sequence: negative range");
    }
    validate_template(seq.tpl, seq.range);
    for (std::size_t i = 0; i + 1 < seq.volumes.size(); ++i) {
        const std::set<GridPoint> small(seq.volumes[i].begin(), seq.volumes[i].end());
        const std::set<GridPoint> big(seq.volumes[i + 1].begin(), seq.volumes[i + 1].end());
        const bool contained =
            std::includes(big.begin(), big.end(), small.begin(), small.end());
        if (!contained || small.size() >= big.size()) {
            std::ostringstream msg;
            msg << "volume sequence: volume " << i + 1 << " does not strictly contain volume "
                << i;
            throw std::invalid_argument(msg.str());
        }
    }
}

std::vector<VolumeRow> volume_monotonicity(const VolumeSequence& seq, const SiteSet& subset,
                                           Axis axis) {
    validate_volume_sequence(seq);
    const auto [longitudinal, transverse] = axes_of(seq.tpl.axis_pair);
    if (axis != longitudinal && axis != transverse) {
        throw std::invalid_argument(
            "volume_monotonicity: axis has no monotone contract outside the interaction pair");
    }
    std::vector<VolumeRow> rows;
    rows.reserve(seq.volumes.size());
    for (std::size_t n = 0; n < seq.volumes.size(); ++n) {
        const BoundaryGeometry geom = grid_geometry(seq.volumes[n], seq.range);
        const CouplingSet cs =
            stamp_couplings(seq.tpl, enlarge_region(seq.volumes[n], seq.range));
        VolumeRow row;
        row.index = static_cast<int>(n);
        row.volume_size = static_cast<int>(seq.volumes[n].size());
        row.value = plus_state_expectation(geom, cs, subset, axis);
        if (n == 0) {
            row.step_margin = std::numeric_limits<double>::infinity();
        } else if (axis == longitudinal) {
            row.step_margin = rows.back().value - row.value;
        } else {
            row.step_margin = row.value - rows.back().value;
        }
        rows.push_back(row);
    }
    return rows;
}

EtaConsistency volume_eta_consistency(const std::vector<GridPoint>& inner,
                                      const std::vector<GridPoint>& larger, int range,
                                      const CouplingTemplate& tpl, const SiteSet& subset,
                                      Axis axis, double eta) {
    validate_template(tpl, range);
    return volume_eta_consistency(inner, larger, range,
                                  stamp_couplings(tpl, enlarge_region(larger, range)), subset,
                                  axis, eta);
}

EtaConsistency volume_eta_consistency(const std::vector<GridPoint>& inner,
                                      const std::vector<GridPoint>& larger, int range,
                                      const CouplingSet& working_cs, const SiteSet& subset,
                                      Axis axis, double eta) {
    const std::set<GridPoint> small(inner.begin(), inner.end());
    const std::set<GridPoint> big(larger.begin(), larger.end());
    if (!std::includes(big.begin(), big.end(), small.begin(), small.end())) {
        throw std::invalid_argument("volume_eta_consistency: inner region not contained");
    }

    // Projected reference: couplings whose support lies in the enlarged inner
    // region. A range-bounded term meeting the inner region always does, so
    // the discarded terms are exactly those the projection reduces to scalars
    // or annihilates.
    const auto inner_enlarged = enlarge_region(inner, range);
    std::set<std::string> allowed;
    for (const auto& p : inner_enlarged) allowed.insert(grid_label(p));
    CouplingSet restricted;
    restricted.axis_pair = working_cs.axis_pair;
    for (const auto& c : working_cs.couplings) {
        const bool inside = std::all_of(c.subset.begin(), c.subset.end(),
                                        [&](const std::string& s) { return allowed.count(s) > 0; });
        if (inside) restricted.couplings.push_back(c);
    }

    EtaConsistency out;
    out.plus_value =
        plus_state_expectation(grid_geometry(inner, range), restricted, subset, axis);

    // Working volume: the enlarged larger region, with fields on every site
    // outside the inner region.
    const std::vector<GridPoint> working = enlarge_region(larger, range);
    const BoundaryGeometry geom(grid_lattice(inner), grid_lattice(working), range);
    const GibbsState state(build_boundary_hamiltonian(geom, working_cs, eta), kSectionBeta);
    const SiteSet canon = canonical_subset(subset);
    out.field_value = norm_bound_checked(
        state.expectation_real(subset_product(geom.enlarged, canon, axis)), canon.size(),
        "volume_eta_consistency");
    out.deviation = std::abs(out.plus_value - out.field_value);
    return out;
}

}  // namespace xycorr
