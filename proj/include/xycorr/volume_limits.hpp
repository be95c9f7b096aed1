#pragma once

#include "xycorr/gibbs.hpp"

#include <array>
#include <vector>

namespace xycorr {

/// Integer grid point (x, y); one-dimensional chains use y = 0.
using GridPoint = std::array<int, 2>;

std::string grid_label(const GridPoint& p);
int chebyshev_distance(const GridPoint& a, const GridPoint& b);

/// Inclusive box [lo, hi], sorted lexicographically.
std::vector<GridPoint> grid_box(const GridPoint& lo, const GridPoint& hi);

/// {0, ..., length-1} x {0}.
std::vector<GridPoint> chain(int length);

/// All grid points within Chebyshev distance `range` of the region, dilating
/// only along axes the region actually spans: an interval on a line grows at
/// its two ends (its ambient lattice is one-dimensional), a genuine 2D region
/// grows in both directions. A single point counts as an interval on the x
/// axis.
std::vector<GridPoint> enlarge_region(const std::vector<GridPoint>& region, int range);

/// Spin-1/2 lattice whose sites are the labelled grid points in sorted order.
Lattice grid_lattice(const std::vector<GridPoint>& points);

/// Finite-range interaction pattern stamped translation-invariantly: a term
/// contributes a coupling on every translate of its offsets that fits in the
/// region. Translates of distinct terms landing on the same (subset, axis) are
/// merged additively.
struct TemplateTerm {
    std::vector<GridPoint> offsets;
    Axis axis = Axis::X;
    double strength = 0.0;
};

struct CouplingTemplate {
    AxisPair axis_pair = AxisPair::XY;
    std::vector<TemplateTerm> terms;
};

/// Throws unless every term has distinct offsets with diameter <= range, an
/// axis inside the declared pair, and a nonnegative finite strength.
void validate_template(const CouplingTemplate& tpl, int range);

CouplingSet stamp_couplings(const CouplingTemplate& tpl, const std::vector<GridPoint>& region);

/// Region plus its Chebyshev range-neighbourhood as a BoundaryGeometry.
BoundaryGeometry grid_geometry(const std::vector<GridPoint>& region, int range);

/// <prod_{x in subset} S_x^axis> in the infinite-boundary-field state on the
/// inner volume (inverse temperature fixed to 1). Also asserts the operator
/// norm bound |value| <= 2^{-|subset|}.
double plus_state_expectation(const BoundaryGeometry& geom, const CouplingSet& cs,
                              const SiteSet& subset, Axis axis);

/// Finite-field expectations on the enlarged volume against the limit value.
struct EtaConvergenceRow {
    double eta = 0.0;
    double value = 0.0;
    double deviation = 0.0;
};

struct EtaConvergence {
    double limit_value = 0.0;
    std::vector<EtaConvergenceRow> rows;

    /// True when each deviation is at most the previous one plus `slack`.
    bool deviations_nonincreasing(double slack) const;
    double final_deviation() const;
};

EtaConvergence eta_limit_check(const BoundaryGeometry& geom, const CouplingSet& cs,
                               const SiteSet& subset, Axis axis,
                               const std::vector<double>& eta_grid);

/// Strictly nested grid regions sharing one finite-range coupling template.
struct VolumeSequence {
    std::vector<std::vector<GridPoint>> volumes;
    int range = 1;
    CouplingTemplate tpl;
};

void validate_volume_sequence(const VolumeSequence& seq);

/// One volume of a monotonicity sweep. step_margin is oriented so that the
/// expected monotone direction makes it nonnegative: previous - current for
/// the first interaction axis (non-increasing), current - previous for the
/// transverse axis (non-decreasing). The first row carries +infinity.
struct VolumeRow {
    int index = 0;
    int volume_size = 0;
    double value = 0.0;
    double step_margin = 0.0;
};

std::vector<VolumeRow> volume_monotonicity(const VolumeSequence& seq, const SiteSet& subset,
                                           Axis axis);

/// Replaces the projection step with explicit strong fields on every site of
/// the larger working volume outside the inner region; the result must agree
/// with the projected state as eta grows.
struct EtaConsistency {
    double plus_value = 0.0;
    double field_value = 0.0;
    double deviation = 0.0;
};

EtaConsistency volume_eta_consistency(const std::vector<GridPoint>& inner,
                                      const std::vector<GridPoint>& larger, int range,
                                      const CouplingTemplate& tpl, const SiteSet& subset,
                                      Axis axis, double eta);

/// Same check for an explicit interaction given over the working volume
/// enlarge_region(larger, range); the projected reference state keeps the
/// couplings whose support fits inside the enlarged inner region. Every term
/// must have diameter <= range for the two descriptions to match.
EtaConsistency volume_eta_consistency(const std::vector<GridPoint>& inner,
                                      const std::vector<GridPoint>& larger, int range,
                                      const CouplingSet& working_cs, const SiteSet& subset,
                                      Axis axis, double eta);

}  // namespace xycorr
