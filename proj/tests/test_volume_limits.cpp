#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "xycorr/volume_limits.hpp"

using namespace xycorr;

TEST_CASE("grid primitives") {
    CHECK(grid_label({3, -2}) == "3,-2");
    CHECK(chebyshev_distance({0, 0}, {2, -1}) == 2);
    CHECK(chebyshev_distance({1, 1}, {1, 1}) == 0);

    const auto box = grid_box({0, 0}, {1, 1});
    CHECK(box == std::vector<GridPoint>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK_THROWS(grid_box({1, 0}, {0, 0}));

    CHECK(chain(3) == std::vector<GridPoint>{{0, 0}, {1, 0}, {2, 0}});
    CHECK_THROWS(chain(0));
}

TEST_CASE("region enlargement follows the axes the region spans") {
    // an interval on the line grows only at its ends
    CHECK(enlarge_region(chain(2), 1) ==
          std::vector<GridPoint>{{-1, 0}, {0, 0}, {1, 0}, {2, 0}});
    // a lone point counts as an x-axis interval
    CHECK(enlarge_region({{5, 3}}, 1) == std::vector<GridPoint>{{4, 3}, {5, 3}, {6, 3}});
    // a vertical interval grows along y
    CHECK(enlarge_region({{0, 0}, {0, 1}}, 1) ==
          std::vector<GridPoint>{{0, -1}, {0, 0}, {0, 1}, {0, 2}});
    // a genuine 2D region grows in both directions
    CHECK(enlarge_region(grid_box({0, 0}, {1, 1}), 1) == grid_box({-1, -1}, {2, 2}));
    // range 0 leaves the region unchanged (sorted)
    CHECK(enlarge_region({{1, 0}, {0, 0}}, 0) == chain(2));
    CHECK_THROWS(enlarge_region({}, 1));
    CHECK_THROWS(enlarge_region(chain(2), -1));
}

TEST_CASE("grid lattice uses sorted labels") {
    const auto lat = grid_lattice(chain(3));
    CHECK(lat.size() == 3);
    CHECK(lat.local_dim() == 2);
    CHECK(lat.contains("1,0"));
    CHECK_THROWS(grid_lattice({}));
    CHECK_THROWS(grid_lattice({{0, 0}, {0, 0}}));
}

TEST_CASE("template stamping is translation invariant and merges collisions") {
    CouplingTemplate tpl;
    tpl.axis_pair = AxisPair::XY;
    // nearest-neighbour axis-1 bond plus an on-site transverse field
    tpl.terms.push_back({{{0, 0}, {1, 0}}, Axis::X, 0.7});
    tpl.terms.push_back({{{0, 0}}, Axis::Y, 0.2});
    validate_template(tpl, 1);

    const auto cs = stamp_couplings(tpl, chain(3));
    // bonds (0,1), (1,2); fields on all three sites
    CHECK(cs.couplings.size() == 5);
    double bond_total = 0.0, field_total = 0.0;
    for (const auto& c : cs.couplings) {
        if (c.axis == Axis::X) {
            CHECK(c.subset.size() == 2);
            bond_total += c.strength;
        } else {
            CHECK(c.subset.size() == 1);
            field_total += c.strength;
        }
    }
    CHECK(bond_total == doctest::Approx(2 * 0.7));
    CHECK(field_total == doctest::Approx(3 * 0.2));

    // two terms mapping to the same key merge additively
    CouplingTemplate dup;
    dup.terms.push_back({{{0, 0}}, Axis::X, 0.1});
    dup.terms.push_back({{{0, 0}}, Axis::X, 0.3});
    const auto merged = stamp_couplings(dup, chain(1));
    REQUIRE(merged.couplings.size() == 1);
    CHECK(merged.couplings[0].strength == doctest::Approx(0.4));

    // validation failures: diameter beyond range, repeated offsets, negative strength
    CouplingTemplate wide;
    wide.terms.push_back({{{0, 0}, {2, 0}}, Axis::X, 1.0});
    CHECK_THROWS(validate_template(wide, 1));
    CHECK_NOTHROW(validate_template(wide, 2));
    CouplingTemplate repeated;
    repeated.terms.push_back({{{0, 0}, {0, 0}}, Axis::X, 1.0});
    CHECK_THROWS(validate_template(repeated, 1));
    CouplingTemplate negative;
    negative.terms.push_back({{{0, 0}}, Axis::X, -1.0});
    CHECK_THROWS(validate_template(negative, 1));
}

TEST_CASE("single-site inner volume has closed-form projected expectations") {
    const auto inner = chain(1);
    const auto geom = grid_geometry(inner, 1);
    CHECK(geom.inner.size() == 1);
    CHECK(geom.enlarged.size() == 3);
    CHECK(geom.boundary() == SiteSet{"-1,0", "1,0"});

    // one explicit unit bond to one boundary site: the aligned neighbour acts
    // as a half-strength field, H_+ = -S^1/2, so <S^1> = tanh(1/4)/2
    const CouplingSet single{AxisPair::XY, {{{"0,0", "1,0"}, Axis::X, 1.0}}};
    const double v1 = plus_state_expectation(geom, single, {"0,0"}, Axis::X);
    CHECK(std::abs(v1 - 0.5 * std::tanh(0.25)) < 1e-12);

    // the stamped nearest-neighbour template reaches both neighbours, doubling
    // the effective field: <S^1> = tanh(1/2)/2
    CouplingTemplate tpl;
    tpl.axis_pair = AxisPair::XY;
    tpl.terms.push_back({{{0, 0}, {1, 0}}, Axis::X, 1.0});
    const auto cs = stamp_couplings(tpl, enlarge_region(inner, 1));
    const double v2 = plus_state_expectation(geom, cs, {"0,0"}, Axis::X);
    CHECK(std::abs(v2 - 0.5 * std::tanh(0.5)) < 1e-12);
}

TEST_CASE("finite fields approach the projected state monotonically") {
    CouplingTemplate tpl;
    tpl.axis_pair = AxisPair::XY;
    tpl.terms.push_back({{{0, 0}, {1, 0}}, Axis::X, 0.9});
    const auto inner = chain(2);
    const auto geom = grid_geometry(inner, 1);
    const auto cs = stamp_couplings(tpl, enlarge_region(inner, 1));

    const auto conv = eta_limit_check(geom, cs, {"0,0", "1,0"}, Axis::X, {1, 2, 4, 8, 16});
    REQUIRE(conv.rows.size() == 5);
    CHECK(conv.deviations_nonincreasing(1e-12));
    // axis-1 couplings only: the field commutes into block form and the
    // deviation decays exponentially
    CHECK(conv.final_deviation() < 1e-6);
    CHECK(conv.rows.front().deviation > conv.final_deviation());
    for (const auto& row : conv.rows) {
        CHECK(row.deviation == doctest::Approx(std::abs(row.value - conv.limit_value)));
    }

    CHECK_THROWS(eta_limit_check(geom, cs, {"0,0"}, Axis::X, {}));
    CHECK_THROWS(eta_limit_check(geom, cs, {"0,0"}, Axis::X, {-1.0}));
}

TEST_CASE("axis-1 correlations fall as the volume grows") {
    CouplingTemplate tpl;
    tpl.axis_pair = AxisPair::XY;
    tpl.terms.push_back({{{0, 0}, {1, 0}}, Axis::X, 1.0});
    tpl.terms.push_back({{{0, 0}}, Axis::Y, 0.4});

    VolumeSequence seq;
    seq.range = 1;
    seq.tpl = tpl;
    seq.volumes = {chain(2), chain(4), chain(6)};
    validate_volume_sequence(seq);

    const auto rows = volume_monotonicity(seq, {"0,0", "1,0"}, Axis::X);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].volume_size == 2);
    CHECK(rows[2].volume_size == 6);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].step_margin >= -1e-12);
        CHECK(rows[k].step_margin ==
              doctest::Approx(rows[k - 1].value - rows[k].value).epsilon(1e-12));
    }
    // and every value respects the uniform norm bound 2^{-|A|}
    for (const auto& row : rows) CHECK(std::abs(row.value) <= 0.25 + 1e-12);

    // non-nested sequences are rejected
    VolumeSequence bad = seq;
    bad.volumes = {chain(4), chain(2)};
    CHECK_THROWS(validate_volume_sequence(bad));
}

TEST_CASE("explicit strong fields reproduce the projected state") {
    CouplingTemplate tpl;
    tpl.axis_pair = AxisPair::XY;
    tpl.terms.push_back({{{0, 0}, {1, 0}}, Axis::X, 1.1});
    const auto inner = chain(2);
    const auto larger = chain(4);

    double prev = std::numeric_limits<double>::infinity();
    for (double eta : {4.0, 16.0, 64.0}) {
        const auto rep =
            volume_eta_consistency(inner, larger, 1, tpl, {"0,0", "1,0"}, Axis::X, eta);
        CHECK(rep.deviation == doctest::Approx(std::abs(rep.plus_value - rep.field_value)));
        CHECK(rep.deviation <= prev + 1e-12);
        prev = rep.deviation;
    }
    CHECK(prev < 1e-6);

    // the explicit-coupling overload sees exactly the stamped interaction
    const auto working = stamp_couplings(tpl, enlarge_region(larger, 1));
    const auto rep2 =
        volume_eta_consistency(inner, larger, 1, working, {"0,0", "1,0"}, Axis::X, 64.0);
    const auto rep1 =
        volume_eta_consistency(inner, larger, 1, tpl, {"0,0", "1,0"}, Axis::X, 64.0);
    CHECK(rep2.plus_value == doctest::Approx(rep1.plus_value).epsilon(1e-12));
    CHECK(rep2.field_value == doctest::Approx(rep1.field_value).epsilon(1e-12));
}
