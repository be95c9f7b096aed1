#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "xycorr/gibbs.hpp"
#include "xycorr/linalg.hpp"
#include "xycorr/spin_one.hpp"

using namespace xycorr;

TEST_CASE("extended lattice bookkeeping") {
    const Lattice base({"u", "v"}, 3);
    const ExtendedLattice ext(base);
    CHECK(ext.base().size() == 2);
    CHECK(ext.extended().size() == 4);
    CHECK(ext.extended().local_dim() == 2);
    CHECK(ext.extended().dim() == 16);
    CHECK(ext.copy_label("u", 1) == "u:1");
    CHECK(ext.copy_label("u", 2) == "u:2");
    CHECK(ext.base_of("v:2") == "v");
    CHECK_THROWS(ext.base_of("w:1"));
    // copies of a site stay adjacent in the factor order
    const auto& sites = ext.extended().sites();
    const auto pos = [&](const std::string& s) {
        return std::find(sites.begin(), sites.end(), s) - sites.begin();
    };
    CHECK(pos("u:2") == pos("u:1") + 1);
    CHECK(pos("v:2") == pos("v:1") + 1);

    CHECK(ext.support_of({"u:1", "v:2"}) == SiteSet{"u", "v"});
    CHECK(ext.admissible({"u:1", "v:2"}));
    CHECK_FALSE(ext.admissible({"u:1", "u:2"}));

    // a spin-1/2 base lattice is rejected
    CHECK_THROWS(ExtendedLattice(Lattice({"u"}, 2)));
}

TEST_CASE("admissible subsets are counted by powers of three and two") {
    const ExtendedLattice ext(Lattice({"u", "v"}, 3));
    const auto all = admissible_subsets(ext);
    CHECK(all.size() == 9);  // 3^2 including the empty set
    for (const auto& s : all) CHECK(ext.admissible(s));

    const auto on_uv = admissible_subsets_with_support(ext, {"u", "v"});
    CHECK(on_uv.size() == 4);  // 2^2 copy choices
    for (const auto& s : on_uv) CHECK(ext.support_of(s) == SiteSet{"u", "v"});
    const auto on_u = admissible_subsets_with_support(ext, {"u"});
    CHECK(on_u.size() == 2);
    const auto on_none = admissible_subsets_with_support(ext, {});
    REQUIRE(on_none.size() == 1);
    CHECK(on_none[0].empty());
}

TEST_CASE("coupling extension spreads strength over copy choices") {
    const ExtendedLattice ext(Lattice({"u", "v"}, 3));
    const CouplingSet base_cs{AxisPair::XZ, {{{"u", "v"}, Axis::X, 0.8}}};
    const auto entries = extend_couplings(ext, base_cs);
    REQUIRE(entries.size() == 4);
    for (const auto& e : entries) {
        CHECK(e.axis == Axis::X);
        CHECK(e.strength == doctest::Approx(0.8 / 4.0));  // 2^{-|A|} J_A
        CHECK(ext.admissible(e.subset));
        CHECK(ext.support_of(e.subset) == SiteSet{"u", "v"});
    }
    // moving to the spin-half convention multiplies back by 2^{|X|}
    const auto cs = extended_to_spin_half(entries, AxisPair::XZ);
    CHECK(cs.axis_pair == AxisPair::XZ);
    REQUIRE(cs.couplings.size() == 4);
    for (const auto& c : cs.couplings) {
        CHECK(c.strength == doctest::Approx(0.8));
    }
}

TEST_CASE("pair operators represent spin 1 on the triplet sector") {
    // R^i is the half-sum of the two sigma copies
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
        const auto r = r_operator(ax);
        const auto p = pauli(ax);
        CHECK(max_abs(Eigen::MatrixXcd(
                  r - 0.5 * (kron(p, identity(2)) + kron(identity(2), p)))) == 0.0);
    }

    const Eigen::MatrixXcd v = triplet_isometry();
    CHECK(max_abs(Eigen::MatrixXcd(v.adjoint() * v - identity(3))) < 1e-15);
    CHECK(max_abs(Eigen::MatrixXcd(v * v.adjoint() - triplet_projector())) < 1e-15);
    // tr P = 3, P annihilates the singlet
    CHECK(std::abs(triplet_projector().trace().real() - 3.0) < 1e-14);

    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
        const Eigen::MatrixXcd rep = v.adjoint() * r_operator(ax) * v;
        CHECK(max_abs(Eigen::MatrixXcd(rep - spin_matrix(Spin::One, ax))) < 1e-15);
    }
}

TEST_CASE("q projectors resolve the identity and commute with pair spins") {
    const ExtendedLattice ext(Lattice({"u", "v"}, 3));
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(16, 16);
    const std::vector<SiteSet> supports = {{}, {"u"}, {"v"}, {"u", "v"}};
    for (const auto& sup : supports) {
        const auto q = q_projector(ext, sup);
        // projector, rank 3^{|support|}
        CHECK(max_abs(Eigen::MatrixXcd(q * q - q)) < 1e-14);
        CHECK(std::abs(q.trace().real() - std::pow(3.0, sup.size())) < 1e-12);
        CHECK(q_commutation_defect(ext, sup) < 1e-14);
        sum += q;
    }
    CHECK(max_abs(Eigen::MatrixXcd(sum - identity(16))) < 1e-13);
}

TEST_CASE("tilde Hamiltonian restricted to a sector keeps only interior terms") {
    const ExtendedLattice ext(Lattice({"u", "v", "w"}, 3));
    const CouplingSet cs{AxisPair::XZ,
                         {{{"u", "v"}, Axis::X, 1.0},
                          {{"v", "w"}, Axis::Z, 0.7},
                          {{"w"}, Axis::X, 0.4}}};
    CHECK(ham_in_subspace_residual(ext, cs, {"u", "v"}) < 1e-12);
    CHECK(ham_in_subspace_residual(ext, cs, {"u", "v", "w"}) < 1e-12);
    CHECK(ham_in_subspace_residual(ext, cs, {}) < 1e-12);
}

TEST_CASE("single-site tilde Hamiltonian has the pair-spin spectrum") {
    const ExtendedLattice ext(Lattice({"u"}, 3));
    const CouplingSet cs{AxisPair::XZ, {{{"u"}, Axis::X, 1.0}}};
    const auto h = build_tilde_hamiltonian(ext, cs);
    // -R^1 on C^2 x C^2: eigenvalues {-1, 0, 0, 1}
    const auto es = diagonalize(h);
    CHECK(es.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(es.eigenvalues(1)) < 1e-12);
    CHECK(std::abs(es.eigenvalues(2)) < 1e-12);
    CHECK(es.eigenvalues(3) == doctest::Approx(1.0).epsilon(1e-12));
    // axis-2 couplings are outside the representable pair
    const CouplingSet bad{AxisPair::XY, {{{"u"}, Axis::Y, 1.0}}};
    CHECK_THROWS(build_tilde_hamiltonian(ext, bad));
}

TEST_CASE("spin-1 observables agree between the direct and pair routes") {
    const Lattice base({"u", "v"}, 3);
    const CouplingSet cs{AxisPair::XZ,
                         {{{"u", "v"}, Axis::X, 1.1}, {{"u"}, Axis::Z, 0.6}}};
    const auto a = subset_product(base, {"u", "v"}, Axis::X);
    const auto rep = correspondence_check(base, cs, a, 1.4);
    CHECK(rep.spin_matrix_defect < 1e-14);
    CHECK(rep.residual < 1e-12);
    CHECK(rep.direct_value == doctest::Approx(rep.projected_value).epsilon(1e-10));
    // sanity: the ferromagnetic bond correlation is positive
    CHECK(rep.direct_value > 0.0);
}

TEST_CASE("strengthening a coupling strictly lowers the ground energy") {
    const ExtendedLattice ext(Lattice({"u", "v"}, 3));
    const CouplingSet cs{AxisPair::XZ,
                         {{{"u", "v"}, Axis::X, 1.0}, {{"v"}, Axis::Z, 0.3}}};
    for (double eps : {1e-3, 0.1}) {
        const auto rep = ground_energy_coupling_bump(ext, cs, {"u", "v"}, Axis::X, eps);
        CHECK(rep.margin > 0.0);
        CHECK(rep.energy_after == doctest::Approx(rep.energy_before - rep.margin));
        CHECK(rep.pf_min_entry >= 0.0);
        // second-order perturbation theory floor: margin >= ~eps^2 / (2 ||H||)
        CHECK(rep.margin > eps * eps * 1e-3);
    }

    // sigma bump on an admissible extended subset
    const auto rep = ground_energy_sigma_bump(ext, cs, {"u:1", "v:2"}, Axis::X, 0.05);
    CHECK(rep.margin > 0.0);
    CHECK(rep.pf_min_entry >= 0.0);

    // inadmissible subsets and transverse axes are rejected
    CHECK_THROWS(ground_energy_sigma_bump(ext, cs, {"u:1", "u:2"}, Axis::X, 0.05));
    CHECK_THROWS(ground_energy_sigma_bump(ext, cs, {"u:1"}, Axis::Y, 0.05));
}

TEST_CASE("the interacting ground space sits inside the triplet sector") {
    const Lattice base({"u", "v"}, 3);
    const CouplingSet cs{AxisPair::XZ,
                         {{{"u", "v"}, Axis::X, 1.0}, {{"u"}, Axis::Z, 0.4}}};
    const auto rep = ground_in_triplet_check(base, cs);
    CHECK(rep.excluded_sites.empty());
    CHECK(rep.residual < 1e-9);
    CHECK(rep.degeneracy >= 1);
    CHECK(rep.first_gap > 0.0);
}

TEST_CASE("uncoupled sites are excluded before the triplet membership check") {
    const Lattice base({"u", "v"}, 3);
    // only u carries a coupling; v's triplet/singlet sectors are degenerate
    const CouplingSet cs{AxisPair::XZ, {{{"u"}, Axis::X, 1.0}}};
    const auto rep = ground_in_triplet_check(base, cs);
    REQUIRE(rep.excluded_sites.size() == 1);
    CHECK(rep.excluded_sites[0] == "v");
    CHECK(rep.residual < 1e-9);
}

TEST_CASE("ground correlations agree between the spin-1 and decomposed routes") {
    const Lattice base({"u", "v"}, 3);
    const CouplingSet cs{AxisPair::XZ,
                         {{{"u", "v"}, Axis::X, 1.3}, {{"v"}, Axis::Z, 0.5}}};
    const auto rep =
        ground_truncated_correlation(base, cs, {"u"}, Axis::X, {"v"}, Axis::X);
    CHECK(rep.residual < 1e-9);
    CHECK(rep.direct == doctest::Approx(rep.decomposed).epsilon(1e-8));
    // ferromagnetic axis-1 ground correlation is nonnegative
    CHECK(rep.direct >= -1e-12);

    const auto cross =
        ground_truncated_correlation(base, cs, {"u"}, Axis::X, {"v"}, Axis::Z);
    CHECK(cross.residual < 1e-9);
    CHECK(cross.direct <= 1e-12);
}
