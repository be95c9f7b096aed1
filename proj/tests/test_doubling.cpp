#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "xycorr/doubling.hpp"
#include "xycorr/hamiltonian.hpp"
#include "xycorr/linalg.hpp"
#include "xycorr/spin_algebra.hpp"

using namespace xycorr;

TEST_CASE("lift builds symmetric and antisymmetric copies") {
    const auto sx = spin_matrix(Spin::Half, Axis::X);
    const auto plus = lift(sx, +1);
    const auto minus = lift(sx, -1);
    CHECK(max_abs(Eigen::MatrixXcd(plus - kron(sx, identity(2)) - kron(identity(2), sx))) == 0.0);
    CHECK(max_abs(Eigen::MatrixXcd(minus - kron(sx, identity(2)) + kron(identity(2), sx))) == 0.0);
    CHECK_THROWS(lift(sx, 0));
    CHECK_THROWS(lift(sx, 2));
}

TEST_CASE("lifted product rule holds for arbitrary matrices") {
    Eigen::MatrixXcd a(2, 2), b(2, 2);
    a << cplx(0.3, 0.1), cplx(-1.0, 0.4), cplx(2.0, 0.0), cplx(0.0, -0.7);
    b << cplx(1.1, 0.0), cplx(0.2, 0.9), cplx(-0.5, 0.3), cplx(0.8, 0.0);
    CHECK(lifted_product_residual(a, b, +1) < 1e-15);
    CHECK(lifted_product_residual(a, b, -1) < 1e-15);
    // spelled out for sign = +1: (ab)_+ = (1/2) a_+ b_+ + (1/2) a_- b_-
    const Eigen::MatrixXcd lhs = lift(a * b, +1);
    const Eigen::MatrixXcd rhs =
        0.5 * lift(a, +1) * lift(b, +1) + 0.5 * lift(a, -1) * lift(b, -1);
    CHECK(max_abs(Eigen::MatrixXcd(lhs - rhs)) < 1e-15);
}

TEST_CASE("truncation identity on a two-site interacting pair") {
    const Lattice pair({"a", "b"}, 2);
    const CouplingSet cs{AxisPair::XY,
                         {{{"a", "b"}, Axis::X, 1.3},
                          {{"a", "b"}, Axis::Y, 0.4},
                          {{"a"}, Axis::X, 0.2}}};
    const auto h = build_hamiltonian(pair, cs);
    const auto a = subset_product(pair, {"a"}, Axis::X);
    const auto b = subset_product(pair, {"a", "b"}, Axis::X);
    for (double s : {0.0, 0.2, 0.5, 1.0}) {
        const auto id = doubled_truncation_identity(h, a, b, 1.8, s);
        CHECK(id.residual < 1e-13);
        CHECK(id.residual == doctest::Approx(std::abs(id.single_copy - id.doubled)));
        // cross-check one side directly
        const GibbsState state(h, 1.8);
        CHECK(id.single_copy ==
              doctest::Approx(state.truncated_schwinger_real(a, b, s)).epsilon(1e-12));
    }
}

TEST_CASE("pair basis is orthogonal and its scaled form is integral") {
    const Eigen::MatrixXd u = ginibre_pair_basis();
    CHECK(max_abs(Eigen::MatrixXcd((u.transpose() * u - Eigen::MatrixXd::Identity(4, 4))
                                       .cast<cplx>())) < 1e-15);
    const Eigen::MatrixXd n = ginibre_pair_basis_scaled();
    CHECK(max_abs(Eigen::MatrixXcd((n - std::sqrt(2.0) * u).cast<cplx>())) < 1e-15);
    CHECK(max_abs(Eigen::MatrixXcd((n.transpose() * n - 2.0 * Eigen::MatrixXd::Identity(4, 4))
                                       .cast<cplx>())) == 0.0);
    for (Eigen::Index r = 0; r < 4; ++r)
        for (Eigen::Index c = 0; c < 4; ++c) {
            const double v = n(r, c);
            CHECK((v == 0.0 || v == 1.0 || v == -1.0));
        }
}

TEST_CASE("single-site lifted spins have exact sign-definite tables") {
    const Lattice one({"x"}, 2);
    const auto sx = spin_matrix(Spin::Half, Axis::X);
    const auto sz = spin_matrix(Spin::Half, Axis::Z);

    // the four generators certified nonnegative: S^x_+, S^x_-, S^z_+, -S^z_-
    const Eigen::MatrixXcd gens[] = {lift(sx, +1), lift(sx, -1), lift(sz, +1), -lift(sz, -1)};
    for (const auto& g : gens) {
        // the two half-weighted copies add coherently: entries are exactly 0 or 1
        const Eigen::MatrixXd t = to_ginibre_basis(g, 1);
        for (Eigen::Index r = 0; r < 4; ++r)
            for (Eigen::Index c = 0; c < 4; ++c) {
                CHECK((t(r, c) == 0.0 || t(r, c) == 1.0));
            }
        const auto rep = ginibre_entry_report(g, 1);
        CHECK(rep.min_entry == 0.0);
        CHECK(rep.max_entry == 1.0);
    }

    // the remaining lifted generator picks up sign -1 entries: S^z_- swaps
    // q+ and q- with a flip, so its table is {0, -1}
    const Eigen::MatrixXd tzm = to_ginibre_basis(lift(sz, -1), 1);
    CHECK(tzm.minCoeff() == -1.0);
    CHECK(tzm.maxCoeff() == 0.0);

    // the basis change refuses genuinely complex input
    const auto sy = spin_matrix(Spin::Half, Axis::Y);
    CHECK_THROWS(to_ginibre_basis(lift(sy, +1), 1));
    (void)one;
}

TEST_CASE("pair interleave permutation reorders copy-major indices site by site") {
    // one site: identity on {0..3}
    const auto p1 = pair_interleave_permutation(1);
    REQUIRE(p1.size() == 4);
    for (Eigen::Index k = 0; k < 4; ++k) CHECK(p1[static_cast<std::size_t>(k)] == k);

    // two sites: doubled index i*4 + j with i = 2*i0 + i1, j = 2*j0 + j1 maps to
    // pair-major index ((i0*2 + j0)*2 + i1)*2 + j1
    const auto p2 = pair_interleave_permutation(2);
    REQUIRE(p2.size() == 16);
    for (int i0 = 0; i0 < 2; ++i0)
        for (int i1 = 0; i1 < 2; ++i1)
            for (int j0 = 0; j0 < 2; ++j0)
                for (int j1 = 0; j1 < 2; ++j1) {
                    const int src = (2 * i0 + i1) * 4 + (2 * j0 + j1);
                    const int dst = ((i0 * 2 + j0) * 2 + i1) * 2 + j1;
                    CHECK(p2[static_cast<std::size_t>(src)] == dst);
                }
    // it is a permutation
    std::vector<bool> seen(16, false);
    for (auto v : p2) {
        CHECK(!seen[static_cast<std::size_t>(v)]);
        seen[static_cast<std::size_t>(v)] = true;
    }
}

TEST_CASE("doubled Hamiltonian of an axis-(1,3) model is entrywise nonpositive-free") {
    // -H_+ in the per-site basis must have no negative entries
    const Lattice pair({"a", "b"}, 2);
    const CouplingSet cs{AxisPair::XZ,
                         {{{"a", "b"}, Axis::X, 0.9},
                          {{"a", "b"}, Axis::Z, 0.5},
                          {{"b"}, Axis::X, 0.3},
                          {{"a"}, Axis::Z, 0.7}}};
    const auto hd = build_doubled_hamiltonian(pair, cs);
    const auto rep = ginibre_entry_report(-hd, 2);
    CHECK(rep.min_entry >= -1e-14);
    CHECK(rep.max_entry > 0.0);
}

TEST_CASE("doubled spectrum is the pairwise sum of the single spectrum") {
    const Lattice one({"x"}, 2);
    const CouplingSet cs{AxisPair::XY, {{{"x"}, Axis::X, 1.0}}};
    const auto hd = build_doubled_hamiltonian(one, cs);
    const auto es = diagonalize(hd);
    // single spectrum {-1/2, 1/2} -> doubled {-1, 0, 0, 1}
    CHECK(es.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(es.eigenvalues(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(es.eigenvalues(2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(es.eigenvalues(3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("basis conjugation preserves the spectrum") {
    const Lattice pair({"a", "b"}, 2);
    const CouplingSet cs{AxisPair::XZ,
                         {{{"a", "b"}, Axis::X, 1.1}, {{"a"}, Axis::Z, 0.6}}};
    const auto hd = build_doubled_hamiltonian(pair, cs);
    const Eigen::MatrixXd g = to_ginibre_basis(hd, 2);
    const auto es0 = diagonalize(hd);
    const auto es1 = diagonalize(g.cast<cplx>());
    CHECK(max_abs(Eigen::MatrixXcd((es0.eigenvalues - es1.eigenvalues).cast<cplx>())) < 1e-10);
}
