#include "xycorr/doubling.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace xycorr {

namespace {

void require_sign(int sign, const char* what) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument(std::string(what) + ": sign must be +1 or -1");
    }
}

}  // namespace

Eigen::MatrixXcd lift(const Eigen::MatrixXcd& a, int sign) {
    require_sign(sign, "lift");
    require_square(a, "lift");
    const Eigen::Index d = a.rows();
    require_within_cap(static_cast<std::int64_t>(d) * d, "lift");
    const Eigen::MatrixXcd one = identity(d);
    return kron(a, one) + static_cast<double>(sign) * kron(one, a);
}

DoublingIdentity doubled_truncation_identity(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& a,
                                             const Eigen::MatrixXcd& b, double beta, double s) {
    const GibbsState single(h, beta);
    DoublingIdentity out;
    out.single_copy = require_real(single.truncated_schwinger(a, b, s), 1e-9,
                                   "doubled_truncation_identity: single copy");

    const GibbsState doubled(build_doubled_hamiltonian(h), beta);
    const cplx rhs = 0.5 * doubled.schwinger(lift(a, -1), lift(b, -1), s);
    out.doubled = require_real(rhs, 1e-9, "doubled_truncation_identity: doubled copy");
    out.residual = std::abs(out.single_copy - out.doubled);
    return out;
}

double lifted_product_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, int sign) {
    require_sign(sign, "lifted_product_residual");
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("lifted_product_residual: operand shapes differ");
    }
    const Eigen::MatrixXcd lhs = lift(a * b, sign);
    const Eigen::MatrixXcd rhs =
        0.5 * (lift(a, 1) * lift(b, sign) + lift(a, -1) * lift(b, -sign));
    return max_abs(lhs - rhs);
}

Eigen::MatrixXd ginibre_pair_basis_scaled() {
    // Columns p+, q+, p-, q- over the product basis (++, +-, -+, --):
    //   p+- = (|++> +- |-->)/sqrt(2),   q+- = (|-+> +- |+->)/sqrt(2).
    Eigen::MatrixXd n(4, 4);
    n << 1, 0, 1, 0,   //  ++
        0, 1, 0, -1,   //  +-
        0, 1, 0, 1,    //  -+
        1, 0, -1, 0;   //  --
    return n;
}

Eigen::MatrixXd ginibre_pair_basis() {
    return ginibre_pair_basis_scaled() / std::sqrt(2.0);
}

std::vector<Eigen::Index> pair_interleave_permutation(int nsites) {
    if (nsites < 1 || nsites > 30) {
        throw std::invalid_argument("pair_interleave_permutation: nsites out of range");
    }
    const Eigen::Index d = Eigen::Index{1} << nsites;
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(d) * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            Eigen::Index paired = 0;
            for (int x = 0; x < nsites; ++x) {
                const Eigen::Index bi = (i >> (nsites - 1 - x)) & 1;
                const Eigen::Index bj = (j >> (nsites - 1 - x)) & 1;
                paired = (paired << 2) | (bi << 1) | bj;
            }
            perm[static_cast<std::size_t>(i * d + j)] = paired;
        }
    }
    return perm;
}

Eigen::MatrixXd to_ginibre_basis(const Eigen::MatrixXcd& m, int nsites) {
    require_square(m, "to_ginibre_basis");
    const Eigen::Index paired_dim = Eigen::Index{1} << (2 * nsites);
    if (m.rows() != paired_dim) {
        std::ostringstream msg;
        msg << "to_ginibre_basis: operator dimension " << m.rows() << " does not match 4^"
            << nsites;
        throw std::invalid_argument(msg.str());
    }
    const double scale = std::max(1.0, max_abs(m));
    if (m.imag().cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument(
            "to_ginibre_basis: operator has nonreal entries; only axis-(1,3) operators are "
            "representable in this basis");
    }
    const Eigen::MatrixXd real = m.real();

    const auto perm = pair_interleave_permutation(nsites);
    Eigen::MatrixXd paired(paired_dim, paired_dim);
    for (Eigen::Index r = 0; r < paired_dim; ++r) {
        for (Eigen::Index c = 0; c < paired_dim; ++c) {
            paired(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]) =
                real(r, c);
        }
    }

    Eigen::MatrixXd transform = ginibre_pair_basis_scaled();
    for (int x = 1; x < nsites; ++x) {
        transform = kron(transform, ginibre_pair_basis_scaled());
    }
    // The scaled basis is sqrt(2)^{nsites} times orthonormal, so conjugating
    // and dividing by 2^{nsites} is the exact change of basis.
    const double norm = std::ldexp(1.0, -nsites);
    return norm * (transform.transpose() * paired * transform);
}

GinibreEntryReport ginibre_entry_report(const Eigen::MatrixXcd& m, int nsites) {
    const Eigen::MatrixXd g = to_ginibre_basis(m, nsites);
    GinibreEntryReport report;
    report.min_entry = g.minCoeff();
    report.max_entry = g.maxCoeff();
    return report;
}

}  // namespace xycorr
