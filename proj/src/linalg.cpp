#include "xycorr/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace xycorr {

double max_abs(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    return max_abs(m - m.adjoint());
}

bool is_hermitian(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) return false;
    return hermiticity_defect(m) <= 1e-12 * std::max(1.0, max_abs(m));
}

void require_hermitian(const Eigen::MatrixXcd& m, const std::string& what) {
    require_square(m, what);
    if (!is_hermitian(m)) {
        throw std::invalid_argument(what + ": matrix is not Hermitian (defect " +
                                    std::to_string(hermiticity_defect(m)) + ")");
    }
}

void require_square(const Eigen::MatrixXcd& m, const std::string& what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(what + ": matrix is not square (" + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) + ")");
    }
}

double require_real(cplx z, double tol, const std::string& what) {
    if (std::abs(z.imag()) > tol) {
        throw std::runtime_error(what + ": imaginary part " + std::to_string(z.imag()) +
                                 " exceeds tolerance " + std::to_string(tol));
    }
    return z.real();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::MatrixXcd identity(Eigen::Index dim) {
    return Eigen::MatrixXcd::Identity(dim, dim);
}

std::int64_t dimension_cap() {
    if (const char* env = std::getenv("XYCORR_DIM_CAP")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return std::int64_t{1} << 14;
}

void require_within_cap(std::int64_t dim, const std::string& what) {
    const auto cap = dimension_cap();
    if (dim > cap) {
        throw std::invalid_argument(what + ": Hilbert-space dimension " + std::to_string(dim) +
                                    " exceeds the cap " + std::to_string(cap) +
                                    " (override with XYCORR_DIM_CAP)");
    }
}

}  // namespace xycorr
