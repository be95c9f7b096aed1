#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>

namespace xycorr {

using cplx = std::complex<double>;

/// Largest entrywise absolute value; 0 for empty matrices.
double max_abs(const Eigen::MatrixXcd& m);

/// max |M - M^dagger| over all entries.
double hermiticity_defect(const Eigen::MatrixXcd& m);

/// Entrywise check against 1e-12 * max(1, max|M|).
bool is_hermitian(const Eigen::MatrixXcd& m);

/// Throws std::invalid_argument naming `what` if the check fails.
void require_hermitian(const Eigen::MatrixXcd& m, const std::string& what);

void require_square(const Eigen::MatrixXcd& m, const std::string& what);

/// Throws if |imag(z)| > tol, else returns the real part.
double require_real(cplx z, double tol, const std::string& what);

/// Kronecker product, row-major factor convention: (A ⊗ B)[i*p+k][j*q+l] = A[i][j] B[k][l].
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

Eigen::MatrixXcd identity(Eigen::Index dim);

/// Hilbert-space dimension guard. Default 2^14, overridable via XYCORR_DIM_CAP.
std::int64_t dimension_cap();

/// Throws std::invalid_argument if dim exceeds the cap.
void require_within_cap(std::int64_t dim, const std::string& what);

}  // namespace xycorr
