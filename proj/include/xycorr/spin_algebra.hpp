#pragma once

#include "xycorr/linalg.hpp"

#include <string>
#include <vector>

namespace xycorr {

/// Spin direction index, 1/2/3 in the usual convention.
enum class Axis : int { X = 1, Y = 2, Z = 3 };

Axis axis_from_int(int i);
int axis_to_int(Axis a);

enum class Spin { Half, One };

int local_dim(Spin s);
Spin spin_for_dim(int dim);

/// Finite ordered set of site labels; the ordering fixes the tensor factor order
/// of the product Hilbert space, and every module uses the same ordering.
class Lattice {
public:
    Lattice(std::vector<std::string> sites, int local_dim);

    int size() const { return static_cast<int>(sites_.size()); }
    int local_dim() const { return local_dim_; }
    std::int64_t dim() const { return dim_; }
    const std::vector<std::string>& sites() const { return sites_; }
    Spin spin() const { return spin_for_dim(local_dim_); }

    bool contains(const std::string& site) const;
    /// Throws std::invalid_argument for unknown labels.
    int index_of(const std::string& site) const;

private:
    std::vector<std::string> sites_;
    int local_dim_;
    std::int64_t dim_;
};

/// A set of site labels, kept sorted and duplicate-free.
using SiteSet = std::vector<std::string>;

SiteSet canonical_subset(SiteSet sites);

/// The 2x2 Pauli matrix for the given axis.
Eigen::MatrixXcd pauli(Axis axis);

/// Spin operator S^axis on C^{2S+1}. S=1 uses the S^3 eigenbasis ordered by
/// descending eigenvalue (+1, 0, -1).
Eigen::MatrixXcd spin_matrix(Spin s, Axis axis);

/// op at the tensor factor of site x, identity on all other factors.
Eigen::MatrixXcd embed_site(const Eigen::MatrixXcd& op, const std::string& site, const Lattice& lat);

/// Product over the subset of single-site spin operators S_x^axis; empty subset
/// gives the identity. Factors commute, so the subset order is irrelevant.
Eigen::MatrixXcd subset_product(const Lattice& lat, const SiteSet& subset, Axis axis);

/// Same product built from Pauli matrices (sigma = 2S on spin-1/2 lattices).
Eigen::MatrixXcd pauli_subset_product(const Lattice& lat, const SiteSet& subset, Axis axis);

}  // namespace xycorr
