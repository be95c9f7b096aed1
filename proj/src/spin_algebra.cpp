#include "xycorr/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace xycorr {

Axis axis_from_int(int i) {
    switch (i) {
        case 1: return Axis::X;
        case 2: return Axis::Y;
        case 3: return Axis::Z;
        default: throw std::invalid_argument("axis must be 1, 2 or 3; got " + std::to_string(i));
    }
}

int axis_to_int(Axis a) {
    return static_cast<int>(a);
}

int local_dim(Spin s) {
    return s == Spin::Half ? 2 : 3;
}

Spin spin_for_dim(int dim) {
    if (dim == 2) return Spin::Half;
    if (dim == 3) return Spin::One;
    throw std::invalid_argument("unsupported local dimension " + std::to_string(dim) +
                                " (spin 1/2 and spin 1 only)");
}

Lattice::Lattice(std::vector<std::string> sites, int ldim)
    : sites_(std::move(sites)), local_dim_(ldim) {
    if (local_dim_ != 2 && local_dim_ != 3) {
        throw std::invalid_argument("lattice local dimension must be 2 or 3, got " +
                                    std::to_string(local_dim_));
    }
    if (sites_.empty()) {
        throw std::invalid_argument("lattice must have at least one site");
    }
    std::set<std::string> seen;
    for (const auto& s : sites_) {
        if (!seen.insert(s).second) {
            throw std::invalid_argument("duplicate site label '" + s + "'");
        }
    }
    // The lattice itself is bookkeeping and may exceed the dense-matrix cap
    // (e.g. an enlarged volume whose operators are never materialized); the
    // cap is enforced wherever a lat.dim()-sized matrix is actually built.
    if (sites_.size() > 36) {
        throw std::invalid_argument("lattice too large: " + std::to_string(sites_.size()) +
                                    " sites");
    }
    dim_ = 1;
    for (std::size_t k = 0; k < sites_.size(); ++k) {
        dim_ *= local_dim_;
    }
}

bool Lattice::contains(const std::string& site) const {
    return std::find(sites_.begin(), sites_.end(), site) != sites_.end();
}

int Lattice::index_of(const std::string& site) const {
    const auto it = std::find(sites_.begin(), sites_.end(), site);
    if (it == sites_.end()) {
        throw std::invalid_argument("unknown site '" + site + "'");
    }
    return static_cast<int>(it - sites_.begin());
}

SiteSet canonical_subset(SiteSet sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return sites;
}

Eigen::MatrixXcd pauli(Axis axis) {
    Eigen::MatrixXcd m(2, 2);
    const cplx i{0.0, 1.0};
    switch (axis) {
        case Axis::X: m << 0, 1, 1, 0; break;
        case Axis::Y: m << 0, -i, i, 0; break;
        case Axis::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

Eigen::MatrixXcd spin_matrix(Spin s, Axis axis) {
    if (s == Spin::Half) {
        return 0.5 * pauli(axis);
    }
    // Spin 1 in the descending-m eigenbasis of S^3.
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    Eigen::MatrixXcd m(3, 3);
    switch (axis) {
        case Axis::X:
            m << 0, r, 0, r, 0, r, 0, r, 0;
            break;
        case Axis::Y:
            m << 0, -i * r, 0, i * r, 0, -i * r, 0, i * r, 0;
            break;
        case Axis::Z:
            m << 1, 0, 0, 0, 0, 0, 0, 0, -1;
            break;
    }
    return m;
}

Eigen::MatrixXcd embed_site(const Eigen::MatrixXcd& op, const std::string& site, const Lattice& lat) {
    require_square(op, "embed_site");
    if (op.rows() != lat.local_dim()) {
        throw std::invalid_argument("embed_site: operator dimension " + std::to_string(op.rows()) +
                                    " does not match local dimension " +
                                    std::to_string(lat.local_dim()));
    }
    require_within_cap(lat.dim(), "embed_site");
    const int pos = lat.index_of(site);
    const int n = lat.size();
    const auto d = static_cast<Eigen::Index>(lat.local_dim());
    Eigen::Index pre = 1, post = 1;
    for (int k = 0; k < pos; ++k) pre *= d;
    for (int k = pos + 1; k < n; ++k) post *= d;
    return kron(kron(identity(pre), op), identity(post));
}

Eigen::MatrixXcd subset_product(const Lattice& lat, const SiteSet& subset, Axis axis) {
    require_within_cap(lat.dim(), "subset_product");
    Eigen::MatrixXcd out = identity(lat.dim());
    const Eigen::MatrixXcd s = spin_matrix(lat.spin(), axis);
    for (const auto& site : canonical_subset(subset)) {
        out = out * embed_site(s, site, lat);
    }
    return out;
}

Eigen::MatrixXcd pauli_subset_product(const Lattice& lat, const SiteSet& subset, Axis axis) {
    if (lat.local_dim() != 2) {
        throw std::invalid_argument("pauli_subset_product: spin-1/2 lattice required");
    }
    require_within_cap(lat.dim(), "pauli_subset_product");
    Eigen::MatrixXcd out = identity(lat.dim());
    const Eigen::MatrixXcd s = pauli(axis);
    for (const auto& site : canonical_subset(subset)) {
        out = out * embed_site(s, site, lat);
    }
    return out;
}

}  // namespace xycorr
