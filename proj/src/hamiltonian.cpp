#include "xycorr/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace xycorr {

std::pair<Axis, Axis> axes_of(AxisPair p) {
    return p == AxisPair::XY ? std::pair{Axis::X, Axis::Y} : std::pair{Axis::X, Axis::Z};
}

bool pair_contains(AxisPair p, Axis a) {
    const auto [a1, a2] = axes_of(p);
    return a == a1 || a == a2;
}

AxisPair axis_pair_from_string(const std::string& s) {
    if (s == "12" || s == "xy" || s == "XY") return AxisPair::XY;
    if (s == "13" || s == "xz" || s == "XZ") return AxisPair::XZ;
    throw std::invalid_argument("axis pair must be '12' or '13', got '" + s + "'");
}

std::string to_string(AxisPair p) {
    return p == AxisPair::XY ? "12" : "13";
}

namespace {

std::string subset_label(const SiteSet& subset) {
    std::string out = "{";
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) out += ",";
        out += subset[i];
    }
    return out + "}";
}

}  // namespace

void validate_coupling_set(const CouplingSet& cs, const Lattice& lat, bool allow_negative) {
    std::set<std::pair<SiteSet, int>> keys;
    for (const auto& c : cs.couplings) {
        if (c.subset.empty()) {
            throw std::invalid_argument("coupling subset must be nonempty");
        }
        const SiteSet canon = canonical_subset(c.subset);
        if (canon.size() != c.subset.size()) {
            throw std::invalid_argument("coupling subset " + subset_label(c.subset) +
                                        " has repeated sites");
        }
        for (const auto& s : canon) {
            if (!lat.contains(s)) {
                throw std::invalid_argument("coupling subset " + subset_label(c.subset) +
                                            " names site '" + s + "' outside the lattice");
            }
        }
        if (!pair_contains(cs.axis_pair, c.axis)) {
            throw std::invalid_argument("coupling on subset " + subset_label(c.subset) +
                                        " uses axis " + std::to_string(axis_to_int(c.axis)) +
                                        " outside the declared pair (" + to_string(cs.axis_pair) +
                                        ")");
        }
        if (!allow_negative && c.strength < 0.0) {
            throw std::invalid_argument(
                "coupling on subset " + subset_label(c.subset) + " axis " +
                std::to_string(axis_to_int(c.axis)) + " has negative strength " +
                std::to_string(c.strength) + "; coupling constants must be nonnegative");
        }
        if (!std::isfinite(c.strength)) {
            throw std::invalid_argument("coupling strength must be finite");
        }
        if (!keys.insert({canon, axis_to_int(c.axis)}).second) {
            throw std::invalid_argument("duplicate coupling key on subset " +
                                        subset_label(c.subset));
        }
    }
}

CouplingSet to_axis_pair_xz(const CouplingSet& cs) {
    if (cs.axis_pair == AxisPair::XZ) return cs;
    CouplingSet out;
    out.axis_pair = AxisPair::XZ;
    out.couplings = cs.couplings;
    for (auto& c : out.couplings) {
        if (c.axis == Axis::Y) c.axis = Axis::Z;
    }
    return out;
}

BoundaryGeometry::BoundaryGeometry(Lattice inner_lat, Lattice enlarged_lat, int r)
    : inner(std::move(inner_lat)), enlarged(std::move(enlarged_lat)), range(r) {
    if (inner.local_dim() != 2 || enlarged.local_dim() != 2) {
        throw std::invalid_argument("boundary geometries are spin-1/2 only");
    }
    if (range < 0) {
        throw std::invalid_argument("interaction range must be >= 0");
    }
    for (const auto& s : inner.sites()) {
        if (!enlarged.contains(s)) {
            throw std::invalid_argument("inner site '" + s + "' missing from the enlarged volume");
        }
    }
}

SiteSet BoundaryGeometry::boundary() const {
    SiteSet out;
    for (const auto& s : enlarged.sites()) {
        if (!inner.contains(s)) out.push_back(s);
    }
    return out;
}

Eigen::MatrixXcd build_hamiltonian(const Lattice& lat, const CouplingSet& cs, bool allow_negative) {
    validate_coupling_set(cs, lat, allow_negative);
    require_within_cap(lat.dim(), "build_hamiltonian");
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(lat.dim(), lat.dim());
    for (const auto& c : cs.couplings) {
        h -= c.strength * subset_product(lat, canonical_subset(c.subset), c.axis);
    }
    return h;
}

Eigen::MatrixXcd build_boundary_hamiltonian(const BoundaryGeometry& geom, const CouplingSet& cs,
                                            double eta) {
    if (eta < 0.0) {
        throw std::invalid_argument("boundary field eta must be >= 0, got " + std::to_string(eta));
    }
    Eigen::MatrixXcd h = build_hamiltonian(geom.enlarged, cs);
    const Eigen::MatrixXcd sx = spin_matrix(Spin::Half, Axis::X);
    for (const auto& site : geom.boundary()) {
        h -= eta * embed_site(sx, site, geom.enlarged);
    }
    return h;
}

Eigen::MatrixXcd build_plus_hamiltonian(const BoundaryGeometry& geom, const CouplingSet& cs) {
    validate_coupling_set(cs, geom.enlarged);
    const Lattice& inner = geom.inner;
    require_within_cap(inner.dim(), "build_plus_hamiltonian");
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(inner.dim(), inner.dim());
    for (const auto& c : cs.couplings) {
        const SiteSet subset = canonical_subset(c.subset);
        SiteSet in_part, boundary_part;
        for (const auto& s : subset) {
            (inner.contains(s) ? in_part : boundary_part).push_back(s);
        }
        if (boundary_part.empty()) {
            h -= c.strength * subset_product(inner, in_part, c.axis);
        } else if (c.axis == Axis::X) {
            // Projection onto the maximal S^1 boundary eigenstates halves each
            // boundary factor; transverse crossing terms vanish entirely.
            const double weight = std::pow(0.5, static_cast<double>(boundary_part.size()));
            h -= weight * c.strength * subset_product(inner, in_part, c.axis);
        }
    }
    return h;
}

Eigen::MatrixXcd build_doubled_hamiltonian(const Eigen::MatrixXcd& h) {
    require_square(h, "build_doubled_hamiltonian");
    const Eigen::Index d = h.rows();
    require_within_cap(static_cast<std::int64_t>(d) * d, "build_doubled_hamiltonian");
    const Eigen::MatrixXcd one = identity(d);
    return kron(h, one) + kron(one, h);
}

Eigen::MatrixXcd build_doubled_hamiltonian(const Lattice& lat, const CouplingSet& cs) {
    return build_doubled_hamiltonian(build_hamiltonian(lat, cs));
}

}  // namespace xycorr
