#include "xycorr/generator.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace xycorr {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t attempt) {
    // splitmix64 finalizer over a linear combination of the inputs; one extra
    // round so that nearby (trial, attempt) pairs land far apart.
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1)) ^
                      (0xC2B2AE3D27D4EB4FULL * (attempt + 1));
    for (int round = 0; round < 2; ++round) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
    }
    return z;
}

std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t span = hi - lo + 1;  // span == 0 means the full 2^64 range
    if (span == 0) return eng();
    // Rejection sampling keeps the draw exactly uniform and, unlike
    // std::uniform_int_distribution, identical across standard libraries.
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t draw = eng();
    while (draw >= limit) draw = eng();
    return lo + draw % span;
}

double uniform_real(std::mt19937_64& eng, double lo, double hi) {
    const double unit = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

SiteSet random_subset(std::mt19937_64& eng, const Lattice& lat, int k) {
    const int n = lat.size();
    if (k < 0 || k > n) throw std::invalid_argument("random_subset: size out of range");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = uniform_index(eng, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(n - 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    SiteSet out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out.push_back(lat.sites()[static_cast<std::size_t>(idx[i])]);
    return canonical_subset(std::move(out));
}

namespace {

std::vector<std::string> default_site_labels(int n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
    return labels;
}

Axis pick_axis(std::mt19937_64& eng, AxisPair pair) {
    const auto [first, second] = axes_of(pair);
    return uniform_index(eng, 0, 1) == 0 ? first : second;
}

CouplingSet merge_terms(AxisPair pair,
                        const std::vector<std::tuple<SiteSet, Axis, double>>& raw) {
    std::map<std::pair<SiteSet, int>, double> merged;
    for (const auto& [subset, axis, strength] : raw) {
        merged[{subset, axis_to_int(axis)}] += strength;
    }
    CouplingSet cs;
    cs.axis_pair = pair;
    for (const auto& [key, strength] : merged) {
        cs.couplings.push_back(Coupling{key.first, axis_from_int(key.second), strength});
    }
    return cs;
}

double pick_grid_value(std::mt19937_64& eng, const std::vector<double>& grid,
                       double fallback) {
    if (grid.empty()) return fallback;
    return grid[uniform_index(eng, 0, grid.size() - 1)];
}

}  // namespace

RandomInstance generate_instance(const CampaignConfig& cfg, std::uint64_t trial,
                                 std::uint64_t attempt) {
    const std::uint64_t sub_seed = mix_seed(cfg.seed, trial, attempt);
    std::mt19937_64 eng(sub_seed);

    if (cfg.model) {
        Lattice lat(cfg.model->sites, cfg.model->local_dim);
        const int n = lat.size();
        const int ka = static_cast<int>(uniform_index(eng, 1, std::min(3, n)));
        const int kb = static_cast<int>(uniform_index(eng, 1, std::min(3, n)));
        RandomInstance inst{std::move(lat),
                            cfg.model->couplings,
                            {},
                            {},
                            pick_grid_value(eng, cfg.beta_grid, 1.0),
                            pick_grid_value(eng, cfg.s_grid, 0.0),
                            sub_seed};
        inst.subset_a = random_subset(eng, inst.lattice, ka);
        inst.subset_b = random_subset(eng, inst.lattice, kb);
        return inst;
    }

    const int n_max = cfg.sites;
    const int n_min = std::min(2, n_max);
    const int n = static_cast<int>(uniform_index(eng, static_cast<std::uint64_t>(n_min),
                                                 static_cast<std::uint64_t>(n_max)));
    Lattice lat(default_site_labels(n), 2);

    const int terms = static_cast<int>(uniform_index(eng, 1, static_cast<std::uint64_t>(n + 2)));
    std::vector<std::tuple<SiteSet, Axis, double>> raw;
    raw.reserve(static_cast<std::size_t>(terms));
    for (int t = 0; t < terms; ++t) {
        const int k = static_cast<int>(
            uniform_index(eng, 1, static_cast<std::uint64_t>(std::min(cfg.max_subset_size, n))));
        raw.emplace_back(random_subset(eng, lat, k), pick_axis(eng, cfg.axis_pair),
                         uniform_real(eng, 0.0, cfg.strength_max));
    }

    RandomInstance inst{std::move(lat),
                        merge_terms(cfg.axis_pair, raw),
                        {},
                        {},
                        pick_grid_value(eng, cfg.beta_grid, 1.0),
                        pick_grid_value(eng, cfg.s_grid, 0.0),
                        sub_seed};
    const int ka = static_cast<int>(uniform_index(eng, 1, static_cast<std::uint64_t>(std::min(3, n))));
    const int kb = static_cast<int>(uniform_index(eng, 1, static_cast<std::uint64_t>(std::min(3, n))));
    inst.subset_a = random_subset(eng, inst.lattice, ka);
    inst.subset_b = random_subset(eng, inst.lattice, kb);
    return inst;
}

RandomInstance generate_spin_one_instance(const CampaignConfig& cfg, std::uint64_t trial,
                                          std::uint64_t attempt) {
    const std::uint64_t sub_seed = mix_seed(cfg.seed, trial, attempt);
    std::mt19937_64 eng(sub_seed);

    const int n_max = std::min(cfg.sites, 3);
    const int n_min = std::min(2, n_max);
    const int n = static_cast<int>(uniform_index(eng, static_cast<std::uint64_t>(n_min),
                                                 static_cast<std::uint64_t>(n_max)));
    Lattice lat(default_site_labels(n), 3);

    // Strengths live in [0.25, max(0.5, strength_max)]: bounded away from zero
    // so that every coupled site is genuinely coupled, which the ground-state
    // correspondence checks assume.
    const double lo = 0.25;
    const double hi = std::max(0.5, cfg.strength_max);

    const int terms = static_cast<int>(uniform_index(eng, 1, static_cast<std::uint64_t>(n + 1)));
    std::vector<std::tuple<SiteSet, Axis, double>> raw;
    for (int t = 0; t < terms; ++t) {
        const int k = static_cast<int>(
            uniform_index(eng, 1, static_cast<std::uint64_t>(std::min(cfg.max_subset_size, n))));
        raw.emplace_back(random_subset(eng, lat, k), pick_axis(eng, AxisPair::XZ),
                         uniform_real(eng, lo, hi));
    }
    // Patch any uncoupled site with a single-site longitudinal field.
    std::vector<bool> covered(static_cast<std::size_t>(n), false);
    for (const auto& [subset, axis, strength] : raw) {
        (void)axis;
        (void)strength;
        for (const auto& site : subset) covered[static_cast<std::size_t>(lat.index_of(site))] = true;
    }
    for (int i = 0; i < n; ++i) {
        if (!covered[static_cast<std::size_t>(i)]) {
            raw.emplace_back(SiteSet{lat.sites()[static_cast<std::size_t>(i)]}, Axis::X,
                             uniform_real(eng, lo, hi));
        }
    }

    RandomInstance inst{std::move(lat),
                        merge_terms(AxisPair::XZ, raw),
                        {},
                        {},
                        pick_grid_value(eng, cfg.beta_grid, 1.0),
                        pick_grid_value(eng, cfg.s_grid, 0.0),
                        sub_seed};
    const int ka = static_cast<int>(uniform_index(eng, 1, static_cast<std::uint64_t>(n)));
    const int kb = static_cast<int>(uniform_index(eng, 1, static_cast<std::uint64_t>(n)));
    inst.subset_a = random_subset(eng, inst.lattice, ka);
    inst.subset_b = random_subset(eng, inst.lattice, kb);
    return inst;
}

std::string describe_instance(const RandomInstance& inst) {
    std::ostringstream out;
    out << inst.lattice.size() << " sites (d=" << inst.lattice.local_dim() << "), "
        << inst.couplings.couplings.size() << " terms, |A|=" << inst.subset_a.size()
        << ", |B|=" << inst.subset_b.size() << ", beta=" << inst.beta << ", s=" << inst.s;
    return out.str();
}

}  // namespace xycorr
