#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xycorr/config.hpp"
#include "xycorr/hamiltonian.hpp"
#include "xycorr/spin_algebra.hpp"

namespace xycorr {

// Deterministic per-trial seed derivation.  Every trial of a campaign draws
// from its own engine seeded by mix_seed(campaign_seed, trial, attempt), so
// results are independent of scheduling order and of how many worker threads
// run the campaign.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t attempt);

// One randomly drawn model instance plus the observables and parameters a
// trial will probe.  subset_a / subset_b are canonical site subsets of the
// lattice; beta and s are drawn from the configured grids.
struct RandomInstance {
    Lattice lattice;
    CouplingSet couplings;
    SiteSet subset_a;
    SiteSet subset_b;
    double beta = 1.0;
    double s = 0.0;
    std::uint64_t sub_seed = 0;
};

// Draws a spin-1/2 instance: lattice size in [min(2,sites)..sites], between 1
// and n+2 coupling terms with subset sizes up to max_subset_size, strengths
// uniform in [0, strength_max] (duplicated subset/axis keys merge additively),
// observable subsets of size up to 3.  When cfg.model is set the lattice and
// couplings come from the config verbatim and only subsets/beta/s are drawn.
RandomInstance generate_instance(const CampaignConfig& cfg, std::uint64_t trial,
                                 std::uint64_t attempt = 0);

// Spin-1 variant: at most min(cfg.sites, 3) sites, axis pair forced to the
// (1,3) convention, strengths bounded away from zero, and a single-site
// longitudinal patch term on any otherwise uncoupled site so that every site
// interacts (a precondition of the ground-state correspondence checks).
RandomInstance generate_spin_one_instance(const CampaignConfig& cfg, std::uint64_t trial,
                                          std::uint64_t attempt = 0);

// Uniform integer in [lo, hi] via the engine (stable across platforms, unlike
// std::uniform_int_distribution which is implementation-defined).
std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t lo, std::uint64_t hi);

// Uniform double in [lo, hi).
double uniform_real(std::mt19937_64& eng, double lo, double hi);

// Draws a size-k subset of the lattice's sites (canonical order) by partial
// Fisher-Yates over site indices.
SiteSet random_subset(std::mt19937_64& eng, const Lattice& lat, int k);

// Short human-readable instance descriptor ("4 sites, 5 terms, beta=1, s=0.5")
// for reports.
std::string describe_instance(const RandomInstance& inst);

}  // namespace xycorr
