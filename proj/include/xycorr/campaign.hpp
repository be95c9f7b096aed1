#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xycorr/config.hpp"
#include "xycorr/generator.hpp"

namespace xycorr {

/// One row of a parameter sweep (s grid, eta grid, volume ladder) destined for
/// the CSV tables.
struct SweepRow {
    std::string table;     // "s", "eta", "volume"
    double size = 0.0;     // lattice / volume size the row was computed on
    double parameter = 0;  // s, eta, or the sequence index
    double value = 0.0;
    double margin = 0.0;
};

/// Everything one trial produced. `margins` gate the pass flag: the trial
/// passes iff it ran to completion and every margin is >= 0. `payload` holds
/// the full model (couplings, subsets, beta, s) so a failed trial can be
/// replayed deterministically.
struct InstanceRecord {
    int trial = 0;
    std::uint64_t sub_seed = 0;
    int attempt = 0;  // resample count consumed by ambiguous-ground-space draws
    bool pass = false;
    double wall_seconds = 0.0;
    std::string failure;  // non-empty iff an exception aborted the trial
    std::string descriptor;
    nlohmann::json payload;
    std::vector<std::pair<std::string, double>> quantities;
    std::vector<std::pair<std::string, double>> margins;
    std::vector<SweepRow> sweeps;
};

struct CampaignResult {
    std::string mode;
    int trials = 0;
    int passed = 0;
    int failed = 0;
    double wall_seconds = 0.0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::string min_margin_name;
    int min_margin_trial = -1;
    double max_residual = 0.0;  // largest quantity whose name mentions "residual"
    std::string max_residual_name;
    std::vector<InstanceRecord> records;
};

struct CampaignOutcome {
    std::vector<CampaignResult> results;
    bool all_passed() const;
};

/// Serializes a sampled instance into the replayable payload format and back.
nlohmann::json instance_to_json(const RandomInstance& inst);
RandomInstance instance_from_json(const nlohmann::json& payload);

/// Runs one mode's computation on a fully specified payload. Exceptions other
/// than AmbiguousGroundSpace are captured into the record's failure field;
/// AmbiguousGroundSpace propagates so the caller can resample.
InstanceRecord evaluate_payload(const CampaignConfig& cfg, const std::string& mode,
                                const nlohmann::json& payload, int trial);

/// Samples (and, for ground-state modes, resamples on ambiguity) a payload and
/// evaluates it. Deterministic in (cfg.seed, mode, trial).
InstanceRecord run_trial(const CampaignConfig& cfg, const std::string& mode, int trial);

/// Runs cfg.trials trials of one concrete mode over a bounded worker pool.
CampaignResult run_mode(const CampaignConfig& cfg, const std::string& mode);

/// Runs cfg.mode, expanding "all" into every concrete mode.
CampaignOutcome run_campaign(const CampaignConfig& cfg);

nlohmann::json record_to_json(const InstanceRecord& rec);
nlohmann::json outcome_to_json(const CampaignOutcome& outcome, const CampaignConfig& cfg);

/// Writes the JSON report / CSV sweep tables when the config names paths.
/// Reports are written for failing campaigns too.
void write_reports(const CampaignOutcome& outcome, const CampaignConfig& cfg);

/// Shortest decimal rendering that round-trips the double exactly (%.17g).
std::string format_double(double v);

}  // namespace xycorr
