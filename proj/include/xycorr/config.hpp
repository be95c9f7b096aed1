#pragma once

#include "xycorr/hamiltonian.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace xycorr {

/// Configuration or input-validation problem; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fully specified model, used instead of random generation when present.
struct ExplicitModel {
    std::vector<std::string> sites;
    int local_dim = 2;
    CouplingSet couplings;
};

struct CampaignConfig {
    std::string mode;
    int sites = 4;
    int max_subset_size = 3;
    double strength_max = 2.0;
    AxisPair axis_pair = AxisPair::XY;
    std::vector<double> beta_grid{0.5, 1.0, 4.0};
    std::vector<double> s_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    int trials = 100;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    std::string report_path;
    std::string csv_path;
    int jobs = 0;  // 0 selects the hardware concurrency
    bool allow_violating_hypotheses = false;
    std::optional<ExplicitModel> model;
};

const std::vector<std::string>& known_modes();
bool is_known_mode(const std::string& mode);

/// Parses and validates a JSON config document; unknown keys are rejected.
CampaignConfig parse_config_json(const nlohmann::json& j);
CampaignConfig parse_config_file(const std::string& path);

/// Re-checks the cross-field invariants (grids, trials, explicit model).
void validate_config(const CampaignConfig& cfg);

/// Config as embedded in reports (round-trips through parse_config_json).
nlohmann::json config_to_json(const CampaignConfig& cfg);

nlohmann::json coupling_set_to_json(const CouplingSet& cs);
CouplingSet coupling_set_from_json(const nlohmann::json& j, AxisPair axis_pair);

}  // namespace xycorr
