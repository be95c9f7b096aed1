#include "xycorr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace xycorr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config field '" + where + "': " + what);
}

double get_finite(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "must be finite");
    return v;
}

int get_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

std::vector<double> get_grid(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_finite(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace

const std::vector<std::string>& known_modes() {
    static const std::vector<std::string> modes{"theorem1",      "corollary", "doubling-lemmas",
                                                "spin1",         "theorem2",  "volume-limits",
                                                "all"};
    return modes;
}

bool is_known_mode(const std::string& mode) {
    for (const auto& m : known_modes()) {
        if (m == mode) return true;
    }
    return false;
}

CouplingSet coupling_set_from_json(const nlohmann::json& j, AxisPair axis_pair) {
    if (!j.is_array()) fail("couplings", "expected an array");
    CouplingSet cs;
    cs.axis_pair = axis_pair;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "couplings[" + std::to_string(i) + "]";
        const auto& entry = j[i];
        if (!entry.is_object()) fail(where, "expected an object");
        for (const auto& [key, value] : entry.items()) {
            (void)value;
            if (key != "subset" && key != "axis" && key != "strength") {
                fail(where, "unknown key '" + key + "'");
            }
        }
        if (!entry.contains("subset") || !entry["subset"].is_array() ||
            entry["subset"].empty()) {
            fail(where + ".subset", "expected a nonempty array of site labels");
        }
        Coupling c;
        for (const auto& s : entry["subset"]) {
            if (!s.is_string()) fail(where + ".subset", "site labels must be strings");
            c.subset.push_back(s.get<std::string>());
        }
        if (!entry.contains("axis")) fail(where + ".axis", "missing");
        try {
            c.axis = axis_from_int(get_int(entry["axis"], where + ".axis"));
        } catch (const std::invalid_argument& e) {
            fail(where + ".axis", e.what());
        }
        if (!entry.contains("strength")) fail(where + ".strength", "missing");
        c.strength = get_finite(entry["strength"], where + ".strength");
        cs.couplings.push_back(std::move(c));
    }
    return cs;
}

nlohmann::json coupling_set_to_json(const CouplingSet& cs) {
    json out = json::array();
    for (const auto& c : cs.couplings) {
        out.push_back(json{{"subset", c.subset},
                           {"axis", axis_to_int(c.axis)},
                           {"strength", c.strength}});
    }
    return out;
}

CampaignConfig parse_config_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    static const std::set<std::string> keys{
        "mode",      "sites",     "max_subset_size", "strength_max",
        "axis_pair", "beta_grid", "s_grid",          "trials",
        "seed",      "tolerance", "report",          "csv",
        "jobs",      "allow_violating_hypotheses",   "lattice",
        "couplings"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!keys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    CampaignConfig cfg;
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail("mode", "expected a string");
        cfg.mode = j["mode"].get<std::string>();
        if (!is_known_mode(cfg.mode)) fail("mode", "unknown mode '" + cfg.mode + "'");
    }
    if (j.contains("sites")) cfg.sites = get_int(j["sites"], "sites");
    if (j.contains("max_subset_size"))
        cfg.max_subset_size = get_int(j["max_subset_size"], "max_subset_size");
    if (j.contains("strength_max"))
        cfg.strength_max = get_finite(j["strength_max"], "strength_max");
    if (j.contains("axis_pair")) {
        if (!j["axis_pair"].is_string()) fail("axis_pair", "expected a string");
        try {
            cfg.axis_pair = axis_pair_from_string(j["axis_pair"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail("axis_pair", e.what());
        }
    }
    if (j.contains("beta_grid")) cfg.beta_grid = get_grid(j["beta_grid"], "beta_grid");
    if (j.contains("s_grid")) cfg.s_grid = get_grid(j["s_grid"], "s_grid");
    if (j.contains("trials")) cfg.trials = get_int(j["trials"], "trials");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() ||
            (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() &&
             j["seed"].get<long long>() < 0)) {
            fail("seed", "expected a nonnegative integer");
        }
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("tolerance")) cfg.tolerance = get_finite(j["tolerance"], "tolerance");
    if (j.contains("report")) {
        if (!j["report"].is_string()) fail("report", "expected a string path");
        cfg.report_path = j["report"].get<std::string>();
    }
    if (j.contains("csv")) {
        if (!j["csv"].is_string()) fail("csv", "expected a string path");
        cfg.csv_path = j["csv"].get<std::string>();
    }
    if (j.contains("jobs")) cfg.jobs = get_int(j["jobs"], "jobs");
    if (j.contains("allow_violating_hypotheses")) {
        if (!j["allow_violating_hypotheses"].is_boolean()) {
            fail("allow_violating_hypotheses", "expected a boolean");
        }
        cfg.allow_violating_hypotheses = j["allow_violating_hypotheses"].get<bool>();
    }

    const bool has_lattice = j.contains("lattice");
    const bool has_couplings = j.contains("couplings");
    if (has_lattice != has_couplings) {
        throw ConfigError("'lattice' and 'couplings' must be given together");
    }
    if (has_lattice) {
        ExplicitModel model;
        const auto& lat = j["lattice"];
        if (lat.is_array()) {
            for (const auto& s : lat) {
                if (!s.is_string()) fail("lattice", "site labels must be strings");
                model.sites.push_back(s.get<std::string>());
            }
        } else if (lat.is_object()) {
            for (const auto& [key, value] : lat.items()) {
                (void)value;
                if (key != "sites" && key != "local_dim") {
                    fail("lattice", "unknown key '" + key + "'");
                }
            }
            if (!lat.contains("sites") || !lat["sites"].is_array()) {
                fail("lattice.sites", "expected an array of site labels");
            }
            for (const auto& s : lat["sites"]) {
                if (!s.is_string()) fail("lattice.sites", "site labels must be strings");
                model.sites.push_back(s.get<std::string>());
            }
            if (lat.contains("local_dim")) {
                model.local_dim = get_int(lat["local_dim"], "lattice.local_dim");
            }
        } else {
            fail("lattice", "expected an array or object");
        }
        model.couplings = coupling_set_from_json(j["couplings"], cfg.axis_pair);
        cfg.model = std::move(model);
    }

    // Semantic validation is a separate step (validate_config): command-line
    // overrides are applied between parsing and validation.
    return cfg;
}

CampaignConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return parse_config_json(j);
}

void validate_config(const CampaignConfig& cfg) {
    if (!cfg.mode.empty() && !is_known_mode(cfg.mode)) {
        throw ConfigError("unknown mode '" + cfg.mode + "'");
    }
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.sites < 1 || cfg.sites > 36) throw ConfigError("sites must be between 1 and 36");
    if (cfg.max_subset_size < 1) throw ConfigError("max_subset_size must be >= 1");
    if (!(cfg.strength_max >= 0.0) || !std::isfinite(cfg.strength_max)) {
        throw ConfigError("strength_max must be nonnegative and finite");
    }
    if (!(cfg.tolerance > 0.0) || !std::isfinite(cfg.tolerance)) {
        throw ConfigError("tolerance must be positive");
    }
    if (cfg.jobs < 0) throw ConfigError("jobs must be >= 0");
    for (double b : cfg.beta_grid) {
        if (!(b > 0.0)) throw ConfigError("beta_grid entries must be positive");
    }
    for (double s : cfg.s_grid) {
        if (s < 0.0 || s > 1.0) throw ConfigError("s_grid entries must lie in [0,1]");
    }
    const std::int64_t cap = dimension_cap();
    std::int64_t dim = 1;
    for (int k = 0; k < cfg.sites && dim <= cap; ++k) dim *= 2;
    if (dim > cap) {
        throw ConfigError("sites=" + std::to_string(cfg.sites) +
                          " gives Hilbert-space dimension " + std::to_string(dim) +
                          " beyond the cap " + std::to_string(cap));
    }
    if (cfg.model) {
        Lattice lat(cfg.model->sites, cfg.model->local_dim);
        if (lat.dim() > cap) {
            throw ConfigError("explicit lattice gives Hilbert-space dimension " +
                              std::to_string(lat.dim()) + " beyond the cap " +
                              std::to_string(cap));
        }
        try {
            validate_coupling_set(cfg.model->couplings, lat, cfg.allow_violating_hypotheses);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string(e.what()) +
                              (cfg.allow_violating_hypotheses
                                   ? ""
                                   : " (pass --allow-violating-hypotheses to run "
                                     "hypothesis-violating demonstrations)"));
        }
    }
}

nlohmann::json config_to_json(const CampaignConfig& cfg) {
    json j{{"mode", cfg.mode},
           {"sites", cfg.sites},
           {"max_subset_size", cfg.max_subset_size},
           {"strength_max", cfg.strength_max},
           {"axis_pair", to_string(cfg.axis_pair)},
           {"beta_grid", cfg.beta_grid},
           {"s_grid", cfg.s_grid},
           {"trials", cfg.trials},
           {"seed", cfg.seed},
           {"tolerance", cfg.tolerance},
           {"jobs", cfg.jobs},
           {"allow_violating_hypotheses", cfg.allow_violating_hypotheses}};
    if (!cfg.report_path.empty()) j["report"] = cfg.report_path;
    if (!cfg.csv_path.empty()) j["csv"] = cfg.csv_path;
    if (cfg.model) {
        j["lattice"] = json{{"sites", cfg.model->sites}, {"local_dim", cfg.model->local_dim}};
        j["couplings"] = coupling_set_to_json(cfg.model->couplings);
    }
    return j;
}

}  // namespace xycorr
