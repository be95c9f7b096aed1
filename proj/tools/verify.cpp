#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "xycorr/campaign.hpp"
#include "xycorr/config.hpp"

namespace {

void print_summary(const xycorr::CampaignOutcome& outcome) {
    for (const auto& res : outcome.results) {
        std::printf("%-16s trials %4d  passed %4d  failed %4d  (%.2fs)\n", res.mode.c_str(),
                    res.trials, res.passed, res.failed, res.wall_seconds);
        if (res.min_margin_trial >= 0) {
            std::printf("%-16s   min margin %s (%s, trial %d)\n", "",
                        xycorr::format_double(res.min_margin).c_str(), res.min_margin_name.c_str(),
                        res.min_margin_trial);
        }
        if (!res.max_residual_name.empty()) {
            std::printf("%-16s   max residual %s (%s)\n", "",
                        xycorr::format_double(res.max_residual).c_str(),
                        res.max_residual_name.c_str());
        }
        for (const auto& rec : res.records) {
            if (!rec.pass) {
                std::printf("%-16s   FAIL trial %d (seed %llu): %s\n", "", rec.trial,
                            static_cast<unsigned long long>(rec.sub_seed),
                            rec.failure.empty() ? "margin below zero" : rec.failure.c_str());
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized verification campaigns for quantum lattice correlation inequalities"};

    std::string mode;
    std::string config_path;
    int trials = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::string report_path;
    std::string csv_path;
    int jobs = -1;
    bool allow_violating = false;

    app.add_option("mode", mode, "campaign mode, one of: theorem1 corollary doubling-lemmas spin1 theorem2 volume-limits all")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--trials", trials, "number of randomized trials");
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--tol", tol, "sign-margin tolerance");
    app.add_option("--report", report_path, "write a JSON report to this path");
    app.add_option("--csv", csv_path, "write sweep tables as CSV to this path");
    app.add_option("--jobs", jobs, "worker threads (0 = hardware default)");
    app.add_flag("--allow-violating-hypotheses", allow_violating,
                 "accept models with negative couplings (sign guarantees no longer apply)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        xycorr::CampaignConfig cfg;
        if (!config_path.empty()) cfg = xycorr::parse_config_file(config_path);

        if (!xycorr::is_known_mode(mode)) {
            throw xycorr::ConfigError("unknown mode '" + mode + "'");
        }
        cfg.mode = mode;
        if (app.count("--trials") > 0) cfg.trials = trials;
        if (app.count("--seed") > 0) cfg.seed = seed;
        if (app.count("--tol") > 0) cfg.tolerance = tol;
        if (app.count("--report") > 0) cfg.report_path = report_path;
        if (app.count("--csv") > 0) cfg.csv_path = csv_path;
        if (app.count("--jobs") > 0) cfg.jobs = jobs;
        if (allow_violating) cfg.allow_violating_hypotheses = true;
        xycorr::validate_config(cfg);

        const xycorr::CampaignOutcome outcome = xycorr::run_campaign(cfg);
        xycorr::write_reports(outcome, cfg);
        print_summary(outcome);
        if (outcome.all_passed()) {
            std::printf("PASS\n");
            return 0;
        }
        std::printf("VIOLATIONS FOUND\n");
        return 1;
    } catch (const xycorr::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
