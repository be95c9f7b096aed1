// End-to-end checks of the verify binary: exit codes, option overrides, and
// report emission, driven through real subprocesses.
//
// argv[1] = path to the verify executable, argv[2] = bundled config directory.

#include <sys/wait.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

int run(const std::string& cmd) {
    const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    json j;
    in >> j;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: test_cli <verify-binary> <config-dir>\n";
        return 1;
    }
    const std::string bin = quoted(argv[1]);
    const fs::path configs(argv[2]);
    const fs::path work = fs::temp_directory_path() / "xycorr_cli_test";
    fs::remove_all(work);
    fs::create_directories(work);

    // --- happy path: small campaign, report + csv written, exit 0
    {
        const fs::path report = work / "t1.json";
        const fs::path csv = work / "t1.csv";
        const int rc = run(bin + " theorem1 --config " + quoted((configs / "theorem1.json").string()) +
                           " --trials 5 --seed 3 --jobs 1 --report " + quoted(report.string()) +
                           " --csv " + quoted(csv.string()));
        expect(rc == 0, "passing campaign exits 0, got " + std::to_string(rc));
        expect(fs::exists(report), "report file written");
        expect(fs::exists(csv), "csv file written");
        const json rep = read_json(report);
        expect(rep.at("overall").at("passed").get<bool>(), "report says passed");
        expect(rep.at("overall").at("total_trials").get<int>() == 5,
               "CLI --trials overrides the config file");
        expect(rep.at("config").at("seed").get<std::uint64_t>() == 3,
               "CLI --seed overrides the config file");
        expect(rep.at("instances").size() == 5, "one record per trial");
        // csv has a header plus at least one sweep row
        std::ifstream in(csv);
        std::string header;
        std::getline(in, header);
        expect(header == "mode,trial,table,size,parameter,value,margin", "csv header");
        std::string row;
        expect(static_cast<bool>(std::getline(in, row)), "csv body nonempty");
    }

    // --- determinism: the same invocation twice gives byte-identical instances
    {
        const fs::path r1 = work / "d1.json";
        const fs::path r2 = work / "d2.json";
        const std::string base = bin + " corollary --trials 4 --seed 11 --jobs 1 --report ";
        expect(run(base + quoted(r1.string())) == 0, "determinism run 1 exits 0");
        expect(run(base + quoted(r2.string())) == 0, "determinism run 2 exits 0");
        json a = read_json(r1).at("instances");
        json b = read_json(r2).at("instances");
        for (auto* side : {&a, &b}) {
            for (auto& inst : *side) inst.erase("wall_seconds");
        }
        expect(a == b, "identical instance records up to wall time");
    }

    // --- violation path: negative-coupling demo exits 1 and still writes the report
    {
        const fs::path report = work / "neg.json";
        const int rc = run(bin + " theorem1 --config " +
                           quoted((configs / "negative-demo.json").string()) + " --jobs 1 --report " +
                           quoted(report.string()));
        expect(rc == 1, "hypothesis-violating demo exits 1, got " + std::to_string(rc));
        expect(fs::exists(report), "report written for violating campaign");
        const json rep = read_json(report);
        expect(!rep.at("overall").at("passed").get<bool>(), "report says failed");
        bool saw_negative_margin = false;
        for (const auto& inst : rep.at("instances")) {
            for (const auto& [name, value] : inst.at("margins").items()) {
                (void)name;
                if (value.get<double>() < 0.0) saw_negative_margin = true;
            }
        }
        expect(saw_negative_margin, "at least one recorded margin is negative");
    }

    // --- config errors exit 2
    {
        expect(run(bin + " no-such-mode --trials 1") == 2, "unknown mode exits 2");
        expect(run(bin + " theorem1 --config /nonexistent/conf.json") == 2,
               "missing config file exits 2");
        expect(run(bin + " theorem1 --trials 0") == 2, "invalid trials exits 2");
        expect(run(bin) == 2, "missing mode positional exits 2");

        // negative coupling without the flag is a config error naming the flag
        const fs::path bad = work / "bad.json";
        {
            json doc = read_json(configs / "negative-demo.json");
            doc["allow_violating_hypotheses"] = false;
            std::ofstream out(bad);
            out << doc;
        }
        expect(run(bin + " theorem1 --config " + quoted(bad.string())) == 2,
               "negative coupling without the flag exits 2");
        // and the flag can come from the command line instead of the file
        expect(run(bin + " theorem1 --config " + quoted(bad.string()) +
                   " --allow-violating-hypotheses --jobs 1") == 1,
               "command-line flag admits the demo (exit 1)");
    }

    // --- every bundled config parses and starts (1 trial each)
    for (const auto& entry : fs::directory_iterator(configs)) {
        if (entry.path().extension() != ".json") continue;
        const json doc = read_json(entry.path());
        const std::string mode = doc.value("mode", "");
        expect(!mode.empty(), entry.path().filename().string() + " declares a mode");
        // the demo config needs its full trial budget to hit a violating draw,
        // so only the hypothesis-respecting configs are cut down to one trial
        const bool demo = entry.path().filename() == "negative-demo.json";
        const int rc = run(bin + " " + mode + " --config " + quoted(entry.path().string()) +
                           (demo ? " --jobs 1" : " --trials 1 --jobs 1"));
        const int want = demo ? 1 : 0;
        expect(rc == want, entry.path().filename().string() + " runs with exit " +
                               std::to_string(want) + ", got " + std::to_string(rc));
    }

    fs::remove_all(work);
    if (failures == 0) {
        std::cout << "test_cli: all checks passed\n";
        return 0;
    }
    std::cerr << "test_cli: " << failures << " check(s) failed\n";
    return 1;
}
