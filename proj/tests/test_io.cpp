#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "econoswap/analysis.hpp"
#include "econoswap/engine.hpp"
#include "econoswap/io.hpp"
#include "econoswap/rng.hpp"

using namespace econoswap;
namespace fs = std::filesystem;

namespace {

std::string cli_path() { return ECONOSWAP_CLI_PATH; }

// Per-test scratch directory under /tmp; left behind on purpose so a
// failing run can be inspected.
std::string make_scratch() {
    char tmpl[] = "/tmp/econoswap_io_XXXXXX";
    char* dir = mkdtemp(tmpl);
    REQUIRE(dir != nullptr);
    return dir;
}

int run_cli(const std::string& args, const std::string& stderr_path = "") {
    std::string cmd = cli_path() + " " + args + " >/dev/null";
    cmd += stderr_path.empty() ? " 2>/dev/null" : " 2>" + stderr_path;
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

SimulationConfig tiny_config() {
    SimulationConfig config;
    config.n_agents = 40;
    config.initial_wealth = 1000.0;
    config.iterations = 4;
    config.rule = PairingRule::random();
    config.master_seed = 5;
    config.realizations = 2;
    return config;
}

}  // namespace

TEST_CASE("name mappers round-trip and reject garbage") {
    CHECK(io::rule_kind_name(RuleKind::Random) == "random");
    CHECK(io::rule_kind_name(RuleKind::NonMutualClass) == "nonmutual");
    CHECK(io::rule_kind_name(RuleKind::MutualClass) == "mutual");
    CHECK(io::rule_kind_name(RuleKind::Mixed) == "mixed");
    for (const RuleKind kind :
         {RuleKind::Random, RuleKind::NonMutualClass, RuleKind::MutualClass,
          RuleKind::Mixed})
        CHECK(io::rule_kind_from_name(io::rule_kind_name(kind)) == kind);
    CHECK_THROWS_AS(io::rule_kind_from_name("bogus"), io::IoError);

    CHECK(io::binning_name(BinScheme::Linear) == "linear");
    CHECK(io::binning_name(BinScheme::Logarithmic) == "log");
    CHECK(io::binning_from_name("linear") == BinScheme::Linear);
    CHECK(io::binning_from_name("log") == BinScheme::Logarithmic);
    CHECK_THROWS_AS(io::binning_from_name("hex"), io::IoError);

    CHECK(io::verdict_name(Verdict::Exponential) == "exponential");
    CHECK(io::verdict_name(Verdict::PowerLaw) == "power_law");
    CHECK(io::verdict_name(Verdict::Mixed) == "mixed");
    CHECK(io::verdict_name(Verdict::Indeterminate) == "indeterminate");
}

TEST_CASE("config JSON round-trip preserves every field") {
    SimulationConfig config;
    config.n_agents = 123;
    config.initial_wealth = 17.5;
    config.iterations = 7;
    config.rule = PairingRule::mixed(0.4, 1000.0);
    OpenEconomyPolicy policy;
    policy.period = 3;
    policy.amount = 25.0;
    config.open_policy = policy;
    config.master_seed = 99;
    config.realizations = 2;

    const SimulationConfig back =
        io::config_from_json(io::config_to_json(config));
    CHECK(back.n_agents == config.n_agents);
    CHECK(back.initial_wealth == config.initial_wealth);
    CHECK(back.iterations == config.iterations);
    CHECK(back.rule.kind == config.rule.kind);
    CHECK(back.rule.beta == config.rule.beta);
    CHECK(back.rule.w_limit == config.rule.w_limit);
    REQUIRE(back.open_policy.has_value());
    CHECK(back.open_policy->period == policy.period);
    CHECK(back.open_policy->amount == policy.amount);
    CHECK(back.master_seed == config.master_seed);
    CHECK(back.realizations == config.realizations);

    SUBCASE("closed config omits or nulls the policy either way") {
        SimulationConfig closed = tiny_config();
        const SimulationConfig back2 =
            io::config_from_json(io::config_to_json(closed));
        CHECK_FALSE(back2.open_policy.has_value());
    }
}

TEST_CASE("simulation result JSON round-trip is bitwise") {
    const SimulationResult result = run_simulation(tiny_config(), 1);
    const SimulationResult back =
        io::result_from_json(io::result_to_json(result));

    CHECK(back.config.n_agents == result.config.n_agents);
    CHECK(back.config.master_seed == result.config.master_seed);
    REQUIRE(back.realizations.size() == result.realizations.size());
    for (std::size_t r = 0; r < result.realizations.size(); ++r) {
        const auto& a = result.realizations[r];
        const auto& b = back.realizations[r];
        CHECK(b.index == a.index);
        CHECK(b.seed == a.seed);
        CHECK(b.min_wealth == a.min_wealth);
        CHECK(b.error == a.error);
        REQUIRE(b.final_wealth.size() == a.final_wealth.size());
        CHECK(b.final_wealth == a.final_wealth);
        CHECK(b.total_trace == a.total_trace);
    }
    CHECK(back.conservation_drift() == result.conservation_drift());
}

TEST_CASE("fit and classification JSON carry the expected keys") {
    const std::vector<double> samples = [] {
        Rng rng(9);
        std::vector<double> s(20000);
        for (double& v : s) v = -500.0 * std::log1p(-rng.uniform01());
        return s;
    }();
    const Distribution dist =
        build_histogram(samples, BinScheme::Linear, 50);
    const Classification c = classify(dist);

    const nlohmann::json jf = io::fit_to_json(c.exponential_fit);
    for (const char* key :
         {"model", "exponent", "intercept", "r_squared", "n_points",
          "window"})
        CHECK(jf.contains(key));
    CHECK(jf["model"] == "exponential");
    CHECK(jf["exponent"].get<double>() == c.exponential_fit.exponent);
    REQUIRE(jf["window"].is_array());
    CHECK(jf["window"][0].get<double>() == c.exponential_fit.window_lo);
    CHECK(jf["window"][1].get<double>() == c.exponential_fit.window_hi);

    const nlohmann::json jc = io::classification_to_json(c);
    CHECK(jc["verdict"] == io::verdict_name(c.verdict));
    CHECK(jc["threshold"].get<double>() == c.threshold);
    CHECK(jc["exponential_fit"]["model"] == "exponential");
    CHECK(jc["power_law_fit"]["model"] == "power_law");
}

TEST_CASE("distribution CSV round-trips bitwise") {
    Rng rng(21);
    std::vector<double> samples(5000);
    for (double& s : samples) s = 1.0 + 999.0 * rng.uniform01();

    for (const BinScheme scheme :
         {BinScheme::Linear, BinScheme::Logarithmic}) {
        CAPTURE(static_cast<int>(scheme));
        const Distribution dist = build_histogram(samples, scheme, 30);
        const std::string csv = io::distribution_to_csv(dist);
        CHECK(csv.rfind("bin_lo,bin_hi,bin_center,count,density", 0) == 0);

        const Distribution back =
            io::distribution_from_csv(csv, "in-memory.csv");
        CHECK(back.scheme == dist.scheme);
        REQUIRE(back.bins.size() == dist.bins.size());
        for (std::size_t i = 0; i < dist.bins.size(); ++i) {
            CHECK(back.bins[i].lo == dist.bins[i].lo);
            CHECK(back.bins[i].hi == dist.bins[i].hi);
            CHECK(back.bins[i].center == dist.bins[i].center);
            CHECK(back.bins[i].count == dist.bins[i].count);
            CHECK(back.bins[i].density == dist.bins[i].density);
        }
        CHECK(back.n_samples == dist.n_samples);
    }
}

TEST_CASE("distribution CSV parse errors name the source") {
    try {
        io::distribution_from_csv("bin_lo,bin_hi\n1,2\n", "weird.csv");
        FAIL("expected IoError");
    } catch (const io::IoError& e) {
        CHECK(std::string(e.what()).find("weird.csv") !=
              std::string::npos);
    }
    CHECK_THROWS_AS(
        io::distribution_from_csv(
            "bin_lo,bin_hi,bin_center,count,density\n1,2,x,4,5\n",
            "bad.csv"),
        io::IoError);
}

TEST_CASE("ccdf CSV worked example") {
    const std::vector<double> samples = {1.0, 2.0, 2.0, 5.0};
    const std::string csv = io::ccdf_to_csv(ccdf_points(samples));
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const std::size_t nl = csv.find('\n', pos);
        lines.push_back(csv.substr(pos, nl - pos));
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "wealth,ccdf");
    CHECK(std::strtod(lines[1].c_str(), nullptr) == 1.0);
    CHECK(std::strtod(lines[3].c_str(), nullptr) == 5.0);
    CHECK(lines[2].find("0.75") != std::string::npos);
}

TEST_CASE("text files write atomically and read back") {
    const std::string dir = make_scratch();
    const std::string path = dir + "/note.txt";
    const std::string content = "line one\nline two\n";
    io::write_text_file(path, content);
    CHECK(io::read_text_file(path) == content);

    // The temp sibling used for atomic replacement must be gone.
    std::size_t entries = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        (void)entry;
        ++entries;
    }
    CHECK(entries == 1);

    SUBCASE("overwrite replaces content completely") {
        io::write_text_file(path, "short");
        CHECK(io::read_text_file(path) == "short");
    }
    SUBCASE("unwritable target names the path") {
        const std::string bad = dir + "/no_such_subdir/file.txt";
        try {
            io::write_text_file(bad, "x");
            FAIL("expected IoError");
        } catch (const io::IoError& e) {
            CHECK(std::string(e.what()).find("no_such_subdir") !=
                  std::string::npos);
        }
    }
    SUBCASE("missing file names the path") {
        try {
            io::read_text_file(dir + "/absent.txt");
            FAIL("expected IoError");
        } catch (const io::IoError& e) {
            CHECK(std::string(e.what()).find("absent.txt") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("JSON files round-trip and reject malformed input") {
    const std::string dir = make_scratch();
    const std::string path = dir + "/data.json";
    nlohmann::json j;
    j["alpha"] = 1.25;
    j["items"] = {1, 2, 3};
    io::write_json_file(path, j);
    CHECK(io::read_json_file(path) == j);

    io::write_text_file(path, "{not json");
    try {
        io::read_json_file(path);
        FAIL("expected IoError");
    } catch (const io::IoError& e) {
        CHECK(std::string(e.what()).find("data.json") !=
              std::string::npos);
    }
}

TEST_CASE("load_result_file validates kind and format_version") {
    const std::string dir = make_scratch();
    const std::string path = dir + "/result.json";
    const SimulationResult result = run_simulation(tiny_config(), 1);
    nlohmann::json j = io::result_to_json(result);
    io::write_json_file(path, j);
    const SimulationResult loaded = io::load_result_file(path);
    CHECK(loaded.realizations.size() == result.realizations.size());
    CHECK(loaded.realizations[0].final_wealth ==
          result.realizations[0].final_wealth);

    SUBCASE("wrong kind") {
        j["kind"] = "something_else";
        io::write_json_file(path, j);
        CHECK_THROWS_AS(io::load_result_file(path), io::IoError);
    }
    SUBCASE("wrong format_version") {
        j["format_version"] = 999;
        io::write_json_file(path, j);
        try {
            io::load_result_file(path);
            FAIL("expected IoError");
        } catch (const io::IoError& e) {
            const std::string what = e.what();
            CHECK(what.find("format_version") != std::string::npos);
            CHECK(what.find("result.json") != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::load_result_file(dir + "/nope.json"),
                        io::IoError);
    }
}

TEST_CASE("cli usage errors exit 1") {
    CHECK(run_cli("") == 1);
    const std::string dir = make_scratch();
    CHECK(run_cli("run --rule bogus --out " + dir + "/x.json") == 1);
    CHECK(run_cli("run --rule nonmutual --out " + dir + "/x.json") == 1);
    CHECK(run_cli("run --rule random --beta 0.5 --out " + dir +
                  "/x.json") == 1);
    CHECK(run_cli("run --rule random --inject-amount 5 --out " + dir +
                  "/x.json") == 1);

    const std::string err = dir + "/stderr.txt";
    CHECK(run_cli("run --rule mixed --beta 0.4 --out " + dir + "/x.json",
                  err) == 1);
    CHECK(file_bytes(err).find("--wlimit: required for the mixed rule") !=
          std::string::npos);
    CHECK_FALSE(fs::exists(dir + "/x.json"));
}

TEST_CASE("cli io errors exit 2") {
    const std::string dir = make_scratch();
    CHECK(run_cli("analyze --in " + dir + "/missing.json --out " + dir +
                  "/a.json") == 2);
    io::write_text_file(dir + "/broken.json", "{not json");
    CHECK(run_cli("analyze --in " + dir + "/broken.json --out " + dir +
                  "/a.json") == 2);
    io::write_text_file(dir + "/broken.csv", "not,a,histogram\n");
    CHECK(run_cli("plot --in " + dir + "/broken.csv --out " + dir +
                  "/p.svg --mode semilog") == 2);
}

TEST_CASE("cli run writes result plus manifest, deterministically") {
    const std::string dir = make_scratch();
    const std::string common =
        "run --rule random --agents 200 --iterations 10 --seed 3"
        " --realizations 3 --out ";
    REQUIRE(run_cli(common + dir + "/r1.json") == 0);
    REQUIRE(run_cli(common + dir + "/r2.json") == 0);
    CHECK(file_bytes(dir + "/r1.json") == file_bytes(dir + "/r2.json"));

    const nlohmann::json manifest =
        io::read_json_file(dir + "/r1.json.manifest.json");
    CHECK(manifest["kind"] == "run_manifest");
    CHECK(manifest["format_version"] == io::format_version);
    CHECK(manifest["outputs"][0] == dir + "/r1.json");
    CHECK(manifest["conservation_drift"].get<double>() < 1e-9);

    const SimulationResult result =
        io::load_result_file(dir + "/r1.json");
    CHECK(result.config.n_agents == 200);
    CHECK(result.realizations.size() == 3);
}

TEST_CASE("cli thread env: garbage rejected, count reproduces serial") {
    const std::string dir = make_scratch();
    const std::string common =
        " run --rule mixed --beta 0.4 --wlimit 1000 --agents 200"
        " --iterations 10 --seed 8 --realizations 3 --out ";
    const auto with_env = [&](const std::string& env,
                              const std::string& out) {
        const std::string cmd = env + " " + cli_path() + common + out +
                                " >/dev/null 2>/dev/null";
        const int status = std::system(cmd.c_str());
        REQUIRE(WIFEXITED(status));
        return WEXITSTATUS(status);
    };
    CHECK(with_env("ECONOSWAP_THREADS=abc", dir + "/bad.json") == 1);
    CHECK_FALSE(fs::exists(dir + "/bad.json"));
    REQUIRE(with_env("ECONOSWAP_THREADS=1", dir + "/serial.json") == 0);
    REQUIRE(with_env("ECONOSWAP_THREADS=4", dir + "/parallel.json") == 0);
    CHECK(file_bytes(dir + "/serial.json") ==
          file_bytes(dir + "/parallel.json"));
}

TEST_CASE("cli warns on beta above the studied range but still runs") {
    const std::string dir = make_scratch();
    const std::string err = dir + "/stderr.txt";
    CHECK(run_cli("run --rule nonmutual --beta 1.5 --agents 100"
                  " --iterations 5 --realizations 1 --out " +
                      dir + "/r.json",
                  err) == 0);
    CHECK(file_bytes(err).find("outside the studied range") !=
          std::string::npos);
    CHECK(fs::exists(dir + "/r.json"));
}

TEST_CASE("cli analyze pipeline: idempotent output, csv, ccdf, plot") {
    const std::string dir = make_scratch();
    REQUIRE(run_cli("run --rule random --agents 400 --iterations 20"
                    " --seed 11 --realizations 2 --out " +
                    dir + "/r.json") == 0);

    const std::string analyze_cmd =
        "analyze --in " + dir + "/r.json --out " + dir +
        "/a.json --binning linear --bins 30 --ccdf " + dir + "/c.csv";
    REQUIRE(run_cli(analyze_cmd) == 0);
    const std::string first = file_bytes(dir + "/a.json");
    REQUIRE(run_cli(analyze_cmd) == 0);
    CHECK(file_bytes(dir + "/a.json") == first);

    const nlohmann::json a = io::read_json_file(dir + "/a.json");
    CHECK(a["kind"] == "analysis");
    CHECK(a["source"] == dir + "/r.json");
    CHECK(a["binning"] == "linear");
    CHECK(a["n_samples"] == 400 * 2);
    const std::string csv_path = a["distribution_csv"].get<std::string>();
    CHECK(fs::exists(csv_path));
    const Distribution dist =
        io::distribution_from_csv(file_bytes(csv_path), csv_path);
    CHECK(dist.scheme == BinScheme::Linear);
    CHECK(dist.bins.size() <= 30);

    CHECK(file_bytes(dir + "/c.csv").rfind("wealth,ccdf", 0) == 0);

    REQUIRE(run_cli("plot --in " + csv_path + " --out " + dir +
                    "/p.svg --mode semilog") == 0);
    const std::string svg = file_bytes(dir + "/p.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.rfind("</svg>") != std::string::npos);
    CHECK(run_cli("plot --in " + csv_path + " --out " + dir +
                  "/p2.svg --mode polar") == 1);
}

TEST_CASE("cli sweep produces classified entries and a manifest") {
    const std::string dir = make_scratch();
    REQUIRE(run_cli("sweep --rule nonmutual --agents 600 --iterations 40"
                    " --seed 2 --realizations 2 --beta-from 0.3"
                    " --beta-to 0.4 --beta-step 0.1 --binning log"
                    " --bins 12 --out " +
                    dir + "/s.json") == 0);
    const nlohmann::json s = io::read_json_file(dir + "/s.json");
    CHECK(s["kind"] == "sweep_result");
    CHECK(s["binning"] == "log");
    REQUIRE(s["entries"].size() == 2);
    CHECK(s["entries"][0]["beta"].get<double>() == 0.3);
    CHECK(s["entries"][1]["beta"].get<double>() == 0.4);
    for (const auto& entry : s["entries"]) {
        CHECK(entry.contains("seed"));
        CHECK(entry.contains("verdict"));
    }
    CHECK(fs::exists(dir + "/s.json.manifest.json"));
    // Classification at this pinned seed: both points power law.
    CHECK(s["transition_beta"].get<double>() == 0.4);
}
