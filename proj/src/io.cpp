#include "econoswap/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace econoswap::io {

namespace {

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw IoError(path + ": " + what);
}

}  // namespace

std::string rule_kind_name(RuleKind kind) {
    switch (kind) {
        case RuleKind::Random: return "random";
        case RuleKind::NonMutualClass: return "nonmutual";
        case RuleKind::MutualClass: return "mutual";
        case RuleKind::Mixed: return "mixed";
    }
    return "random";
}

RuleKind rule_kind_from_name(const std::string& name) {
    if (name == "random") return RuleKind::Random;
    if (name == "nonmutual") return RuleKind::NonMutualClass;
    if (name == "mutual") return RuleKind::MutualClass;
    if (name == "mixed") return RuleKind::Mixed;
    throw IoError("unknown pairing rule '" + name + "'");
}

std::string verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::Exponential: return "exponential";
        case Verdict::PowerLaw: return "power_law";
        case Verdict::Mixed: return "mixed";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

std::string binning_name(BinScheme scheme) {
    return scheme == BinScheme::Linear ? "linear" : "log";
}

BinScheme binning_from_name(const std::string& name) {
    if (name == "linear") return BinScheme::Linear;
    if (name == "log") return BinScheme::Logarithmic;
    throw IoError("unknown binning scheme '" + name + "'");
}

nlohmann::json config_to_json(const SimulationConfig& config) {
    nlohmann::json rule;
    rule["kind"] = rule_kind_name(config.rule.kind);
    if (config.rule.uses_beta()) rule["beta"] = config.rule.beta;
    if (config.rule.kind == RuleKind::Mixed)
        rule["w_limit"] = config.rule.w_limit;

    nlohmann::json j;
    j["agents"] = config.n_agents;
    j["w0"] = config.initial_wealth;
    j["iterations"] = config.iterations;
    j["rule"] = rule;
    if (config.open_policy)
        j["open_policy"] = {{"period", config.open_policy->period},
                            {"amount", config.open_policy->amount}};
    else
        j["open_policy"] = nullptr;
    j["master_seed"] = config.master_seed;
    j["realizations"] = config.realizations;
    return j;
}

SimulationConfig config_from_json(const nlohmann::json& j) {
    SimulationConfig config;
    config.n_agents = j.at("agents").get<std::size_t>();
    config.initial_wealth = j.at("w0").get<double>();
    config.iterations = j.at("iterations").get<std::uint32_t>();
    const auto& rule = j.at("rule");
    config.rule.kind =
        rule_kind_from_name(rule.at("kind").get<std::string>());
    if (config.rule.uses_beta())
        config.rule.beta = rule.at("beta").get<double>();
    if (config.rule.kind == RuleKind::Mixed)
        config.rule.w_limit = rule.at("w_limit").get<double>();
    if (!j.at("open_policy").is_null()) {
        OpenEconomyPolicy policy;
        policy.period = j["open_policy"].at("period").get<std::uint32_t>();
        policy.amount = j["open_policy"].at("amount").get<double>();
        config.open_policy = policy;
    }
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
    config.realizations = j.at("realizations").get<std::uint32_t>();
    return config;
}

nlohmann::json result_to_json(const SimulationResult& result) {
    nlohmann::json j;
    j["format_version"] = format_version;
    j["kind"] = "simulation_result";
    j["config"] = config_to_json(result.config);
    nlohmann::json realizations = nlohmann::json::array();
    for (const auto& r : result.realizations) {
        nlohmann::json jr;
        jr["index"] = r.index;
        jr["seed"] = r.seed;
        jr["min_wealth"] = r.min_wealth;
        if (r.error.empty())
            jr["error"] = nullptr;
        else
            jr["error"] = r.error;
        jr["total_trace"] = r.total_trace;
        jr["final_wealth"] = r.final_wealth;
        realizations.push_back(std::move(jr));
    }
    j["realizations"] = std::move(realizations);
    return j;
}

SimulationResult result_from_json(const nlohmann::json& j) {
    SimulationResult result;
    result.config = config_from_json(j.at("config"));
    for (const auto& jr : j.at("realizations")) {
        RealizationResult r;
        r.index = jr.at("index").get<std::uint32_t>();
        r.seed = jr.at("seed").get<std::uint64_t>();
        r.min_wealth = jr.at("min_wealth").get<double>();
        if (!jr.at("error").is_null())
            r.error = jr["error"].get<std::string>();
        r.total_trace = jr.at("total_trace").get<std::vector<double>>();
        r.final_wealth = jr.at("final_wealth").get<std::vector<double>>();
        result.realizations.push_back(std::move(r));
    }
    return result;
}

nlohmann::json fit_to_json(const FitResult& fit) {
    nlohmann::json j;
    j["model"] = fit.model == FitModel::Exponential ? "exponential"
                                                    : "power_law";
    j["exponent"] = fit.exponent;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["window"] = {fit.window_lo, fit.window_hi};
    j["n_points"] = fit.n_points;
    return j;
}

nlohmann::json classification_to_json(const Classification& c) {
    nlohmann::json j;
    j["verdict"] = verdict_name(c.verdict);
    j["threshold"] = c.threshold;
    j["exponential_fit"] = fit_to_json(c.exponential_fit);
    j["power_law_fit"] = fit_to_json(c.power_law_fit);
    return j;
}

std::string distribution_to_csv(const Distribution& dist) {
    std::string out = "bin_lo,bin_hi,bin_center,count,density\n";
    for (const Bin& bin : dist.bins) {
        out += format_double(bin.lo);
        out += ',';
        out += format_double(bin.hi);
        out += ',';
        out += format_double(bin.center);
        out += ',';
        out += std::to_string(bin.count);
        out += ',';
        out += format_double(bin.density);
        out += '\n';
    }
    return out;
}

Distribution distribution_from_csv(const std::string& text,
                                   const std::string& path_for_errors) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        fail(path_for_errors, "empty distribution CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "bin_lo,bin_hi,bin_center,count,density")
        fail(path_for_errors,
             "bad CSV header, expected "
             "'bin_lo,bin_hi,bin_center,count,density'");

    Distribution dist;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Bin bin;
        char* cursor = nullptr;
        const char* p = line.c_str();
        bin.lo = std::strtod(p, &cursor);
        if (cursor == p || *cursor != ',')
            fail(path_for_errors,
                 "bad CSV row at line " + std::to_string(line_number));
        p = cursor + 1;
        bin.hi = std::strtod(p, &cursor);
        if (cursor == p || *cursor != ',')
            fail(path_for_errors,
                 "bad CSV row at line " + std::to_string(line_number));
        p = cursor + 1;
        bin.center = std::strtod(p, &cursor);
        if (cursor == p || *cursor != ',')
            fail(path_for_errors,
                 "bad CSV row at line " + std::to_string(line_number));
        p = cursor + 1;
        const long long count = std::strtoll(p, &cursor, 10);
        if (cursor == p || *cursor != ',' || count < 0)
            fail(path_for_errors,
                 "bad CSV row at line " + std::to_string(line_number));
        bin.count = static_cast<std::uint64_t>(count);
        p = cursor + 1;
        bin.density = std::strtod(p, &cursor);
        if (cursor == p || *cursor != '\0')
            fail(path_for_errors,
                 "bad CSV row at line " + std::to_string(line_number));
        dist.n_samples += bin.count;
        dist.bins.push_back(bin);
    }
    if (dist.bins.empty())
        fail(path_for_errors, "distribution CSV has no bins");
    if (dist.bins.size() >= 2) {
        const double w0 = dist.bins[0].hi - dist.bins[0].lo;
        const double w1 = dist.bins[1].hi - dist.bins[1].lo;
        dist.scheme = std::abs(w1 - w0) <= 1e-9 * std::max(w0, w1)
                          ? BinScheme::Linear
                          : BinScheme::Logarithmic;
    }
    return dist;
}

std::string ccdf_to_csv(
    const std::vector<std::pair<double, double>>& points) {
    std::string out = "wealth,ccdf\n";
    for (const auto& [w, p] : points) {
        out += format_double(w);
        out += ',';
        out += format_double(p);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::string temp = path + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) fail(path, "cannot open for writing");
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(path, "write failed");
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) fail(path, "rename failed: " + ec.message());
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) fail(path, "read failed");
    return buffer.str();
}

nlohmann::json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(path, "not valid JSON");
    return j;
}

SimulationResult load_result_file(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    if (!j.is_object() || !j.contains("kind") ||
        j["kind"] != "simulation_result")
        fail(path, "not a simulation result file (missing kind)");
    if (!j.contains("format_version") ||
        j["format_version"] != format_version)
        fail(path, "unsupported format_version");
    try {
        return result_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        fail(path, std::string("malformed result file: ") + e.what());
    } catch (const IoError& e) {
        fail(path, e.what());
    }
}

}  // namespace econoswap::io
