#include "econoswap/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "econoswap/exchange.hpp"

namespace econoswap {

void OpenEconomyPolicy::validate() const {
    if (period < 1)
        throw std::invalid_argument("open economy: period must be >= 1");
    if (!(amount > 0.0) || !std::isfinite(amount))
        throw std::invalid_argument(
            "open economy: amount must be > 0, got " + std::to_string(amount));
}

void SimulationConfig::validate() const {
    if (n_agents < 2)
        throw std::invalid_argument(
            "config: need at least 2 agents, got " + std::to_string(n_agents));
    if (!(initial_wealth >= 0.0) || !std::isfinite(initial_wealth))
        throw std::invalid_argument(
            "config: initial wealth must be >= 0, got " +
            std::to_string(initial_wealth));
    if (iterations < 1)
        throw std::invalid_argument("config: iterations must be >= 1");
    if (realizations < 1)
        throw std::invalid_argument("config: realizations must be >= 1");
    rule.validate();
    if (open_policy) open_policy->validate();
}

double SimulationResult::conservation_drift() const {
    double drift = 0.0;
    for (const auto& r : realizations) {
        if (!r.ok() || r.total_trace.empty()) continue;
        const double initial = r.total_trace.front();
        if (!(initial > 0.0)) continue;
        const double injection_step =
            config.open_policy
                ? config.open_policy->amount *
                      static_cast<double>(config.n_agents)
                : 0.0;
        for (std::size_t t = 1; t < r.total_trace.size(); ++t) {
            const double injections =
                config.open_policy
                    ? injection_step *
                          static_cast<double>(t / config.open_policy->period)
                    : 0.0;
            const double expected = initial + injections;
            drift = std::max(
                drift, std::abs(r.total_trace[t] - expected) / expected);
        }
    }
    return drift;
}

void run_iteration(Population& pop, const PairingRule& rule, Rng& rng) {
    const PairingOutcome outcome = make_pairs(pop, rule, rng);
    for (const auto& [i, j] : outcome.pairs) {
        const ExchangeDraw draw = draw_exchange(rng);
        const auto [wi, wj] = transact(pop.wealth[i], pop.wealth[j], draw);
        pop.wealth[i] = wi;
        pop.wealth[j] = wj;
    }
}

void inject_wealth(Population& pop, double amount) {
    if (!(amount > 0.0) || !std::isfinite(amount))
        throw std::invalid_argument(
            "inject_wealth: amount must be > 0, got " + std::to_string(amount));
    for (double& w : pop.wealth) w += amount;
}

RealizationResult run_realization(const SimulationConfig& config,
                                  std::uint32_t index) {
    RealizationResult result;
    result.index = index;
    result.seed = derive_seed(config.master_seed, index);
    try {
        config.validate();
        Rng rng(result.seed);
        Population pop = init_population(config.n_agents,
                                         config.initial_wealth);
        result.total_trace.reserve(config.iterations + 1);
        result.total_trace.push_back(total_wealth(pop));
        result.min_wealth = config.initial_wealth;
        for (std::uint32_t t = 1; t <= config.iterations; ++t) {
            run_iteration(pop, config.rule, rng);
            if (config.open_policy && t % config.open_policy->period == 0)
                inject_wealth(pop, config.open_policy->amount);
            result.total_trace.push_back(total_wealth(pop));
            result.min_wealth = std::min(
                result.min_wealth,
                *std::min_element(pop.wealth.begin(), pop.wealth.end()));
        }
        result.final_wealth = std::move(pop.wealth);
    } catch (const std::exception& e) {
        result.final_wealth.clear();
        result.total_trace.clear();
        result.min_wealth = 0.0;
        result.error = e.what();
    }
    return result;
}

SimulationResult run_simulation(const SimulationConfig& config,
                                unsigned n_threads) {
    config.validate();
    SimulationResult result;
    result.config = config;
    result.realizations.resize(config.realizations);

    if (n_threads == 0) {
        n_threads = std::thread::hardware_concurrency();
        if (n_threads == 0) n_threads = 1;
    }
    n_threads = std::min<unsigned>(n_threads, config.realizations);

    if (n_threads <= 1) {
        for (std::uint32_t r = 0; r < config.realizations; ++r)
            result.realizations[r] = run_realization(config, r);
        return result;
    }

    std::atomic<std::uint32_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const std::uint32_t r =
                    next.fetch_add(1, std::memory_order_relaxed);
                if (r >= config.realizations) return;
                result.realizations[r] = run_realization(config, r);
            }
        });
    }
    for (auto& worker : workers) worker.join();
    return result;
}

std::vector<double> pooled_final_wealth(const SimulationResult& result) {
    std::vector<double> pooled;
    for (const auto& r : result.realizations) {
        if (!r.ok()) continue;
        pooled.insert(pooled.end(), r.final_wealth.begin(),
                      r.final_wealth.end());
    }
    return pooled;
}

}  // namespace econoswap
