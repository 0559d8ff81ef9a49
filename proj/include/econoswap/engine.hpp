#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "econoswap/core.hpp"
#include "econoswap/pairing.hpp"
#include "econoswap/rng.hpp"

namespace econoswap {

/// Periodic uniform wealth injection: every agent gains `amount` after
/// each iteration whose 1-based index is divisible by `period`.
struct OpenEconomyPolicy {
    std::uint32_t period = 5;
    double amount = 100.0;

    /// Throws std::invalid_argument for period < 1 or amount <= 0.
    void validate() const;
};

/// Full description of one simulation ensemble. Defaults reproduce the
/// reference protocol: 10^4 agents, initial wealth 1000, 500 iterations,
/// 10 pooled realizations, closed economy.
struct SimulationConfig {
    std::size_t n_agents = 10000;
    double initial_wealth = 1000.0;
    std::uint32_t iterations = 500;
    PairingRule rule;
    std::optional<OpenEconomyPolicy> open_policy;
    std::uint64_t master_seed = 0;
    std::uint32_t realizations = 10;

    /// Throws std::invalid_argument on any invalid field.
    void validate() const;
};

/// Outcome of one realization. total_trace[0] is the initial total
/// wealth; total_trace[t] is the total after iteration t, measured after
/// any injection. min_wealth is the smallest agent wealth observed at any
/// iteration boundary. A nonempty error means the realization failed and
/// the data fields are empty.
struct RealizationResult {
    std::uint32_t index = 0;
    std::uint64_t seed = 0;
    std::vector<double> final_wealth;
    std::vector<double> total_trace;
    double min_wealth = 0.0;
    std::string error;

    bool ok() const noexcept { return error.empty(); }
};

struct SimulationResult {
    SimulationConfig config;
    std::vector<RealizationResult> realizations;

    /// Largest relative deviation of any trace entry from the expected
    /// total (initial total plus accumulated injections). For a closed
    /// economy this is the conservation drift.
    double conservation_drift() const;
};

/// One full pairing pass followed by the exchanges, applied in pair
/// emission order. Unpaired agents are untouched. Wealths read by the
/// pairing rule are the pre-iteration wealths by construction: each agent
/// appears in at most one pair, so no exchange can affect another pair's
/// eligibility within the same pass.
void run_iteration(Population& pop, const PairingRule& rule, Rng& rng);

/// Adds `amount` to every agent. Throws std::invalid_argument for
/// amount <= 0.
void inject_wealth(Population& pop, double amount);

/// Runs one realization: seed derived from (master_seed, index), fresh
/// population, `iterations` iterations with injections per the policy.
/// A pure function of (config, index); any thread may run any index.
/// Exceptions are captured into the error field.
RealizationResult run_realization(const SimulationConfig& config,
                                  std::uint32_t index);

/// Runs the whole ensemble. n_threads = 0 means hardware concurrency;
/// 1 forces serial execution. Results are identical for every schedule
/// because realizations are independent and slot-indexed.
SimulationResult run_simulation(const SimulationConfig& config,
                                unsigned n_threads = 0);

/// Concatenation of final wealth vectors of all successful realizations,
/// in realization order. The default analysis input (pooled samples).
std::vector<double> pooled_final_wealth(const SimulationResult& result);

}  // namespace econoswap
