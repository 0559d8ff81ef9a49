#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace econoswap {

/// Agent wealth state for one simulation realization. Wealth is held as a
/// nonnegative double; the model forbids debt. `sorted_index` lists agent
/// ids ordered by (wealth, id) and is rebuilt at the start of each
/// iteration's pairing pass, not maintained incrementally: within an
/// iteration each agent trades at most once, so pre-iteration wealths
/// decide all eligibility.
struct Population {
    std::vector<double> wealth;
    std::vector<std::uint32_t> sorted_index;

    std::size_t size() const noexcept { return wealth.size(); }

    /// Rebuilds sorted_index from the current wealth vector. Ties are
    /// broken by agent id so the ordering is a deterministic function of
    /// the wealth vector.
    void rebuild_sorted_index();
};

/// Builds a population of n agents each holding exactly w0.
/// Throws std::invalid_argument for n < 2 (no pair possible) or w0 < 0.
Population init_population(std::size_t n, double w0);

/// Sum of all agent wealths under Neumaier compensated summation, so the
/// closed-economy conservation check stays meaningful at N = 10^4 over
/// hundreds of iterations.
double total_wealth(const Population& pop);

/// Compensated sum of an arbitrary sample span; total_wealth delegates
/// here and the analysis module reuses it for density normalization.
double compensated_sum(std::span<const double> values);

/// Standard Gini coefficient of the wealth vector, in [0, 1].
/// Throws std::invalid_argument when total wealth is not positive
/// (the coefficient is undefined for an all-zero population) or when a
/// negative wealth is present.
double gini(const Population& pop);

}  // namespace econoswap
