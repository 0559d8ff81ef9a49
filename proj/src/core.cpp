#include "econoswap/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace econoswap {

void Population::rebuild_sorted_index() {
    sorted_index.resize(wealth.size());
    std::iota(sorted_index.begin(), sorted_index.end(), 0u);
    std::sort(sorted_index.begin(), sorted_index.end(),
              [this](std::uint32_t a, std::uint32_t b) {
                  if (wealth[a] != wealth[b]) return wealth[a] < wealth[b];
                  return a < b;
              });
}

Population init_population(std::size_t n, double w0) {
    if (n < 2)
        throw std::invalid_argument(
            "init_population: need at least 2 agents, got " +
            std::to_string(n));
    if (!(w0 >= 0.0))
        throw std::invalid_argument(
            "init_population: initial wealth must be >= 0, got " +
            std::to_string(w0));
    Population pop;
    pop.wealth.assign(n, w0);
    return pop;
}

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double compensation = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            compensation += (sum - t) + v;
        else
            compensation += (v - t) + sum;
        sum = t;
    }
    return sum + compensation;
}

double total_wealth(const Population& pop) {
    return compensated_sum(pop.wealth);
}

double gini(const Population& pop) {
    const std::size_t n = pop.size();
    std::vector<double> sorted(pop.wealth);
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty() && sorted.front() < 0.0)
        throw std::invalid_argument("gini: negative wealth present");
    const double total = compensated_sum(sorted);
    if (!(total > 0.0))
        throw std::invalid_argument("gini: undefined for zero total wealth");
    // G = 2·Σ_i (i+1)·w_(i) / (n·Σw) − (n+1)/n with w_(i) ascending.
    double weighted = 0.0;
    double compensation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(i + 1) * sorted[i];
        const double t = weighted + v;
        if (std::abs(weighted) >= std::abs(v))
            compensation += (weighted - t) + v;
        else
            compensation += (v - t) + weighted;
        weighted = t;
    }
    weighted += compensation;
    const double nd = static_cast<double>(n);
    return 2.0 * weighted / (nd * total) - (nd + 1.0) / nd;
}

}  // namespace econoswap
