#pragma once

// Brute-force reference models for the pairing rules, used by the unit
// tests and the acceptance suite. enumerate_sequential reproduces the
// sequential pairing process exactly (uniform draw over the unprocessed
// pool, uniform partner among eligible, permanent skip when none), so the
// production implementation can be checked against it outcome-by-outcome
// and probability-by-probability on small populations.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "econoswap/exchange.hpp"
#include "econoswap/pairing.hpp"

namespace econoswap::testing {

/// Canonical text form of an outcome: sorted "(a,b)" pairs then "|u"
/// unpaired ids, ascending. Two outcomes are equal iff their keys are.
inline std::string outcome_key(
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs,
    std::vector<std::uint32_t> unpaired) {
    for (auto& p : pairs)
        if (p.first > p.second) std::swap(p.first, p.second);
    std::sort(pairs.begin(), pairs.end());
    std::sort(unpaired.begin(), unpaired.end());
    std::string key;
    for (const auto& p : pairs)
        key += "(" + std::to_string(p.first) + "," +
               std::to_string(p.second) + ")";
    for (const auto u : unpaired) key += "|" + std::to_string(u);
    return key;
}

inline std::string outcome_key(const PairingOutcome& outcome) {
    return outcome_key(outcome.pairs, outcome.unpaired);
}

/// eligible(i, j): may drawn agent i pair with unprocessed agent j?
using EligibilityFn =
    std::function<bool(std::uint32_t, std::uint32_t)>;

namespace detail {

inline void enumerate_sequential_rec(
    std::uint32_t n, std::uint32_t pool, double prob,
    std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
    std::vector<std::uint32_t>& unpaired, const EligibilityFn& eligible,
    std::map<std::string, double>& acc) {
    if (pool == 0) {
        acc[outcome_key(pairs, unpaired)] += prob;
        return;
    }
    std::uint32_t pool_size = 0;
    for (std::uint32_t i = 0; i < n; ++i)
        if (pool & (1u << i)) ++pool_size;
    const double p_draw = prob / pool_size;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!(pool & (1u << i))) continue;
        std::vector<std::uint32_t> candidates;
        for (std::uint32_t j = 0; j < n; ++j)
            if (j != i && (pool & (1u << j)) && eligible(i, j))
                candidates.push_back(j);
        if (candidates.empty()) {
            unpaired.push_back(i);
            enumerate_sequential_rec(n, pool & ~(1u << i), p_draw, pairs,
                                     unpaired, eligible, acc);
            unpaired.pop_back();
        } else {
            const double p_pick = p_draw / candidates.size();
            for (const auto j : candidates) {
                pairs.emplace_back(i, j);
                enumerate_sequential_rec(n,
                                         pool & ~((1u << i) | (1u << j)),
                                         p_pick, pairs, unpaired, eligible,
                                         acc);
                pairs.pop_back();
            }
        }
    }
}

// remaining must have even size; the odd case is split on the leftover
// agent by the caller.
inline void enumerate_matchings_rec(
    std::vector<std::uint32_t> remaining,
    std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
    std::vector<std::string>& outcomes) {
    if (remaining.empty()) {
        outcomes.push_back(outcome_key(pairs, {}));
        return;
    }
    const std::uint32_t first = remaining[0];
    for (std::size_t k = 1; k < remaining.size(); ++k) {
        std::vector<std::uint32_t> rest;
        for (std::size_t m = 1; m < remaining.size(); ++m)
            if (m != k) rest.push_back(remaining[m]);
        pairs.emplace_back(first, remaining[k]);
        enumerate_matchings_rec(std::move(rest), pairs, outcomes);
        pairs.pop_back();
    }
}

}  // namespace detail

/// Exact outcome distribution of the sequential pairing process on n
/// agents (n <= 16) under the given eligibility predicate.
inline std::map<std::string, double> enumerate_sequential(
    std::uint32_t n, const EligibilityFn& eligible) {
    std::map<std::string, double> acc;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<std::uint32_t> unpaired;
    detail::enumerate_sequential_rec(n, (1u << n) - 1, 1.0, pairs,
                                     unpaired, eligible, acc);
    return acc;
}

/// All perfect matchings of {0..n-1} (odd n: every agent once as the
/// unpaired leftover), each with equal probability. This is the outcome
/// distribution of the shuffle-and-pair-adjacent random rule.
inline std::map<std::string, double> enumerate_uniform_matching(
    std::uint32_t n) {
    std::vector<std::string> outcomes;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    if (n % 2 == 0) {
        std::vector<std::uint32_t> ids(n);
        for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
        detail::enumerate_matchings_rec(std::move(ids), pairs, outcomes);
    } else {
        // The unpaired agent is uniform over the population and the rest
        // form a uniform perfect matching, so enumerate per leftover.
        for (std::uint32_t u = 0; u < n; ++u) {
            std::vector<std::uint32_t> ids;
            for (std::uint32_t i = 0; i < n; ++i)
                if (i != u) ids.push_back(i);
            std::vector<std::string> sub;
            detail::enumerate_matchings_rec(std::move(ids), pairs, sub);
            for (auto& key : sub) outcomes.push_back(key + "|" +
                                                     std::to_string(u));
        }
    }
    std::map<std::string, double> acc;
    for (const auto& key : outcomes)
        acc[key] += 1.0 / outcomes.size();
    return acc;
}

/// Eligibility predicates matching the production rules, evaluated on a
/// fixed wealth vector.
inline EligibilityFn nonmutual_eligibility(std::vector<double> wealth,
                                           double beta) {
    return [wealth = std::move(wealth), beta](std::uint32_t i,
                                              std::uint32_t j) {
        return in_range(wealth[i], wealth[j], beta);
    };
}

inline EligibilityFn mutual_eligibility(std::vector<double> wealth,
                                        double beta) {
    return [wealth = std::move(wealth), beta](std::uint32_t i,
                                              std::uint32_t j) {
        return mutual_in_range(wealth[i], wealth[j], beta);
    };
}

inline EligibilityFn mixed_eligibility(std::vector<double> wealth,
                                       double beta, double w_limit) {
    return [wealth = std::move(wealth), beta, w_limit](std::uint32_t i,
                                                       std::uint32_t j) {
        if (wealth[i] < w_limit) return true;
        return mutual_in_range(wealth[i], wealth[j], beta);
    };
}

inline EligibilityFn everyone_eligibility() {
    return [](std::uint32_t, std::uint32_t) { return true; };
}

}  // namespace econoswap::testing
