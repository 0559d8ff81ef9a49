#include "econoswap/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace econoswap {

void PairingRule::validate() const {
    if (uses_beta() && !(beta > 0.0 && std::isfinite(beta)))
        throw std::invalid_argument(
            "pairing rule: beta must be > 0, got " + std::to_string(beta));
    if (kind == RuleKind::Mixed && !(w_limit > 0.0 && std::isfinite(w_limit)))
        throw std::invalid_argument(
            "pairing rule: w_limit must be > 0, got " +
            std::to_string(w_limit));
}

FenwickTree::FenwickTree(std::size_t n)
    : tree_(n + 1), n_(n), available_(static_cast<std::uint32_t>(n)) {
    // All-ones construction: node i covers the (i & -i) positions ending
    // at i, all of which start available.
    for (std::size_t i = 1; i <= n; ++i)
        tree_[i] = static_cast<std::uint32_t>(i & (~i + 1));
    top_bit_ = 1;
    while ((top_bit_ << 1) <= n_) top_bit_ <<= 1;
}

void FenwickTree::remove(std::size_t pos) {
    for (std::size_t i = pos + 1; i <= n_; i += i & (~i + 1)) --tree_[i];
    --available_;
}

std::uint32_t FenwickTree::count_below(std::size_t pos) const noexcept {
    std::uint32_t sum = 0;
    for (std::size_t i = pos; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
}

std::size_t FenwickTree::select(std::uint32_t k) const noexcept {
    std::size_t pos = 0;
    std::uint32_t remaining = k + 1;
    for (std::size_t bit = top_bit_; bit > 0; bit >>= 1) {
        const std::size_t next = pos + bit;
        if (next <= n_ && tree_[next] < remaining) {
            pos = next;
            remaining -= tree_[next];
        }
    }
    return pos;
}

PairingOutcome pair_random(std::size_t n, Rng& rng) {
    if (n < 2)
        throw std::invalid_argument(
            "pair_random: need at least 2 agents, got " + std::to_string(n));
    std::vector<std::uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng.uniform_below(i + 1));
        std::swap(ids[i], ids[j]);
    }
    PairingOutcome outcome;
    outcome.pairs.reserve(n / 2);
    for (std::size_t i = 0; i + 1 < n; i += 2)
        outcome.pairs.emplace_back(ids[i], ids[i + 1]);
    if (n % 2 != 0) outcome.unpaired.push_back(ids[n - 1]);
    return outcome;
}

namespace {

enum class Eligibility { Everyone, DrawnWindow, MutualWindow };

/// Shared sequential pairing loop over the wealth-sorted ranks.
///
/// Eligibility for both class modes reduces to a contiguous interval of
/// ranks. The interval boundaries are located by partition_point with
/// predicates built from the same products and clamps as in_range, so an
/// agent is inside the rank interval iff in_range (respectively
/// mutual_in_range) holds, bit for bit:
///   drawn window:  w >= max(0, wi(1-b))         and  w <= wi(1+b)
///   mutual adds:   w(1+b) >= wi                 and  w(1-b) <= wi
/// Each conjunct is monotone along the sorted wealths (for beta >= 1 the
/// last conjunct is identically true since w(1-b) <= 0 <= wi), so both
/// boundaries are valid partition points.
PairingOutcome pair_sequential(Population& pop, double beta, double w_limit,
                               bool has_random_branch, Eligibility class_mode,
                               Rng& rng) {
    pop.rebuild_sorted_index();
    const std::size_t n = pop.size();
    const auto& ids = pop.sorted_index;
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) w[r] = pop.wealth[ids[r]];

    FenwickTree avail(n);
    PairingOutcome outcome;
    outcome.pairs.reserve(n / 2);

    while (avail.available() > 0) {
        const std::uint32_t remaining = avail.available();
        const std::size_t rank_i =
            avail.select(static_cast<std::uint32_t>(
                rng.uniform_below(remaining)));
        avail.remove(rank_i);
        const double wi = w[rank_i];

        std::size_t lo_rank = 0;
        std::size_t end_rank = n;
        if (!(has_random_branch && wi < w_limit)) {
            const double lo_raw = wi * (1.0 - beta);
            const double lo_w = lo_raw > 0.0 ? lo_raw : 0.0;
            const double hi_w = wi * (1.0 + beta);
            if (class_mode == Eligibility::MutualWindow) {
                lo_rank = static_cast<std::size_t>(
                    std::partition_point(
                        w.begin(), w.end(),
                        [&](double x) {
                            return x < lo_w || x * (1.0 + beta) < wi;
                        }) -
                    w.begin());
                end_rank = static_cast<std::size_t>(
                    std::partition_point(
                        w.begin() + static_cast<std::ptrdiff_t>(lo_rank),
                        w.end(),
                        [&](double x) {
                            return x <= hi_w && x * (1.0 - beta) <= wi;
                        }) -
                    w.begin());
            } else {
                lo_rank = static_cast<std::size_t>(
                    std::partition_point(w.begin(), w.end(),
                                         [&](double x) { return x < lo_w; }) -
                    w.begin());
                end_rank = static_cast<std::size_t>(
                    std::partition_point(
                        w.begin() + static_cast<std::ptrdiff_t>(lo_rank),
                        w.end(), [&](double x) { return x <= hi_w; }) -
                    w.begin());
            }
        }

        const std::uint32_t eligible = avail.count_range(lo_rank, end_rank);
        if (eligible == 0) {
            outcome.unpaired.push_back(ids[rank_i]);
            continue;
        }
        const std::uint32_t pick = static_cast<std::uint32_t>(
            rng.uniform_below(eligible));
        const std::size_t rank_j =
            avail.select(avail.count_below(lo_rank) + pick);
        avail.remove(rank_j);
        outcome.pairs.emplace_back(ids[rank_i], ids[rank_j]);
    }
    return outcome;
}

}  // namespace

PairingOutcome pair_nonmutual(Population& pop, double beta, Rng& rng) {
    PairingRule::non_mutual_class(beta).validate();
    return pair_sequential(pop, beta, 0.0, false, Eligibility::DrawnWindow,
                           rng);
}

PairingOutcome pair_mutual(Population& pop, double beta, Rng& rng) {
    PairingRule::mutual_class(beta).validate();
    return pair_sequential(pop, beta, 0.0, false, Eligibility::MutualWindow,
                           rng);
}

PairingOutcome pair_mixed(Population& pop, double beta, double w_limit,
                          Rng& rng) {
    PairingRule::mixed(beta, w_limit).validate();
    return pair_sequential(pop, beta, w_limit, true,
                           Eligibility::MutualWindow, rng);
}

PairingOutcome make_pairs(Population& pop, const PairingRule& rule, Rng& rng) {
    rule.validate();
    switch (rule.kind) {
        case RuleKind::Random:
            return pair_random(pop.size(), rng);
        case RuleKind::NonMutualClass:
            return pair_nonmutual(pop, rule.beta, rng);
        case RuleKind::MutualClass:
            return pair_mutual(pop, rule.beta, rng);
        case RuleKind::Mixed:
            return pair_mixed(pop, rule.beta, rule.w_limit, rng);
    }
    throw std::invalid_argument("pairing rule: unknown kind");
}

}  // namespace econoswap
