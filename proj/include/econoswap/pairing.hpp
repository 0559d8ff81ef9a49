#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "econoswap/core.hpp"
#include "econoswap/rng.hpp"

namespace econoswap {

enum class RuleKind : std::uint8_t { Random, NonMutualClass, MutualClass, Mixed };

/// Partner-selection rule for one simulation. beta is the relative
/// transaction range for the class variants; w_limit is the mixed rule's
/// threshold below which agents pair freely. beta > 1 is accepted but
/// outside the studied grid (0.1..1.0); callers may surface
/// out_of_studied_range() as a warning.
struct PairingRule {
    RuleKind kind = RuleKind::Random;
    double beta = 0.0;
    double w_limit = 0.0;

    static PairingRule random() { return {RuleKind::Random, 0.0, 0.0}; }
    static PairingRule non_mutual_class(double beta) {
        return {RuleKind::NonMutualClass, beta, 0.0};
    }
    static PairingRule mutual_class(double beta) {
        return {RuleKind::MutualClass, beta, 0.0};
    }
    static PairingRule mixed(double beta, double w_limit) {
        return {RuleKind::Mixed, beta, w_limit};
    }

    bool uses_beta() const noexcept { return kind != RuleKind::Random; }
    bool out_of_studied_range() const noexcept {
        return uses_beta() && beta > 1.0;
    }

    /// Throws std::invalid_argument on non-finite or non-positive beta for
    /// class variants, or non-positive w_limit for Mixed.
    void validate() const;
};

/// Result of one pairing pass: a partition of all agent ids into
/// unordered pairs plus the agents that found no admissible partner.
/// Every id appears exactly once across pairs and unpaired.
struct PairingOutcome {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<std::uint32_t> unpaired;
};

/// Fenwick (binary indexed) tree over an availability bitmap, indexed by
/// rank in the wealth-sorted order. Supports O(log N) prefix counts and
/// O(log N) selection of the k-th available rank, which together give
/// uniform selection among available agents inside a contiguous rank
/// interval without rejection sampling.
class FenwickTree {
public:
    /// All n positions start available.
    explicit FenwickTree(std::size_t n);

    std::uint32_t available() const noexcept { return available_; }

    /// Marks a currently-available 0-based position unavailable.
    void remove(std::size_t pos);

    /// Number of available positions with rank < pos.
    std::uint32_t count_below(std::size_t pos) const noexcept;

    /// Number of available positions with rank in [lo, end).
    std::uint32_t count_range(std::size_t lo, std::size_t end) const noexcept {
        return count_below(end) - count_below(lo);
    }

    /// 0-based position of the (k+1)-th available rank; k < available().
    std::size_t select(std::uint32_t k) const noexcept;

private:
    std::vector<std::uint32_t> tree_;
    std::size_t n_;
    std::size_t top_bit_;
    std::uint32_t available_;
};

/// Uniform random perfect matching: shuffles ids and pairs adjacent
/// entries. Odd n leaves exactly one agent unpaired.
/// Throws std::invalid_argument for n < 2.
PairingOutcome pair_random(std::size_t n, Rng& rng);

/// Sequential class pairing, drawn agent's window only: repeatedly draw
/// an unprocessed agent i uniformly; its eligible set is the unprocessed
/// j != i with in_range(w_i, w_j, beta); pair with a uniform eligible j,
/// or mark i unpaired for the rest of the iteration if none exists.
/// Eligibility is evaluated on wealths frozen at iteration start, which
/// makes the permanent-skip marking exact: the candidate pool only
/// shrinks, so an empty eligible set can never become nonempty later.
/// Rebuilds pop.sorted_index. Throws std::invalid_argument for beta <= 0.
PairingOutcome pair_nonmutual(Population& pop, double beta, Rng& rng);

/// Same sequential process with mutual eligibility: both agents must lie
/// in each other's window.
PairingOutcome pair_mutual(Population& pop, double beta, Rng& rng);

/// Mixed rule: a drawn agent with w_i < w_limit uses the random branch
/// (every unprocessed j is eligible); w_i >= w_limit uses the mutual
/// branch. The partner's own branch is irrelevant (no veto), so a poor
/// initiator may pair with a rich agent. Equality at w_limit takes the
/// class branch. Throws std::invalid_argument for beta <= 0 or
/// w_limit <= 0.
PairingOutcome pair_mixed(Population& pop, double beta, double w_limit,
                          Rng& rng);

/// Dispatches to the rule's pairing function after validate().
PairingOutcome make_pairs(Population& pop, const PairingRule& rule, Rng& rng);

}  // namespace econoswap
