#pragma once

#include <cstdint>
#include <utility>

#include "econoswap/rng.hpp"

namespace econoswap {

/// Closed wealth interval [max(0, w(1-beta)), w(1+beta)] defining which
/// partners an agent of wealth w may trade with. Both endpoints are
/// inclusive; inclusivity only matters on a measure-zero set but is fixed
/// for determinism.
struct TransactionWindow {
    double lo;
    double hi;
};

/// Throws std::invalid_argument for beta <= 0 or w < 0.
TransactionWindow transaction_window(double w, double beta);

/// True iff w_j lies in agent i's transaction window, endpoints
/// inclusive. Not symmetric: the window width scales with the owner's
/// wealth. The arithmetic here (same products, same clamp) is exactly the
/// arithmetic the pairing module applies to its sorted-index boundaries,
/// so eligibility decisions agree bit-for-bit between the two paths.
inline bool in_range(double w_i, double w_j, double beta) noexcept {
    const double lo = w_i * (1.0 - beta);
    return w_j >= (lo > 0.0 ? lo : 0.0) && w_j <= w_i * (1.0 + beta);
}

/// Both agents inside each other's window; symmetric in (w_i, w_j).
inline bool mutual_in_range(double w_i, double w_j, double beta) noexcept {
    return in_range(w_i, w_j, beta) && in_range(w_j, w_i, beta);
}

enum class Winner : std::uint8_t { First, Second };

/// One resolved exchange: who wins, and the fraction of the loser's
/// wealth that moves. The winner is a fair coin independent of wealths;
/// stake_fraction is uniform on [0, 1).
struct ExchangeDraw {
    Winner winner;
    double stake_fraction;
};

/// Draws winner first, stake second. This call order is part of the
/// reproducibility contract: the loser's stake is the only stake ever
/// used, so drawing one stake after the coin consumes half the variates
/// of drawing one per agent, with an identical transfer distribution.
inline ExchangeDraw draw_exchange(Rng& rng) noexcept {
    const Winner winner = rng.coin() ? Winner::First : Winner::Second;
    return ExchangeDraw{winner, rng.uniform01()};
}

/// Applies one exchange: the loser transfers stake_fraction times its own
/// wealth to the winner. The same rounded transfer is added and
/// subtracted, so the pair sum moves by at most one rounding step, and
/// fl(f*w) <= w for f in [0, 1] keeps the loser nonnegative.
inline std::pair<double, double> transact(double w_i, double w_j,
                                          ExchangeDraw draw) noexcept {
    if (draw.winner == Winner::First) {
        const double dw = draw.stake_fraction * w_j;
        return {w_i + dw, w_j - dw};
    }
    const double dw = draw.stake_fraction * w_i;
    return {w_i - dw, w_j + dw};
}

}  // namespace econoswap
