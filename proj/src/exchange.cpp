#include "econoswap/exchange.hpp"

#include <stdexcept>
#include <string>

namespace econoswap {

TransactionWindow transaction_window(double w, double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument(
            "transaction_window: beta must be > 0, got " +
            std::to_string(beta));
    if (!(w >= 0.0))
        throw std::invalid_argument(
            "transaction_window: wealth must be >= 0, got " +
            std::to_string(w));
    const double lo = w * (1.0 - beta);
    return TransactionWindow{lo > 0.0 ? lo : 0.0, w * (1.0 + beta)};
}

}  // namespace econoswap
