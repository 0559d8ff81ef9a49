#pragma once

#include <cstdint>
#include <string>

#include "econoswap/analysis.hpp"

namespace econoswap {

enum class PlotMode : std::uint8_t { Semilog, LogLog };

/// Renders a binned density and its fitted line as a self-contained SVG
/// document (no external references). Semilog mode draws density on a
/// log axis against linear wealth, the exponential-fit view; loglog
/// draws both axes logarithmic, the power-law view. The fitted line
/// spans the fit's window and the annotation reports its exponent and
/// R-squared. Throws std::invalid_argument when fewer than two bins
/// have positive density (nothing to draw).
std::string render_plot(const Distribution& dist, const FitResult& fit,
                        PlotMode mode, const std::string& title);

}  // namespace econoswap
