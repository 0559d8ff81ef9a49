#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace econoswap {

enum class BinScheme : std::uint8_t { Linear, Logarithmic };

struct Bin {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;
    std::uint64_t count = 0;
    double density = 0.0;
};

/// Binned probability density of a wealth sample. Samples equal to zero
/// never enter a bin; their fraction is reported in zero_mass so that
/// sum(density * width) + zero_mass = 1. The linear scheme spans
/// [0, max] with equal widths and arithmetic bin centers; the
/// logarithmic scheme spans [min positive, max] with a constant
/// geometric ratio and geometric-mean centers.
struct Distribution {
    BinScheme scheme = BinScheme::Linear;
    std::vector<Bin> bins;
    double zero_mass = 0.0;
    std::uint64_t n_samples = 0;
};

/// Bins `samples` into `bin_count` bins under the given scheme.
/// Throws std::invalid_argument for empty input, a negative sample,
/// bin_count = 0, a logarithmic request without at least two distinct
/// positive values, or non-finite samples. All-zero input under the
/// linear scheme yields an empty bin list with zero_mass = 1.
Distribution build_histogram(std::span<const double> samples,
                             BinScheme scheme, std::size_t bin_count);

enum class FitModel : std::uint8_t { Exponential, PowerLaw };

struct FitResult {
    FitModel model = FitModel::Exponential;
    /// Exponential: decay rate 1/T in inverse wealth units.
    /// Power law: Pareto exponent gamma. Both from -slope.
    double exponent = 0.0;
    /// Intercept of the regression line in log-density space.
    double intercept = 0.0;
    double r_squared = 0.0;
    /// Span of the bin centers actually used by the regression.
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::size_t n_points = 0;
};

/// Options shared by both fitters. `window` restricts the fit to bins
/// whose center lies in [lo, hi] (inclusive); `min_count` drops bins
/// with fewer samples to suppress tail noise (default 5).
struct FitOptions {
    std::optional<std::pair<double, double>> window;
    std::uint64_t min_count = 5;
};

/// Ordinary least squares of ln(density) against bin center over usable
/// bins (nonzero density, count >= min_count, center inside window).
/// exponent = -slope, i.e. the rate 1/T of density ~ exp(-w/T).
/// Throws std::invalid_argument with fewer than 3 usable bins.
FitResult fit_exponential(const Distribution& dist,
                          const FitOptions& options = {});

/// Ordinary least squares of ln(density) against ln(center); exponent is
/// the Pareto gamma of density ~ w^-gamma. Usable bins additionally need
/// a positive center. Throws std::invalid_argument with fewer than 3
/// usable bins.
FitResult fit_power_law(const Distribution& dist,
                        const FitOptions& options = {});

/// Squared Pearson correlation of two equal-length series.
/// Throws std::invalid_argument for n < 3, length mismatch, or zero
/// variance in either coordinate.
double pearson_r_squared(std::span<const double> xs,
                         std::span<const double> ys);

enum class Verdict : std::uint8_t {
    Exponential,
    PowerLaw,
    Mixed,
    Indeterminate
};

/// A verdict plus the fits that support it. For classify() the two fits
/// cover the full positive-wealth window; for split_fit() they are the
/// body and tail fits.
struct Classification {
    Verdict verdict = Verdict::Indeterminate;
    double threshold = 0.95;
    FitResult exponential_fit;
    FitResult power_law_fit;
};

/// Runs both fitters over the full positive-wealth window and picks the
/// model with the higher R-squared, provided it reaches the threshold;
/// Indeterminate otherwise. An exact R-squared tie resolves to
/// Exponential. Mixed verdicts come only from split_fit. Propagates
/// fitter errors.
Classification classify(const Distribution& dist, double threshold = 0.95);

struct SplitFitResult {
    FitResult body;
    FitResult tail;
    Classification classification;
};

/// Optional overrides for split_fit. `window` intersects both sides'
/// center ranges before the breakpoint split; min_count as in
/// FitOptions. Defaults reproduce the plain breakpoint split.
struct SplitFitOptions {
    std::optional<std::pair<double, double>> window;
    std::uint64_t min_count = 5;
};

/// Two-regime fit: exponential on bins with center < breakpoint,
/// power law on bins with center > breakpoint. Verdict is Mixed iff
/// both sides reach the threshold, Indeterminate otherwise. Throws when
/// either side has fewer than 3 usable bins.
SplitFitResult split_fit(const Distribution& dist, double breakpoint,
                         double threshold = 0.95,
                         const SplitFitOptions& options = {});

struct SweepEntry {
    double beta = 0.0;
    Classification classification;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::optional<double> transition_beta;
};

/// Largest beta classified PowerLaw, or nullopt if none. Entries must be
/// sorted by strictly increasing beta. Throws std::invalid_argument on
/// an empty sweep.
std::optional<double> find_transition(const SweepResult& sweep);

/// Complementary cumulative distribution evaluated at each distinct
/// sample value: pairs (w, P(W >= w)), ascending in w. Inspection
/// output; no acceptance gate uses it.
std::vector<std::pair<double, double>> ccdf_points(
    std::span<const double> samples);

}  // namespace econoswap
