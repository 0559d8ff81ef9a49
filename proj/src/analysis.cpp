#include "econoswap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace econoswap {

namespace {

struct SampleExtent {
    double min_positive = std::numeric_limits<double>::infinity();
    double max = 0.0;
    std::uint64_t zeros = 0;
};

SampleExtent scan_samples(std::span<const double> samples) {
    SampleExtent extent;
    for (double w : samples) {
        if (!std::isfinite(w))
            throw std::invalid_argument(
                "build_histogram: non-finite sample " + std::to_string(w));
        if (w < 0.0)
            throw std::invalid_argument(
                "build_histogram: negative sample " + std::to_string(w));
        if (w == 0.0) {
            ++extent.zeros;
        } else {
            extent.min_positive = std::min(extent.min_positive, w);
            extent.max = std::max(extent.max, w);
        }
    }
    return extent;
}

}  // namespace

Distribution build_histogram(std::span<const double> samples,
                             BinScheme scheme, std::size_t bin_count) {
    if (samples.empty())
        throw std::invalid_argument("build_histogram: empty input");
    if (bin_count == 0)
        throw std::invalid_argument("build_histogram: bin_count must be >= 1");

    const SampleExtent extent = scan_samples(samples);
    const auto n = static_cast<std::uint64_t>(samples.size());

    Distribution dist;
    dist.scheme = scheme;
    dist.n_samples = n;
    dist.zero_mass =
        static_cast<double>(extent.zeros) / static_cast<double>(n);

    if (extent.zeros == n) {
        if (scheme == BinScheme::Logarithmic)
            throw std::invalid_argument(
                "build_histogram: logarithmic scheme needs a positive sample");
        return dist;  // all-zero linear input: no bins, zero_mass = 1
    }

    std::vector<std::uint64_t> counts(bin_count, 0);
    std::vector<double> edges(bin_count + 1);

    if (scheme == BinScheme::Linear) {
        const double width =
            extent.max / static_cast<double>(bin_count);
        for (std::size_t k = 0; k <= bin_count; ++k)
            edges[k] = width * static_cast<double>(k);
        edges[bin_count] = extent.max;
        for (double w : samples) {
            if (w == 0.0) continue;
            auto k = static_cast<std::size_t>(w / width);
            if (k >= bin_count) k = bin_count - 1;
            // Edge rounding can land a sample one bin off; nudge it back
            // so bin membership matches the stored edges.
            while (k > 0 && w < edges[k]) --k;
            while (k + 1 < bin_count && w >= edges[k + 1]) ++k;
            ++counts[k];
        }
    } else {
        if (!(extent.min_positive < extent.max))
            throw std::invalid_argument(
                "build_histogram: logarithmic scheme needs two distinct "
                "positive values");
        const double ln_lo = std::log(extent.min_positive);
        const double ln_hi = std::log(extent.max);
        const double ln_step =
            (ln_hi - ln_lo) / static_cast<double>(bin_count);
        for (std::size_t k = 0; k <= bin_count; ++k)
            edges[k] = std::exp(ln_lo + ln_step * static_cast<double>(k));
        edges[0] = extent.min_positive;
        edges[bin_count] = extent.max;
        for (double w : samples) {
            if (w == 0.0) continue;
            auto k = static_cast<std::size_t>(
                (std::log(w) - ln_lo) / ln_step);
            if (k >= bin_count) k = bin_count - 1;
            // Edge rounding can land a sample one bin off; nudge it back
            // so bin membership matches the stored edges.
            while (k > 0 && w < edges[k]) --k;
            while (k + 1 < bin_count && w >= edges[k + 1]) ++k;
            ++counts[k];
        }
    }

    dist.bins.resize(bin_count);
    for (std::size_t k = 0; k < bin_count; ++k) {
        Bin& bin = dist.bins[k];
        bin.lo = edges[k];
        bin.hi = edges[k + 1];
        bin.center = scheme == BinScheme::Linear
                         ? 0.5 * (bin.lo + bin.hi)
                         : std::sqrt(bin.lo * bin.hi);
        bin.count = counts[k];
        const double width = bin.hi - bin.lo;
        bin.density = width > 0.0
                          ? static_cast<double>(bin.count) /
                                (static_cast<double>(n) * width)
                          : 0.0;
    }
    return dist;
}

namespace {

struct RegressionData {
    std::vector<double> xs;
    std::vector<double> ys;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
};

RegressionData usable_points(const Distribution& dist, FitModel model,
                             const FitOptions& options) {
    RegressionData data;
    for (const Bin& bin : dist.bins) {
        if (bin.count < options.min_count || bin.density <= 0.0) continue;
        if (options.window &&
            (bin.center < options.window->first ||
             bin.center > options.window->second))
            continue;
        if (model == FitModel::PowerLaw && !(bin.center > 0.0)) continue;
        data.xs.push_back(model == FitModel::PowerLaw
                              ? std::log(bin.center)
                              : bin.center);
        data.ys.push_back(std::log(bin.density));
        data.lo = std::min(data.lo, bin.center);
        data.hi = std::max(data.hi, bin.center);
    }
    return data;
}

FitResult fit_model(const Distribution& dist, FitModel model,
                    const FitOptions& options) {
    const RegressionData data = usable_points(dist, model, options);
    const std::size_t n = data.xs.size();
    if (n < 3)
        throw std::invalid_argument(
            std::string(model == FitModel::PowerLaw ? "fit_power_law"
                                                    : "fit_exponential") +
            ": needs at least 3 usable bins, got " + std::to_string(n));

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += data.xs[i];
        mean_y += data.ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = data.xs[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (data.ys[i] - mean_y);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("fit: degenerate bin centers");

    const double slope = sxy / sxx;
    FitResult fit;
    fit.model = model;
    fit.exponent = -slope;
    fit.intercept = mean_y - slope * mean_x;
    fit.r_squared = pearson_r_squared(data.xs, data.ys);
    fit.window_lo = data.lo;
    fit.window_hi = data.hi;
    fit.n_points = n;
    return fit;
}

}  // namespace

FitResult fit_exponential(const Distribution& dist,
                          const FitOptions& options) {
    return fit_model(dist, FitModel::Exponential, options);
}

FitResult fit_power_law(const Distribution& dist, const FitOptions& options) {
    return fit_model(dist, FitModel::PowerLaw, options);
}

double pearson_r_squared(std::span<const double> xs,
                         std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("pearson_r_squared: length mismatch");
    const std::size_t n = xs.size();
    if (n < 3)
        throw std::invalid_argument(
            "pearson_r_squared: needs at least 3 points");
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw std::invalid_argument("pearson_r_squared: degenerate variance");
    const double r = sxy / std::sqrt(sxx * syy);
    return r * r;
}

Classification classify(const Distribution& dist, double threshold) {
    Classification result;
    result.threshold = threshold;
    result.exponential_fit = fit_exponential(dist);
    result.power_law_fit = fit_power_law(dist);
    const double r2_exp = result.exponential_fit.r_squared;
    const double r2_pow = result.power_law_fit.r_squared;
    if (r2_exp >= r2_pow)
        result.verdict = r2_exp >= threshold ? Verdict::Exponential
                                             : Verdict::Indeterminate;
    else
        result.verdict = r2_pow >= threshold ? Verdict::PowerLaw
                                             : Verdict::Indeterminate;
    return result;
}

SplitFitResult split_fit(const Distribution& dist, double breakpoint,
                         double threshold, const SplitFitOptions& options) {
    if (!(breakpoint > 0.0) || !std::isfinite(breakpoint))
        throw std::invalid_argument(
            "split_fit: breakpoint must be positive and finite");

    const double window_lo =
        options.window ? options.window->first
                       : -std::numeric_limits<double>::infinity();
    const double window_hi =
        options.window ? options.window->second
                       : std::numeric_limits<double>::infinity();

    FitOptions body_options;
    body_options.min_count = options.min_count;
    body_options.window = {window_lo,
                           std::min(window_hi,
                                    std::nextafter(breakpoint, 0.0))};
    FitOptions tail_options;
    tail_options.min_count = options.min_count;
    tail_options.window = {
        std::max(window_lo,
                 std::nextafter(breakpoint,
                                std::numeric_limits<double>::infinity())),
        window_hi};

    SplitFitResult result;
    result.body = fit_exponential(dist, body_options);
    result.tail = fit_power_law(dist, tail_options);
    result.classification.threshold = threshold;
    result.classification.exponential_fit = result.body;
    result.classification.power_law_fit = result.tail;
    result.classification.verdict =
        result.body.r_squared >= threshold &&
                result.tail.r_squared >= threshold
            ? Verdict::Mixed
            : Verdict::Indeterminate;
    return result;
}

std::optional<double> find_transition(const SweepResult& sweep) {
    if (sweep.entries.empty())
        throw std::invalid_argument("find_transition: empty sweep");
    std::optional<double> transition;
    double previous = -std::numeric_limits<double>::infinity();
    for (const SweepEntry& entry : sweep.entries) {
        if (!(entry.beta > previous))
            throw std::invalid_argument(
                "find_transition: betas must be strictly increasing");
        previous = entry.beta;
        if (entry.classification.verdict == Verdict::PowerLaw)
            transition = entry.beta;
    }
    return transition;
}

std::vector<std::pair<double, double>> ccdf_points(
    std::span<const double> samples) {
    if (samples.empty())
        throw std::invalid_argument("ccdf_points: empty input");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        points.emplace_back(sorted[i],
                            static_cast<double>(sorted.size() - i) / n);
    }
    return points;
}

}  // namespace econoswap
