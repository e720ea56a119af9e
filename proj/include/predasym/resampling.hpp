#pragma once

// Segment and uncertainty ensembles for single empirical records.

#include "predasym/asymmetry.hpp"
#include "predasym/data.hpp"
#include "predasym/embedding.hpp"
#include "predasym/estimators.hpp"
#include "predasym/rng.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace predasym {

struct SegmentSpec {
    std::size_t count = 1;
    double min_frac = 1.0;
    double max_frac = 1.0;
    Seed seed{};

    /// Validation error unless 0 < min_frac <= max_frac <= 1 and count >= 1.
    void validate() const;
};

struct Segment {
    std::size_t start = 0;
    std::size_t length = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Lengths uniform on the integers in [ceil(min_frac N), floor(max_frac N)],
/// starts uniform over valid positions. TooShort if the shortest admissible
/// length is below `min_length`.
std::vector<Segment> random_segments(std::size_t n, const SegmentSpec& spec, std::size_t min_length = 2);
std::vector<TimeSeries> random_segments(const TimeSeries& ts, const SegmentSpec& spec, std::size_t min_length = 2);

struct Resampled {
    TimeSeries series;
    long first_bin = 0;      ///< bin index of series[0]; bin b is centred on b * bin_width
    bool inversions = false; ///< drawn ages reordered at least one pair of observations
};

/// One Monte Carlo draw of ages and values, averaged in fixed-width bins.
/// Empty interior bins are interpolated; the series spans the first to the
/// last occupied bin. EmptyRange if fewer than two bins are occupied.
Resampled resample_uncertain(const UncertainSeries& us, double bin_width, Seed seed);

struct EnsembleConfig {
    SegmentSpec segments;
    /// Uncertainty draws; each is analysed on `segments.count` segments.
    /// 0 analyses the means once (and is the only option for plain series).
    std::size_t resamples = 0;
    double bin_width = 1.0;
    int eta_max = 10;
    double f = 1.0;
    EmbeddingSpec embedding;
    EstimatorOptions estimator;
    double lower_pct = 10.0;
    double upper_pct = 90.0;
    int jobs = 1;
};

struct EnsembleCurve {
    std::vector<int> etas;
    std::vector<double> median; ///< NaN where no member had a defined value
    std::vector<double> lower;
    std::vector<double> upper;
    double lower_pct = 10.0;
    double upper_pct = 90.0;
};

struct EnsembleResult {
    EnsembleCurve xy;
    EnsembleCurve yx;
    std::size_t members = 0; ///< successful members
    std::size_t failures = 0;
    bool age_inversions = false;
};

/// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double pct);

EnsembleResult ensemble_asymmetry(const TimeSeries& x, const TimeSeries& y, const EnsembleConfig& cfg);
EnsembleResult ensemble_asymmetry(const UncertainSeries& x, const UncertainSeries& y, const EnsembleConfig& cfg);

/// Columns eta, direction, median, lo, hi.
std::string ensemble_to_csv(const EnsembleResult& result);

} // namespace predasym
