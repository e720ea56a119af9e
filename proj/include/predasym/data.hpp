#pragma once

#include "predasym/rng.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace predasym {

/// Uniformly sampled scalar observations. Immutable after construction;
/// the constructor rejects empty, non-finite or badly spaced input.
class TimeSeries {
public:
    TimeSeries(std::vector<double> values, double dt = 1.0, std::string label = {});

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// Contiguous sub-range [start, start + length).
    [[nodiscard]] TimeSeries slice(std::size_t start, std::size_t length) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
    double dt_;
    std::string label_;
};

/// Columns of equal length and spacing.
class MultiSeries {
public:
    MultiSeries() = default;
    explicit MultiSeries(std::vector<TimeSeries> columns);

    [[nodiscard]] const std::vector<TimeSeries>& columns() const noexcept { return columns_; }
    [[nodiscard]] const TimeSeries& operator[](std::size_t i) const noexcept { return columns_[i]; }
    [[nodiscard]] std::size_t width() const noexcept { return columns_.size(); }
    [[nodiscard]] std::size_t length() const noexcept
    {
        return columns_.empty() ? 0 : columns_.front().size();
    }

    /// Column lookup by label; throws ParseError when absent.
    [[nodiscard]] const TimeSeries& column(const std::string& label) const;

    friend bool operator==(const MultiSeries&, const MultiSeries&) = default;

private:
    std::vector<TimeSeries> columns_;
};

/// Observations with Gaussian uncertainty in both value and age.
struct UncertainSeries {
    std::vector<double> value_mean;
    std::vector<double> value_sd;
    std::vector<double> age_mean;
    std::vector<double> age_sd;

    /// Throws LengthMismatch / NonFinite / Validation on contract breaches.
    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return value_mean.size(); }
};

enum class SeriesFormat { Csv, Json };

SeriesFormat parse_format(const std::string& name);

/// Load selected columns (all columns when `columns` is empty).
MultiSeries load_series(const std::filesystem::path& path, SeriesFormat format,
                        std::span<const std::string> columns = {});

/// Parse CSV text into a header and string cells. Quoted fields follow
/// RFC 4180. Throws ParseError on ragged rows or empty input.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& text);

MultiSeries series_from_csv(const std::string& text, std::span<const std::string> columns = {});
MultiSeries series_from_json(const std::string& text, std::span<const std::string> columns = {});

std::string series_to_csv(const MultiSeries& series);
std::string series_to_json(const MultiSeries& series);
void write_series(const MultiSeries& series, const std::filesystem::path& path, SeriesFormat format);

/// Uncertain series CSV with columns value_mean, value_sd, age_mean, age_sd.
UncertainSeries load_uncertain_csv(const std::filesystem::path& path);
UncertainSeries uncertain_from_csv(const std::string& text);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double stddev(std::span<const double> xs);

/// ts + e with e ~ N(0, (fraction * sd(ts))^2), drawn from `seed`.
TimeSeries add_observational_noise(const TimeSeries& ts, double fraction, Seed seed);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace predasym
