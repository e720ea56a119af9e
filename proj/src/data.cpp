#include "predasym/data.hpp"

#include "predasym/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace predasym {

namespace {

void require_finite(std::span<const double> xs, const std::string& what)
{
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i])) {
            throw Error(ErrorKind::NonFinite, what + ": non-finite value at index " + std::to_string(i));
        }
    }
}

double parse_cell(const std::string& cell, const std::string& column, std::size_t row)
{
    std::string_view sv(cell);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) {
        sv.remove_prefix(1);
    }
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) {
        sv.remove_suffix(1);
    }
    const std::string where = "column '" + column + "' row " + std::to_string(row + 1);
    if (sv.empty()) {
        throw Error(ErrorKind::ParseError, "missing value in " + where);
    }
    if (sv.front() == '+') {
        sv.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (ec != std::errc() || ptr != sv.data() + sv.size()) {
        throw Error(ErrorKind::ParseError, "non-numeric cell '" + cell + "' in " + where);
    }
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::NonFinite, "non-finite cell '" + cell + "' in " + where);
    }
    return value;
}

std::vector<std::size_t> select_columns(const std::vector<std::string>& header,
                                        std::span<const std::string> columns)
{
    std::vector<std::size_t> idx;
    if (columns.empty()) {
        idx.resize(header.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        return idx;
    }
    for (const auto& name : columns) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw Error(ErrorKind::ParseError, "column '" + name + "' not found");
        }
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    return idx;
}

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

TimeSeries::TimeSeries(std::vector<double> values, double dt, std::string label)
    : values_(std::move(values)), dt_(dt), label_(std::move(label))
{
    if (values_.empty()) {
        throw Error(ErrorKind::TooShort, "time series '" + label_ + "' is empty");
    }
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw Error(ErrorKind::Validation, "time series '" + label_ + "' needs dt > 0");
    }
    require_finite(values_, "time series '" + label_ + "'");
}

TimeSeries TimeSeries::slice(std::size_t start, std::size_t length) const
{
    if (length == 0 || start + length > values_.size()) {
        throw Error(ErrorKind::TooShort, "slice out of range");
    }
    return TimeSeries(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(start),
                                          values_.begin() + static_cast<std::ptrdiff_t>(start + length)),
                      dt_, label_);
}

MultiSeries::MultiSeries(std::vector<TimeSeries> columns) : columns_(std::move(columns))
{
    for (const auto& c : columns_) {
        if (c.size() != columns_.front().size()) {
            throw Error(ErrorKind::LengthMismatch, "column '" + c.label() + "' has length " +
                                                       std::to_string(c.size()) + ", expected " +
                                                       std::to_string(columns_.front().size()));
        }
        if (c.dt() != columns_.front().dt()) {
            throw Error(ErrorKind::LengthMismatch, "column '" + c.label() + "' has a different dt");
        }
    }
}

const TimeSeries& MultiSeries::column(const std::string& label) const
{
    for (const auto& c : columns_) {
        if (c.label() == label) {
            return c;
        }
    }
    throw Error(ErrorKind::ParseError, "column '" + label + "' not found");
}

void UncertainSeries::validate() const
{
    const std::size_t n = value_mean.size();
    if (value_sd.size() != n || age_mean.size() != n || age_sd.size() != n) {
        throw Error(ErrorKind::LengthMismatch, "uncertain series columns differ in length");
    }
    if (n == 0) {
        throw Error(ErrorKind::TooShort, "uncertain series is empty");
    }
    require_finite(value_mean, "value_mean");
    require_finite(value_sd, "value_sd");
    require_finite(age_mean, "age_mean");
    require_finite(age_sd, "age_sd");
    for (std::size_t i = 0; i < n; ++i) {
        if (value_sd[i] < 0.0 || age_sd[i] < 0.0) {
            throw Error(ErrorKind::Validation, "negative standard deviation at row " + std::to_string(i + 1));
        }
    }
    if (n >= 2) {
        const bool inc = age_mean[1] > age_mean[0];
        for (std::size_t i = 1; i < n; ++i) {
            const bool ok = inc ? age_mean[i] > age_mean[i - 1] : age_mean[i] < age_mean[i - 1];
            if (!ok) {
                throw Error(ErrorKind::Validation, "age_mean is not strictly monotone at row " +
                                                       std::to_string(i + 1));
            }
        }
    }
}

SeriesFormat parse_format(const std::string& name)
{
    if (name == "csv") {
        return SeriesFormat::Csv;
    }
    if (name == "json") {
        return SeriesFormat::Json;
    }
    throw Error(ErrorKind::Validation, "unknown format '" + name + "' (expected csv or json)");
}

CsvTable parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        const bool blank = record.size() == 1 && record.front().empty() && !field_started;
        if (!blank) {
            records.push_back(std::move(record));
        }
        record.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            end_record();
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) {
        throw Error(ErrorKind::ParseError, "unterminated quoted field");
    }
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }
    if (records.empty()) {
        throw Error(ErrorKind::ParseError, "empty CSV input");
    }

    CsvTable table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw Error(ErrorKind::ParseError, "row " + std::to_string(r) + " has " +
                                                   std::to_string(records[r].size()) + " fields, header has " +
                                                   std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    if (table.rows.empty()) {
        throw Error(ErrorKind::ParseError, "CSV has a header but no data rows");
    }
    return table;
}

MultiSeries series_from_csv(const std::string& text, std::span<const std::string> columns)
{
    const CsvTable table = parse_csv(text);
    const auto idx = select_columns(table.header, columns);
    std::vector<TimeSeries> out;
    for (std::size_t c : idx) {
        std::vector<double> values;
        values.reserve(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            values.push_back(parse_cell(table.rows[r][c], table.header[c], r));
        }
        out.emplace_back(std::move(values), 1.0, table.header[c]);
    }
    return MultiSeries(std::move(out));
}

MultiSeries series_from_json(const std::string& text, std::span<const std::string> columns)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_array()) {
        throw Error(ErrorKind::ParseError, "expected an object with a 'columns' array");
    }
    std::vector<std::string> labels;
    for (const auto& col : doc["columns"]) {
        if (!col.is_object() || !col.contains("values") || !col["values"].is_array()) {
            throw Error(ErrorKind::ParseError, "each column needs a 'values' array");
        }
        labels.push_back(col.value("label", std::string{}));
    }
    const auto idx = select_columns(labels, columns);
    std::vector<TimeSeries> out;
    for (std::size_t c : idx) {
        const auto& col = doc["columns"][c];
        std::vector<double> values;
        for (std::size_t r = 0; r < col["values"].size(); ++r) {
            const auto& v = col["values"][r];
            if (v.is_null()) {
                throw Error(ErrorKind::NonFinite, "null value in column '" + labels[c] + "' row " +
                                                      std::to_string(r + 1));
            }
            if (!v.is_number()) {
                throw Error(ErrorKind::ParseError, "non-numeric value in column '" + labels[c] + "'");
            }
            values.push_back(v.get<double>());
        }
        if (values.empty()) {
            throw Error(ErrorKind::ParseError, "column '" + labels[c] + "' has no values");
        }
        const double dt = col.contains("dt") && col["dt"].is_number() ? col["dt"].get<double>() : 1.0;
        out.emplace_back(std::move(values), dt, labels[c]);
    }
    return MultiSeries(std::move(out));
}

MultiSeries load_series(const std::filesystem::path& path, SeriesFormat format,
                        std::span<const std::string> columns)
{
    const std::string text = read_file(path);
    return format == SeriesFormat::Csv ? series_from_csv(text, columns) : series_from_json(text, columns);
}

std::string format_double(double x)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string series_to_csv(const MultiSeries& series)
{
    std::string out;
    for (std::size_t c = 0; c < series.width(); ++c) {
        if (c) {
            out += ',';
        }
        out += csv_quote(series[c].label());
    }
    out += '\n';
    for (std::size_t r = 0; r < series.length(); ++r) {
        for (std::size_t c = 0; c < series.width(); ++c) {
            if (c) {
                out += ',';
            }
            out += format_double(series[c][r]);
        }
        out += '\n';
    }
    return out;
}

std::string series_to_json(const MultiSeries& series)
{
    nlohmann::json doc;
    doc["columns"] = nlohmann::json::array();
    for (const auto& col : series.columns()) {
        nlohmann::json j;
        j["label"] = col.label();
        j["dt"] = col.dt();
        j["values"] = std::vector<double>(col.values().begin(), col.values().end());
        doc["columns"].push_back(std::move(j));
    }
    return doc.dump() + "\n";
}

void write_series(const MultiSeries& series, const std::filesystem::path& path, SeriesFormat format)
{
    write_file(path, format == SeriesFormat::Csv ? series_to_csv(series) : series_to_json(series));
}

UncertainSeries uncertain_from_csv(const std::string& text)
{
    static const std::vector<std::string> names{"value_mean", "value_sd", "age_mean", "age_sd"};
    const MultiSeries cols = series_from_csv(text, names);
    auto take = [&](std::size_t i) {
        return std::vector<double>(cols[i].values().begin(), cols[i].values().end());
    };
    UncertainSeries us{take(0), take(1), take(2), take(3)};
    us.validate();
    return us;
}

UncertainSeries load_uncertain_csv(const std::filesystem::path& path)
{
    return uncertain_from_csv(read_file(path));
}

double mean(std::span<const double> xs)
{
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs)
{
    if (xs.size() < 2) {
        return 0.0;
    }
    // the mean of a constant run can be off by an ulp
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TimeSeries add_observational_noise(const TimeSeries& ts, double fraction, Seed seed)
{
    if (ts.size() < 2) {
        throw Error(ErrorKind::TooShort, "observational noise needs at least 2 samples");
    }
    if (!(fraction >= 0.0) || !std::isfinite(fraction)) {
        throw Error(ErrorKind::Validation, "noise fraction must be finite and >= 0");
    }
    const double sd = fraction * stddev(ts.values());
    if (sd == 0.0) {
        return ts;
    }
    Rng rng(seed);
    std::vector<double> out(ts.values().begin(), ts.values().end());
    for (double& v : out) {
        v += sd * rng.normal();
    }
    return TimeSeries(std::move(out), ts.dt(), ts.label());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Validation, "cannot write '" + path.string() + "'");
    }
    out << contents;
}

} // namespace predasym
