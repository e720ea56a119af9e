#include "predasym/resampling.hpp"

#include "predasym/error.hpp"
#include "predasym/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace predasym {

void SegmentSpec::validate() const
{
    if (count < 1) {
        throw Error(ErrorKind::Validation, "segment count must be >= 1");
    }
    if (!(min_frac > 0.0 && min_frac <= 1.0) || !(max_frac > 0.0 && max_frac <= 1.0)) {
        throw Error(ErrorKind::Validation, "segment fractions must lie in (0, 1]");
    }
    if (min_frac > max_frac) {
        throw Error(ErrorKind::Validation, "min_frac must not exceed max_frac");
    }
}

std::vector<Segment> random_segments(std::size_t n, const SegmentSpec& spec, std::size_t min_length)
{
    spec.validate();
    const double nd = static_cast<double>(n);
    // small tolerance so that e.g. 0.75 * 1000 is not pushed to 751
    const auto shortest = static_cast<std::size_t>(std::ceil(spec.min_frac * nd - 1e-9));
    const auto longest = std::max(shortest, static_cast<std::size_t>(std::floor(spec.max_frac * nd + 1e-9)));
    if (shortest < std::max<std::size_t>(min_length, 1)) {
        throw Error(ErrorKind::TooShort, "shortest segment (" + std::to_string(shortest) + ") is below the minimum " +
                                             std::to_string(min_length));
    }
    Rng rng(spec.seed);
    std::vector<Segment> out;
    out.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const auto len = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(shortest), static_cast<std::int64_t>(longest)));
        const auto start = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n - len)));
        out.push_back({start, len});
    }
    return out;
}

std::vector<TimeSeries> random_segments(const TimeSeries& ts, const SegmentSpec& spec, std::size_t min_length)
{
    std::vector<TimeSeries> out;
    for (const auto& s : random_segments(ts.size(), spec, min_length)) {
        out.push_back(ts.slice(s.start, s.length));
    }
    return out;
}

Resampled resample_uncertain(const UncertainSeries& us, double bin_width, Seed seed)
{
    us.validate();
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw Error(ErrorKind::Validation, "bin width must be positive");
    }
    const std::size_t n = us.size();
    Rng rng(seed);
    std::vector<double> ages(n);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        ages[i] = rng.normal(us.age_mean[i], us.age_sd[i]);
        values[i] = rng.normal(us.value_mean[i], us.value_sd[i]);
    }

    std::vector<std::size_t> by_mean(n);
    std::iota(by_mean.begin(), by_mean.end(), 0);
    std::sort(by_mean.begin(), by_mean.end(), [&](auto a, auto b) { return us.age_mean[a] < us.age_mean[b]; });
    bool inversions = false;
    for (std::size_t i = 1; i < n; ++i) {
        inversions = inversions || ages[by_mean[i]] < ages[by_mean[i - 1]];
    }

    std::map<long, std::pair<double, std::size_t>> bins;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = std::floor(ages[i] / bin_width + 0.5);
        if (std::abs(b) > 1e15) {
            throw Error(ErrorKind::EmptyRange, "age outside the representable bin range");
        }
        auto& [sum, count] = bins[static_cast<long>(b)];
        sum += values[i];
        ++count;
    }
    const long first = bins.begin()->first;
    const long last = bins.rbegin()->first;
    if (last - first + 1 < 2) {
        throw Error(ErrorKind::EmptyRange, "resampled ages occupy fewer than two bins");
    }
    if (last - first > 100'000'000) {
        throw Error(ErrorKind::EmptyRange, "resampled age range spans too many bins");
    }

    std::vector<double> out(static_cast<std::size_t>(last - first + 1), 0.0);
    auto prev = bins.begin();
    for (auto it = bins.begin(); it != bins.end(); ++it) {
        const double v = it->second.first / static_cast<double>(it->second.second);
        out[static_cast<std::size_t>(it->first - first)] = v;
        if (it != bins.begin() && it->first - prev->first > 1) {
            const double v0 = prev->second.first / static_cast<double>(prev->second.second);
            const double span = static_cast<double>(it->first - prev->first);
            for (long b = prev->first + 1; b < it->first; ++b) {
                const double w = static_cast<double>(b - prev->first) / span;
                out[static_cast<std::size_t>(b - first)] = v0 + w * (v - v0);
            }
        }
        prev = it;
    }
    return {TimeSeries(std::move(out), bin_width, "resampled"), first, inversions};
}

double percentile(std::vector<double> values, double pct)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(pct, 0.0, 100.0) / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

struct Realization {
    TimeSeries x;
    TimeSeries y;
    std::uint64_t index = 0;
};

struct MemberResult {
    bool ok = false;
    std::vector<std::optional<double>> xy;
    std::vector<std::optional<double>> yx;
    std::optional<Error> error;
};

void validate_config(const EnsembleConfig& cfg)
{
    cfg.segments.validate();
    if (cfg.eta_max < 1) {
        throw Error(ErrorKind::Validation, "eta_max must be >= 1");
    }
    if (!(cfg.f > 0.0)) {
        throw Error(ErrorKind::Validation, "f must be positive");
    }
    if (!(cfg.lower_pct >= 0.0 && cfg.lower_pct <= 50.0 && cfg.upper_pct >= 50.0 && cfg.upper_pct <= 100.0)) {
        throw Error(ErrorKind::Validation, "percentiles must satisfy 0 <= lower <= 50 <= upper <= 100");
    }
}

EnsembleCurve aggregate(const std::vector<MemberResult>& members, bool forward, const EnsembleConfig& cfg)
{
    EnsembleCurve c;
    c.lower_pct = cfg.lower_pct;
    c.upper_pct = cfg.upper_pct;
    for (int eta = 1; eta <= cfg.eta_max; ++eta) {
        std::vector<double> vals;
        for (const auto& m : members) {
            if (!m.ok) {
                continue;
            }
            const auto& v = (forward ? m.xy : m.yx)[static_cast<std::size_t>(eta - 1)];
            if (v) {
                vals.push_back(*v);
            }
        }
        c.etas.push_back(eta);
        c.median.push_back(percentile(vals, 50.0));
        c.lower.push_back(percentile(vals, cfg.lower_pct));
        c.upper.push_back(percentile(vals, cfg.upper_pct));
    }
    return c;
}

EnsembleResult run_ensemble(const std::vector<Realization>& reals, std::size_t realization_failures,
                            const EnsembleConfig& cfg)
{
    struct Task {
        std::size_t real = 0;
        Segment seg;
    };
    std::vector<Task> tasks;
    std::size_t failures = realization_failures * cfg.segments.count;
    std::optional<Error> first_error;
    for (std::size_t r = 0; r < reals.size(); ++r) {
        SegmentSpec ss = cfg.segments;
        ss.seed = derive_seed(cfg.segments.seed, {2, reals[r].index});
        try {
            for (const auto& s : random_segments(reals[r].x.size(), ss)) {
                tasks.push_back({r, s});
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::TooShort) {
                throw;
            }
            failures += cfg.segments.count;
            if (!first_error) {
                first_error = e;
            }
        }
    }

    std::vector<MemberResult> members(tasks.size());
    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
        const Task& t = tasks[i];
        const Realization& real = reals[t.real];
        MemberResult m;
        try {
            const TimeSeries xs = real.x.slice(t.seg.start, t.seg.length);
            const TimeSeries ys = real.y.slice(t.seg.start, t.seg.length);
            const auto cxy = asymmetry_curve(te_spectrum(xs, ys, {}, cfg.embedding, cfg.eta_max, cfg.estimator), cfg.f);
            const auto cyx = asymmetry_curve(te_spectrum(ys, xs, {}, cfg.embedding, cfg.eta_max, cfg.estimator), cfg.f);
            m.xy = cxy.A_norm;
            m.yx = cyx.A_norm;
            m.ok = true;
        } catch (const Error& e) {
            m.error = e;
        }
        members[i] = std::move(m);
    });

    EnsembleResult result;
    for (const auto& m : members) {
        if (m.ok) {
            ++result.members;
        } else {
            ++failures;
            if (!first_error) {
                first_error = m.error;
            }
        }
    }
    if (result.members == 0) {
        if (first_error) {
            throw *first_error;
        }
        throw Error(ErrorKind::EmptyRange, "ensemble has no members");
    }
    result.failures = failures;
    result.xy = aggregate(members, true, cfg);
    result.yx = aggregate(members, false, cfg);
    return result;
}

} // namespace

EnsembleResult ensemble_asymmetry(const TimeSeries& x, const TimeSeries& y, const EnsembleConfig& cfg)
{
    validate_config(cfg);
    if (x.size() != y.size()) {
        throw Error(ErrorKind::LengthMismatch, "series differ in length");
    }
    if (cfg.resamples != 0) {
        throw Error(ErrorKind::Validation, "uncertainty resampling needs uncertain inputs");
    }
    return run_ensemble({Realization{x, y, 0}}, 0, cfg);
}

EnsembleResult ensemble_asymmetry(const UncertainSeries& x, const UncertainSeries& y, const EnsembleConfig& cfg)
{
    validate_config(cfg);
    x.validate();
    y.validate();
    auto means_only = [](UncertainSeries us) {
        std::fill(us.value_sd.begin(), us.value_sd.end(), 0.0);
        std::fill(us.age_sd.begin(), us.age_sd.end(), 0.0);
        return us;
    };
    const std::size_t draws = std::max<std::size_t>(cfg.resamples, 1);
    std::vector<Realization> reals;
    std::size_t failed = 0;
    bool inversions = false;
    std::optional<Error> first_error;
    for (std::size_t r = 0; r < draws; ++r) {
        try {
            const Seed sx = derive_seed(cfg.segments.seed, {1, r, 0});
            const Seed sy = derive_seed(cfg.segments.seed, {1, r, 1});
            const Resampled rx = cfg.resamples == 0 ? resample_uncertain(means_only(x), cfg.bin_width, sx)
                                                    : resample_uncertain(x, cfg.bin_width, sx);
            const Resampled ry = cfg.resamples == 0 ? resample_uncertain(means_only(y), cfg.bin_width, sy)
                                                    : resample_uncertain(y, cfg.bin_width, sy);
            inversions = inversions || rx.inversions || ry.inversions;
            // common bin range
            const long lo = std::max(rx.first_bin, ry.first_bin);
            const long hi = std::min(rx.first_bin + static_cast<long>(rx.series.size()),
                                     ry.first_bin + static_cast<long>(ry.series.size()));
            if (hi - lo < 2) {
                throw Error(ErrorKind::EmptyRange, "resampled series do not overlap in age");
            }
            const auto len = static_cast<std::size_t>(hi - lo);
            reals.push_back({rx.series.slice(static_cast<std::size_t>(lo - rx.first_bin), len),
                             ry.series.slice(static_cast<std::size_t>(lo - ry.first_bin), len), r});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyRange) {
                throw;
            }
            ++failed;
            if (!first_error) {
                first_error = e;
            }
        }
    }
    if (reals.empty()) {
        throw *first_error;
    }
    EnsembleResult result = run_ensemble(reals, failed, cfg);
    result.age_inversions = inversions;
    return result;
}

std::string ensemble_to_csv(const EnsembleResult& result)
{
    std::ostringstream out;
    out << "eta,direction,median,lo,hi\n";
    auto rows = [&](const EnsembleCurve& c, const char* dir) {
        for (std::size_t i = 0; i < c.etas.size(); ++i) {
            out << c.etas[i] << ',' << dir << ',' << format_double(c.median[i]) << ',' << format_double(c.lower[i])
                << ',' << format_double(c.upper[i]) << '\n';
        }
    };
    rows(result.xy, "x->y");
    rows(result.yx, "y->x");
    return out.str();
}

} // namespace predasym
