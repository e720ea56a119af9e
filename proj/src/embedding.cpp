#include "predasym/embedding.hpp"

#include "predasym/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace predasym {

PointSet::PointSet(std::size_t rows, std::size_t dims) : rows_(rows), dims_(dims), data_(rows * dims, 0.0) {}

PointSet::PointSet(std::size_t rows, std::size_t dims, std::vector<double> data)
    : rows_(rows), dims_(dims), data_(std::move(data))
{
    if (data_.size() != rows_ * dims_) {
        throw Error(ErrorKind::LengthMismatch, "point data does not match rows x dims");
    }
}

PointSet PointSet::columns(std::span<const std::size_t> cols) const
{
    PointSet out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(r, j) = (*this)(r, cols[j]);
        }
    }
    return out;
}

PointSet PointSet::permuted(std::span<const std::size_t> order) const
{
    PointSet out(order.size(), dims_);
    for (std::size_t r = 0; r < order.size(); ++r) {
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(order[r] * dims_), dims_,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(r * dims_));
    }
    return out;
}

void EmbeddingSpec::validate(std::size_t conditional_count) const
{
    if (k < 1 || l < 1 || m < 1 || n < 0 || tau < 1) {
        throw Error(ErrorKind::InvalidParams, "embedding needs k, l, m, tau >= 1 and n >= 0");
    }
    if (eta == 0) {
        throw Error(ErrorKind::InvalidParams, "prediction lag eta must be nonzero");
    }
    if (conditional_count == 0 && n != 0) {
        throw Error(ErrorKind::InvalidParams, "n > 0 requires conditional series");
    }
    if (conditional_count > 0 && (n == 0 || n % static_cast<int>(conditional_count) != 0)) {
        throw Error(ErrorKind::InvalidParams, "n must be a positive multiple of the conditional count");
    }
}

IndexRange valid_range(std::size_t n, const EmbeddingSpec& spec, std::size_t conditional_count)
{
    const int per_cond = spec.n > 0 ? spec.n / static_cast<int>(std::max<std::size_t>(conditional_count, 1)) : 1;
    const long reach = static_cast<long>(std::max({spec.l, spec.m, per_cond}) - 1) * spec.tau;
    const long future = static_cast<long>(spec.k) * std::labs(spec.eta);
    const long len = static_cast<long>(n);
    long first = reach;
    long last = len - 1;
    if (spec.eta > 0) {
        last -= future;
    } else {
        first += future;
    }
    if (first > last || last < 0) {
        return {};
    }
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last), false};
}

std::vector<std::size_t> Embedding::columns_with(Role role) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < column_map.size(); ++i) {
        if (column_map[i].role == role) {
            out.push_back(i);
        }
    }
    return out;
}

Embedding build_embedding(const TimeSeries& source, const TimeSeries& target,
                          std::span<const TimeSeries> conds, const EmbeddingSpec& spec)
{
    spec.validate(conds.size());
    const std::size_t len = target.size();
    if (source.size() != len) {
        throw Error(ErrorKind::LengthMismatch, "source and target lengths differ");
    }
    for (const auto& c : conds) {
        if (c.size() != len) {
            throw Error(ErrorKind::LengthMismatch, "conditional series length differs from target");
        }
    }
    const IndexRange range = valid_range(len, spec, conds.size());
    const int per_cond = conds.empty() ? 0 : spec.n / static_cast<int>(conds.size());
    if (range.empty) {
        throw Error(ErrorKind::EmptyEmbedding, "series of length " + std::to_string(len) +
                                                   " is too short for the embedding");
    }

    Embedding emb;
    emb.spec = spec;
    emb.source_length = len;
    for (int j = spec.k; j >= 1; --j) {
        emb.column_map.push_back({Role::TargetFuture, 0, j * spec.eta});
    }
    for (int i = 0; i < spec.l; ++i) {
        emb.column_map.push_back({Role::TargetPast, 0, -i * spec.tau});
    }
    for (int i = 0; i < spec.m; ++i) {
        emb.column_map.push_back({Role::Source, 0, -i * spec.tau});
    }
    for (std::size_t c = 0; c < conds.size(); ++c) {
        for (int i = 0; i < per_cond; ++i) {
            emb.column_map.push_back({Role::Conditional, static_cast<int>(c), -i * spec.tau});
        }
    }

    const std::size_t rows = range.count();
    const std::size_t dims = emb.column_map.size();
    std::vector<double> data(rows * dims);
    for (std::size_t r = 0; r < rows; ++r) {
        const long t = static_cast<long>(range.first + r);
        for (std::size_t j = 0; j < dims; ++j) {
            const auto& info = emb.column_map[j];
            const auto at = static_cast<std::size_t>(t + info.lag);
            switch (info.role) {
            case Role::TargetFuture:
            case Role::TargetPast: data[r * dims + j] = target[at]; break;
            case Role::Source: data[r * dims + j] = source[at]; break;
            case Role::Conditional: data[r * dims + j] = conds[static_cast<std::size_t>(info.variable)][at]; break;
            }
        }
    }
    emb.points = PointSet(rows, dims, std::move(data));
    return emb;
}

std::optional<int> autocorrelation_zero_crossing(const TimeSeries& ts, int max_lag)
{
    const auto xs = ts.values();
    const double m = mean(xs);
    double var = 0.0;
    for (double x : xs) {
        var += (x - m) * (x - m);
    }
    if (var == 0.0) {
        return std::nullopt;
    }
    const int limit = std::min<int>(max_lag, static_cast<int>(xs.size()) - 1);
    for (int lag = 1; lag <= limit; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < xs.size(); ++i) {
            acc += (xs[i] - m) * (xs[i + static_cast<std::size_t>(lag)] - m);
        }
        if (acc / var <= 0.0) {
            return lag;
        }
    }
    return std::nullopt;
}

} // namespace predasym
