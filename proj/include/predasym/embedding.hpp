#pragma once

#include "predasym/data.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace predasym {

/// Row-major set of points in R^dims.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t rows, std::size_t dims);
    PointSet(std::size_t rows, std::size_t dims, std::vector<double> data);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
    [[nodiscard]] bool empty() const noexcept { return rows_ == 0; }

    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept
    {
        return {data_.data() + r * dims_, dims_};
    }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * dims_ + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * dims_ + c]; }

    /// New point set holding the given columns, in order.
    [[nodiscard]] PointSet columns(std::span<const std::size_t> cols) const;
    /// New point set with rows reordered by `order`.
    [[nodiscard]] PointSet permuted(std::span<const std::size_t> order) const;

    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> data_;
};

/// Parameters of the generalized delay reconstruction.
///
/// k future target values at offsets eta, 2*eta, ..., k*eta; l present/past
/// target values and m present/past source values at offsets 0, -tau, ...;
/// n conditional values split evenly across the conditioning series.
/// k > 1 is experimental: the future block uses multiples of eta.
struct EmbeddingSpec {
    int k = 1;
    int l = 1;
    int m = 1;
    int n = 0;
    int tau = 1;
    int eta = 1;

    void validate(std::size_t conditional_count = 0) const;
    [[nodiscard]] EmbeddingSpec with_eta(int new_eta) const
    {
        EmbeddingSpec s = *this;
        s.eta = new_eta;
        return s;
    }
    /// Dimension excluding the future block (l + m + n).
    [[nodiscard]] int history_dim() const noexcept { return l + m + n; }
    [[nodiscard]] int total_dim() const noexcept { return k + l + m + n; }

    friend bool operator==(const EmbeddingSpec&, const EmbeddingSpec&) = default;
};

enum class Role { TargetFuture, TargetPast, Source, Conditional };

struct ColumnInfo {
    Role role;
    int variable = 0; ///< conditional index for Role::Conditional, else 0
    int lag = 0;      ///< offset from the base time t

    friend bool operator==(const ColumnInfo&, const ColumnInfo&) = default;
};

/// Inclusive 0-based range of base times. `count()` is 0 when empty.
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;
    bool empty = true;

    [[nodiscard]] std::size_t count() const noexcept { return empty ? 0 : last - first + 1; }
};

/// Base times t for which every coordinate of the embedding exists.
///
/// Forward and backward prediction lags of the same magnitude always yield
/// the same number of rows: the window is [reach, N-1-k*eta] for eta > 0
/// and [reach + k*|eta|, N-1] for eta < 0, where reach is the deepest
/// history offset. `conditional_count` splits spec.n across series.
IndexRange valid_range(std::size_t n, const EmbeddingSpec& spec, std::size_t conditional_count = 1);

struct Embedding {
    PointSet points;
    std::vector<ColumnInfo> column_map;
    std::size_t source_length = 0;
    EmbeddingSpec spec;

    /// Column indices holding the given role, in column order.
    [[nodiscard]] std::vector<std::size_t> columns_with(Role role) const;
};

Embedding build_embedding(const TimeSeries& source, const TimeSeries& target,
                          std::span<const TimeSeries> conds, const EmbeddingSpec& spec);

/// First lag at which the sample autocorrelation drops to or below zero;
/// nullopt if it never does up to `max_lag`.
std::optional<int> autocorrelation_zero_crossing(const TimeSeries& ts, int max_lag);

} // namespace predasym
