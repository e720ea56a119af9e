#include "predasym/estimators.hpp"

#include "kdtree.hpp"
#include "predasym/error.hpp"
#include "predasym/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>

namespace predasym {

std::string_view estimator_id(EstimatorKind kind)
{
    return kind == EstimatorKind::VisitationFrequency ? "vf" : "nn";
}

EstimatorKind parse_estimator(std::string_view id)
{
    if (id == "vf") {
        return EstimatorKind::VisitationFrequency;
    }
    if (id == "nn") {
        return EstimatorKind::NearestNeighbor;
    }
    throw Error(ErrorKind::InvalidKind, "unknown estimator '" + std::string(id) + "' (expected vf or nn)");
}

BinRange binning_heuristic(std::size_t n_samples, int dim)
{
    if (n_samples < 2) {
        throw Error(ErrorKind::InvalidParams, "binning heuristic needs at least 2 samples");
    }
    if (dim < 1) {
        throw Error(ErrorKind::InvalidParams, "embedding dimension must be positive");
    }
    const int power = dim + 1;
    // r^power <= n, computed without trusting pow() at exact roots
    auto fits = [&](long r) {
        long double acc = 1.0L;
        for (int i = 0; i < power; ++i) {
            acc *= static_cast<long double>(r);
            if (acc > static_cast<long double>(n_samples)) {
                return false;
            }
        }
        return true;
    };
    long r = static_cast<long>(std::floor(std::pow(static_cast<double>(n_samples), 1.0 / power)));
    while (fits(r + 1)) {
        ++r;
    }
    while (r > 1 && !fits(r)) {
        --r;
    }
    const int n_min = static_cast<int>(std::max(r, 2L));
    return {n_min, n_min + 1};
}

PartitionSpec PartitionSpec::from_points(const PointSet& points, int bins)
{
    if (bins < 1) {
        throw Error(ErrorKind::InvalidParams, "bins per axis must be >= 1");
    }
    PartitionSpec p;
    p.bins_per_axis = bins;
    p.extent.assign(points.dims(), {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (std::size_t r = 0; r < points.rows(); ++r) {
        for (std::size_t d = 0; d < points.dims(); ++d) {
            auto& [lo, hi] = p.extent[d];
            lo = std::min(lo, points(r, d));
            hi = std::max(hi, points(r, d));
        }
    }
    for (auto& [lo, hi] : p.extent) {
        hi += (hi - lo) * 1e-9;
    }
    return p;
}

int PartitionSpec::box_of(std::size_t axis, double v) const noexcept
{
    const auto [lo, hi] = extent[axis];
    if (!(hi > lo)) {
        return 0;
    }
    const double pos = (v - lo) / (hi - lo) * bins_per_axis;
    return std::clamp(static_cast<int>(std::floor(pos)), 0, bins_per_axis - 1);
}

namespace {

// Box index of every coordinate of every point, row-major.
std::vector<std::uint32_t> box_grid(const PointSet& points, const PartitionSpec& part)
{
    std::vector<std::uint32_t> boxes(points.rows() * points.dims());
    for (std::size_t r = 0; r < points.rows(); ++r) {
        for (std::size_t d = 0; d < points.dims(); ++d) {
            boxes[r * points.dims() + d] = static_cast<std::uint32_t>(part.box_of(d, points(r, d)));
        }
    }
    return boxes;
}

// One key per row identifying its box in the sub-grid spanned by `cols`.
// Keys are mixed-radix box numbers, or lexicographic dense ranks when the
// grid is too large to number directly; either way they do not depend on
// the row order.
std::vector<std::uint64_t> group_keys(const std::vector<std::uint32_t>& boxes, std::size_t rows, std::size_t dims,
                                      std::span<const std::size_t> cols, int bins)
{
    std::vector<std::uint64_t> keys(rows, 0);
    const double cells = std::pow(static_cast<double>(bins), static_cast<double>(cols.size()));
    if (cells < 9.0e18) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::uint64_t key = 0;
            for (std::size_t c : cols) {
                key = key * static_cast<std::uint64_t>(bins) + boxes[r * dims + c];
            }
            keys[r] = key;
        }
        return keys;
    }
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        for (std::size_t c : cols) {
            if (boxes[a * dims + c] != boxes[b * dims + c]) {
                return boxes[a * dims + c] < boxes[b * dims + c];
            }
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (i > 0 && less(order[i - 1], order[i])) {
            ++rank;
        }
        keys[order[i]] = rank;
    }
    return keys;
}

// Rows sorted by key; ties keep index order.
std::vector<std::size_t> sorted_by_key(const std::vector<std::uint64_t>& keys)
{
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return order;
}

// Occupation count of each row's box.
std::vector<std::uint32_t> box_counts(const std::vector<std::uint64_t>& keys)
{
    const auto order = sorted_by_key(keys);
    std::vector<std::uint32_t> counts(keys.size(), 0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && keys[order[j]] == keys[order[i]]) {
            ++j;
        }
        for (std::size_t t = i; t < j; ++t) {
            counts[order[t]] = static_cast<std::uint32_t>(j - i);
        }
        i = j;
    }
    return counts;
}

std::vector<std::size_t> concat(std::initializer_list<std::vector<std::size_t>> parts)
{
    std::vector<std::size_t> out;
    for (const auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

struct Groups {
    std::vector<std::size_t> future;
    std::vector<std::size_t> past;   // target history plus conditionals
    std::vector<std::size_t> source;
};

Groups groups_of(const Embedding& emb)
{
    Groups g;
    g.future = emb.columns_with(Role::TargetFuture);
    g.past = concat({emb.columns_with(Role::TargetPast), emb.columns_with(Role::Conditional)});
    g.source = emb.columns_with(Role::Source);
    return g;
}

void require_points(const Embedding& emb)
{
    if (emb.points.empty()) {
        throw Error(ErrorKind::EmptyEmbedding, "embedding has no points");
    }
}

} // namespace

double te_visitation_frequency(const Embedding& emb, int bins)
{
    require_points(emb);
    const PointSet& pts = emb.points;
    const auto part = PartitionSpec::from_points(pts, bins);
    const auto boxes = box_grid(pts, part);
    const Groups g = groups_of(emb);
    const std::size_t rows = pts.rows();
    const std::size_t dims = pts.dims();

    const auto joint_cols = concat({g.future, g.past, g.source});
    const auto joint = group_keys(boxes, rows, dims, joint_cols, bins);
    const auto n_hist = box_counts(group_keys(boxes, rows, dims, g.past, bins));
    const auto n_hist_src = box_counts(group_keys(boxes, rows, dims, concat({g.past, g.source}), bins));
    const auto n_fut_hist = box_counts(group_keys(boxes, rows, dims, concat({g.future, g.past}), bins));

    // sum over occupied joint boxes in key order
    const auto order = sorted_by_key(joint);
    double acc = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && joint[order[j]] == joint[order[i]]) {
            ++j;
        }
        const std::size_t r = order[i];
        const double n_joint = static_cast<double>(j - i);
        acc += n_joint * std::log2(n_joint * n_hist[r] / (static_cast<double>(n_hist_src[r]) * n_fut_hist[r]));
        i = j;
    }
    return std::max(0.0, acc / static_cast<double>(rows));
}

std::vector<double> box_probabilities(const Embedding& emb, int bins)
{
    require_points(emb);
    const auto part = PartitionSpec::from_points(emb.points, bins);
    const auto boxes = box_grid(emb.points, part);
    std::vector<std::size_t> all(emb.points.dims());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto keys = group_keys(boxes, emb.points.rows(), emb.points.dims(), all, bins);
    const auto order = sorted_by_key(keys);
    std::vector<double> probs;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && keys[order[j]] == keys[order[i]]) {
            ++j;
        }
        probs.push_back(static_cast<double>(j - i) / static_cast<double>(order.size()));
        i = j;
    }
    return probs;
}

double te_binned_averaged(const Embedding& emb)
{
    require_points(emb);
    const auto [lo, hi] = binning_heuristic(std::max<std::size_t>(emb.points.rows(), 2),
                                            static_cast<int>(emb.points.dims()));
    return 0.5 * (te_visitation_frequency(emb, lo) + te_visitation_frequency(emb, hi));
}

namespace {

bool has_constant_axis(const PointSet& p)
{
    for (std::size_t d = 0; d < p.dims(); ++d) {
        bool constant = true;
        for (std::size_t r = 1; r < p.rows() && constant; ++r) {
            constant = p(r, d) == p(0, d);
        }
        if (constant) {
            return true;
        }
    }
    return false;
}

PointSet hstack(const PointSet& a, const PointSet& b)
{
    PointSet out(a.rows(), a.dims() + b.dims());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t d = 0; d < a.dims(); ++d) {
            out(r, d) = a(r, d);
        }
        for (std::size_t d = 0; d < b.dims(); ++d) {
            out(r, a.dims() + d) = b(r, d);
        }
    }
    return out;
}

// psi(1..n) for integer arguments.
std::vector<double> digamma_table(std::size_t n)
{
    std::vector<double> psi(n + 1, 0.0);
    if (n >= 1) {
        psi[1] = -std::numbers::egamma;
    }
    for (std::size_t i = 2; i <= n; ++i) {
        psi[i] = psi[i - 1] + 1.0 / static_cast<double>(i - 1);
    }
    return psi;
}

} // namespace

double mi_kraskov(const PointSet& a, const PointSet& b, int k_neighbors)
{
    if (k_neighbors < 1) {
        throw Error(ErrorKind::InvalidParams, "k_neighbors must be >= 1");
    }
    if (a.rows() != b.rows()) {
        throw Error(ErrorKind::LengthMismatch, "point sets differ in size");
    }
    const std::size_t n = a.rows();
    const auto k = static_cast<std::size_t>(k_neighbors);
    if (n < k + 1) {
        throw Error(ErrorKind::TooFewPoints, "need at least k+1 = " + std::to_string(k + 1) + " points, got " +
                                                 std::to_string(n));
    }
    if (a.dims() == 0 || b.dims() == 0 || has_constant_axis(a) || has_constant_axis(b)) {
        return 0.0;
    }
    if (a.dims() == b.dims()) {
        std::size_t same = 0;
        for (std::size_t r = 0; r < n; ++r) {
            same += std::equal(a.row(r).begin(), a.row(r).end(), b.row(r).begin()) ? 1 : 0;
        }
        if (2 * same > n) {
            throw Error(ErrorKind::DegenerateDistances, "most points coincide in both marginals");
        }
    }

    const PointSet joint = hstack(a, b);
    const detail::KdTree tree_joint(joint);
    const detail::KdTree tree_a(a);
    const detail::KdTree tree_b(b);

    // histograms of the marginal counts keep the sum independent of row order
    std::vector<std::size_t> hist_a(n, 0);
    std::vector<std::size_t> hist_b(n, 0);
    std::size_t zero_eps = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = tree_joint.kth_neighbor_distance(i, k);
        zero_eps += eps == 0.0 ? 1 : 0;
        ++hist_a[tree_a.count_strictly_within(i, eps)];
        ++hist_b[tree_b.count_strictly_within(i, eps)];
    }
    if (2 * zero_eps > n) {
        throw Error(ErrorKind::DegenerateDistances, "more than half of the neighbour distances are zero");
    }
    const auto psi = digamma_table(n + 1);
    double marg = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        marg += static_cast<double>(hist_a[c] + hist_b[c]) * psi[c + 1];
    }
    const double nats = psi[k] + psi[n] - marg / static_cast<double>(n);
    return nats / std::numbers::ln2;
}

double te_nearest_neighbor(const Embedding& emb, int k1, int k2, NnDecomposition decomposition)
{
    require_points(emb);
    const Groups g = groups_of(emb);
    const std::size_t need = static_cast<std::size_t>(std::max(k1, k2)) + 1;
    if (emb.points.rows() < need) {
        throw Error(ErrorKind::TooFewPoints, "embedding has too few points for the neighbour counts");
    }
    const PointSet fut = emb.points.columns(g.future);
    const PointSet full = emb.points.columns(concat({g.source, g.past}));
    const PointSet sub =
        emb.points.columns(decomposition == NnDecomposition::Standard ? g.past : g.source);
    return mi_kraskov(fut, full, k1) - mi_kraskov(fut, sub, k2);
}

double estimate_te(const Embedding& emb, const EstimatorOptions& opts)
{
    if (opts.kind == EstimatorKind::NearestNeighbor) {
        return te_nearest_neighbor(emb, opts.k1, opts.k2, opts.decomposition);
    }
    return opts.bins ? te_visitation_frequency(emb, *opts.bins) : te_binned_averaged(emb);
}

double TESpectrum::at(int nu) const
{
    const auto it = std::find(lags.begin(), lags.end(), nu);
    if (nu == 0 || it == lags.end()) {
        throw Error(ErrorKind::LagOutOfRange, "lag " + std::to_string(nu) + " not in spectrum");
    }
    return values[static_cast<std::size_t>(it - lags.begin())];
}

TESpectrum make_spectrum(std::span<const double> forward, std::span<const double> backward,
                         std::string estimator_id, EmbeddingSpec spec)
{
    if (forward.size() != backward.size() || forward.empty()) {
        throw Error(ErrorKind::LengthMismatch, "forward and backward halves must be nonempty and equal in size");
    }
    TESpectrum s;
    s.estimator_id = std::move(estimator_id);
    s.spec = spec;
    const int eta_max = static_cast<int>(forward.size());
    for (int nu = -eta_max; nu <= eta_max; ++nu) {
        if (nu == 0) {
            continue;
        }
        s.lags.push_back(nu);
        s.values.push_back(nu > 0 ? forward[static_cast<std::size_t>(nu - 1)]
                                  : backward[static_cast<std::size_t>(-nu - 1)]);
    }
    return s;
}

TESpectrum te_spectrum(const TimeSeries& source, const TimeSeries& target, std::span<const TimeSeries> conds,
                       const EmbeddingSpec& spec, int eta_max, const EstimatorOptions& opts, int jobs)
{
    if (eta_max < 1) {
        throw Error(ErrorKind::InvalidParams, "eta_max must be >= 1");
    }
    spec.with_eta(eta_max).validate(conds.size());
    if (valid_range(target.size(), spec.with_eta(eta_max), conds.size()).empty) {
        throw Error(ErrorKind::LagOutOfRange, "eta_max " + std::to_string(eta_max) + " is too large for a series of length " +
                                                  std::to_string(target.size()));
    }
    TESpectrum s;
    s.estimator_id = std::string(estimator_id(opts.kind));
    s.spec = spec;
    for (int nu = -eta_max; nu <= eta_max; ++nu) {
        if (nu != 0) {
            s.lags.push_back(nu);
        }
    }
    s.values.assign(s.lags.size(), 0.0);
    parallel_for(s.lags.size(), jobs, [&](std::size_t i) {
        const Embedding emb = build_embedding(source, target, conds, spec.with_eta(s.lags[i]));
        s.values[i] = estimate_te(emb, opts);
    });
    return s;
}

} // namespace predasym
