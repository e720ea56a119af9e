#pragma once

#include "predasym/embedding.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace predasym {

enum class EstimatorKind { VisitationFrequency, NearestNeighbor };

/// "vf" or "nn".
std::string_view estimator_id(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view id);

/// Which marginal is subtracted from I(T_f; S_pp, T_pp) in the
/// nearest-neighbour TE. Standard subtracts I(T_f; T_pp); SourceMarginal
/// subtracts I(T_f; S_pp), kept for comparison with older results.
enum class NnDecomposition { Standard, SourceMarginal };

struct EstimatorOptions {
    EstimatorKind kind = EstimatorKind::VisitationFrequency;
    /// Fixed bins per axis for the binning estimator. When unset the two
    /// heuristic partitions are averaged.
    std::optional<int> bins;
    int k1 = 2;
    int k2 = 3;
    NnDecomposition decomposition = NnDecomposition::Standard;
};

struct BinRange {
    int n_min = 2;
    int n_max = 3;
};

/// floor(N^(1/(dim+1))) clamped to >= 2, and one more.
BinRange binning_heuristic(std::size_t n_samples, int dim);

/// Regular grid over the data extent of a point set.
struct PartitionSpec {
    int bins_per_axis = 1;
    std::vector<std::pair<double, double>> extent;

    static PartitionSpec from_points(const PointSet& points, int bins);
    /// Box index along `axis` for value v; right-open intervals, last closed.
    [[nodiscard]] int box_of(std::size_t axis, double v) const noexcept;
};

double te_visitation_frequency(const Embedding& emb, int bins);
double te_binned_averaged(const Embedding& emb);

/// Occupation probabilities of the non-empty joint boxes, in box-key order.
std::vector<double> box_probabilities(const Embedding& emb, int bins);

/// KSG (first variant) mutual information in bits, max-norm.
double mi_kraskov(const PointSet& a, const PointSet& b, int k_neighbors);

double te_nearest_neighbor(const Embedding& emb, int k1 = 2, int k2 = 3,
                           NnDecomposition decomposition = NnDecomposition::Standard);

double estimate_te(const Embedding& emb, const EstimatorOptions& opts);

struct TESpectrum {
    std::vector<int> lags; ///< -eta_max..-1, 1..eta_max
    std::vector<double> values;
    std::string estimator_id;
    EmbeddingSpec spec; ///< eta is not meaningful here

    [[nodiscard]] int eta_max() const noexcept { return static_cast<int>(lags.size() / 2); }
    /// TE at signed lag nu; LagOutOfRange if absent.
    [[nodiscard]] double at(int nu) const;
};

/// Builds a spectrum from explicit forward (nu = 1..) and backward
/// (nu = -1, -2, ...) values.
TESpectrum make_spectrum(std::span<const double> forward, std::span<const double> backward,
                         std::string estimator_id = "given", EmbeddingSpec spec = {});

TESpectrum te_spectrum(const TimeSeries& source, const TimeSeries& target, std::span<const TimeSeries> conds,
                       const EmbeddingSpec& spec, int eta_max, const EstimatorOptions& opts = {}, int jobs = 1);

} // namespace predasym
