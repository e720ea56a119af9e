#pragma once

// Binary-classifier evaluation of the asymmetry test over system ensembles.

#include "predasym/asymmetry.hpp"
#include "predasym/embedding.hpp"
#include "predasym/estimators.hpp"
#include "predasym/systems.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace predasym {

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    [[nodiscard]] std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept;
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Element-wise tally; LengthMismatch on unequal sizes.
ConfusionMatrix confusion(std::span<const bool> preds, std::span<const bool> truths);

/// Matthews correlation. Zero denominator factors give 0; EmptyMatrix when
/// all counts are zero.
double mcc(const ConfusionMatrix& cm);

/// nullopt marks a rate whose denominator is zero.
struct Rates {
    std::optional<double> accuracy;
    std::optional<double> tpr;
    std::optional<double> tnr;
    std::optional<double> fpr;
    std::optional<double> fnr;
    std::optional<double> ppv;
    std::optional<double> npv;
    std::optional<double> f1;
};

Rates rates(const ConfusionMatrix& cm);

struct ClassifyOptions {
    EmbeddingSpec embedding;
    int eta_max = 10;
    double f = 1.0;
    EstimatorOptions estimator;
    int jobs = 1;
};

struct PairVerdict {
    bool xy = false;
    bool yx = false;
    std::optional<double> a_xy; ///< normalized asymmetry at eta_max
    std::optional<double> a_yx;
};

PairVerdict classify_pair(const TimeSeries& x, const TimeSeries& y, const ClassifyOptions& opts);

struct SweepConfig {
    Family family = Family::LogisticChain;
    std::vector<CouplingRange> couplings;
    std::vector<std::size_t> lengths;
    std::size_t ensemble_size = 10;
    /// Unset: 10 + max_delay - 1 per realization.
    std::optional<int> eta_max;
    double f = 1.0;
    EmbeddingSpec embedding;
    EstimatorOptions estimator;
    ParamMap overrides;
    Seed master{};
    int jobs = 1;
    /// Extra draws allowed per realization after a generation failure.
    int max_redraws = 10;
};

struct SweepCell {
    CouplingRange coupling;
    std::size_t length = 0;
    ConfusionMatrix cm;
    std::optional<double> mcc; ///< nullopt when no realization succeeded
    Rates rates;
    std::optional<double> median_A; ///< over every evaluated directed pair
    std::size_t realizations = 0;   ///< successful ones
    std::size_t failures = 0;       ///< failed draws, including redrawn ones
    std::size_t dropped = 0;        ///< realizations given up after max_redraws
    std::vector<std::uint64_t> seeds;
};

struct SweepResult {
    Family family = Family::LogisticChain;
    std::size_t ensemble_size = 0;
    Seed master{};
    std::vector<SweepCell> cells; ///< coupling-major, then length
};

SweepResult sweep(const SweepConfig& cfg);

std::string sweep_to_csv(const SweepResult& result);
nlohmann::json sweep_to_json(const SweepResult& result);

} // namespace predasym
