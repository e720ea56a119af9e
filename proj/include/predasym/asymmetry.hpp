#pragma once

#include "predasym/estimators.hpp"

#include <optional>
#include <vector>

namespace predasym {

/// Predictive asymmetry and its normalized form for eta = 1..eta_max.
/// A_norm entries are nullopt where the normalizer vanishes.
struct AsymmetryCurve {
    std::vector<int> etas;
    std::vector<double> A;
    std::vector<std::optional<double>> A_norm;
    double f = 1.0;
};

/// Sum of TE(nu) minus TE(-nu) over nu = 1..eta.
double predictive_asymmetry(const TESpectrum& spec, int eta);

/// predictive_asymmetry divided by (f/eta) times the TE summed over all 2*eta
/// lags. nullopt when that sum is not positive.
std::optional<double> normalized_asymmetry(const TESpectrum& spec, int eta, double f);

enum class Detection { Positive, Negative };

/// Positive iff a_norm is defined and strictly above the threshold.
Detection detect(std::optional<double> a_norm, double threshold = 1.0);

AsymmetryCurve asymmetry_curve(const TESpectrum& spec, double f = 1.0);

/// Spectrum with TE(nu) and TE(-nu) swapped.
TESpectrum exchange_halves(const TESpectrum& spec);

/// Spectrum with every value multiplied by `factor`.
TESpectrum scaled(const TESpectrum& spec, double factor);

} // namespace predasym
