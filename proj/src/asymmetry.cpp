#include "predasym/asymmetry.hpp"

#include "predasym/error.hpp"

#include <cmath>
#include <string>

namespace predasym {

namespace {

void check_eta(const TESpectrum& spec, int eta)
{
    if (eta < 1 || eta > spec.eta_max()) {
        throw Error(ErrorKind::LagOutOfRange,
                    "eta " + std::to_string(eta) + " outside 1.." + std::to_string(spec.eta_max()));
    }
}

void check_f(double f)
{
    if (!(f > 0.0) || !std::isfinite(f)) {
        throw Error(ErrorKind::InvalidParams, "normalization factor f must be positive");
    }
}

} // namespace

double predictive_asymmetry(const TESpectrum& spec, int eta)
{
    check_eta(spec, eta);
    double fwd = 0.0;
    double bwd = 0.0;
    for (int nu = 1; nu <= eta; ++nu) {
        fwd += spec.at(nu);
        bwd += spec.at(-nu);
    }
    return fwd - bwd;
}

std::optional<double> normalized_asymmetry(const TESpectrum& spec, int eta, double f)
{
    check_f(f);
    const double a = predictive_asymmetry(spec, eta);
    double total = 0.0;
    for (int nu = 1; nu <= eta; ++nu) {
        total += spec.at(nu) + spec.at(-nu);
    }
    const double denom = f / eta * total;
    if (!(denom > 0.0)) {
        return std::nullopt;
    }
    return a / denom;
}

Detection detect(std::optional<double> a_norm, double threshold)
{
    return a_norm && *a_norm > threshold ? Detection::Positive : Detection::Negative;
}

AsymmetryCurve asymmetry_curve(const TESpectrum& spec, double f)
{
    check_f(f);
    AsymmetryCurve c;
    c.f = f;
    for (int eta = 1; eta <= spec.eta_max(); ++eta) {
        c.etas.push_back(eta);
        c.A.push_back(predictive_asymmetry(spec, eta));
        c.A_norm.push_back(normalized_asymmetry(spec, eta, f));
    }
    return c;
}

TESpectrum exchange_halves(const TESpectrum& spec)
{
    TESpectrum out = spec;
    for (std::size_t i = 0; i < spec.lags.size(); ++i) {
        out.values[i] = spec.at(-spec.lags[i]);
    }
    return out;
}

TESpectrum scaled(const TESpectrum& spec, double factor)
{
    TESpectrum out = spec;
    for (double& v : out.values) {
        v *= factor;
    }
    return out;
}

} // namespace predasym
