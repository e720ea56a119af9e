#pragma once

// Closed-form transfer entropy for bivariate Gaussian AR(1) systems.

#include "predasym/asymmetry.hpp"
#include "predasym/estimators.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace predasym {

enum class ARKind { UnidirAR1, BidirDistinctEigen, BidirJordan };

/// Bivariate AR(1) model X_{t+1} = A X_t + W_{t+1}, X = (x, y).
///
/// UnidirAR1:          x' = a x + w,  y' = c x + v
/// BidirDistinctEigen: x' = a x + s b y + u,  y' = a y + s c x + v
/// BidirJordan:        x' = (lambda + a) x - b y + u,  y' = (lambda - a) y + (a^2/b) x + v
struct ARModel {
    ARKind kind = ARKind::UnidirAR1;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    int s = 1;
    double lambda = 0.0;
    double sigma_u = 1.0; ///< noise sd on x
    double sigma_v = 1.0; ///< noise sd on y

    static ARModel unidir(double a, double c, double sigma_w = 1.0, double sigma_v = 1.0);
    static ARModel bidir_distinct(double a, double b, double c, int s, double sigma_u = 1.0, double sigma_v = 1.0);
    static ARModel bidir_jordan(double lambda, double a, double b, double sigma_u = 1.0, double sigma_v = 1.0);

    /// Throws NotStationary, InvalidParams or InvalidKind.
    void validate() const;
    /// Row-major 2x2 coefficient matrix A.
    [[nodiscard]] std::array<double, 4> coefficients() const;
};

enum class Var { X = 0, Y = 1 };

/// Covariance of the stacked vector [x(-eta_max..eta_max), y(-eta_max..eta_max)].
struct LagCovariance {
    Eigen::MatrixXd matrix;
    int eta_max = 0;

    [[nodiscard]] int index(Var v, int lag) const;
};

LagCovariance ar1_unidir_covariance(const ARModel& model, int eta_max);
LagCovariance bidir_covariance(const ARModel& model, int eta_max);
/// Dispatches on model.kind.
LagCovariance lag_covariance(const ARModel& model, int eta_max);

/// Differential entropy in bits of a Gaussian with covariance `cov`.
double gaussian_entropy(const Eigen::MatrixXd& cov);

/// I(T_nu; S_pp | T_pp) in bits from index sets into cov.matrix.
double exact_cmi(const LagCovariance& cov, std::span<const int> s_pp, std::span<const int> t_nu,
                 std::span<const int> t_pp);

/// TE source -> target at prediction lag nu with lag-0 singleton histories.
double exact_te(const LagCovariance& cov, Var source, Var target, int nu);

TESpectrum exact_spectrum(const LagCovariance& cov, Var source, Var target);

struct ExactAsymmetry {
    TESpectrum te_xy;
    TESpectrum te_yx;
    AsymmetryCurve xy;
    AsymmetryCurve yx;
};

ExactAsymmetry exact_asymmetry(const ARModel& model, int eta_max, double f = 1.0);

} // namespace predasym
