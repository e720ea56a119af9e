#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerical code.

#include "predasym/embedding.hpp"

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <cstdint>
#include <vector>

namespace oracle_ref {

/// Stationary covariance of X' = A X + W, Cov(W) = Q, by summing A^k Q A^k'.
Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// Covariance of [x(-h..h), y(-h..h)] for a bivariate VAR(1).
Eigen::MatrixXd stacked_covariance(const Eigen::Matrix2d& A, const Eigen::Matrix2d& Q, int h);

/// Row of variable v (0 = x, 1 = y) at `lag` in the stacked layout.
int stacked_index(int v, int lag, int h);

/// log2 det via partial-pivot LU.
double log2_det(const Eigen::MatrixXd& m);

/// I(a; b | c) in bits for a Gaussian with covariance `cov`.
double gaussian_cmi(const Eigen::MatrixXd& cov, const std::vector<int>& a, const std::vector<int>& b,
                    const std::vector<int>& c);

/// Sample path of a bivariate VAR(1) with Gaussian noise (std::mt19937_64).
std::pair<std::vector<double>, std::vector<double>> simulate_var1(const Eigen::Matrix2d& A, const Eigen::Matrix2d& Q,
                                                                  std::size_t n, std::uint64_t seed);

/// Simulates a bivariate VAR(1) and returns the sample covariance of the
/// stacked lag vector.
Eigen::MatrixXd simulated_stacked_covariance(const Eigen::Matrix2d& A, const Eigen::Matrix2d& Q, int h,
                                             std::size_t samples, std::uint64_t seed);

/// Roots of the monic polynomial x^n + c[n-1] x^(n-1) + ... + c[0].
std::vector<std::complex<double>> durand_kerner(const std::vector<double>& c);

/// Largest root modulus of det(z^k I - sum_l A_l z^(k-l)) for 2x2 A_l.
double var_root_radius(const std::vector<Eigen::MatrixXd>& coeffs);

/// Digamma from the asymptotic series with upward recurrence.
double digamma(double x);

/// O(n^2) KSG variant 1 in bits, strict-inequality marginal counts.
double ksg_bruteforce(const predasym::PointSet& a, const predasym::PointSet& b, int k);

/// Plug-in I(F; S | T) in bits from hash-free box counting on a regular grid.
double te_boxes_bruteforce(const predasym::Embedding& emb, int bins);

} // namespace oracle_ref
