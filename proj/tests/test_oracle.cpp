#include "predasym/error.hpp"
#include "predasym/oracle.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

using namespace predasym;

namespace {

Eigen::Matrix2d coeffs(const ARModel& m)
{
    const auto c = m.coefficients();
    Eigen::Matrix2d A;
    A << c[0], c[1], c[2], c[3];
    return A;
}

Eigen::Matrix2d noise(const ARModel& m)
{
    Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
    Q(0, 0) = m.sigma_u * m.sigma_u;
    Q(1, 1) = m.sigma_v * m.sigma_v;
    return Q;
}

std::vector<ARModel> model_zoo()
{
    return {
        ARModel::unidir(0.8, 0.8),
        ARModel::unidir(-0.5, 1.3, 0.7, 1.5),
        ARModel::unidir(0.3, 0.0),
        ARModel::bidir_distinct(0.4, 0.3, 0.2, 1),
        ARModel::bidir_distinct(0.1, 0.5, 0.6, -1, 1.2, 0.8),
        ARModel::bidir_distinct(0.5, 0.2, 0.2, 1),
        ARModel::bidir_jordan(0.5, 0.2, 0.4),
        ARModel::bidir_jordan(-0.3, 0.4, -0.5, 0.9, 1.1),
    };
}

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Validation;
}

} // namespace

TEST_CASE("unidirectional covariance closed forms")
{
    const auto cov = ar1_unidir_covariance(ARModel::unidir(0.8, 0.8), 3);
    const auto& M = cov.matrix;
    CHECK(M(cov.index(Var::X, 0), cov.index(Var::X, 0)) == doctest::Approx(2.7778).epsilon(1e-4));
    CHECK(M(cov.index(Var::X, 2), cov.index(Var::X, 0)) == doctest::Approx(1.7778).epsilon(1e-4));
    const auto dec = ar1_unidir_covariance(ARModel::unidir(0.8, 0.0), 3);
    for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) {
            CHECK(dec.matrix(dec.index(Var::X, i), dec.index(Var::Y, j)) == 0.0);
        }
    }
}

TEST_CASE("lag covariance agrees with the series-sum oracle")
{
    for (const auto& m : model_zoo()) {
        const int h = 6;
        const auto cov = lag_covariance(m, h);
        const Eigen::MatrixXd ref = oracle_ref::stacked_covariance(coeffs(m), noise(m), h);
        REQUIRE(cov.matrix.rows() == ref.rows());
        const double scale = ref.cwiseAbs().maxCoeff();
        CHECK((cov.matrix - ref).cwiseAbs().maxCoeff() <= 1e-9 * scale);
        for (int v = 0; v < 2; ++v) {
            for (int l = -h; l <= h; ++l) {
                CHECK(cov.index(static_cast<Var>(v), l) == oracle_ref::stacked_index(v, l, h));
            }
        }
    }
}

TEST_CASE("exact TE agrees with the oracle CMI")
{
    for (const auto& m : model_zoo()) {
        const int h = 5;
        const auto cov = lag_covariance(m, h);
        const Eigen::MatrixXd ref = oracle_ref::stacked_covariance(coeffs(m), noise(m), h);
        for (int nu = -h; nu <= h; ++nu) {
            if (nu == 0) {
                continue;
            }
            for (int s = 0; s < 2; ++s) {
                const int t = 1 - s;
                const double want = oracle_ref::gaussian_cmi(ref, {oracle_ref::stacked_index(t, nu, h)},
                                                             {oracle_ref::stacked_index(s, 0, h)},
                                                             {oracle_ref::stacked_index(t, 0, h)});
                const double got = exact_te(cov, static_cast<Var>(s), static_cast<Var>(t), nu);
                CHECK(got == doctest::Approx(want).epsilon(1e-8).scale(1.0));
                CHECK(got >= -1e-10);
            }
        }
    }
}

TEST_CASE("covariance is symmetric and PSD")
{
    for (const auto& m : model_zoo()) {
        const auto cov = lag_covariance(m, 8);
        CHECK((cov.matrix - cov.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9 * cov.matrix.trace());
    }
}

TEST_CASE("symmetric distinct-eigenvalue model has mirrored cross-covariances")
{
    const auto cov = bidir_covariance(ARModel::bidir_distinct(0.3, 0.4, 0.4, 1, 1.0, 1.0), 5);
    const auto& M = cov.matrix;
    CHECK(M(cov.index(Var::X, 0), cov.index(Var::X, 0)) ==
          doctest::Approx(M(cov.index(Var::Y, 0), cov.index(Var::Y, 0))));
    for (int k = 0; k <= 5; ++k) {
        CHECK(M(cov.index(Var::Y, k), cov.index(Var::X, 0)) ==
              doctest::Approx(M(cov.index(Var::X, k), cov.index(Var::Y, 0))).epsilon(1e-12));
    }
}

TEST_CASE("model validation")
{
    CHECK(kind_of([] { ARModel::bidir_jordan(0.5, 0.0, 0.4).validate(); }) == ErrorKind::InvalidKind);
    CHECK(kind_of([] { ar1_unidir_covariance(ARModel::unidir(1.0, 0.5), 2); }) == ErrorKind::NotStationary);
    CHECK(kind_of([] { bidir_covariance(ARModel::bidir_distinct(0.8, 0.5, 0.5, 1), 2); }) ==
          ErrorKind::NotStationary);
}

TEST_CASE("gaussian entropy")
{
    CHECK(gaussian_entropy(Eigen::MatrixXd::Identity(1, 1)) == doctest::Approx(2.0471).epsilon(1e-4));
    CHECK(gaussian_entropy(Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(4.0942).epsilon(1e-4));
    Eigen::MatrixXd sing(2, 2);
    sing << 1.0, 1.0, 1.0, 1.0;
    CHECK(kind_of([&] { gaussian_entropy(sing); }) == ErrorKind::SingularCovariance);
}

TEST_CASE("decoupled unidirectional model has zero TE at every lag")
{
    const auto cov = ar1_unidir_covariance(ARModel::unidir(0.8, 0.0), 10);
    for (int nu = -10; nu <= 10; ++nu) {
        if (nu != 0) {
            CHECK(std::abs(exact_te(cov, Var::X, Var::Y, nu)) <= 1e-10);
            CHECK(std::abs(exact_te(cov, Var::Y, Var::X, nu)) <= 1e-10);
        }
    }
}

TEST_CASE("exact TE matches a Monte Carlo covariance estimate")
{
    const auto m = ARModel::unidir(0.8, 0.8);
    const int h = 2;
    const Eigen::MatrixXd sim = oracle_ref::simulated_stacked_covariance(coeffs(m), noise(m), h, 1000000, 99);
    const double mc = oracle_ref::gaussian_cmi(sim, {oracle_ref::stacked_index(1, 1, h)},
                                               {oracle_ref::stacked_index(0, 0, h)},
                                               {oracle_ref::stacked_index(1, 0, h)});
    const double exact = exact_te(lag_covariance(m, h), Var::X, Var::Y, 1);
    CHECK(std::abs(mc - exact) <= 0.02);
}

TEST_CASE("exact asymmetry signs and plateau")
{
    const auto ex = exact_asymmetry(ARModel::unidir(0.8, 0.8), 20);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(ex.xy.A[i] > 0.0);
        CHECK(ex.yx.A[i] < 0.0);
        if (i > 0) {
            CHECK(ex.xy.A[i] >= ex.xy.A[i - 1]);
            CHECK(ex.yx.A[i] <= ex.yx.A[i - 1]);
        }
    }
    // increments shrink once past their peak
    std::vector<double> inc{ex.xy.A[0]};
    for (std::size_t i = 1; i < 20; ++i) {
        inc.push_back(ex.xy.A[i] - ex.xy.A[i - 1]);
    }
    const auto peak = static_cast<std::size_t>(std::max_element(inc.begin(), inc.end()) - inc.begin());
    for (std::size_t i = peak + 1; i < inc.size(); ++i) {
        CHECK(inc[i] <= inc[i - 1]);
    }
    CHECK(inc.back() < 1e-3 * ex.xy.A.back());
}

TEST_CASE("asymmetry grows with coupling at fixed a")
{
    double prev = 0.0;
    for (double c = 0.1; c <= 1.0001; c += 0.1) {
        const auto ex = exact_asymmetry(ARModel::unidir(0.8, c), 10);
        CHECK(ex.xy.A[9] > prev);
        prev = ex.xy.A[9];
    }
}

TEST_CASE("exchanging the lag sets negates the exact asymmetry")
{
    const auto ex = exact_asymmetry(ARModel::unidir(0.6, 0.9), 8);
    const auto swapped = asymmetry_curve(exchange_halves(ex.te_xy));
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(swapped.A[i] == -ex.xy.A[i]);
    }
}
