#include "predasym/oracle.hpp"

#include "predasym/error.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace predasym {

ARModel ARModel::unidir(double a, double c, double sigma_w, double sigma_v)
{
    ARModel m;
    m.kind = ARKind::UnidirAR1;
    m.a = a;
    m.c = c;
    m.sigma_u = sigma_w;
    m.sigma_v = sigma_v;
    m.validate();
    return m;
}

ARModel ARModel::bidir_distinct(double a, double b, double c, int s, double sigma_u, double sigma_v)
{
    ARModel m;
    m.kind = ARKind::BidirDistinctEigen;
    m.a = a;
    m.b = b;
    m.c = c;
    m.s = s;
    m.sigma_u = sigma_u;
    m.sigma_v = sigma_v;
    m.validate();
    return m;
}

ARModel ARModel::bidir_jordan(double lambda, double a, double b, double sigma_u, double sigma_v)
{
    ARModel m;
    m.kind = ARKind::BidirJordan;
    m.lambda = lambda;
    m.a = a;
    m.b = b;
    m.sigma_u = sigma_u;
    m.sigma_v = sigma_v;
    m.validate();
    return m;
}

void ARModel::validate() const
{
    if (!(sigma_u >= 0.0) || !(sigma_v >= 0.0)) {
        throw Error(ErrorKind::InvalidParams, "noise standard deviations must be >= 0");
    }
    switch (kind) {
    case ARKind::UnidirAR1:
        if (!(std::abs(a) < 1.0)) {
            throw Error(ErrorKind::NotStationary, "|a| = " + std::to_string(std::abs(a)) + " must be < 1");
        }
        break;
    case ARKind::BidirDistinctEigen: {
        if (!(b > 0.0) || !(c > 0.0) || (s != 1 && s != -1)) {
            throw Error(ErrorKind::InvalidParams, "distinct-eigenvalue model needs b, c > 0 and s = +-1");
        }
        const double r = std::sqrt(b * c);
        if (!(std::abs(a + r) < 1.0) || !(std::abs(a - r) < 1.0)) {
            throw Error(ErrorKind::NotStationary, "eigenvalues a +- sqrt(bc) must lie inside (-1, 1)");
        }
        break;
    }
    case ARKind::BidirJordan:
        if (b == 0.0) {
            throw Error(ErrorKind::InvalidParams, "Jordan model needs b != 0");
        }
        if (a == 0.0) {
            throw Error(ErrorKind::InvalidKind, "Jordan model with a = 0 is not a coupled Jordan block");
        }
        if (!(std::abs(lambda) < 1.0)) {
            throw Error(ErrorKind::NotStationary, "|lambda| must be < 1");
        }
        break;
    }
}

std::array<double, 4> ARModel::coefficients() const
{
    switch (kind) {
    case ARKind::UnidirAR1: return {a, 0.0, c, 0.0};
    case ARKind::BidirDistinctEigen: return {a, s * b, s * c, a};
    case ARKind::BidirJordan: return {lambda + a, -b, a * a / b, lambda - a};
    }
    return {};
}

int LagCovariance::index(Var v, int lag) const
{
    if (std::abs(lag) > eta_max) {
        throw Error(ErrorKind::LagOutOfRange, "lag " + std::to_string(lag) + " beyond eta_max");
    }
    return static_cast<int>(v) * (2 * eta_max + 1) + lag + eta_max;
}

namespace {

// Cov(v1_{t+k}, v2_t) for k >= 0.
using CrossCov = std::function<double(Var, Var, int)>;

LagCovariance assemble(int eta_max, const CrossCov& cov)
{
    if (eta_max < 0) {
        throw Error(ErrorKind::InvalidParams, "eta_max must be >= 0");
    }
    LagCovariance out;
    out.eta_max = eta_max;
    const int width = 2 * eta_max + 1;
    out.matrix.resize(2 * width, 2 * width);
    for (int i = 0; i < 2 * width; ++i) {
        for (int j = 0; j < 2 * width; ++j) {
            const Var vi = i < width ? Var::X : Var::Y;
            const Var vj = j < width ? Var::X : Var::Y;
            const int k = (i % width) - (j % width);
            out.matrix(i, j) = k >= 0 ? cov(vi, vj, k) : cov(vj, vi, -k);
        }
    }
    return out;
}

struct HatCov {
    double xx, yy, yx, xy; // Cov(xh_{t+k}, xh_t), Cov(yh.., yh), Cov(yh_{t+k}, xh_t), Cov(xh_{t+k}, yh_t)
};

// Back-transform from hat variables with U = [[al, be], [ga, de]].
double original_cov(const HatCov& h, double al, double be, double ga, double de, Var v1, Var v2)
{
    const double det = al * de - be * ga;
    const double pre = 1.0 / (det * det);
    if (v1 == Var::X && v2 == Var::X) {
        return pre * (de * de * h.xx + be * be * h.yy - de * be * (h.xy + h.yx));
    }
    if (v1 == Var::Y && v2 == Var::Y) {
        return pre * (al * al * h.yy + ga * ga * h.xx - al * ga * (h.xy + h.yx));
    }
    if (v1 == Var::Y) {
        return pre * (al * de * h.yx + ga * be * h.xy - al * be * h.yy - ga * de * h.xx);
    }
    return pre * (al * de * h.xy + ga * be * h.yx - al * be * h.yy - ga * de * h.xx);
}

} // namespace

LagCovariance ar1_unidir_covariance(const ARModel& model, int eta_max)
{
    if (model.kind != ARKind::UnidirAR1) {
        throw Error(ErrorKind::InvalidKind, "expected a unidirectional AR(1) model");
    }
    model.validate();
    const double a = model.a;
    const double c = model.c;
    const double var_x = model.sigma_u * model.sigma_u / (1.0 - a * a);
    const double var_v = model.sigma_v * model.sigma_v;
    return assemble(eta_max, [&](Var v1, Var v2, int k) {
        if (v1 == Var::X && v2 == Var::X) {
            return std::pow(a, k) * var_x;
        }
        if (v1 == Var::Y && v2 == Var::Y) {
            return c * c * std::pow(a, k) * var_x + (k == 0 ? var_v : 0.0);
        }
        // Cov(x_{t+k}, y_{t+l}) = c a^|l-1-k| var_x
        const int l = v1 == Var::X ? 0 : k;
        const int kk = v1 == Var::X ? k : 0;
        return c * std::pow(a, std::abs(l - 1 - kk)) * var_x;
    });
}

LagCovariance bidir_covariance(const ARModel& model, int eta_max)
{
    model.validate();
    const double su2 = model.sigma_u * model.sigma_u;
    const double sv2 = model.sigma_v * model.sigma_v;

    if (model.kind == ARKind::BidirDistinctEigen) {
        const double r = std::sqrt(model.b * model.c);
        const double l1 = model.a + r;
        const double l2 = model.a - r;
        const double al = 1.0 / (2.0 * std::sqrt(model.b));
        const double be = model.s / (2.0 * std::sqrt(model.c));
        const double ga = -al;
        const double de = be;
        const double var_xh = (al * al * su2 + be * be * sv2) / (1.0 - l1 * l1);
        const double var_yh = (ga * ga * su2 + de * de * sv2) / (1.0 - l2 * l2);
        const double cov_h = (al * ga * su2 + de * be * sv2) / (1.0 - l1 * l2);
        return assemble(eta_max, [=](Var v1, Var v2, int k) {
            const HatCov h{std::pow(l1, k) * var_xh, std::pow(l2, k) * var_yh, std::pow(l2, k) * cov_h,
                           std::pow(l1, k) * cov_h};
            return original_cov(h, al, be, ga, de, v1, v2);
        });
    }
    if (model.kind == ARKind::BidirJordan) {
        const double lam = model.lambda;
        const double a = model.a;
        const double b = model.b;
        const double al = a / b;
        const double be = -1.0;
        const double ga = b / (a * a + b * b);
        const double de = a / (a * a + b * b);
        const double q = 1.0 - lam * lam;
        const double psi = (al * al * su2 + be * be * sv2) / q;
        const double phi = lam / q * psi + (al * ga * su2 + de * be * sv2) / q;
        const double theta = 2.0 * lam / q * phi + psi / q + (ga * ga * su2 + de * de * sv2) / q;
        return assemble(eta_max, [=](Var v1, Var v2, int k) {
            const double lk = std::pow(lam, k);
            const double dlk = k == 0 ? 0.0 : k * std::pow(lam, k - 1);
            const HatCov h{lk * psi, lk * theta + dlk * phi, lk * phi + dlk * psi, lk * phi};
            return original_cov(h, al, be, ga, de, v1, v2);
        });
    }
    throw Error(ErrorKind::InvalidKind, "expected a bidirectional model");
}

LagCovariance lag_covariance(const ARModel& model, int eta_max)
{
    return model.kind == ARKind::UnidirAR1 ? ar1_unidir_covariance(model, eta_max) : bidir_covariance(model, eta_max);
}

double gaussian_entropy(const Eigen::MatrixXd& cov)
{
    const auto d = cov.rows();
    if (d == 0 || cov.cols() != d) {
        throw Error(ErrorKind::InvalidParams, "covariance must be a nonempty square matrix");
    }
    double log_diag = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(cov(i, i) > 0.0)) {
            throw Error(ErrorKind::SingularCovariance, "nonpositive variance on the diagonal");
        }
        log_diag += std::log(cov(i, i));
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success) {
        throw Error(ErrorKind::SingularCovariance, "factorization failed");
    }
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double p = ldlt.vectorD()(i);
        if (!(p > 0.0)) {
            throw Error(ErrorKind::SingularCovariance, "covariance is not positive definite");
        }
        log_det += std::log(p);
    }
    // det <= 1e-12 * (geometric mean of the diagonal)^d
    if (log_det <= std::log(1e-12) + log_diag) {
        throw Error(ErrorKind::SingularCovariance, "covariance is numerically singular");
    }
    const double dd = static_cast<double>(d);
    return 0.5 * (dd * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_det) / std::numbers::ln2;
}

namespace {

double block_entropy(const LagCovariance& cov, std::initializer_list<std::span<const int>> sets)
{
    std::vector<int> idx;
    for (auto s : sets) {
        idx.insert(idx.end(), s.begin(), s.end());
    }
    const auto n = static_cast<Eigen::Index>(idx.size());
    const auto dim = cov.matrix.rows();
    Eigen::MatrixXd sub(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (idx[i] < 0 || idx[i] >= dim || idx[j] < 0 || idx[j] >= dim) {
                throw Error(ErrorKind::LagOutOfRange, "index outside the lag covariance");
            }
            sub(i, j) = cov.matrix(idx[i], idx[j]);
        }
    }
    return gaussian_entropy(sub);
}

} // namespace

double exact_cmi(const LagCovariance& cov, std::span<const int> s_pp, std::span<const int> t_nu,
                 std::span<const int> t_pp)
{
    return block_entropy(cov, {s_pp, t_pp}) + block_entropy(cov, {t_nu, t_pp}) - block_entropy(cov, {t_pp}) -
           block_entropy(cov, {s_pp, t_nu, t_pp});
}

double exact_te(const LagCovariance& cov, Var source, Var target, int nu)
{
    if (nu == 0) {
        throw Error(ErrorKind::LagOutOfRange, "prediction lag must be nonzero");
    }
    const int s[] = {cov.index(source, 0)};
    const int tn[] = {cov.index(target, nu)};
    const int tp[] = {cov.index(target, 0)};
    return exact_cmi(cov, s, tn, tp);
}

TESpectrum exact_spectrum(const LagCovariance& cov, Var source, Var target)
{
    std::vector<double> fwd;
    std::vector<double> bwd;
    for (int nu = 1; nu <= cov.eta_max; ++nu) {
        fwd.push_back(exact_te(cov, source, target, nu));
        bwd.push_back(exact_te(cov, source, target, -nu));
    }
    return make_spectrum(fwd, bwd, "exact");
}

ExactAsymmetry exact_asymmetry(const ARModel& model, int eta_max, double f)
{
    if (eta_max < 1) {
        throw Error(ErrorKind::InvalidParams, "eta_max must be >= 1");
    }
    const LagCovariance cov = lag_covariance(model, eta_max);
    ExactAsymmetry out;
    out.te_xy = exact_spectrum(cov, Var::X, Var::Y);
    out.te_yx = exact_spectrum(cov, Var::Y, Var::X);
    out.xy = asymmetry_curve(out.te_xy, f);
    out.yx = asymmetry_curve(out.te_yx, f);
    return out;
}

} // namespace predasym
