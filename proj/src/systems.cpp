#include "predasym/systems.hpp"

#include "predasym/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace predasym {

namespace {

struct FamilyInfo {
    Family family;
    std::string_view name;
};

constexpr std::array<FamilyInfo, 15> kFamilies{{
    {Family::LogisticBidir, "logistic_bidir"},
    {Family::CommonCause, "common_cause"},
    {Family::VarK, "var_k"},
    {Family::NoiseUniform, "noise_uniform"},
    {Family::NoiseNormal, "noise_normal"},
    {Family::NoiseBrownian, "noise_brownian"},
    {Family::ArPeriodicNl, "ar_periodic_nl"},
    {Family::ChenLinear, "chen_linear"},
    {Family::ChenNonlinear, "chen_nonlinear"},
    {Family::ChenPeriodic, "chen_periodic"},
    {Family::LogisticChain, "logistic_chain"},
    {Family::HenonChain, "henon_chain"},
    {Family::RosslerLorenz, "rossler_lorenz"},
    {Family::BidirNlPeriodic, "bidir_nl_periodic"},
    {Family::Nl2d, "nl2d"},
}};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_chain(Family f)
{
    return f == Family::ArPeriodicNl || f == Family::ChenLinear || f == Family::ChenNonlinear ||
           f == Family::ChenPeriodic || f == Family::LogisticChain || f == Family::HenonChain;
}

bool is_chen(Family f)
{
    return f == Family::ChenLinear || f == Family::ChenNonlinear || f == Family::ChenPeriodic;
}

// u (1 - u^2) exp(-u^2), the nonlinear self term shared by several families
double bump(double u)
{
    return u * (1.0 - u * u) * std::exp(-u * u);
}

std::size_t as_lag(double v, const std::string& name)
{
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e6) {
        throw Error(ErrorKind::InvalidParams, "lag parameter '" + name + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

std::size_t chain_length(const SystemSpec& s)
{
    const double k = s.get("K");
    if (!(k >= 1.0) || k != std::floor(k)) {
        throw Error(ErrorKind::InvalidParams, "'K' must be a positive integer");
    }
    return static_cast<std::size_t>(k);
}

std::vector<std::size_t> lags(const SystemSpec& s, const std::string& name, std::size_t size)
{
    std::vector<std::size_t> out;
    for (double v : s.vec(name, size)) {
        out.push_back(as_lag(v, name));
    }
    return out;
}

// Time-indexed state for K variables with history.
class Sim {
public:
    Sim(std::size_t vars, std::size_t history, std::size_t steps)
        : history_(history), x_(vars, std::vector<double>(history + steps, 0.0))
    {
    }
    [[nodiscard]] std::size_t total() const { return x_.front().size(); }
    [[nodiscard]] std::size_t history() const { return history_; }
    double& at(std::size_t var, std::size_t t) { return x_[var][t]; }
    [[nodiscard]] double at(std::size_t var, std::size_t t) const { return x_[var][t]; }

    void check(std::size_t var, std::size_t t) const
    {
        const double v = x_[var][t];
        if (!std::isfinite(v) || std::abs(v) > 1e100) {
            throw Error(ErrorKind::Diverged, "state of variable " + std::to_string(var + 1) + " diverged at step " +
                                                 std::to_string(t));
        }
    }

    MultiSeries tail(std::size_t n, const std::vector<std::string>& labels) const
    {
        std::vector<TimeSeries> cols;
        for (std::size_t v = 0; v < x_.size(); ++v) {
            cols.emplace_back(std::vector<double>(x_[v].end() - static_cast<std::ptrdiff_t>(n), x_[v].end()), 1.0,
                              labels[v]);
        }
        return MultiSeries(std::move(cols));
    }

private:
    std::size_t history_;
    std::vector<std::vector<double>> x_;
};

std::vector<std::string> numbered(const std::string& stem, std::size_t k)
{
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= k; ++i) {
        out.push_back(stem + std::to_string(i));
    }
    return out;
}

// Fills the history with U(0,1) draws unless "x0" gives one value per variable.
void init_history(Sim& sim, const SystemSpec& s, std::size_t vars, Rng& rng)
{
    if (s.has("x0")) {
        const auto& x0 = s.vec("x0", vars);
        for (std::size_t v = 0; v < vars; ++v) {
            for (std::size_t t = 0; t < sim.history(); ++t) {
                sim.at(v, t) = x0[v];
            }
        }
        return;
    }
    for (std::size_t t = 0; t < sim.history(); ++t) {
        for (std::size_t v = 0; v < vars; ++v) {
            sim.at(v, t) = rng.uniform();
        }
    }
}

std::size_t max_of(std::initializer_list<std::vector<std::size_t>> groups)
{
    std::size_t m = 1;
    for (const auto& g : groups) {
        for (std::size_t v : g) {
            m = std::max(m, v);
        }
    }
    return m;
}

// ---- logistic_bidir -------------------------------------------------------

MultiSeries gen_logistic_bidir(const SystemSpec& s)
{
    const auto& r = s.vec("r", 2);
    const double cxy = s.get("c_xy");
    const double cyx = s.get("c_yx");
    const double sxy = s.get_or("sigma_xy", 0.0);
    const double syx = s.get_or("sigma_yx", 0.0);
    for (double ri : r) {
        if (!(ri >= 0.0 && ri <= 4.0)) {
            throw Error(ErrorKind::InvalidParams, "logistic parameter r must lie in [0, 4]");
        }
    }
    if (cxy < 0.0 || cyx < 0.0 || sxy < 0.0 || syx < 0.0) {
        throw Error(ErrorKind::InvalidParams, "couplings and noise levels must be >= 0");
    }
    Rng rng(s.seed);
    Sim sim(2, 1, s.transient + s.n);
    init_history(sim, s, 2, rng);
    for (std::size_t t = 1; t < sim.total(); ++t) {
        const double x = sim.at(0, t - 1);
        const double y = sim.at(1, t - 1);
        const double xi_xy = rng.uniform();
        const double xi_yx = rng.uniform();
        const double fxy = (y + cxy * (x + sxy * xi_xy)) / (1.0 + cxy * (1.0 + sxy));
        const double fyx = (x + cyx * (y + syx * xi_yx)) / (1.0 + cyx * (1.0 + syx));
        sim.at(0, t) = r[0] * fyx * (1.0 - fyx);
        sim.at(1, t) = r[1] * fxy * (1.0 - fxy);
        sim.check(0, t);
        sim.check(1, t);
    }
    return sim.tail(s.n, {"x", "y"});
}

// ---- common_cause ---------------------------------------------------------

MultiSeries gen_common_cause(const SystemSpec& s)
{
    const auto& alpha = s.vec("alpha", 3);
    const auto& beta = s.vec("beta", 2);
    const auto& amp = s.vec("A", 3);
    const auto& omega = s.vec("omega", 3);
    const auto& phi = s.vec("phi", 3);
    const auto& sigma = s.vec("sigma", 3);
    const auto& c = s.vec("c", 2);
    const auto gamma = lags(s, "gamma", 3);
    const auto nu = lags(s, "nu", 2);
    for (double w : omega) {
        if (!(w > 0.0)) {
            throw Error(ErrorKind::InvalidParams, "periods 'omega' must be positive");
        }
    }
    Rng rng(s.seed);
    Sim sim(3, max_of({gamma, nu}), s.transient + s.n);
    init_history(sim, s, 3, rng);
    for (std::size_t t = sim.history(); t < sim.total(); ++t) {
        const double td = static_cast<double>(t);
        for (std::size_t i = 0; i < 3; ++i) {
            double v = alpha[i] * bump(sim.at(i, t - gamma[i])) + amp[i] * std::cos(kTwoPi / omega[i] * td + phi[i]) +
                       sigma[i] * rng.uniform();
            if (i < 2) {
                const double d = sim.at(2, t - nu[i]);
                v += c[i] * (d * d + beta[i] * d / (1.0 + std::exp(-d)));
            }
            sim.at(i, t) = v;
            sim.check(i, t);
        }
    }
    return sim.tail(s.n, {"x1", "x2", "x3"});
}

// ---- var_k ----------------------------------------------------------------

MultiSeries gen_var(const SystemSpec& s)
{
    const auto coeffs = var_coefficients(s);
    const std::size_t p = static_cast<std::size_t>(coeffs.front().rows());
    const double radius = var_spectral_radius(coeffs);
    if (!(radius < 1.0)) {
        std::ostringstream msg;
        msg << "VAR coefficients are not stable: companion spectral radius " << radius << " >= 1";
        throw Error(ErrorKind::InvalidParams, msg.str());
    }
    const auto& sd = s.vec("noise_sd", p);
    Rng rng(s.seed);
    Sim sim(p, coeffs.size(), s.transient + s.n);
    for (std::size_t t = sim.history(); t < sim.total(); ++t) {
        for (std::size_t i = 0; i < p; ++i) {
            double v = 0.0;
            for (std::size_t l = 0; l < coeffs.size(); ++l) {
                for (std::size_t j = 0; j < p; ++j) {
                    v += coeffs[l](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * sim.at(j, t - l - 1);
                }
            }
            sim.at(i, t) = v + sd[i] * rng.normal();
        }
        for (std::size_t i = 0; i < p; ++i) {
            sim.check(i, t);
        }
    }
    return sim.tail(s.n, numbered("x", p));
}

// ---- noise ----------------------------------------------------------------

MultiSeries gen_noise(const SystemSpec& s)
{
    Rng rng(s.seed);
    std::vector<double> x(s.n);
    std::vector<double> y(s.n);
    if (s.family == Family::NoiseNormal) {
        const double sx = s.get_or("sigma_x", 1.0);
        const double sy = s.get_or("sigma_y", 1.0);
        if (!(sx > 0.0) || !(sy > 0.0)) {
            throw Error(ErrorKind::InvalidParams, "noise standard deviations must be positive");
        }
        for (std::size_t t = 0; t < s.n; ++t) {
            x[t] = sx * rng.normal();
            y[t] = sy * rng.normal();
        }
    } else {
        double cx = 0.0;
        double cy = 0.0;
        for (std::size_t t = 0; t < s.n; ++t) {
            const double ux = rng.uniform();
            const double uy = rng.uniform();
            if (s.family == Family::NoiseBrownian) {
                cx += ux;
                cy += uy;
                x[t] = cx;
                y[t] = cy;
            } else {
                x[t] = ux;
                y[t] = uy;
            }
        }
    }
    return MultiSeries({TimeSeries(std::move(x), 1.0, "x"), TimeSeries(std::move(y), 1.0, "y")});
}

// ---- ar_periodic_nl -------------------------------------------------------

MultiSeries gen_ar_periodic(const SystemSpec& s)
{
    const std::size_t k = chain_length(s);
    const std::size_t links = k - 1;
    const auto& alpha = s.vec("alpha", k);
    const auto& beta = s.vec("beta", k);
    const auto& sigma = s.vec("sigma", k);
    const auto& amp = s.vec("s", k);
    const auto& omega = s.vec("omega", k);
    const auto& phi = s.vec("phi", k);
    const auto gamma = lags(s, "gamma", k);
    const auto& c = s.vec("c", links);
    const auto& chi = s.vec("chi", links);
    const auto& rho = s.vec("rho", links);
    const auto& q = s.vec("q", links);
    const auto tau = lags(s, "tau", links);
    const auto nu = lags(s, "nu", links);
    for (std::size_t i = 0; i < links; ++i) {
        if (tau[i] == nu[i]) {
            throw Error(ErrorKind::InvalidParams, "interaction lags 'tau' and 'nu' must differ");
        }
    }
    Rng rng(s.seed);
    Sim sim(k, max_of({gamma, tau, nu}), s.transient + s.n);
    init_history(sim, s, k, rng);
    for (std::size_t t = sim.history(); t < sim.total(); ++t) {
        const double td = static_cast<double>(t);
        for (std::size_t i = 0; i < k; ++i) {
            double v = alpha[i] + beta[i] * sim.at(i, t - gamma[i]) + sigma[i] * rng.normal() +
                       amp[i] * std::cos(kTwoPi / omega[i] * td + phi[i]);
            if (i > 0) {
                const std::size_t e = i - 1;
                v += c[e] * (chi[e] - rho[e] * sim.at(i - 1, t - tau[e])) /
                     (1.0 + std::exp(-q[e] * sim.at(i - 1, t - nu[e])));
            }
            sim.at(i, t) = v;
            sim.check(i, t);
        }
    }
    return sim.tail(s.n, numbered("x", k));
}

// ---- chen_linear / chen_nonlinear / chen_periodic -------------------------

MultiSeries gen_chen(const SystemSpec& s)
{
    const std::size_t k = chain_length(s);
    const std::size_t links = k - 1;
    const auto& alpha = s.vec("alpha", k);
    const auto& beta = s.vec("beta", k);
    const auto& sigma = s.vec("sigma", k);
    const auto gamma = lags(s, "gamma", k);
    const auto tau = lags(s, "tau", k);
    const auto& c = s.vec("c", links);
    const auto nu = lags(s, "nu", links);
    const bool periodic = s.family == Family::ChenPeriodic;
    const std::vector<double> none;
    const auto& omega = periodic ? s.vec("omega", k) : none;
    const auto& phi = periodic ? s.vec("phi", k) : none;
    Rng rng(s.seed);
    Sim sim(k, max_of({gamma, tau, nu}), s.transient + s.n);
    init_history(sim, s, k, rng);
    for (std::size_t t = sim.history(); t < sim.total(); ++t) {
        const double td = static_cast<double>(t);
        for (std::size_t i = 0; i < k; ++i) {
            double v = alpha[i] * bump(sim.at(i, t - gamma[i])) + beta[i] * sim.at(i, t - tau[i]) +
                       sigma[i] * rng.normal();
            if (periodic) {
                v += std::cos(kTwoPi / omega[i] * td + phi[i]);
            }
            if (i > 0) {
                const double d = sim.at(i - 1, t - nu[i - 1]);
                v += c[i - 1] * (s.family == Family::ChenNonlinear ? d * d : d);
            }
            sim.at(i, t) = v;
            sim.check(i, t);
        }
    }
    return sim.tail(s.n, numbered("x", k));
}

// ---- logistic_chain -------------------------------------------------------

MultiSeries gen_logistic_chain(const SystemSpec& s)
{
    const std::size_t k = chain_length(s);
    const std::size_t links = k - 1;
    const auto& r = s.vec("r", k);
    const auto gamma = lags(s, "gamma", k);
    const auto tau = lags(s, "tau", links);
    const auto& c = s.vec("c", links);
    const auto& sigma = s.vec("sigma", links);
    for (double ri : r) {
        if (!(ri >= 0.0 && ri <= 4.0)) {
            throw Error(ErrorKind::InvalidParams, "logistic parameter r must lie in [0, 4]");
        }
    }
    for (std::size_t e = 0; e < links; ++e) {
        if (c[e] < 0.0 || sigma[e] < 0.0) {
            throw Error(ErrorKind::InvalidParams, "couplings and noise levels must be >= 0");
        }
    }
    Rng rng(s.seed);
    Sim sim(k, max_of({gamma, tau}), s.transient + s.n);
    init_history(sim, s, k, rng);
    for (std::size_t t = sim.history(); t < sim.total(); ++t) {
        for (std::size_t i = 0; i < k; ++i) {
            double f = sim.at(i, t - gamma[i]);
            if (i > 0) {
                const std::size_t e = i - 1;
                f = (f + c[e] * (sim.at(i - 1, t - tau[e]) + sigma[e] * rng.uniform())) /
                    (1.0 + c[e] * (1.0 + sigma[e]));
            }
            sim.at(i, t) = r[i] * f * (1.0 - f);
            sim.check(i, t);
        }
    }
    return sim.tail(s.n, numbered("x", k));
}

// ---- henon_chain ----------------------------------------------------------

MultiSeries gen_henon_chain(const SystemSpec& s)
{
    const std::size_t k = chain_length(s);
    const auto& c = s.vec("c", k - 1);
    const double a = s.get_or("a", 1.4);
    const double b = s.get_or("b", 0.3);
    for (double ci : c) {
        if (!(ci >= 0.0 && ci <= 1.0)) {
            throw Error(ErrorKind::InvalidParams, "Henon coupling C must lie in [0, 1]");
        }
    }
    Rng rng(s.seed);
    Sim sim(k, 2, s.transient + s.n);
    init_history(sim, s, k, rng);
    for (std::size_t t = 2; t < sim.total(); ++t) {
        for (std::size_t i = 0; i < k; ++i) {
            const double prev = sim.at(i, t - 1);
            double drive = prev;
            if (i > 0) {
                const double ci = c[i - 1];
                drive = 0.5 * ci * (sim.at(i - 1, t - 1) + prev) + (1.0 - ci) * prev;
            }
            sim.at(i, t) = a - drive * drive + b * sim.at(i, t - 2);
            sim.check(i, t);
        }
    }
    return sim.tail(s.n, numbered("x", k));
}

// ---- bidir_nl_periodic ----------------------------------------------------

MultiSeries gen_bidir_nl_periodic(const SystemSpec& s)
{
    const auto& alpha = s.vec("alpha", 2);
    const auto& beta = s.vec("beta", 2);
    const auto& omega = s.vec("omega", 2);
    const auto& phi = s.vec("phi", 2);
    const auto& sigma = s.vec("sigma", 2);
    const auto gamma = lags(s, "gamma", 2);
    const std::array<double, 2> c{s.get("c21"), s.get("c12")}; // c[i]: effect of the other variable on i
    Rng rng(s.seed);
    Sim sim(2, max_of({gamma}), s.transient + s.n);
    init_history(sim, s, 2, rng);
    for (std::size_t t = sim.history(); t < sim.total(); ++t) {
        const double td = static_cast<double>(t);
        for (std::size_t i = 0; i < 2; ++i) {
            const double own = sim.at(i, t - 1);
            sim.at(i, t) = alpha[i] * bump(sim.at(i, t - gamma[i])) + beta[i] * own +
                           c[i] * std::sin(sim.at(1 - i, t - 1)) + sigma[i] * rng.uniform() +
                           std::cos(kTwoPi / omega[i] * td + phi[i]) * own;
        }
        sim.check(0, t);
        sim.check(1, t);
    }
    return sim.tail(s.n, {"x1", "x2"});
}

// ---- nl2d -----------------------------------------------------------------

MultiSeries gen_nl2d(const SystemSpec& s)
{
    const double a1 = s.get_or("a1", 3.4);
    const double a2 = s.get_or("a2", 0.8);
    const double b1 = s.get_or("b1", 3.4);
    const double b2 = s.get_or("b2", 0.8);
    const double c = s.get("c_xy");
    const std::size_t tx1 = as_lag(s.get_or("tau_x1", 1), "tau_x1");
    const std::size_t tx2 = as_lag(s.get_or("tau_x2", 7), "tau_x2");
    const std::size_t ty1 = as_lag(s.get_or("tau_y1", 3), "tau_y1");
    const std::size_t ty2 = as_lag(s.get_or("tau_y2", 2), "tau_y2");
    const std::size_t tc = as_lag(s.get_or("tau_c", 5), "tau_c");
    Rng rng(s.seed);
    // value at t depends on t - 1 - lag
    Sim sim(2, max_of({{tx1, tx2, ty1, ty2, tc}}) + 1, s.transient + s.n);
    init_history(sim, s, 2, rng);
    for (std::size_t t = sim.history(); t < sim.total(); ++t) {
        const std::size_t base = t - 1;
        const double xc = sim.at(0, base - tc);
        sim.at(0, t) = a1 * bump(sim.at(0, base - tx1)) + a2 * sim.at(0, base - tx2);
        sim.at(1, t) = b1 * bump(sim.at(1, base - ty1)) + b2 * sim.at(1, base - ty2) + c * xc * xc;
        sim.check(0, t);
        sim.check(1, t);
    }
    return sim.tail(s.n, {"x", "y"});
}

// ---- rossler_lorenz -------------------------------------------------------

using State6 = std::array<double, 6>;

State6 rl_rhs(const State6& s, const std::array<double, 3>& a, const std::array<double, 3>& b, double c)
{
    return {a[0] * (s[1] + s[2]),
            a[1] * (s[0] + 0.2 * s[1]),
            a[1] * (0.2 + s[2] * (s[0] - a[2])),
            b[0] * (s[4] - s[3]),
            s[3] * (b[1] - s[5]) - s[4] + c * s[1] * s[1],
            s[3] * s[4] - b[2] * s[5]};
}

void rk4_step(State6& s, double dt, const std::array<double, 3>& a, const std::array<double, 3>& b, double c)
{
    auto axpy = [](const State6& x, const State6& k, double h) {
        State6 out;
        for (std::size_t i = 0; i < 6; ++i) {
            out[i] = x[i] + h * k[i];
        }
        return out;
    };
    const State6 k1 = rl_rhs(s, a, b, c);
    const State6 k2 = rl_rhs(axpy(s, k1, dt / 2), a, b, c);
    const State6 k3 = rl_rhs(axpy(s, k2, dt / 2), a, b, c);
    const State6 k4 = rl_rhs(axpy(s, k3, dt), a, b, c);
    for (std::size_t i = 0; i < 6; ++i) {
        s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

} // namespace

// ---- public API -------------------------------------------------------------

std::string_view family_name(Family f)
{
    for (const auto& info : kFamilies) {
        if (info.family == f) {
            return info.name;
        }
    }
    return "unknown";
}

Family parse_family(std::string_view name)
{
    for (const auto& info : kFamilies) {
        if (info.name == name) {
            return info.family;
        }
    }
    throw Error(ErrorKind::InvalidKind, "unknown system family '" + std::string(name) + "'");
}

std::vector<Family> all_families()
{
    std::vector<Family> out;
    for (const auto& info : kFamilies) {
        out.push_back(info.family);
    }
    return out;
}

double SystemSpec::get(const std::string& name) const
{
    const auto it = params.find(name);
    if (it == params.end() || it->second.empty()) {
        throw Error(ErrorKind::InvalidParams, std::string(family_name(family)) + ": missing parameter '" + name + "'");
    }
    return it->second.front();
}

double SystemSpec::get_or(const std::string& name, double fallback) const
{
    const auto it = params.find(name);
    return it == params.end() || it->second.empty() ? fallback : it->second.front();
}

const std::vector<double>& SystemSpec::vec(const std::string& name, std::size_t size) const
{
    const auto it = params.find(name);
    if (it == params.end()) {
        throw Error(ErrorKind::InvalidParams, std::string(family_name(family)) + ": missing parameter '" + name + "'");
    }
    if (it->second.size() != size) {
        throw Error(ErrorKind::InvalidParams, std::string(family_name(family)) + ": parameter '" + name + "' needs " +
                                                  std::to_string(size) + " values, got " +
                                                  std::to_string(it->second.size()));
    }
    return it->second;
}

void SystemSpec::validate() const
{
    if (n < 1) {
        throw Error(ErrorKind::InvalidParams, "series length must be >= 1");
    }
    for (const auto& [name, values] : params) {
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::InvalidParams, "parameter '" + name + "' is not finite");
            }
        }
    }
    if (get_or("obs_noise", 0.0) < 0.0) {
        throw Error(ErrorKind::InvalidParams, "obs_noise must be >= 0");
    }
    // a zero-length dry run exercises every parameter check
    SystemSpec probe = *this;
    probe.n = 1;
    probe.transient = 0;
    if (family == Family::RosslerLorenz) {
        probe.params["transient_time"] = {0.0};
    }
    generate(probe);
}

Generated generate(const SystemSpec& s)
{
    if (s.n < 1) {
        throw Error(ErrorKind::InvalidParams, "series length must be >= 1");
    }
    Generated g{[&]() -> MultiSeries {
                    switch (s.family) {
                    case Family::LogisticBidir: return gen_logistic_bidir(s);
                    case Family::CommonCause: return gen_common_cause(s);
                    case Family::VarK: return gen_var(s);
                    case Family::NoiseUniform:
                    case Family::NoiseNormal:
                    case Family::NoiseBrownian: return gen_noise(s);
                    case Family::ArPeriodicNl: return gen_ar_periodic(s);
                    case Family::ChenLinear:
                    case Family::ChenNonlinear:
                    case Family::ChenPeriodic: return gen_chen(s);
                    case Family::LogisticChain: return gen_logistic_chain(s);
                    case Family::HenonChain: return gen_henon_chain(s);
                    case Family::RosslerLorenz:
                        return integrate_ode(s, s.get_or("dt", 0.01), static_cast<int>(s.get_or("sample_every", 30)));
                    case Family::BidirNlPeriodic: return gen_bidir_nl_periodic(s);
                    case Family::Nl2d: return gen_nl2d(s);
                    }
                    throw Error(ErrorKind::InvalidKind, "unhandled family");
                }(),
                truth_graph(s)};
    return g;
}

std::vector<Edge> truth_graph(const SystemSpec& s)
{
    std::vector<Edge> edges;
    auto add_if = [&](double coupling, std::size_t from, std::size_t to) {
        if (coupling != 0.0) {
            edges.push_back({from, to});
        }
    };
    switch (s.family) {
    case Family::LogisticBidir:
        add_if(s.get("c_xy"), 0, 1);
        add_if(s.get("c_yx"), 1, 0);
        break;
    case Family::CommonCause: {
        const auto& c = s.vec("c", 2);
        add_if(c[0], 2, 0);
        add_if(c[1], 2, 1);
        break;
    }
    case Family::VarK: {
        const auto coeffs = var_coefficients(s);
        const auto p = static_cast<std::size_t>(coeffs.front().rows());
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i < p; ++i) {
                if (i == j) {
                    continue;
                }
                bool any = false;
                for (const auto& m : coeffs) {
                    any = any || m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0;
                }
                if (any) {
                    edges.push_back({j, i});
                }
            }
        }
        break;
    }
    case Family::NoiseUniform:
    case Family::NoiseNormal:
    case Family::NoiseBrownian: break;
    case Family::RosslerLorenz: add_if(s.get("c_xy"), 0, 1); break;
    case Family::BidirNlPeriodic:
        add_if(s.get("c12"), 0, 1);
        add_if(s.get("c21"), 1, 0);
        break;
    case Family::Nl2d: add_if(s.get("c_xy"), 0, 1); break;
    default: {
        const std::size_t k = chain_length(s);
        const auto& c = s.vec("c", k - 1);
        for (std::size_t e = 0; e + 1 < k; ++e) {
            add_if(c[e], e, e + 1);
        }
    }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

MultiSeries observe(const MultiSeries& clean, const SystemSpec& spec)
{
    const double level = spec.get_or("obs_noise", 0.0);
    if (level == 0.0) {
        return clean;
    }
    std::vector<TimeSeries> cols;
    for (std::size_t i = 0; i < clean.width(); ++i) {
        cols.push_back(add_observational_noise(clean[i], level, derive_seed(spec.seed, {0x0b5e, i})));
    }
    return MultiSeries(std::move(cols));
}

int max_delay(const SystemSpec& s)
{
    auto max_lag = [&](std::initializer_list<const char*> names) {
        std::size_t m = 1;
        for (const char* name : names) {
            const auto it = s.params.find(name);
            if (it != s.params.end()) {
                for (double v : it->second) {
                    m = std::max(m, static_cast<std::size_t>(std::max(v, 1.0)));
                }
            }
        }
        return static_cast<int>(m);
    };
    switch (s.family) {
    case Family::CommonCause: return max_lag({"gamma", "nu"});
    case Family::VarK: return static_cast<int>(s.get("order"));
    case Family::ArPeriodicNl: return max_lag({"gamma", "tau", "nu"});
    case Family::ChenLinear:
    case Family::ChenNonlinear:
    case Family::ChenPeriodic: return max_lag({"gamma", "tau", "nu"});
    case Family::LogisticChain: return max_lag({"gamma", "tau"});
    case Family::HenonChain: return 2;
    case Family::BidirNlPeriodic: return max_lag({"gamma"});
    case Family::Nl2d: {
        int m = 1;
        for (const char* name : {"tau_x1", "tau_x2", "tau_y1", "tau_y2", "tau_c"}) {
            m = std::max(m, static_cast<int>(s.get_or(name, 0.0)) + 1);
        }
        if (!s.has("tau_x2")) {
            m = std::max(m, 8); // default tau_x2 = 7
        }
        return m;
    }
    default: return 1;
    }
}

std::vector<Eigen::MatrixXd> var_coefficients(const SystemSpec& s)
{
    const double pd = s.get("p");
    const double od = s.get("order");
    if (!(pd >= 1.0) || pd != std::floor(pd) || !(od >= 1.0) || od != std::floor(od)) {
        throw Error(ErrorKind::InvalidParams, "var_k needs integer p >= 1 and order >= 1");
    }
    const auto p = static_cast<std::size_t>(pd);
    const auto order = static_cast<std::size_t>(od);
    const auto& flat = s.vec("A", order * p * p);
    std::vector<Eigen::MatrixXd> out;
    for (std::size_t l = 0; l < order; ++l) {
        Eigen::MatrixXd m(p, p);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[l * p * p + i * p + j];
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

double var_spectral_radius(const std::vector<Eigen::MatrixXd>& coeffs)
{
    if (coeffs.empty()) {
        return 0.0;
    }
    const auto p = coeffs.front().rows();
    const auto k = static_cast<Eigen::Index>(coeffs.size());
    for (const auto& m : coeffs) {
        if (m.rows() != p || m.cols() != p) {
            throw Error(ErrorKind::InvalidParams, "VAR coefficient matrices must be square and equal in size");
        }
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p * k, p * k);
    for (Eigen::Index l = 0; l < k; ++l) {
        companion.block(0, l * p, p, p) = coeffs[static_cast<std::size_t>(l)];
    }
    if (k > 1) {
        companion.block(p, 0, p * (k - 1), p * (k - 1)).setIdentity();
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool var_is_stable(const std::vector<Eigen::MatrixXd>& coeffs)
{
    return var_spectral_radius(coeffs) < 1.0;
}

MultiSeries integrate_ode(const SystemSpec& s, double dt, int sample_every)
{
    if (s.family != Family::RosslerLorenz) {
        throw Error(ErrorKind::InvalidKind, "integrate_ode needs a rossler_lorenz spec");
    }
    if (!(dt > 0.0) || sample_every < 1) {
        throw Error(ErrorKind::InvalidParams, "dt must be > 0 and sample_every >= 1");
    }
    const auto& av = s.vec("a", 3);
    const auto& bv = s.vec("b", 3);
    const std::array<double, 3> a{av[0], av[1], av[2]};
    const std::array<double, 3> b{bv[0], bv[1], bv[2]};
    const double c = s.get("c_xy");
    const double transient_time = s.get_or("transient_time", 100.0);
    if (transient_time < 0.0) {
        throw Error(ErrorKind::InvalidParams, "transient_time must be >= 0");
    }
    State6 state{};
    if (s.has("x0")) {
        const auto& x0 = s.vec("x0", 6);
        std::copy(x0.begin(), x0.end(), state.begin());
    } else {
        Rng rng(s.seed);
        for (double& v : state) {
            v = rng.uniform();
        }
    }
    auto check = [&](std::size_t step) {
        for (double v : state) {
            if (!std::isfinite(v) || std::abs(v) > 1e100) {
                throw Error(ErrorKind::Diverged, "Rossler-Lorenz integration diverged at step " + std::to_string(step));
            }
        }
    };
    const auto transient_steps = static_cast<std::size_t>(std::llround(transient_time / dt));
    for (std::size_t i = 0; i < transient_steps; ++i) {
        rk4_step(state, dt, a, b, c);
    }
    check(transient_steps);
    std::vector<double> x2(s.n);
    std::vector<double> y2(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
        x2[i] = state[1];
        y2[i] = state[4];
        for (int j = 0; j < sample_every; ++j) {
            rk4_step(state, dt, a, b, c);
        }
        check(transient_steps + (i + 1) * static_cast<std::size_t>(sample_every));
    }
    return MultiSeries({TimeSeries(std::move(x2), dt * sample_every, "x2"),
                        TimeSeries(std::move(y2), dt * sample_every, "y2")});
}

// ---- randomization ----------------------------------------------------------

namespace {

std::vector<double> draw_uniform(Rng& rng, std::size_t n, double lo, double hi)
{
    std::vector<double> out(n);
    for (double& v : out) {
        v = rng.uniform(lo, hi);
    }
    return out;
}

std::vector<double> draw_int(Rng& rng, std::size_t n, int lo, int hi)
{
    std::vector<double> out(n);
    for (double& v : out) {
        v = static_cast<double>(rng.uniform_int(lo, hi));
    }
    return out;
}

std::size_t override_size(const ParamMap& overrides, const std::string& key, std::size_t fallback)
{
    const auto it = overrides.find(key);
    if (it == overrides.end() || it->second.empty()) {
        return fallback;
    }
    const double v = it->second.front();
    if (!(v >= 1.0) || v != std::floor(v)) {
        throw Error(ErrorKind::InvalidParams, "'" + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

ParamMap draw_params(Family family, CouplingRange cr, Rng& rng, const ParamMap& overrides)
{
    ParamMap p;
    auto coupling = [&](std::size_t n) { return draw_uniform(rng, n, cr.lo, cr.hi); };
    switch (family) {
    case Family::LogisticBidir:
        p["r"] = draw_uniform(rng, 2, 3.7, 3.9);
        p["c_xy"] = coupling(1);
        p["c_yx"] = coupling(1);
        p["sigma_xy"] = {0.05};
        p["sigma_yx"] = {0.05};
        p["obs_noise"] = {0.0};
        break;
    case Family::CommonCause:
        p["alpha"] = draw_uniform(rng, 3, 2.5, 4.0);
        p["beta"] = draw_uniform(rng, 2, 0.2, 0.8);
        p["A"] = draw_uniform(rng, 3, 0.75, 1.25);
        p["omega"] = draw_uniform(rng, 3, 20.0, 100.0);
        p["phi"] = draw_uniform(rng, 3, 0.0, kTwoPi);
        p["sigma"] = draw_uniform(rng, 3, 0.03, 0.3);
        p["gamma"] = draw_int(rng, 3, 1, 4);
        p["nu"] = {1.0, 1.0};
        p["c"] = coupling(2);
        p["obs_noise"] = {0.5};
        break;
    case Family::VarK: {
        const std::size_t max_order = override_size(overrides, "max_order", 5);
        const std::size_t order = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_order)));
        const std::size_t dim = 2;
        for (int attempt = 0;; ++attempt) {
            if (attempt == 1000) {
                throw Error(ErrorKind::RejectionLimit, "no stable VAR draw after 1000 attempts");
            }
            std::vector<double> flat(order * dim * dim, 0.0);
            for (std::size_t i = 0; i < dim; ++i) {
                const auto lag = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(order)));
                flat[(lag - 1) * dim * dim + i * dim + i] = rng.uniform(0.1, 0.9);
            }
            // x1 drives x2 at one lag
            const auto lag = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(order)));
            flat[(lag - 1) * dim * dim + 1 * dim + 0] = rng.uniform(cr.lo, cr.hi);
            SystemSpec probe;
            probe.family = Family::VarK;
            probe.params = {{"p", {double(dim)}}, {"order", {double(order)}}, {"A", flat}};
            if (var_is_stable(var_coefficients(probe))) {
                p = probe.params;
                break;
            }
        }
        p["noise_sd"] = draw_uniform(rng, dim, 0.95, 1.05);
        p["obs_noise"] = {0.0};
        break;
    }
    case Family::NoiseUniform:
    case Family::NoiseBrownian: p["obs_noise"] = {0.0}; break;
    case Family::NoiseNormal:
        p["sigma_x"] = {1.0};
        p["sigma_y"] = {1.0};
        p["obs_noise"] = {0.0};
        break;
    case Family::ArPeriodicNl: {
        const std::size_t k = override_size(overrides, "K", 3);
        p["K"] = {double(k)};
        p["alpha"] = draw_uniform(rng, k, -0.5, 0.5);
        p["beta"] = draw_uniform(rng, k, 0.2, 0.6);
        p["sigma"] = draw_uniform(rng, k, 0.1, 0.3);
        p["s"] = draw_uniform(rng, k, 0.1, 0.5);
        p["omega"] = draw_uniform(rng, k, 5.0, 20.0);
        p["phi"] = draw_uniform(rng, k, 0.0, kTwoPi);
        p["gamma"] = draw_int(rng, k, 1, 5);
        p["c"] = coupling(k - 1);
        p["chi"] = draw_uniform(rng, k - 1, 0.5, 1.0);
        p["rho"] = draw_uniform(rng, k - 1, 0.5, 1.0);
        p["q"] = draw_uniform(rng, k - 1, 0.5, 2.0);
        std::vector<double> tau;
        std::vector<double> nu;
        for (std::size_t e = 0; e + 1 < k; ++e) {
            const auto t = rng.uniform_int(1, 5);
            auto v = rng.uniform_int(1, 4);
            if (v >= t) {
                ++v; // uniform over {1..5} minus t
            }
            tau.push_back(double(t));
            nu.push_back(double(v));
        }
        p["tau"] = tau;
        p["nu"] = nu;
        p["obs_noise"] = {0.2};
        break;
    }
    case Family::ChenLinear:
    case Family::ChenNonlinear:
    case Family::ChenPeriodic: {
        const std::size_t k = override_size(overrides, "K", 3);
        p["K"] = {double(k)};
        p["alpha"] = draw_uniform(rng, k, 3.0, 3.6);
        p["beta"] = draw_uniform(rng, k, 0.2, 0.8);
        p["sigma"] = draw_uniform(rng, k, 0.1, 0.3);
        p["gamma"] = draw_int(rng, k, 1, 5);
        p["tau"] = draw_int(rng, k, 1, 5);
        p["c"] = coupling(k - 1);
        p["nu"] = draw_int(rng, k - 1, 1, 5);
        if (family == Family::ChenPeriodic) {
            p["omega"] = draw_uniform(rng, k, 5.0, 20.0);
            p["phi"] = draw_uniform(rng, k, 0.0, kTwoPi);
        }
        p["obs_noise"] = {0.2};
        break;
    }
    case Family::LogisticChain: {
        const std::size_t k = override_size(overrides, "K", 3);
        p["K"] = {double(k)};
        p["r"] = draw_uniform(rng, k, 3.86, 3.9);
        p["gamma"] = draw_int(rng, k, 1, 5);
        p["tau"] = draw_int(rng, k - 1, 1, 5);
        p["c"] = coupling(k - 1);
        p["sigma"] = std::vector<double>(k - 1, 0.05);
        p["obs_noise"] = {0.3};
        break;
    }
    case Family::HenonChain: {
        const std::size_t k = override_size(overrides, "K", 3);
        p["K"] = {double(k)};
        p["c"] = coupling(k - 1);
        p["a"] = {1.4};
        p["b"] = {0.3};
        p["obs_noise"] = {0.2};
        break;
    }
    case Family::RosslerLorenz: {
        auto jitter = [&](double v) { return v * rng.uniform(0.98, 1.02); };
        p["a"] = {jitter(-6.0), jitter(6.0), jitter(5.7)};
        p["b"] = {jitter(10.0), jitter(28.0), jitter(8.0 / 3.0)};
        p["c_xy"] = coupling(1);
        p["dt"] = {0.01};
        p["sample_every"] = {30};
        p["transient_time"] = {100.0};
        p["obs_noise"] = {0.0};
        break;
    }
    case Family::BidirNlPeriodic:
        p["alpha"] = draw_uniform(rng, 2, 3.0, 3.6);
        p["beta"] = draw_uniform(rng, 2, 0.2, 0.8);
        p["omega"] = draw_uniform(rng, 2, 5.0, 20.0);
        p["phi"] = draw_uniform(rng, 2, 0.0, kTwoPi);
        p["sigma"] = {0.5, 0.5};
        p["gamma"] = draw_int(rng, 2, 1, 2);
        p["c12"] = coupling(1);
        p["c21"] = coupling(1);
        p["obs_noise"] = {0.5};
        break;
    case Family::Nl2d:
        p["a1"] = {3.4};
        p["a2"] = {0.8};
        p["b1"] = {3.4};
        p["b2"] = {0.8};
        p["tau_x1"] = {1};
        p["tau_x2"] = {7};
        p["tau_y1"] = {3};
        p["tau_y2"] = {2};
        p["tau_c"] = {5};
        p["c_xy"] = coupling(1);
        p["obs_noise"] = {0.0};
        break;
    }
    return p;
}

} // namespace

SystemSpec random_system(Family family, CouplingRange coupling, std::size_t n, Seed master, const ParamMap& overrides)
{
    if (!(coupling.lo <= coupling.hi) || coupling.lo < 0.0) {
        throw Error(ErrorKind::InvalidParams, "coupling range must satisfy 0 <= lo <= hi");
    }
    Rng rng(derive_seed(master, {1}));
    SystemSpec s;
    s.family = family;
    s.n = n;
    s.transient = 1000;
    s.seed = derive_seed(master, {2});
    s.params = draw_params(family, coupling, rng, overrides);
    for (const auto& [key, value] : overrides) {
        if (key == "max_order" || (key == "K" && is_chain(family))) {
            continue;
        }
        s.params[key] = value;
    }
    (void)is_chen;
    return s;
}

// ---- JSON -------------------------------------------------------------------

nlohmann::json spec_to_json(const SystemSpec& s)
{
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : s.params) {
        params[k] = v;
    }
    return {{"family", family_name(s.family)},
            {"n", s.n},
            {"transient", s.transient},
            {"seed", s.seed.value},
            {"params", params}};
}

SystemSpec spec_from_json(const nlohmann::json& j)
{
    auto field = [&](const char* name) -> const nlohmann::json& {
        if (!j.is_object() || !j.contains(name)) {
            throw Error(ErrorKind::ParseError, std::string("system spec: missing field '") + name + "'");
        }
        return j.at(name);
    };
    SystemSpec s;
    try {
        s.family = parse_family(field("family").get<std::string>());
        s.n = field("n").get<std::size_t>();
        s.transient = j.value("transient", std::size_t{1000});
        s.seed = Seed{j.value("seed", std::uint64_t{0})};
        for (const auto& [k, v] : field("params").items()) {
            if (v.is_number()) {
                s.params[k] = {v.get<double>()};
            } else {
                s.params[k] = v.get<std::vector<double>>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("system spec: ") + e.what());
    }
    return s;
}

nlohmann::json truth_to_json(const std::vector<Edge>& edges, const MultiSeries& series)
{
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : edges) {
        list.push_back({{"from", series[e.from].label()}, {"to", series[e.to].label()}});
    }
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t i = 0; i < series.width(); ++i) {
        labels.push_back(series[i].label());
    }
    return {{"variables", labels}, {"edges", list}};
}

} // namespace predasym
