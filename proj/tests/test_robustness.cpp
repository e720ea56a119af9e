#include "predasym/error.hpp"
#include "predasym/robustness.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

using namespace predasym;

namespace {

ConfusionMatrix cm_of(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn)
{
    ConfusionMatrix cm;
    cm.tp = tp;
    cm.tn = tn;
    cm.fp = fp;
    cm.fn = fn;
    return cm;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& v, std::uint64_t seed)
{
    Rng rng(Seed{seed});
    std::vector<double> meds;
    for (int b = 0; b < 2000; ++b) {
        std::vector<double> s(v.size());
        for (double& x : s) {
            x = v[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(v.size()) - 1))];
        }
        meds.push_back(median(s));
    }
    std::sort(meds.begin(), meds.end());
    return {meds[50], meds[1949]};
}

SweepConfig tiny_sweep()
{
    SweepConfig cfg;
    cfg.family = Family::LogisticBidir;
    cfg.couplings = {{0.0, 0.0}, {0.3, 0.5}};
    cfg.lengths = {200, 400};
    cfg.ensemble_size = 4;
    cfg.master = Seed{2024};
    return cfg;
}

std::pair<std::vector<double>, std::vector<double>> ar1_pair(std::size_t n, std::uint64_t seed)
{
    Eigen::Matrix2d A;
    A << 0.8, 0.0, 0.8, 0.0;
    return oracle_ref::simulate_var1(A, Eigen::Matrix2d::Identity(), n, seed);
}

} // namespace

TEST_CASE("confusion examples")
{
    const std::array<bool, 4> all{true, true, true, true};
    const auto same = confusion(all, all);
    CHECK(same.fp == 0);
    CHECK(same.fn == 0);
    CHECK(same.tp == 4);
    const std::array<bool, 4> truth{true, false, true, false};
    const std::array<bool, 4> inv{false, true, false, true};
    const auto opposite = confusion(inv, truth);
    CHECK(opposite.tp == 0);
    CHECK(opposite.tn == 0);
    const std::array<bool, 4> p{true, true, false, false};
    const std::array<bool, 4> t{true, false, true, false};
    const auto mixed = confusion(p, t);
    CHECK(mixed == cm_of(1, 1, 1, 1));
    const std::array<bool, 3> shorter{true, true, true};
    CHECK_THROWS_AS(confusion(shorter, t), Error);
}

TEST_CASE("mcc examples")
{
    CHECK(mcc(cm_of(50, 50, 0, 0)) == doctest::Approx(1.0));
    CHECK(mcc(cm_of(25, 25, 25, 25)) == doctest::Approx(0.0));
    CHECK(mcc(cm_of(0, 0, 25, 25)) == doctest::Approx(-1.0));
    CHECK(mcc(cm_of(0, 10, 0, 0)) == 0.0);
    CHECK_THROWS_AS(mcc(cm_of(0, 0, 0, 0)), Error);
}

TEST_CASE("rate examples")
{
    const auto perfect = rates(cm_of(10, 10, 0, 0));
    CHECK(*perfect.tpr == 1.0);
    CHECK(*perfect.tnr == 1.0);
    CHECK(*perfect.fpr == 0.0);
    CHECK(*perfect.fnr == 0.0);
    CHECK(*perfect.f1 == 1.0);
    CHECK(*perfect.accuracy == 1.0);
    const auto missed = rates(cm_of(0, 5, 0, 3));
    CHECK(*missed.tpr == 0.0);
    CHECK(*missed.fnr == 1.0);
    CHECK_FALSE(missed.ppv.has_value());
    const auto r = rates(cm_of(8, 88, 2, 2));
    CHECK(*r.ppv == doctest::Approx(0.8));
    CHECK(*r.tpr == doctest::Approx(0.8));
    CHECK(*r.f1 == doctest::Approx(0.8));
    const auto no_pos = rates(cm_of(0, 9, 1, 0));
    CHECK_FALSE(no_pos.tpr.has_value());
    CHECK(*no_pos.tnr == doctest::Approx(0.9));
}

TEST_CASE("property: mcc and rates are bounded and complementary")
{
    Rng rng(Seed{1});
    for (int trial = 0; trial < 2000; ++trial) {
        const auto cm = cm_of(static_cast<std::size_t>(rng.uniform_int(0, 40)),
                              static_cast<std::size_t>(rng.uniform_int(0, 40)),
                              static_cast<std::size_t>(rng.uniform_int(0, 40)),
                              static_cast<std::size_t>(rng.uniform_int(0, 40)));
        if (cm.total() == 0) {
            continue;
        }
        const double m = mcc(cm);
        CHECK(m >= -1.0);
        CHECK(m <= 1.0);
        const auto r = rates(cm);
        for (const auto& v : {r.accuracy, r.tpr, r.tnr, r.fpr, r.fnr, r.ppv, r.npv, r.f1}) {
            if (v) {
                CHECK(*v >= 0.0);
                CHECK(*v <= 1.0);
            }
        }
        if (r.tpr && r.fnr) {
            CHECK(*r.tpr + *r.fnr == doctest::Approx(1.0));
        }
        if (r.tnr && r.fpr) {
            CHECK(*r.tnr + *r.fpr == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("property: confusion counts ignore ensemble order")
{
    Rng rng(Seed{2});
    std::vector<ConfusionMatrix> parts;
    for (int i = 0; i < 30; ++i) {
        parts.push_back(cm_of(static_cast<std::size_t>(rng.uniform_int(0, 3)), static_cast<std::size_t>(rng.uniform_int(0, 3)),
                              static_cast<std::size_t>(rng.uniform_int(0, 3)), static_cast<std::size_t>(rng.uniform_int(0, 3))));
    }
    ConfusionMatrix fwd;
    for (const auto& p : parts) {
        fwd += p;
    }
    ConfusionMatrix rev;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        rev += *it;
    }
    CHECK(fwd == rev);
    CHECK(mcc(fwd) == mcc(rev));
}

TEST_CASE("classify_pair on uncoupled noise rejects coupling")
{
    Rng rng(Seed{3});
    int clean = 0;
    const int pairs = 30;
    for (int p = 0; p < pairs; ++p) {
        std::vector<double> x(2000);
        std::vector<double> y(2000);
        for (std::size_t i = 0; i < 2000; ++i) {
            x[i] = rng.uniform();
            y[i] = rng.uniform();
        }
        const auto v = classify_pair(TimeSeries(x), TimeSeries(y), {});
        clean += (!v.xy && !v.yx) ? 1 : 0;
    }
    MESSAGE(clean << " of " << pairs << " noise pairs rejected both directions");
    CHECK(clean >= 27);
}

TEST_CASE("classify_pair finds the AR1 direction")
{
    int hits = 0;
    const int runs = 15;
    for (int r = 0; r < runs; ++r) {
        const auto [x, y] = ar1_pair(2000, 500 + static_cast<std::uint64_t>(r));
        const auto v = classify_pair(TimeSeries(x), TimeSeries(y), {});
        hits += (v.xy && !v.yx) ? 1 : 0;
    }
    MESSAGE(hits << " of " << runs << " AR1 pairs classified (true, false)");
    CHECK(2 * hits > runs);
}

TEST_CASE("classify_pair detects bidirectional logistic coupling")
{
    int hits = 0;
    const int runs = 15;
    for (int r = 0; r < runs; ++r) {
        const auto spec = random_system(Family::LogisticBidir, {0.4, 0.4}, 300, Seed{static_cast<std::uint64_t>(r)});
        const auto g = generate(spec);
        const auto v = classify_pair(g.series[0], g.series[1], {});
        hits += (v.xy && v.yx) ? 1 : 0;
    }
    MESSAGE(hits << " of " << runs << " bidirectional logistic pairs classified (true, true)");
    CHECK(2 * hits > runs);
}

TEST_CASE("sweep is deterministic and independent of worker count")
{
    auto cfg = tiny_sweep();
    const auto a = sweep(cfg);
    const auto b = sweep(cfg);
    cfg.jobs = 3;
    const auto c = sweep(cfg);
    CHECK(sweep_to_csv(a) == sweep_to_csv(b));
    CHECK(sweep_to_csv(a) == sweep_to_csv(c));
    CHECK(sweep_to_json(a) == sweep_to_json(c));
    REQUIRE(a.cells.size() == 4);
    CHECK(a.cells[1].length == 400);
    CHECK(a.cells[2].coupling.lo == 0.3);
    const std::string csv = sweep_to_csv(a);
    CHECK(csv.rfind("family,coupling_lo,coupling_hi,length,tp,tn,fp,fn,mcc", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("coupling-zero cells have no positives")
{
    const auto res = sweep(tiny_sweep());
    for (std::size_t li = 0; li < 2; ++li) {
        const auto& cell = res.cells[li];
        CHECK(cell.cm.tp == 0);
        CHECK(cell.cm.fn == 0);
        CHECK((!cell.mcc || *cell.mcc == 0.0));
        REQUIRE(cell.rates.tnr.has_value());
        CHECK(*cell.rates.tnr >= 0.75);
    }
}

TEST_CASE("doubling the ensemble leaves the cell median within sampling noise")
{
    auto per_realization = [](std::size_t ensemble, std::uint64_t master) {
        SweepConfig cfg;
        cfg.family = Family::LogisticBidir;
        cfg.couplings = {{0.3, 0.3}};
        cfg.lengths = {300};
        cfg.ensemble_size = ensemble;
        cfg.master = Seed{master};
        const auto res = sweep(cfg);
        // rebuild each realization's statistics from its recorded seed
        std::vector<double> values;
        for (std::uint64_t s : res.cells[0].seeds) {
            const auto spec = random_system(cfg.family, cfg.couplings[0], 300, Seed{s});
            const auto obs = observe(generate(spec).series, spec);
            ClassifyOptions o;
            o.eta_max = 10 + max_delay(spec) - 1;
            const auto v = classify_pair(obs[0], obs[1], o);
            values.push_back(*v.a_xy);
            values.push_back(*v.a_yx);
        }
        std::vector<double> copy = values;
        REQUIRE(res.cells[0].median_A.has_value());
        CHECK(median(copy) == doctest::Approx(*res.cells[0].median_A));
        return values;
    };
    const auto small = per_realization(10, 1);
    const auto big = per_realization(20, 2);
    const auto [lo1, hi1] = bootstrap_ci(small, 7);
    const auto [lo2, hi2] = bootstrap_ci(big, 8);
    MESSAGE("CI(10) = [" << lo1 << ", " << hi1 << "], CI(20) = [" << lo2 << ", " << hi2 << "]");
    CHECK(lo1 <= hi2);
    CHECK(lo2 <= hi1);
}

TEST_CASE("sweep validation errors propagate")
{
    SweepConfig cfg = tiny_sweep();
    cfg.lengths = {};
    CHECK_THROWS_AS(sweep(cfg), Error);
    cfg = tiny_sweep();
    cfg.eta_max = 500;
    CHECK_THROWS_AS(sweep(cfg), Error);
}
