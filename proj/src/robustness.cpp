#include "predasym/robustness.hpp"

#include "predasym/error.hpp"
#include "predasym/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace predasym {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) noexcept
{
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

ConfusionMatrix confusion(std::span<const bool> preds, std::span<const bool> truths)
{
    if (preds.size() != truths.size()) {
        throw Error(ErrorKind::LengthMismatch, "predictions and truths differ in length");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i]) {
            ++(truths[i] ? cm.tp : cm.fp);
        } else {
            ++(truths[i] ? cm.fn : cm.tn);
        }
    }
    return cm;
}

double mcc(const ConfusionMatrix& cm)
{
    if (cm.total() == 0) {
        throw Error(ErrorKind::EmptyMatrix, "confusion matrix has no entries");
    }
    const auto tp = static_cast<double>(cm.tp);
    const auto tn = static_cast<double>(cm.tn);
    const auto fp = static_cast<double>(cm.fp);
    const auto fn = static_cast<double>(cm.fn);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom == 0.0) {
        return 0.0;
    }
    return std::clamp((tp * tn - fp * fn) / std::sqrt(denom), -1.0, 1.0);
}

Rates rates(const ConfusionMatrix& cm)
{
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) {
            return std::nullopt;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    Rates r;
    r.accuracy = ratio(cm.tp + cm.tn, cm.total());
    r.tpr = ratio(cm.tp, cm.tp + cm.fn);
    r.fnr = ratio(cm.fn, cm.tp + cm.fn);
    r.tnr = ratio(cm.tn, cm.tn + cm.fp);
    r.fpr = ratio(cm.fp, cm.tn + cm.fp);
    r.ppv = ratio(cm.tp, cm.tp + cm.fp);
    r.npv = ratio(cm.tn, cm.tn + cm.fn);
    r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    return r;
}

PairVerdict classify_pair(const TimeSeries& x, const TimeSeries& y, const ClassifyOptions& opts)
{
    const auto te_xy = te_spectrum(x, y, {}, opts.embedding, opts.eta_max, opts.estimator, opts.jobs);
    const auto te_yx = te_spectrum(y, x, {}, opts.embedding, opts.eta_max, opts.estimator, opts.jobs);
    PairVerdict v;
    v.a_xy = normalized_asymmetry(te_xy, opts.eta_max, opts.f);
    v.a_yx = normalized_asymmetry(te_yx, opts.eta_max, opts.f);
    v.xy = detect(v.a_xy) == Detection::Positive;
    v.yx = detect(v.a_yx) == Detection::Positive;
    return v;
}

namespace {

struct Outcome {
    bool ok = false;
    ConfusionMatrix cm;
    std::vector<double> a_values;
    std::size_t failures = 0;
    std::uint64_t seed = 0;
};

Outcome run_realization(const SweepConfig& cfg, std::size_t ci, std::size_t li, std::size_t r)
{
    Outcome out;
    for (int attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
        const Seed seed = derive_seed(cfg.master, {ci, li, r, static_cast<std::uint64_t>(attempt)});
        try {
            const SystemSpec spec = random_system(cfg.family, cfg.couplings[ci], cfg.lengths[li], seed, cfg.overrides);
            const Generated gen = generate(spec);
            const MultiSeries obs = observe(gen.series, spec);
            ClassifyOptions opts;
            opts.embedding = cfg.embedding;
            opts.eta_max = cfg.eta_max.value_or(10 + max_delay(spec) - 1);
            opts.f = cfg.f;
            opts.estimator = cfg.estimator;

            const std::size_t pairs = obs.width() * (obs.width() - 1);
            auto preds = std::make_unique<bool[]>(pairs);
            auto truths = std::make_unique<bool[]>(pairs);
            std::size_t slot = 0;
            std::vector<double> a_values;
            auto is_edge = [&](std::size_t from, std::size_t to) {
                return std::find(gen.truth.begin(), gen.truth.end(), Edge{from, to}) != gen.truth.end();
            };
            for (std::size_t i = 0; i < obs.width(); ++i) {
                for (std::size_t j = i + 1; j < obs.width(); ++j) {
                    const PairVerdict v = classify_pair(obs[i], obs[j], opts);
                    preds[slot] = v.xy;
                    truths[slot++] = is_edge(i, j);
                    preds[slot] = v.yx;
                    truths[slot++] = is_edge(j, i);
                    for (const auto& a : {v.a_xy, v.a_yx}) {
                        if (a) {
                            a_values.push_back(*a);
                        }
                    }
                }
            }
            out.cm = confusion({preds.get(), pairs}, {truths.get(), pairs});
            out.a_values = std::move(a_values);
            out.seed = seed.value;
            out.ok = true;
            return out;
        } catch (const Error& e) {
            if (is_validation_error(e.kind())) {
                throw;
            }
            ++out.failures;
        }
    }
    return out;
}

std::optional<double> median_of(std::vector<double> xs)
{
    if (xs.empty()) {
        return std::nullopt;
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

} // namespace

SweepResult sweep(const SweepConfig& cfg)
{
    if (cfg.couplings.empty() || cfg.lengths.empty()) {
        throw Error(ErrorKind::InvalidParams, "sweep grids must be nonempty");
    }
    if (cfg.ensemble_size < 1) {
        throw Error(ErrorKind::InvalidParams, "ensemble_size must be >= 1");
    }
    if (cfg.max_redraws < 0) {
        throw Error(ErrorKind::InvalidParams, "max_redraws must be >= 0");
    }
    const std::size_t nc = cfg.couplings.size();
    const std::size_t nl = cfg.lengths.size();
    const std::size_t ne = cfg.ensemble_size;
    std::vector<Outcome> outcomes(nc * nl * ne);
    parallel_for(outcomes.size(), cfg.jobs, [&](std::size_t idx) {
        const std::size_t r = idx % ne;
        const std::size_t li = (idx / ne) % nl;
        const std::size_t ci = idx / (ne * nl);
        outcomes[idx] = run_realization(cfg, ci, li, r);
    });

    SweepResult result;
    result.family = cfg.family;
    result.ensemble_size = ne;
    result.master = cfg.master;
    for (std::size_t ci = 0; ci < nc; ++ci) {
        for (std::size_t li = 0; li < nl; ++li) {
            SweepCell cell;
            cell.coupling = cfg.couplings[ci];
            cell.length = cfg.lengths[li];
            std::vector<double> a_values;
            for (std::size_t r = 0; r < ne; ++r) {
                const Outcome& o = outcomes[(ci * nl + li) * ne + r];
                cell.failures += o.failures;
                if (!o.ok) {
                    ++cell.dropped;
                    continue;
                }
                ++cell.realizations;
                cell.cm += o.cm;
                cell.seeds.push_back(o.seed);
                a_values.insert(a_values.end(), o.a_values.begin(), o.a_values.end());
            }
            if (cell.cm.total() > 0) {
                cell.mcc = mcc(cell.cm);
            }
            cell.rates = rates(cell.cm);
            cell.median_A = median_of(std::move(a_values));
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

namespace {

std::string opt_str(const std::optional<double>& v)
{
    return v ? format_double(*v) : "NA";
}

nlohmann::json opt_json(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

std::string sweep_to_csv(const SweepResult& result)
{
    std::ostringstream out;
    out << "family,coupling_lo,coupling_hi,length,tp,tn,fp,fn,mcc,accuracy,tpr,tnr,fpr,fnr,ppv,npv,f1,median_A,"
           "realizations,failures,dropped\n";
    for (const auto& c : result.cells) {
        const Rates& r = c.rates;
        out << family_name(result.family) << ',' << format_double(c.coupling.lo) << ','
            << format_double(c.coupling.hi) << ',' << c.length << ',' << c.cm.tp << ',' << c.cm.tn << ','
            << c.cm.fp << ',' << c.cm.fn << ',' << opt_str(c.mcc) << ',' << opt_str(r.accuracy) << ','
            << opt_str(r.tpr) << ',' << opt_str(r.tnr) << ',' << opt_str(r.fpr) << ',' << opt_str(r.fnr) << ','
            << opt_str(r.ppv) << ',' << opt_str(r.npv) << ',' << opt_str(r.f1) << ',' << opt_str(c.median_A) << ','
            << c.realizations << ',' << c.failures << ',' << c.dropped << '\n';
    }
    return out.str();
}

nlohmann::json sweep_to_json(const SweepResult& result)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : result.cells) {
        const Rates& r = c.rates;
        cells.push_back({{"coupling_lo", c.coupling.lo},
                         {"coupling_hi", c.coupling.hi},
                         {"length", c.length},
                         {"tp", c.cm.tp},
                         {"tn", c.cm.tn},
                         {"fp", c.cm.fp},
                         {"fn", c.cm.fn},
                         {"mcc", opt_json(c.mcc)},
                         {"rates",
                          {{"accuracy", opt_json(r.accuracy)},
                           {"tpr", opt_json(r.tpr)},
                           {"tnr", opt_json(r.tnr)},
                           {"fpr", opt_json(r.fpr)},
                           {"fnr", opt_json(r.fnr)},
                           {"ppv", opt_json(r.ppv)},
                           {"npv", opt_json(r.npv)},
                           {"f1", opt_json(r.f1)}}},
                         {"median_A", opt_json(c.median_A)},
                         {"realizations", c.realizations},
                         {"failures", c.failures},
                         {"dropped", c.dropped},
                         {"seeds", c.seeds}});
    }
    return {{"family", family_name(result.family)},
            {"ensemble_size", result.ensemble_size},
            {"master_seed", result.master.value},
            {"cells", cells}};
}

} // namespace predasym
