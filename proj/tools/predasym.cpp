// predasym: command-line front end.
//
//   predasym generate   --family F [--param k=v,...] [--random --coupling lo,hi] --output out.csv
//   predasym asymmetry  --input series.csv --source x --target y --output prefix
//   predasym sweep      --config sweep.json --output prefix
//   predasym ensemble   --input series.csv | --uncertain-x a.csv --uncertain-y b.csv --output ribbon.csv
//
// Every written file gets a <file>.meta.json sidecar holding the effective
// configuration; passing that "config" object back via --config reproduces it.

#include "predasym/asymmetry.hpp"
#include "predasym/data.hpp"
#include "predasym/error.hpp"
#include "predasym/estimators.hpp"
#include "predasym/resampling.hpp"
#include "predasym/robustness.hpp"
#include "predasym/systems.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace predasym;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct CommonOptions {
    std::string estimator = "vf";
    std::optional<int> bins;
    int k1 = 2;
    int k2 = 3;
    bool source_marginal = false;
    int k = 1;
    int l = 1;
    int m = 1;
    int tau = 1;
    int eta_max = 10;
    double f = 1.0;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string config;
};

std::uint64_t parse_u64(const std::string& text, const std::string& what)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorKind::Validation, what + " is not an unsigned integer: '" + text + "'");
    }
    return v;
}

std::uint64_t resolve_seed(const CommonOptions& o)
{
    if (o.seed) {
        return *o.seed;
    }
    if (const char* env = std::getenv("PREDASYM_SEED")) {
        return parse_u64(env, "PREDASYM_SEED");
    }
    return 0;
}

void add_seed_jobs_config(CLI::App* sub, CommonOptions& o)
{
    sub->add_option("--seed", o.seed, "Master seed (falls back to PREDASYM_SEED, then 0)");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--config", o.config, "JSON object of option values; flags given on the command line win");
}

void add_estimation(CLI::App* sub, CommonOptions& o)
{
    sub->add_option("--estimator", o.estimator, "vf (visitation frequency) or nn (nearest neighbour)")
        ->check(CLI::IsMember({"vf", "nn"}));
    sub->add_option("--bins", o.bins, "Fixed bins per axis for vf; default averages the heuristic pair")
        ->check(CLI::PositiveNumber);
    sub->add_option("--k1", o.k1, "Neighbours for the joint MI term (nn)")->check(CLI::PositiveNumber);
    sub->add_option("--k2", o.k2, "Neighbours for the marginal MI term (nn)")->check(CLI::PositiveNumber);
    sub->add_flag("--source-marginal", o.source_marginal, "nn: subtract I(T_f; S_pp) instead of I(T_f; T_pp)");
    sub->add_option("--k", o.k, "Future target values")->check(CLI::PositiveNumber);
    sub->add_option("--l", o.l, "Target history values")->check(CLI::PositiveNumber);
    sub->add_option("--m", o.m, "Source history values")->check(CLI::PositiveNumber);
    sub->add_option("--tau", o.tau, "Embedding delay")->check(CLI::PositiveNumber);
    sub->add_option("--eta-max", o.eta_max, "Largest prediction lag")->check(CLI::PositiveNumber);
    sub->add_option("--f", o.f, "Normalization factor")->check(CLI::PositiveNumber);
}

EstimatorOptions estimator_options(const CommonOptions& o)
{
    EstimatorOptions e;
    e.kind = parse_estimator(o.estimator);
    e.bins = o.bins;
    e.k1 = o.k1;
    e.k2 = o.k2;
    e.decomposition = o.source_marginal ? NnDecomposition::SourceMarginal : NnDecomposition::Standard;
    return e;
}

EmbeddingSpec embedding_spec(const CommonOptions& o)
{
    EmbeddingSpec s;
    s.k = o.k;
    s.l = o.l;
    s.m = o.m;
    s.tau = o.tau;
    return s;
}

// ---- --config handling ----------------------------------------------------

std::string option_key(std::string key)
{
    for (char& c : key) {
        if (c == '_') {
            c = '-';
        }
    }
    return key;
}

json load_config(const std::string& path)
{
    try {
        json j = json::parse(read_file(path));
        if (!j.is_object()) {
            throw Error(ErrorKind::Validation, "config '" + path + "' must hold a JSON object");
        }
        // a sidecar written by this tool
        if (j.contains("config") && j.value("tool", "") == "predasym") {
            return j.at("config");
        }
        return j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, "config '" + path + "': " + e.what());
    }
}

std::vector<std::string> json_to_results(const json& v, const std::string& key)
{
    auto scalar = [&](const json& x) -> std::string {
        if (x.is_string()) {
            return x.get<std::string>();
        }
        if (x.is_boolean()) {
            return x.get<bool>() ? "true" : "false";
        }
        if (x.is_number()) {
            return x.dump();
        }
        throw Error(ErrorKind::Validation, "config field '" + key + "' has an unsupported type");
    };
    std::vector<std::string> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            out.push_back(scalar(x));
        }
    } else if (!v.is_null()) {
        out.push_back(scalar(v));
    }
    return out;
}

/// Applies config values to options the user did not pass. Keys listed in
/// `extra` are left for the caller; anything else unknown is an error.
void apply_config(CLI::App* sub, const json& cfg, const std::set<std::string>& extra = {})
{
    for (const auto& [raw_key, value] : cfg.items()) {
        const std::string key = option_key(raw_key);
        if (extra.count(key) || key == "config") {
            continue;
        }
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw Error(ErrorKind::Validation, "config field '" + raw_key + "' is not a known option");
        }
        if (opt->count() > 0) {
            continue;
        }
        const auto results = json_to_results(value, raw_key);
        if (results.empty()) {
            continue;
        }
        try {
            for (const auto& r : results) {
                opt->add_result(r);
            }
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw Error(ErrorKind::Validation, "config field '" + raw_key + "': " + e.what());
        }
    }
}

/// Effective option values of a subcommand, keyed like --config expects.
json effective_options(const CLI::App* sub, std::uint64_t seed)
{
    json out = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config" || name.empty()) {
            continue;
        }
        std::vector<std::string> values = opt->results();
        if (values.empty()) {
            const std::string def = opt->get_default_str();
            if (def.empty() || def == "[]" || def == "{}") {
                continue;
            }
            values.push_back(def);
        }
        if (opt->get_expected_max() > 1) {
            out[name] = values;
        } else {
            out[name] = values.back();
        }
    }
    out["seed"] = std::to_string(seed);
    return out;
}

void require_set(const std::string& value, const char* flag)
{
    if (value.empty()) {
        throw Error(ErrorKind::Validation, std::string(flag) + " is required");
    }
}

void write_with_meta(const fs::path& path, const std::string& contents, const std::string& subcommand,
                     const json& config)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    write_file(path, contents);
    const json meta = {{"tool", "predasym"},
                       {"version", kToolVersion},
                       {"subcommand", subcommand},
                       {"file", path.filename().string()},
                       {"config", config}};
    write_file(fs::path(path.string() + ".meta.json"), meta.dump(2) + "\n");
}

fs::path with_suffix(const fs::path& base, const std::string& suffix)
{
    fs::path p = base;
    p.replace_extension();
    return fs::path(p.string() + suffix);
}

SeriesFormat format_of(const fs::path& p)
{
    return p.extension() == ".json" ? SeriesFormat::Json : SeriesFormat::Csv;
}

std::pair<TimeSeries, TimeSeries> load_pair(const std::string& input, std::string& source, std::string& target)
{
    const MultiSeries all = load_series(input, format_of(input));
    if (all.width() < 2 && (source.empty() || target.empty())) {
        throw Error(ErrorKind::Validation, "input needs at least two columns");
    }
    if (source.empty()) {
        source = all[0].label();
    }
    if (target.empty()) {
        target = all[1].label();
    }
    if (source == target) {
        throw Error(ErrorKind::Validation, "source and target columns must differ");
    }
    return {all.column(source), all.column(target)};
}

// ---- generate -----------------------------------------------------------------

struct GenerateOptions {
    CommonOptions common;
    std::string family;
    std::vector<std::string> params;
    std::vector<double> coupling;
    bool random = false;
    bool clean = false;
    std::size_t n = 1000;
    std::size_t transient = 1000;
    std::string spec_file;
    std::string output;
};

ParamMap parse_params(const std::vector<std::string>& items)
{
    ParamMap out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(ErrorKind::Validation, "--param expects name=value[,value...], got '" + item + "'");
        }
        std::vector<double> values;
        std::string rest = item.substr(eq + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const auto comma = rest.find(',', pos);
            const std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
                throw Error(ErrorKind::Validation, "parameter '" + item.substr(0, eq) + "' has a bad value '" + tok + "'");
            }
            values.push_back(v);
            if (comma == std::string::npos) {
                break;
            }
            pos = comma + 1;
        }
        out[item.substr(0, eq)] = std::move(values);
    }
    return out;
}

int run_generate(const GenerateOptions& o, const CLI::App* sub)
{
    require_set(o.output, "--output");
    const std::uint64_t seed = resolve_seed(o.common);
    SystemSpec spec;
    if (!o.spec_file.empty()) {
        spec = spec_from_json(json::parse(read_file(o.spec_file)));
    } else {
        if (o.family.empty()) {
            throw Error(ErrorKind::Validation, "--family or --spec is required");
        }
        const Family family = parse_family(o.family);
        const ParamMap params = parse_params(o.params);
        if (o.random) {
            // uncoupled unless a range is given
            const CouplingRange range = o.coupling.size() == 2 ? CouplingRange{o.coupling[0], o.coupling[1]}
                                                               : CouplingRange{};
            spec = random_system(family, range, o.n, Seed{seed}, params);
            spec.transient = o.transient;
        } else {
            spec.family = family;
            spec.params = params;
            spec.n = o.n;
            spec.transient = o.transient;
            spec.seed = Seed{seed};
        }
    }
    spec.validate();
    const Generated gen = generate(spec);
    const MultiSeries out = o.clean ? gen.series : observe(gen.series, spec);

    const json config = effective_options(sub, seed);
    const fs::path csv = o.output;
    write_with_meta(csv, series_to_csv(out), "generate", config);
    write_with_meta(with_suffix(csv, ".truth.json"), truth_to_json(gen.truth, out).dump(2) + "\n", "generate",
                    config);
    write_with_meta(with_suffix(csv, ".spec.json"), spec_to_json(spec).dump(2) + "\n", "generate", config);
    std::cout << family_name(spec.family) << ": " << out.width() << " columns x " << out.length() << " samples -> "
              << csv.string() << "\n";
    return 0;
}

// ---- asymmetry ----------------------------------------------------------------

struct AsymmetryOptions {
    CommonOptions common;
    std::string input;
    std::string source;
    std::string target;
    std::string output;
};

int run_asymmetry(AsymmetryOptions o, const CLI::App* sub)
{
    require_set(o.input, "--input");
    require_set(o.output, "--output");
    const std::uint64_t seed = resolve_seed(o.common);
    auto [x, y] = load_pair(o.input, o.source, o.target);
    const EmbeddingSpec emb = embedding_spec(o.common);
    const EstimatorOptions est = estimator_options(o.common);
    const TESpectrum te_xy = te_spectrum(x, y, {}, emb, o.common.eta_max, est, o.common.jobs);
    const TESpectrum te_yx = te_spectrum(y, x, {}, emb, o.common.eta_max, est, o.common.jobs);
    const AsymmetryCurve c_xy = asymmetry_curve(te_xy, o.common.f);
    const AsymmetryCurve c_yx = asymmetry_curve(te_yx, o.common.f);

    const std::string xy = o.source + "->" + o.target;
    const std::string yx = o.target + "->" + o.source;
    std::string te_csv = "direction,nu,te\n";
    for (const auto& [dir, spec] : {std::pair{xy, &te_xy}, std::pair{yx, &te_yx}}) {
        for (std::size_t i = 0; i < spec->lags.size(); ++i) {
            te_csv += dir + "," + std::to_string(spec->lags[i]) + "," + format_double(spec->values[i]) + "\n";
        }
    }
    std::string asym_csv = "direction,eta,A,A_norm\n";
    for (const auto& [dir, curve] : {std::pair{xy, &c_xy}, std::pair{yx, &c_yx}}) {
        for (std::size_t i = 0; i < curve->etas.size(); ++i) {
            asym_csv += dir + "," + std::to_string(curve->etas[i]) + "," + format_double(curve->A[i]) + "," +
                        (curve->A_norm[i] ? format_double(*curve->A_norm[i]) : "NA") + "\n";
        }
    }
    json config = effective_options(sub, seed);
    config["source"] = o.source;
    config["target"] = o.target;
    const fs::path prefix = o.output;
    write_with_meta(fs::path(prefix.string() + ".te.csv"), te_csv, "asymmetry", config);
    write_with_meta(fs::path(prefix.string() + ".asym.csv"), asym_csv, "asymmetry", config);

    auto report = [&](const std::string& dir, const AsymmetryCurve& c) {
        const auto a = c.A_norm.back();
        std::cout << dir << ": " << (detect(a) == Detection::Positive ? "positive" : "negative")
                  << " (A_norm(" << c.etas.back() << ") = " << (a ? format_double(*a) : "undefined") << ")\n";
    };
    report(xy, c_xy);
    report(yx, c_yx);
    return 0;
}

// ---- sweep --------------------------------------------------------------------

struct SweepOptions {
    CommonOptions common;
    std::string family;
    std::size_t ensemble_size = 10;
    int max_redraws = 10;
    bool eta_auto = true;
    std::string output;
};

const std::set<std::string> kSweepSchemaKeys{"couplings", "lengths", "overrides"};

int run_sweep(SweepOptions& o, CLI::App* sub)
{
    if (o.common.config.empty()) {
        throw Error(ErrorKind::Validation, "sweep needs --config");
    }
    const json raw = load_config(o.common.config);
    json cfg = json::object();
    for (const auto& [k, v] : raw.items()) {
        cfg[option_key(k)] = v;
    }
    // schema fields, checked before anything runs
    auto require = [&](const char* field) -> const json& {
        if (!cfg.contains(field)) {
            throw Error(ErrorKind::Validation, std::string("sweep config: missing field '") + field + "'");
        }
        return cfg.at(field);
    };
    for (const char* field : {"family", "ensemble-size"}) {
        require(field);
    }
    SweepConfig sc;
    const json& couplings = require("couplings");
    if (!couplings.is_array() || couplings.empty()) {
        throw Error(ErrorKind::Validation, "sweep config: field 'couplings' must be a nonempty array of [lo, hi]");
    }
    for (const auto& c : couplings) {
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
            throw Error(ErrorKind::Validation, "sweep config: field 'couplings' entries must be [lo, hi] numbers");
        }
        sc.couplings.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    const json& lengths = require("lengths");
    if (!lengths.is_array() || lengths.empty()) {
        throw Error(ErrorKind::Validation, "sweep config: field 'lengths' must be a nonempty array of integers");
    }
    for (const auto& n : lengths) {
        if (!n.is_number_unsigned() || n.get<std::size_t>() < 2) {
            throw Error(ErrorKind::Validation, "sweep config: field 'lengths' entries must be integers >= 2");
        }
        sc.lengths.push_back(n.get<std::size_t>());
    }
    if (cfg.contains("overrides")) {
        const json& ov = cfg.at("overrides");
        if (!ov.is_object()) {
            throw Error(ErrorKind::Validation, "sweep config: field 'overrides' must be an object");
        }
        for (const auto& [k, v] : ov.items()) {
            if (v.is_number()) {
                sc.overrides[k] = {v.get<double>()};
            } else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
                sc.overrides[k] = v.get<std::vector<double>>();
            } else {
                throw Error(ErrorKind::Validation, "sweep config: field 'overrides." + k + "' must be numeric");
            }
        }
    }
    apply_config(sub, cfg, kSweepSchemaKeys);
    require_set(o.output, "--output");
    const std::uint64_t seed = resolve_seed(o.common);

    sc.family = parse_family(o.family);
    sc.ensemble_size = o.ensemble_size;
    if (sub->get_option("--eta-max")->count() > 0) {
        sc.eta_max = o.common.eta_max;
    }
    sc.f = o.common.f;
    sc.embedding = embedding_spec(o.common);
    sc.estimator = estimator_options(o.common);
    sc.master = Seed{seed};
    sc.jobs = o.common.jobs;
    sc.max_redraws = o.max_redraws;
    const SweepResult result = sweep(sc);

    json config = effective_options(sub, seed);
    if (!sc.eta_max) {
        config.erase("eta-max");
    }
    config.erase("jobs");
    for (const auto& key : kSweepSchemaKeys) {
        if (cfg.contains(key)) {
            config[key] = cfg.at(key);
        }
    }
    const fs::path prefix = o.output;
    write_with_meta(fs::path(prefix.string() + ".csv"), sweep_to_csv(result), "sweep", config);
    write_with_meta(fs::path(prefix.string() + ".json"), sweep_to_json(result).dump(2) + "\n", "sweep", config);
    for (const auto& c : result.cells) {
        std::cout << "coupling [" << c.coupling.lo << ", " << c.coupling.hi << "] N=" << c.length
                  << ": MCC = " << (c.mcc ? format_double(*c.mcc) : "NA") << " (" << c.realizations << " ok, "
                  << c.dropped << " dropped)\n";
    }
    return 0;
}

// ---- ensemble -----------------------------------------------------------------

struct EnsembleOptions {
    CommonOptions common;
    std::string input;
    std::string source;
    std::string target;
    std::string uncertain_x;
    std::string uncertain_y;
    std::size_t segments = 100;
    double min_frac = 0.75;
    double max_frac = 1.0;
    std::size_t resamples = 0;
    double bin_width = 1.0;
    double lower_pct = 10.0;
    double upper_pct = 90.0;
    std::string output;
};

int run_ensemble(EnsembleOptions o, const CLI::App* sub)
{
    require_set(o.output, "--output");
    const std::uint64_t seed = resolve_seed(o.common);
    EnsembleConfig cfg;
    cfg.segments = {o.segments, o.min_frac, o.max_frac, Seed{seed}};
    cfg.resamples = o.resamples;
    cfg.bin_width = o.bin_width;
    cfg.eta_max = o.common.eta_max;
    cfg.f = o.common.f;
    cfg.embedding = embedding_spec(o.common);
    cfg.estimator = estimator_options(o.common);
    cfg.lower_pct = o.lower_pct;
    cfg.upper_pct = o.upper_pct;
    cfg.jobs = o.common.jobs;
    cfg.segments.validate();

    EnsembleResult result;
    json config = effective_options(sub, seed);
    config.erase("jobs");
    if (!o.uncertain_x.empty() || !o.uncertain_y.empty()) {
        if (o.uncertain_x.empty() || o.uncertain_y.empty() || !o.input.empty()) {
            throw Error(ErrorKind::Validation, "give either --input or both --uncertain-x and --uncertain-y");
        }
        result = ensemble_asymmetry(load_uncertain_csv(o.uncertain_x), load_uncertain_csv(o.uncertain_y), cfg);
    } else {
        if (o.input.empty()) {
            throw Error(ErrorKind::Validation, "--input is required");
        }
        auto [x, y] = load_pair(o.input, o.source, o.target);
        config["source"] = o.source;
        config["target"] = o.target;
        result = ensemble_asymmetry(x, y, cfg);
    }
    config["age_inversions"] = result.age_inversions;
    config["members"] = result.members;
    config["failures"] = result.failures;
    write_with_meta(o.output, ensemble_to_csv(result), "ensemble", config);
    std::cout << result.members << " members, " << result.failures << " failed";
    if (result.age_inversions) {
        std::cout << ", age inversions resolved by sorting";
    }
    std::cout << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Predictive asymmetry analysis of time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    app.option_defaults()->always_capture_default();

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Simulate a benchmark system");
    g->add_option("--family", gen.family, "System family");
    g->add_option("--param", gen.params, "Parameter name=value[,value...]; overrides with --random");
    g->add_flag("--random", gen.random, "Draw a randomized realization");
    g->add_option("--coupling", gen.coupling, "Coupling range lo,hi for --random (default 0,0)")->delimiter(',')->expected(2);
    g->add_flag("--clean", gen.clean, "Skip observational noise");
    g->add_option("--n", gen.n, "Samples to keep")->check(CLI::PositiveNumber);
    g->add_option("--transient", gen.transient, "Discarded steps for maps");
    g->add_option("--spec", gen.spec_file, "System spec JSON (as written next to generated data)");
    g->add_option("--output", gen.output, "Output CSV");
    add_seed_jobs_config(g, gen.common);

    AsymmetryOptions asym;
    auto* a = app.add_subcommand("asymmetry", "TE spectra and predictive asymmetry for one pair");
    a->add_option("--input", asym.input, "Series file (.csv or .json)");
    a->add_option("--source", asym.source, "Source column (default: first)");
    a->add_option("--target", asym.target, "Target column (default: second)");
    a->add_option("--output", asym.output, "Output prefix");
    add_estimation(a, asym.common);
    add_seed_jobs_config(a, asym.common);

    SweepOptions sw;
    auto* s = app.add_subcommand("sweep", "Classifier sweep over coupling and length grids");
    s->add_option("--family", sw.family, "System family");
    s->add_option("--ensemble-size", sw.ensemble_size, "Realizations per cell")->check(CLI::PositiveNumber);
    s->add_option("--max-redraws", sw.max_redraws, "Redraws allowed after a failed realization");
    s->add_option("--output", sw.output, "Output prefix");
    add_estimation(s, sw.common);
    add_seed_jobs_config(s, sw.common);

    EnsembleOptions ens;
    auto* e = app.add_subcommand("ensemble", "Segment / resampling ensemble of asymmetry curves");
    e->add_option("--input", ens.input, "Series file with the pair");
    e->add_option("--source", ens.source, "Source column (default: first)");
    e->add_option("--target", ens.target, "Target column (default: second)");
    e->add_option("--uncertain-x", ens.uncertain_x, "CSV with value_mean,value_sd,age_mean,age_sd");
    e->add_option("--uncertain-y", ens.uncertain_y, "CSV with value_mean,value_sd,age_mean,age_sd");
    e->add_option("--segments", ens.segments, "Segments per realization")->check(CLI::PositiveNumber);
    e->add_option("--min-frac", ens.min_frac, "Shortest segment as a fraction of N");
    e->add_option("--max-frac", ens.max_frac, "Longest segment as a fraction of N");
    e->add_option("--resamples", ens.resamples, "Uncertainty draws (0: use means)");
    e->add_option("--bin-width", ens.bin_width, "Bin width for resampled ages");
    e->add_option("--lower-pct", ens.lower_pct, "Lower ribbon percentile");
    e->add_option("--upper-pct", ens.upper_pct, "Upper ribbon percentile");
    e->add_option("--output", ens.output, "Output CSV");
    add_estimation(e, ens.common);
    add_seed_jobs_config(e, ens.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    try {
        if (g->parsed()) {
            if (!gen.common.config.empty()) {
                apply_config(g, load_config(gen.common.config));
            }
            return run_generate(gen, g);
        }
        if (a->parsed()) {
            if (!asym.common.config.empty()) {
                apply_config(a, load_config(asym.common.config));
            }
            return run_asymmetry(asym, a);
        }
        if (s->parsed()) {
            return run_sweep(sw, s);
        }
        if (e->parsed()) {
            if (!ens.common.config.empty()) {
                apply_config(e, load_config(ens.common.config));
            }
            return run_ensemble(ens, e);
        }
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return is_validation_error(err.kind()) ? 2 : 3;
    } catch (const json::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 0;
}
