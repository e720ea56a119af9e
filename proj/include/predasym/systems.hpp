#pragma once

// Seeded generators for the synthetic benchmark systems.

#include "predasym/data.hpp"
#include "predasym/rng.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace predasym {

enum class Family {
    LogisticBidir,
    CommonCause,
    VarK,
    NoiseUniform,
    NoiseNormal,
    NoiseBrownian,
    ArPeriodicNl,
    ChenLinear,
    ChenNonlinear,
    ChenPeriodic,
    LogisticChain,
    HenonChain,
    RosslerLorenz,
    BidirNlPeriodic,
    Nl2d,
};

std::string_view family_name(Family f);
Family parse_family(std::string_view name);
std::vector<Family> all_families();

using ParamMap = std::map<std::string, std::vector<double>>;

struct SystemSpec {
    Family family = Family::NoiseUniform;
    ParamMap params;
    std::size_t n = 1000;
    std::size_t transient = 1000; ///< steps for maps; ignored by the ODE (see "transient_time")
    Seed seed{};

    /// First value of a parameter; InvalidParams if absent.
    [[nodiscard]] double get(const std::string& name) const;
    [[nodiscard]] double get_or(const std::string& name, double fallback) const;
    /// Whole parameter vector; InvalidParams if absent or of the wrong size.
    [[nodiscard]] const std::vector<double>& vec(const std::string& name, std::size_t size) const;
    [[nodiscard]] bool has(const std::string& name) const { return params.count(name) > 0; }

    /// Throws InvalidParams when parameters are missing or inconsistent.
    void validate() const;

    friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Directed coupling between observed columns.
struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Generated {
    MultiSeries series;
    std::vector<Edge> truth;
};

/// Runs the system. Observational noise is not applied here.
Generated generate(const SystemSpec& spec);

/// Ground-truth edges implied by the nonzero coupling parameters.
std::vector<Edge> truth_graph(const SystemSpec& spec);

/// Adds the family's observational noise ("obs_noise" times each column's sd).
MultiSeries observe(const MultiSeries& clean, const SystemSpec& spec);

/// Largest internal or interaction delay of the realization.
int max_delay(const SystemSpec& spec);

/// Spectral radius of the companion matrix of a VAR with the given
/// coefficient matrices (A_1 .. A_k).
double var_spectral_radius(const std::vector<Eigen::MatrixXd>& coeffs);
bool var_is_stable(const std::vector<Eigen::MatrixXd>& coeffs);
/// Coefficient matrices of a var_k spec. Entry (i, j) of A_l is the effect
/// of variable j at lag l on variable i.
std::vector<Eigen::MatrixXd> var_coefficients(const SystemSpec& spec);

struct CouplingRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Draws a randomized realization. Overrides are applied on top of the
/// drawn parameters; "K" (chain length) and "max_order" are read before
/// drawing.
SystemSpec random_system(Family family, CouplingRange coupling, std::size_t n, Seed master,
                         const ParamMap& overrides = {});

/// Fixed-step RK4 integration of the Rössler-driven Lorenz system.
/// Returns the observed pair (x2, y2) sampled every `sample_every` steps
/// after the transient.
MultiSeries integrate_ode(const SystemSpec& spec, double dt, int sample_every);

nlohmann::json spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const nlohmann::json& j);
nlohmann::json truth_to_json(const std::vector<Edge>& edges, const MultiSeries& series);

} // namespace predasym
