#pragma once

#include "tlmp/forecast.hpp"
#include "tlmp/market.hpp"
#include "tlmp/pricing.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlmp {

/// Unreadable file or malformed JSON / CSV.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input that breaks a market or experiment invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

struct DemandConfig {
    std::vector<double> mean;  // MW per interval, at least `horizon` long
    ForecastParams params;
    /// Fixed realization used by every scenario instead of random draws.
    std::optional<std::vector<double>> realized;
    /// forecasts[t][k] = d_hat_{(t+k)|t}; k = 0 is ignored (the realization is used).
    std::optional<std::vector<std::vector<double>>> forecasts;
};

struct ExperimentConfig {
    std::vector<Scheme> schemes{Scheme::RLmp, Scheme::RTlmp};
    std::size_t scenarios = 1;
    std::uint64_t seed = 0;
    double epsilon = 0.01;
    std::string participant;  // perturbed participant; empty = first ESR
    std::vector<std::size_t> horizons;  // audit sweep; empty = market horizon only
    bool audit_all_participants = false;  // uniform-price oracle scope; default ESRs only
};

struct RunConfig {
    Market market;
    DemandConfig demand;
    ExperimentConfig experiment;
};

/// Reads and validates a JSON config. Relative `mean_profile_csv` paths are
/// resolved against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// Same, from JSON text.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");

/// Every violation of a fully parsed config, with field paths.
std::vector<Violation> validate(const RunConfig& config);

/// Compact JSON of the resolved config (mean profile inlined, keys sorted).
std::string canonical_json(const RunConfig& config);

/// Hex SHA-256 of canonical_json(config).
std::string config_hash(const RunConfig& config);

/// Two-column CSV (interval, MW) with an optional header row.
std::vector<double> read_profile_csv(const std::filesystem::path& path);

/// Market restricted to the first `horizon` intervals; the window is capped at the horizon.
RunConfig with_horizon(const RunConfig& config, std::size_t horizon);

/// Demand trace and forecaster of scenario `id` (seed = experiment.seed + id).
DemandScenario make_scenario(const RunConfig& config, std::size_t id);
Forecaster make_scenario_forecaster(const RunConfig& config, const DemandScenario& scenario);

std::optional<Scheme> parse_scheme(const std::string& text);

/// Resolves experiment.participant to a participant of the market.
ParticipantRef find_participant(const Market& market, const std::string& name);

}  // namespace tlmp
