#pragma once

#include "tlmp/config.hpp"
#include "tlmp/csv.hpp"
#include "tlmp/dispatch.hpp"
#include "tlmp/incentives.hpp"
#include "tlmp/pricing.hpp"
#include "tlmp/settlement.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tlmp {

/// Library version string.
std::string version();

/// A scenario-level failure, tagged with the scenario id.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::size_t scenario, const std::string& what)
        : std::runtime_error("scenario " + std::to_string(scenario) + ": " + what), scenario_(scenario) {}
    std::size_t scenario() const { return scenario_; }

private:
    std::size_t scenario_;
};

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::size_t jobs = 1;
    std::string command;  // recorded in the manifest
};

struct ScenarioOutcome {
    std::size_t id = 0;
    RollingDispatch rolling;
    std::vector<PriceSeries> prices;             // one per configured scheme
    std::vector<SettlementRecord> settlements;   // empty unless settled
};

/// Runs every configured scenario with truthful bids. Results are ordered by id.
std::vector<ScenarioOutcome> run_scenarios(const RunConfig& config, bool settle_them, std::size_t jobs);

struct AuditRow {
    std::size_t horizon = 0;
    std::size_t scenario = 0;
    ConditionReport report;
    double lmp_esr_loc = 0.0;
    UniformPriceVerdict verdict;
};

/// Condition check, R-LMP ESR uplift and uniform-price oracle per scenario,
/// for every horizon in experiment.horizons (or the market horizon).
std::vector<AuditRow> run_audit_rows(const RunConfig& config, std::size_t jobs);

std::vector<PerturbationResult> run_perturbation(const RunConfig& config, std::size_t jobs);

CsvTable dispatch_table(const RunConfig& config, std::span<const ScenarioOutcome> outcomes);
CsvTable price_table(const RunConfig& config, std::span<const ScenarioOutcome> outcomes);
CsvTable settlement_table(const RunConfig& config, std::span<const ScenarioOutcome> outcomes);
CsvTable perturb_table(const RunConfig& config, std::span<const PerturbationResult> results);
CsvTable audit_table(std::span<const AuditRow> rows);

/// Reproducibility record: seed, config hash, version, command, outputs. No timestamps.
std::string manifest_json(const RunConfig& config, const std::string& command, const std::vector<std::string>& outputs);

// Each writes its CSVs and manifest.json into options.out_dir.
void run_simulate(const RunConfig& config, const RunOptions& options);
void run_settle(const RunConfig& config, const RunOptions& options);
void run_perturb(const RunConfig& config, const RunOptions& options);
void run_audit(const RunConfig& config, const RunOptions& options);

}  // namespace tlmp
