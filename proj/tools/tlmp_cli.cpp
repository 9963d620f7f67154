// tlmp: rolling-window dispatch, R-LMP / R-TLMP pricing, settlement and
// bid-perturbation experiments for a single-bus market with storage.
//
// Exit codes: 0 ok, 1 domain error (bad config, infeasible scenario), 2 usage error.

#include "tlmp/config.hpp"
#include "tlmp/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> scenarios;
    std::string scheme;
    std::string out = "out";
    std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "base seed (overrides experiment.seed)");
    cmd->add_option("--scenarios", f.scenarios, "number of scenarios (overrides experiment.scenarios)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--scheme", f.scheme, "pricing scheme")->check(CLI::IsMember({"lmp", "tlmp", "both"}));
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

tlmp::RunConfig resolve(const CommonFlags& f) {
    tlmp::RunConfig c = tlmp::load_config(f.config);
    if (f.seed) c.experiment.seed = *f.seed;
    if (f.scenarios) c.experiment.scenarios = *f.scenarios;
    if (f.scheme == "lmp") c.experiment.schemes = {tlmp::Scheme::RLmp};
    if (f.scheme == "tlmp") c.experiment.schemes = {tlmp::Scheme::RTlmp};
    if (f.scheme == "both") c.experiment.schemes = {tlmp::Scheme::RLmp, tlmp::Scheme::RTlmp};
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rolling-window dispatch and temporal LMP settlement for markets with storage"};
    app.set_version_flag("--version", tlmp::version());
    app.require_subcommand(1);

    CommonFlags flags;
    std::vector<std::size_t> horizons;
    auto* simulate = app.add_subcommand("simulate", "dispatch and prices -> dispatch.csv, prices.csv");
    auto* settle = app.add_subcommand("settle", "settlement with LOC uplifts -> settlement.csv");
    auto* perturb = app.add_subcommand("perturb", "bid perturbation sweep -> perturb.csv");
    auto* audit = app.add_subcommand("audit", "uniform-pricing condition audit -> audit.csv");
    for (auto* cmd : {simulate, settle, perturb, audit}) add_common(cmd, flags);
    audit->add_option("--horizons", horizons, "horizons to sweep (overrides experiment.horizons)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string command = "tlmp";
    for (int i = 1; i < argc; ++i) command += std::string(" ") + argv[i];

    try {
        tlmp::RunConfig config = resolve(flags);
        if (!horizons.empty()) config.experiment.horizons = horizons;
        const auto violations = tlmp::validate(config);
        if (!violations.empty()) throw tlmp::ValidationError(violations);
        const tlmp::RunOptions options{flags.out, flags.jobs, command};

        if (simulate->parsed()) tlmp::run_simulate(config, options);
        if (settle->parsed()) tlmp::run_settle(config, options);
        if (perturb->parsed()) tlmp::run_perturb(config, options);
        if (audit->parsed()) tlmp::run_audit(config, options);
    } catch (const tlmp::ParseError& e) {
        std::cerr << "tlmp: " << e.what() << "\n";
        return 1;
    } catch (const tlmp::ValidationError& e) {
        std::cerr << "tlmp: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "tlmp: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
