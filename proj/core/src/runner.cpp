#include "tlmp/runner.hpp"

#include "tlmp/parallel.hpp"

#include <json.hpp>

#include <fstream>

#ifndef TLMP_VERSION
#define TLMP_VERSION "0.0.0"
#endif

namespace tlmp {

std::string version() { return TLMP_VERSION; }

namespace {

template <class Fn>
void per_scenario(std::size_t count, std::size_t jobs, Fn&& fn) {
    parallel_for(count, jobs, [&](std::size_t s) {
        try {
            fn(s);
        } catch (const ScenarioError&) {
            throw;
        } catch (const std::exception& e) {
            throw ScenarioError(s, e.what());
        }
    });
}

const char* kind_name(ParticipantKind k) { return k == ParticipantKind::Generator ? "generator" : "esr"; }

void write_outputs(const RunConfig& config, const RunOptions& options,
                   const std::vector<std::pair<std::string, CsvTable>>& tables) {
    std::vector<std::string> names;
    for (const auto& [name, table] : tables) {
        table.write(options.out_dir / name);
        names.push_back(name);
    }
    const auto path = options.out_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << manifest_json(config, options.command, names);
}

}  // namespace

std::vector<ScenarioOutcome> run_scenarios(const RunConfig& config, bool settle_them, std::size_t jobs) {
    const BidParameter bids = truthful_bids(config.market);
    std::vector<ScenarioOutcome> out(config.experiment.scenarios);
    per_scenario(out.size(), jobs, [&](std::size_t s) {
        const DemandScenario sc = make_scenario(config, s);
        ScenarioOutcome& o = out[s];
        o.id = s;
        o.rolling = roll_horizon(config.market, bids, sc.realized, make_scenario_forecaster(config, sc));
        for (Scheme scheme : config.experiment.schemes) {
            o.prices.push_back(extract_prices(scheme, o.rolling, config.market));
            if (settle_them) o.settlements.push_back(settle(o.prices.back(), o.rolling, config.market, bids));
        }
    });
    return out;
}

std::vector<AuditRow> run_audit_rows(const RunConfig& config, std::size_t jobs) {
    std::vector<std::size_t> horizons = config.experiment.horizons;
    if (horizons.empty()) horizons.push_back(config.market.config.horizon);
    const std::size_t S = config.experiment.scenarios;
    const PriceScope scope = config.experiment.audit_all_participants ? PriceScope::AllParticipants : PriceScope::Esrs;

    std::vector<AuditRow> rows(horizons.size() * S);
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        const RunConfig cfg = with_horizon(config, horizons[h]);
        const BidParameter bids = truthful_bids(cfg.market);
        per_scenario(S, jobs, [&](std::size_t s) {
            const DemandScenario sc = make_scenario(cfg, s);
            const RollingDispatch rolling = roll_horizon(cfg.market, bids, sc.realized, make_scenario_forecaster(cfg, sc));
            AuditRow& row = rows[h * S + s];
            row.horizon = horizons[h];
            row.scenario = s;
            row.report = check_uniform_pricing_condition(rolling, cfg.market, bids);
            const PriceSeries lmp = extract_rlmp(rolling);
            for (std::size_t i = 0; i < cfg.market.esrs.size(); ++i) {
                row.lmp_esr_loc += compute_loc(lmp, rolling, cfg.market, {ParticipantKind::Esr, i}, bids);
            }
            row.verdict = uniform_price_impossibility(rolling, cfg.market, bids, scope);
        });
    }
    return rows;
}

std::vector<PerturbationResult> run_perturbation(const RunConfig& config, std::size_t jobs) {
    const ParticipantRef who = find_participant(config.market, config.experiment.participant);
    const std::vector<Direction> directions = who.kind == ParticipantKind::Esr
                                                  ? esr_directions()
                                                  : std::vector<Direction>{{BidSide::Generation, +1}, {BidSide::Generation, -1}};
    std::vector<DemandScenario> scenarios;
    for (std::size_t s = 0; s < config.experiment.scenarios; ++s) scenarios.push_back(make_scenario(config, s));
    return perturbation_sweep(config.market, who, config.experiment.epsilon, directions, scenarios,
                              config.experiment.schemes, jobs);
}

CsvTable dispatch_table(const RunConfig& config, std::span<const ScenarioOutcome> outcomes) {
    const Market& m = config.market;
    CsvTable t({"scenario", "t", "participant", "mw", "discharge_mw", "charge_mw", "soc_mwh"});
    for (const auto& o : outcomes) {
        const auto& r = o.rolling;
        for (std::size_t k = 0; k < r.horizon(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            for (std::size_t n = 0; n < m.generators.size(); ++n) {
                t.add_row({o.id, k + 1, m.generators[n].name, r.generation(static_cast<Eigen::Index>(n), kk), std::string(),
                           std::string(), std::string()});
            }
            for (std::size_t i = 0; i < m.esrs.size(); ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                t.add_row({o.id, k + 1, m.esrs[i].name, r.discharge(ii, kk) - r.charge(ii, kk), r.discharge(ii, kk),
                           r.charge(ii, kk), r.soc(ii, kk)});
            }
        }
    }
    return t;
}

CsvTable price_table(const RunConfig& config, std::span<const ScenarioOutcome> outcomes) {
    const Market& m = config.market;
    CsvTable t({"scenario", "t", "participant", "side", "scheme", "price", "lambda", "phi", "delta", "degenerate"});
    for (const auto& o : outcomes) {
        for (std::size_t k = 0; k < o.rolling.horizon(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            for (const auto& p : o.prices) {
                const std::string scheme = to_string(p.scheme);
                const bool degenerate = p.degenerate[k];
                t.add_row({o.id, k + 1, std::string("LOAD"), std::string("demand"), scheme, p.demand[kk], p.lambda[kk],
                           std::string(), std::string(), degenerate});
                for (std::size_t n = 0; n < m.generators.size(); ++n) {
                    const auto nn = static_cast<Eigen::Index>(n);
                    t.add_row({o.id, k + 1, m.generators[n].name, std::string("generation"), scheme, p.generator(nn, kk),
                               p.lambda[kk], std::string(), p.ramp_delta(nn, kk), degenerate});
                }
                for (std::size_t i = 0; i < m.esrs.size(); ++i) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    t.add_row({o.id, k + 1, m.esrs[i].name, std::string("discharge"), scheme, p.discharge(ii, kk),
                               p.lambda[kk], p.phi(ii, kk), std::string(), degenerate});
                    t.add_row({o.id, k + 1, m.esrs[i].name, std::string("charge"), scheme, p.charge(ii, kk), p.lambda[kk],
                               p.phi(ii, kk), std::string(), degenerate});
                }
            }
        }
    }
    return t;
}

CsvTable settlement_table(const RunConfig& /*config*/, std::span<const ScenarioOutcome> outcomes) {
    CsvTable t({"scenario", "scheme", "participant", "kind", "energy_revenue", "true_cost", "surplus", "loc",
                "consumer_energy_payment", "merchandising_surplus", "consumer_payment"});
    for (const auto& o : outcomes) {
        for (const auto& rec : o.settlements) {
            const std::string scheme = to_string(rec.scheme);
            double cost = 0.0, surplus = 0.0;
            for (const auto& p : rec.participants) {
                t.add_row({o.id, scheme, p.name, std::string(kind_name(p.who.kind)), p.energy_revenue, p.true_cost,
                           p.surplus, p.loc, std::string(), std::string(), std::string()});
                cost += p.true_cost;
                surplus += p.surplus;
            }
            t.add_row({o.id, scheme, std::string("SYSTEM"), std::string("system"), rec.total_revenue, cost, surplus,
                       rec.total_loc, rec.consumer_energy_payment, rec.merchandising_surplus, rec.consumer_payment});
        }
    }
    return t;
}

CsvTable perturb_table(const RunConfig& config, std::span<const PerturbationResult> results) {
    CsvTable t({"scheme", "participant", "direction", "epsilon", "mean_delta_profit", "std_delta_profit", "n",
                "max_delta_profit", "dispatch_changes", "degenerate"});
    for (const auto& r : results) {
        t.add_row({to_string(r.scheme), participant_name(config.market, r.who), to_string(r.direction), r.epsilon, r.mean(),
                   r.stddev(), r.count(), r.max(), r.dispatch_changes(), r.degenerate_count()});
    }
    return t;
}

CsvTable audit_table(std::span<const AuditRow> rows) {
    CsvTable t({"horizon", "scenario", "fired", "esr_i", "esr_j", "t_star", "distinct_costs", "both_marginal",
                "soc_interior", "degenerate", "lmp_esr_loc", "uniform_price_exists", "residual"});
    for (const auto& r : rows) {
        t.add_row({r.horizon, r.scenario, r.report.fired, r.report.esr_i, r.report.esr_j, r.report.t_star + 1,
                   r.report.distinct_costs, r.report.both_marginal, r.report.soc_interior, r.report.degenerate,
                   r.lmp_esr_loc, r.verdict.exists_zero_loc_price, r.verdict.residual});
    }
    return t;
}

std::string manifest_json(const RunConfig& config, const std::string& command, const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["version"] = version();
    j["command"] = command;
    j["seed"] = config.experiment.seed;
    j["scenarios"] = config.experiment.scenarios;
    j["config_sha256"] = config_hash(config);
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

void run_simulate(const RunConfig& config, const RunOptions& options) {
    const auto outcomes = run_scenarios(config, false, options.jobs);
    write_outputs(config, options, {{"dispatch.csv", dispatch_table(config, outcomes)}, {"prices.csv", price_table(config, outcomes)}});
}

void run_settle(const RunConfig& config, const RunOptions& options) {
    const auto outcomes = run_scenarios(config, true, options.jobs);
    write_outputs(config, options, {{"settlement.csv", settlement_table(config, outcomes)}});
}

void run_perturb(const RunConfig& config, const RunOptions& options) {
    const auto results = run_perturbation(config, options.jobs);
    write_outputs(config, options, {{"perturb.csv", perturb_table(config, results)}});
}

void run_audit(const RunConfig& config, const RunOptions& options) {
    const auto rows = run_audit_rows(config, options.jobs);
    write_outputs(config, options, {{"audit.csv", audit_table(rows)}});
}

}  // namespace tlmp
