#include "tlmp/market.hpp"

#include <cmath>

namespace tlmp {

namespace {

std::string indexed(const char* group, std::size_t i, const char* field) {
    return std::string(group) + "[" + std::to_string(i) + "]." + field;
}

}  // namespace

std::vector<ParticipantRef> participants(const Market& market) {
    std::vector<ParticipantRef> out;
    for (std::size_t n = 0; n < market.generators.size(); ++n) out.push_back({ParticipantKind::Generator, n});
    for (std::size_t i = 0; i < market.esrs.size(); ++i) out.push_back({ParticipantKind::Esr, i});
    return out;
}

const std::string& participant_name(const Market& market, ParticipantRef who) {
    return who.kind == ParticipantKind::Generator ? market.generators.at(who.index).name : market.esrs.at(who.index).name;
}

std::vector<Violation> validate(const Market& market) {
    std::vector<Violation> out;
    auto add = [&](std::string field, std::string msg) { out.push_back({std::move(field), std::move(msg)}); };
    auto finite = [](double v) { return std::isfinite(v); };

    const auto& cfg = market.config;
    if (cfg.horizon < 1) add("market.horizon", "horizon must be at least 1");
    if (cfg.window < 1) add("market.window", "window must be at least 1");
    if (cfg.window > cfg.horizon) add("market.window", "window must not exceed horizon");
    if (cfg.interval_hours != 1.0) add("market.interval_hours", "only 1-hour intervals are supported");

    for (std::size_t n = 0; n < market.generators.size(); ++n) {
        const auto& g = market.generators[n];
        if (g.name.empty()) add(indexed("generators", n, "name"), "name must not be empty");
        if (!finite(g.capacity_max) || !finite(g.capacity_min) || !finite(g.ramp_up) || !finite(g.ramp_down) ||
            !finite(g.marginal_cost) || !finite(g.initial_output)) {
            add(indexed("generators", n, "*"), "all fields must be finite");
            continue;
        }
        if (g.capacity_min < 0.0) add(indexed("generators", n, "capacity_min"), "minimum generation must be nonnegative");
        if (g.capacity_min > g.capacity_max) add(indexed("generators", n, "capacity_max"), "capacity_max must be >= capacity_min");
        if (g.ramp_up <= 0.0) add(indexed("generators", n, "ramp_up"), "ramp must be positive");
        if (g.ramp_down <= 0.0) add(indexed("generators", n, "ramp_down"), "ramp must be positive");
        if (g.marginal_cost < 0.0) add(indexed("generators", n, "marginal_cost"), "cost must be nonnegative");
        if (g.initial_output < 0.0 || g.initial_output > g.capacity_max) {
            add(indexed("generators", n, "initial_output"), "initial output must lie in [0, capacity_max]");
        }
    }

    for (std::size_t i = 0; i < market.esrs.size(); ++i) {
        const auto& e = market.esrs[i];
        if (e.name.empty()) add(indexed("esrs", i, "name"), "name must not be empty");
        if (!finite(e.discharge_cap) || !finite(e.charge_cap) || !finite(e.soc_min) || !finite(e.soc_max) ||
            !finite(e.soc_initial) || !finite(e.eff_discharge) || !finite(e.eff_charge) || !finite(e.discharge_cost) ||
            !finite(e.charge_cost)) {
            add(indexed("esrs", i, "*"), "all fields must be finite");
            continue;
        }
        if (e.discharge_cap <= 0.0) add(indexed("esrs", i, "discharge_cap"), "capacity must be positive");
        if (e.charge_cap <= 0.0) add(indexed("esrs", i, "charge_cap"), "capacity must be positive");
        if (e.soc_min > e.soc_max) add(indexed("esrs", i, "soc_max"), "soc_max must be >= soc_min");
        if (e.soc_initial < e.soc_min || e.soc_initial > e.soc_max) {
            add(indexed("esrs", i, "soc_initial"), "initial SOC must lie in [soc_min, soc_max]");
        }
        if (!(e.eff_discharge > 0.0 && e.eff_discharge <= 1.0)) add(indexed("esrs", i, "eff_discharge"), "efficiency must lie in (0, 1]");
        if (!(e.eff_charge > 0.0 && e.eff_charge <= 1.0)) add(indexed("esrs", i, "eff_charge"), "efficiency must lie in (0, 1]");
        if (e.discharge_cost < 0.0) add(indexed("esrs", i, "discharge_cost"), "cost must be nonnegative");
        if (e.charge_cost < 0.0) add(indexed("esrs", i, "charge_cost"), "cost must be nonnegative");
        if (e.eff_discharge > 0.0 && e.eff_charge > 0.0 && !(e.discharge_cost > e.charge_cost / e.round_trip_efficiency())) {
            add(indexed("esrs", i, "discharge_cost"),
                "relaxation assumption violated: discharge_cost must exceed charge_cost / (eff_discharge * eff_charge)");
        }
    }
    return out;
}

std::vector<Violation> validate(const BidParameter& bids, const Market& market) {
    std::vector<Violation> out;
    const std::size_t T = market.config.horizon;
    auto check_curves = [&](const std::vector<std::vector<double>>& curves, std::size_t expected, const char* group) {
        if (curves.size() != expected) {
            out.push_back({group, "expected " + std::to_string(expected) + " curves, got " + std::to_string(curves.size())});
            return;
        }
        for (std::size_t k = 0; k < curves.size(); ++k) {
            const std::string path = std::string(group) + "[" + std::to_string(k) + "]";
            if (curves[k].size() != T) {
                out.push_back({path, "expected one price per interval"});
                continue;
            }
            for (double v : curves[k]) {
                if (!std::isfinite(v) || v < 0.0) {
                    out.push_back({path, "bids must be finite and nonnegative"});
                    break;
                }
            }
        }
    };
    check_curves(bids.generator, market.generators.size(), "bids.generator");
    check_curves(bids.discharge, market.esrs.size(), "bids.discharge");
    check_curves(bids.charge, market.esrs.size(), "bids.charge");
    if (!out.empty()) return out;

    for (std::size_t i = 0; i < market.esrs.size(); ++i) {
        const double xi = market.esrs[i].round_trip_efficiency();
        for (std::size_t t = 0; t < T; ++t) {
            if (!(bids.discharge[i][t] > bids.charge[i][t] / xi)) {
                out.push_back({"bids.discharge[" + std::to_string(i) + "]",
                               "relaxation assumption violated at t=" + std::to_string(t + 1)});
                break;
            }
        }
    }
    return out;
}

double bid_cost(double marginal_price, double quantity) {
    if (quantity < 0.0) throw NegativeQuantity("bid_cost: quantity must be nonnegative, got " + std::to_string(quantity));
    return marginal_price * quantity;
}

BidParameter truthful_bids(std::span<const GeneratorSpec> generators, std::span<const EsrSpec> esrs, std::size_t horizon) {
    BidParameter bids;
    for (const auto& g : generators) bids.generator.emplace_back(horizon, g.marginal_cost);
    for (const auto& e : esrs) {
        bids.discharge.emplace_back(horizon, e.discharge_cost);
        bids.charge.emplace_back(horizon, e.charge_cost);
    }
    return bids;
}

BidParameter truthful_bids(const Market& market) {
    return truthful_bids(market.generators, market.esrs, market.config.horizon);
}

BidParameter shift_bid(const BidParameter& bids, BidSide side, std::size_t index, double delta) {
    BidParameter out = bids;
    auto& curves = side == BidSide::Generation ? out.generator : side == BidSide::Discharge ? out.discharge : out.charge;
    for (double& v : curves.at(index)) v += delta;
    return out;
}

}  // namespace tlmp
