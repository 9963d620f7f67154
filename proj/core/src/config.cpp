#include "tlmp/config.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tlmp {

using nlohmann::json;

namespace {

std::string render(const std::vector<Violation>& violations) {
    std::string out = "invalid configuration:";
    for (const auto& v : violations) out += "\n  " + v.field + ": " + v.message;
    return out;
}

template <class T>
T field(const json& obj, const char* key, const std::string& path, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(path + "." + key + ": wrong type");
    }
}

template <class T>
T required(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) throw ParseError(path + "." + key + ": missing");
    return field<T>(obj, key, path, T{});
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) throw ParseError(path + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

GeneratorSpec parse_generator(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    GeneratorSpec g;
    g.name = required<std::string>(j, "name", path);
    g.capacity_max = required<double>(j, "capacity_max", path);
    g.capacity_min = field<double>(j, "capacity_min", path, g.capacity_min);
    g.ramp_up = required<double>(j, "ramp_up", path);
    g.ramp_down = field<double>(j, "ramp_down", path, g.ramp_up);
    g.marginal_cost = required<double>(j, "marginal_cost", path);
    g.initial_output = field<double>(j, "initial_output", path, g.capacity_min);
    return g;
}

EsrSpec parse_esr(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    EsrSpec e;
    e.name = required<std::string>(j, "name", path);
    e.discharge_cap = required<double>(j, "discharge_cap", path);
    e.charge_cap = field<double>(j, "charge_cap", path, e.discharge_cap);
    e.soc_min = field<double>(j, "soc_min", path, 0.0);
    e.soc_max = required<double>(j, "soc_max", path);
    e.soc_initial = field<double>(j, "soc_initial", path, e.soc_min);
    e.eff_discharge = field<double>(j, "eff_discharge", path, 1.0);
    e.eff_charge = field<double>(j, "eff_charge", path, 1.0);
    e.discharge_cost = required<double>(j, "discharge_cost", path);
    e.charge_cost = required<double>(j, "charge_cost", path);
    return e;
}

json to_json(const RunConfig& c) {
    json j;
    j["market"] = {{"horizon", c.market.config.horizon},
                   {"window", c.market.config.window},
                   {"interval_hours", c.market.config.interval_hours}};
    j["generators"] = json::array();
    for (const auto& g : c.market.generators) {
        j["generators"].push_back({{"name", g.name},
                                   {"capacity_max", g.capacity_max},
                                   {"capacity_min", g.capacity_min},
                                   {"ramp_up", g.ramp_up},
                                   {"ramp_down", g.ramp_down},
                                   {"marginal_cost", g.marginal_cost},
                                   {"initial_output", g.initial_output}});
    }
    j["esrs"] = json::array();
    for (const auto& e : c.market.esrs) {
        j["esrs"].push_back({{"name", e.name},
                             {"discharge_cap", e.discharge_cap},
                             {"charge_cap", e.charge_cap},
                             {"soc_min", e.soc_min},
                             {"soc_max", e.soc_max},
                             {"soc_initial", e.soc_initial},
                             {"eff_discharge", e.eff_discharge},
                             {"eff_charge", e.eff_charge},
                             {"discharge_cost", e.discharge_cost},
                             {"charge_cost", e.charge_cost}});
    }
    json demand = {{"mean_profile", c.demand.mean},
                   {"sigma_load", c.demand.params.sigma_load},
                   {"sigma_step", c.demand.params.sigma_step},
                   {"absolute", c.demand.params.absolute}};
    if (c.demand.realized) demand["realized"] = *c.demand.realized;
    if (c.demand.forecasts) demand["forecasts"] = *c.demand.forecasts;
    j["demand"] = demand;
    json schemes = json::array();
    for (Scheme s : c.experiment.schemes) schemes.push_back(to_string(s));
    j["experiment"] = {{"schemes", schemes},
                       {"scenarios", c.experiment.scenarios},
                       {"seed", c.experiment.seed},
                       {"epsilon", c.experiment.epsilon},
                       {"participant", c.experiment.participant},
                       {"horizons", c.experiment.horizons},
                       {"audit_scope", c.experiment.audit_all_participants ? "all" : "esrs"}};
    return j;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(render(violations)), violations_(std::move(violations)) {}

std::optional<Scheme> parse_scheme(const std::string& text) {
    if (text == "lmp" || text == "r-lmp" || text == "R-LMP") return Scheme::RLmp;
    if (text == "tlmp" || text == "r-tlmp" || text == "R-TLMP") return Scheme::RTlmp;
    return std::nullopt;
}

std::vector<double> read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open demand profile " + path.string());
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected interval,MW");
        const std::string value = line.substr(comma + 1);
        char* end = nullptr;
        const double mw = std::strtod(value.c_str(), &end);
        if (end == value.c_str()) {
            if (out.empty()) continue;  // header
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": not a number");
        }
        out.push_back(mw);
    }
    if (out.empty()) throw ParseError(path.string() + ": no demand values");
    return out;
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config root must be an object");

    RunConfig c;
    const json market = j.value("market", json::object());
    c.market.config.horizon = field<std::size_t>(market, "horizon", "market", c.market.config.horizon);
    c.market.config.window = field<std::size_t>(market, "window", "market", c.market.config.window);
    c.market.config.interval_hours = field<double>(market, "interval_hours", "market", 1.0);

    const json gens = j.value("generators", json::array());
    for (std::size_t n = 0; n < gens.size(); ++n) {
        c.market.generators.push_back(parse_generator(gens[n], "generators[" + std::to_string(n) + "]"));
    }
    const json esrs = j.value("esrs", json::array());
    for (std::size_t i = 0; i < esrs.size(); ++i) {
        c.market.esrs.push_back(parse_esr(esrs[i], "esrs[" + std::to_string(i) + "]"));
    }

    const json demand = j.value("demand", json::object());
    if (demand.contains("mean_profile")) {
        c.demand.mean = number_array(demand["mean_profile"], "demand.mean_profile");
    } else if (demand.contains("mean_profile_csv")) {
        std::filesystem::path p = field<std::string>(demand, "mean_profile_csv", "demand", "");
        if (p.is_relative()) p = base_dir / p;
        c.demand.mean = read_profile_csv(p);
    }
    c.demand.params.sigma_load = field<double>(demand, "sigma_load", "demand", c.demand.params.sigma_load);
    c.demand.params.sigma_step = field<double>(demand, "sigma_step", "demand", c.demand.params.sigma_step);
    c.demand.params.absolute = field<bool>(demand, "absolute", "demand", false);
    if (demand.contains("realized")) c.demand.realized = number_array(demand["realized"], "demand.realized");
    if (demand.contains("forecasts")) {
        const json& f = demand["forecasts"];
        if (!f.is_array()) throw ParseError("demand.forecasts: expected an array of arrays");
        std::vector<std::vector<double>> rows;
        for (std::size_t t = 0; t < f.size(); ++t) rows.push_back(number_array(f[t], "demand.forecasts[" + std::to_string(t) + "]"));
        c.demand.forecasts = std::move(rows);
    }
    if (c.demand.mean.empty() && c.demand.realized) c.demand.mean = *c.demand.realized;

    const json exp = j.value("experiment", json::object());
    if (exp.contains("schemes")) {
        c.experiment.schemes.clear();
        for (const auto& s : exp["schemes"]) {
            const auto scheme = s.is_string() ? parse_scheme(s.get<std::string>()) : std::nullopt;
            if (!scheme) throw ParseError("experiment.schemes: expected \"lmp\" or \"tlmp\"");
            c.experiment.schemes.push_back(*scheme);
        }
    }
    c.experiment.scenarios = field<std::size_t>(exp, "scenarios", "experiment", c.experiment.scenarios);
    c.experiment.seed = field<std::uint64_t>(exp, "seed", "experiment", c.experiment.seed);
    c.experiment.epsilon = field<double>(exp, "epsilon", "experiment", c.experiment.epsilon);
    c.experiment.participant = field<std::string>(exp, "participant", "experiment", "");
    c.experiment.horizons = field<std::vector<std::size_t>>(exp, "horizons", "experiment", {});
    const std::string scope = field<std::string>(exp, "audit_scope", "experiment", "esrs");
    if (scope != "esrs" && scope != "all") throw ParseError("experiment.audit_scope: expected \"esrs\" or \"all\"");
    c.experiment.audit_all_participants = scope == "all";

    auto violations = validate(c);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::vector<Violation> validate(const RunConfig& c) {
    std::vector<Violation> out = validate(c.market);
    const std::size_t T = c.market.config.horizon;
    if (c.market.generators.empty() && c.market.esrs.empty()) out.push_back({"generators", "market has no participants"});
    if (c.demand.mean.size() < T) {
        out.push_back({"demand.mean_profile", "needs at least " + std::to_string(T) + " values, got " + std::to_string(c.demand.mean.size())});
    }
    for (double m : c.demand.mean) {
        if (!std::isfinite(m) || m <= 0.0) {
            out.push_back({"demand.mean_profile", "mean demand must be positive"});
            break;
        }
    }
    if (c.demand.params.sigma_load < 0.0) out.push_back({"demand.sigma_load", "must be nonnegative"});
    if (c.demand.params.sigma_step < 0.0) out.push_back({"demand.sigma_step", "must be nonnegative"});
    if (c.demand.realized && c.demand.realized->size() < T) {
        out.push_back({"demand.realized", "needs at least " + std::to_string(T) + " values"});
    }
    if (c.demand.forecasts) {
        if (!c.demand.realized) out.push_back({"demand.forecasts", "requires demand.realized"});
        if (c.demand.forecasts->size() < T) out.push_back({"demand.forecasts", "needs one row per interval"});
        for (std::size_t t = 0; t < std::min(T, c.demand.forecasts->size()); ++t) {
            const std::size_t L = std::min(c.market.config.window, T - t);
            if ((*c.demand.forecasts)[t].size() < L) {
                out.push_back({"demand.forecasts[" + std::to_string(t) + "]", "needs " + std::to_string(L) + " values"});
            }
        }
    }
    if (c.experiment.scenarios < 1) out.push_back({"experiment.scenarios", "must be at least 1"});
    if (c.experiment.schemes.empty()) out.push_back({"experiment.schemes", "must name at least one scheme"});
    if (!std::isfinite(c.experiment.epsilon) || c.experiment.epsilon < 0.0) out.push_back({"experiment.epsilon", "must be nonnegative"});
    if (!c.experiment.participant.empty()) {
        const auto ps = participants(c.market);
        const bool known = std::any_of(ps.begin(), ps.end(), [&](ParticipantRef p) {
            return participant_name(c.market, p) == c.experiment.participant;
        });
        if (!known) out.push_back({"experiment.participant", "unknown participant " + c.experiment.participant});
    }
    for (std::size_t h : c.experiment.horizons) {
        if (h < 1 || h > T) out.push_back({"experiment.horizons", "each horizon must lie in [1, market.horizon]"});
    }
    return out;
}

std::string canonical_json(const RunConfig& config) { return to_json(config).dump(); }

std::string config_hash(const RunConfig& config) {
    const std::string text = canonical_json(config);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", digest[i]);
        hex += byte;
    }
    return hex;
}

RunConfig with_horizon(const RunConfig& config, std::size_t horizon) {
    RunConfig c = config;
    c.market.config.horizon = horizon;
    c.market.config.window = std::min(c.market.config.window, horizon);
    return c;
}

DemandScenario make_scenario(const RunConfig& config, std::size_t id) {
    const std::size_t T = config.market.config.horizon;
    const std::span<const double> mean(config.demand.mean.data(), T);
    DemandScenario s = realize(mean, config.demand.params, config.experiment.seed + id);
    if (config.demand.realized) s.realized.assign(config.demand.realized->begin(), config.demand.realized->begin() + static_cast<std::ptrdiff_t>(T));
    return s;
}

Forecaster make_scenario_forecaster(const RunConfig& config, const DemandScenario& scenario) {
    if (config.demand.forecasts) {
        return [table = *config.demand.forecasts](std::size_t t, std::size_t k) { return table.at(t).at(k); };
    }
    return make_forecaster(scenario);
}

ParticipantRef find_participant(const Market& market, const std::string& name) {
    for (ParticipantRef p : participants(market)) {
        if (name.empty() ? p.kind == ParticipantKind::Esr : participant_name(market, p) == name) return p;
    }
    throw ValidationError({{"experiment.participant", name.empty() ? "market has no ESR" : "unknown participant " + name}});
}

}  // namespace tlmp
