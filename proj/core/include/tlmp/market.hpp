#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlmp {

/// Horizon and look-ahead. Intervals are one hour, so MW and MWh coincide.
struct MarketConfig {
    std::size_t horizon = 24;
    std::size_t window = 4;
    double interval_hours = 1.0;
};

struct GeneratorSpec {
    std::string name;
    double capacity_max = 0.0;   // MW
    double capacity_min = 0.1;   // MW
    double ramp_up = 0.0;        // MW per interval
    double ramp_down = 0.0;      // MW per interval
    double marginal_cost = 0.0;  // $/MWh, true cost
    double initial_output = 0.0; // MW, output in the interval before the horizon
};

/// Energy storage resource. Discharging costs `discharge_cost` per MWh;
/// `charge_cost` is what the ESR is willing to pay per MWh charged, so it
/// enters the dispatch objective with a negative sign.
struct EsrSpec {
    std::string name;
    double discharge_cap = 0.0;  // MW
    double charge_cap = 0.0;     // MW
    double soc_min = 0.0;        // MWh
    double soc_max = 0.0;        // MWh
    double soc_initial = 0.0;    // MWh
    double eff_discharge = 1.0;
    double eff_charge = 1.0;
    double discharge_cost = 0.0; // $/MWh, true cost
    double charge_cost = 0.0;    // $/MWh, true cost

    double round_trip_efficiency() const { return eff_discharge * eff_charge; }
};

struct Market {
    MarketConfig config;
    std::vector<GeneratorSpec> generators;
    std::vector<EsrSpec> esrs;
};

/// Linear bid-in cost curves, one marginal price per participant and interval.
struct BidParameter {
    std::vector<std::vector<double>> generator;  // [n][t]
    std::vector<std::vector<double>> discharge;  // [i][t]
    std::vector<std::vector<double>> charge;     // [i][t]

    bool empty() const { return generator.empty() && discharge.empty() && charge.empty(); }
};

enum class ParticipantKind { Generator, Esr };

struct ParticipantRef {
    ParticipantKind kind;
    std::size_t index;

    friend bool operator==(const ParticipantRef&, const ParticipantRef&) = default;
};

std::vector<ParticipantRef> participants(const Market& market);
const std::string& participant_name(const Market& market, ParticipantRef who);

struct Violation {
    std::string field;  // path into the market description, e.g. "esrs[0].charge_cost"
    std::string message;
};

/// Empty when every standing assumption holds.
std::vector<Violation> validate(const Market& market);

/// Checks bid dimensions against the market, finiteness, nonnegativity and
/// the charge/discharge relaxation inequality on the bids.
std::vector<Violation> validate(const BidParameter& bids, const Market& market);

class NegativeQuantity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Bid-in cost f(g | theta) = theta * g of a linear curve.
double bid_cost(double marginal_price, double quantity);

/// Bids equal to every participant's true marginal cost at every interval.
BidParameter truthful_bids(std::span<const GeneratorSpec> generators, std::span<const EsrSpec> esrs, std::size_t horizon);
BidParameter truthful_bids(const Market& market);

enum class BidSide { Generation, Discharge, Charge };

/// Copy of `bids` with `delta` added to one participant's curve at every interval.
BidParameter shift_bid(const BidParameter& bids, BidSide side, std::size_t index, double delta);

}  // namespace tlmp
