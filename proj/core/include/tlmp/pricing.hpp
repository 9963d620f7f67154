#pragma once

#include "tlmp/dispatch.hpp"
#include "tlmp/market.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace tlmp {

enum class Scheme { RLmp, RTlmp };

std::string to_string(Scheme scheme);

/// Binding-interval prices over the horizon. Participant matrices are [participant x T].
struct PriceSeries {
    Scheme scheme = Scheme::RLmp;
    Eigen::VectorXd demand;      // pi_t paid by load
    Eigen::MatrixXd generator;   // pi^G
    Eigen::MatrixXd discharge;   // pi^D
    Eigen::MatrixXd charge;      // pi^C
    Eigen::VectorXd lambda;      // energy component
    Eigen::MatrixXd phi;         // SOC price per ESR
    Eigen::MatrixXd ramp_delta;  // ramping price per generator
    std::vector<bool> degenerate;  // per interval: the binding window was degenerate

    std::size_t horizon() const { return static_cast<std::size_t>(demand.size()); }
    bool any_degenerate() const;
};

/// pi_t = lambda of the binding interval, paid to and by everyone.
PriceSeries extract_rlmp(const RollingDispatch& rolling);

/// pi^D = lambda - phi / xi^D, pi^C = lambda - xi^C phi, pi^G = lambda + Delta with
/// Delta = (mu_up - mu_down) of the transition out of the binding interval minus
/// the same of the transition into it. Demand pays lambda.
PriceSeries extract_rtlmp(const RollingDispatch& rolling, const Market& market);

PriceSeries extract_prices(Scheme scheme, const RollingDispatch& rolling, const Market& market);

/// One participant-interval where the binding dispatch is not a single-interval
/// best response to the participant's own price.
struct DecouplingViolation {
    ParticipantRef who;
    BidSide side;
    std::size_t interval;
    double price;
    double bid;
    double dispatched;
    double best_response_gap;  // MW between dispatch and the nearest best response
};

/// Best response of max (price - bid) * g over [lower, upper]: upper when the
/// margin is positive, lower when negative, anything when |margin| <= price_tol.
/// Returns the distance from `dispatched` to the best-response set.
double best_response_gap(double price, double bid, double lower, double upper, double dispatched, double price_tol);

std::vector<DecouplingViolation> check_decoupling(const RollingDispatch& rolling, const PriceSeries& prices,
                                                  const Market& market, const BidParameter& bids, double mw_tol = 1e-6,
                                                  double price_tol = 1e-7);

}  // namespace tlmp
