#include "tlmp/pricing.hpp"

#include <algorithm>
#include <cmath>

namespace tlmp {

std::string to_string(Scheme scheme) { return scheme == Scheme::RLmp ? "lmp" : "tlmp"; }

bool PriceSeries::any_degenerate() const { return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end(); }

namespace {

PriceSeries base_series(const RollingDispatch& r, Scheme scheme) {
    const auto T = static_cast<Eigen::Index>(r.horizon());
    const auto N = r.generation.rows();
    const auto M = r.discharge.rows();
    PriceSeries p;
    p.scheme = scheme;
    p.lambda.resize(T);
    p.phi.resize(M, T);
    p.ramp_delta.resize(N, T);
    p.degenerate.resize(r.horizon());
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto& w = r.windows[static_cast<std::size_t>(t)];
        p.lambda[t] = w.lambda[0];
        p.phi.col(t) = w.phi.col(0);
        for (Eigen::Index n = 0; n < N; ++n) {
            const double into = w.mu_up(n, 0) - w.mu_down(n, 0);
            const double out_of = w.length > 1 ? w.mu_up(n, 1) - w.mu_down(n, 1) : 0.0;
            p.ramp_delta(n, t) = out_of - into;
        }
        p.degenerate[static_cast<std::size_t>(t)] = w.degenerate;
    }
    p.demand = p.lambda;
    return p;
}

}  // namespace

PriceSeries extract_rlmp(const RollingDispatch& rolling) {
    PriceSeries p = base_series(rolling, Scheme::RLmp);
    p.generator = p.lambda.transpose().replicate(rolling.generation.rows(), 1);
    p.discharge = p.lambda.transpose().replicate(rolling.discharge.rows(), 1);
    p.charge = p.discharge;
    return p;
}

PriceSeries extract_rtlmp(const RollingDispatch& rolling, const Market& market) {
    PriceSeries p = base_series(rolling, Scheme::RTlmp);
    const auto T = p.lambda.size();
    const auto N = rolling.generation.rows();
    const auto M = rolling.discharge.rows();
    p.generator.resize(N, T);
    p.discharge.resize(M, T);
    p.charge.resize(M, T);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index n = 0; n < N; ++n) p.generator(n, t) = p.lambda[t] + p.ramp_delta(n, t);
        for (Eigen::Index i = 0; i < M; ++i) {
            const auto& e = market.esrs[static_cast<std::size_t>(i)];
            p.discharge(i, t) = p.lambda[t] - p.phi(i, t) / e.eff_discharge;
            p.charge(i, t) = p.lambda[t] - e.eff_charge * p.phi(i, t);
        }
    }
    return p;
}

PriceSeries extract_prices(Scheme scheme, const RollingDispatch& rolling, const Market& market) {
    return scheme == Scheme::RLmp ? extract_rlmp(rolling) : extract_rtlmp(rolling, market);
}

double best_response_gap(double price, double bid, double lower, double upper, double dispatched, double price_tol) {
    const double margin = price - bid;
    if (margin > price_tol) return std::abs(upper - dispatched);
    if (margin < -price_tol) return std::abs(dispatched - lower);
    return std::max({0.0, lower - dispatched, dispatched - upper});
}

std::vector<DecouplingViolation> check_decoupling(const RollingDispatch& rolling, const PriceSeries& prices,
                                                  const Market& market, const BidParameter& bids, double mw_tol,
                                                  double price_tol) {
    std::vector<DecouplingViolation> out;
    for (std::size_t t = 0; t < rolling.horizon(); ++t) {
        const auto tt = static_cast<Eigen::Index>(t);
        for (std::size_t n = 0; n < market.generators.size(); ++n) {
            const auto& g = market.generators[n];
            const auto nn = static_cast<Eigen::Index>(n);
            const double price = prices.generator(nn, tt), bid = bids.generator[n][t], x = rolling.generation(nn, tt);
            const double gap = best_response_gap(price, bid, g.capacity_min, g.capacity_max, x, price_tol);
            if (gap > mw_tol) out.push_back({{ParticipantKind::Generator, n}, BidSide::Generation, t, price, bid, x, gap});
        }
        for (std::size_t i = 0; i < market.esrs.size(); ++i) {
            const auto& e = market.esrs[i];
            const auto ii = static_cast<Eigen::Index>(i);
            const double pd = prices.discharge(ii, tt), bd = bids.discharge[i][t], xd = rolling.discharge(ii, tt);
            const double gd = best_response_gap(pd, bd, 0.0, e.discharge_cap, xd, price_tol);
            if (gd > mw_tol) out.push_back({{ParticipantKind::Esr, i}, BidSide::Discharge, t, pd, bd, xd, gd});
            // Charging earns the bid and pays the price.
            const double pc = prices.charge(ii, tt), bc = bids.charge[i][t], xc = rolling.charge(ii, tt);
            const double gc = best_response_gap(bc, pc, 0.0, e.charge_cap, xc, price_tol);
            if (gc > mw_tol) out.push_back({{ParticipantKind::Esr, i}, BidSide::Charge, t, pc, bc, xc, gc});
        }
    }
    return out;
}

}  // namespace tlmp
