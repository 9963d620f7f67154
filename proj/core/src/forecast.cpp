#include "tlmp/forecast.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace tlmp {

namespace {

constexpr std::uint64_t kRealizationStream = 0x7265616cULL;
constexpr std::uint64_t kForecastStream = 0x66636173ULL;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double step_scale(const DemandScenario& s, std::size_t t, double sigma) {
    return s.params.absolute ? sigma : sigma * s.mean[t];
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

DemandScenario realize(std::span<const double> mean, const ForecastParams& params, std::uint64_t seed) {
    DemandScenario s;
    s.mean.assign(mean.begin(), mean.end());
    s.seed = seed;
    s.params = params;
    s.realized.resize(mean.size());

    std::mt19937_64 rng(mix_seed(seed, kRealizationStream, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t t = 0; t < mean.size(); ++t) {
        const double z = normal(rng);
        const double noise = params.absolute ? params.sigma_load * z : params.sigma_load * z * mean[t];
        s.realized[t] = std::max(mean[t] + noise, kDemandFloor * mean[t]);
    }
    return s;
}

std::vector<double> forecast_window(const DemandScenario& scenario, std::size_t t, std::size_t len, double sigma_step,
                                    std::uint64_t seed) {
    const std::size_t T = scenario.horizon();
    if (t >= T || (len > 0 && t + len - 1 >= T)) {
        throw IndexOutOfHorizon("forecast: interval " + std::to_string(t + len) + " beyond horizon " + std::to_string(T));
    }
    std::vector<double> out(len);
    if (len == 0) return out;
    out[0] = scenario.realized[t];
    if (len == 1 || sigma_step == 0.0) {
        for (std::size_t k = 1; k < len; ++k) out[k] = scenario.realized[t + k];
        return out;
    }
    std::mt19937_64 rng(mix_seed(seed, kForecastStream, t));
    std::normal_distribution<double> normal(0.0, 1.0);
    double walk = 0.0;
    for (std::size_t k = 1; k < len; ++k) {
        walk += normal(rng);
        out[k] = scenario.realized[t + k] + step_scale(scenario, t + k, sigma_step) * walk;
    }
    return out;
}

double forecast(const DemandScenario& scenario, std::size_t t, std::size_t k, double sigma_step, std::uint64_t seed) {
    return forecast_window(scenario, t, k + 1, sigma_step, seed).back();
}

Forecaster make_forecaster(const DemandScenario& scenario) {
    return [scenario](std::size_t t, std::size_t k) {
        return forecast(scenario, t, k, scenario.params.sigma_step, scenario.seed);
    };
}

Forecaster perfect_forecaster(std::vector<double> demand) {
    return [demand = std::move(demand)](std::size_t t, std::size_t k) { return demand.at(t + k); };
}

}  // namespace tlmp
