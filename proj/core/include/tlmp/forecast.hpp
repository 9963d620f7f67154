#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tlmp {

class IndexOutOfHorizon : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Noise magnitudes. Both are fractions of the interval's mean demand unless
/// `absolute` is set, in which case they are in MW.
struct ForecastParams {
    double sigma_load = 0.04;
    double sigma_step = 0.006;
    bool absolute = false;
};

struct DemandScenario {
    std::vector<double> mean;      // MW
    std::vector<double> realized;  // MW, d_t
    std::uint64_t seed = 0;
    ForecastParams params;

    std::size_t horizon() const { return realized.size(); }
};

/// Fraction of the mean below which realized demand is clamped.
inline constexpr double kDemandFloor = 0.01;

/// d_t = mean_t * (1 + nu_t), nu_t ~ N(0, sigma_load^2) i.i.d., clamped at 1% of the mean.
DemandScenario realize(std::span<const double> mean, const ForecastParams& params, std::uint64_t seed);

/// d_hat_{(t+k)|t} = d_{t+k} + s_{t+k} * (z_1 + ... + z_k), with z_i i.i.d. N(0,1)
/// drawn from a substream keyed on (seed, t). So forecasts issued at the same t
/// share their first increments, and k = 0 is exact. Intervals are 0-based.
double forecast(const DemandScenario& scenario, std::size_t t, std::size_t k, double sigma_step, std::uint64_t seed);

/// Every k in [0, len) at once; same values as calling forecast() per k.
std::vector<double> forecast_window(const DemandScenario& scenario, std::size_t t, std::size_t len, double sigma_step,
                                    std::uint64_t seed);

/// Source of d_hat_{(t+k)|t} for k >= 1; the dispatch always uses d_t itself for k = 0.
using Forecaster = std::function<double(std::size_t t, std::size_t k)>;

/// Random-walk forecaster of a scenario using its own seed and sigma_step.
Forecaster make_forecaster(const DemandScenario& scenario);

/// d_hat_{(t+k)|t} = d_{t+k}.
Forecaster perfect_forecaster(std::vector<double> demand);

/// Deterministic 64-bit mixing used to derive independent substreams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace tlmp
