#include "epl/encoding.hpp"

#include "epl/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epl {

void NoiseSpec::validate() const
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError("noise fraction P must lie in [0, 1]");
}

SensorCalibration calibrate(std::span<const RawMatrix> recordings)
{
    if (recordings.empty())
        throw InputError("calibration needs at least one recording");
    const std::size_t cols = recordings.front().cols;
    SensorCalibration cal;
    cal.sensors.assign(cols, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    std::size_t rows = 0;
    for (const auto& rec : recordings) {
        if (rec.cols != cols)
            throw InputError("recordings disagree on sensor count");
        rows += rec.rows;
        for (std::size_t r = 0; r < rec.rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double v = rec.at(r, c);
                cal.sensors[c].min = std::min(cal.sensors[c].min, v);
                cal.sensors[c].max = std::max(cal.sensors[c].max, v);
            }
        }
    }
    if (rows == 0)
        throw InputError("calibration recordings contain no samples");
    for (auto& s : cal.sensors)
        if (!(s.max > s.min))
            s.max = s.min + kDegenerateRangeEpsilon;
    return cal;
}

LevelVector discretize(std::span<const double> raw, const SensorCalibration& cal)
{
    if (raw.size() != cal.sensors.size())
        throw InputError("sample has " + std::to_string(raw.size()) + " sensors, calibration has " +
                         std::to_string(cal.sensors.size()));
    std::vector<int> levels(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& s = cal.sensors[i];
        const double x = std::floor((raw[i] - s.min) / (s.max - s.min) * kNumLevels);
        levels[i] = static_cast<int>(std::clamp(x, 0.0, static_cast<double>(kNumLevels - 1)));
    }
    return LevelVector(std::move(levels));
}

LevelVector sparsify(const LevelVector& levels)
{
    const std::size_t n = levels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
    LevelVector out = levels;
    for (std::size_t k = 0; k < n / 2; ++k)
        out.set(order[k], 0);
    return out;
}

std::size_t occlusion_count(double p, std::size_t columns)
{
    return static_cast<std::size_t>(std::floor(p * static_cast<double>(columns) + 0.5));
}

LevelVector occlude(const LevelVector& levels, double p, Rng& rng, std::vector<std::size_t>* replaced)
{
    NoiseSpec{p, 0}.validate();
    const std::size_t n = levels.size();
    const std::size_t k = std::min(occlusion_count(p, n), n);
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
        std::swap(idx[i], idx[j]);
    }
    LevelVector out = levels;
    for (std::size_t i = 0; i < k; ++i)
        out.set(idx[i], static_cast<int>(rng.uniform_int(0, kNumLevels - 1)));
    if (replaced) {
        replaced->assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(replaced->begin(), replaced->end());
    }
    return out;
}

LevelVector occlude(const LevelVector& levels, const NoiseSpec& spec)
{
    spec.validate();
    Rng rng(spec.rng_seed);
    return occlude(levels, spec.p, rng);
}

} // namespace epl
