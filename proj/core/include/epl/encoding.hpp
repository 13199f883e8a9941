#pragma once

#include "epl/rng.hpp"
#include "epl/types.hpp"

#include <span>
#include <vector>

namespace epl {

/// Row-major time x sensors matrix of raw readings.
struct RawMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t r) const { return std::span<const double>(data).subspan(r * cols, cols); }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    friend bool operator==(const RawMatrix&, const RawMatrix&) = default;
};

struct SensorRange {
    double min = 0.0;
    double max = 1.0;
};

struct SensorCalibration {
    std::vector<SensorRange> sensors;
};

struct NoiseSpec {
    double p = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Widening applied to sensors whose calibration range is degenerate.
inline constexpr double kDegenerateRangeEpsilon = 1.0;

/// Per-sensor min/max over every row of every recording.
SensorCalibration calibrate(std::span<const RawMatrix> recordings);

/// 16-level discretization: floor((raw - min) / (max - min) * 16), clamped.
LevelVector discretize(std::span<const double> raw, const SensorCalibration& cal);

/// Zeroes the smallest half of the levels; ties go to the lower index first.
LevelVector sparsify(const LevelVector& levels);

/// Number of positions an occlusion at fraction p replaces (round half up).
std::size_t occlusion_count(double p, std::size_t columns);

/// Impulse noise: replaces occlusion_count(p) distinct positions with uniform
/// levels in [0, 15]. Returns the replaced positions through `replaced`.
LevelVector occlude(const LevelVector& levels, double p, Rng& rng, std::vector<std::size_t>* replaced = nullptr);
LevelVector occlude(const LevelVector& levels, const NoiseSpec& spec);

} // namespace epl
