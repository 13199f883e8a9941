#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace epl;

namespace {

RawMatrix matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
{
    return RawMatrix{rows, cols, std::move(data)};
}

} // namespace

TEST(Calibrate, DirectMinMax)
{
    const RawMatrix m = matrix(3, 2, {2, 5, 18, 5, 10, 5});
    const auto cal = calibrate(std::span<const RawMatrix>(&m, 1));
    ASSERT_EQ(cal.sensors.size(), 2u);
    EXPECT_DOUBLE_EQ(cal.sensors[0].min, 2.0);
    EXPECT_DOUBLE_EQ(cal.sensors[0].max, 18.0);
    // Constant column is widened.
    EXPECT_DOUBLE_EQ(cal.sensors[1].min, 5.0);
    EXPECT_DOUBLE_EQ(cal.sensors[1].max, 5.0 + kDegenerateRangeEpsilon);
}

TEST(Calibrate, TwoRecordingsMatchConcatenation)
{
    Rng rng(4);
    std::vector<RawMatrix> recs;
    for (int r = 0; r < 2; ++r) {
        RawMatrix m{7, 5, {}};
        for (int i = 0; i < 35; ++i)
            m.data.push_back(rng.uniform(-10, 10));
        recs.push_back(m);
    }
    const auto cal = calibrate(recs);
    for (std::size_t c = 0; c < 5; ++c) {
        double lo = 1e300, hi = -1e300;
        for (const auto& m : recs)
            for (std::size_t r = 0; r < m.rows; ++r) {
                lo = std::min(lo, m.at(r, c));
                hi = std::max(hi, m.at(r, c));
            }
        EXPECT_DOUBLE_EQ(cal.sensors[c].min, lo);
        EXPECT_DOUBLE_EQ(cal.sensors[c].max, hi);
    }
}

TEST(Calibrate, Errors)
{
    EXPECT_THROW(calibrate({}), InputError);
    std::vector<RawMatrix> recs{matrix(1, 2, {1, 2}), matrix(1, 3, {1, 2, 3})};
    EXPECT_THROW(calibrate(recs), InputError);
}

TEST(Discretize, Endpoints)
{
    SensorCalibration cal{{{0.0, 10.0}}};
    auto lv = [&](double v) { return discretize(std::vector<double>{v}, cal)[0]; };
    EXPECT_EQ(lv(0.0), 0);
    EXPECT_EQ(lv(10.0), 15);
    EXPECT_EQ(lv(5.0), 8);
    EXPECT_EQ(lv(-3.0), 0);
    EXPECT_EQ(lv(30.0), 15);
    // Oracle over a fine grid: floor(frac * 16) clamped to 15.
    for (int i = 0; i <= 1000; ++i) {
        const double v = i / 100.0;
        EXPECT_EQ(lv(v), std::min(15, static_cast<int>(std::floor(v / 10.0 * 16.0))));
    }
    EXPECT_THROW(discretize(std::vector<double>{1.0, 2.0}, cal), InputError);
}

TEST(Sparsify, DistinctValuesZeroBottomHalf)
{
    // 72 distinct-ish values are impossible with 16 levels; use 16 distinct.
    std::vector<int> v(16);
    for (int i = 0; i < 16; ++i)
        v[static_cast<std::size_t>(i)] = (i * 7) % 16;
    const auto s = sparsify(LevelVector(v));
    for (int i = 0; i < 16; ++i)
        EXPECT_EQ(s[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)] < 8 ? 0 : v[static_cast<std::size_t>(i)]);
}

TEST(Sparsify, AllEqualZeroesLowIndices)
{
    const auto s = sparsify(LevelVector(std::vector<int>(72, 9)));
    for (std::size_t i = 0; i < 72; ++i)
        EXPECT_EQ(s[i], i < 36 ? 0 : 9);
}

TEST(Sparsify, AllZeroUnchanged)
{
    EXPECT_EQ(sparsify(LevelVector(72)), LevelVector(72));
}

TEST(Sparsify, AgainstOracle)
{
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        const auto x = epl::test::random_levels(rng, 72, false);
        // Oracle: rank by (value, index); the first 36 ranks are zeroed.
        std::vector<std::pair<int, std::size_t>> order;
        for (std::size_t i = 0; i < 72; ++i)
            order.push_back({x[i], i});
        std::sort(order.begin(), order.end());
        std::set<std::size_t> zeroed;
        for (std::size_t r = 0; r < 36; ++r)
            zeroed.insert(order[r].second);
        const auto s = sparsify(x);
        for (std::size_t i = 0; i < 72; ++i)
            EXPECT_EQ(s[i], zeroed.count(i) ? 0 : x[i]);
        EXPECT_EQ(sparsify(s), s);
    }
}

TEST(Occlude, Counts)
{
    EXPECT_EQ(occlusion_count(0.0, 72), 0u);
    EXPECT_EQ(occlusion_count(1.0, 72), 72u);
    EXPECT_EQ(occlusion_count(0.6, 72), 43u);
    EXPECT_EQ(occlusion_count(0.5, 5), 3u);
    Rng rng(9);
    const auto x = epl::test::random_levels(rng, 72);
    std::vector<std::size_t> idx;
    Rng r1(1);
    const auto y = occlude(x, 0.6, r1, &idx);
    EXPECT_EQ(idx.size(), 43u);
    EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 43u);
    const std::set<std::size_t> chosen(idx.begin(), idx.end());
    for (std::size_t i = 0; i < 72; ++i)
        if (!chosen.count(i))
            EXPECT_EQ(y[i], x[i]);
    Rng r2(1);
    EXPECT_EQ(occlude(x, 0.0, r2), x);
    Rng r3(1);
    occlude(x, 1.0, r3, &idx);
    EXPECT_EQ(idx.size(), 72u);
}

TEST(Occlude, SeededAndValidated)
{
    Rng rng(9);
    const auto x = epl::test::random_levels(rng, 72);
    EXPECT_EQ(occlude(x, NoiseSpec{0.4, 77}), occlude(x, NoiseSpec{0.4, 77}));
    EXPECT_THROW(occlude(x, NoiseSpec{1.5, 1}), ConfigError);
    EXPECT_THROW(occlude(x, NoiseSpec{-0.1, 1}), ConfigError);
}

TEST(Occlude, ReplacementLevelsUniform)
{
    // Every replacement level in [0, 15] occurs; chi-square style sanity bound.
    const LevelVector x(72);
    std::vector<int> counts(16, 0);
    for (int t = 0; t < 2000; ++t) {
        Rng rng(static_cast<std::uint64_t>(t));
        const auto y = occlude(x, 1.0, rng);
        for (std::size_t i = 0; i < 72; ++i)
            ++counts[static_cast<std::size_t>(y[i])];
    }
    const double expected = 2000.0 * 72 / 16;
    for (int c : counts)
        EXPECT_NEAR(c, expected, expected * 0.05);
}
