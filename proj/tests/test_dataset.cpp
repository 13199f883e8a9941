#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <set>

using namespace epl;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("epl_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

TrialRecording ramp_trial(double seconds, double rate, std::size_t cols = 72)
{
    TrialRecording t;
    t.odor_label = "ramp";
    t.sample_rate = rate;
    t.samples.cols = cols;
    t.samples.rows = static_cast<std::size_t>(seconds * rate);
    for (std::size_t r = 0; r < t.samples.rows; ++r) {
        t.times.push_back(static_cast<double>(r) / rate);
        for (std::size_t c = 0; c < cols; ++c)
            t.samples.data.push_back(static_cast<double>(r) + 0.001 * static_cast<double>(c));
    }
    return t;
}

} // namespace

TEST(Trial, CanonicalRoundTrip)
{
    const auto dir = temp_dir("roundtrip");
    auto t = ramp_trial(180, 100);
    t.metadata = {"L3", 0.34, 5.5};
    write_trial(t, dir / "t.txt");
    const auto back = load_trial(dir / "t.txt");
    EXPECT_EQ(back.samples.rows, 18000u);
    EXPECT_EQ(back.samples, t.samples);
    EXPECT_EQ(back.odor_label, "ramp");
    EXPECT_DOUBLE_EQ(back.sample_rate, 100.0);
    EXPECT_EQ(back.metadata.location, "L3");
    EXPECT_DOUBLE_EQ(back.metadata.wind_speed, 0.34);
    EXPECT_DOUBLE_EQ(back.duration(), 180.0);
}

TEST(Trial, DelimitedTableWithTimeAndSkips)
{
    const auto dir = temp_dir("table");
    std::ofstream f(dir / "t.csv");
    // time(ms), temp, sensors...
    for (int r = 0; r < 5; ++r) {
        f << r * 10 << ",25.0";
        for (int c = 0; c < 3; ++c)
            f << "," << r * 100 + c;
        f << "\n";
    }
    f.close();
    TrialFormat fmt;
    fmt.time_column = 0;
    fmt.skip_columns = {1};
    fmt.time_scale = 0.001;
    fmt.sensor_order = {2, 0, 1};
    const auto t = load_trial(dir / "t.csv", 3, fmt);
    EXPECT_EQ(t.samples.rows, 5u);
    EXPECT_DOUBLE_EQ(t.samples.at(1, 0), 102);
    EXPECT_DOUBLE_EQ(t.samples.at(1, 1), 100);
    EXPECT_DOUBLE_EQ(t.times[4], 0.04);
    EXPECT_NEAR(t.sample_rate, 100.0, 1e-9);
}

TEST(Trial, Errors)
{
    const auto dir = temp_dir("errors");
    { std::ofstream(dir / "empty.txt"); }
    EXPECT_THROW(load_trial(dir / "empty.txt"), ParseError);
    {
        std::ofstream f(dir / "sixty.txt");
        for (int c = 0; c < 61; ++c)
            f << (c ? "\t" : "") << c;
        f << "\n";
    }
    TrialFormat fmt; // time column 0 leaves 60 sensors
    EXPECT_THROW(load_trial(dir / "sixty.txt", 72, fmt), FormatError);
    {
        std::ofstream f(dir / "bad.txt");
        f << "0\t1\t2\n1\tx\t3\n";
    }
    try {
        load_trial(dir / "bad.txt", 2, fmt);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(load_trial(dir / "missing.txt"), IoError);
}

TEST(Manifest, LoadsRelativePaths)
{
    const auto dir = temp_dir("manifest");
    auto t = ramp_trial(180, 10, 4);
    write_trial(t, dir / "a.txt");
    t.odor_label = "other";
    write_trial(t, dir / "b.txt");
    {
        std::ofstream f(dir / "m.json");
        f << R"({"odors": [{"label": "A", "path": "a.txt", "location": "L1", "wind_speed": 0.1},
                           {"label": "B", "path": "b.txt", "sample_rate": 10}]})";
    }
    const auto m = load_manifest(dir / "m.json");
    ASSERT_EQ(m.odors.size(), 2u);
    EXPECT_EQ(m.odors[0].path, dir / "a.txt");
    const auto ds = load_dataset(m, 4);
    EXPECT_EQ(ds[0].odor_label, "A");
    EXPECT_EQ(ds[1].odor_label, "B");
    EXPECT_EQ(ds[0].metadata.location, "L1");

    { std::ofstream(dir / "bad.json") << "{\"odors\": 3}"; }
    EXPECT_THROW(load_manifest(dir / "bad.json"), FormatError);
    EXPECT_THROW(load_manifest(dir / "none.json"), IoError);
}

TEST(Extract, NearestRow)
{
    const auto t = ramp_trial(180, 100);
    EXPECT_DOUBLE_EQ(extract_sample(t, 90.0)[0], 9000.0);
    EXPECT_DOUBLE_EQ(extract_sample(t, 0.0)[0], 0.0);
    EXPECT_DOUBLE_EQ(extract_sample(t, 0.004)[0], 0.0);
    EXPECT_DOUBLE_EQ(extract_sample(t, 0.005)[0], 0.0); // tie -> earlier row
    EXPECT_DOUBLE_EQ(extract_sample(t, 0.006)[0], 1.0);
    EXPECT_THROW(extract_sample(t, 181.0), InputError);
    EXPECT_THROW(extract_sample(t, -1.0), InputError);
}

TEST(Extract, PlumeGrid)
{
    const auto t = ramp_trial(180, 100);
    const auto s = training_and_test_samples(t);
    ASSERT_EQ(s.tests.size(), 30u);
    EXPECT_DOUBLE_EQ(s.tests[0][0], 3000.0);
    EXPECT_EQ(s.tests[12], s.train);
    EXPECT_DOUBLE_EQ(s.tests[29][0], 17500.0);
    EXPECT_THROW(training_and_test_samples(ramp_trial(100, 100)), InputError);
}

TEST(Synthetic, DeterministicAndLabelled)
{
    SyntheticSpec spec;
    spec.rng_seed = 5;
    const auto a = synthesize_dataset(spec);
    const auto b = synthesize_dataset(spec);
    ASSERT_EQ(a.size(), 10u);
    std::set<std::string> labels;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].samples, b[i].samples);
        labels.insert(a[i].odor_label);
        EXPECT_GE(a[i].duration(), 180.0);
    }
    EXPECT_EQ(labels.size(), 10u);
    spec.rng_seed = 6;
    EXPECT_NE(synthesize_dataset(spec)[0].samples, a[0].samples);
}

TEST(Synthetic, OverlapBound)
{
    const auto& ds = epl::test::synthetic_dataset();
    for (std::size_t i = 0; i < ds.training.size(); ++i)
        for (std::size_t j = i + 1; j < ds.training.size(); ++j)
            EXPECT_LT(active_overlap(ds.training[i], ds.training[j]), 0.6);
}

TEST(Synthetic, LearnedPatternsSeparable)
{
    // Clean learned patterns of distinct odors stay below the classification threshold.
    const auto& ds = epl::test::synthetic_dataset();
    const auto tn = train_sequence(epl::test::net_config(3), GammaConfig{}, PlasticityConfig{}, ds.labels, ds.training, 3);
    for (std::size_t i = 0; i < tn.library.size(); ++i)
        for (std::size_t j = i + 1; j < tn.library.size(); ++j)
            EXPECT_LT(jaccard_similarity(tn.library[i].learned_pattern, tn.library[j].learned_pattern), 0.75);
}

TEST(Synthetic, Validation)
{
    SyntheticSpec s;
    s.duration = 100;
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Encoded, HalfSparse)
{
    const auto& ds = epl::test::synthetic_dataset();
    for (const auto& v : ds.training)
        EXPECT_LE(v.count_nonzero(), 36u);
    for (const auto& grid : ds.tests)
        EXPECT_EQ(grid.size(), 30u);
}
