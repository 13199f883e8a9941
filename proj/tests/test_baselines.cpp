#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace epl;

namespace {

double tv_objective(const std::vector<double>& u, const std::vector<double>& v, double lambda)
{
    double f = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        f += 0.5 * (u[i] - v[i]) * (u[i] - v[i]);
    for (std::size_t i = 1; i < u.size(); ++i)
        f += lambda * std::abs(u[i] - u[i - 1]);
    return f;
}

} // namespace

TEST(MedianFilter, Basics)
{
    const std::vector<double> c(7, 3.0);
    EXPECT_EQ(median_filter(c, 5), c);
    EXPECT_EQ(median_filter(std::vector<double>{0, 0, 9, 0, 0}, 5)[2], 0.0);
    const std::vector<double> r{4, 1, 7, 2};
    EXPECT_EQ(median_filter(r, 1), r);
    // Edge clamping: window 3 at index 0 sees {4, 4, 1}.
    EXPECT_EQ(median_filter(r, 3), (std::vector<double>{4, 4, 2, 2}));
    EXPECT_THROW(median_filter(r, 4), ConfigError);
}

TEST(TvDenoise, TrivialCases)
{
    const std::vector<double> v{3, -1, 4, 1, 5};
    EXPECT_EQ(tv_denoise_1d(v, 0.0), v);
    const std::vector<double> c(6, 2.5);
    for (double l : {0.1, 1.0, 100.0})
        for (double x : tv_denoise_1d(c, l))
            EXPECT_NEAR(x, 2.5, 1e-12);
    EXPECT_TRUE(tv_denoise_1d(std::vector<double>{}, 1.0).empty());
    EXPECT_EQ(tv_denoise_1d(std::vector<double>{7}, 1.0), (std::vector<double>{7}));
    // Large lambda collapses to the mean.
    for (double x : tv_denoise_1d(v, 1e6))
        EXPECT_NEAR(x, 12.0 / 5.0, 1e-9);
    EXPECT_THROW(tv_denoise_1d(v, -1.0), ConfigError);
}

TEST(TvDenoise, FrozenValues)
{
    // Two-point case in closed form: the gap shrinks by 2 lambda.
    const auto u = tv_denoise_1d(std::vector<double>{0, 4}, 0.5);
    EXPECT_NEAR(u[0], 0.5, 1e-12);
    EXPECT_NEAR(u[1], 3.5, 1e-12);
    // Single spike of height 3 at the centre of 5, lambda 0.5: spike lowered by 2*lambda, neighbours raised by lambda/2 each.
    const auto s = tv_denoise_1d(std::vector<double>{0, 0, 3, 0, 0}, 0.5);
    const std::vector<double> expect{0.25, 0.25, 2.0, 0.25, 0.25};
    for (std::size_t i = 0; i < 5; ++i)
        EXPECT_NEAR(s[i], expect[i], 1e-12);
}

TEST(TvDenoise, MatchesDualOracle)
{
    Rng rng(17);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 12));
        std::vector<double> v(n);
        for (auto& x : v)
            x = rng.uniform(-5, 5);
        const double lambda = rng.uniform(0.0, 3.0);
        const auto got = tv_denoise_1d(v, lambda);
        const auto want = epl::test::tv_dual_oracle(v, lambda);
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(got[i], want[i], 1e-6) << "case " << k;
        EXPECT_LE(tv_objective(got, v, lambda), tv_objective(want, v, lambda) + 1e-9);
    }
}

TEST(Pca, FullRankReconstructsTrainingRows)
{
    Rng rng(3);
    std::vector<std::vector<double>> train(4, std::vector<double>(6));
    for (auto& r : train)
        for (auto& x : r)
            x = rng.uniform(0, 1);
    // Centered rank is rows - 1 = 3.
    const PcaModel m(train, 3);
    for (const auto& r : train) {
        const auto rec = m.denoise(r);
        for (std::size_t i = 0; i < r.size(); ++i)
            EXPECT_NEAR(rec[i], r[i], 1e-9);
    }
}

TEST(Pca, DominantDirectionTwoD)
{
    // Points (+-3, 0) and (0, +-1): covariance diag(4.5, 0.5); first component is the x axis.
    const std::vector<std::vector<double>> train{{3, 0}, {-3, 0}, {0, 1}, {0, -1}};
    const auto rec = pca_fit_denoise(train, std::vector<double>{2, 5}, 1);
    EXPECT_NEAR(rec[0], 2.0, 1e-9);
    EXPECT_NEAR(rec[1], 0.0, 1e-9);
}

TEST(Pca, ZeroVarianceGivesMean)
{
    const std::vector<std::vector<double>> train(3, std::vector<double>{1, 2, 3});
    const auto rec = pca_fit_denoise(train, std::vector<double>{9, 9, 9}, 2);
    EXPECT_EQ(rec, (std::vector<double>{1, 2, 3}));
}

TEST(Pca, Errors)
{
    const std::vector<std::vector<double>> train{{1, 2}, {3, 4}};
    EXPECT_THROW(PcaModel(train, 3), ConfigError);
    EXPECT_THROW(PcaModel({}, 1), InputError);
    EXPECT_THROW(PcaModel(train, 1).denoise(std::vector<double>{1}), InputError);
}

TEST(Baselines, ConfigAndMethods)
{
    BaselineConfig b;
    EXPECT_NO_THROW(b.validate());
    b.mf_window = 4;
    EXPECT_THROW(b.validate(), ConfigError);
    for (auto m : {Method::epl, Method::raw, Method::mf, Method::tvf, Method::pca})
        EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_THROW(parse_method("svm"), UsageError);
}

TEST(Benchmark, NoNoiseIsPerfectAndCountsTrials)
{
    const auto& ds = epl::test::synthetic_dataset();
    auto tn = train_sequence(epl::test::net_config(4), GammaConfig{}, PlasticityConfig{}, ds.labels, ds.training, 4);
    BenchmarkSetup setup;
    setup.labels = ds.labels;
    setup.training = ds.training;
    setup.trials_per_odor = 3;
    setup.p_min = setup.p_max = 0.0;
    const std::vector<Method> methods{Method::epl, Method::raw, Method::mf, Method::tvf, Method::pca};
    const auto rep = run_benchmark(tn.net, methods, setup, 1);
    for (auto m : methods) {
        EXPECT_EQ(rep.count(m), 30u);
        EXPECT_DOUBLE_EQ(rep.accuracy(m), 1.0) << to_string(m);
    }
    const auto csv = benchmark_csv(rep);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,odor,P,seed,predicted,correct");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 151u);
}
