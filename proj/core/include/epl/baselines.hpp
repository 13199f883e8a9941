#pragma once

#include "epl/readout.hpp"

#include <span>
#include <string>
#include <vector>

namespace epl {

struct BaselineConfig {
    int mf_window = 5;
    double tv_lambda = 0.5;
    std::size_t pca_components = 5;

    void validate(std::size_t dims = kDefaultColumns) const;
};

/// Sliding median with indices clamped at the edges.
std::vector<double> median_filter(std::span<const double> v, int window);

/// Exact minimizer of 0.5 * ||u - v||^2 + lambda * sum |u[i+1] - u[i]|
/// (direct taut-string style algorithm, linear in practice).
std::vector<double> tv_denoise_1d(std::span<const double> v, double lambda);

/// Mean and top principal directions of a set of training vectors.
class PcaModel {
public:
    PcaModel(const std::vector<std::vector<double>>& train, std::size_t k);

    std::vector<double> denoise(std::span<const double> v) const;
    std::size_t components() const { return k_; }
    std::size_t dims() const { return mean_.size(); }

private:
    std::vector<double> mean_;
    std::vector<std::vector<double>> basis_; // k orthonormal directions
    std::size_t k_;
};

std::vector<double> pca_fit_denoise(const std::vector<std::vector<double>>& train, std::span<const double> test,
                                    std::size_t k);

enum class Method { epl, raw, mf, tvf, pca };

std::string to_string(Method m);
Method parse_method(std::string_view name);

struct BenchmarkTrial {
    Method method = Method::epl;
    std::string odor;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::string predicted; // "unknown" when unclassified
    bool correct = false;
};

struct BenchmarkReport {
    std::vector<Method> methods;
    std::vector<BenchmarkTrial> trials;

    double accuracy(Method m) const;
    std::size_t count(Method m) const;
};

struct BenchmarkSetup {
    std::vector<std::string> labels;
    std::vector<LevelVector> training; // clean, sparsified samples
    std::size_t trials_per_odor = 100;
    double p_min = 0.2;
    double p_max = 0.8;
    BaselineConfig baseline;
    double threshold = kDefaultClassifyThreshold;
};

/// Every method sees the same occluded vector per trial; all outputs go
/// through the shared Manhattan nearest-neighbour classifier. `net` must
/// already be trained on `setup.training`.
BenchmarkReport run_benchmark(Network& net, const std::vector<Method>& methods, const BenchmarkSetup& setup,
                              std::uint64_t seed);

/// Comma-separated rows: method,odor,P,seed,predicted,correct.
std::string benchmark_csv(const BenchmarkReport& report);

} // namespace epl
