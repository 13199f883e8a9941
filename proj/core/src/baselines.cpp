#include "epl/baselines.hpp"

#include "epl/encoding.hpp"
#include "epl/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace epl {

void BaselineConfig::validate(std::size_t dims) const
{
    if (mf_window < 1 || mf_window % 2 == 0)
        throw ConfigError("median filter window must be odd and >= 1");
    if (!(tv_lambda >= 0.0))
        throw ConfigError("tv_lambda must be >= 0");
    if (pca_components < 1 || pca_components > dims)
        throw ConfigError("pca_components must lie in [1, " + std::to_string(dims) + "]");
}

std::vector<double> median_filter(std::span<const double> v, int window)
{
    if (window < 1 || window % 2 == 0)
        throw ConfigError("median filter window must be odd and >= 1");
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    const std::ptrdiff_t half = window / 2;
    std::vector<double> out(v.size());
    std::vector<double> buf(static_cast<std::size_t>(window));
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::ptrdiff_t k = -half; k <= half; ++k)
            buf[static_cast<std::size_t>(k + half)] = v[static_cast<std::size_t>(std::clamp(i + k, std::ptrdiff_t{0}, n - 1))];
        auto mid = buf.begin() + half;
        std::nth_element(buf.begin(), mid, buf.end());
        out[static_cast<std::size_t>(i)] = *mid;
    }
    return out;
}

// Condat's direct algorithm. Segments are grown left to right while tracking
// the range [vmin, vmax] of feasible levels for the current segment and the
// dual slack (umin, umax); when the range becomes empty, the segment up to
// the last breakpoint is emitted and the scan restarts there.
std::vector<double> tv_denoise_1d(std::span<const double> y, double lambda)
{
    if (!(lambda >= 0.0))
        throw ConfigError("tv_lambda must be >= 0");
    const std::size_t n = y.size();
    std::vector<double> x(n);
    if (n == 0)
        return x;

    std::size_t k = 0, k0 = 0, kplus = 0, kminus = 0;
    double umin = lambda, umax = -lambda;
    double vmin = y[0] - lambda, vmax = y[0] + lambda;

    for (;;) {
        while (k == n - 1) {
            if (umin < 0.0) {
                do x[k0++] = vmin; while (k0 <= kminus);
                k = kminus = k0;
                vmin = y[k];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if (umax > 0.0) {
                do x[k0++] = vmax; while (k0 <= kplus);
                k = kplus = k0;
                vmax = y[k];
                umax = -lambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / static_cast<double>(k - k0 + 1);
                do x[k0++] = vmin; while (k0 <= k);
                return x;
            }
        }
        umin += y[k + 1] - vmin;
        if (umin < -lambda) {
            do x[k0++] = vmin; while (k0 <= kminus);
            k = kminus = kplus = k0;
            vmin = y[k];
            vmax = vmin + 2.0 * lambda;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        umax += y[k + 1] - vmax;
        if (umax > lambda) {
            do x[k0++] = vmax; while (k0 <= kplus);
            k = kminus = kplus = k0;
            vmax = y[k];
            vmin = vmax - 2.0 * lambda;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        ++k;
        if (umin >= lambda) {
            kminus = k;
            vmin += (umin - lambda) / static_cast<double>(kminus - k0 + 1);
            umin = lambda;
        }
        if (umax <= -lambda) {
            kplus = k;
            vmax += (umax + lambda) / static_cast<double>(kplus - k0 + 1);
            umax = -lambda;
        }
    }
}

PcaModel::PcaModel(const std::vector<std::vector<double>>& train, std::size_t k) : k_(k)
{
    if (train.empty())
        throw InputError("PCA needs at least one training vector");
    const std::size_t d = train.front().size();
    if (k < 1 || k > std::min(d, train.size()))
        throw ConfigError("PCA component count " + std::to_string(k) + " exceeds min(dims, rows)");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < train.size(); ++r) {
        if (train[r].size() != d)
            throw InputError("PCA training vectors differ in length");
        for (std::size_t c = 0; c < d; ++c)
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = train[r][c];
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    mean_.assign(mean.data(), mean.data() + d);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = sv.size() > 0 ? std::max(1e-12, sv(0) * 1e-10) : 0.0;
    for (Eigen::Index i = 0; i < sv.size() && basis_.size() < k; ++i) {
        if (sv(i) <= tol)
            break; // directions without variance carry no signal
        const Eigen::VectorXd dir = svd.matrixV().col(i);
        basis_.emplace_back(dir.data(), dir.data() + d);
    }
}

std::vector<double> PcaModel::denoise(std::span<const double> v) const
{
    if (v.size() != mean_.size())
        throw InputError("PCA input has the wrong dimension");
    std::vector<double> out = mean_;
    for (const auto& b : basis_) {
        double coef = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            coef += (v[i] - mean_[i]) * b[i];
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] += coef * b[i];
    }
    return out;
}

std::vector<double> pca_fit_denoise(const std::vector<std::vector<double>>& train, std::span<const double> test,
                                    std::size_t k)
{
    return PcaModel(train, k).denoise(test);
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::epl: return "epl";
    case Method::raw: return "raw";
    case Method::mf: return "mf";
    case Method::tvf: return "tvf";
    case Method::pca: return "pca";
    }
    return "?";
}

Method parse_method(std::string_view name)
{
    for (auto m : {Method::epl, Method::raw, Method::mf, Method::tvf, Method::pca})
        if (to_string(m) == name)
            return m;
    throw UsageError("unknown method '" + std::string(name) + "'");
}

double BenchmarkReport::accuracy(Method m) const
{
    std::size_t n = 0, ok = 0;
    for (const auto& t : trials) {
        if (t.method != m)
            continue;
        ++n;
        ok += t.correct;
    }
    return n == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(n);
}

std::size_t BenchmarkReport::count(Method m) const
{
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [m](const auto& t) { return t.method == m; }));
}

namespace {

std::vector<double> as_doubles(const LevelVector& v)
{
    return {v.values().begin(), v.values().end()};
}

} // namespace

BenchmarkReport run_benchmark(Network& net, const std::vector<Method>& methods, const BenchmarkSetup& setup,
                              std::uint64_t seed)
{
    setup.baseline.validate(net.num_columns());
    if (setup.labels.size() != setup.training.size() || setup.labels.empty())
        throw UsageError("benchmark needs one clean training sample per odor");
    if (!(setup.p_min >= 0.0 && setup.p_min <= setup.p_max && setup.p_max <= 1.0))
        throw ConfigError("benchmark P range must satisfy 0 <= min <= max <= 1");

    std::vector<std::vector<double>> clean;
    for (const auto& t : setup.training)
        clean.push_back(as_doubles(t));
    const std::size_t k = std::min(setup.baseline.pca_components, clean.size());
    const PcaModel pca(clean, k);

    auto process = [&](Method m, const LevelVector& x) -> std::vector<double> {
        const auto raw = as_doubles(x);
        switch (m) {
        case Method::raw: return normalize_rank(raw);
        case Method::mf: return normalize_rank(median_filter(raw, setup.baseline.mf_window));
        case Method::tvf: return normalize_rank(tv_denoise_1d(raw, setup.baseline.tv_lambda));
        case Method::pca: {
            auto r = pca.denoise(raw);
            for (auto& v : r)
                v = std::max(v, 0.0);
            return normalize_rank(r);
        }
        case Method::epl: break;
        }
        const auto resp = net.run_sniff(x, Mode::test);
        return cycle_to_rank_vector(resp.last(), net.num_columns(), net.gamma());
    };

    // Reference vectors: each method applied to the clean training samples,
    // except EPL, whose references are the learned fifth-cycle patterns.
    std::vector<std::vector<LabeledVector>> refs(methods.size());
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        for (std::size_t o = 0; o < setup.training.size(); ++o)
            refs[mi].push_back({setup.labels[o], process(methods[mi], setup.training[o])});

    BenchmarkReport report;
    report.methods = methods;
    for (std::size_t o = 0; o < setup.training.size(); ++o) {
        for (std::size_t t = 0; t < setup.trials_per_odor; ++t) {
            const std::uint64_t trial_seed = derive_seed(seed, "benchmark", o * setup.trials_per_odor + t);
            Rng rng(trial_seed);
            const double p = rng.uniform(setup.p_min, setup.p_max);
            const LevelVector x = occlude(setup.training[o], p, rng);
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                const auto out = process(methods[mi], x);
                const auto label = manhattan_classify(out, refs[mi], setup.threshold);
                BenchmarkTrial bt;
                bt.method = methods[mi];
                bt.odor = setup.labels[o];
                bt.p = p;
                bt.seed = trial_seed;
                bt.predicted = label.value_or("unknown");
                bt.correct = label && *label == setup.labels[o];
                report.trials.push_back(std::move(bt));
            }
        }
    }
    return report;
}

std::string benchmark_csv(const BenchmarkReport& report)
{
    std::ostringstream out;
    out << "method,odor,P,seed,predicted,correct\n";
    char pbuf[32];
    for (const auto& t : report.trials) {
        std::snprintf(pbuf, sizeof pbuf, "%.6f", t.p);
        out << to_string(t.method) << ',' << t.odor << ',' << pbuf << ',' << t.seed << ',' << t.predicted << ','
            << (t.correct ? 1 : 0) << '\n';
    }
    return out.str();
}

} // namespace epl
