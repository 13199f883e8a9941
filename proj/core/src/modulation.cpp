#include "epl/modulation.hpp"

#include <algorithm>
#include <cmath>

namespace epl {

void NeuromodSchedule::validate() const
{
    if (scale_factors.size() != 5)
        throw ConfigError("neuromodulation schedule needs exactly 5 scale factors");
    if (scale_factors.front() != 1.0)
        throw ConfigError("neuromodulation schedule must start at 1.0");
    for (std::size_t i = 0; i < scale_factors.size(); ++i) {
        const double s = scale_factors[i];
        if (!(s > 0.0 && s <= 1.0))
            throw ConfigError("schedule factors must lie in (0, 1]");
        if (i > 0 && s > scale_factors[i - 1])
            throw ConfigError("schedule factors must be nonincreasing");
    }
}

void scale_thresholds(Network& net, double factor)
{
    for (std::uint32_t g = 0; g < net.num_gcs(); ++g) {
        auto& gc = net.granule_cell(g);
        gc.threshold = gc.base_threshold.scaled(factor);
    }
}

NeuromodResult neuromodulated_identify(Network& net, const LevelVector& sample, const OdorLibrary& library,
                                       const NeuromodSchedule& sched, double threshold)
{
    sched.validate();
    if (library.empty())
        throw UsageError("cannot classify against an empty odor library");

    std::vector<Weight> saved(net.num_gcs());
    for (std::uint32_t g = 0; g < net.num_gcs(); ++g)
        saved[g] = net.granule_cell(g).threshold;

    NeuromodResult out;
    out.state_similarities.assign(library.size(), {});
    for (double factor : sched.scale_factors) {
        scale_thresholds(net, factor);
        const SniffResponse resp = net.run_sniff(sample, Mode::test);
        for (std::size_t i = 0; i < library.size(); ++i)
            out.state_similarities[i].push_back(jaccard_similarity(resp.last(), library[i].learned_pattern));
    }
    for (std::uint32_t g = 0; g < net.num_gcs(); ++g)
        net.granule_cell(g).threshold = saved[g];

    std::vector<std::pair<std::string, std::vector<double>>> per_odor;
    std::vector<double> best;
    for (std::size_t i = 0; i < library.size(); ++i) {
        const auto& s = out.state_similarities[i];
        best.push_back(*std::max_element(s.begin(), s.end()));
        per_odor.emplace_back(library[i].label, s);
    }
    // Across states the best value plays both roles: threshold test and ranking.
    out.classification = decide(std::move(per_odor), best, best, threshold);
    if (out.classification.label) {
        const auto* rec = library.find(*out.classification.label);
        const auto& s = out.state_similarities[static_cast<std::size_t>(rec - library.records().data())];
        out.best_state = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
    }
    return out;
}

std::vector<std::uint32_t> prime_gcs(Network& net, const OdorLibrary& library, const PrimingSpec& spec, Rng& rng)
{
    if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0))
        throw ConfigError("priming fraction must lie in [0, 1]");
    if (!(spec.primed_threshold_factor > 0.0 && spec.primed_threshold_factor < net.config().gc_threshold_factor))
        throw ConfigError("primed threshold must lie below the GC threshold");
    const auto* rec = library.find(spec.target_label);
    if (!rec)
        throw UsageError("cannot prime unknown odor '" + spec.target_label + "'");

    std::vector<std::uint32_t> pool = rec->tuned_gcs;
    const auto k = static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(pool.size()) + 0.5));
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size() - 1)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    const Weight primed = Weight::from_units(spec.primed_threshold_factor * net.config().base_exc_weight);
    for (auto g : pool)
        net.granule_cell(g).threshold = primed;
    return pool;
}

void clear_priming(Network& net)
{
    for (std::uint32_t g = 0; g < net.num_gcs(); ++g) {
        auto& gc = net.granule_cell(g);
        gc.threshold = gc.base_threshold;
    }
}

} // namespace epl
