#include "epl/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epl {

double jaccard_similarity(const SpikeSet& a, const SpikeSet& b)
{
    if (a.empty() && b.empty())
        return 1.0;
    // Both sets are sorted by (mc, ts); merge-count the intersection.
    std::size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++inter;
            ++ia;
            ++ib;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

Classification decide(std::vector<std::pair<std::string, std::vector<double>>> per_odor, std::span<const double> final_sim,
                      std::span<const double> best_sim, double threshold)
{
    Classification out;
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < final_sim.size(); ++i) {
        if (!(final_sim[i] > threshold))
            continue;
        if (!pick || best_sim[i] > best_sim[*pick])
            pick = i;
    }
    if (pick) {
        out.label = per_odor[*pick].first;
        out.best_similarity = best_sim[*pick];
    } else if (!best_sim.empty()) {
        out.best_similarity = *std::max_element(final_sim.begin(), final_sim.end());
    }
    out.per_cycle_similarities = std::move(per_odor);
    return out;
}

Classification classify_sniff(const SniffResponse& resp, const OdorLibrary& library, double threshold)
{
    if (library.empty())
        throw UsageError("cannot classify against an empty odor library");
    if (resp.cycles.empty())
        throw InputError("sniff response has no cycles");
    std::vector<std::pair<std::string, std::vector<double>>> per_odor;
    std::vector<double> final_sim, best_sim;
    for (const auto& rec : library.records()) {
        std::vector<double> sims;
        sims.reserve(resp.cycles.size());
        for (const auto& c : resp.cycles)
            sims.push_back(jaccard_similarity(c, rec.learned_pattern));
        final_sim.push_back(sims.back());
        best_sim.push_back(*std::max_element(sims.begin(), sims.end()));
        per_odor.emplace_back(rec.label, std::move(sims));
    }
    return decide(std::move(per_odor), final_sim, best_sim, threshold);
}

RankVector normalize_rank(std::span<const double> v)
{
    RankVector out(v.begin(), v.end());
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (sum > 0.0)
        for (auto& x : out)
            x /= sum;
    return out;
}

RankVector cycle_to_rank_vector(const SpikeSet& spikes, std::size_t columns, const GammaConfig& gamma)
{
    std::vector<double> raw(columns, 0.0);
    for (const auto& s : spikes) {
        if (s.mc >= columns)
            throw InputError("spike from MC outside the column range");
        raw[s.mc] = static_cast<double>(gamma.permissive_len - s.ts);
    }
    return normalize_rank(raw);
}

double manhattan_similarity(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InputError("vector dimensions differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += std::abs(a[i] - b[i]);
    return 1.0 / (1.0 + d);
}

std::optional<std::string> manhattan_classify(std::span<const double> test, std::span<const LabeledVector> train,
                                              double threshold)
{
    std::optional<std::size_t> best;
    double best_s = -1.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        const double s = manhattan_similarity(test, train[i].vec);
        if (s > best_s) {
            best_s = s;
            best = i;
        }
    }
    if (!best || !(best_s > threshold))
        return std::nullopt;
    return train[*best].label;
}

} // namespace epl
