#pragma once

#include "epl/network.hpp"
#include "epl/plasticity.hpp"

#include <string>
#include <utility>
#include <vector>

namespace epl {

inline constexpr double kDefaultClassifyThreshold = 0.75;

/// Normalized rank-order vector: unit sum, or all zero when nothing spiked.
using RankVector = std::vector<double>;

struct Classification {
    std::optional<std::string> label; // empty means Unknown
    double best_similarity = 0.0;
    /// One row per library odor, in training order: similarity per cycle.
    std::vector<std::pair<std::string, std::vector<double>>> per_cycle_similarities;

    bool known() const { return label.has_value(); }
    std::string label_or_unknown() const { return label.value_or("unknown"); }
};

/// |a ∩ b| / |a ∪ b| over (mc, ts) pairs; two empty sets give 1.
double jaccard_similarity(const SpikeSet& a, const SpikeSet& b);

/// Fifth-cycle threshold test, then max-across-cycles among candidates;
/// ties go to the earliest-trained odor.
Classification classify_sniff(const SniffResponse& resp, const OdorLibrary& library,
                              double threshold = kDefaultClassifyThreshold);

/// Shared decision rule: given per-odor final and max similarities.
Classification decide(std::vector<std::pair<std::string, std::vector<double>>> per_odor, std::span<const double> final_sim,
                      std::span<const double> best_sim, double threshold);

RankVector cycle_to_rank_vector(const SpikeSet& spikes, std::size_t columns, const GammaConfig& gamma);

/// Normalizes a raw (nonnegative) vector to unit sum; all-zero stays zero.
RankVector normalize_rank(std::span<const double> v);

double manhattan_similarity(std::span<const double> a, std::span<const double> b);

struct LabeledVector {
    std::string label;
    RankVector vec;
};

/// Nearest neighbour by Manhattan similarity 1 / (1 + d); Unknown unless the
/// best similarity exceeds `threshold`. Ties go to the earlier entry.
std::optional<std::string> manhattan_classify(std::span<const double> test, std::span<const LabeledVector> train,
                                              double threshold = kDefaultClassifyThreshold);

} // namespace epl
