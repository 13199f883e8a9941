#pragma once

#include "epl/readout.hpp"


namespace epl {

struct NeuromodSchedule {
    std::vector<double> scale_factors{1.0, 0.9, 0.8, 0.7, 0.6};

    void validate() const;
};

struct PrimingSpec {
    std::string target_label;
    double fraction = 1.0;
    double primed_threshold_factor = 2.0; // multiples of we
};

struct NeuromodResult {
    Classification classification;
    /// Per odor (training order), last-cycle similarity under each state.
    std::vector<std::vector<double>> state_similarities;
    /// Index of the state whose last-cycle similarity to the chosen odor was highest.
    std::optional<std::size_t> best_state;
};

/// Sets every GC threshold to its base value times `factor`.
void scale_thresholds(Network& net, double factor);

/// One test sniff per schedule state; per odor the best last-cycle similarity
/// across states is classified with the usual threshold and tie rules.
/// Thresholds are restored before returning.
NeuromodResult neuromodulated_identify(Network& net, const LevelVector& sample, const OdorLibrary& library,
                                       const NeuromodSchedule& sched, double threshold = kDefaultClassifyThreshold);

/// Lowers the threshold of a uniformly drawn fraction of the target odor's
/// tuned GCs. Returns the primed GC ids.
std::vector<std::uint32_t> prime_gcs(Network& net, const OdorLibrary& library, const PrimingSpec& spec, Rng& rng);

/// Restores every GC threshold to its unscaled, unprimed value.
void clear_priming(Network& net);

} // namespace epl
