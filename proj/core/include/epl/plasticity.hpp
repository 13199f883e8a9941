#pragma once

#include "epl/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epl {

struct PlasticityConfig {
    double delta_p = 0.05; // potentiation step, multiples of we
    double delta_d = 0.2;  // depression step, multiples of we
    double eta = 1.0;      // inhibitory learning rate
    int training_sniffs = 1;
    double training_noise_p = 0.0;
    bool excitatory_enabled = true;
    bool inhibitory_enabled = true;
    /// Arrivals in [spike - causal_window, spike - 1] are potentiated; 0 uses
    /// the network's GC integration window.
    int causal_window = 0;

    void validate() const;

    /// Slow regimen for noisy training: both excitatory steps scaled by 0.005,
    /// eta = 0.1, 200 sniffs.
    static PlasticityConfig few_shot(double training_noise_p);
};

/// Parameters of the excitatory rule resolved into weight quanta.
struct ExcitatoryRule {
    Weight potentiation;
    Weight depression;
    Weight cap;
    int window = 1; // arrivals in [spike - window, spike - 1] are causal

    static ExcitatoryRule from(const PlasticityConfig& cfg, const NetworkConfig& net);
};

struct OdorRecord {
    std::string label;
    std::uint32_t cohort_id = 0;
    SpikeSet learned_pattern;
    std::vector<std::uint32_t> tuned_gcs;
    /// Cohort GCs tuned by the end of each training cycle (cumulative).
    std::vector<std::size_t> tuned_per_cycle;
};

class OdorLibrary {
public:
    const OdorRecord& add(OdorRecord rec);
    const OdorRecord* find(std::string_view label) const;
    bool contains(std::string_view label) const { return find(label) != nullptr; }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const std::vector<OdorRecord>& records() const { return records_; }
    const OdorRecord& operator[](std::size_t i) const { return records_[i]; }

private:
    std::vector<OdorRecord> records_;
};

/// Heterosynaptic additive STDP on one GC's incoming synapses after it spiked
/// at `gc_spike_ts`: causal arrivals are potentiated (capped), every other
/// synapse, including silent ones, is depressed (floored at 0).
void excitatory_update(const GranuleCell& gc, int gc_spike_ts, std::span<ExcSynapse> incoming,
                       const ExcitatoryRule& rule);

/// Blocking-period update for a synapse whose GC spiked in the previous cycle.
/// A missing AD initiation counts as t_AD = permissive_len, which drives the
/// synapse toward a full-epoch block.
void inhibitory_update(InhSynapse& syn, std::optional<int> t_ad, int t_r, double eta, const GammaConfig& gamma);

/// Neurogenesis: adds a fresh immature cohort. The newest existing cohort must
/// be mature.
std::uint32_t add_cohort(Network& net, Rng& rng);

/// One-shot (or few-shot) training of the newest cohort on `clean_sample`.
/// Marks the cohort mature and appends the learned record to `library`.
const OdorRecord& train_odor(Network& net, const LevelVector& clean_sample, const std::string& label,
                             const PlasticityConfig& cfg, OdorLibrary& library, Rng& rng);

} // namespace epl
