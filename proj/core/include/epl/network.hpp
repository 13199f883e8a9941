#pragma once

#include "epl/common.hpp"
#include "epl/rng.hpp"
#include "epl/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace epl {

/// Gamma-cycle timing. The permissive epoch length doubles as the number of
/// encodable sensor levels.
struct GammaConfig {
    int permissive_len = 16;
    int inhibitory_len = 24;
    int cycles_per_sniff = 5;

    int cycle_len() const { return permissive_len + inhibitory_len; }
    void validate() const;
};

struct NetworkConfig {
    std::size_t num_columns = kDefaultColumns;
    std::size_t gcs_per_cohort = 5;
    double mc_to_gc_prob = 0.2;
    double base_exc_weight = 1.0;        // we
    double gc_threshold_factor = 6.0;    // GC threshold in multiples of we
    double exc_weight_cap_factor = 1.25; // excitatory weight cap in multiples of we
    int gc_refractory = 20;
    /// GC excitation is the summed weight of arrivals within the last
    /// `gc_window` timesteps. 1 is a pure coincidence detector; any value of at
    /// least the cycle length integrates over the whole cycle.
    int gc_window = 8;
    /// Inclusive MC->GC delay range; 0 selects the default for the gamma config
    /// (permissive_len .. inhibitory_len - 1).
    int delay_min = 0;
    int delay_max = 0;
    std::uint64_t rng_seed = 0;

    void validate() const;

    Weight we() const { return Weight::from_units(base_exc_weight); }
    Weight gc_threshold() const { return Weight::from_units(base_exc_weight * gc_threshold_factor); }
    Weight weight_cap() const { return Weight::from_units(base_exc_weight * exc_weight_cap_factor); }
};

enum class Mode { train, test };

enum class InhState : std::uint8_t { inactive, blocking, release };

struct MitralCell {
    std::uint32_t column = 0;
    std::optional<int> ad_initiation_ts; // t_AD for the current cycle
    int soma_ad_drive = 0;               // +1 from t_AD to the end of the permissive epoch
    bool spiked_this_cycle = false;
    std::optional<int> spike_ts;
};

struct GranuleCell {
    std::uint32_t id = 0;
    std::uint32_t column = 0;
    std::uint32_t cohort = 0;
    Weight threshold;      // effective threshold (scaled or primed)
    Weight base_threshold; // unscaled, unprimed
    Weight v;
    std::int64_t refractory_until = -1; // absolute timestep
    bool mature = false;
    bool spiked_this_cycle = false;
    int spike_ts = -1;
    std::uint32_t first_synapse = 0; // incoming excitatory synapses are contiguous
    std::uint32_t num_synapses = 0;
};

struct ExcSynapse {
    std::uint32_t pre_mc = 0;
    std::uint32_t post_gc = 0;
    Weight weight;
    int delay = 0;
    int arrival_ts = -1; // arrival within the current cycle, -1 if none
};

/// GC -> cocolumnar MC inhibition; exactly one per GC, indexed by GC id.
struct InhSynapse {
    std::uint32_t pre_gc = 0;
    std::uint32_t post_mc = 0;
    int blocking_period = 0; // learned Δ_B; 0 exerts no effect
    InhState state = InhState::inactive;
    int state_timer = 0;
    bool pending = false; // GC spiked during the previous cycle

    int contribution() const
    {
        switch (state) {
        case InhState::blocking: return -1;
        case InhState::release: return 1;
        default: return 0;
        }
    }
};

struct Cohort {
    std::uint32_t first_gc = 0;
    std::uint32_t count = 0;
    bool mature = false;
};

struct GcSpike {
    std::uint32_t gc = 0;
    int ts = 0;
};

/// Everything a gamma cycle produced, including what the learning rules need.
struct CycleResult {
    SpikeSet mc_spikes;
    std::vector<std::optional<int>> ad_times; // per MC
    std::vector<GcSpike> gc_spikes;
    /// GCs whose inhibitory synapse was pending at cycle start, with the
    /// release timestep t_R (= Δ_B) that applied during this cycle.
    std::vector<std::pair<std::uint32_t, int>> released;
};

/// Maps a sensor level to the AD spike-initiation timestep: level 0 never
/// initiates, level v >= 1 initiates at permissive_len - v.
std::optional<int> ad_initiation_time(int level, const GammaConfig& gamma);

class Network {
public:
    Network(const NetworkConfig& cfg, const GammaConfig& gamma);

    const NetworkConfig& config() const { return cfg_; }
    const GammaConfig& gamma() const { return gamma_; }

    std::size_t num_columns() const { return mcs_.size(); }
    std::size_t num_gcs() const { return gcs_.size(); }
    std::size_t num_cohorts() const { return cohorts_.size(); }

    std::span<const MitralCell> mitral_cells() const { return mcs_; }
    std::span<const GranuleCell> granule_cells() const { return gcs_; }
    std::span<const ExcSynapse> exc_synapses() const { return exc_; }
    std::span<const InhSynapse> inh_synapses() const { return inh_; }
    std::span<const Cohort> cohorts() const { return cohorts_; }
    std::span<const ExcSynapse> incoming(std::uint32_t gc) const;

    GranuleCell& granule_cell(std::uint32_t gc) { return gcs_.at(gc); }
    ExcSynapse& exc_synapse(std::uint32_t idx) { return exc_.at(idx); }
    InhSynapse& inh_synapse(std::uint32_t gc) { return inh_.at(gc); }
    std::span<ExcSynapse> incoming_mut(std::uint32_t gc);

    /// Appends gcs_per_cohort immature GCs to every column (structural part
    /// of neurogenesis). Returns the new cohort id.
    std::uint32_t grow_cohort(Rng& rng);
    void set_cohort_mature(std::uint32_t cohort);

    /// Clears per-sniff transient state: GC excitation, pending inhibition,
    /// refractory counters.
    void reset_transients();

    CycleResult run_gamma_cycle(const LevelVector& input, int cycle_index, Mode mode);
    SniffResponse run_sniff(const LevelVector& input, Mode mode);

    std::int64_t clock() const { return clock_; }

private:
    void check_input(const LevelVector& input) const;

    NetworkConfig cfg_;
    GammaConfig gamma_;
    std::vector<MitralCell> mcs_;
    std::vector<GranuleCell> gcs_;
    std::vector<ExcSynapse> exc_;
    std::vector<InhSynapse> inh_;
    std::vector<Cohort> cohorts_;
    std::vector<std::vector<std::uint32_t>> outgoing_;   // per MC: excitatory synapse ids
    std::vector<std::vector<std::uint32_t>> inh_onto_mc_; // per MC: GC ids
    std::int64_t clock_ = 0;

    // Scratch reused across cycles.
    std::vector<std::vector<std::uint32_t>> arrivals_;
    std::vector<std::uint32_t> touched_synapses_;
};

Network build_network(const NetworkConfig& cfg, const GammaConfig& gamma);

inline CycleResult run_gamma_cycle(Network& net, const LevelVector& input, int cycle_index, Mode mode)
{
    return net.run_gamma_cycle(input, cycle_index, mode);
}

inline SniffResponse run_sniff(Network& net, const LevelVector& input, Mode mode)
{
    return net.run_sniff(input, mode);
}

} // namespace epl
