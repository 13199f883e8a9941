#include "epl/plasticity.hpp"

#include "epl/encoding.hpp"

#include <algorithm>
#include <cmath>

namespace epl {

void PlasticityConfig::validate() const
{
    if (!(delta_p > 0.0))
        throw ConfigError("delta_p must be > 0");
    if (!(delta_d > 0.0))
        throw ConfigError("delta_d must be > 0");
    if (!(eta > 0.0 && eta <= 1.0))
        throw ConfigError("eta must lie in (0, 1]");
    if (training_sniffs < 1)
        throw ConfigError("training_sniffs must be >= 1");
    if (!(training_noise_p >= 0.0 && training_noise_p <= 1.0))
        throw ConfigError("training noise P must lie in [0, 1]");
    if (causal_window < 0)
        throw ConfigError("causal_window must be >= 0");
}

PlasticityConfig PlasticityConfig::few_shot(double training_noise_p)
{
    PlasticityConfig c;
    c.delta_p *= 0.005;
    c.delta_d *= 0.005;
    c.eta = 0.1;
    c.training_sniffs = 200;
    c.training_noise_p = training_noise_p;
    return c;
}

ExcitatoryRule ExcitatoryRule::from(const PlasticityConfig& cfg, const NetworkConfig& net)
{
    ExcitatoryRule r;
    r.potentiation = Weight::from_units(cfg.delta_p * net.base_exc_weight);
    r.depression = Weight::from_units(cfg.delta_d * net.base_exc_weight);
    r.cap = net.weight_cap();
    r.window = cfg.causal_window > 0 ? cfg.causal_window : net.gc_window;
    return r;
}

const OdorRecord& OdorLibrary::add(OdorRecord rec)
{
    if (contains(rec.label))
        throw UsageError("odor '" + rec.label + "' is already trained");
    records_.push_back(std::move(rec));
    return records_.back();
}

const OdorRecord* OdorLibrary::find(std::string_view label) const
{
    for (const auto& r : records_)
        if (r.label == label)
            return &r;
    return nullptr;
}

void excitatory_update(const GranuleCell& gc, int gc_spike_ts, std::span<ExcSynapse> incoming,
                       const ExcitatoryRule& rule)
{
    if (gc.mature)
        throw ContractError("excitatory update on a mature GC");
    const Weight zero{};
    for (auto& s : incoming) {
        const bool causal = s.arrival_ts >= 0 && s.arrival_ts < gc_spike_ts && s.arrival_ts >= gc_spike_ts - rule.window;
        if (causal)
            s.weight = std::min(s.weight + rule.potentiation, rule.cap);
        else
            s.weight = std::max(s.weight - rule.depression, zero);
        if (s.weight < zero || s.weight > rule.cap)
            throw ContractError("excitatory weight left [0, cap]");
    }
}

void inhibitory_update(InhSynapse& syn, std::optional<int> t_ad, int t_r, double eta, const GammaConfig& gamma)
{
    const int target = t_ad.value_or(gamma.permissive_len);
    // Round fractional steps up; the epsilon keeps exact products like
    // 0.1 * 30 from landing one step high.
    const int step = static_cast<int>(std::ceil(eta * static_cast<double>(target - t_r) - 1e-9));
    syn.blocking_period = std::clamp(syn.blocking_period + step, 0, gamma.permissive_len);
}

std::uint32_t add_cohort(Network& net, Rng& rng)
{
    const auto cohorts = net.cohorts();
    if (!cohorts.empty() && !cohorts.back().mature)
        throw StateError("the newest GC cohort has not matured yet");
    return net.grow_cohort(rng);
}

const OdorRecord& train_odor(Network& net, const LevelVector& clean_sample, const std::string& label,
                             const PlasticityConfig& cfg, OdorLibrary& library, Rng& rng)
{
    cfg.validate();
    if (library.contains(label))
        throw UsageError("odor '" + label + "' is already trained");
    const auto cohorts = net.cohorts();
    if (cohorts.empty() || cohorts.back().mature)
        throw StateError("no immature GC cohort available for training");

    const auto cohort_id = static_cast<std::uint32_t>(cohorts.size() - 1);
    const Cohort cohort = cohorts.back();
    const auto plastic = [&](std::uint32_t gc) { return gc >= cohort.first_gc && gc < cohort.first_gc + cohort.count; };
    const ExcitatoryRule rule = ExcitatoryRule::from(cfg, net.config());
    const GammaConfig gamma = net.gamma();

    OdorRecord rec;
    rec.label = label;
    rec.cohort_id = cohort_id;
    std::vector<char> tuned(cohort.count, 0);
    std::size_t tuned_count = 0;

    for (int sniff = 0; sniff < cfg.training_sniffs; ++sniff) {
        const LevelVector input = cfg.training_noise_p > 0.0 ? occlude(clean_sample, cfg.training_noise_p, rng) : clean_sample;
        net.reset_transients();
        for (int c = 0; c < gamma.cycles_per_sniff; ++c) {
            const CycleResult res = net.run_gamma_cycle(input, c, Mode::train);
            if (cfg.inhibitory_enabled) {
                for (const auto& [gc, t_r] : res.released) {
                    if (!plastic(gc))
                        continue;
                    auto& syn = net.inh_synapse(gc);
                    inhibitory_update(syn, res.ad_times[syn.post_mc], t_r, cfg.eta, gamma);
                }
            }
            for (const auto& sp : res.gc_spikes) {
                if (!plastic(sp.gc))
                    continue;
                if (cfg.excitatory_enabled)
                    excitatory_update(net.granule_cell(sp.gc), sp.ts, net.incoming_mut(sp.gc), rule);
                auto& t = tuned[sp.gc - cohort.first_gc];
                if (!t) {
                    t = 1;
                    ++tuned_count;
                }
            }
            rec.tuned_per_cycle.push_back(tuned_count);
        }
    }

    for (std::uint32_t i = 0; i < cohort.count; ++i)
        if (tuned[i])
            rec.tuned_gcs.push_back(cohort.first_gc + i);
    net.set_cohort_mature(cohort_id);
    rec.learned_pattern = net.run_sniff(clean_sample, Mode::test).last();
    return library.add(std::move(rec));
}

} // namespace epl
