#include "epl/network.hpp"

#include <algorithm>
#include <string>

namespace epl {

namespace {

void require(bool cond, const std::string& what)
{
    if (!cond)
        throw ConfigError(what);
}

void ensure(bool cond, const char* what)
{
    if (!cond)
        throw ContractError(what);
}

} // namespace

void GammaConfig::validate() const
{
    require(permissive_len >= 1, "permissive_len must be >= 1");
    require(inhibitory_len >= 1, "inhibitory_len must be >= 1");
    require(cycles_per_sniff >= 1, "cycles_per_sniff must be >= 1");
    require(permissive_len >= kNumLevels, "permissive_len must cover all 16 sensor levels");
}

void NetworkConfig::validate() const
{
    require(num_columns >= 1, "num_columns must be >= 1");
    require(gcs_per_cohort >= 1, "gcs_per_cohort must be >= 1");
    require(mc_to_gc_prob > 0.0 && mc_to_gc_prob <= 1.0, "mc_to_gc_prob must lie in (0, 1]");
    require(base_exc_weight > 0.0, "base excitatory weight must be > 0");
    require(gc_threshold_factor > 0.0, "gc_threshold_factor must be > 0");
    require(exc_weight_cap_factor >= 1.0, "exc_weight_cap_factor must be >= 1");
    require(gc_refractory >= 0, "gc_refractory must be >= 0");
    require(gc_window >= 1, "gc_window must be >= 1");
    require(delay_min >= 0 && delay_max >= 0, "delays must be non-negative");
}

std::optional<int> ad_initiation_time(int level, const GammaConfig& gamma)
{
    if (level < 0 || level >= kNumLevels || level > gamma.permissive_len - 1)
        throw InputError("sensor level " + std::to_string(level) + " out of range");
    if (level == 0)
        return std::nullopt;
    return gamma.permissive_len - level;
}

Network::Network(const NetworkConfig& cfg, const GammaConfig& gamma) : cfg_(cfg), gamma_(gamma)
{
    gamma_.validate();
    cfg_.validate();
    require(gamma_.inhibitory_len >= gamma_.permissive_len,
            "inhibitory epoch must be at least as long as the permissive epoch");
    if (cfg_.delay_min == 0 && cfg_.delay_max == 0) {
        cfg_.delay_min = gamma_.permissive_len;
        cfg_.delay_max = std::max(gamma_.permissive_len, gamma_.inhibitory_len - 1);
    }
    // Earliest MC spike is at ts 1 (level 15); latest at permissive_len - 1.
    // Every arrival must land in the inhibitory epoch with room for the GC
    // spike one timestep later.
    require(cfg_.delay_min <= cfg_.delay_max, "delay_min exceeds delay_max");
    require(1 + cfg_.delay_min >= gamma_.permissive_len, "delay_min too short: GC excitation would reach the permissive epoch");
    require(gamma_.permissive_len - 1 + cfg_.delay_max <= gamma_.cycle_len() - 2,
            "delay_max too long: GC spikes would fall outside the cycle");

    mcs_.resize(cfg_.num_columns);
    for (std::size_t m = 0; m < mcs_.size(); ++m)
        mcs_[m].column = static_cast<std::uint32_t>(m);
    outgoing_.resize(cfg_.num_columns);
    inh_onto_mc_.resize(cfg_.num_columns);
    arrivals_.resize(static_cast<std::size_t>(gamma_.cycle_len()));

    Rng rng(cfg_.rng_seed);
    grow_cohort(rng);
}

Network build_network(const NetworkConfig& cfg, const GammaConfig& gamma)
{
    return Network(cfg, gamma);
}

std::span<const ExcSynapse> Network::incoming(std::uint32_t gc) const
{
    const auto& g = gcs_.at(gc);
    return std::span<const ExcSynapse>(exc_).subspan(g.first_synapse, g.num_synapses);
}

std::span<ExcSynapse> Network::incoming_mut(std::uint32_t gc)
{
    const auto& g = gcs_.at(gc);
    return std::span<ExcSynapse>(exc_).subspan(g.first_synapse, g.num_synapses);
}

std::uint32_t Network::grow_cohort(Rng& rng)
{
    const auto cohort_id = static_cast<std::uint32_t>(cohorts_.size());
    Cohort cohort;
    cohort.first_gc = static_cast<std::uint32_t>(gcs_.size());
    const Weight we = cfg_.we();
    const Weight theta = cfg_.gc_threshold();

    for (std::uint32_t col = 0; col < cfg_.num_columns; ++col) {
        for (std::size_t k = 0; k < cfg_.gcs_per_cohort; ++k) {
            GranuleCell g;
            g.id = static_cast<std::uint32_t>(gcs_.size());
            g.column = col;
            g.cohort = cohort_id;
            g.threshold = theta;
            g.base_threshold = theta;
            g.first_synapse = static_cast<std::uint32_t>(exc_.size());
            for (std::uint32_t m = 0; m < cfg_.num_columns; ++m) {
                if (!rng.bernoulli(cfg_.mc_to_gc_prob))
                    continue;
                ExcSynapse s;
                s.pre_mc = m;
                s.post_gc = g.id;
                s.weight = we;
                s.delay = static_cast<int>(rng.uniform_int(cfg_.delay_min, cfg_.delay_max));
                outgoing_[m].push_back(static_cast<std::uint32_t>(exc_.size()));
                exc_.push_back(s);
            }
            g.num_synapses = static_cast<std::uint32_t>(exc_.size()) - g.first_synapse;

            InhSynapse inh;
            inh.pre_gc = g.id;
            inh.post_mc = col;
            inh_onto_mc_[col].push_back(g.id);
            inh_.push_back(inh);
            gcs_.push_back(g);
            ++cohort.count;
        }
    }
    cohorts_.push_back(cohort);
    return cohort_id;
}

void Network::set_cohort_mature(std::uint32_t cohort)
{
    auto& c = cohorts_.at(cohort);
    c.mature = true;
    for (std::uint32_t g = c.first_gc; g < c.first_gc + c.count; ++g)
        gcs_[g].mature = true;
}

void Network::reset_transients()
{
    for (auto& g : gcs_) {
        g.v = Weight{};
        g.refractory_until = -1;
        g.spiked_this_cycle = false;
        g.spike_ts = -1;
    }
    for (auto& s : inh_) {
        s.pending = false;
        s.state = InhState::inactive;
        s.state_timer = 0;
    }
}

void Network::check_input(const LevelVector& input) const
{
    if (input.size() != mcs_.size())
        throw InputError("input has " + std::to_string(input.size()) + " levels, network has " +
                         std::to_string(mcs_.size()) + " columns");
    for (std::size_t i = 0; i < input.size(); ++i)
        if (input[i] > gamma_.permissive_len - 1)
            throw InputError("level exceeds the permissive epoch");
}

CycleResult Network::run_gamma_cycle(const LevelVector& input, int /*cycle_index*/, Mode mode)
{
    check_input(input);
    const int P = gamma_.permissive_len;
    const int L = gamma_.cycle_len();
    const int window = cfg_.gc_window;

    CycleResult out;
    out.ad_times.resize(mcs_.size());

    for (std::size_t m = 0; m < mcs_.size(); ++m) {
        auto& mc = mcs_[m];
        mc.ad_initiation_ts = ad_initiation_time(input[m], gamma_);
        mc.soma_ad_drive = 0;
        mc.spiked_this_cycle = false;
        mc.spike_ts.reset();
        out.ad_times[m] = mc.ad_initiation_ts;
    }
    for (auto& g : gcs_) {
        g.v = Weight{};
        g.spiked_this_cycle = false;
        g.spike_ts = -1;
    }
    for (auto idx : touched_synapses_)
        exc_[idx].arrival_ts = -1;
    touched_synapses_.clear();
    for (auto& bucket : arrivals_)
        bucket.clear();

    // Inhibition from GCs that spiked last cycle: Blocking for Δ_B timesteps
    // from ts 0, then Release for one timestep.
    for (auto& s : inh_) {
        s.state = InhState::inactive;
        s.state_timer = 0;
        if (!s.pending)
            continue;
        s.pending = false;
        out.released.emplace_back(s.pre_gc, s.blocking_period);
        if (s.blocking_period > 0) {
            s.state = InhState::blocking;
            s.state_timer = s.blocking_period;
        }
    }

    std::vector<Spike> mc_spikes;
    std::vector<std::uint32_t> fire_next;
    std::vector<std::uint32_t> waiting; // crossed threshold while refractory
    std::vector<std::uint32_t> touched_gcs;

    for (int t = 0; t < L; ++t) {
        const std::int64_t now = clock_ + t;

        if (t < P) {
            for (std::size_t m = 0; m < mcs_.size(); ++m) {
                auto& mc = mcs_[m];
                if (mc.ad_initiation_ts && t >= *mc.ad_initiation_ts)
                    mc.soma_ad_drive = 1;
                if (mc.spiked_this_cycle)
                    continue;
                bool fire;
                if (mode == Mode::train) {
                    fire = mc.soma_ad_drive > 0;
                } else {
                    int total = mc.soma_ad_drive;
                    for (auto g : inh_onto_mc_[m])
                        total += inh_[g].contribution();
                    fire = total > 0;
                }
                if (fire) {
                    mc.spiked_this_cycle = true;
                    mc.spike_ts = t;
                    mc_spikes.push_back({static_cast<std::uint32_t>(m), t});
                    for (auto sid : outgoing_[m]) {
                        const int at = t + exc_[sid].delay;
                        ensure(at < L, "excitatory arrival beyond the gamma cycle");
                        arrivals_[static_cast<std::size_t>(at)].push_back(sid);
                    }
                }
            }
            for (auto& s : inh_) {
                if (s.state == InhState::blocking) {
                    if (--s.state_timer == 0) {
                        s.state = InhState::release;
                        s.state_timer = 1;
                    }
                } else if (s.state == InhState::release) {
                    s.state = InhState::inactive;
                    s.state_timer = 0;
                }
            }
        } else if (t == P) {
            // Inhibitory epoch: MC compartments are held at zero.
            for (auto& mc : mcs_)
                mc.soma_ad_drive = 0;
        }

        // GC spikes for threshold crossings at t - 1.
        auto try_fire = [&](std::uint32_t gid) {
            auto& g = gcs_[gid];
            if (g.spiked_this_cycle)
                return true;
            if (g.v < g.threshold)
                return true; // fell below threshold (window expiry)
            if (g.refractory_until >= now)
                return false;
            ensure(t >= P, "GC spike outside the inhibitory epoch");
            g.spiked_this_cycle = true;
            g.spike_ts = t;
            g.v = Weight{};
            g.refractory_until = now + cfg_.gc_refractory;
            inh_[gid].pending = true;
            out.gc_spikes.push_back({gid, t});
            return true;
        };
        for (auto gid : fire_next)
            if (!try_fire(gid))
                waiting.push_back(gid);
        fire_next.clear();
        std::erase_if(waiting, [&](std::uint32_t gid) {
            return gcs_[gid].refractory_until < now && try_fire(gid);
        });

        // Window expiry, then this timestep's arrivals.
        if (window < L && t - window >= 0) {
            for (auto sid : arrivals_[static_cast<std::size_t>(t - window)]) {
                const auto& s = exc_[sid];
                auto& g = gcs_[s.post_gc];
                if (!g.spiked_this_cycle)
                    g.v -= s.weight;
            }
        }
        touched_gcs.clear();
        for (auto sid : arrivals_[static_cast<std::size_t>(t)]) {
            auto& s = exc_[sid];
            s.arrival_ts = t;
            touched_synapses_.push_back(sid);
            auto& g = gcs_[s.post_gc];
            if (g.spiked_this_cycle)
                continue;
            g.v += s.weight;
            touched_gcs.push_back(s.post_gc);
        }
        for (auto gid : touched_gcs) {
            auto& g = gcs_[gid];
            if (!g.spiked_this_cycle && g.v >= g.threshold &&
                std::find(fire_next.begin(), fire_next.end(), gid) == fire_next.end()) {
                ensure(t + 1 < L, "GC threshold crossing at the final timestep");
                fire_next.push_back(gid);
            }
        }
    }

    out.mc_spikes = SpikeSet(std::move(mc_spikes));
    clock_ += L;
    return out;
}

SniffResponse Network::run_sniff(const LevelVector& input, Mode mode)
{
    reset_transients();
    SniffResponse r;
    r.cycles.reserve(static_cast<std::size_t>(gamma_.cycles_per_sniff));
    for (int c = 0; c < gamma_.cycles_per_sniff; ++c)
        r.cycles.push_back(run_gamma_cycle(input, c, mode).mc_spikes);
    return r;
}

} // namespace epl
