#pragma once

#include "epl/experiment.hpp"

#include <vector>

namespace epl::test {

inline LevelVector random_levels(Rng& rng, std::size_t n, bool sparse = true)
{
    std::vector<int> v(n);
    for (auto& x : v)
        x = static_cast<int>(rng.uniform_int(0, kNumLevels - 1));
    LevelVector out(std::move(v));
    return sparse ? sparsify(out) : out;
}

inline NetworkConfig net_config(std::uint64_t seed, int window = NetworkConfig{}.gc_window)
{
    NetworkConfig c;
    c.rng_seed = seed;
    c.gc_window = window;
    return c;
}

// Zeroes every excitatory weight so no GC can fire; isolates MC dynamics.
inline void silence_gcs(Network& net)
{
    for (std::uint32_t i = 0; i < net.exc_synapses().size(); ++i)
        net.exc_synapse(i).weight = Weight{};
}

inline const EncodedDataset& synthetic_dataset()
{
    static const EncodedDataset ds = [] {
        ExperimentConfig cfg;
        return load_experiment_dataset(cfg).encoded;
    }();
    return ds;
}

} // namespace epl::test
